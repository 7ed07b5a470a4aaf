//! Embedded data shipped with the crate: the demonstration map and the
//! participant table of the satisfaction study.

use crate::mapmodel::{parse_map, MapDocument};
use crate::sus::{read_records, ParticipantRecord};

/// Small fictive town: 6 streets, 6 points of interest, 1 river and a frame.
pub const FIXTURE_MAP_SVG: &str = include_str!("../data/fictive_town.svg");

/// Per-participant demographics and SUS scores (12 rows).
pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");

pub fn fixture_map() -> MapDocument {
    parse_map(FIXTURE_MAP_SVG.as_bytes()).expect("embedded fixture map is valid")
}

pub fn table1() -> Vec<ParticipantRecord> {
    read_records(TABLE1_CSV.as_bytes()).expect("embedded participant table is valid")
}
