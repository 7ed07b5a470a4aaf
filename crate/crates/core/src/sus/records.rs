use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{score, SusError, SusResponse, SusScore, ITEM_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gender {
    F,
    M,
}

/// One participant: demographics and the SUS score they gave.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParticipantRecord {
    pub user: u32,
    pub gender: Gender,
    pub age: u32,
    /// Age at legal blindness.
    pub onset_age: u32,
    pub braille_years: u32,
    pub sus_score: SusScore,
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    user: u32,
    gender: Gender,
    age: u32,
    onset_age: u32,
    braille_years: u32,
    sus_score: f64,
}

/// One questionnaire as read from a responses file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseRow {
    pub user: String,
    pub response: SusResponse,
}

impl ResponseRow {
    pub fn score(&self) -> SusScore {
        score(&self.response)
    }
}

fn csv_error(e: &csv::Error) -> SusError {
    let line = e.position().map_or(0, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        _ => e.to_string(),
    };
    SusError::Csv { line, message }
}

/// Read `user,gender,age,onset_age,braille_years,sus_score` rows.
pub fn read_records(input: impl Read) -> Result<Vec<ParticipantRecord>, SusError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| csv_error(&e))?.clone();
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(&e))?;
        let raw: RawRecord = row.deserialize(Some(&headers)).map_err(|e| csv_error(&e))?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |message: String| SusError::Csv { line, message };
        if raw.onset_age > raw.age {
            return Err(bad(format!("user {}: onset age {} exceeds age {}", raw.user, raw.onset_age, raw.age)));
        }
        if raw.braille_years > raw.age {
            return Err(bad(format!("user {}: braille years {} exceed age {}", raw.user, raw.braille_years, raw.age)));
        }
        let sus_score = SusScore::new(raw.sus_score).map_err(|e| bad(format!("user {}: {e}", raw.user)))?;
        out.push(ParticipantRecord {
            user: raw.user,
            gender: raw.gender,
            age: raw.age,
            onset_age: raw.onset_age,
            braille_years: raw.braille_years,
            sus_score,
        });
    }
    Ok(out)
}

/// Read `user,q1,...,q10` rows.
pub fn read_responses(input: impl Read) -> Result<Vec<ResponseRow>, SusError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| csv_error(&e))?.clone();
    let expected: Vec<String> =
        std::iter::once("user".to_owned()).chain((1..=ITEM_COUNT).map(|i| format!("q{i}"))).collect();
    if headers.iter().ne(expected.iter().map(String::as_str)) {
        return Err(SusError::Csv { line: 1, message: format!("expected header `{}`", expected.join(",")) });
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(&e))?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |message: String| SusError::Csv { line, message };
        let items = row
            .iter()
            .skip(1)
            .map(|f| f.parse::<i64>().map_err(|_| bad(format!("`{f}` is not an integer"))))
            .collect::<Result<Vec<_>, _>>()?;
        let response = SusResponse::new(&items).map_err(|e| bad(e.to_string()))?;
        out.push(ResponseRow { user: row[0].to_owned(), response });
    }
    Ok(out)
}
