//! System Usability Scale scoring and the summary statistics used to report
//! satisfaction: mean, sample standard deviation, and Pearson correlations
//! against participant characteristics with a two-tailed significance test.

mod questionnaire;
mod records;

use serde::Serialize;

pub use questionnaire::{Questionnaire, QuestionnaireItem, Wording, ITEM_COUNT};
pub use records::{read_records, read_responses, Gender, ParticipantRecord, ResponseRow};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SusError {
    #[error("item {item} has value {value}, expected 1..=5")]
    Range { item: usize, value: i64 },
    #[error("expected {ITEM_COUNT} items, got {0}")]
    Length(usize),
    #[error("score {0} is not a SUS score (0..=100 in steps of 2.5)")]
    InvalidScore(f64),
    #[error("need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("input has zero variance")]
    DegenerateInput,
    #[error("no critical value tabulated for n = {0} (supported: 3..=32)")]
    UnsupportedN(usize),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
}

/// Ten Likert answers, each 1..=5, in questionnaire order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SusResponse {
    items: [u8; ITEM_COUNT],
}

impl SusResponse {
    pub fn new(items: &[i64]) -> Result<Self, SusError> {
        if items.len() != ITEM_COUNT {
            return Err(SusError::Length(items.len()));
        }
        let mut out = [0u8; ITEM_COUNT];
        for (i, (&v, slot)) in items.iter().zip(out.iter_mut()).enumerate() {
            if !(1..=5).contains(&v) {
                return Err(SusError::Range { item: i + 1, value: v });
            }
            *slot = v as u8;
        }
        Ok(Self { items: out })
    }

    pub fn items(&self) -> &[u8; ITEM_COUNT] {
        &self.items
    }
}

/// A SUS score: 0..=100 in steps of 2.5.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct SusScore(f64);

impl SusScore {
    pub fn new(value: f64) -> Result<Self, SusError> {
        let steps = value / 2.5;
        if (0.0..=100.0).contains(&value) && steps == steps.round() {
            Ok(Self(value))
        } else {
            Err(SusError::InvalidScore(value))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Brooke's scoring: odd items contribute `item - 1`, even items `5 - item`,
/// and the sum is scaled by 2.5. The wording of an item never matters.
pub fn score(resp: &SusResponse) -> SusScore {
    let raw: u32 =
        resp.items.iter().enumerate().map(|(i, &v)| if i % 2 == 0 { u32::from(v) - 1 } else { 5 - u32::from(v) }).sum();
    SusScore(f64::from(raw) * 2.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatsSummary {
    pub n: usize,
    pub mean: f64,
    /// Standard deviation with the n−1 denominator.
    pub sd_sample: f64,
    pub min: f64,
    pub max: f64,
}

pub fn aggregate(scores: &[SusScore]) -> Result<StatsSummary, SusError> {
    let values: Vec<f64> = scores.iter().map(SusScore::value).collect();
    summarize(&values)
}

/// Mean, sample SD, min and max of at least two values.
pub fn summarize(values: &[f64]) -> Result<StatsSummary, SusError> {
    let n = values.len();
    if n < 2 {
        return Err(SusError::InsufficientData { needed: 2, got: n });
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // keep mean inside [min, max] despite rounding
    Ok(StatsSummary { n, mean: mean.clamp(min, max), sd_sample: (ss / (n - 1) as f64).sqrt(), min, max })
}

/// Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, SusError> {
    if xs.len() != ys.len() {
        return Err(SusError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(SusError::InsufficientData { needed: 3, got: xs.len() });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (sxy, sxx, syy) = xs.iter().zip(ys).fold((0.0, 0.0, 0.0), |(sxy, sxx, syy), (x, y)| {
        let (dx, dy) = (x - mx, y - my);
        (sxy + dx * dy, sxx + dx * dx, syy + dy * dy)
    });
    if sxx == 0.0 || syy == 0.0 {
        return Err(SusError::DegenerateInput);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-tailed Student t critical values at α = 0.05 for df = 1..=30.
const T_CRIT_005: [f64; 30] = [
    12.706204736432095,
    4.302652729696142,
    3.182446305284263,
    2.7764451051977987,
    2.570581835636314,
    2.4469118511449692,
    2.3646242515927844,
    2.306004135204166,
    2.2621571628540993,
    2.2281388519649385,
    2.200985160082949,
    2.1788128296634177,
    2.1603686564610127,
    2.1447866879169273,
    2.131449545559323,
    2.1199052992210112,
    2.1098155778331806,
    2.10092204024096,
    2.093024054408263,
    2.0859634472658364,
    2.079613844727662,
    2.0738730679040147,
    2.0686576104190406,
    2.0638985616280205,
    2.059538552753294,
    2.055529438642871,
    2.0518305164802833,
    2.048407141795244,
    2.045229642132703,
    2.0422724563012373,
];

/// Two-tailed t critical value (α = 0.05) for `df` degrees of freedom.
pub fn t_critical(df: usize) -> Option<f64> {
    df.checked_sub(1).and_then(|i| T_CRIT_005.get(i)).copied()
}

/// Smallest |r| that is significant at α = 0.05 (two-tailed) for a sample of
/// `n` pairs: `t / sqrt(t² + n − 2)`.
pub fn critical_r(n: usize) -> Result<f64, SusError> {
    let df = n.checked_sub(2).filter(|df| *df >= 1).ok_or(SusError::UnsupportedN(n))?;
    let t = t_critical(df).ok_or(SusError::UnsupportedN(n))?;
    Ok(t / (t * t + df as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Characteristic {
    Age,
    OnsetAge,
    BrailleYears,
}

impl Characteristic {
    pub const ALL: [Characteristic; 3] = [Characteristic::Age, Characteristic::OnsetAge, Characteristic::BrailleYears];

    pub fn as_str(&self) -> &'static str {
        match self {
            Characteristic::Age => "age",
            Characteristic::OnsetAge => "onset_age",
            Characteristic::BrailleYears => "braille_years",
        }
    }

    pub fn of(&self, rec: &ParticipantRecord) -> f64 {
        f64::from(match self {
            Characteristic::Age => rec.age,
            Characteristic::OnsetAge => rec.onset_age,
            Characteristic::BrailleYears => rec.braille_years,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub characteristic: Characteristic,
    pub r: f64,
    pub critical_r: f64,
    /// `|r| >= critical_r`.
    pub significant: bool,
}

/// Correlate the SUS score with each participant characteristic.
pub fn correlate_characteristics(records: &[ParticipantRecord]) -> Result<Vec<CorrelationReport>, SusError> {
    let scores: Vec<f64> = records.iter().map(|r| r.sus_score.value()).collect();
    let critical = critical_r(records.len())?;
    Characteristic::ALL
        .iter()
        .map(|c| {
            let xs: Vec<f64> = records.iter().map(|r| c.of(r)).collect();
            let r = pearson(&scores, &xs)?;
            Ok(CorrelationReport { characteristic: *c, r, critical_r: critical, significant: r.abs() >= critical })
        })
        .collect()
}

/// Adjective band used when reporting a score: above 85 is "excellent",
/// 75 and above "good".
pub fn adjective(score: SusScore) -> Option<&'static str> {
    match score.value() {
        v if v > 85.0 => Some("excellent"),
        v if v >= 75.0 => Some("good"),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn resp(items: [i64; 10]) -> SusResponse {
        SusResponse::new(&items).unwrap()
    }

    #[test]
    fn scoring_examples() {
        assert_eq!(score(&resp([5, 1, 5, 1, 5, 1, 5, 1, 5, 1])).value(), 100.0);
        assert_eq!(score(&resp([3; 10])).value(), 50.0);
        assert_eq!(score(&resp([4, 2, 4, 2, 4, 2, 4, 2, 4, 2])).value(), 75.0);
        assert_eq!(score(&resp([1, 5, 1, 5, 1, 5, 1, 5, 1, 5])).value(), 0.0);
    }

    #[test]
    fn response_validation() {
        assert_eq!(SusResponse::new(&[3; 9]), Err(SusError::Length(9)));
        let mut items = [3i64; 10];
        items[6] = 6;
        assert_eq!(SusResponse::new(&items), Err(SusError::Range { item: 7, value: 6 }));
        items[6] = 0;
        assert!(SusResponse::new(&items).is_err());
    }

    #[test]
    fn score_newtype_checks_step() {
        assert!(SusScore::new(97.5).is_ok());
        assert!(SusScore::new(96.0).is_err());
        assert!(SusScore::new(102.5).is_err());
        assert!(SusScore::new(f64::NAN).is_err());
    }

    #[test]
    fn aggregate_examples() {
        let s = |v: &[f64]| aggregate(&v.iter().map(|x| SusScore::new(*x).unwrap()).collect::<Vec<_>>());
        let two = s(&[80.0, 80.0]).unwrap();
        assert_eq!((two.mean, two.sd_sample), (80.0, 0.0));
        let spread = s(&[0.0, 100.0]).unwrap();
        assert_eq!(spread.mean, 50.0);
        assert!((spread.sd_sample - 70.710678).abs() < 1e-6);
        assert_eq!(s(&[50.0]), Err(SusError::InsufficientData { needed: 2, got: 1 }));
    }

    #[test]
    fn table1_summary() {
        let scores: Vec<SusScore> = fixtures::table1().iter().map(|r| r.sus_score).collect();
        let s = aggregate(&scores).unwrap();
        assert_eq!(s.n, 12);
        assert!((s.mean - 87.29).abs() <= 0.05, "{}", s.mean);
        assert!((s.sd_sample - 15.09).abs() <= 0.05, "{}", s.sd_sample);
        assert_eq!((s.min, s.max), (45.0, 97.5));
    }

    #[test]
    fn pearson_examples() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&xs, &[2.0; 4]), Err(SusError::DegenerateInput));
        assert_eq!(pearson(&xs, &[1.0, 2.0]), Err(SusError::LengthMismatch(4, 2)));
        assert!(matches!(pearson(&[1.0, 2.0], &[1.0, 2.0]), Err(SusError::InsufficientData { .. })));
    }

    #[test]
    fn critical_values() {
        assert!((critical_r(12).unwrap() - 0.576).abs() <= 0.001);
        assert!((critical_r(3).unwrap() - 0.997).abs() <= 0.001);
        assert_eq!(critical_r(2), Err(SusError::UnsupportedN(2)));
        assert_eq!(critical_r(33), Err(SusError::UnsupportedN(33)));
        assert!(critical_r(32).is_ok());
        // perfect correlation always exceeds the threshold
        for n in 3..=32 {
            assert!(critical_r(n).unwrap() < 1.0);
        }
    }

    #[test]
    fn adjective_bands() {
        assert_eq!(adjective(SusScore::new(87.5).unwrap()), Some("excellent"));
        assert_eq!(adjective(SusScore::new(85.0).unwrap()), Some("good"));
        assert_eq!(adjective(SusScore::new(45.0).unwrap()), None);
    }
}
