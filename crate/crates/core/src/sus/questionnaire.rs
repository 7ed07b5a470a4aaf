use serde::Serialize;

pub const ITEM_COUNT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Wording {
    /// Brooke's original items.
    Standard,
    /// Item 7 refers to visually impaired people; item 8 says "awkward"
    /// instead of "cumbersome".
    VisuallyImpaired,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuestionnaireItem {
    /// 1-based position; odd items are positively worded.
    pub number: usize,
    pub standard: &'static str,
    pub modified: Option<&'static str>,
}

impl QuestionnaireItem {
    pub fn text(&self, wording: Wording) -> &'static str {
        match wording {
            Wording::Standard => self.standard,
            Wording::VisuallyImpaired => self.modified.unwrap_or(self.standard),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.number % 2 == 1
    }
}

const ITEMS: [QuestionnaireItem; ITEM_COUNT] = [
    QuestionnaireItem {
        number: 1,
        standard: "I think that I would like to use this system frequently.",
        modified: None,
    },
    QuestionnaireItem { number: 2, standard: "I found the system unnecessarily complex.", modified: None },
    QuestionnaireItem { number: 3, standard: "I thought the system was easy to use.", modified: None },
    QuestionnaireItem {
        number: 4,
        standard: "I think that I would need the support of a technical person to be able to use this system.",
        modified: None,
    },
    QuestionnaireItem {
        number: 5,
        standard: "I found the various functions in this system were well integrated.",
        modified: None,
    },
    QuestionnaireItem {
        number: 6,
        standard: "I thought there was too much inconsistency in this system.",
        modified: None,
    },
    QuestionnaireItem {
        number: 7,
        standard: "I would imagine that most people would learn to use this system very quickly.",
        modified: Some("I think that most visually impaired people would learn to use this product very quickly."),
    },
    QuestionnaireItem {
        number: 8,
        standard: "I found the system very cumbersome to use.",
        modified: Some("I found the system very awkward to use."),
    },
    QuestionnaireItem { number: 9, standard: "I felt very confident using the system.", modified: None },
    QuestionnaireItem {
        number: 10,
        standard: "I needed to learn a lot of things before I could get going with this system.",
        modified: None,
    },
];

/// The ten SUS items. Scoring reads positions only, so either wording yields
/// the same score for the same answers.
#[derive(Debug, Clone, Copy)]
pub struct Questionnaire {
    pub wording: Wording,
}

impl Questionnaire {
    pub fn new(wording: Wording) -> Self {
        Self { wording }
    }

    pub fn items(&self) -> &'static [QuestionnaireItem; ITEM_COUNT] {
        &ITEMS
    }

    pub fn texts(&self) -> impl Iterator<Item = &'static str> + '_ {
        ITEMS.iter().map(|i| i.text(self.wording))
    }
}
