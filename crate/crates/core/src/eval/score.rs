use serde::{Deserialize, Serialize};

/// What one score card counts over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoreUnit {
    Sector,
    Portfolio,
    Table,
    Question,
}

/// One graded cell. `category` is the effect or question type, `item` the
/// scored field (`Value`, `Sector Weight`, a question id, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCell {
    pub fund: String,
    pub period: String,
    pub group: String,
    pub tier: String,
    pub category: String,
    pub item: String,
    pub correct: bool,
    pub note: Option<String>,
}

/// Correct count over possible count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub earned: usize,
    pub possible: usize,
}

impl Tally {
    /// `earned / possible`, 0 when nothing was possible.
    pub fn accuracy(&self) -> f64 {
        if self.possible == 0 {
            0.0
        } else {
            self.earned as f64 / self.possible as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub unit: ScoreUnit,
    pub cells: Vec<ScoreCell>,
    /// Problems that did not count against the score, e.g. predictions for
    /// unknown groups.
    pub flags: Vec<String>,
}

impl ScoreCard {
    pub fn new(unit: ScoreUnit) -> Self {
        Self {
            unit,
            cells: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn earned(&self) -> usize {
        self.cells.iter().filter(|c| c.correct).count()
    }

    pub fn possible(&self) -> usize {
        self.cells.len()
    }

    pub fn accuracy(&self) -> f64 {
        self.tally().accuracy()
    }

    pub fn tally(&self) -> Tally {
        self.tally_where(|_| true)
    }

    pub fn tally_where(&self, keep: impl Fn(&ScoreCell) -> bool) -> Tally {
        self.cells
            .iter()
            .filter(|c| keep(c))
            .fold(Tally::default(), |t, c| Tally {
                earned: t.earned + usize::from(c.correct),
                possible: t.possible + 1,
            })
    }

    /// Sets fund and period on every cell.
    pub fn labelled(mut self, fund: &str, period: &str) -> Self {
        for cell in &mut self.cells {
            cell.fund = fund.to_string();
            cell.period = period.to_string();
        }
        self
    }

    pub fn merge(&mut self, other: ScoreCard) {
        self.cells.extend(other.cells);
        self.flags.extend(other.flags);
    }

    /// Distinct values of `key` in first-appearance order.
    pub fn distinct(&self, key: impl Fn(&ScoreCell) -> &str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for cell in &self.cells {
            let k = key(cell);
            if !out.iter().any(|o| o == k) {
                out.push(k.to_string());
            }
        }
        out
    }
}
