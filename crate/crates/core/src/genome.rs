//! Architecture encoding: `<look_back, width_1, ..., width_H>`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ResnError, Result};

/// Variable-length integer encoding of a stacked-LSTM architecture.
///
/// Entry 0 is the look-back (time steps per window); entries `1..=H` are the
/// number of LSTM cells in each hidden layer, input side first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct ArchGenome(Vec<usize>);

impl ArchGenome {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(ResnError::InvalidGenome(format!(
                "need a look-back and at least one hidden layer, got {} entries",
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|&e| e == 0) {
            return Err(ResnError::InvalidGenome(format!("entry {pos} is zero")));
        }
        Ok(Self(entries))
    }

    pub fn look_back(&self) -> usize {
        self.0[0]
    }

    pub fn hidden(&self) -> &[usize] {
        &self.0[1..]
    }

    pub fn hidden_layers(&self) -> usize {
        self.0.len() - 1
    }

    /// Total LSTM cells across all hidden layers.
    pub fn total_cells(&self) -> usize {
        self.hidden().iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub(crate) fn entries_mut(&mut self) -> &mut Vec<usize> {
        &mut self.0
    }
}

impl TryFrom<Vec<usize>> for ArchGenome {
    type Error = ResnError;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ArchGenome> for Vec<usize> {
    fn from(g: ArchGenome) -> Self {
        g.0
    }
}

impl std::str::FromStr for ArchGenome {
    type Err = ResnError;

    /// Parses `"10,8"` or `"<10, 8>"`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('<').trim_end_matches('>');
        let entries = trimmed
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| ResnError::InvalidGenome(format!("`{}`: {e}", p.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

impl fmt::Display for ArchGenome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ">")
    }
}

/// Search-space limits on look-back, cells per layer and layer count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenomeBounds {
    pub min_lb: usize,
    pub max_lb: usize,
    pub min_npl: usize,
    pub max_npl: usize,
    pub min_hl: usize,
    pub max_hl: usize,
}

impl GenomeBounds {
    pub fn validate(&self) -> Result<()> {
        let pairs = [
            ("lb", self.min_lb, self.max_lb),
            ("npl", self.min_npl, self.max_npl),
            ("hl", self.min_hl, self.max_hl),
        ];
        for (name, lo, hi) in pairs {
            if lo == 0 {
                return Err(ResnError::Config(format!("min_{name} must be positive")));
            }
            if lo > hi {
                return Err(ResnError::Config(format!(
                    "min_{name} ({lo}) exceeds max_{name} ({hi})"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, genome: &ArchGenome) -> bool {
        let lb = genome.look_back();
        let hl = genome.hidden_layers();
        (self.min_lb..=self.max_lb).contains(&lb)
            && (self.min_hl..=self.max_hl).contains(&hl)
            && genome
                .hidden()
                .iter()
                .all(|w| (self.min_npl..=self.max_npl).contains(w))
    }

    /// Clamp range for genome position `j` (0 is the look-back).
    pub fn position_range(&self, j: usize) -> (usize, usize) {
        if j == 0 {
            (self.min_lb, self.max_lb)
        } else {
            (self.min_npl, self.max_npl)
        }
    }
}
