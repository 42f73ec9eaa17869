use serde::{Deserialize, Serialize};

/// Value set of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    /// `{0, 1}`
    #[serde(rename = "b")]
    Boolean,
    /// `{-1, +1}`
    #[serde(rename = "z")]
    Spin,
    /// `{-1, 0, 1}`
    #[serde(rename = "t")]
    Ternary,
}

impl Domain {
    pub fn values(self) -> &'static [i8] {
        match self {
            Domain::Boolean => &[0, 1],
            Domain::Spin => &[-1, 1],
            Domain::Ternary => &[-1, 0, 1],
        }
    }

    pub fn size(self) -> usize {
        self.values().len()
    }

    pub fn contains(self, value: i64) -> bool {
        self.values().iter().any(|&v| i64::from(v) == value)
    }

    /// Letter used for variable names in the text format.
    pub fn letter(self) -> char {
        match self {
            Domain::Boolean => 'b',
            Domain::Spin => 'z',
            Domain::Ternary => 't',
        }
    }

    pub fn from_letter(c: char) -> Option<Domain> {
        match c {
            'b' => Some(Domain::Boolean),
            'z' => Some(Domain::Spin),
            't' => Some(Domain::Ternary),
            _ => None,
        }
    }

    /// Canonical exponent for `x^e`, `e >= 1`. Zero means the factor is the constant 1.
    pub(crate) fn reduce_exponent(self, e: u32) -> u32 {
        match self {
            Domain::Boolean => 1,
            Domain::Spin => e % 2,
            Domain::Ternary => {
                if e % 2 == 1 {
                    1
                } else {
                    2
                }
            }
        }
    }
}
