use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard limits on the work a single call may do. Exceeding one is an error,
/// never a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum number of atoms held in one level of the mass recursion.
    pub max_atoms: u128,
    /// Maximum number of words visited by an exhaustive enumeration.
    pub max_words: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_atoms: 1 << 28,
            max_words: 1 << 28,
        }
    }
}

impl Budget {
    pub fn check_atoms(&self, needed: u128) -> Result<()> {
        if needed > self.max_atoms {
            Err(Error::Overflow {
                needed,
                budget: self.max_atoms,
            })
        } else {
            Ok(())
        }
    }

    pub fn check_words(&self, needed: u128) -> Result<()> {
        if needed > self.max_words {
            Err(Error::Budget {
                needed,
                budget: self.max_words,
            })
        } else {
            Ok(())
        }
    }
}
