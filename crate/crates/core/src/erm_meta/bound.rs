use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size of a finite algorithm family, either as a count or as the number of
/// bits needed to describe a member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FamilySize {
    Count(usize),
    Bits(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// Number of training problems.
    pub n: usize,
    pub family: FamilySize,
    /// Failure probability in (0, 1).
    pub delta: f64,
}

/// Excess-loss bound for ERM over a finite family, natural logarithms:
/// `sqrt(2/n * ln(|C|/delta))`, or `sqrt(2 (b ln 2 + ln(1/delta)) / n)` for `b` bits.
pub fn generalization_bound(p: &BoundParams) -> Result<f64> {
    if p.n == 0 {
        return Err(Error::InvalidArgument("bound needs at least one training problem".into()));
    }
    if !(p.delta > 0.0 && p.delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0,1), got {}", p.delta)));
    }
    let n = p.n as f64;
    let log_term = match p.family {
        FamilySize::Count(0) => return Err(Error::InvalidArgument("family must be non-empty".into())),
        FamilySize::Count(c) => (c as f64 / p.delta).ln(),
        FamilySize::Bits(b) => b as f64 * std::f64::consts::LN_2 + (1.0 / p.delta).ln(),
    };
    Ok((2.0 / n * log_term).sqrt())
}
