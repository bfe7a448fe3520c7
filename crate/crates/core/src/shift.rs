//! Weighted shifts on a single space.
//!
//! A backward shift acts by `e_m -> a(m) e_{m-1}` for `m > p` and kills
//! `e_p`. Its right inverse is the forward shift with reciprocal weights,
//! `e_m -> e_{m+1} / a(m+1)`, and its adjoint is the forward shift
//! `e_m -> a(m+1) e_{m+1}`. Every vector here has finite support, so it lies
//! in the domain of every power.

use serde::{Deserialize, Serialize};

use crate::basis::CoeffVector;
use crate::error::{Result, ShiftError};
use crate::numerics::{LogComplex, Wide};
use crate::weights::{WeightSequence, WeightSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Backward,
    RightInverse,
    AdjointForward,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Backward => "backward",
            Direction::RightInverse => "right_inverse",
            Direction::AdjointForward => "adjoint_forward",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOperator {
    weights: WeightSequence,
    offset_p: usize,
    direction: Direction,
}

/// One nonzero matrix element, stored as a log-weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub logweight: f64,
}

impl ShiftOperator {
    pub fn new(weights: WeightSequence, direction: Direction) -> Self {
        let offset_p = weights.offset_p();
        ShiftOperator {
            weights,
            offset_p,
            direction,
        }
    }

    pub fn backward(weights: WeightSequence) -> Self {
        Self::new(weights, Direction::Backward)
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.weights
    }

    pub fn offset_p(&self) -> usize {
        self.offset_p
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn with_direction(&self, direction: Direction) -> Self {
        Self::new(self.weights.clone(), direction)
    }

    /// Right inverse `S` built on the same weights.
    pub fn right_inverse(&self) -> Self {
        self.with_direction(Direction::RightInverse)
    }

    pub fn adjoint(&self) -> Result<Self> {
        match self.direction {
            Direction::Backward => Ok(self.with_direction(Direction::AdjointForward)),
            Direction::AdjointForward => Ok(self.with_direction(Direction::Backward)),
            Direction::RightInverse => Err(ShiftError::UnsupportedAdjoint("right-inverse")),
        }
    }

    /// `log a(m)` for `m > p`.
    pub fn log_action_weight(&self, m: usize) -> Result<f64> {
        self.weights.log_action_weight(m)
    }

    /// `sum_{j=lo..=hi} log a(j)`, accumulated in double-double.
    pub fn log_weight_product(&self, lo: usize, hi: usize) -> Result<Wide> {
        let mut acc = Wide::ZERO;
        for j in lo..=hi {
            acc = acc.add_f64(self.log_action_weight(j)?);
        }
        Ok(acc)
    }

    fn check(&self, v: &CoeffVector) -> Result<()> {
        if v.offset_p() != self.offset_p {
            return Err(ShiftError::OffsetMismatch {
                expected: self.offset_p,
                found: v.offset_p(),
            });
        }
        Ok(())
    }

    /// Image of one basis coefficient, `None` when it is annihilated.
    pub(crate) fn map_entry(&self, m: usize, c: LogComplex) -> Result<Option<(usize, LogComplex)>> {
        Ok(match self.direction {
            Direction::Backward => {
                if m == self.offset_p {
                    None
                } else {
                    Some((m - 1, c.scale_log(self.log_action_weight(m)?)))
                }
            }
            Direction::RightInverse => Some((m + 1, c.scale_log(-self.log_action_weight(m + 1)?))),
            Direction::AdjointForward => Some((m + 1, c.scale_log(self.log_action_weight(m + 1)?))),
        })
    }

    /// Image of one coefficient under the `k`-th power.
    pub(crate) fn map_entry_power(
        &self,
        m: usize,
        c: LogComplex,
        k: usize,
    ) -> Result<Option<(usize, LogComplex)>> {
        if k == 0 {
            return Ok(Some((m, c)));
        }
        Ok(match self.direction {
            Direction::Backward => {
                if k > m - self.offset_p {
                    None
                } else {
                    let w = self.log_weight_product(m - k + 1, m)?;
                    Some((m - k, c.scale_log_wide(w)))
                }
            }
            Direction::RightInverse => {
                let w = self.log_weight_product(m + 1, m + k)?;
                Some((m + k, c.scale_log_wide(-w)))
            }
            Direction::AdjointForward => {
                let w = self.log_weight_product(m + 1, m + k)?;
                Some((m + k, c.scale_log_wide(w)))
            }
        })
    }

    pub fn apply(&self, v: &CoeffVector) -> Result<CoeffVector> {
        self.check(v)?;
        let mut out = CoeffVector::zero(self.offset_p);
        for (m, c) in v.iter() {
            if let Some((n, x)) = self.map_entry(m, c)? {
                out.insert_unchecked(n, x);
            }
        }
        Ok(out)
    }

    /// `k`-fold application. Each coefficient picks up the product of the
    /// weights it crosses, so the result is exact zero below the offset.
    pub fn apply_power(&self, v: &CoeffVector, k: usize) -> Result<CoeffVector> {
        self.check(v)?;
        let mut out = CoeffVector::zero(self.offset_p);
        for (m, c) in v.iter() {
            if let Some((n, x)) = self.map_entry_power(m, c, k)? {
                out.insert_unchecked(n, x);
            }
        }
        Ok(out)
    }

    /// Sparse matrix of the operator restricted to indices `p..=n_max`,
    /// as `(row, col, log a)` with `row` the output index.
    pub fn matrix(&self, n_max: usize) -> Result<Vec<Triplet>> {
        let p = self.offset_p;
        if n_max <= p {
            return Err(ShiftError::InvalidParameter(format!(
                "matrix size {n_max} must exceed the offset {p}"
            )));
        }
        let mut out = Vec::with_capacity(n_max - p);
        match self.direction {
            Direction::Backward => {
                for m in p + 1..=n_max {
                    out.push(Triplet {
                        row: m - 1,
                        col: m,
                        logweight: self.log_action_weight(m)?,
                    });
                }
            }
            Direction::RightInverse | Direction::AdjointForward => {
                let sign = if self.direction == Direction::RightInverse { -1.0 } else { 1.0 };
                for m in p..n_max {
                    out.push(Triplet {
                        row: m + 1,
                        col: m,
                        logweight: sign * self.log_action_weight(m + 1)?,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// `log |<T u, v> - <u, T* v>|`; `-inf` when the two pairings agree exactly.
pub fn adjoint_pairing_check(op: &ShiftOperator, u: &CoeffVector, v: &CoeffVector) -> Result<f64> {
    let lhs = op.apply(u)?.inner(v)?;
    let rhs = u.inner(&op.adjoint()?.apply(v)?)?;
    Ok((lhs - rhs).logmag())
}

/// JSON operator description: a weight spec plus an optional direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    #[serde(flatten)]
    pub weights: WeightSpec,
    #[serde(default = "default_direction")]
    pub direction: Direction,
}

fn default_direction() -> Direction {
    Direction::Backward
}

impl OperatorSpec {
    pub fn build(&self) -> Result<ShiftOperator> {
        Ok(ShiftOperator::new(self.weights.build()?, self.direction))
    }
}
