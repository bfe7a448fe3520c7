//! Tensor products `E_p ⊗ B_p` over the product basis `e_m ⊗ e_n`, and the
//! tensor operator `T1 ⊗ T2`, which acts diagonally on that basis.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::basis::CoeffVector;
use crate::error::{Result, ShiftError};
use crate::numerics::{log_norm_from_logmags, LogComplex};
use crate::shift::{Direction, ShiftOperator};

/// Finite-support coefficients over index pairs `(m, n)`, `m >= p1`, `n >= p2`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TensorVector {
    p1: usize,
    p2: usize,
    entries: BTreeMap<(usize, usize), LogComplex>,
}

impl TensorVector {
    pub fn zero(p1: usize, p2: usize) -> Self {
        TensorVector {
            p1,
            p2,
            entries: BTreeMap::new(),
        }
    }

    pub fn unit(p1: usize, p2: usize, m: usize, n: usize) -> Result<Self> {
        let mut w = Self::zero(p1, p2);
        w.set(m, n, LogComplex::ONE)?;
        Ok(w)
    }

    pub fn from_entries<I>(p1: usize, p2: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), LogComplex)>,
    {
        let mut w = Self::zero(p1, p2);
        for ((m, n), c) in entries {
            w.add_at(m, n, c)?;
        }
        Ok(w)
    }

    pub fn offsets(&self) -> (usize, usize) {
        (self.p1, self.p2)
    }

    pub fn get(&self, m: usize, n: usize) -> LogComplex {
        self.entries.get(&(m, n)).copied().unwrap_or(LogComplex::ZERO)
    }

    fn check_index(&self, m: usize, n: usize) -> Result<()> {
        if m < self.p1 {
            return Err(ShiftError::IndexBelowOffset { index: m, offset: self.p1 });
        }
        if n < self.p2 {
            return Err(ShiftError::IndexBelowOffset { index: n, offset: self.p2 });
        }
        Ok(())
    }

    pub fn set(&mut self, m: usize, n: usize, c: LogComplex) -> Result<()> {
        self.check_index(m, n)?;
        if c.is_zero() {
            self.entries.remove(&(m, n));
        } else {
            self.entries.insert((m, n), c);
        }
        Ok(())
    }

    pub fn add_at(&mut self, m: usize, n: usize, c: LogComplex) -> Result<()> {
        let cur = self.get(m, n);
        self.set(m, n, cur + c)
    }

    fn insert_unchecked(&mut self, m: usize, n: usize, c: LogComplex) {
        debug_assert!(m >= self.p1 && n >= self.p2);
        if !c.is_zero() {
            self.entries.insert((m, n), c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), LogComplex)> + '_ {
        self.entries.iter().map(|(&k, &c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, c: LogComplex) -> Self {
        let mut out = Self::zero(self.p1, self.p2);
        for ((m, n), x) in self.iter() {
            out.insert_unchecked(m, n, x * c);
        }
        out
    }

    fn ensure_offsets(&self, other: &TensorVector) -> Result<()> {
        if self.p1 != other.p1 {
            return Err(ShiftError::OffsetMismatch { expected: self.p1, found: other.p1 });
        }
        if self.p2 != other.p2 {
            return Err(ShiftError::OffsetMismatch { expected: self.p2, found: other.p2 });
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorVector) -> Result<Self> {
        self.ensure_offsets(other)?;
        let mut out = self.clone();
        for ((m, n), c) in other.iter() {
            out.add_at(m, n, c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorVector) -> Result<Self> {
        self.ensure_offsets(other)?;
        let mut out = self.clone();
        for ((m, n), c) in other.iter() {
            out.add_at(m, n, -c)?;
        }
        Ok(out)
    }

    /// `sum_{(m,n)} w1(m,n) conj(w2(m,n))`.
    pub fn inner(&self, other: &TensorVector) -> Result<LogComplex> {
        self.ensure_offsets(other)?;
        let terms = self
            .iter()
            .filter_map(|(k, a)| other.entries.get(&k).map(|b| a * b.conj()));
        Ok(LogComplex::sum(terms))
    }

    pub fn log_norm(&self) -> f64 {
        log_norm_from_logmags(self.entries.values().map(|c| c.logmag()))
    }
}

/// Outer product `u ⊗ v`: entries `(m, n) -> u_m v_n`.
pub fn tensor_of(u: &CoeffVector, v: &CoeffVector) -> TensorVector {
    let mut out = TensorVector::zero(u.offset_p(), v.offset_p());
    for (m, a) in u.iter() {
        for (n, b) in v.iter() {
            out.insert_unchecked(m, n, a * b);
        }
    }
    out
}

pub fn tensor_inner(w1: &TensorVector, w2: &TensorVector) -> Result<LogComplex> {
    w1.inner(w2)
}

/// `T1 ⊗ T2` with both factors acting in the same direction.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    left: ShiftOperator,
    right: ShiftOperator,
}

impl TensorOperator {
    pub fn new(left: ShiftOperator, right: ShiftOperator) -> Result<Self> {
        if left.direction() != right.direction() {
            return Err(ShiftError::DirectionMismatch);
        }
        Ok(TensorOperator { left, right })
    }

    pub fn left(&self) -> &ShiftOperator {
        &self.left
    }

    pub fn right(&self) -> &ShiftOperator {
        &self.right
    }

    pub fn offsets(&self) -> (usize, usize) {
        (self.left.offset_p(), self.right.offset_p())
    }

    pub fn direction(&self) -> Direction {
        self.left.direction()
    }

    pub fn with_direction(&self, direction: Direction) -> Self {
        TensorOperator {
            left: self.left.with_direction(direction),
            right: self.right.with_direction(direction),
        }
    }

    /// `S1 ⊗ S2`.
    pub fn right_inverse(&self) -> Self {
        self.with_direction(Direction::RightInverse)
    }

    /// `T1* ⊗ T2*`.
    pub fn adjoint(&self) -> Result<Self> {
        Ok(TensorOperator {
            left: self.left.adjoint()?,
            right: self.right.adjoint()?,
        })
    }

    fn check(&self, w: &TensorVector) -> Result<()> {
        let (p1, p2) = self.offsets();
        if w.p1 != p1 {
            return Err(ShiftError::OffsetMismatch { expected: p1, found: w.p1 });
        }
        if w.p2 != p2 {
            return Err(ShiftError::OffsetMismatch { expected: p2, found: w.p2 });
        }
        Ok(())
    }

    pub fn apply(&self, w: &TensorVector) -> Result<TensorVector> {
        self.apply_power(w, 1)
    }

    /// `(T1 ⊗ T2)^k = T1^k ⊗ T2^k` on each basis pair.
    pub fn apply_power(&self, w: &TensorVector, k: usize) -> Result<TensorVector> {
        self.check(w)?;
        let (p1, p2) = self.offsets();
        let mut out = TensorVector::zero(p1, p2);
        for ((m, n), c) in w.iter() {
            let Some((m2, a)) = self.left.map_entry_power(m, LogComplex::ONE, k)? else {
                continue;
            };
            let Some((n2, b)) = self.right.map_entry_power(n, c, k)? else {
                continue;
            };
            out.insert_unchecked(m2, n2, a * b);
        }
        Ok(out)
    }
}

pub fn tensor_apply(op: &TensorOperator, w: &TensorVector) -> Result<TensorVector> {
    op.apply(w)
}

pub fn tensor_power_apply(op: &TensorOperator, w: &TensorVector, k: usize) -> Result<TensorVector> {
    op.apply_power(w, k)
}

/// `S^k w` for a right-inverse tensor operator.
pub fn tensor_right_inverse_apply(s: &TensorOperator, w: &TensorVector, k: usize) -> Result<TensorVector> {
    if s.direction() != Direction::RightInverse {
        return Err(ShiftError::InvalidParameter(
            "tensor_right_inverse_apply needs right-inverse factors".into(),
        ));
    }
    s.apply_power(w, k)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorVectorRepr {
    p1: usize,
    p2: usize,
    entries: Vec<(usize, usize, f64, f64)>,
}

impl Serialize for TensorVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TensorVectorRepr {
            p1: self.p1,
            p2: self.p2,
            entries: self
                .iter()
                .map(|((m, n), c)| (m, n, c.logmag(), c.phase()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TensorVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = TensorVectorRepr::deserialize(d)?;
        let mut w = TensorVector::zero(repr.p1, repr.p2);
        for (m, n, l, ph) in repr.entries {
            if !l.is_finite() || !ph.is_finite() {
                return Err(serde::de::Error::custom(format!(
                    "entry ({m}, {n}): logmag and phase must be finite"
                )));
            }
            w.add_at(m, n, LogComplex::from_polar_log(l, ph))
                .map_err(serde::de::Error::custom)?;
        }
        Ok(w)
    }
}
