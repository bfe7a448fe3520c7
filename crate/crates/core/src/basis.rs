//! Orthonormal bases of the theta Fock-Bargmann and Bargmann spaces, and
//! finite-support coefficient vectors over them.
//!
//! Inner products are taken in coefficient space, which is exact for
//! orthonormal coordinates.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, ShiftError};
use crate::numerics::{log_norm_from_logmags, LogComplex};
use crate::weights::ThetaParams;

/// `e_n(z) = z^n / sqrt(n!)`.
pub fn bargmann_basis_eval(n: usize, z: Complex64) -> LogComplex {
    if n == 0 {
        return LogComplex::ONE;
    }
    if z.re == 0.0 && z.im == 0.0 {
        return LogComplex::ZERO;
    }
    let nf = n as f64;
    let logmag = nf * z.norm().ln() - 0.5 * libm::lgamma(nf + 1.0);
    LogComplex::from_polar_log(logmag, nf * z.arg())
}

/// `e_m^alpha(z) = (2nu/pi)^{1/4} exp(nu z^2 / 2 - (pi^2/nu)(m+alpha)^2 + 2 i pi (m+alpha) z)`.
pub fn theta_basis_eval(m: usize, z: Complex64, params: &ThetaParams) -> LogComplex {
    let nu = params.nu;
    let k = m as f64 + params.alpha;
    let (x, y) = (z.re, z.im);
    let re = 0.25 * (2.0 * nu / PI).ln() + 0.5 * nu * (x * x - y * y)
        - (PI * PI / nu) * k * k
        - 2.0 * PI * k * y;
    let im = nu * x * y + 2.0 * PI * k * x;
    LogComplex::from_polar_log(re, im)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Basis {
    Bargmann { p: usize },
    Theta(ThetaParams),
}

impl Basis {
    pub fn offset_p(&self) -> usize {
        match self {
            Basis::Bargmann { p } => *p,
            Basis::Theta(params) => params.p,
        }
    }

    pub fn eval(&self, m: usize, z: Complex64) -> LogComplex {
        match self {
            Basis::Bargmann { .. } => bargmann_basis_eval(m, z),
            Basis::Theta(params) => theta_basis_eval(m, z, params),
        }
    }
}

/// Finite-support coordinates over basis indices `m >= offset_p`.
///
/// Exact zeros are never stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CoeffVector {
    offset_p: usize,
    entries: BTreeMap<usize, LogComplex>,
}

impl CoeffVector {
    pub fn zero(offset_p: usize) -> Self {
        CoeffVector {
            offset_p,
            entries: BTreeMap::new(),
        }
    }

    /// Basis vector `e_m`.
    pub fn unit(offset_p: usize, m: usize) -> Result<Self> {
        let mut v = Self::zero(offset_p);
        v.set(m, LogComplex::ONE)?;
        Ok(v)
    }

    pub fn from_entries<I>(offset_p: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, LogComplex)>,
    {
        let mut v = Self::zero(offset_p);
        for (m, c) in entries {
            v.add_at(m, c)?;
        }
        Ok(v)
    }

    pub fn offset_p(&self) -> usize {
        self.offset_p
    }

    pub fn get(&self, m: usize) -> LogComplex {
        self.entries.get(&m).copied().unwrap_or(LogComplex::ZERO)
    }

    /// Overwrite the coefficient at `m`; a zero removes it.
    pub fn set(&mut self, m: usize, c: LogComplex) -> Result<()> {
        self.check_index(m)?;
        if c.is_zero() {
            self.entries.remove(&m);
        } else {
            self.entries.insert(m, c);
        }
        Ok(())
    }

    /// Accumulate `c` into the coefficient at `m`.
    pub fn add_at(&mut self, m: usize, c: LogComplex) -> Result<()> {
        let cur = self.get(m);
        self.set(m, cur + c)
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m < self.offset_p {
            return Err(ShiftError::IndexBelowOffset {
                index: m,
                offset: self.offset_p,
            });
        }
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, m: usize, c: LogComplex) {
        debug_assert!(m >= self.offset_p);
        if !c.is_zero() {
            self.entries.insert(m, c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, LogComplex)> + '_ {
        self.entries.iter().map(|(&m, &c)| (m, c))
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

    pub fn min_index(&self) -> Option<usize> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn scale(&self, c: LogComplex) -> Self {
        let mut out = Self::zero(self.offset_p);
        for (m, x) in self.iter() {
            out.insert_unchecked(m, x * c);
        }
        out
    }

    fn ensure_offset(&self, other: &CoeffVector) -> Result<()> {
        if self.offset_p != other.offset_p {
            return Err(ShiftError::OffsetMismatch {
                expected: self.offset_p,
                found: other.offset_p,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &CoeffVector) -> Result<Self> {
        self.ensure_offset(other)?;
        let mut out = self.clone();
        for (m, c) in other.iter() {
            out.add_at(m, c)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CoeffVector) -> Result<Self> {
        self.ensure_offset(other)?;
        let mut out = self.clone();
        for (m, c) in other.iter() {
            out.add_at(m, -c)?;
        }
        Ok(out)
    }

    /// `<u, v> = sum_m u_m conj(v_m)`.
    pub fn inner(&self, other: &CoeffVector) -> Result<LogComplex> {
        self.ensure_offset(other)?;
        let (small, large, swap) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let terms = small.iter().filter_map(|(m, a)| {
            let b = large.entries.get(&m)?;
            Some(if swap { *b * a.conj() } else { a * b.conj() })
        });
        Ok(LogComplex::sum(terms))
    }

    /// `log ||u||`; `-inf` for the zero vector.
    pub fn log_norm(&self) -> f64 {
        log_norm_from_logmags(self.entries.values().map(|c| c.logmag()))
    }

    /// Pointwise value `sum_m c_m e_m(z)`.
    pub fn synth(&self, z: Complex64, basis: &Basis) -> LogComplex {
        LogComplex::sum(self.iter().map(|(m, c)| c * basis.eval(m, z)))
    }
}

/// `u · conj(v)` summed over shared support.
pub fn coeff_inner(u: &CoeffVector, v: &CoeffVector) -> Result<LogComplex> {
    u.inner(v)
}

pub fn coeff_norm(u: &CoeffVector) -> f64 {
    u.log_norm()
}

pub fn synth(v: &CoeffVector, z: Complex64, basis: &Basis) -> LogComplex {
    v.synth(z, basis)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffVectorRepr {
    p: usize,
    entries: Vec<(usize, f64, f64)>,
}

impl Serialize for CoeffVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffVectorRepr {
            p: self.offset_p,
            entries: self.iter().map(|(m, c)| (m, c.logmag(), c.phase())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoeffVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CoeffVectorRepr::deserialize(d)?;
        let mut v = CoeffVector::zero(repr.p);
        for (m, l, ph) in repr.entries {
            if !l.is_finite() || !ph.is_finite() {
                return Err(serde::de::Error::custom(format!(
                    "entry {m}: logmag and phase must be finite"
                )));
            }
            v.add_at(m, LogComplex::from_polar_log(l, ph))
                .map_err(serde::de::Error::custom)?;
        }
        Ok(v)
    }
}
