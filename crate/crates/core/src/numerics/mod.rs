//! Log-domain complex scalars.
//!
//! Coefficients in this crate routinely span hundreds of orders of magnitude
//! (products of weights grow like `exp(c m^2)`), so every scalar is stored as
//! a log-magnitude and a phase. Both parts are double-double reals, which
//! lets products and quotients cancel to well below `f64` resolution; this
//! matters when a vector is pushed through `S` and then `T` and compared with
//! the original.

mod wide;

pub use wide::{Wide, PI as PI_WIDE, TWO_PI as TWO_PI_WIDE};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ShiftError};

fn snap_phase(phase: f64) -> Wide {
    use std::f64::consts::{FRAC_PI_2, PI};
    let half = wide::PI.div_f64(2.0);
    match phase {
        x if x == PI => wide::PI,
        x if x == -PI => -wide::PI,
        x if x == FRAC_PI_2 => half,
        x if x == -FRAC_PI_2 => -half,
        x => Wide::from_f64(x),
    }
}

/// Largest natural log that still converts to a finite `f64`.
pub const MAX_NATIVE_LOG: f64 = 709.782_712_893_384;

/// Complex scalar `exp(logmag + i phase)`.
///
/// Exact zero is the distinguished state `logmag = -inf, phase = 0`.
#[derive(Clone, Copy, PartialEq)]
pub struct LogComplex {
    logmag: Wide,
    phase: Wide,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        logmag: Wide::from_f64(f64::NEG_INFINITY),
        phase: Wide::ZERO,
    };

    pub const ONE: LogComplex = LogComplex {
        logmag: Wide::ZERO,
        phase: Wide::ZERO,
    };

    /// Build from a log-magnitude and a phase in radians (any range).
    ///
    /// Phases that are the `f64` roundings of `k pi / 2` are read as the exact
    /// angle, so `-1` and `i` built from floats cancel exactly.
    pub fn from_polar_log(logmag: f64, phase: f64) -> Self {
        Self::from_wide(Wide::from_f64(logmag), snap_phase(phase))
    }

    pub fn from_wide(logmag: Wide, phase: Wide) -> Self {
        debug_assert!(!logmag.hi().is_nan() && !phase.hi().is_nan());
        if logmag.hi() == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            logmag,
            phase: phase.wrap_angle(),
        }
    }

    /// Positive real number given by its natural log.
    pub fn from_log_real(logmag: f64) -> Self {
        Self::from_polar_log(logmag, 0.0)
    }

    pub fn from_cartesian(re: f64, im: f64) -> Self {
        if re == 0.0 && im == 0.0 {
            return Self::ZERO;
        }
        Self::from_polar_log(re.hypot(im).ln(), im.atan2(re))
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::from_cartesian(z.re, z.im)
    }

    pub fn to_cartesian(self) -> Result<(f64, f64)> {
        if self.is_zero() {
            return Ok((0.0, 0.0));
        }
        let l = self.logmag.to_f64();
        if l > MAX_NATIVE_LOG {
            return Err(ShiftError::OverflowNotRepresentable { logmag: l });
        }
        let r = l.exp();
        let p = self.phase.to_f64();
        Ok((r * p.cos(), r * p.sin()))
    }

    pub fn to_complex(self) -> Result<Complex64> {
        self.to_cartesian().map(|(re, im)| Complex64::new(re, im))
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn logmag(self) -> f64 {
        self.logmag.to_f64()
    }

    pub fn phase(self) -> f64 {
        self.phase.to_f64()
    }

    pub fn logmag_wide(self) -> Wide {
        self.logmag
    }

    pub fn phase_wide(self) -> Wide {
        self.phase
    }

    pub fn abs_log(self) -> f64 {
        self.logmag()
    }

    pub fn is_zero(self) -> bool {
        self.logmag.hi() == f64::NEG_INFINITY
    }

    pub fn conj(self) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::from_wide(self.logmag, -self.phase)
    }

    /// Multiply by the positive real `exp(log_factor)`.
    pub fn scale_log(self, log_factor: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        LogComplex {
            logmag: self.logmag.add_f64(log_factor),
            phase: self.phase,
        }
    }

    pub fn scale_log_wide(self, log_factor: Wide) -> Self {
        if self.is_zero() {
            return self;
        }
        LogComplex {
            logmag: self.logmag + log_factor,
            phase: self.phase,
        }
    }

    /// `self^k` for a non-negative integer power; `0^0 = 1`.
    pub fn powi(self, k: u64) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return self;
        }
        let kf = k as f64;
        Self::from_wide(self.logmag.mul_f64(kf), self.phase.mul_f64(kf))
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of exact zero");
        Self::from_wide(-self.logmag, -self.phase)
    }

    /// Sum of many terms: factor out the largest magnitude and add the
    /// rescaled residuals in native arithmetic.
    pub fn sum<I: IntoIterator<Item = LogComplex>>(terms: I) -> Self {
        let terms: Vec<LogComplex> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        match terms.len() {
            0 => return Self::ZERO,
            1 => return terms[0],
            2 => return terms[0] + terms[1],
            _ => {}
        }
        let pivot = terms
            .iter()
            .copied()
            .max_by(|a, b| a.logmag.partial_cmp(&b.logmag).unwrap())
            .unwrap();
        let (mut re, mut im) = (0.0, 0.0);
        for t in &terms {
            let r = (t.logmag - pivot.logmag).to_f64().exp();
            let d = (t.phase - pivot.phase).to_f64();
            re += r * d.cos();
            im += r * d.sin();
        }
        if re == 0.0 && im == 0.0 {
            return Self::ZERO;
        }
        Self::from_wide(
            pivot.logmag.add_f64(re.hypot(im).ln()),
            pivot.phase.add_f64(im.atan2(re)),
        )
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;

    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::from_wide(self.logmag + rhs.logmag, self.phase + rhs.phase)
    }
}

impl Add for LogComplex {
    type Output = LogComplex;

    fn add(self, rhs: LogComplex) -> LogComplex {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        let (big, small) = if self.logmag >= rhs.logmag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        // small / big = exp(dlog + i dphase) with dlog <= 0
        let dlog = (small.logmag - big.logmag).to_f64();
        let dphase = (small.phase - big.phase).wrap_angle();
        let cos_d = dphase.to_f64().cos();

        let (log_factor, arg_factor) = if cos_d < 0.0 && dlog > -1.0 {
            // Near-cancellation: 1 + exp(z + i pi) = -expm1(z) for small z.
            let shift = if dphase.signum_cmp() == std::cmp::Ordering::Less {
                dphase + wide::PI
            } else {
                dphase - wide::PI
            };
            let y = shift.to_f64();
            let em1 = dlog.exp_m1();
            let half = (0.5 * y).sin();
            let re = -(em1 * y.cos() - 2.0 * half * half);
            let im = -(dlog.exp() * y.sin());
            if re == 0.0 && im == 0.0 {
                return Self::ZERO;
            }
            (re.hypot(im).ln(), im.atan2(re))
        } else {
            let r = dlog.exp();
            let d = dphase.to_f64();
            let log_factor = 0.5 * (r * (2.0 * d.cos() + r)).ln_1p();
            (log_factor, (r * d.sin()).atan2(1.0 + r * d.cos()))
        };
        Self::from_wide(
            big.logmag.add_f64(log_factor),
            big.phase.add_f64(arg_factor),
        )
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;

    fn neg(self) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        Self::from_wide(self.logmag, self.phase + wide::PI)
    }
}

impl Sub for LogComplex {
    type Output = LogComplex;

    fn sub(self, rhs: LogComplex) -> LogComplex {
        self + (-rhs)
    }
}

impl Default for LogComplex {
    fn default() -> Self {
        Self::ZERO
    }
}

impl fmt::Debug for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogComplex(log {:.17e}, arg {:.17e})", self.logmag(), self.phase())
    }
}

/// Natural log of `exp(a) + exp(b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `0.5 * log(sum exp(2 l_i))`, the log of a Euclidean norm given log-moduli.
pub fn log_norm_from_logmags<I: IntoIterator<Item = f64>>(logmags: I) -> f64 {
    let v: Vec<f64> = logmags.into_iter().filter(|l| *l > f64::NEG_INFINITY).collect();
    let Some(top) = v.iter().copied().reduce(f64::max) else {
        return f64::NEG_INFINITY;
    };
    let s: f64 = v.iter().map(|l| (2.0 * (l - top)).exp()).sum();
    top + 0.5 * s.ln()
}

/// Serde adapter for log-values that may be infinite (`"-inf"`/`"inf"`).
pub mod serde_log {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "inf" => Ok(f64::INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad log value {other:?}"))),
            },
        }
    }

    /// Same encoding for a sequence of log-values.
    pub mod seq {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        struct Item(f64);

        impl serde::Serialize for Item {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::serialize(&self.0, s)
            }
        }

        impl<'de> Deserialize<'de> for Item {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                super::deserialize(d).map(Item)
            }
        }

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&Item(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<Item>::deserialize(d)?.into_iter().map(|i| i.0).collect())
        }
    }
}

impl Serialize for LogComplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct L(f64);
        impl Serialize for L {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serde_log::serialize(&self.0, s)
            }
        }
        let mut st = s.serialize_struct("LogComplex", 2)?;
        st.serialize_field("logmag", &L(self.logmag()))?;
        st.serialize_field("phase", &self.phase())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for LogComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            #[serde(with = "serde_log")]
            logmag: f64,
            phase: f64,
        }
        let r = Repr::deserialize(d)?;
        if r.logmag.is_nan() || r.logmag == f64::INFINITY || !r.phase.is_finite() {
            return Err(de::Error::custom("logmag must be finite or -inf and phase finite"));
        }
        Ok(LogComplex::from_polar_log(r.logmag, r.phase))
    }
}
