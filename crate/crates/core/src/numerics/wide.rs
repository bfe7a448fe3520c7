//! Double-double reals used for log-magnitudes and phases.
//!
//! A `Wide` value is an unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
//! Only the handful of operations the log domain needs are provided: sums,
//! scaling by an `f64`, and comparisons. Values must be finite.

use std::cmp::Ordering;
use std::ops::{Add, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Wide {
    hi: f64,
    lo: f64,
}

pub const PI: Wide = Wide {
    hi: std::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};

pub const TWO_PI: Wide = Wide {
    hi: std::f64::consts::TAU,
    lo: 2.449_293_598_294_706_4e-16,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Wide {
    pub const ZERO: Wide = Wide { hi: 0.0, lo: 0.0 };

    pub const fn from_f64(x: f64) -> Self {
        Wide { hi: x, lo: 0.0 }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Wide { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Wide { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let p = Wide::from_f64(q1).mul_f64(b);
        let r = self - p;
        let q2 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Wide { hi, lo }
    }

    pub fn signum_cmp(self) -> Ordering {
        if self.hi > 0.0 || (self.hi == 0.0 && self.lo > 0.0) {
            Ordering::Greater
        } else if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    /// Reduce an angle into `(-pi, pi]`.
    pub fn wrap_angle(self) -> Self {
        let mut x = self;
        if !(x.hi.abs() <= std::f64::consts::PI) {
            let k = (x.hi / std::f64::consts::TAU).round();
            x = x - TWO_PI.mul_f64(k);
        }
        if (x - PI).signum_cmp() == Ordering::Greater {
            x = x - TWO_PI;
        }
        if (x + PI).signum_cmp() != Ordering::Greater {
            x = x + TWO_PI;
        }
        x
    }
}

impl Add for Wide {
    type Output = Wide;

    fn add(self, o: Wide) -> Wide {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Wide { hi, lo }
    }
}

impl Sub for Wide {
    type Output = Wide;

    fn sub(self, o: Wide) -> Wide {
        self + (-o)
    }
}

impl Neg for Wide {
    type Output = Wide;

    fn neg(self) -> Wide {
        Wide {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl From<f64> for Wide {
    fn from(x: f64) -> Self {
        Wide::from_f64(x)
    }
}
