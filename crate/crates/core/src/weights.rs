//! Weight sequences for the theta Fock-Bargmann and Bargmann shifts.
//!
//! All weights are strictly positive and handled as natural logs. Two indexing
//! notions coexist:
//!
//! * the *native* value `w(m)` of a family (`gamma_m`, `omega_n = sqrt(n+1)`,
//!   a composite action weight, a block-pattern entry or a table entry);
//! * the *action* weight `a(m)`, the coefficient picked up by `e_m -> e_{m-1}`
//!   when the sequence drives a backward shift.
//!
//! For composite, block and table families the two coincide. The raw theta
//! and Bargmann families describe the single-step operators `M` and `d/dz`,
//! whose actions are `M e_m = gamma_{m-1} e_{m-1}` and
//! `d/dz e_n = omega_{n-1} e_{n-1}`, so there `a(m) = w(m - 1)`.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShiftError};

/// Parameters of the theta Fock-Bargmann space and its shift order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaParams {
    pub nu: f64,
    pub alpha: f64,
    pub p: usize,
}

impl ThetaParams {
    pub fn new(nu: f64, alpha: f64, p: usize) -> Result<Self> {
        let params = ThetaParams { nu, alpha, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(ShiftError::InvalidParameter(format!(
                "nu must be a finite positive real (nu > 0), got {}",
                self.nu
            )));
        }
        if !self.alpha.is_finite() {
            return Err(ShiftError::InvalidParameter(format!(
                "alpha must be finite, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// `log c_alpha = pi / nu + 2 alpha`.
    pub fn log_c_alpha(&self) -> f64 {
        PI / self.nu + 2.0 * self.alpha
    }

    /// Growth rate `2 pi / nu` of `log gamma_m`.
    pub fn log_step(&self) -> f64 {
        2.0 * PI / self.nu
    }
}

/// `log gamma_m = (pi/nu + 2 alpha) + (2 pi / nu) m`.
pub fn theta_raw(m: usize, params: &ThetaParams) -> f64 {
    params.log_c_alpha() + params.log_step() * m as f64
}

/// Log of the coefficient of `e_{m-1}` in `M*^p M^{p+1} e_m`:
/// `gamma_{m-1} * prod_{j=1..p} gamma_{m-1-j}^2`.
pub fn theta_action_weight(m: usize, params: &ThetaParams) -> Result<f64> {
    let p = params.p;
    if m <= p {
        return Err(ShiftError::IndexBelowOffset { index: m, offset: p });
    }
    let tail: f64 = (1..=p).map(|j| theta_raw(m - 1 - j, params)).sum();
    Ok(theta_raw(m - 1, params) + 2.0 * tail)
}

/// `log omega_n = 0.5 log(n + 1)`.
pub fn bargmann_raw(n: usize) -> f64 {
    0.5 * ((n + 1) as f64).ln()
}

/// Log of the coefficient of `e_{n-1}` in `z^p d^{p+1}/dz^{p+1} e_n`:
/// `sqrt(n) (n-1)! / (n-1-p)!`, evaluated through log-gamma.
pub fn bargmann_action_weight(n: usize, p: usize) -> Result<f64> {
    if n <= p {
        return Err(ShiftError::IndexBelowOffset { index: n, offset: p });
    }
    let nf = n as f64;
    let falling = if p == 0 {
        0.0
    } else {
        libm::lgamma(nf) - libm::lgamma((n - p) as f64)
    };
    Ok(0.5 * nf.ln() + falling)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockRole {
    Omega,
    Varpi,
}

/// Run number `r >= 3` containing index `i > 5`.
fn block_run(i: u64) -> u64 {
    let end = |r: u64| r * (r + 1) * (2 * r + 1) / 6;
    let mut r = ((3.0 * i as f64).cbrt() as u64).max(3);
    while r > 3 && end(r - 1) >= i {
        r -= 1;
    }
    while end(r) < i {
        r += 1;
    }
    r
}

/// Block-pattern weights with values in `{2, 1/2}`.
///
/// Alternating runs of twos and halves. The first three runs have lengths
/// 1, 2, 2, so the sequence opens `(2, 1/2, 1/2, 2, 2)`; run `r >= 3` has
/// length `r^2`. Runs end at `E_r = r (r + 1) (2r + 1) / 6` for `r >= 2`,
/// and even runs are twos. `Varpi` is the entrywise reciprocal, so both
/// sequences have unbounded partial products.
pub fn block_pattern_weight(i: usize, role: BlockRole) -> Result<f64> {
    if i == 0 {
        return Err(ShiftError::IndexBelowOffset { index: 0, offset: 0 });
    }
    let up = match i {
        1 | 4 | 5 => true,
        2 | 3 => false,
        _ => block_run(i as u64) % 2 == 0,
    };
    let up = match role {
        BlockRole::Omega => up,
        BlockRole::Varpi => !up,
    };
    Ok(if up { LN_2 } else { -LN_2 })
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightFamily {
    ThetaRaw(ThetaParams),
    ThetaComposite(ThetaParams),
    BargmannRaw,
    BargmannComposite,
    BlockPattern(BlockRole),
    /// Log-weights; entry `k` is the weight at index `offset_p + 1 + k`.
    Table(Vec<f64>),
}

/// A strictly positive weight generator together with its base offset `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    family: WeightFamily,
    offset_p: usize,
}

impl WeightSequence {
    pub fn theta_raw(params: ThetaParams) -> Result<Self> {
        params.validate()?;
        Ok(WeightSequence {
            family: WeightFamily::ThetaRaw(params),
            offset_p: params.p,
        })
    }

    pub fn theta_composite(params: ThetaParams) -> Result<Self> {
        params.validate()?;
        Ok(WeightSequence {
            family: WeightFamily::ThetaComposite(params),
            offset_p: params.p,
        })
    }

    pub fn bargmann_raw(p: usize) -> Self {
        WeightSequence {
            family: WeightFamily::BargmannRaw,
            offset_p: p,
        }
    }

    pub fn bargmann_composite(p: usize) -> Self {
        WeightSequence {
            family: WeightFamily::BargmannComposite,
            offset_p: p,
        }
    }

    pub fn block_pattern(role: BlockRole) -> Self {
        WeightSequence {
            family: WeightFamily::BlockPattern(role),
            offset_p: 0,
        }
    }

    /// Table of positive weights; entry `k` belongs to index `offset_p + 1 + k`.
    pub fn table(weights: &[f64], offset_p: usize) -> Result<Self> {
        let mut logs = Vec::with_capacity(weights.len());
        for (k, &w) in weights.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(ShiftError::InvalidParameter(format!(
                    "table weight #{k} must be a finite positive real, got {w}"
                )));
            }
            logs.push(w.ln());
        }
        Ok(Self::log_table(logs, offset_p))
    }

    pub fn log_table(log_weights: Vec<f64>, offset_p: usize) -> Self {
        WeightSequence {
            family: WeightFamily::Table(log_weights),
            offset_p,
        }
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn offset_p(&self) -> usize {
        self.offset_p
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            WeightFamily::ThetaRaw(_) => "theta_raw",
            WeightFamily::ThetaComposite(_) => "theta_composite",
            WeightFamily::BargmannRaw => "bargmann_raw",
            WeightFamily::BargmannComposite => "bargmann_composite",
            WeightFamily::BlockPattern(_) => "block_pattern",
            WeightFamily::Table(_) => "table",
        }
    }

    /// First index at which the native value is defined.
    pub fn domain_start(&self) -> usize {
        match self.family {
            WeightFamily::ThetaRaw(_) | WeightFamily::BargmannRaw => 0,
            WeightFamily::ThetaComposite(_)
            | WeightFamily::BargmannComposite
            | WeightFamily::Table(_) => self.offset_p + 1,
            WeightFamily::BlockPattern(_) => 1,
        }
    }

    /// Last index at which the native value is defined, if finite.
    pub fn domain_end(&self) -> Option<usize> {
        match &self.family {
            WeightFamily::Table(t) => Some(self.offset_p + t.len()),
            _ => None,
        }
    }

    /// Native log-weight `log w(m)`.
    pub fn log_weight(&self, m: usize) -> Result<f64> {
        if m < self.domain_start() {
            return Err(ShiftError::IndexBelowOffset {
                index: m,
                offset: self.domain_start().saturating_sub(1),
            });
        }
        match &self.family {
            WeightFamily::ThetaRaw(params) => Ok(theta_raw(m, params)),
            WeightFamily::ThetaComposite(params) => theta_action_weight(m, params),
            WeightFamily::BargmannRaw => Ok(bargmann_raw(m)),
            WeightFamily::BargmannComposite => bargmann_action_weight(m, self.offset_p),
            WeightFamily::BlockPattern(role) => block_pattern_weight(m, *role),
            WeightFamily::Table(t) => t
                .get(m - self.offset_p - 1)
                .copied()
                .ok_or(ShiftError::OutsideTable {
                    index: m,
                    last: self.offset_p + t.len(),
                }),
        }
    }

    /// Log of the action weight `a(m)` of `e_m -> e_{m-1}`, for `m > offset_p`.
    pub fn log_action_weight(&self, m: usize) -> Result<f64> {
        if m <= self.offset_p {
            return Err(ShiftError::IndexBelowOffset {
                index: m,
                offset: self.offset_p,
            });
        }
        match self.family {
            WeightFamily::ThetaRaw(_) | WeightFamily::BargmannRaw => self.log_weight(m - 1),
            _ => self.log_weight(m),
        }
    }

    /// Index from which action weights are known to be non-decreasing
    /// forever, if the family guarantees it.
    pub fn monotone_from(&self) -> Option<usize> {
        match self.family {
            WeightFamily::ThetaRaw(_)
            | WeightFamily::ThetaComposite(_)
            | WeightFamily::BargmannRaw
            | WeightFamily::BargmannComposite => Some(self.offset_p + 1),
            WeightFamily::BlockPattern(_) | WeightFamily::Table(_) => None,
        }
    }

    /// First index used by a partial-product scan (`max(domain_start, 1)`).
    pub fn scan_start(&self) -> usize {
        self.domain_start().max(1)
    }
}

/// JSON description of a weight sequence:
/// `{"family": "...", "nu": .., "alpha": .., "p": .., "table": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub family: FamilyTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<BlockRole>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    #[serde(alias = "ThetaRaw")]
    ThetaRaw,
    #[serde(alias = "ThetaComposite")]
    ThetaComposite,
    #[serde(alias = "BargmannRaw")]
    BargmannRaw,
    #[serde(alias = "BargmannComposite")]
    BargmannComposite,
    #[serde(alias = "BlockPattern")]
    BlockPattern,
    #[serde(alias = "Table")]
    Table,
}

impl WeightSpec {
    pub fn theta(composite: bool, nu: f64, alpha: f64, p: usize) -> Self {
        WeightSpec {
            family: if composite {
                FamilyTag::ThetaComposite
            } else {
                FamilyTag::ThetaRaw
            },
            nu: Some(nu),
            alpha: Some(alpha),
            p: Some(p),
            role: None,
            table: None,
        }
    }

    pub fn bargmann(composite: bool, p: usize) -> Self {
        WeightSpec {
            family: if composite {
                FamilyTag::BargmannComposite
            } else {
                FamilyTag::BargmannRaw
            },
            nu: None,
            alpha: None,
            p: Some(p),
            role: None,
            table: None,
        }
    }

    pub fn block(role: BlockRole) -> Self {
        WeightSpec {
            family: FamilyTag::BlockPattern,
            nu: None,
            alpha: None,
            p: None,
            role: Some(role),
            table: None,
        }
    }

    pub fn build(&self) -> Result<WeightSequence> {
        let p = self.p.unwrap_or(0);
        let theta = || -> Result<ThetaParams> {
            let nu = self
                .nu
                .ok_or_else(|| ShiftError::InvalidParameter("theta family needs nu".into()))?;
            ThetaParams::new(nu, self.alpha.unwrap_or(0.0), p)
        };
        match self.family {
            FamilyTag::ThetaRaw => WeightSequence::theta_raw(theta()?),
            FamilyTag::ThetaComposite => WeightSequence::theta_composite(theta()?),
            FamilyTag::BargmannRaw => Ok(WeightSequence::bargmann_raw(p)),
            FamilyTag::BargmannComposite => Ok(WeightSequence::bargmann_composite(p)),
            FamilyTag::BlockPattern => {
                if p != 0 {
                    return Err(ShiftError::InvalidParameter(
                        "block_pattern weights have offset p = 0".into(),
                    ));
                }
                Ok(WeightSequence::block_pattern(
                    self.role.unwrap_or(BlockRole::Omega),
                ))
            }
            FamilyTag::Table => {
                let t = self.table.as_ref().ok_or_else(|| {
                    ShiftError::InvalidParameter("table family needs a table".into())
                })?;
                WeightSequence::table(t, p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_log_fact(n: usize) -> f64 {
        (2..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn theta_raw_examples() {
        let a = ThetaParams::new(PI, 0.0, 0).unwrap();
        assert!((theta_raw(0, &a) - 1.0).abs() < 1e-15);
        let b = ThetaParams::new(2.0 * PI, 1.0, 0).unwrap();
        assert!((theta_raw(3, &b) - 5.5).abs() < 1e-14);
        for m in 0..40 {
            let d = theta_raw(m + 1, &b) - theta_raw(m, &b);
            assert!((d - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn nu_must_be_positive() {
        let err = ThetaParams::new(0.0, 0.0, 0).unwrap_err();
        assert!(err.to_string().contains("nu > 0"));
        assert!(ThetaParams::new(-1.0, 0.0, 0).is_err());
        assert!(ThetaParams::new(f64::NAN, 0.0, 0).is_err());
    }

    #[test]
    fn theta_action_examples() {
        let p1 = ThetaParams::new(PI, 0.0, 1).unwrap();
        assert!((theta_action_weight(2, &p1).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(
            theta_action_weight(1, &p1),
            Err(ShiftError::IndexBelowOffset { index: 1, offset: 1 })
        );
        let p0 = ThetaParams::new(1.7, 0.3, 0).unwrap();
        for m in 1..=200 {
            assert_eq!(theta_action_weight(m, &p0).unwrap(), theta_raw(m - 1, &p0));
        }
    }

    #[test]
    fn theta_action_increment_is_constant() {
        for nu in [1.0, PI, 5.0] {
            for p in 0..=3 {
                let params = ThetaParams::new(nu, 0.2, p).unwrap();
                let step = (2 * p + 1) as f64 * 2.0 * PI / nu;
                for m in p + 1..50 {
                    let d = theta_action_weight(m + 1, &params).unwrap()
                        - theta_action_weight(m, &params).unwrap();
                    assert!((d - step).abs() < 1e-11, "nu {nu} p {p} m {m}");
                }
            }
        }
    }

    #[test]
    fn bargmann_action_examples() {
        assert!((bargmann_action_weight(4, 0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((bargmann_action_weight(2, 1).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(
            bargmann_action_weight(3, 3),
            Err(ShiftError::IndexBelowOffset { index: 3, offset: 3 })
        );
        for n in 1..300 {
            assert_eq!(bargmann_action_weight(n, 0).unwrap(), 0.5 * (n as f64).ln());
        }
    }

    #[test]
    fn bargmann_action_matches_factorial_ratio() {
        for p in 0..6 {
            for n in p + 1..120 {
                let want = 0.5 * (n as f64).ln() + exact_log_fact(n - 1) - exact_log_fact(n - 1 - p);
                let got = bargmann_action_weight(n, p).unwrap();
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "n {n} p {p}");
            }
        }
    }

    #[test]
    fn block_pattern_prefix() {
        let h = -LN_2;
        let w = LN_2;
        let omega: Vec<f64> = (1..=5)
            .map(|i| block_pattern_weight(i, BlockRole::Omega).unwrap())
            .collect();
        assert_eq!(omega, vec![w, h, h, w, w]);
        let varpi: Vec<f64> = (1..=5)
            .map(|i| block_pattern_weight(i, BlockRole::Varpi).unwrap())
            .collect();
        assert_eq!(varpi, vec![h, w, w, h, h]);
        for i in 1..5000 {
            let s = block_pattern_weight(i, BlockRole::Omega).unwrap()
                + block_pattern_weight(i, BlockRole::Varpi).unwrap();
            assert_eq!(s, 0.0);
        }
    }

    #[test]
    fn block_pattern_runs() {
        // prefix, then 1/2 x9, 2 x16
        let got: String = (1..=32)
            .map(|i| {
                if block_pattern_weight(i, BlockRole::Omega).unwrap() > 0.0 {
                    'u'
                } else {
                    'd'
                }
            })
            .collect();
        assert_eq!(got, "udduuddddddddduuuuuuuuuuuuuuuudd");
    }

    #[test]
    fn block_pattern_partial_sums_unbounded_both_ways() {
        let mut running = 0i64;
        let (mut hi, mut lo) = (0i64, 0i64);
        for i in 1..=100_000 {
            running += if block_pattern_weight(i, BlockRole::Omega).unwrap() > 0.0 { 1 } else { -1 };
            hi = hi.max(running);
            lo = lo.min(running);
        }
        assert!(hi > 500 && lo < -500, "{hi} {lo}");
    }

    #[test]
    fn block_run_boundaries() {
        for r in 3..200u64 {
            let end = r * (r + 1) * (2 * r + 1) / 6;
            assert_eq!(block_run(end), r);
            assert_eq!(block_run(end + 1), r + 1);
        }
    }

    #[test]
    fn sequences_have_finite_positive_log_weights() {
        let seqs = [
            WeightSequence::theta_raw(ThetaParams::new(PI, 0.0, 0).unwrap()).unwrap(),
            WeightSequence::theta_composite(ThetaParams::new(PI, -0.4, 2).unwrap()).unwrap(),
            WeightSequence::bargmann_raw(0),
            WeightSequence::bargmann_composite(2),
            WeightSequence::block_pattern(BlockRole::Varpi),
            WeightSequence::table(&[0.5, 2.0, 3.0], 1).unwrap(),
        ];
        for s in &seqs {
            let start = s.domain_start();
            let end = s.domain_end().unwrap_or(start + 100);
            for m in start..=end {
                assert!(s.log_weight(m).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn raw_families_act_with_shifted_index() {
        let params = ThetaParams::new(PI, 0.0, 0).unwrap();
        let raw = WeightSequence::theta_raw(params).unwrap();
        let comp = WeightSequence::theta_composite(params).unwrap();
        let braw = WeightSequence::bargmann_raw(0);
        let bcomp = WeightSequence::bargmann_composite(0);
        for m in 1..50 {
            assert_eq!(raw.log_action_weight(m).unwrap(), comp.log_action_weight(m).unwrap());
            let d = braw.log_action_weight(m).unwrap() - bcomp.log_action_weight(m).unwrap();
            assert!(d.abs() < 1e-15);
        }
    }

    #[test]
    fn table_bounds() {
        let t = WeightSequence::table(&[2.0, 3.0], 1).unwrap();
        assert_eq!(t.log_weight(2).unwrap(), 2f64.ln());
        assert_eq!(t.log_weight(4), Err(ShiftError::OutsideTable { index: 4, last: 3 }));
        assert!(t.log_weight(1).is_err());
        assert!(WeightSequence::table(&[1.0, 0.0], 0).is_err());
    }

    #[test]
    fn spec_json() {
        let s: WeightSpec =
            serde_json::from_str(r#"{"family":"theta_composite","nu":3.0,"alpha":0.5,"p":1}"#)
                .unwrap();
        let w = s.build().unwrap();
        assert_eq!(w.offset_p(), 1);
        let pascal: WeightSpec = serde_json::from_str(r#"{"family":"BargmannComposite","p":2}"#).unwrap();
        assert_eq!(pascal.build().unwrap(), WeightSequence::bargmann_composite(2));
        let bad: WeightSpec = serde_json::from_str(r#"{"family":"theta_raw","nu":-1.0}"#).unwrap();
        assert!(matches!(bad.build(), Err(ShiftError::InvalidParameter(_))));
        let table: WeightSpec = serde_json::from_str(r#"{"family":"table","table":[1.0,2.0]}"#).unwrap();
        assert_eq!(table.build().unwrap().domain_end(), Some(2));
    }
}
