//! Finite-horizon diagnostics for hypercyclicity of weighted shifts.
//!
//! Divergence of a weight product cannot be decided from finitely many terms,
//! so every report carries the horizon and threshold it was judged against.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{serde_log, Wide};
use crate::operator::LinearShift;
use crate::shift::Direction;
use crate::weights::{BlockRole, WeightSequence};

pub const DEFAULT_HORIZON: usize = 10_000;
pub const DEFAULT_THRESHOLD: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    DivergesToInfinity,
    BoundedAboveBy(f64),
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    /// `sum_{i <= n} log w_i` for `n = 1..=horizon_n`.
    pub partial_log_products: Vec<f64>,
    pub sup_attained: f64,
    pub verdict: Verdict,
    pub horizon_n: usize,
    pub threshold: f64,
    /// Largest single log-weight seen, for the boundedness question.
    pub max_log_weight: f64,
}

impl CriterionReport {
    fn from_partials(partials: Vec<f64>, max_log_weight: f64, threshold: f64) -> Self {
        let n = partials.len();
        let mut running = Vec::with_capacity(n);
        let mut best = f64::NEG_INFINITY;
        for &x in &partials {
            best = best.max(x);
            running.push(best);
        }
        let sup = best;
        let verdict = if n == 0 {
            Verdict::Inconclusive
        } else {
            let q = (3 * n) / 4;
            let before = if q == 0 { f64::NEG_INFINITY } else { running[q - 1] };
            let grew = sup > before;
            if sup > threshold && grew {
                Verdict::DivergesToInfinity
            } else if sup <= threshold && !grew {
                Verdict::BoundedAboveBy(sup)
            } else {
                Verdict::Inconclusive
            }
        };
        CriterionReport {
            partial_log_products: partials,
            sup_attained: sup,
            verdict,
            horizon_n: n,
            threshold,
            max_log_weight,
        }
    }
}

/// Partial sums of native log-weights from the scan start, accumulated in
/// double-double. Finite tables cut the horizon short.
fn partial_sums(w: &WeightSequence, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let start = w.scan_start();
    let n = match w.domain_end() {
        Some(end) if end + 1 < start + n => (end + 1).saturating_sub(start),
        _ => n,
    };
    let mut acc = Wide::ZERO;
    let mut partials = Vec::with_capacity(n);
    let mut logs = Vec::with_capacity(n);
    for i in start..start + n {
        let l = w.log_weight(i)?;
        acc = acc.add_f64(l);
        logs.push(l);
        partials.push(acc.to_f64());
    }
    Ok((partials, logs))
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn salas_scan(w: &WeightSequence, n: usize, threshold: f64) -> Result<CriterionReport> {
    let (partials, logs) = partial_sums(w, n)?;
    Ok(CriterionReport::from_partials(partials, max_of(&logs), threshold))
}

/// Scan of the pointwise product `w1_i * w2_i`. Partial products are the
/// entrywise sums of the two factor scans.
pub fn tensor_salas_scan(
    w1: &WeightSequence,
    w2: &WeightSequence,
    n: usize,
    threshold: f64,
) -> Result<CriterionReport> {
    let (p1, l1) = partial_sums(w1, n)?;
    let (p2, l2) = partial_sums(w2, n)?;
    let partials = p1.iter().zip(&p2).map(|(a, b)| a + b).collect();
    let max_log = l1.iter().zip(&l2).map(|(a, b)| a + b).fold(f64::NEG_INFINITY, f64::max);
    Ok(CriterionReport::from_partials(partials, max_log, threshold))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub omega: CriterionReport,
    pub varpi: CriterionReport,
    pub product: CriterionReport,
}

/// Block-pattern pair whose factors are each hypercyclic while the product
/// of weights never leaves 1.
pub fn counterexample_scan(n: usize, threshold: f64) -> Result<CounterexampleReport> {
    let omega = WeightSequence::block_pattern(BlockRole::Omega);
    let varpi = WeightSequence::block_pattern(BlockRole::Varpi);
    Ok(CounterexampleReport {
        omega: salas_scan(&omega, n, threshold)?,
        varpi: salas_scan(&varpi, n, threshold)?,
        product: tensor_salas_scan(&omega, &varpi, n, threshold)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub index: Vec<usize>,
    pub right_inverse_exact: bool,
    pub nilpotent_at: usize,
    pub nilpotent_exact: bool,
    #[serde(with = "serde_log::seq")]
    pub right_inverse_log_norms: Vec<f64>,
    pub decreasing: bool,
    pub below_tol_at: Option<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BcsReport {
    pub k_max: usize,
    pub tol_log: f64,
    pub probes: Vec<ProbeResult>,
    pub all_pass: bool,
}

/// Checks on basis probes: `T S f = f`, `T^k f = 0` one step past the
/// support excess, and `log ||S^k f||` strictly decreasing to below
/// `tol_log` within `k_max` steps.
pub fn bcs_premise_check<Op: LinearShift>(
    op: &Op,
    probes: &[Op::Index],
    k_max: usize,
    tol_log: f64,
) -> Result<BcsReport> {
    let t = op.with_direction(Direction::Backward);
    let s = op.with_direction(Direction::RightInverse);
    let mut results = Vec::with_capacity(probes.len());
    for &idx in probes {
        let f = t.basis_vector(idx)?;
        let right_inverse_exact = t.step(&s.step(&f)?)? == f;

        let excess = t.nilpotence_excess(idx);
        let nilpotent_exact = Op::is_zero(&t.power(&f, excess + 1)?) && !Op::is_zero(&t.power(&f, excess)?);

        let mut norms = Vec::with_capacity(k_max + 1);
        let mut v = f.clone();
        norms.push(Op::log_norm(&v));
        for _ in 0..k_max {
            v = s.step(&v)?;
            norms.push(Op::log_norm(&v));
        }
        let decreasing = norms.windows(2).all(|w| w[1] < w[0]);
        let below_tol_at = norms.iter().position(|&x| x < tol_log);
        let pass = right_inverse_exact && nilpotent_exact && decreasing && below_tol_at.is_some();
        results.push(ProbeResult {
            index: Op::index_coords(idx),
            right_inverse_exact,
            nilpotent_at: excess + 1,
            nilpotent_exact,
            right_inverse_log_norms: norms,
            decreasing,
            below_tol_at,
            pass,
        });
    }
    let all_pass = results.iter().all(|r| r.pass);
    Ok(BcsReport {
        k_max,
        tol_log,
        probes: results,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::ShiftOperator;
    use crate::tensor::TensorOperator;
    use crate::weights::ThetaParams;

    #[test]
    fn constant_weights_are_bounded_by_zero() {
        let w = WeightSequence::table(&vec![1.0; 50], 0).unwrap();
        let r = salas_scan(&w, 50, 100.0).unwrap();
        assert!(r.partial_log_products.iter().all(|&x| x == 0.0));
        assert_eq!(r.verdict, Verdict::BoundedAboveBy(0.0));
    }

    #[test]
    fn short_table_truncates_horizon() {
        let w = WeightSequence::table(&[2.0, 2.0, 2.0], 1).unwrap();
        let r = salas_scan(&w, 10, 100.0).unwrap();
        assert_eq!(r.horizon_n, 3);
    }

    #[test]
    fn bargmann_scan_diverges() {
        let r = salas_scan(&WeightSequence::bargmann_raw(0), 1000, 100.0).unwrap();
        assert_eq!(r.verdict, Verdict::DivergesToInfinity);
        let want = 0.5 * libm::lgamma(1002.0);
        assert!((r.partial_log_products[999] - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn block_scan_matches_direct_summation() {
        for role in [BlockRole::Omega, BlockRole::Varpi] {
            let r = salas_scan(&WeightSequence::block_pattern(role), 2000, 1e9).unwrap();
            let mut acc = 0.0;
            let mut best = f64::NEG_INFINITY;
            for i in 1..=2000 {
                acc += crate::weights::block_pattern_weight(i, role).unwrap();
                best = best.max(acc);
                assert!((r.partial_log_products[i - 1] - acc).abs() < 1e-9);
            }
            assert!((r.sup_attained - best).abs() < 1e-9);
        }
    }

    #[test]
    fn counterexample_product_is_exactly_zero() {
        let r = counterexample_scan(10_000, 100.0).unwrap();
        assert!(r.product.partial_log_products.iter().all(|&x| x == 0.0));
        assert_eq!(r.product.verdict, Verdict::BoundedAboveBy(0.0));
        assert_eq!(r.omega.verdict, Verdict::DivergesToInfinity);
        assert_eq!(r.varpi.verdict, Verdict::DivergesToInfinity);
    }

    #[test]
    fn unit_second_factor_reduces_to_single_scan() {
        let w1 = WeightSequence::theta_composite(ThetaParams::new(1.0, 0.2, 1).unwrap()).unwrap();
        let ones = WeightSequence::table(&vec![1.0; 200], 1).unwrap();
        let a = salas_scan(&w1, 200, 100.0).unwrap();
        let b = tensor_salas_scan(&w1, &ones, 200, 100.0).unwrap();
        assert_eq!(a.partial_log_products, b.partial_log_products);
    }

    #[test]
    fn premises_hold_for_theta_probes() {
        let w = WeightSequence::theta_composite(ThetaParams::new(std::f64::consts::PI, 0.0, 1).unwrap()).unwrap();
        let op = ShiftOperator::backward(w);
        let r = bcs_premise_check(&op, &[1, 2, 3, 4, 5, 6], 40, -100.0).unwrap();
        assert!(r.all_pass, "{r:?}");
    }

    #[test]
    fn premises_hold_for_tensor_probes() {
        let w1 = WeightSequence::theta_composite(ThetaParams::new(std::f64::consts::PI, 0.0, 1).unwrap()).unwrap();
        let op = TensorOperator::new(
            ShiftOperator::backward(w1),
            ShiftOperator::backward(WeightSequence::bargmann_composite(1)),
        )
        .unwrap();
        let probes: Vec<(usize, usize)> = (1..5).flat_map(|m| (1..5).map(move |n| (m, n))).collect();
        let r = bcs_premise_check(&op, &probes, 40, -100.0).unwrap();
        assert!(r.all_pass, "{r:?}");
    }
}
