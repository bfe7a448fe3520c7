//! Orbits, eigenvectors, periodic points and a hypercyclic-vector builder.

use serde::{Deserialize, Serialize};

use crate::basis::CoeffVector;
use crate::error::{Result, ShiftError};
use crate::numerics::{log_add_exp, serde_log, LogComplex, Wide, PI_WIDE};
use crate::operator::LinearShift;
use crate::shift::{Direction, ShiftOperator};
use crate::tensor::{tensor_of, TensorOperator, TensorVector};

/// Hard cap on series terms per axis.
pub const MAX_SERIES_TERMS: usize = 10_000;
/// Hard cap on hypercyclic schedule times.
pub const MAX_SCHEDULE_TIME: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitStep<V> {
    pub k: usize,
    #[serde(with = "serde_log")]
    pub log_norm: f64,
    pub vector: V,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace<V> {
    pub iterates: Vec<OrbitStep<V>>,
    /// First `k` with `T^k seed = 0`. The trace stops there.
    pub annihilation_k: Option<usize>,
}

impl<V> OrbitTrace<V> {
    pub fn at(&self, k: usize) -> Option<&V> {
        self.iterates.get(k).map(|s| &s.vector)
    }
}

/// Iterates `seed, T seed, T^2 seed, ...` up to `k_max` by repeated single
/// applications.
pub fn orbit<Op: LinearShift>(op: &Op, seed: &Op::Vector, k_max: usize) -> Result<OrbitTrace<Op::Vector>> {
    let mut iterates = vec![OrbitStep {
        k: 0,
        log_norm: Op::log_norm(seed),
        vector: seed.clone(),
    }];
    let mut annihilation_k = if Op::is_zero(seed) { Some(0) } else { None };
    let mut v = seed.clone();
    for k in 1..=k_max {
        if annihilation_k.is_some() {
            break;
        }
        v = op.step(&v)?;
        if Op::is_zero(&v) {
            annihilation_k = Some(k);
        }
        iterates.push(OrbitStep {
            k,
            log_norm: Op::log_norm(&v),
            vector: v.clone(),
        });
    }
    Ok(OrbitTrace {
        iterates,
        annihilation_k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSpec {
    pub lambda: LogComplex,
    pub mu: LogComplex,
    pub trunc_m: usize,
    pub trunc_n: usize,
    /// Upper bound on `log` of the norm of everything from the last
    /// `guard` retained terms on, per axis, combined over the tensor.
    #[serde(with = "serde_log")]
    pub tail_log_bound: f64,
}

/// One axis of the eigen series: `c_p = 1`, `c_m = c_{m-1} z / a(m)`.
struct AxisSeries {
    coeffs: CoeffVector,
    last: usize,
    tail_log: f64,
}

fn axis_series(op: &ShiftOperator, z: LogComplex, tol: f64, guard: usize) -> Result<AxisSeries> {
    let p = op.offset_p();
    let mut coeffs = CoeffVector::zero(p);
    coeffs.set(p, LogComplex::ONE)?;
    if z.is_zero() {
        return Ok(AxisSeries {
            coeffs,
            last: p,
            tail_log: f64::NEG_INFINITY,
        });
    }
    let mono = op.weights().monotone_from().ok_or_else(|| {
        ShiftError::TailNotCertifiable(format!(
            "{} weights are not known to be monotone",
            op.weights().family_name()
        ))
    })?;
    let log_z = z.logmag();
    let mut c = LogComplex::ONE;
    // index from which the tail (including the guard band) is certified
    let mut cert: Option<(usize, f64)> = None;
    let mut m = p;
    loop {
        if cert.is_none() && m + 1 >= mono {
            let log_ratio = log_z - op.log_action_weight(m + 1)?;
            if log_ratio < 0.0 {
                let bound = c.logmag() - 0.5 * (-(2.0 * log_ratio).exp()).ln_1p();
                if bound <= tol {
                    cert = Some((m, bound));
                }
            }
        }
        if let Some((start, bound)) = cert {
            if m + 1 >= start + guard {
                return Ok(AxisSeries {
                    coeffs,
                    last: m,
                    tail_log: bound,
                });
            }
        }
        if m - p >= MAX_SERIES_TERMS {
            return Err(ShiftError::TailNotCertifiable(format!(
                "no geometric tail below {tol} within {MAX_SERIES_TERMS} terms"
            )));
        }
        m += 1;
        let w = op.log_action_weight(m)?;
        c = (c * z).scale_log(-w);
        coeffs.set(m, c)?;
    }
}

fn check_backward(t: &TensorOperator) -> Result<()> {
    if t.direction() != Direction::Backward {
        return Err(ShiftError::InvalidParameter(
            "eigenvectors are built for backward shifts".into(),
        ));
    }
    Ok(())
}

/// Truncated eigenvector `g = u ⊗ v` of `T1 ⊗ T2` for eigenvalue `lambda mu`,
/// where `u, v` are the single-axis eigen series (all cross terms included).
/// The last `guard` terms on each axis lie inside the certified tail.
pub fn eigenvector_build_guarded(
    t: &TensorOperator,
    lambda: LogComplex,
    mu: LogComplex,
    tail_tol_log: f64,
    guard: usize,
) -> Result<(TensorVector, EigenSpec)> {
    check_backward(t)?;
    let guard = guard.max(1);
    let mut tol_u = tail_tol_log;
    let mut tol_v = tail_tol_log;
    for _ in 0..64 {
        let u = axis_series(t.left(), lambda, tol_u, guard)?;
        let v = axis_series(t.right(), mu, tol_v, guard)?;
        let nu = log_add_exp(u.coeffs.log_norm(), u.tail_log);
        let nv = log_add_exp(v.coeffs.log_norm(), v.tail_log);
        let combined = log_add_exp(u.tail_log + nv, nu + v.tail_log);
        if combined <= tail_tol_log {
            let g = tensor_of(&u.coeffs, &v.coeffs);
            return Ok((
                g,
                EigenSpec {
                    lambda,
                    mu,
                    trunc_m: u.last,
                    trunc_n: v.last,
                    tail_log_bound: combined,
                },
            ));
        }
        let excess = combined - tail_tol_log + 0.5;
        tol_u -= excess;
        tol_v -= excess;
    }
    Err(ShiftError::TailNotCertifiable(
        "per-axis tolerances did not converge".into(),
    ))
}

pub fn eigenvector_build(
    t: &TensorOperator,
    lambda: LogComplex,
    mu: LogComplex,
    tail_tol_log: f64,
) -> Result<(TensorVector, EigenSpec)> {
    eigenvector_build_guarded(t, lambda, mu, tail_tol_log, 1)
}

/// `e^{i pi / q}`, exact to double-double.
pub fn half_root_of_unity(q: usize) -> LogComplex {
    LogComplex::from_wide(Wide::ZERO, PI_WIDE.div_f64(q as f64))
}

/// Eigenvector with `lambda = mu = e^{i pi / q}`, so `T^q g = g` up to the
/// certified tail.
pub fn periodic_point_from_eigen(t: &TensorOperator, q_order: usize, tail_tol_log: f64) -> Result<(TensorVector, EigenSpec)> {
    if q_order == 0 {
        return Err(ShiftError::InvalidParameter("q_order must be at least 1".into()));
    }
    let z = half_root_of_unity(q_order);
    eigenvector_build_guarded(t, z, z, tail_tol_log, q_order)
}

/// `log ||T^k g - c g|| - log ||g||`.
pub fn relative_residual_log(t: &TensorOperator, g: &TensorVector, k: usize, c: LogComplex) -> Result<f64> {
    let tg = t.apply_power(g, k)?;
    let diff = tg.sub(&g.scale(c))?;
    Ok(diff.log_norm() - g.log_norm())
}

fn check_backward_single(op: &ShiftOperator, v: &CoeffVector) -> Result<()> {
    if op.direction() != Direction::Backward {
        return Err(ShiftError::InvalidParameter("operator must be backward".into()));
    }
    if v.offset_p() != op.offset_p() {
        return Err(ShiftError::OffsetMismatch {
            expected: op.offset_p(),
            found: v.offset_p(),
        });
    }
    Ok(())
}

fn support_excess(v: &CoeffVector) -> usize {
    v.max_index().map_or(0, |m| m - v.offset_p())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicFromTarget {
    pub x: CoeffVector,
    pub q: usize,
    /// Number of right-inverse blocks added after `y`.
    pub blocks: usize,
    /// Bound on `log` of the last retained block plus everything dropped.
    pub tail_log_bound: f64,
}

/// `x = sum_{r=0..=R} S^{qr} y`. Then `T^q x - x = -S^{qR} y`, which lies
/// inside the certified tail.
pub fn periodic_from_target(
    op: &ShiftOperator,
    y: &CoeffVector,
    q: usize,
    tail_tol_log: f64,
) -> Result<PeriodicFromTarget> {
    check_backward_single(op, y)?;
    let excess = support_excess(y);
    if q <= excess {
        return Err(ShiftError::QTooSmall { q, excess });
    }
    let mono = op.weights().monotone_from().ok_or_else(|| {
        ShiftError::TailNotCertifiable(format!(
            "{} weights are not known to be monotone",
            op.weights().family_name()
        ))
    })?;
    let p = op.offset_p();
    let s = op.right_inverse();
    let mut x = y.clone();
    let mut term = y.clone();
    for r in 1..=MAX_SERIES_TERMS {
        term = s.apply_power(&term, q)?;
        x = x.add(&term)?;
        // every later block sits at or above p + q r, so each further
        // S^q shrinks it by at least this factor
        let lo = p + q * r + 1;
        if lo < mono {
            continue;
        }
        let log_rho = -op.log_weight_product(lo, lo + q - 1)?.to_f64();
        if log_rho >= 0.0 {
            continue;
        }
        let bound = term.log_norm() - (-log_rho.exp()).ln_1p();
        if bound <= tail_tol_log {
            return Ok(PeriodicFromTarget {
                x,
                q,
                blocks: r,
                tail_log_bound: bound,
            });
        }
    }
    Err(ShiftError::TailNotCertifiable(format!(
        "periodic series did not fall below {tail_tol_log}"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypercyclicBuild {
    pub psi: CoeffVector,
    pub schedule: Vec<usize>,
    pub eps: f64,
}

/// `psi = sum_j S^{n_j} y_j` with a schedule such that `T^{n_j} psi` is
/// within `eps` of `y_j`: earlier terms are annihilated exactly, and the
/// later term `i` contributes at most `eps 2^{-i}` at every earlier time.
pub fn hypercyclic_vector_build(op: &ShiftOperator, targets: &[CoeffVector], eps: f64) -> Result<HypercyclicBuild> {
    if !(eps > 0.0) {
        return Err(ShiftError::InvalidParameter("eps must be positive".into()));
    }
    if targets.is_empty() {
        return Err(ShiftError::InvalidParameter("at least one target is needed".into()));
    }
    for y in targets {
        check_backward_single(op, y)?;
    }
    let s = op.right_inverse();
    let log_eps = eps.ln();
    let mut schedule: Vec<usize> = Vec::with_capacity(targets.len());
    let mut psi = CoeffVector::zero(op.offset_p());
    for (i, y) in targets.iter().enumerate() {
        let n = if i == 0 {
            1
        } else {
            let prev = schedule[i - 1];
            let mut n = prev + support_excess(&targets[i - 1]) + 1;
            let budget = log_eps - (i + 1) as f64 * std::f64::consts::LN_2;
            // log ||S^k y|| for k = 0.. computed incrementally
            let mut norms = vec![y.log_norm()];
            let mut v = y.clone();
            loop {
                if n > MAX_SCHEDULE_TIME {
                    return Err(ShiftError::ScheduleOverflow {
                        target: i,
                        limit: MAX_SCHEDULE_TIME,
                    });
                }
                while norms.len() <= n - schedule[0] {
                    v = s.apply(&v)?;
                    norms.push(v.log_norm());
                }
                if schedule.iter().all(|&nj| norms[n - nj] <= budget) {
                    break n;
                }
                n += 1;
            }
        };
        schedule.push(n);
        psi = psi.add(&s.apply_power(y, n)?)?;
    }
    Ok(HypercyclicBuild { psi, schedule, eps })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub target: usize,
    pub q: usize,
    /// `log ||x - y||`.
    #[serde(with = "serde_log")]
    pub log_distance: f64,
    /// `log ||T^q x - x||`.
    #[serde(with = "serde_log")]
    pub log_residual: f64,
}

/// Periodic approximations of each target for each admissible `q`.
pub fn density_probe(
    op: &ShiftOperator,
    targets: &[CoeffVector],
    qs: &[usize],
    tail_tol_log: f64,
) -> Result<Vec<DensityRecord>> {
    let mut out = Vec::new();
    for (i, y) in targets.iter().enumerate() {
        for &q in qs {
            if q <= support_excess(y) {
                continue;
            }
            let built = periodic_from_target(op, y, q, tail_tol_log)?;
            let residual = op.apply_power(&built.x, q)?.sub(&built.x)?;
            out.push(DensityRecord {
                target: i,
                q,
                log_distance: built.x.sub(y)?.log_norm(),
                log_residual: residual.log_norm(),
            });
        }
    }
    Ok(out)
}
