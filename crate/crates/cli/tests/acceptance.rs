//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use shiftdyn_core::criteria::{counterexample_scan, salas_scan, Verdict};
use shiftdyn_core::dynamics::{
    eigenvector_build, hypercyclic_vector_build, orbit, periodic_point_from_eigen, relative_residual_log,
};
use shiftdyn_core::{
    theta_basis_eval, CoeffVector, Direction, LogComplex, ShiftOperator, TensorOperator, TensorVector, ThetaParams,
    WeightSequence,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn theta_params(p: usize) -> ThetaParams {
    ThetaParams::new(PI, 0.0, p).unwrap()
}

fn theta(p: usize) -> ShiftOperator {
    ShiftOperator::backward(WeightSequence::theta_composite(theta_params(p)).unwrap())
}

fn bargmann(p: usize) -> ShiftOperator {
    ShiftOperator::backward(WeightSequence::bargmann_composite(p))
}

/// Every single-space family used by the suite, at offsets 0..=2.
fn families() -> Vec<(String, ShiftOperator)> {
    let mut out = Vec::new();
    for p in 0..=2 {
        out.push((format!("theta_composite p={p}"), theta(p)));
        out.push((
            format!("theta_raw p={p}"),
            ShiftOperator::backward(WeightSequence::theta_raw(ThetaParams::new(1.3, 0.25, p).unwrap()).unwrap()),
        ));
        out.push((format!("bargmann_composite p={p}"), bargmann(p)));
        out.push((format!("bargmann_raw p={p}"), ShiftOperator::backward(WeightSequence::bargmann_raw(p))));
    }
    out
}

fn random_coeff(rng: &mut ChaCha8Rng) -> LogComplex {
    LogComplex::from_polar_log(rng.gen_range(-50.0..50.0), rng.gen_range(-PI..PI))
}

fn random_vector(rng: &mut ChaCha8Rng, p: usize) -> CoeffVector {
    let k = rng.gen_range(1..=20);
    CoeffVector::from_entries(p, (0..k).map(|_| (rng.gen_range(p..=200), random_coeff(rng)))).unwrap()
}

fn random_tensor(rng: &mut ChaCha8Rng, p1: usize, p2: usize, max: usize) -> TensorVector {
    let k = rng.gen_range(1..=20);
    TensorVector::from_entries(
        p1,
        p2,
        (0..k).map(|_| ((rng.gen_range(p1..=max), rng.gen_range(p2..=max)), random_coeff(rng))),
    )
    .unwrap()
}

fn eps_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= f64::EPSILON * a.abs().max(b.abs()).max(1.0)
}

fn same_entries(a: impl Iterator<Item = LogComplex>, b: impl Iterator<Item = LogComplex>) -> bool {
    a.zip(b).all(|(x, y)| {
        let dphase = (x.phase() - y.phase()).abs();
        eps_equal(x.logmag(), y.logmag()) && (dphase <= 4.0 * f64::EPSILON || (2.0 * PI - dphase) <= 4.0 * f64::EPSILON)
    })
}

fn right_inverse_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for (name, t) in families() {
        let s = t.with_direction(Direction::RightInverse);
        for _ in 0..100 {
            let v = random_vector(&mut rng, t.offset_p());
            let back = t.apply(&s.apply(&v).unwrap()).unwrap();
            ensure(
                back.len() == v.len() && back.iter().map(|e| e.0).eq(v.iter().map(|e| e.0)),
                || format!("{name}: support changed"),
            )?;
            ensure(same_entries(back.iter().map(|e| e.1), v.iter().map(|e| e.1)), || {
                format!("{name}: entries differ")
            })?;
            checked += 1;
        }
    }
    for p1 in 0..=2 {
        for p2 in 0..=2 {
            for (l, r) in [(theta(p1), bargmann(p2)), (bargmann(p1), theta(p2)), (theta(p1), theta(p2))] {
                let t = TensorOperator::new(l, r).unwrap();
                let s = t.with_direction(Direction::RightInverse);
                for _ in 0..100 {
                    let w = random_tensor(&mut rng, p1, p2, 200);
                    let back = t.apply(&s.apply(&w).unwrap()).unwrap();
                    ensure(back.iter().map(|e| e.0).eq(w.iter().map(|e| e.0)), || {
                        format!("tensor p=({p1},{p2}): support changed")
                    })?;
                    ensure(same_entries(back.iter().map(|e| e.1), w.iter().map(|e| e.1)), || {
                        format!("tensor p=({p1},{p2}): entries differ")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} vectors"))
}

fn nilpotence() -> Check {
    for (name, t) in families() {
        let p = t.offset_p();
        for m in p..=50 {
            let e = CoeffVector::unit(p, m).unwrap();
            let mut v = e.clone();
            for k in 0..=(m - p + 2) {
                let zero = t.apply_power(&e, k).unwrap().is_zero();
                ensure(zero == (k > m - p), || format!("{name}: T^{k} e_{m} zero={zero}"))?;
                ensure(v.is_zero() == zero, || format!("{name}: stepwise T^{k} e_{m} disagrees"))?;
                v = t.apply(&v).unwrap();
            }
        }
    }
    for (p1, p2) in [(0, 0), (1, 2), (2, 1)] {
        let t = TensorOperator::new(theta(p1), bargmann(p2)).unwrap();
        for m in p1..=50 {
            for n in p2..=50 {
                let e = TensorVector::unit(p1, p2, m, n).unwrap();
                let bound = (m - p1).min(n - p2);
                for k in [bound, bound + 1, bound + 2] {
                    let zero = t.apply_power(&e, k).unwrap().is_zero();
                    ensure(zero == (k > bound), || format!("tensor T^{k} e({m},{n}) zero={zero}"))?;
                }
            }
        }
    }
    Ok("all m <= 50".into())
}

fn right_inverse_decay() -> Check {
    let s = theta(1).with_direction(Direction::RightInverse);
    let e = CoeffVector::unit(1, 1).unwrap();
    let mut v = e.clone();
    let mut norms = vec![v.log_norm()];
    for _ in 0..40 {
        v = s.apply(&v).unwrap();
        norms.push(v.log_norm());
    }
    ensure(norms.windows(2).all(|w| w[1] < w[0]), || "not strictly decreasing".into())?;
    let k_hit = norms
        .iter()
        .position(|&x| x < -100.0)
        .ok_or_else(|| format!("min log-norm {} within 40 steps", norms[40]))?;

    let st = TensorOperator::new(theta(1), bargmann(1)).unwrap().with_direction(Direction::RightInverse);
    let sb = bargmann(1).with_direction(Direction::RightInverse);
    let mut w = TensorVector::unit(1, 1, 1, 1).unwrap();
    let mut u = e.clone();
    let mut b = e.clone();
    let mut prev = w.log_norm();
    for k in 1..=40 {
        w = st.apply(&w).unwrap();
        u = s.apply(&u).unwrap();
        b = sb.apply(&b).unwrap();
        let (m, cu) = u.iter().next().unwrap();
        let (n, cb) = b.iter().next().unwrap();
        let cw = w.get(m, n);
        ensure(w.len() == 1 && cw.logmag_wide() == cu.logmag_wide() + cb.logmag_wide(), || {
            format!("tensor log-norm not additive at k={k}")
        })?;
        ensure(w.log_norm() < prev, || format!("tensor not decreasing at k={k}"))?;
        prev = w.log_norm();
    }
    Ok(format!("log||S^k e_1|| < -100 at k = {k_hit}"))
}

fn eigen_relation() -> Check {
    let t = TensorOperator::new(theta(0), bargmann(0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..20 {
        // |lambda mu| <= 2 with the split between the factors varied
        let prod: f64 = rng.gen_range(0.0..2.0);
        let share: f64 = rng.gen_range(-1.5..1.5);
        let r1 = prod.sqrt() * share.exp();
        let r2 = prod.sqrt() / share.exp();
        let lambda = LogComplex::from_polar_log(r1.ln(), rng.gen_range(-PI..PI));
        let mu = LogComplex::from_polar_log(r2.ln(), rng.gen_range(-PI..PI));
        let (g, _) = eigenvector_build(&t, lambda, mu, -60.0).map_err(|e| e.to_string())?;
        let r = relative_residual_log(&t, &g, 1, lambda * mu).unwrap();
        worst = worst.max(r);
    }
    ensure(worst <= -55.0, || format!("worst relative residual log {worst}"))?;
    Ok(format!("worst relative residual log {worst:.2}"))
}

fn periodicity() -> Check {
    let t = TensorOperator::new(theta(0), bargmann(0)).unwrap();
    let (g, _) = periodic_point_from_eigen(&t, 4, -60.0).map_err(|e| e.to_string())?;
    let r4 = relative_residual_log(&t, &g, 4, LogComplex::ONE).unwrap();
    let r1 = relative_residual_log(&t, &g, 1, LogComplex::ONE).unwrap();
    ensure(r4 <= -55.0 && r1 >= -5.0, || format!("log residual T^4: {r4}, T: {r1}"))?;
    Ok(format!("log residual T^4: {r4:.2}, T: {r1:.2}"))
}

fn counterexample() -> Check {
    let r = counterexample_scan(1_000_000, 100.0).unwrap();
    let ln2 = std::f64::consts::LN_2;
    for (name, f) in [("omega", &r.omega), ("varpi", &r.varpi)] {
        ensure(f.verdict == Verdict::DivergesToInfinity, || format!("{name} verdict {:?}", f.verdict))?;
        ensure(f.sup_attained > 100.0 * ln2, || format!("{name} sup {}", f.sup_attained))?;
    }
    ensure(r.product.partial_log_products.iter().all(|&x| x == 0.0), || {
        "product partial log-product not exactly 0".into()
    })?;
    ensure(r.product.verdict == Verdict::BoundedAboveBy(0.0), || {
        format!("product verdict {:?}", r.product.verdict)
    })?;
    Ok(format!(
        "factor sups {:.1}, {:.1}; product identically 0",
        r.omega.sup_attained, r.varpi.sup_attained
    ))
}

fn salas_closed_form() -> Check {
    let r = salas_scan(&WeightSequence::bargmann_raw(0), 1000, 100.0).unwrap();
    let mut worst: f64 = 0.0;
    for n in 1..=1000 {
        let want = 0.5 * statrs::function::gamma::ln_gamma(n as f64 + 2.0);
        let got = r.partial_log_products[n - 1];
        worst = worst.max((got - want).abs() / want.abs());
    }
    ensure(worst <= 1e-9, || format!("worst relative error {worst:e}"))?;
    Ok(format!("worst relative error {worst:.1e}"))
}

fn hypercyclic_replay() -> Check {
    let op = bargmann(0);
    let eps: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..5 {
        let targets: Vec<CoeffVector> = (0..3)
            .map(|_| {
                let k = rng.gen_range(1..=4);
                CoeffVector::from_entries(
                    0,
                    (0..k).map(|_| {
                        (
                            rng.gen_range(0..=8),
                            LogComplex::from_cartesian(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                        )
                    }),
                )
                .unwrap()
            })
            .collect();
        let b = hypercyclic_vector_build(&op, &targets, eps).map_err(|e| e.to_string())?;
        let trace = orbit(&op, &b.psi, *b.schedule.last().unwrap()).unwrap();
        for (y, &n) in targets.iter().zip(&b.schedule) {
            let d = trace.at(n).ok_or("orbit ended early")?.sub(y).unwrap().log_norm();
            worst = worst.max(d);
        }
    }
    ensure(worst <= eps.ln(), || format!("worst log distance {worst}"))?;
    Ok(format!("worst log distance {worst:.2} (eps log {:.2})", eps.ln()))
}

fn basis_functional_equation() -> Check {
    let mut worst = f64::NEG_INFINITY;
    for nu in [1.0, PI] {
        for alpha in [0.0, 0.3] {
            let params = ThetaParams::new(nu, alpha, 0).unwrap();
            for m in 0..=5 {
                for i in 0..5 {
                    for j in 0..5 {
                        let z = Complex64::new(-1.0 + 0.5 * i as f64, -1.0 + 0.5 * j as f64);
                        let lhs = theta_basis_eval(m, z + 1.0, &params);
                        let f = Complex64::new(0.0, 2.0 * PI * alpha) + (z + 0.5) * nu;
                        let rhs = LogComplex::from_polar_log(f.re, f.im) * theta_basis_eval(m, z, &params);
                        worst = worst.max((lhs - rhs).logmag() - lhs.logmag());
                    }
                }
            }
        }
    }
    ensure(worst <= (1e-10f64).ln(), || format!("worst relative error {:e}", worst.exp()))?;
    Ok(format!("worst relative error {:.1e}", worst.exp()))
}

fn adjoint_pairing() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = f64::NEG_INFINITY;
    let mut rel = |lhs: LogComplex, rhs: LogComplex| {
        if !lhs.is_zero() || !rhs.is_zero() {
            worst = worst.max((lhs - rhs).logmag() - lhs.logmag().max(rhs.logmag()));
        }
    };
    for p in 0..=2 {
        for t in [theta(p), bargmann(p)] {
            let adj = t.adjoint().unwrap();
            for _ in 0..100 {
                let u = random_vector(&mut rng, p);
                let v = random_vector(&mut rng, p);
                rel(t.apply(&u).unwrap().inner(&v).unwrap(), u.inner(&adj.apply(&v).unwrap()).unwrap());
            }
        }
    }
    let t = TensorOperator::new(theta(1), bargmann(2)).unwrap();
    let adj = t.adjoint().unwrap();
    for _ in 0..100 {
        // overlapping supports so the pairings are generically non-zero
        let w1 = random_tensor(&mut rng, 1, 2, 8);
        let w2 = random_tensor(&mut rng, 1, 2, 8);
        rel(t.apply(&w1).unwrap().inner(&w2).unwrap(), w1.inner(&adj.apply(&w2).unwrap()).unwrap());
    }
    ensure(worst <= (1e-11f64).ln(), || format!("worst relative error {:e}", worst.exp()))?;
    Ok(format!("worst relative error {:.1e}", worst.exp()))
}

fn cli_runs() -> Vec<Vec<&'static str>> {
    let weights = r#"{"family":"theta_composite","nu":3.141592653589793,"alpha":0.25,"p":1}"#;
    vec![
        vec!["weights"],
        vec!["weights", "--weights", weights, "-N", "30"],
        vec!["basis", "eval", "--space", "theta", "--alpha", "0.3", "--z", "0.2,-0.4", "--z", "-1,1"],
        vec!["op", "apply"],
        vec!["op", "power", "--k", "3", "--direction", "right_inverse"],
        vec!["op", "matrix", "--n-max", "12"],
        vec!["tensor", "apply"],
        vec!["tensor", "power", "--k", "2"],
        vec!["tensor", "inner"],
        vec!["criterion", "-N", "2000"],
        vec!["criterion", "--weights", weights, "--weights2", r#"{"family":"bargmann_composite","p":1}"#, "-N", "500"],
        vec!["eigen", "--lambda", "0.3,-0.2", "--mu", "-1,0.5", "--tail", "-60"],
        vec!["eigen", "--lambda", "0,0", "--mu", "0,0"],
        vec!["periodic", "--q", "4"],
        vec!["periodic", "--q", "5", "--target", r#"{"p":0,"entries":[[0,0,0],[2,1,0.5]]}"#],
        vec!["hypercyclic", "--eps", "1e-6"],
        vec!["counterexample", "-N", "10000"],
        vec!["density-probe"],
    ]
}

fn run_cli(bin: &Path, dir: &Path, tag: &str, args: &[&str]) -> Result<(), String> {
    let out = dir.join(format!("{tag}.json"));
    let status = Command::new(bin)
        .args(["--seed", "3", "--out", out.to_str().unwrap()])
        .args(args)
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("{args:?} exited with {status}"))
}

fn manifest_without_time(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let m = v.as_object_mut().ok_or("manifest is not an object")?;
    m.remove("timestamp");
    m.remove("wall_time_s");
    Ok(v)
}

fn reproducibility() -> Check {
    let bin = Path::new(env!("CARGO_BIN_EXE_shiftdyn"));
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs = cli_runs();
    for (i, args) in runs.iter().enumerate() {
        for rep in ["a", "b"] {
            run_cli(bin, dir.path(), &format!("{i}{rep}"), args)?;
        }
        for suffix in ["json", "series.csv"] {
            let a = std::fs::read(dir.path().join(format!("{i}a.{suffix}"))).map_err(|e| e.to_string())?;
            let b = std::fs::read(dir.path().join(format!("{i}b.{suffix}"))).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("{args:?}: {suffix} differs between runs"))?;
        }
        let ma = manifest_without_time(&dir.path().join(format!("{i}a.manifest.json")))?;
        let mb = manifest_without_time(&dir.path().join(format!("{i}b.manifest.json")))?;
        let strip = |v: &Value| v["inputs"]["command"].clone();
        ensure(strip(&ma) == strip(&mb) && ma["seed"] == mb["seed"] && ma["version"] == mb["version"], || {
            format!("{args:?}: manifest differs")
        })?;
    }
    Ok(format!("{} commands, two runs each", runs.len()))
}

fn main() {
    let criteria: Vec<(u32, &str, Duration, fn() -> Check)> = vec![
        (1, "right-inverse identity", Duration::from_secs(1), right_inverse_identity),
        (2, "nilpotence", Duration::from_secs(1), nilpotence),
        (3, "right-inverse powers decay", Duration::from_secs(1), right_inverse_decay),
        (4, "eigen relation", Duration::from_secs(5), eigen_relation),
        (5, "periodicity", Duration::from_secs(5), periodicity),
        (6, "counterexample", Duration::from_secs(2), counterexample),
        (7, "salas closed form", Duration::from_millis(100), salas_closed_form),
        (8, "hypercyclic replay", Duration::from_secs(5), hypercyclic_replay),
        (9, "basis functional equation", Duration::from_secs(1), basis_functional_equation),
        (10, "adjoint pairing", Duration::from_secs(1), adjoint_pairing),
        (11, "reproducibility", Duration::from_secs(30), reproducibility),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; runtime over {limit:?}")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {name:<28} {} ({:.3}s) {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
