use std::fs;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use shiftdyn_core::criteria::{counterexample_scan, salas_scan, tensor_salas_scan};
use shiftdyn_core::dynamics::{
    density_probe, eigenvector_build, hypercyclic_vector_build, orbit, periodic_from_target,
    periodic_point_from_eigen, relative_residual_log,
};
use shiftdyn_core::weights::WeightSpec;
use shiftdyn_core::{
    Basis, CoeffVector, Direction, LogComplex, OperatorSpec, ShiftOperator, TensorOperator, TensorVector,
    ThetaParams, WeightSequence,
};

use crate::args::*;
use crate::output::{num, to_value, CliError, CliResult, CommandOutput, Series};

pub fn run(cli: &Cli) -> CliResult<CommandOutput> {
    log::debug!("command {:?}", cli.command);
    let mut out = match &cli.command {
        Command::Weights(a) => weights(a),
        Command::Basis(BasisCmd::Eval(a)) => basis_eval(a),
        Command::Op(c) => op(c),
        Command::Tensor(c) => tensor(c),
        Command::Criterion(a) => criterion(a),
        Command::Eigen(a) => eigen(a),
        Command::Periodic(a) => periodic(a),
        Command::Hypercyclic(a) => hypercyclic(a, cli.seed),
        Command::Counterexample(a) => counterexample(a),
        Command::DensityProbe(a) => density(a, cli.seed),
    }?;
    if let Value::Object(m) = &mut out.result {
        m.insert("seed".into(), json!(cli.seed));
    }
    Ok(out)
}

/// JSON number, with infinities written as strings.
fn lv(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Inline JSON (starting with `{` or `[`) or a path to a JSON file.
fn load<T: DeserializeOwned>(what: &str, src: &str) -> CliResult<T> {
    let t = src.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        src.to_string()
    } else {
        fs::read_to_string(src).map_err(|e| CliError::Validation(format!("{what} {src}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

fn direction(d: DirectionArg) -> Direction {
    match d {
        DirectionArg::Backward => Direction::Backward,
        DirectionArg::RightInverse => Direction::RightInverse,
        DirectionArg::AdjointForward => Direction::AdjointForward,
    }
}

fn operator(src: &str, dir: Option<DirectionArg>) -> CliResult<ShiftOperator> {
    let spec: OperatorSpec = load("operator spec", src)?;
    let op = spec.build()?;
    Ok(match dir {
        Some(d) => op.with_direction(direction(d)),
        None => op,
    })
}

fn weight_seq(src: &str) -> CliResult<WeightSequence> {
    let spec: WeightSpec = load("weight spec", src)?;
    Ok(spec.build()?)
}

fn pair(p: &PairArgs, dir: Option<DirectionArg>) -> CliResult<TensorOperator> {
    let t = TensorOperator::new(operator(&p.left, None)?, operator(&p.right, None)?)?;
    Ok(match dir {
        Some(d) => t.with_direction(direction(d)),
        None => t,
    })
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} must be positive, got {x}")))
    }
}

fn coeff_series(v: &CoeffVector) -> Series {
    let mut s = Series::new(vec!["m", "logmag", "phase"]);
    for (m, c) in v.iter() {
        s.push([m.to_string(), num(c.logmag()), num(c.phase())]);
    }
    s
}

fn tensor_series(w: &TensorVector) -> Series {
    let mut s = Series::new(vec!["row", "m", "n", "logmag", "phase"]);
    for (i, ((m, n), c)) in w.iter().enumerate() {
        s.push([i.to_string(), m.to_string(), n.to_string(), num(c.logmag()), num(c.phase())]);
    }
    s
}

fn weights(a: &WeightsArgs) -> CliResult<CommandOutput> {
    let w = weight_seq(&a.weights)?;
    let start = w.domain_start();
    let end = w.domain_end().map_or(start + a.n, |e| (e + 1).min(start + a.n));
    let mut rows = Vec::new();
    let mut s = Series::new(vec!["m", "log_weight", "log_action_weight"]);
    for m in start..end {
        let lw = w.log_weight(m)?;
        let la = if m > w.offset_p() { w.log_action_weight(m).ok() } else { None };
        rows.push(json!({"m": m, "log_weight": lw, "log_action_weight": la}));
        s.push([m.to_string(), num(lw), la.map(num).unwrap_or_default()]);
    }
    Ok(CommandOutput {
        result: json!({
            "command": "weights",
            "family": w.family_name(),
            "offset_p": w.offset_p(),
            "rows": rows,
        }),
        series: Some(s),
    })
}

fn basis_eval(a: &BasisArgs) -> CliResult<CommandOutput> {
    let basis = match a.space {
        Space::Bargmann => Basis::Bargmann { p: a.p },
        Space::Theta => Basis::Theta(ThetaParams::new(a.nu, a.alpha, a.p)?),
    };
    let vector: Option<CoeffVector> = a.vector.as_deref().map(|s| load("vector", s)).transpose()?;
    let mut rows = Vec::new();
    let mut s = Series::new(vec!["row", "m", "z_re", "z_im", "logmag", "phase"]);
    let mut synth = Vec::new();
    for &(x, y) in &a.z {
        let z = Complex64::new(x, y);
        for &m in &a.index {
            if m < basis.offset_p() {
                return Err(CliError::Validation(format!(
                    "basis index {m} is below the offset {}",
                    basis.offset_p()
                )));
            }
            let v = basis.eval(m, z);
            s.push([
                rows.len().to_string(),
                m.to_string(),
                num(x),
                num(y),
                num(v.logmag()),
                num(v.phase()),
            ]);
            rows.push(json!({"m": m, "z": [x, y], "value": v}));
        }
        if let Some(v) = &vector {
            synth.push(json!({"z": [x, y], "value": v.synth(z, &basis)}));
        }
    }
    Ok(CommandOutput {
        result: json!({"command": "basis eval", "rows": rows, "synth": synth}),
        series: Some(s),
    })
}

fn op_vector(op: &ShiftOperator, src: &Option<String>) -> CliResult<CoeffVector> {
    match src {
        Some(s) => load("vector", s),
        None => Ok(CoeffVector::unit(op.offset_p(), op.offset_p() + 3)?),
    }
}

fn op(c: &OpCmd) -> CliResult<CommandOutput> {
    let (args, name) = match c {
        OpCmd::Apply(a) => (a, "op apply"),
        OpCmd::Power { op, .. } => (op, "op power"),
        OpCmd::Matrix { op, .. } => (op, "op matrix"),
    };
    let shift = operator(&args.weights, args.direction)?;
    if let OpCmd::Matrix { n_max, .. } = c {
        let trip = shift.matrix(*n_max)?;
        let mut s = Series::new(vec!["col", "row", "logweight"]);
        for t in &trip {
            s.push([t.col.to_string(), t.row.to_string(), num(t.logweight)]);
        }
        return Ok(CommandOutput {
            result: json!({"command": name, "direction": shift.direction(), "triplets": to_value(&trip)?}),
            series: Some(s),
        });
    }
    let v = op_vector(&shift, &args.vector)?;
    let k = match c {
        OpCmd::Power { k, .. } => *k,
        _ => 1,
    };
    let w = shift.apply_power(&v, k)?;
    Ok(CommandOutput {
        result: json!({
            "command": name,
            "direction": shift.direction(),
            "k": k,
            "input": v,
            "output": w,
            "log_norm": lv(w.log_norm()),
        }),
        series: Some(coeff_series(&w)),
    })
}

fn tensor_vector(t: &TensorOperator, src: &Option<String>) -> CliResult<TensorVector> {
    let (p1, p2) = t.offsets();
    match src {
        Some(s) => load("tensor vector", s),
        None => Ok(TensorVector::unit(p1, p2, p1 + 2, p2 + 2)?),
    }
}

fn tensor(c: &TensorCmd) -> CliResult<CommandOutput> {
    let args = match c {
        TensorCmd::Apply(a) => a,
        TensorCmd::Power { t, .. } | TensorCmd::Inner { t, .. } => t,
    };
    let op = pair(&args.pair, args.direction)?;
    let w = tensor_vector(&op, &args.vector)?;
    match c {
        TensorCmd::Inner { vector2, .. } => {
            let w2 = tensor_vector(&op, vector2)?;
            let ip = w.inner(&w2)?;
            let mut s = Series::new(vec!["row", "quantity", "logmag", "phase"]);
            s.push(["0".into(), "inner".into(), num(ip.logmag()), num(ip.phase())]);
            Ok(CommandOutput {
                result: json!({"command": "tensor inner", "inner": ip, "log_norm_1": lv(w.log_norm()), "log_norm_2": lv(w2.log_norm())}),
                series: Some(s),
            })
        }
        _ => {
            let k = match c {
                TensorCmd::Power { k, .. } => *k,
                _ => 1,
            };
            let out = op.apply_power(&w, k)?;
            Ok(CommandOutput {
                result: json!({
                    "command": if k == 1 { "tensor apply" } else { "tensor power" },
                    "direction": op.direction(),
                    "k": k,
                    "input": w,
                    "output": out,
                    "log_norm": lv(out.log_norm()),
                }),
                series: Some(tensor_series(&out)),
            })
        }
    }
}

fn criterion(a: &CriterionArgs) -> CliResult<CommandOutput> {
    if a.n == 0 {
        return Err(CliError::Validation("N must be at least 1".into()));
    }
    let w1 = weight_seq(&a.weights)?;
    let report = match &a.weights2 {
        Some(s) => tensor_salas_scan(&w1, &weight_seq(s)?, a.n, a.threshold)?,
        None => salas_scan(&w1, a.n, a.threshold)?,
    };
    let mut s = Series::new(vec!["n", "partial_log_product"]);
    for (i, x) in report.partial_log_products.iter().enumerate() {
        s.push([(i + 1).to_string(), num(*x)]);
    }
    let mut result = to_value(&report)?;
    result["command"] = json!("criterion");
    Ok(CommandOutput { result, series: Some(s) })
}

fn eigen(a: &EigenArgs) -> CliResult<CommandOutput> {
    let t = pair(&a.pair, None)?;
    let lambda = LogComplex::from_cartesian(a.lambda.0, a.lambda.1);
    let mu = LogComplex::from_cartesian(a.mu.0, a.mu.1);
    let (g, spec) = eigenvector_build(&t, lambda, mu, a.tail)?;
    let residual = relative_residual_log(&t, &g, 1, lambda * mu)?;
    let mut s = Series::new(vec!["k", "log_norm"]);
    let mut v = g.clone();
    for k in 0..=8 {
        s.push([k.to_string(), num(v.log_norm())]);
        v = t.apply(&v)?;
    }
    Ok(CommandOutput {
        result: json!({
            "command": "eigen",
            "spec": spec,
            "log_norm": lv(g.log_norm()),
            "relative_residual_log": lv(residual),
            "g": g,
        }),
        series: Some(s),
    })
}

fn periodic(a: &PeriodicArgs) -> CliResult<CommandOutput> {
    if a.q == 0 {
        return Err(CliError::Validation("q must be at least 1".into()));
    }
    if let Some(src) = &a.target {
        let op = operator(&a.pair.left, None)?;
        let y: CoeffVector = load("target", src)?;
        let built = periodic_from_target(&op, &y, a.q, a.tail)?;
        let mut s = Series::new(vec!["k", "log_residual"]);
        for k in 1..=2 * a.q {
            let r = op.apply_power(&built.x, k)?.sub(&built.x)?;
            s.push([k.to_string(), num(r.log_norm())]);
        }
        return Ok(CommandOutput {
            result: json!({
                "command": "periodic",
                "mode": "target",
                "q": a.q,
                "blocks": built.blocks,
                "tail_log_bound": lv(built.tail_log_bound),
                "log_distance": lv(built.x.sub(&y)?.log_norm()),
                "x": built.x,
            }),
            series: Some(s),
        });
    }
    let t = pair(&a.pair, None)?;
    let (g, spec) = periodic_point_from_eigen(&t, a.q, a.tail)?;
    let mut s = Series::new(vec!["k", "relative_residual_log"]);
    let mut residuals = Vec::new();
    for k in 1..=2 * a.q {
        let r = relative_residual_log(&t, &g, k, LogComplex::ONE)?;
        s.push([k.to_string(), num(r)]);
        residuals.push(lv(r));
    }
    Ok(CommandOutput {
        result: json!({
            "command": "periodic",
            "mode": "eigen",
            "q": a.q,
            "spec": spec,
            "relative_residual_log": residuals,
            "g": g,
        }),
        series: Some(s),
    })
}

/// Random finite-support coefficient vectors.
fn random_targets(rng: &mut ChaCha8Rng, p: usize, count: usize, support: usize, max_excess: usize) -> CliResult<Vec<CoeffVector>> {
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=support.max(1));
            let entries: Vec<(usize, LogComplex)> = (0..k)
                .map(|_| {
                    let m = p + rng.gen_range(0..=max_excess);
                    let c = LogComplex::from_cartesian(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    (m, c)
                })
                .collect();
            Ok(CoeffVector::from_entries(p, entries)?)
        })
        .collect()
}

fn hypercyclic(a: &HypercyclicArgs, seed: u64) -> CliResult<CommandOutput> {
    positive("eps", a.eps)?;
    let op = operator(&a.weights, None)?;
    let targets: Vec<CoeffVector> = match &a.targets {
        Some(src) => load("targets", src)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_targets(&mut rng, op.offset_p(), a.random_targets, a.support, 6)?
        }
    };
    let built = hypercyclic_vector_build(&op, &targets, a.eps)?;
    let last = *built.schedule.last().unwrap_or(&0);
    let trace = orbit(&op, &built.psi, last)?;
    let mut hits = Vec::new();
    for (y, &n) in targets.iter().zip(&built.schedule) {
        let d = match trace.at(n) {
            Some(v) => v.sub(y)?.log_norm(),
            None => y.log_norm(),
        };
        hits.push(json!({"n": n, "log_distance": lv(d), "within_eps": d <= a.eps.ln()}));
    }
    let mut s = Series::new(vec!["k", "log_norm"]);
    for st in &trace.iterates {
        s.push([st.k.to_string(), num(st.log_norm)]);
    }
    Ok(CommandOutput {
        result: json!({
            "command": "hypercyclic",
            "eps": a.eps,
            "schedule": built.schedule,
            "targets": targets,
            "replay": hits,
            "psi": built.psi,
        }),
        series: Some(s),
    })
}

fn counterexample(a: &CounterexampleArgs) -> CliResult<CommandOutput> {
    if a.n == 0 {
        return Err(CliError::Validation("N must be at least 1".into()));
    }
    let r = counterexample_scan(a.n, a.threshold)?;
    let mut s = Series::new(vec!["n", "omega", "varpi", "product"]);
    for i in 0..r.product.partial_log_products.len() {
        s.push([
            (i + 1).to_string(),
            num(r.omega.partial_log_products[i]),
            num(r.varpi.partial_log_products[i]),
            num(r.product.partial_log_products[i]),
        ]);
    }
    let mut result = to_value(&r)?;
    result["command"] = json!("counterexample");
    Ok(CommandOutput { result, series: Some(s) })
}

fn density(a: &DensityArgs, seed: u64) -> CliResult<CommandOutput> {
    let op = operator(&a.weights, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets = random_targets(&mut rng, op.offset_p(), a.targets, a.support, a.max_index)?;
    let records = density_probe(&op, &targets, &a.q, a.tail)?;
    let mut s = Series::new(vec!["row", "target", "q", "log_distance", "log_residual"]);
    for (i, r) in records.iter().enumerate() {
        s.push([
            i.to_string(),
            r.target.to_string(),
            r.q.to_string(),
            num(r.log_distance),
            num(r.log_residual),
        ]);
    }
    Ok(CommandOutput {
        result: json!({
            "command": "density-probe",
            "targets": targets,
            "records": to_value(&records)?,
        }),
        series: Some(s),
    })
}
