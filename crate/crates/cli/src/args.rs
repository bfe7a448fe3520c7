use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "shiftdyn", version, about = "Weighted shift dynamics experiments")]
pub struct Cli {
    /// Output file, or `json` / `csv` to print to stdout in that format.
    #[arg(long, global = true)]
    pub out: Option<String>,

    /// Output format when writing to a file (default: from the extension).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for randomized flows.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum DirectionArg {
    Backward,
    RightInverse,
    AdjointForward,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Tabulate a weight sequence.
    Weights(WeightsArgs),
    /// Evaluate basis functions.
    #[command(subcommand)]
    Basis(BasisCmd),
    /// Apply a single-space shift.
    #[command(subcommand)]
    Op(OpCmd),
    /// Apply a tensor shift or pair tensor vectors.
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Salas partial-product scan (tensor scan with `--weights2`).
    Criterion(CriterionArgs),
    /// Build a truncated eigenvector of a tensor shift.
    Eigen(EigenArgs),
    /// Build a periodic point.
    Periodic(PeriodicArgs),
    /// Build a vector whose orbit visits given targets.
    Hypercyclic(HypercyclicArgs),
    /// Block-pattern pair whose tensor product fails the criterion.
    Counterexample(CounterexampleArgs),
    /// Periodic approximations of random targets.
    DensityProbe(DensityArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct WeightsArgs {
    /// Weight spec: JSON text or a path to a JSON file.
    #[arg(long, default_value = r#"{"family":"bargmann_composite","p":0}"#)]
    pub weights: String,
    /// Number of entries.
    #[arg(short = 'N', default_value_t = 20)]
    pub n: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisCmd {
    Eval(BasisArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Bargmann,
    Theta,
}

#[derive(Args, Debug, Serialize)]
pub struct BasisArgs {
    #[arg(long, value_enum, default_value_t = Space::Bargmann)]
    pub space: Space,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub p: usize,
    /// Basis indices, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 3, 4])]
    pub index: Vec<usize>,
    /// Evaluation points `re,im`; repeat the flag for more.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_values = ["0.3,0.2"])]
    pub z: Vec<(f64, f64)>,
    /// Coefficient vector to synthesize at each point.
    #[arg(long)]
    pub vector: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct OpArgs {
    /// Operator spec: weight spec JSON plus optional `direction`.
    #[arg(long, default_value = r#"{"family":"theta_composite","nu":3.141592653589793,"alpha":0,"p":0}"#)]
    pub weights: String,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Coefficient vector JSON (default: the unit vector at `p + 3`).
    #[arg(long)]
    pub vector: Option<String>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpCmd {
    Apply(OpArgs),
    Power {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    Matrix {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct PairArgs {
    #[arg(long, default_value = r#"{"family":"theta_composite","nu":3.141592653589793,"alpha":0,"p":0}"#)]
    pub left: String,
    #[arg(long, default_value = r#"{"family":"bargmann_composite","p":0}"#)]
    pub right: String,
}

#[derive(Args, Debug, Serialize)]
pub struct TensorArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    /// Tensor vector JSON (default: the unit vector at `(p1 + 2, p2 + 2)`).
    #[arg(long)]
    pub vector: Option<String>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TensorCmd {
    Apply(TensorArgs),
    Power {
        #[command(flatten)]
        t: TensorArgs,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    Inner {
        #[command(flatten)]
        t: TensorArgs,
        #[arg(long)]
        vector2: Option<String>,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct CriterionArgs {
    #[arg(long, default_value = r#"{"family":"bargmann_raw","p":0}"#)]
    pub weights: String,
    #[arg(long)]
    pub weights2: Option<String>,
    #[arg(short = 'N', default_value_t = shiftdyn_core::criteria::DEFAULT_HORIZON)]
    pub n: usize,
    #[arg(long, default_value_t = shiftdyn_core::criteria::DEFAULT_THRESHOLD, allow_hyphen_values = true)]
    pub threshold: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct EigenArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.5,0")]
    pub lambda: (f64, f64),
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1,0")]
    pub mu: (f64, f64),
    /// Target log-norm of the certified tail.
    #[arg(long, default_value_t = -60.0, allow_hyphen_values = true)]
    pub tail: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct PeriodicArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value_t = 4)]
    pub q: usize,
    #[arg(long, default_value_t = -60.0, allow_hyphen_values = true)]
    pub tail: f64,
    /// Approximate this coefficient vector instead, using the `--left` shift.
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct HypercyclicArgs {
    #[arg(long, default_value = r#"{"family":"bargmann_composite","p":0}"#)]
    pub weights: String,
    /// JSON list of coefficient vectors; random targets when absent.
    #[arg(long)]
    pub targets: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub random_targets: usize,
    #[arg(long, default_value_t = 4)]
    pub support: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct CounterexampleArgs {
    #[arg(short = 'N', default_value_t = shiftdyn_core::criteria::DEFAULT_HORIZON)]
    pub n: usize,
    #[arg(long, default_value_t = shiftdyn_core::criteria::DEFAULT_THRESHOLD, allow_hyphen_values = true)]
    pub threshold: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(long, default_value = r#"{"family":"bargmann_composite","p":0}"#)]
    pub weights: String,
    #[arg(long, default_value_t = 5)]
    pub targets: usize,
    #[arg(long, default_value_t = 3)]
    pub support: usize,
    #[arg(long, default_value_t = 6)]
    pub max_index: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
    pub q: Vec<usize>,
    #[arg(long, default_value_t = -60.0, allow_hyphen_values = true)]
    pub tail: f64,
}

fn parse_complex(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').unwrap_or((s, "0"));
    let re = a.trim().parse::<f64>().map_err(|e| format!("real part {a:?}: {e}"))?;
    let im = b.trim().parse::<f64>().map_err(|e| format!("imaginary part {b:?}: {e}"))?;
    if !re.is_finite() || !im.is_finite() {
        return Err("complex value must be finite".into());
    }
    Ok((re, im))
}
