//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage, 3 domain error, 4 numerical failure.

mod commands;
pub mod output;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::Value;

use crate::bounds_engine::BoundsError;
use crate::form_resolvent::ResolventError;
use crate::orbit_geometry::OrbitError;
use crate::scalar_green::GreenError;
use crate::space_constants::{ConstantsError, Field};

pub use output::Envelope;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hypspec", version, about = "Spectral constants, bounds, kernels and critical exponents on rank-one hyperbolic spaces")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Reserved for commands that sample; none currently do.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bottom of the continuous spectrum on p-forms.
    Alpha(AlphaArgs),
    /// Spectral lower bounds on a quotient with critical exponent delta.
    Bounds(BoundsArgs),
    /// Scalar resolvent kernel on a radial grid.
    Green(GreenArgs),
    /// Form-valued resolvent kernel on real hyperbolic space.
    Resolvent(ResolventArgs),
    /// Critical exponent of a group read from a JSON file.
    Delta(DeltaArgs),
}

#[derive(Debug, Args)]
pub struct AlphaArgs {
    /// R, C, H or O.
    #[arg(long)]
    pub field: Field,
    #[arg(long)]
    pub n: i64,
    /// First degree (default 0).
    #[arg(long)]
    pub p_min: Option<i64>,
    /// Last degree (default the real dimension).
    #[arg(long)]
    pub p_max: Option<i64>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub field: Field,
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub p: i64,
    #[arg(long)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[arg(long)]
    pub field: Field,
    #[arg(long)]
    pub n: i64,
    /// Spectral parameter, e.g. `1`, `2+1i`.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Complex64,
    /// Radii as `start:stop:count`.
    #[arg(long, default_value = "0.1:10:100")]
    pub r: GridSpec,
    /// Space the grid geometrically.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// Resolve exact resonances with logarithmic terms.
    LogTerms,
    /// Treat every resonance as an error.
    Reject,
}

#[derive(Debug, Args)]
pub struct ResolventArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Complex64,
    /// Branch signs of the square roots, e.g. `-` or `+,-`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub signs: BranchSigns,
    /// Truncation order of the Frobenius series.
    #[arg(long, default_value_t = 40)]
    pub order: usize,
    /// Evaluation radii as `start:stop:count`.
    #[arg(long, default_value = "2:8:13")]
    pub t: GridSpec,
    #[arg(long)]
    pub log: bool,
    /// Window for the exponential decay fit.
    #[arg(long, default_value = "8:16:9")]
    pub fit: GridSpec,
    #[arg(long, value_enum, default_value_t = PolicyArg::LogTerms)]
    pub policy: PolicyArg,
    /// Integrate to the origin and report the singular coefficient.
    #[arg(long)]
    pub psi: bool,
    /// Inner radius of the singularity fit.
    #[arg(long, default_value_t = 1e-3)]
    pub t0: f64,
    /// Radius at which the inward integration starts.
    #[arg(long, default_value_t = 2.0)]
    pub t_start: f64,
    /// Scan real s over `start:stop:count` for resonances instead of evaluating.
    #[arg(long)]
    pub scan: Option<GridSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DedupArg {
    FreeReduction,
    MatrixHash,
}

#[derive(Debug, Args)]
pub struct DeltaArgs {
    /// Group definition file.
    pub group_file: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub max_len: usize,
    #[arg(long, value_enum, default_value_t = DedupArg::FreeReduction)]
    pub dedup: DedupArg,
    /// Comma separated coordinates; overrides the file's base point.
    #[arg(long, allow_hyphen_values = true)]
    pub base_point: Option<PointArg>,
}

/// `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid {s:?} is not start:stop:count"));
        }
        let f = |x: &str| x.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("bad number {x:?} in grid"));
        let count = parts[2].trim().parse::<usize>().map_err(|_| format!("bad count {:?} in grid", parts[2]))?;
        if count == 0 {
            return Err("grid count must be positive".into());
        }
        Ok(GridSpec { start: f(parts[0])?, stop: f(parts[1])?, count })
    }
}

impl GridSpec {
    pub fn points(&self, log: bool) -> Result<Vec<f64>, String> {
        if log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err("a logarithmic grid needs positive endpoints".into());
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let m = (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| {
                let u = i as f64 / m;
                if log {
                    (self.start.ln() + u * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + u * (self.stop - self.start)
                }
            })
            .collect())
    }

    fn describe(&self) -> String {
        format!("{}:{}:{}", self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BranchSigns(pub Vec<i8>);

impl FromStr for BranchSigns {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(format!("branch sign {other:?} is not + or -")),
            })
            .collect::<Result<_, _>>()
            .map(BranchSigns)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointArg(pub Vec<Complex64>);

impl FromStr for PointArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|x| x.trim().parse::<Complex64>().map_err(|_| format!("bad coordinate {x:?}")))
            .collect::<Result<_, _>>()
            .map(PointArg)
    }
}

/// A failed command: exit code, a short kind tag and the message.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
    pub details: Value,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, kind: "UsageError".into(), message: message.into(), details: Value::Null }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        CliError { code: EXIT_DOMAIN, kind: "DomainError".into(), message: message.into(), details: Value::Null }
    }

    fn new(code: i32, kind: &str, message: String) -> Self {
        CliError { code, kind: kind.into(), message, details: Value::Null }
    }

    pub fn to_json(&self, command: &str) -> String {
        let mut error = serde_json::Map::new();
        error.insert("kind".into(), Value::String(self.kind.clone()));
        error.insert("message".into(), Value::String(self.message.clone()));
        if !self.details.is_null() {
            error.insert("details".into(), self.details.clone());
        }
        let v = output::obj([
            ("command", Value::String(command.into())),
            ("version", Value::String(output::VERSION.into())),
            ("exit_code", Value::from(self.code)),
            ("error", Value::Object(error)),
        ]);
        serde_json::to_string_pretty(&v).expect("error serializes") + "\n"
    }
}

impl From<ConstantsError> for CliError {
    fn from(e: ConstantsError) -> Self {
        CliError::new(EXIT_DOMAIN, "ConstantsError", e.to_string())
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        CliError::new(EXIT_DOMAIN, "BoundsError", e.to_string())
    }
}

impl From<GreenError> for CliError {
    fn from(e: GreenError) -> Self {
        let (code, kind) = match &e {
            GreenError::PoleOfGamma(_) => (EXIT_DOMAIN, "PoleOfGamma"),
            GreenError::DomainError(_) => (EXIT_DOMAIN, "DomainError"),
            GreenError::NoConvergence { .. } => (EXIT_NUMERICAL, "NoConvergence"),
            GreenError::DegenerateFit(_) => (EXIT_NUMERICAL, "DegenerateFit"),
        };
        CliError::new(code, kind, e.to_string())
    }
}

impl From<ResolventError> for CliError {
    fn from(e: ResolventError) -> Self {
        use ResolventError as R;
        let (code, kind) = match &e {
            R::NotImplemented(_) => (EXIT_DOMAIN, "NotImplemented"),
            R::InvalidDegree(_) => (EXIT_DOMAIN, "InvalidInput"),
            R::BranchPoint { .. } => (EXIT_DOMAIN, "BranchPoint"),
            R::AssemblyMismatch(_) => (EXIT_NUMERICAL, "AssemblyMismatch"),
            R::ResonanceDetected { .. } => (EXIT_NUMERICAL, "ResonanceDetected"),
            R::TailBoundExceeded { .. } => (EXIT_NUMERICAL, "TailBoundExceeded"),
            R::StiffIntegration(_) => (EXIT_NUMERICAL, "StiffIntegration"),
            R::FitFailure(_) => (EXIT_NUMERICAL, "FitFailure"),
            R::DegenerateFit(_) => (EXIT_NUMERICAL, "DegenerateFit"),
        };
        let mut err = CliError::new(code, kind, e.to_string());
        if let R::ResonanceDetected { s, block, l, target, margin } = e {
            err.details = output::obj([
                ("s", output::cnum(s)),
                ("block", Value::from(block)),
                ("step", Value::from(l)),
                ("target", Value::from(target)),
                ("margin", output::num(margin)),
            ]);
        }
        err
    }
}

impl From<OrbitError> for CliError {
    fn from(e: OrbitError) -> Self {
        match e {
            OrbitError::Green(g) => g.into(),
            OrbitError::ParseError(_) => CliError::new(EXIT_USAGE, "ParseError", e.to_string()),
            OrbitError::DegenerateFit(_) => CliError::new(EXIT_NUMERICAL, "DegenerateFit", e.to_string()),
            OrbitError::CombinatorialBlowup { .. } => CliError::new(EXIT_DOMAIN, "CombinatorialBlowup", e.to_string()),
            OrbitError::InvalidGenerator(_) => CliError::new(EXIT_DOMAIN, "InvalidGenerator", e.to_string()),
            OrbitError::DomainError(_) => CliError::new(EXIT_DOMAIN, "DomainError", e.to_string()),
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Alpha(_) => "alpha",
        Command::Bounds(_) => "bounds",
        Command::Green(_) => "green",
        Command::Resolvent(_) => "resolvent",
        Command::Delta(_) => "delta",
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<Envelope, CliError> {
    let mut env = match &cli.command {
        Command::Alpha(a) => commands::alpha(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Green(a) => commands::green(a),
        Command::Resolvent(a) => commands::resolvent(a),
        Command::Delta(a) => commands::delta(a),
    }?;
    env.param("seed", cli.seed.map_or(Value::Null, Value::from));
    Ok(env)
}

/// Parses `args`, runs the command and prints the result; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let name = command_name(&cli.command);
    match execute(&cli) {
        Ok(env) => {
            print!("{}", env.render(cli.format));
            0
        }
        Err(err) => {
            if cli.format == Format::Json {
                print!("{}", err.to_json(name));
            }
            eprintln!("hypspec {name}: {}", err.message);
            err.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "0.1:10:100".parse().unwrap();
        let lin = g.points(false).unwrap();
        let log = g.points(true).unwrap();
        assert_eq!((lin.len(), log.len()), (100, 100));
        assert_eq!(lin[0], 0.1);
        assert!((lin[99] - 10.0).abs() < 1e-12 && (log[99] - 10.0).abs() < 1e-12);
        assert!((log[1] / log[0] - log[2] / log[1]).abs() < 1e-12);
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("1:2:0".parse::<GridSpec>().is_err());
        assert!("a:2:3".parse::<GridSpec>().is_err());
        assert!("-1:2:3".parse::<GridSpec>().unwrap().points(true).is_err());
        assert_eq!("3:4:1".parse::<GridSpec>().unwrap().points(false).unwrap(), vec![3.0]);
    }

    #[test]
    fn sign_and_point_parsing() {
        assert_eq!("+,-".parse::<BranchSigns>().unwrap().0, vec![1, -1]);
        assert_eq!("".parse::<BranchSigns>().unwrap().0, Vec::<i8>::new());
        assert!("x".parse::<BranchSigns>().is_err());
        let p: PointArg = "0, 0.5i, 1".parse().unwrap();
        assert_eq!(p.0[1], Complex64::new(0.0, 0.5));
    }

    fn run(args: &[&str]) -> Result<Envelope, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("hypspec").chain(args.iter().copied())).unwrap();
        execute(&cli)
    }

    fn cell(env: &Envelope, row: usize, col: &str) -> Value {
        env.rows[row][col].clone()
    }

    #[test]
    fn usage_errors_exit_two() {
        for args in [
            &["hypspec", "alpha", "--field", "X", "--n", "2"][..],
            &["hypspec", "green", "--field", "R", "--n", "3", "--s", "1", "--r", "1:2"],
            &["hypspec", "bounds", "--field", "R"],
        ] {
            assert_eq!(Cli::try_parse_from(args).unwrap_err().exit_code(), EXIT_USAGE);
        }
    }

    #[test]
    fn alpha_examples() {
        let h = run(&["alpha", "--field", "H", "--n", "2"]).unwrap();
        let row = h.rows.iter().find(|r| r["p"] == 1).unwrap();
        assert_eq!(row["alpha"], "17");
        let r = run(&["alpha", "--field", "R", "--n", "3"]).unwrap();
        assert_eq!(r.rows.iter().find(|r| r["p"] == 1).unwrap()["alpha"], "0");
        let o = run(&["alpha", "--field", "O", "--n", "2"]).unwrap();
        assert_eq!(o.rows.iter().find(|r| r["p"] == 2).unwrap()["status"], "unknown");
    }

    #[test]
    fn bounds_examples() {
        let f = |args: &[&str], col: &str| cell(&run(args).unwrap(), 0, col).as_f64().unwrap();
        assert_eq!(f(&["bounds", "--field", "C", "--n", "2", "--p", "1", "--delta", "2.5"], "theorem_b"), 0.75);
        assert_eq!(f(&["bounds", "--field", "R", "--n", "5", "--p", "1", "--delta", "2"], "difference"), 1.0);
        assert_eq!(f(&["bounds", "--field", "C", "--n", "3", "--p", "2", "--delta", "3"], "difference"), 8.0);
        assert_eq!(run(&["bounds", "--field", "R", "--n", "5", "--p", "1", "--delta", "9"]).unwrap_err().code, EXIT_DOMAIN);
    }

    #[test]
    fn green_and_resolvent() {
        let g = run(&["green", "--field", "R", "--n", "3", "--s", "1", "--r", "1:1:1"]).unwrap();
        assert!((cell(&g, 0, "re_g0").as_f64().unwrap() - 0.024_91).abs() < 1e-5);
        assert_eq!(run(&["green", "--field", "R", "--n", "3", "--s", "1", "--r", "0:1:2"]).unwrap_err().code, EXIT_DOMAIN);
        let strict = run(&["resolvent", "--n", "5", "--p", "1", "--s", "1", "--policy", "reject"]).unwrap_err();
        assert_eq!((strict.code, strict.kind.as_str()), (EXIT_NUMERICAL, "ResonanceDetected"));
        let ok = run(&["resolvent", "--n", "3", "--p", "1", "--s", "1"]).unwrap();
        let rate = ok.summary.as_ref().unwrap()["decay_fit"]["rate"].as_f64().unwrap();
        assert!((rate - 2.0).abs() < 1e-2);
    }
}
