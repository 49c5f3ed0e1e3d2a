//! Command-line front end. Every command prints one JSON object, except the
//! tabular `identity` and `compare` commands which print CSV by default.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::asymptotics::{proposition1_coefficient, theorem1_coefficient};
use crate::ball_geometry::{
    intersection_volume_closed, intersection_volume_mc, intersection_volume_polynomial,
    intersection_volume_special, BallConfiguration, DomainSpec, MIN_ORACLE_SAMPLES,
};
use crate::ec_heuristic::{ec_densities, ec_prediction, ec_volume_term_coefficient, identity_check};
use crate::error::{Error, Result};
use crate::mc_sim::{
    compare_asymptotic, estimate_conjunction_probability, estimate_pickands, PickandsPlan,
    SimulationPlan, MAX_GRID_STEP, MIN_REPLICATES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "conjprob", version, about = "Conjunction probabilities of smooth stationary Gaussian fields")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for stochastic commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for Monte Carlo commands (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Leading asymptotic constant for n fields in dimension d.
    Coeff {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Volume of the feasible ball-centre set.
    Volume {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        radii: String,
    },
    /// Closed-form volume against its Monte Carlo estimate.
    Oracle {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        radii: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Euler-characteristic prediction over an interval, box or ball.
    Ec {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        #[arg(long)]
        sides: Option<String>,
        #[arg(long)]
        radii: Option<String>,
    },
    /// Leading-order asymptotic probability.
    Asym {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        #[arg(long)]
        sides: Option<String>,
        #[arg(long)]
        radii: Option<String>,
    },
    /// Relative gap between the asymptotic constant and the EC volume term.
    Identity {
        #[arg(long = "n-max")]
        n_max: usize,
        #[arg(long = "d-max")]
        d_max: usize,
    },
    /// Generalised Pickands constant by simulation.
    Pickands {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.02)]
        a: f64,
        #[arg(long = "t-max", default_value_t = 12.0)]
        t_max: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Empirical conjunction probability on a grid.
    Simulate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sides: String,
        #[arg(long = "grid-step", default_value_t = 0.02)]
        grid_step: f64,
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        #[arg(long, default_value_t = 10_000)]
        replicates: u64,
    },
    /// Empirical probability against the asymptotic for several thresholds.
    Compare {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sides: String,
        #[arg(long = "grid-step", default_value_t = 0.02)]
        grid_step: f64,
        #[arg(long = "u-grid")]
        u_grid: String,
        #[arg(long, default_value_t = 10_000)]
        replicates: u64,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match run(&config) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome {
            code: if matches!(e, Error::Validation { .. }) { 2 } else { 1 },
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Runs a parsed configuration and returns the serialized result.
pub fn run(config: &RunConfig) -> Result<String> {
    let tabular = matches!(config.command, Command::Identity { .. } | Command::Compare { .. });
    let format = match (config.format, tabular) {
        (Some(OutputFormat::Csv), false) => {
            return Err(invalid("format", "csv output is only available for identity and compare"))
        }
        (Some(f), _) => f,
        (None, true) => OutputFormat::Csv,
        (None, false) => OutputFormat::Json,
    };
    let seed = config.seed;
    let workers = match config.workers {
        Some(0) => return Err(invalid("workers", "must be at least 1")),
        w => w,
    };

    let value = match &config.command {
        Command::Coeff { n, d } => {
            check_dims(*n, *d)?;
            let c = theorem1_coefficient(*n, *d)?;
            json!({
                "command": "coeff",
                "n": n,
                "d": d,
                "leading_constant": sig(c.leading_constant),
                "u_power": c.power_of_u,
                "phi_power": c.phi_power,
            })
        }
        Command::Volume { d, radii } => {
            let config = ball_config(*d, radii)?;
            let closed = intersection_volume_closed(&config)?;
            let special = match intersection_volume_special(&config) {
                Ok(v) => sig(v),
                Err(Error::Unsupported(_)) => Value::Null,
                Err(e) => return Err(e),
            };
            json!({
                "command": "volume",
                "d": d,
                "radii": sig_list(config.radii()),
                "closed_form": sig(closed),
                "special_form": special,
            })
        }
        Command::Oracle { d, radii, samples } => {
            let config = ball_config(*d, radii)?;
            if *samples < MIN_ORACLE_SAMPLES {
                return Err(invalid("samples", format!("must be at least {MIN_ORACLE_SAMPLES}")));
            }
            let closed = intersection_volume_closed(&config)?;
            let est = intersection_volume_mc(&config, *samples, seed, workers)?;
            let z = if est.std_error > 0.0 { (est.mean - closed) / est.std_error } else { f64::NAN };
            json!({
                "command": "oracle",
                "d": d,
                "radii": sig_list(config.radii()),
                "closed_form": sig(closed),
                "mc_mean": sig(est.mean),
                "std_error": sig(est.std_error),
                "samples": est.samples,
                "seed": est.seed,
                "z_score": sig(z),
            })
        }
        Command::Ec { n, d, u, sides, radii } => {
            check_n(*n)?;
            let domain = domain_from_flags(*d, sides.as_deref(), radii.as_deref())?;
            let d = domain.dim();
            let prediction = ec_prediction(*n, d, *u, &domain)?;
            json!({
                "command": "ec",
                "n": n,
                "d": d,
                "u": sig(*u),
                "domain": serde_json::to_value(&domain.kind).expect("serializable domain"),
                "minkowski": sig_list(&domain.minkowski),
                "densities": sig_list(&ec_densities(d, *u).rho),
                "prediction": sig(prediction),
            })
        }
        Command::Asym { n, d, u, sides, radii } => {
            check_n(*n)?;
            if !(*u > 0.0) {
                return Err(invalid("u", "must be positive"));
            }
            let domain = domain_from_flags(*d, sides.as_deref(), radii.as_deref())?;
            let d = domain.dim();
            check_dims(*n, d)?;
            let c = theorem1_coefficient(*n, d)?;
            json!({
                "command": "asym",
                "n": n,
                "d": d,
                "u": sig(*u),
                "volume": sig(domain.volume()),
                "leading_constant": sig(c.leading_constant),
                "u_power": c.power_of_u,
                "phi_power": c.phi_power,
                "probability": sig(c.probability(*u, domain.volume())),
            })
        }
        Command::Identity { n_max, d_max } => {
            check_dims(*n_max, *d_max)?;
            let mut rows = Vec::new();
            for n in 1..=*n_max {
                for d in 1..=*d_max {
                    let t = theorem1_coefficient(n, d)?.leading_constant;
                    let p = proposition1_coefficient(&intersection_volume_polynomial(n, d)?, n, d)?
                        .leading_constant;
                    let e = ec_volume_term_coefficient(n, d)?;
                    rows.push(vec![
                        n as f64,
                        d as f64,
                        t,
                        p,
                        e,
                        identity_check(n, d)?,
                    ]);
                }
            }
            let header = ["n", "d", "leading_constant", "polynomial_route", "ec_volume_term", "relative_error"];
            return Ok(table(format, "identity", &header, &rows));
        }
        Command::Pickands { n, a, t_max, samples } => {
            check_n(*n)?;
            if !(*a > 0.0 && *a <= 0.1) {
                return Err(invalid("a", "must lie in (0, 0.1]"));
            }
            if *samples == 0 {
                return Err(invalid("samples", "must be positive"));
            }
            let plan = PickandsPlan::new(*n, *a, *t_max, *samples, seed)
                .map_err(|e| invalid("t-max", e.to_string()))?;
            let est = estimate_pickands(&plan, workers);
            json!({
                "command": "pickands",
                "n": n,
                "a": sig(*a),
                "t_max": sig(*t_max),
                "estimate": sig(est.mean),
                "std_error": sig(est.std_error),
                "samples": est.samples,
                "seed": est.seed,
            })
        }
        Command::Simulate { n, sides, grid_step, u, replicates } => {
            let plan = simulation_plan(*n, sides, *grid_step, *u, *replicates, seed)?;
            let est = estimate_conjunction_probability(&plan, workers)?;
            let d = plan.domain.dim();
            let asymptotic = if *u > 0.0 {
                sig(theorem1_coefficient(*n, d)?.probability(*u, plan.domain.volume()))
            } else {
                Value::Null
            };
            json!({
                "command": "simulate",
                "n": n,
                "d": d,
                "sides": sig_list(&plan.domain.sides().expect("box domain")),
                "grid_step": sig(*grid_step),
                "u": sig(*u),
                "estimate": sig(est.mean),
                "std_error": sig(est.std_error),
                "replicates": est.samples,
                "seed": est.seed,
                "asymptotic": asymptotic,
                "ec_prediction": sig(ec_prediction(*n, d, *u, &plan.domain)?),
            })
        }
        Command::Compare { n, sides, grid_step, u_grid, replicates } => {
            let us = parse_list("u-grid", u_grid, false)?;
            if us.iter().any(|u| !(*u > 0.0)) {
                return Err(invalid("u-grid", "thresholds must be positive"));
            }
            let first = us.first().copied().unwrap_or(1.0);
            let plan = simulation_plan(*n, sides, *grid_step, first, *replicates, seed)?;
            let rows: Vec<Vec<f64>> = compare_asymptotic(&plan, &us, workers)?
                .into_iter()
                .map(|r| vec![r.u, r.empirical, r.std_error, r.asymptotic, r.ratio])
                .collect();
            let header = ["u", "empirical", "std_error", "asymptotic", "ratio"];
            return Ok(table(format, "compare", &header, &rows));
        }
    };
    Ok(format!("{value}\n"))
}

fn invalid(flag: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        flag: flag.to_string(),
        message: message.into(),
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    Ok(())
}

fn check_dims(n: usize, d: usize) -> Result<()> {
    check_n(n)?;
    if d == 0 {
        return Err(invalid("d", "must be at least 1"));
    }
    if n * d > crate::ball_geometry::MAX_TOTAL_DIMENSION {
        return Err(invalid("n", format!("n*d = {} exceeds 64", n * d)));
    }
    Ok(())
}

fn parse_list(flag: &str, raw: &str, positive: bool) -> Result<Vec<f64>> {
    let values = raw
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| invalid(flag, format!("`{s}` is not a number")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(invalid(flag, "expected a comma-separated list of numbers"));
    }
    if values.iter().any(|v| !v.is_finite() || (positive && !(*v > 0.0))) {
        return Err(invalid(flag, "values must be positive and finite"));
    }
    Ok(values)
}

fn ball_config(d: usize, radii: &str) -> Result<BallConfiguration> {
    let radii = parse_list("radii", radii, true)?;
    check_dims(radii.len(), d)?;
    BallConfiguration::new(d, radii).map_err(|e| invalid("radii", e.to_string()))
}

fn domain_from_flags(d: Option<usize>, sides: Option<&str>, radii: Option<&str>) -> Result<DomainSpec> {
    match (sides, radii) {
        (Some(sides), None) => {
            let sides = parse_list("sides", sides, true)?;
            if let Some(d) = d {
                if d != sides.len() {
                    return Err(invalid("d", format!("{} sides given for d = {d}", sides.len())));
                }
            }
            if sides.len() == 1 {
                DomainSpec::interval(sides[0])
            } else {
                DomainSpec::cuboid(sides)
            }
        }
        (None, Some(radii)) => {
            let r = parse_list("radii", radii, true)?;
            if r.len() != 1 {
                return Err(invalid("radii", "a ball domain takes exactly one radius"));
            }
            let d = d.ok_or_else(|| invalid("d", "required for a ball domain"))?;
            if d == 0 {
                return Err(invalid("d", "must be at least 1"));
            }
            DomainSpec::ball(d, r[0])
        }
        (Some(_), Some(_)) => Err(invalid("sides", "give either --sides or --radii, not both")),
        (None, None) => Err(invalid("sides", "a domain is required (--sides, or --d with --radii)")),
    }
}

fn simulation_plan(
    n: usize,
    sides: &str,
    grid_step: f64,
    u: f64,
    replicates: u64,
    seed: u64,
) -> Result<SimulationPlan> {
    check_n(n)?;
    let domain = domain_from_flags(None, Some(sides), None)?;
    if !(grid_step > 0.0 && grid_step <= MAX_GRID_STEP) {
        return Err(invalid("grid-step", format!("must lie in (0, {MAX_GRID_STEP}]")));
    }
    if replicates < MIN_REPLICATES {
        return Err(invalid("replicates", format!("must be at least {MIN_REPLICATES}")));
    }
    if !u.is_finite() {
        return Err(invalid("u", "must be finite"));
    }
    SimulationPlan::new(n, domain, grid_step, u, replicates, seed)
}

/// Rounds to 12 significant digits.
fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().expect("formatted float parses")
    } else {
        x
    }
}

fn sig(x: f64) -> Value {
    if x.is_finite() {
        json!(round_sig(x))
    } else {
        Value::Null
    }
}

fn sig_list(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| sig(x)).collect())
}

fn table(format: OutputFormat, command: &str, header: &[&str], rows: &[Vec<f64>]) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = header.join(",");
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(|&x| format!("{}", round_sig(x))).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let obj = header
                        .iter()
                        .zip(row)
                        .map(|(k, &v)| (k.to_string(), sig(v)))
                        .collect::<serde_json::Map<_, _>>();
                    Value::Object(obj)
                })
                .collect();
            format!("{}\n", json!({ "command": command, "rows": rows }))
        }
    }
}
