//! Command implementations behind the `anderson-lab` binary.
//!
//! Every command validates its whole [`RunConfig`] before computing, returns a
//! [`CommandOutput`], and is deterministic given its flags (including the seed).
//! JSON reports carry `schema_version`.

use std::path::Path;

use serde_json::{json, Value};

use crate::classify::{classify, ClassifyParams, Verdict};
use crate::error::{Error, Result};
use crate::grid::TorusGrid;
use crate::perturbation::{coefficient_entry, minimal_paths, path_sum, support_distances};
use crate::probability::{
    enumerate_bernoulli, exact_bad_prob_prime_cycle, lower_bound_bad, monte_carlo, shift_symmetric_mass, trial_rng,
    Classifier, PotentialDistribution, NUMERICAL_ENUMERATION_CAP,
};
use crate::selftest::{run_selftest, SelftestOptions};
use crate::spectral::{ipr_heatmap, Potential, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const THREADS_ENV: &str = "ANDERSON_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

/// Inclusive linear grid of `count` coupling values from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl TGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl std::str::FromStr for TGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("t-grid must be start:stop:count, got `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(bad());
        };
        let grid = TGrid {
            start: start.trim().parse().map_err(|_| bad())?,
            stop: stop.trim().parse().map_err(|_| bad())?,
            count: count.trim().parse().map_err(|_| bad())?,
        };
        if !grid.start.is_finite() || !grid.stop.is_finite() || grid.count == 0 {
            return Err(bad());
        }
        if grid.count > 1 && !(grid.start < grid.stop) {
            return Err(Error::InvalidParameter(format!(
                "t-grid start {} must be below stop {}",
                grid.start, grid.stop
            )));
        }
        Ok(grid)
    }
}

pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad side length `{x}`")))
        })
        .collect()
}

/// Comma, whitespace or newline separated reals.
pub fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidParameter(format!("non-numeric potential entry `{x}`")))
        })
        .collect()
}

/// `bernoulli:P` or `uniform:A,B`.
pub fn parse_dist(s: &str) -> Result<PotentialDistribution> {
    let bad = || Error::InvalidParameter(format!("distribution must be bernoulli:P or uniform:A,B, got `{s}`"));
    let (kind, args) = s.split_once(':').ok_or_else(bad)?;
    let nums = parse_reals(args).map_err(|_| bad())?;
    let dist = match (kind, nums.as_slice()) {
        ("bernoulli", [p]) => PotentialDistribution::Bernoulli { p: *p },
        ("uniform", [a, b]) => PotentialDistribution::Uniform { a: *a, b: *b },
        _ => return Err(bad()),
    };
    dist.validate()?;
    Ok(dist)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSource {
    Inline(Vec<f64>),
    File(std::path::PathBuf),
    Sampled(PotentialDistribution),
}

/// Flags shared by the subcommands. Unused fields are ignored per command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dims: Vec<usize>,
    pub p: f64,
    pub potential: Option<PotentialSource>,
    pub t_grid: Option<TGrid>,
    pub t_samples: usize,
    pub gap_tol: Option<f64>,
    pub entry_tol: Option<f64>,
    pub seed: u64,
    pub trials: u64,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dims: Vec::new(),
            p: 0.5,
            potential: None,
            t_grid: None,
            t_samples: crate::classify::DEFAULT_T_SAMPLES,
            gap_tol: None,
            entry_tol: None,
            seed: 0,
            trials: 1000,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(&self.dims)
    }

    pub fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances {
            gap: self.gap_tol,
            ..Tolerances::default()
        };
        if let Some(e) = self.entry_tol {
            tol.entry = e;
        }
        tol
    }

    pub fn classify_params(&self) -> ClassifyParams {
        ClassifyParams {
            t_samples: self.t_samples,
            tolerances: self.tolerances(),
            ..ClassifyParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dims.is_empty() {
            self.grid()?;
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.t_samples == 0 {
            return Err(Error::InvalidParameter("t-samples must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        self.tolerances().validate()?;
        if let Some(PotentialSource::Sampled(d)) = &self.potential {
            d.validate()?;
        }
        Ok(())
    }

    fn params_json(&self) -> Value {
        json!({
            "dims": self.dims,
            "p": self.p,
            "t_samples": self.t_samples,
            "gap_tol": self.gap_tol,
            "entry_tol": self.entry_tol,
            "seed": self.seed,
            "trials": self.trials,
        })
    }

    /// Resolves the potential: inline values, a file, or a seeded draw (trial 0 of `seed`).
    pub fn load_potential(&self, grid: &TorusGrid) -> Result<Potential> {
        let v = match &self.potential {
            None => return Err(Error::InvalidParameter("no potential given".into())),
            Some(PotentialSource::Inline(values)) => Potential::explicit(values.clone()),
            Some(PotentialSource::File(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))?;
                Potential::explicit(parse_reals(&text)?)
            }
            Some(PotentialSource::Sampled(dist)) => dist.sample(grid.n(), &mut trial_rng(self.seed, 0))?,
        };
        v.check_len(grid.n())?;
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub body: String,
    pub exit_code: i32,
}

impl CommandOutput {
    fn json(value: &Value, exit_code: i32) -> Self {
        Self {
            body: serde_json::to_string_pretty(value).expect("json values serialize") + "\n",
            exit_code,
        }
    }

    /// Writes to `path`, or stdout when `None`.
    pub fn emit(&self, path: Option<&Path>) -> std::io::Result<()> {
        match path {
            Some(p) => std::fs::write(p, &self.body),
            None => {
                use std::io::Write;
                std::io::stdout().write_all(self.body.as_bytes())
            }
        }
    }
}

fn require_json(cfg: &RunConfig) -> Result<()> {
    match cfg.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Error::InvalidParameter(
            "csv output is only available for heatmap".into(),
        )),
    }
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    require_json(cfg)?;
    let grid = cfg.grid()?;
    let v = cfg.load_potential(&grid)?;
    let result = classify(&grid, &v, &cfg.classify_params())?;
    let exit = if result.verdict == Verdict::Inconclusive {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    };
    let mut report = serde_json::to_value(&result).expect("classification serializes");
    report["schema_version"] = json!(SCHEMA_VERSION);
    report["dims"] = json!(grid.dims());
    report["potential"] = json!(v.values());
    Ok(CommandOutput::json(&report, exit))
}

/// CSV `t,k,lambda,log_ipr`, reals with 17 significant digits.
pub fn cmd_heatmap(cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    let t_grid = cfg
        .t_grid
        .ok_or_else(|| Error::InvalidParameter("heatmap needs --t-grid".into()))?;
    let grid = cfg.grid()?;
    let v = cfg.load_potential(&grid)?;
    let rows = ipr_heatmap(&grid, &v, &t_grid.values(), cfg.tolerances().eigh)?;
    let body = match cfg.format {
        Format::Csv => {
            let mut out = String::from("t,k,lambda,log_ipr\n");
            for r in &rows {
                out.push_str(&format!("{:.16e},{},{:.16e},{:.16e}\n", r.t, r.k, r.lambda, r.log_ipr));
            }
            out
        }
        Format::Json => {
            serde_json::to_string_pretty(&json!({
                "schema_version": SCHEMA_VERSION,
                "dims": grid.dims(),
                "potential": v.values(),
                "rows": rows,
            }))
            .expect("json values serialize")
                + "\n"
        }
    };
    Ok(CommandOutput {
        body,
        exit_code: EXIT_OK,
    })
}

pub fn cmd_exact(l: usize, cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    require_json(cfg)?;
    let value = exact_bad_prob_prime_cycle(l, cfg.p)?;
    Ok(CommandOutput::json(
        &json!({
            "schema_version": SCHEMA_VERSION,
            "L": l,
            "p": cfg.p,
            "bad_probability": value,
        }),
        EXIT_OK,
    ))
}

pub fn cmd_bound(cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    require_json(cfg)?;
    let bound = lower_bound_bad(&cfg.dims, cfg.p)?;
    Ok(CommandOutput::json(
        &json!({
            "schema_version": SCHEMA_VERSION,
            "dims": cfg.dims,
            "p": cfg.p,
            "lower_bound": bound,
        }),
        EXIT_OK,
    ))
}

/// Exhaustive enumeration; uses the reflection criterion on prime cycles and
/// the full pipeline elsewhere (small grids only).
pub fn cmd_enumerate(cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    require_json(cfg)?;
    let grid = cfg.grid()?;
    let prime_cycle = grid.is_cycle() && grid.n() % 2 == 1 && crate::classify::is_prime(grid.n());
    let classifier = if prime_cycle {
        Classifier::PrimeReflection
    } else {
        if grid.n() > NUMERICAL_ENUMERATION_CAP {
            return Err(Error::EnumerationCap {
                n: grid.n(),
                cap: NUMERICAL_ENUMERATION_CAP,
            });
        }
        Classifier::Pipeline {
            params: cfg.classify_params(),
        }
    };
    let est = enumerate_bernoulli(&grid, cfg.p, &classifier)?;
    let bound = lower_bound_bad(grid.dims(), cfg.p)?;
    let shift_mass = shift_symmetric_mass(&grid, cfg.p)?;
    let mut report = serde_json::to_value(&est).expect("estimate serializes");
    report["schema_version"] = json!(SCHEMA_VERSION);
    report["params"] = cfg.params_json();
    report["classifier"] = serde_json::to_value(&classifier).expect("classifier serializes");
    report["lower_bound"] = json!(bound);
    report["shift_symmetric_mass"] = json!(shift_mass);
    report["gap_over_bound"] = json!(est.estimate - bound);
    Ok(CommandOutput::json(&report, EXIT_OK))
}

pub fn cmd_mc(cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    require_json(cfg)?;
    let grid = cfg.grid()?;
    let dist = match &cfg.potential {
        Some(PotentialSource::Sampled(d)) => d.clone(),
        None => PotentialDistribution::Bernoulli { p: cfg.p },
        Some(_) => return Err(Error::InvalidParameter("mc needs --dist, not a fixed potential".into())),
    };
    let classifier = Classifier::Pipeline {
        params: cfg.classify_params(),
    };
    let est = monte_carlo(&grid, &dist, cfg.trials, cfg.seed, &classifier)?;
    let mut report = serde_json::to_value(&est).expect("estimate serializes");
    report["schema_version"] = json!(SCHEMA_VERSION);
    report["params"] = cfg.params_json();
    report["distribution"] = serde_json::to_value(&dist).expect("distribution serializes");
    Ok(CommandOutput::json(&report, EXIT_OK))
}

/// Minimal paths from `from` to `to` on the grid Laplacian's support, with the
/// path sum and the matching propagator-power entry. `diag` defaults to `0, 1, …, n−1`.
pub fn cmd_paths(cfg: &RunConfig, diag: Option<Vec<f64>>, from: usize, to: usize) -> Result<CommandOutput> {
    cfg.validate()?;
    require_json(cfg)?;
    let grid = cfg.grid()?;
    grid.check_vertex(from)?;
    grid.check_vertex(to)?;
    let diag = diag.unwrap_or_else(|| (0..grid.n()).map(|x| x as f64).collect());
    if diag.len() != grid.n() {
        return Err(Error::LengthMismatch {
            expected: grid.n(),
            got: diag.len(),
        });
    }
    let a = grid.laplacian();
    let paths = minimal_paths(&a, from, to)?;
    Ok(CommandOutput::json(
        &json!({
            "schema_version": SCHEMA_VERSION,
            "dims": grid.dims(),
            "diag": diag,
            "from": from,
            "to": to,
            "distance": support_distances(&a, to)[from],
            "paths": paths,
            "path_sum": path_sum(&diag, &a, from, to)?,
            "propagator_power_entry": coefficient_entry(&diag, &a, to, from)?,
        }),
        EXIT_OK,
    ))
}

pub fn cmd_selftest(options: &SelftestOptions) -> CommandOutput {
    let checks = run_selftest(options);
    let mut body = String::new();
    for c in &checks {
        body.push_str(&format!(
            "{} {:<28} {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    body.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    CommandOutput {
        body,
        exit_code: if failed == 0 { EXIT_OK } else { EXIT_USAGE },
    }
}
