use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::metrics::rel_error;
use super::params::default_params;
use super::synth::{corrupt, corrupt_within, gen_low_rank, sample_mask, CorruptionSpec, SynthSpec};
use crate::error::{Error, Result};
use crate::solvers::{parse_key_values, solve, Model, Problem, SolverConfig};
use crate::tensor::{DenseTensor, ObservationMask};

/// Relative error at or below which a recovery counts as successful.
pub const SUCCESS_THRESHOLD: f64 = 1e-2;

/// Grid of recovery experiments. Every combination of the list-valued fields
/// is one cell; `overrides` are solver configuration assignments applied on
/// top of [`default_params`](super::default_params) in every cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub models: Vec<Model>,
    pub dims: Vec<usize>,
    pub ranks: Vec<Vec<usize>>,
    pub magnitudes: Vec<f64>,
    pub rho_n: Vec<f64>,
    pub rho_o: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Draw the corruption support from the observed entries only.
    pub restrict_corruption: bool,
    pub overrides: Vec<(String, String)>,
}

/// Outcome of one grid cell. Failed cells carry `status = "error"`, a NaN
/// error and the message.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub model: Model,
    pub rho_o: f64,
    pub rho_n: f64,
    pub magnitude: f64,
    pub ranks: Vec<usize>,
    pub seed: u64,
    pub rel_err: f64,
    pub iters: usize,
    pub status: String,
    pub wall_ms: u128,
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn success(&self) -> bool {
        self.error.is_none() && self.rel_err <= SUCCESS_THRESHOLD
    }
}

fn fractions(key: &str, v: &str) -> Result<Vec<f64>> {
    let xs = numbers::<f64>(key, v)?;
    if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Format(format!("`{key}`: {x} is not a fraction in [0, 1]")));
    }
    Ok(xs)
}

fn numbers<U: FromStr>(key: &str, v: &str) -> Result<Vec<U>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Format(format!("`{key}`: cannot parse `{s}`")))
        })
        .collect()
}

/// Parses a sweep specification in the `key = value` syntax.
///
/// Grid keys: `models` (codes or names), `dims`, `ranks` (tuples separated
/// by `;`), `rho_n`, and optionally `rho_o` (default 1), `M` (default 1),
/// `seeds` (default 1) and `restrict_corruption` (default false). Any other
/// key is a solver configuration override. Every grid must be nonempty.
pub fn parse_sweep_spec(text: &str) -> Result<SweepSpec> {
    let mut spec = SweepSpec {
        models: Vec::new(),
        dims: Vec::new(),
        ranks: Vec::new(),
        magnitudes: vec![1.0],
        rho_n: Vec::new(),
        rho_o: vec![1.0],
        seeds: vec![1],
        restrict_corruption: false,
        overrides: Vec::new(),
    };
    let mut probe = SolverConfig::<f64>::new(Model::Singleton);
    for (key, v) in parse_key_values(text)? {
        match key.as_str() {
            "models" => {
                spec.models = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| Model::from_str(s).map_err(|e| Error::Format(e.to_string())))
                    .collect::<Result<_>>()?
            }
            "dims" => spec.dims = numbers(&key, &v)?,
            "ranks" => {
                spec.ranks = v
                    .split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|t| numbers(&key, t))
                    .collect::<Result<_>>()?
            }
            "M" => spec.magnitudes = numbers(&key, &v)?,
            "rho_n" => spec.rho_n = fractions(&key, &v)?,
            "rho_o" => spec.rho_o = fractions(&key, &v)?,
            "seeds" => spec.seeds = numbers(&key, &v)?,
            "restrict_corruption" => {
                spec.restrict_corruption = v
                    .parse()
                    .map_err(|_| Error::Format(format!("`{key}`: expected true or false")))?
            }
            "model" => {
                return Err(Error::Format("use `models` to choose the sweep models".into()))
            }
            _ => {
                probe.set(&key, &v)?;
                spec.overrides.push((key, v));
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("models", self.models.is_empty()),
            ("dims", self.dims.is_empty()),
            ("ranks", self.ranks.is_empty()),
            ("M", self.magnitudes.is_empty()),
            ("rho_n", self.rho_n.is_empty()),
            ("rho_o", self.rho_o.is_empty()),
            ("seeds", self.seeds.is_empty()),
        ];
        if let Some((k, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::param(format!("sweep grid `{k}` is empty")));
        }
        for r in &self.ranks {
            SynthSpec::new(&self.dims, r, 0)?;
        }
        if let Some(m) = self.magnitudes.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::param(format!("corruption magnitude {m} must be positive")));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.models.len()
            * self.ranks.len()
            * self.magnitudes.len()
            * self.rho_n.len()
            * self.rho_o.len()
            * self.seeds.len()
    }
}

#[derive(Clone)]
struct Cell {
    model: Model,
    ranks: Vec<usize>,
    magnitude: f64,
    rho_n: f64,
    rho_o: f64,
    seed: u64,
}

/// Runs every cell of `spec` on a pool of `jobs` threads. Records come back
/// in grid order (model, ranks, M, ρ_n, ρ_o, seed, last fastest) and, apart
/// from `wall_ms`, do not depend on `jobs`.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.cell_count());
    for &model in &spec.models {
        for ranks in &spec.ranks {
            for &magnitude in &spec.magnitudes {
                for &rho_n in &spec.rho_n {
                    for &rho_o in &spec.rho_o {
                        for &seed in &spec.seeds {
                            cells.push(Cell {
                                model,
                                ranks: ranks.clone(),
                                magnitude,
                                rho_n,
                                rho_o,
                                seed,
                            });
                        }
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::param(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(|c| run_cell(spec, c)).collect()))
}

fn run_cell(spec: &SweepSpec, cell: &Cell) -> SweepRecord {
    let start = Instant::now();
    let outcome = solve_cell(spec, cell);
    let wall_ms = start.elapsed().as_millis();
    let mut rec = SweepRecord {
        model: cell.model,
        rho_o: cell.rho_o,
        rho_n: cell.rho_n,
        magnitude: cell.magnitude,
        ranks: cell.ranks.clone(),
        seed: cell.seed,
        rel_err: f64::NAN,
        iters: 0,
        status: "error".into(),
        wall_ms,
        error: None,
    };
    match outcome {
        Ok((rel_err, iters, status)) => {
            rec.rel_err = rel_err;
            rec.iters = iters;
            rec.status = status;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn solve_cell(spec: &SweepSpec, cell: &Cell) -> Result<(f64, usize, String)> {
    let x0: DenseTensor<f64> = gen_low_rank(&SynthSpec::new(&spec.dims, &cell.ranks, cell.seed)?)?;
    let mask: Option<ObservationMask> = if cell.rho_o < 1.0 {
        Some(sample_mask(x0.shape(), cell.rho_o, cell.seed)?)
    } else {
        None
    };
    let cs = CorruptionSpec { rho_n: cell.rho_n, magnitude: cell.magnitude, seed: cell.seed };
    let (b, _) = match (&mask, spec.restrict_corruption) {
        (Some(m), true) => corrupt_within(&x0, &cs, m)?,
        _ => corrupt(&x0, &cs)?,
    };
    let p = Problem::new(b, mask)?;
    let mut c = default_params(&p, cell.model);
    if cell.model.needs_ranks() {
        c.target_ranks = Some(cell.ranks.clone());
    }
    c.apply(&spec.overrides)?;
    c.model = cell.model;
    let r = solve(&p, &c)?;
    Ok((rel_error(&r.x, &x0)?, r.iterations, r.status.to_string()))
}

/// Writes records as CSV with header
/// `model,rho_o,rho_n,M,ranks,seed,rel_err,iters,status,wall_ms`.
pub fn write_records_csv<W: Write>(records: &[SweepRecord], mut w: W) -> Result<()> {
    writeln!(w, "model,rho_o,rho_n,M,ranks,seed,rel_err,iters,status,wall_ms")?;
    for r in records {
        let ranks: Vec<String> = r.ranks.iter().map(|v| v.to_string()).collect();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.model.code(),
            r.rho_o,
            r.rho_n,
            r.magnitude,
            ranks.join("x"),
            r.seed,
            r.rel_err,
            r.iters,
            r.status,
            r.wall_ms
        )?;
    }
    Ok(())
}
