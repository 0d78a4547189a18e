//! Paired Monte Carlo risk estimation and percentage risk improvement tables.
//!
//! Replication `i` of a run with seed `s` draws from ChaCha8 stream `i` of key
//! `s`, so every estimator and every table cell sees the same random numbers,
//! and results do not depend on how replications are scheduled. Reductions
//! use fixed-order pairwise summation.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, EstimatorPlan, PointEstimator};
use crate::losses::LossSpec;
use crate::model::{PopulationParams, SufficientStats, Target};
use crate::schemes::{combine, SamplingPlan, Scheme};

pub const DEFAULT_SEED: u64 = 12345;
pub const DEFAULT_REPS: u64 = 20000;
pub const MIN_REPS: u64 = 100;

/// RNG for one replication.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// Runs `f` on a pool with `threads` workers, or on the current pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// One simulated dataset reduced to sufficient statistics.
pub fn draw_replication(
    params: &PopulationParams,
    plan: &SamplingPlan,
    rng: &mut ChaCha8Rng,
) -> Result<SufficientStats> {
    let first = plan.first.simulate_reduced(params.mu1, params.sigma1, rng)?;
    let second = plan.second.simulate_reduced(params.mu2, params.sigma2, rng)?;
    combine(&first, &second)
}

/// Sum with pairwise splitting; the split points depend only on the length.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub reps: u64,
}

impl RiskEstimate {
    pub fn from_losses(losses: &[f64]) -> Self {
        let r = losses.len() as f64;
        let mean = pairwise_sum(losses) / r;
        let dev: Vec<f64> = losses.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&dev) / (r - 1.0).max(1.0);
        Self { mean, std_error: (var / r).sqrt(), reps: losses.len() as u64 }
    }
}

/// Percentage risk improvement of a candidate over a baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriEstimate {
    pub pri: f64,
    /// Delta-method standard error of the paired ratio.
    pub std_error: f64,
}

impl PriEstimate {
    /// `100 Σ(L_b - L_c) / Σ L_b` over paired replications.
    pub fn from_paired(baseline: &[f64], candidate: &[f64]) -> Self {
        let r = baseline.len() as f64;
        let diff: Vec<f64> = baseline.iter().zip(candidate).map(|(b, c)| b - c).collect();
        let sum_b = pairwise_sum(baseline);
        let ratio = pairwise_sum(&diff) / sum_b;
        let mean_b = sum_b / r;
        let resid: Vec<f64> = diff.iter().zip(baseline).map(|(d, b)| d - ratio * b).collect();
        let resid_mean = pairwise_sum(&resid) / r;
        let sq: Vec<f64> = resid.iter().map(|x| (x - resid_mean) * (x - resid_mean)).collect();
        let var = pairwise_sum(&sq) / (r - 1.0).max(1.0);
        Self { pri: 100.0 * ratio, std_error: 100.0 * (var / r).sqrt() / mean_b }
    }
}

/// Scaled losses `L((δ - μ)/σ)` of each estimator on common replications,
/// one column per estimator.
pub fn paired_losses(
    estimators: &[&dyn PointEstimator],
    params: &PopulationParams,
    plan: &SamplingPlan,
    loss: &LossSpec,
    reps: u64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    plan.validate()?;
    let rows: Vec<Vec<f64>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(seed, rep);
            let stats = draw_replication(params, plan, &mut rng)?;
            estimators
                .iter()
                .map(|e| {
                    let target = e.target();
                    Ok(loss.value((e.value(&stats)? - params.location(target)) / params.scale(target)))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut columns = vec![Vec::with_capacity(rows.len()); estimators.len()];
    for row in rows {
        for (col, v) in columns.iter_mut().zip(row) {
            col.push(v);
        }
    }
    Ok(columns)
}

/// One simulation cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: PopulationParams,
    pub plan: SamplingPlan,
    pub reps: u64,
    pub seed: u64,
    pub loss: LossSpec,
    pub target: Target,
    pub baseline: EstimatorKind,
    pub candidates: Vec<EstimatorKind>,
    /// Worker threads; `None` uses the ambient pool.
    pub threads: Option<usize>,
}

impl SimConfig {
    /// Complete samples, default replication count and seed.
    pub fn complete(n1: u32, n2: u32, params: PopulationParams, loss: LossSpec, target: Target) -> Self {
        Self {
            params,
            plan: SamplingPlan::complete(n1, n2),
            reps: DEFAULT_REPS,
            seed: DEFAULT_SEED,
            loss,
            target,
            baseline: EstimatorKind::Baee,
            candidates: Vec::new(),
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < MIN_REPS {
            return Err(Error::InvalidParameter(format!("reps must be >= {MIN_REPS}, got {}", self.reps)));
        }
        if self.params.order_restricted && self.params.sigma1 > self.params.sigma2 {
            return Err(Error::InvalidParameter("sigma1 <= sigma2 required".into()));
        }
        self.plan.validate()
    }

    fn plans(&self, kinds: &[EstimatorKind]) -> Result<Vec<EstimatorPlan>> {
        let design = self.plan.design();
        kinds.iter().map(|&k| EstimatorPlan::new(k, self.target, &self.loss, design)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateResult {
    pub kind: EstimatorKind,
    pub risk: RiskEstimate,
    pub pri: PriEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub baseline: EstimatorKind,
    pub baseline_risk: RiskEstimate,
    pub candidates: Vec<CandidateResult>,
}

/// Risks of the baseline and every candidate, and their PRIs, on one shared
/// replication stream.
pub fn run_cell(config: &SimConfig) -> Result<CellResult> {
    config.validate()?;
    let mut kinds = vec![config.baseline];
    kinds.extend(&config.candidates);
    let plans = config.plans(&kinds)?;
    let refs: Vec<&dyn PointEstimator> = plans.iter().map(|p| p as &dyn PointEstimator).collect();
    let columns = with_threads(config.threads, || {
        paired_losses(&refs, &config.params, &config.plan, &config.loss, config.reps, config.seed)
    })??;
    let base = &columns[0];
    let candidates = config
        .candidates
        .iter()
        .zip(&columns[1..])
        .map(|(&kind, col)| CandidateResult {
            kind,
            risk: RiskEstimate::from_losses(col),
            pri: PriEstimate::from_paired(base, col),
        })
        .collect();
    Ok(CellResult { baseline: config.baseline, baseline_risk: RiskEstimate::from_losses(base), candidates })
}

/// Monte Carlo risk of one estimator under the config's replications.
pub fn risk_mc(kind: EstimatorKind, config: &SimConfig) -> Result<RiskEstimate> {
    let cfg = SimConfig { baseline: kind, candidates: Vec::new(), ..config.clone() };
    Ok(run_cell(&cfg)?.baseline_risk)
}

/// Paired PRI of `candidate` over `baseline`.
pub fn pri_mc(baseline: EstimatorKind, candidate: EstimatorKind, config: &SimConfig) -> Result<PriEstimate> {
    let cfg = SimConfig { baseline, candidates: vec![candidate], ..config.clone() };
    Ok(run_cell(&cfg)?.candidates[0].pri)
}

/// Sampling scheme for a table, instantiated per block sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeTemplate {
    Complete,
    /// Observed failures per population; block sizes are the totals.
    TypeII { observed: [u32; 2] },
    /// Removal plans per population; block sizes must equal `m + ΣR`.
    Progressive { removals: [Vec<u32>; 2] },
    /// Block sizes are the record counts.
    Records,
}

impl SchemeTemplate {
    pub fn plan(&self, n1: u32, n2: u32) -> Result<SamplingPlan> {
        let plan = match self {
            SchemeTemplate::Complete => SamplingPlan::complete(n1, n2),
            SchemeTemplate::TypeII { observed } => SamplingPlan {
                first: Scheme::TypeII { total: n1, observed: observed[0] },
                second: Scheme::TypeII { total: n2, observed: observed[1] },
            },
            SchemeTemplate::Progressive { removals } => {
                let first = Scheme::Progressive { removals: removals[0].clone() };
                let second = Scheme::Progressive { removals: removals[1].clone() };
                if first.total_units() != n1 || second.total_units() != n2 {
                    return Err(Error::InvalidCensoringPlan(format!(
                        "removal plans cover {} and {} units, block sizes are {n1} and {n2}",
                        first.total_units(),
                        second.total_units()
                    )));
                }
                SamplingPlan { first, second }
            }
            SchemeTemplate::Records => {
                SamplingPlan { first: Scheme::Records { count: n1 }, second: Scheme::Records { count: n2 } }
            }
        };
        plan.validate()?;
        Ok(plan)
    }
}

impl fmt::Display for SchemeTemplate {
    /// `complete`, `records`, `type2:<r1>:<r2>` or `progressive:<R/R/...>;<R/R/...>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |rs: &[u32]| rs.iter().map(u32::to_string).collect::<Vec<_>>().join("/");
        match self {
            SchemeTemplate::Complete => write!(f, "complete"),
            SchemeTemplate::Records => write!(f, "records"),
            SchemeTemplate::TypeII { observed } => write!(f, "type2:{}:{}", observed[0], observed[1]),
            SchemeTemplate::Progressive { removals } => {
                write!(f, "progressive:{};{}", join(&removals[0]), join(&removals[1]))
            }
        }
    }
}

impl FromStr for SchemeTemplate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad scheme template `{s}`"));
        let num = |v: &str| v.trim().parse::<u32>().map_err(|_| bad());
        let (head, rest) = match s.trim().split_once(':') {
            Some((h, r)) => (h.trim().to_ascii_lowercase(), Some(r)),
            None => (s.trim().to_ascii_lowercase(), None),
        };
        match (head.as_str(), rest) {
            ("complete", None) => Ok(SchemeTemplate::Complete),
            ("records", None) => Ok(SchemeTemplate::Records),
            ("type2" | "typeii", Some(rest)) => {
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                Ok(SchemeTemplate::TypeII { observed: [num(a)?, num(b)?] })
            }
            ("progressive", Some(rest)) => {
                let (a, b) = rest.split_once(';').ok_or_else(bad)?;
                let plan = |p: &str| p.split('/').map(num).collect::<Result<Vec<u32>>>();
                Ok(SchemeTemplate::Progressive { removals: [plan(a)?, plan(b)?] })
            }
            _ => Err(bad()),
        }
    }
}

/// A group of cells sharing sample sizes and locations.
#[derive(Debug, Clone, PartialEq)]
pub struct TableBlock {
    pub n1: u32,
    pub n2: u32,
    pub mu1: f64,
    pub mu2: f64,
    pub sigmas: Vec<(f64, f64)>,
}

/// Scale pairs used throughout the published tables.
pub fn default_sigma_grid() -> Vec<(f64, f64)> {
    vec![(0.4, 0.6), (0.4, 1.0), (0.4, 1.6), (0.7, 0.9), (0.7, 1.4), (0.7, 2.0), (1.2, 1.5), (1.2, 2.0), (1.2, 2.5)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub blocks: Vec<TableBlock>,
    pub reps: u64,
    pub seed: u64,
    pub loss: LossSpec,
    pub target: Target,
    pub baseline: EstimatorKind,
    pub candidates: Vec<EstimatorKind>,
    pub scheme: SchemeTemplate,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriRow {
    pub sigma1: f64,
    pub sigma2: f64,
    pub n1: u32,
    pub n2: u32,
    pub mu1: f64,
    pub mu2: f64,
    pub estimator: EstimatorKind,
    pub pri: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub sigma1: f64,
    pub sigma2: f64,
    pub n1: u32,
    pub n2: u32,
    pub mu1: f64,
    pub mu2: f64,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PriTable {
    pub baseline: Option<EstimatorKind>,
    pub candidates: Vec<EstimatorKind>,
    pub rows: Vec<PriRow>,
    pub failures: Vec<CellFailure>,
}

pub const CSV_HEADER: &str = "sigma1,sigma2,n1,n2,mu1,mu2,estimator,pri,std_error";

impl PriTable {
    /// Full-precision CSV, one line per (cell, candidate).
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.sigma1, r.sigma2, r.n1, r.n2, r.mu1, r.mu2, r.estimator, r.pri, r.std_error
            );
        }
        out
    }

    /// One row per cell, one column per candidate, PRIs to 2 decimals.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        if let Some(b) = self.baseline {
            let _ = writeln!(out, "PRI over `{b}` (%)\n");
        }
        out.push_str("| sigma1 | sigma2 | n1 | n2 | mu1 | mu2 |");
        for c in &self.candidates {
            let _ = write!(out, " {c} |");
        }
        out.push_str("\n|---|---|---|---|---|---|");
        for _ in &self.candidates {
            out.push_str("---|");
        }
        out.push('\n');
        for cell in self.rows.chunks(self.candidates.len().max(1)) {
            let r = &cell[0];
            let _ = write!(out, "| {} | {} | {} | {} | {} | {} |", r.sigma1, r.sigma2, r.n1, r.n2, r.mu1, r.mu2);
            for c in cell {
                let _ = write!(out, " {:.2} |", c.pri);
            }
            out.push('\n');
        }
        for f in &self.failures {
            let _ = writeln!(
                out,
                "\nfailed cell sigma=({}, {}) n=({}, {}) mu=({}, {}): {}",
                f.sigma1, f.sigma2, f.n1, f.n2, f.mu1, f.mu2, f.error
            );
        }
        out
    }

    pub fn find(&self, n1: u32, n2: u32, sigma1: f64, sigma2: f64, estimator: EstimatorKind) -> Option<&PriRow> {
        self.rows
            .iter()
            .find(|r| r.n1 == n1 && r.n2 == n2 && r.sigma1 == sigma1 && r.sigma2 == sigma2 && r.estimator == estimator)
    }
}

/// Runs every cell of the grid; failing cells are recorded, not fatal.
pub fn run_table(spec: &TableSpec) -> Result<PriTable> {
    if spec.blocks.is_empty() || spec.blocks.iter().all(|b| b.sigmas.is_empty()) {
        return Err(Error::InvalidParameter("table grid is empty".into()));
    }
    with_threads(spec.threads, || {
        let mut table =
            PriTable { baseline: Some(spec.baseline), candidates: spec.candidates.clone(), ..Default::default() };
        for block in &spec.blocks {
            for &(sigma1, sigma2) in &block.sigmas {
                let outcome = spec.scheme.plan(block.n1, block.n2).and_then(|plan| {
                    let params = PopulationParams::restricted(block.mu1, block.mu2, sigma1, sigma2)?;
                    run_cell(&SimConfig {
                        params,
                        plan,
                        reps: spec.reps,
                        seed: spec.seed,
                        loss: spec.loss.clone(),
                        target: spec.target,
                        baseline: spec.baseline,
                        candidates: spec.candidates.clone(),
                        threads: None,
                    })
                });
                match outcome {
                    Ok(cell) => table.rows.extend(cell.candidates.iter().map(|c| PriRow {
                        sigma1,
                        sigma2,
                        n1: block.n1,
                        n2: block.n2,
                        mu1: block.mu1,
                        mu2: block.mu2,
                        estimator: c.kind,
                        pri: c.pri.pri,
                        std_error: c.pri.std_error,
                    })),
                    Err(error) => table.failures.push(CellFailure {
                        sigma1,
                        sigma2,
                        n1: block.n1,
                        n2: block.n2,
                        mu1: block.mu1,
                        mu2: block.mu2,
                        error,
                    }),
                }
            }
        }
        table
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(reps: u64) -> SimConfig {
        let params = PopulationParams::restricted(0.1, 0.3, 0.4, 0.6).unwrap();
        SimConfig { reps, ..SimConfig::complete(4, 5, params, LossSpec::SquaredError, Target::Mu1) }
    }

    #[test]
    fn replication_streams_are_reproducible() {
        let params = PopulationParams::restricted(0.0, 0.0, 1.0, 1.0).unwrap();
        let plan = SamplingPlan::complete(4, 5);
        let a = draw_replication(&params, &plan, &mut replication_rng(9, 17)).unwrap();
        let b = draw_replication(&params, &plan, &mut replication_rng(9, 17)).unwrap();
        let c = draw_replication(&params, &plan, &mut replication_rng(9, 18)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn baseline_against_itself_is_exactly_zero() {
        let cfg = SimConfig { candidates: vec![EstimatorKind::Baee], ..config(500) };
        let cell = run_cell(&cfg).unwrap();
        assert_eq!(cell.candidates[0].pri.pri, 0.0);
        assert_eq!(cell.candidates[0].pri.std_error, 0.0);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let base = SimConfig { candidates: vec![EstimatorKind::Stein, EstimatorKind::BrewsterZidek], ..config(2000) };
        let one = run_cell(&SimConfig { threads: Some(1), ..base.clone() }).unwrap();
        let four = run_cell(&SimConfig { threads: Some(4), ..base }).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn too_few_reps_are_rejected() {
        assert!(run_cell(&config(10)).is_err());
    }

    #[test]
    fn pri_standard_error_is_small_for_close_estimators() {
        let b = [1.0, 2.0, 3.0, 4.0];
        let c = [0.9, 1.8, 2.7, 3.6];
        let p = PriEstimate::from_paired(&b, &c);
        assert!((p.pri - 10.0).abs() < 1e-12);
        assert!(p.std_error < 1e-12);
    }

    #[test]
    fn scheme_templates_round_trip_and_instantiate() {
        for text in ["complete", "records", "type2:3:4", "progressive:1/0/2;0/0/1/1"] {
            let t: SchemeTemplate = text.parse().unwrap();
            assert_eq!(t.to_string(), text);
        }
        let t: SchemeTemplate = "progressive:1/0/2;0/0/1/1".parse().unwrap();
        assert!(t.plan(6, 6).is_ok());
        assert!(matches!(t.plan(5, 6), Err(Error::InvalidCensoringPlan(_))));
        assert!("type2:3".parse::<SchemeTemplate>().is_err());
    }

    #[test]
    fn table_records_failed_cells() {
        let spec = TableSpec {
            blocks: vec![TableBlock { n1: 4, n2: 5, mu1: 0.1, mu2: 0.3, sigmas: vec![(0.4, 0.6), (0.9, 0.6)] }],
            reps: 200,
            seed: 1,
            loss: LossSpec::SquaredError,
            target: Target::Mu1,
            baseline: EstimatorKind::Baee,
            candidates: vec![EstimatorKind::Stein],
            scheme: SchemeTemplate::Complete,
            threads: Some(2),
        };
        let table = run_table(&spec).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.failures.len(), 1);
        let csv = table.to_csv();
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 2);
        assert!(table.to_markdown().contains("| stein |"));
    }

    #[test]
    fn single_cell_table_reproduces_pri_mc() {
        let cfg = config(1000);
        let direct = pri_mc(EstimatorKind::Baee, EstimatorKind::Stein, &cfg).unwrap();
        let spec = TableSpec {
            blocks: vec![TableBlock { n1: 4, n2: 5, mu1: 0.1, mu2: 0.3, sigmas: vec![(0.4, 0.6)] }],
            reps: 1000,
            seed: DEFAULT_SEED,
            loss: LossSpec::SquaredError,
            target: Target::Mu1,
            baseline: EstimatorKind::Baee,
            candidates: vec![EstimatorKind::Stein],
            scheme: SchemeTemplate::Complete,
            threads: None,
        };
        let table = run_table(&spec).unwrap();
        assert_eq!(table.rows[0].pri, direct.pri);
        assert_eq!(table.rows[0].std_error, direct.std_error);
    }
}
