use std::fmt::Write as _;

use ordest::constants::EquivariantConstants;
use ordest::montecarlo::{run_cell, run_table, PriTable, SimConfig, TableSpec};
use ordest::pitman::gpn_mc;
use ordest::{estimate, Error, EstimatorKind, EstimatorPlan, PopulationParams, Result, SamplingPlan, SufficientStats};

use crate::config::{Command, Config, OutputFormat};
use crate::data::load_stats;

/// Text to emit plus per-cell failures that did not abort the run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub failures: Vec<(String, Error)>,
}

impl Outcome {
    fn text(text: String) -> Self {
        Self { text, failures: Vec::new() }
    }
}

fn missing(field: &str, command: Command) -> Error {
    Error::Config { line: 0, field: field.to_string(), message: format!("required by `{command}`") }
}

fn sizes(config: &Config, command: Command) -> Result<(u32, u32)> {
    Ok((config.n1.ok_or_else(|| missing("n1", command))?, config.n2.ok_or_else(|| missing("n2", command))?))
}

fn sampling_plan(config: &Config, command: Command) -> Result<SamplingPlan> {
    let (n1, n2) = sizes(config, command)?;
    config.scheme.plan(n1, n2)
}

/// Requested kinds, or every non-Pitman kind for the target other than the baseline.
fn candidates(config: &Config) -> Vec<EstimatorKind> {
    if !config.estimators.is_empty() {
        return config.estimators.clone();
    }
    EstimatorKind::ALL
        .into_iter()
        .filter(|k| k.supports(config.target) && *k != config.baseline)
        .filter(|k| !matches!(k, EstimatorKind::PitmanPnaee | EstimatorKind::PitmanImproved))
        .collect()
}

fn params(config: &Config) -> Result<PopulationParams> {
    PopulationParams::restricted(config.mu1, config.mu2, config.sigma1, config.sigma2)
}

pub fn execute(config: &Config, command: Command) -> Result<Outcome> {
    match command {
        Command::Constants => constants(config).map(Outcome::text),
        Command::Estimate => estimates(config).map(Outcome::text),
        Command::Simulate => simulate(config).map(Outcome::text),
        Command::Gpn => gpn(config).map(Outcome::text),
        Command::Table => table(config),
    }
}

fn constants(config: &Config) -> Result<String> {
    let design = sampling_plan(config, Command::Constants)?.design();
    let consts = EquivariantConstants::for_design(&config.loss, design)?;
    let mut out = String::new();
    for (name, value) in consts.fields() {
        let _ = writeln!(out, "{name}={value}");
    }
    Ok(out)
}

fn observed_stats(config: &Config) -> Result<SufficientStats> {
    if let Some(path) = &config.data {
        return load_stats(path, [config.n1, config.n2]);
    }
    let s = config.stats.ok_or_else(|| missing("data", Command::Estimate))?;
    let design = sampling_plan(config, Command::Estimate)?.design();
    SufficientStats::with_design(s.x1_min, s.x2_min, s.t1, s.t2, design)
}

fn estimates(config: &Config) -> Result<String> {
    let stats = observed_stats(config)?;
    let kinds: Vec<EstimatorKind> = if config.estimators.is_empty() {
        EstimatorKind::ALL.into_iter().filter(|k| k.supports(config.target)).collect()
    } else {
        config.estimators.clone()
    };
    let mut out = String::from("estimator,target,estimate,multiplier\n");
    for kind in kinds {
        let e = estimate(kind, config.target, &stats, &config.loss)?;
        let _ = writeln!(out, "{},{},{},{}", e.kind, e.target, e.value, e.phi_used);
    }
    Ok(out)
}

fn simulate(config: &Config) -> Result<String> {
    let sim = SimConfig {
        params: params(config)?,
        plan: sampling_plan(config, Command::Simulate)?,
        reps: config.reps,
        seed: config.seed,
        loss: config.loss.clone(),
        target: config.target,
        baseline: config.baseline,
        candidates: candidates(config),
        threads: config.threads,
    };
    let cell = run_cell(&sim)?;
    let mut out = String::from("estimator,risk,risk_std_error,pri,pri_std_error\n");
    let b = cell.baseline_risk;
    let _ = writeln!(out, "{},{},{},0,0", cell.baseline, b.mean, b.std_error);
    for c in &cell.candidates {
        let _ = writeln!(out, "{},{},{},{},{}", c.kind, c.risk.mean, c.risk.std_error, c.pri.pri, c.pri.std_error);
    }
    Ok(out)
}

fn gpn(config: &Config) -> Result<String> {
    let [a, b] = config.estimators.as_slice() else {
        return Err(Error::Config {
            line: 0,
            field: "estimators".into(),
            message: "`gpn` compares exactly two estimators".into(),
        });
    };
    let plan = sampling_plan(config, Command::Gpn)?;
    let design = plan.design();
    let est_a = EstimatorPlan::new(*a, config.target, &config.loss, design)?;
    let est_b = EstimatorPlan::new(*b, config.target, &config.loss, design)?;
    let g = gpn_mc(&est_a, &est_b, &params(config)?, &plan, &config.loss, config.reps, config.seed, config.threads)?;
    Ok(format!(
        "estimator_a,estimator_b,gpn,std_error,wins,ties,reps\n{a},{b},{},{},{},{},{}\n",
        g.value, g.std_error, g.wins, g.ties, g.reps
    ))
}

fn table(config: &Config) -> Result<Outcome> {
    if config.blocks.is_empty() {
        return Err(Error::Config { line: 0, field: "[block]".into(), message: "`table` needs at least one block".into() });
    }
    let spec = TableSpec {
        blocks: config.blocks.clone(),
        reps: config.reps,
        seed: config.seed,
        loss: config.loss.clone(),
        target: config.target,
        baseline: config.baseline,
        candidates: candidates(config),
        scheme: config.scheme.clone(),
        threads: config.threads,
    };
    let table: PriTable = run_table(&spec)?;
    let text = match config.format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Markdown => table.to_markdown(),
    };
    let failures = table
        .failures
        .iter()
        .map(|f| {
            let cell = format!("n1={} n2={} mu1={} mu2={} sigma1={} sigma2={}", f.n1, f.n2, f.mu1, f.mu2, f.sigma1, f.sigma2);
            (cell, f.error.clone())
        })
        .collect();
    Ok(Outcome { text, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn run(text: &str) -> Result<String> {
        let c = parse_config(text)?;
        execute(&c, c.command.unwrap()).map(|o| o.text)
    }

    fn field(out: &str, name: &str) -> f64 {
        out.lines().find_map(|l| l.strip_prefix(&format!("{name}="))).unwrap().parse().unwrap()
    }

    #[test]
    fn constants_for_four_and_five() {
        let out = run("command=constants n1=4 n2=5 loss=squared").unwrap();
        for (name, want) in [
            ("c01", 0.0625),
            ("b01", 0.03125),
            ("b01_star", 1.0 / 36.0),
            ("c02", 0.04),
            ("b02", 0.025),
            ("b02_star", 1.0 / 45.0),
        ] {
            assert!((field(&out, name) - want).abs() < 1e-12, "{name}");
        }
    }

    #[test]
    fn linex_shape_is_checked_when_solving() {
        let err = run("command=constants loss=linex:6 n1=4 n2=9").unwrap_err();
        assert!(matches!(err, Error::LinexShapeViolation { .. }));
    }

    #[test]
    fn stein_estimate_on_fixture() {
        let out = run("command=estimate n1=4 n2=5 x1_min=0.5 x2_min=0.8 t1=2 t2=3 estimators=stein").unwrap();
        let value: f64 = out.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
        assert!((value - 0.375).abs() < 1e-12);
    }

    #[test]
    fn missing_inputs_name_the_field() {
        assert!(matches!(run("command=constants n1=4"), Err(Error::Config { ref field, .. }) if field == "n2"));
        assert!(matches!(run("command=estimate n1=4 n2=5"), Err(Error::Config { ref field, .. }) if field == "data"));
        assert!(matches!(run("command=gpn n1=4 n2=5 estimators=mle"), Err(Error::Config { .. })));
        assert!(matches!(run("command=table"), Err(Error::Config { .. })));
    }
}
