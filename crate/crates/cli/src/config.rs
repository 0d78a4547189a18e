//! Plain-text run configuration.
//!
//! A line holds one or more `key = value` pairs and `#` starts a comment.
//! Words without `=` continue the previous value, so lists may contain
//! spaces (`sigmas = 0.4:0.6, 0.4:1`). Every `[block]` header opens a new
//! table block; keys before the first header are global.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use ordest::montecarlo::{SchemeTemplate, TableBlock, DEFAULT_REPS, DEFAULT_SEED, MIN_REPS};
use ordest::{Error, EstimatorKind, LossSpec, Result, Target};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constants,
    Estimate,
    Simulate,
    Gpn,
    Table,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Estimate => "estimate",
            Command::Simulate => "simulate",
            Command::Gpn => "gpn",
            Command::Table => "table",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [Command::Constants, Command::Estimate, Command::Simulate, Command::Gpn, Command::Table]
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Markdown => "markdown",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// Sufficient statistics given directly in the config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectStats {
    pub x1_min: f64,
    pub x2_min: f64,
    pub t1: f64,
    pub t2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub command: Option<Command>,
    pub n1: Option<u32>,
    pub n2: Option<u32>,
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub stats: Option<DirectStats>,
    pub loss: LossSpec,
    pub target: Target,
    pub baseline: EstimatorKind,
    /// Empty means every kind valid for the target.
    pub estimators: Vec<EstimatorKind>,
    pub reps: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub scheme: SchemeTemplate,
    pub data: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    pub blocks: Vec<TableBlock>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            command: None,
            n1: None,
            n2: None,
            mu1: 0.0,
            mu2: 0.0,
            sigma1: 1.0,
            sigma2: 1.0,
            stats: None,
            loss: LossSpec::SquaredError,
            target: Target::Mu1,
            baseline: EstimatorKind::Baee,
            estimators: Vec::new(),
            reps: DEFAULT_REPS,
            seed: DEFAULT_SEED,
            threads: None,
            scheme: SchemeTemplate::Complete,
            data: None,
            output: None,
            format: OutputFormat::Csv,
            blocks: Vec::new(),
        }
    }
}

fn config_error(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Config { line, field: field.to_string(), message: message.into() }
}

/// A value with the line it came from (0 for command-line overrides).
#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Key/value pairs before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    global: BTreeMap<String, Entry>,
    blocks: Vec<(usize, BTreeMap<String, Entry>)>,
}

const GLOBAL_KEYS: [&str; 22] = [
    "command", "n1", "n2", "mu1", "mu2", "sigma1", "sigma2", "x1_min", "x2_min", "t1", "t2", "loss", "target",
    "baseline", "estimators", "reps", "seed", "threads", "scheme", "data", "output", "format",
];
const BLOCK_KEYS: [&str; 5] = ["n1", "n2", "mu1", "mu2", "sigmas"];

/// Splits a line into `key=value` words, gluing `=` to its neighbours.
fn pairs(line: &str, line_no: usize) -> Result<Vec<(String, String)>> {
    let mut glued = String::with_capacity(line.len());
    let mut after_eq = false;
    for ch in line.chars() {
        if ch == '=' {
            while glued.ends_with(char::is_whitespace) {
                glued.pop();
            }
            glued.push('=');
            after_eq = true;
        } else if after_eq && ch.is_whitespace() {
            continue;
        } else {
            after_eq = false;
            glued.push(ch);
        }
    }
    let mut out: Vec<(String, String)> = Vec::new();
    for word in glued.split_whitespace() {
        match word.split_once('=') {
            Some((key, value)) if !key.is_empty() => out.push((key.to_ascii_lowercase(), value.to_string())),
            Some(_) => return Err(config_error(line_no, "", format!("missing key before `{word}`"))),
            None => match out.last_mut() {
                Some((_, value)) => {
                    value.push(' ');
                    value.push_str(word);
                }
                None => return Err(config_error(line_no, word, "expected `key = value`")),
            },
        }
    }
    Ok(out)
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (idx, full) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = full.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| config_error(line_no, line, "unclosed section"))?;
                if name.trim() != "block" {
                    return Err(config_error(line_no, name.trim(), "only [block] sections are recognized"));
                }
                raw.blocks.push((line_no, BTreeMap::new()));
                continue;
            }
            for (key, value) in pairs(line, line_no)? {
                let (scope, allowed): (&mut BTreeMap<String, Entry>, &[&str]) = match raw.blocks.last_mut() {
                    Some((_, block)) => (block, &BLOCK_KEYS),
                    None => (&mut raw.global, &GLOBAL_KEYS),
                };
                if !allowed.contains(&key.as_str()) {
                    return Err(config_error(line_no, &key, "unknown key"));
                }
                if scope.contains_key(&key) {
                    return Err(config_error(line_no, &key, "duplicate key"));
                }
                scope.insert(key, Entry { value, line: line_no });
            }
        }
        Ok(raw)
    }

    /// Sets or replaces a global key, as from the command line.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = key.trim().to_ascii_lowercase();
        if !GLOBAL_KEYS.contains(&key.as_str()) {
            return Err(config_error(0, &key, "unknown key"));
        }
        self.global.insert(key, Entry { value: value.into(), line: 0 });
        Ok(())
    }

    pub fn build(&self) -> Result<Config> {
        let g = &self.global;
        let mut c = Config::default();
        if let Some(e) = g.get("command") {
            c.command = Some(parse_entry("command", e)?);
        }
        c.n1 = opt(g, "n1")?;
        c.n2 = opt(g, "n2")?;
        c.mu1 = opt(g, "mu1")?.unwrap_or(c.mu1);
        c.mu2 = opt(g, "mu2")?.unwrap_or(c.mu2);
        c.sigma1 = opt(g, "sigma1")?.unwrap_or(c.sigma1);
        c.sigma2 = opt(g, "sigma2")?.unwrap_or(c.sigma2);
        let stat_keys = ["x1_min", "x2_min", "t1", "t2"];
        let given: Vec<Option<f64>> = stat_keys.iter().map(|k| opt(g, k)).collect::<Result<_>>()?;
        match given.as_slice() {
            [Some(x1_min), Some(x2_min), Some(t1), Some(t2)] => {
                c.stats = Some(DirectStats { x1_min: *x1_min, x2_min: *x2_min, t1: *t1, t2: *t2 })
            }
            [None, None, None, None] => {}
            _ => {
                let missing = stat_keys.iter().zip(&given).find(|(_, v)| v.is_none()).map(|(k, _)| *k).unwrap();
                return Err(config_error(0, missing, "x1_min, x2_min, t1 and t2 must be given together"));
            }
        }
        if let Some(e) = g.get("loss") {
            c.loss = parse_entry("loss", e)?;
        }
        c.target = opt(g, "target")?.unwrap_or(c.target);
        c.baseline = opt(g, "baseline")?.unwrap_or(c.baseline);
        if let Some(e) = g.get("estimators") {
            c.estimators = parse_list("estimators", e)?;
        }
        c.reps = opt(g, "reps")?.unwrap_or(c.reps);
        if c.reps < MIN_REPS {
            let line = g.get("reps").map_or(0, |e| e.line);
            return Err(config_error(line, "reps", format!("must be at least {MIN_REPS}")));
        }
        c.seed = opt(g, "seed")?.unwrap_or(c.seed);
        c.threads = opt(g, "threads")?;
        if c.threads == Some(0) {
            return Err(config_error(g["threads"].line, "threads", "must be at least 1"));
        }
        c.scheme = opt(g, "scheme")?.unwrap_or(c.scheme);
        c.data = g.get("data").map(|e| PathBuf::from(e.value.trim()));
        c.output = g.get("output").map(|e| PathBuf::from(e.value.trim()));
        c.format = opt(g, "format")?.unwrap_or(c.format);
        for (header_line, block) in &self.blocks {
            c.blocks.push(build_block(*header_line, block)?);
        }
        Ok(c)
    }
}

fn parse_entry<T: FromStr>(key: &str, e: &Entry) -> Result<T>
where
    T::Err: fmt::Display,
{
    e.value.trim().parse::<T>().map_err(|err| config_error(e.line, key, format!("`{}`: {err}", e.value.trim())))
}

fn opt<T: FromStr>(map: &BTreeMap<String, Entry>, key: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    map.get(key).map(|e| parse_entry(key, e)).transpose()
}

fn parse_list<T: FromStr>(key: &str, e: &Entry) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    e.value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|err| config_error(e.line, key, format!("`{s}`: {err}"))))
        .collect()
}

fn build_block(header_line: usize, block: &BTreeMap<String, Entry>) -> Result<TableBlock> {
    let required = |key: &str| {
        block.get(key).ok_or_else(|| config_error(header_line, key, "required in [block]"))
    };
    let sigmas_entry = required("sigmas")?;
    let sigmas = sigmas_entry
        .value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let bad = || config_error(sigmas_entry.line, "sigmas", format!("`{pair}` is not `sigma1:sigma2`"));
            let (a, b) = pair.split_once(':').ok_or_else(bad)?;
            Ok((a.trim().parse::<f64>().map_err(|_| bad())?, b.trim().parse::<f64>().map_err(|_| bad())?))
        })
        .collect::<Result<Vec<_>>>()?;
    if sigmas.is_empty() {
        return Err(config_error(sigmas_entry.line, "sigmas", "empty list"));
    }
    Ok(TableBlock {
        n1: parse_entry("n1", required("n1")?)?,
        n2: parse_entry("n2", required("n2")?)?,
        mu1: opt(block, "mu1")?.unwrap_or(0.0),
        mu2: opt(block, "mu2")?.unwrap_or(0.0),
        sigmas,
    })
}

/// Parses and validates config text with defaults applied.
pub fn parse_config(text: &str) -> Result<Config> {
    RawConfig::parse(text)?.build()
}

/// Config text that parses back to `config`.
pub fn emit_config(config: &Config) -> String {
    let mut out = String::new();
    let mut put = |key: &str, value: String| {
        let _ = writeln!(out, "{key} = {value}");
    };
    if let Some(command) = config.command {
        put("command", command.to_string());
    }
    if let Some(n1) = config.n1 {
        put("n1", n1.to_string());
    }
    if let Some(n2) = config.n2 {
        put("n2", n2.to_string());
    }
    put("mu1", config.mu1.to_string());
    put("mu2", config.mu2.to_string());
    put("sigma1", config.sigma1.to_string());
    put("sigma2", config.sigma2.to_string());
    if let Some(s) = config.stats {
        put("x1_min", s.x1_min.to_string());
        put("x2_min", s.x2_min.to_string());
        put("t1", s.t1.to_string());
        put("t2", s.t2.to_string());
    }
    put("loss", config.loss.to_string());
    put("target", config.target.to_string());
    put("baseline", config.baseline.to_string());
    if !config.estimators.is_empty() {
        put("estimators", config.estimators.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", "));
    }
    put("reps", config.reps.to_string());
    put("seed", config.seed.to_string());
    if let Some(t) = config.threads {
        put("threads", t.to_string());
    }
    put("scheme", config.scheme.to_string());
    if let Some(p) = &config.data {
        put("data", p.display().to_string());
    }
    if let Some(p) = &config.output {
        put("output", p.display().to_string());
    }
    put("format", config.format.to_string());
    for b in &config.blocks {
        let sigmas: Vec<String> = b.sigmas.iter().map(|(s1, s2)| format!("{s1}:{s2}")).collect();
        let _ = write!(
            out,
            "\n[block]\nn1 = {}\nn2 = {}\nmu1 = {}\nmu2 = {}\nsigmas = {}\n",
            b.n1,
            b.n2,
            b.mu1,
            b.mu2,
            sigmas.join(", ")
        );
    }
    out
}
