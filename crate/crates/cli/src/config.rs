//! Descriptor and config-file parsing.
//!
//! Every value the binary accepts arrives as text, either from a flag or
//! from a flat `key = value` file, and both routes go through the parsers
//! here so they cannot drift apart. Flags override file keys; a key that
//! no parser consumes is a configuration error, reported by name before
//! any computation starts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use freeflow_core::eulerian::EvolveOptions;
use freeflow_core::io::read_density_csv;
use freeflow_core::measures::{Density1D, Grid1D, PotentialSpec, VelocityField1D};
use freeflow_core::{Error, Result};

/// Grid used when neither a flag nor a config key names one.
pub const DEFAULT_GRID: &str = "-8:8:512";

fn bad(key: &'static str, why: impl Into<String>) -> Error {
    Error::InvalidInput {
        what: key,
        why: why.into(),
    }
}

/// Parses a float, naming the offending key on failure.
pub fn parse_f64(key: &'static str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| bad(key, format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(bad(key, format!("`{s}` is not finite")));
    }
    Ok(v)
}

/// Parses an unsigned integer, naming the offending key on failure.
pub fn parse_u64(key: &'static str, s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| bad(key, format!("`{s}` is not a nonnegative integer")))
}

/// Parses a count, naming the offending key on failure.
pub fn parse_usize(key: &'static str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| bad(key, format!("`{s}` is not a nonnegative integer")))
}

/// Parses `A:B:M` into a grid over `[A, B]` with `M` cells.
pub fn parse_grid(s: &str) -> Result<Grid1D<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("grid", format!("expected A:B:M, got `{s}`")));
    }
    let a = parse_f64("grid", parts[0])?;
    let b = parse_f64("grid", parts[1])?;
    let m = parse_usize("grid", parts[2])?;
    Grid1D::new(a, b, m)
}

/// Parses a comma-separated list of interpolation parameters.
pub fn parse_times(key: &'static str, s: &str) -> Result<Vec<f64>> {
    let ts: Vec<f64> = s
        .split(',')
        .map(|p| parse_f64(key, p))
        .collect::<Result<_>>()?;
    if ts.is_empty() {
        return Err(bad(key, "empty list"));
    }
    Ok(ts)
}

/// An initial-condition descriptor, realized on a grid later.
///
/// `gauss:M,V` is a Gaussian with mean `M` and variance `V` (the second
/// field is the variance, not the standard deviation), `uniform:A,B` a
/// uniform block, `file:PATH` a density CSV produced by an earlier run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Gauss { mean: f64, variance: f64 },
    Uniform { lo: f64, hi: f64 },
    File(PathBuf),
}

impl InitSpec {
    pub fn parse(key: &'static str, s: &str) -> Result<Self> {
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| bad(key, format!("`{s}` has no `kind:...` separator")))?;
        match head.trim() {
            "gauss" => {
                let (m, v) = pair(key, rest)?;
                if !(v > 0.0) {
                    return Err(bad(key, format!("variance {v} must be positive")));
                }
                Ok(InitSpec::Gauss {
                    mean: m,
                    variance: v,
                })
            }
            "uniform" => {
                let (lo, hi) = pair(key, rest)?;
                Ok(InitSpec::Uniform { lo, hi })
            }
            "file" => Ok(InitSpec::File(PathBuf::from(rest.trim()))),
            other => Err(bad(
                key,
                format!("unknown kind `{other}`; expected gauss, uniform, or file"),
            )),
        }
    }

    /// Builds the density on `grid`.
    pub fn realize(&self, grid: Grid1D<f64>) -> Result<Density1D<f64>> {
        match self {
            InitSpec::Gauss { mean, variance } => {
                Density1D::gaussian(grid, *mean, variance.sqrt())
            }
            InitSpec::Uniform { lo, hi } => Density1D::uniform(grid, *lo, *hi),
            InitSpec::File(path) => read_density_csv(path, grid),
        }
    }
}

fn pair(key: &'static str, s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| bad(key, format!("`{s}` needs two comma-separated numbers")))?;
    Ok((parse_f64(key, a)?, parse_f64(key, b)?))
}

/// Parses `zero` or `quad:BETA` (the potential `beta x^2 / 2`).
pub fn parse_potential(s: &str) -> Result<PotentialSpec<f64>> {
    if s.trim() == "zero" {
        return Ok(PotentialSpec::zero());
    }
    match s.split_once(':') {
        Some(("quad", beta)) => PotentialSpec::quadratic(parse_f64("potential", beta)?),
        _ => Err(bad(
            "potential",
            format!("`{s}` is not `zero` or `quad:BETA`"),
        )),
    }
}

/// Noising-pattern selector for the particle subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternArg {
    Vp,
    Ve,
}

impl PatternArg {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "vp" => Ok(PatternArg::Vp),
            "ve" => Ok(PatternArg::Ve),
            other => Err(bad("pattern", format!("`{other}` is not vp or ve"))),
        }
    }
}

/// Built-in named velocity fields for the shock experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldArg {
    NegIdentity,
    NegSine,
    MonotoneDemo,
}

impl FieldArg {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "neg-identity" => Ok(FieldArg::NegIdentity),
            "neg-sine" => Ok(FieldArg::NegSine),
            "monotone-demo" => Ok(FieldArg::MonotoneDemo),
            other => Err(bad(
                "field",
                format!("`{other}` is not neg-identity, neg-sine, or monotone-demo"),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FieldArg::NegIdentity => "neg-identity",
            FieldArg::NegSine => "neg-sine",
            FieldArg::MonotoneDemo => "monotone-demo",
        }
    }

    pub fn realize(&self, grid: &Grid1D<f64>) -> Result<VelocityField1D<f64>> {
        match self {
            FieldArg::NegIdentity => VelocityField1D::new(|x: f64, _| -x, grid, 0.0),
            FieldArg::NegSine => VelocityField1D::new(|x: f64, _| -x.sin(), grid, 0.0),
            FieldArg::MonotoneDemo => VelocityField1D::new(|x: f64, _| x, grid, 0.0),
        }
    }
}

/// Artifact encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(bad("format", format!("`{other}` is not csv or json"))),
        }
    }
}

/// The grid-solver stepping options assembled from `dt` and `snapshots`.
pub fn evolve_options(dt: Option<f64>, snapshots: usize) -> Result<EvolveOptions<f64>> {
    if snapshots < 2 {
        return Err(bad("snapshots", "need at least the two endpoints"));
    }
    if let Some(step) = dt {
        if !(step > 0.0) {
            return Err(bad("dt", format!("time step {step} must be positive")));
        }
    }
    Ok(EvolveOptions { dt, snapshots })
}

/// A parsed config file: flat `key = value` pairs (a TOML-compatible
/// subset), `#` comments, quoted or bare values.
#[derive(Debug, Default)]
pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig::default()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            why: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = n + 1;
            let (k, v) = line.split_once('=').ok_or_else(|| {
                bad("config", format!("line {lineno} is not `key = value`"))
            })?;
            let key = k.trim();
            if key.is_empty()
                || !key
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
            {
                return Err(bad("config", format!("bad key `{key}` on line {lineno}")));
            }
            let value = parse_value(v.trim(), lineno)?;
            if entries.insert(key.to_string(), value).is_some() {
                return Err(bad(
                    "config",
                    format!("duplicate key `{key}` on line {lineno}"),
                ));
            }
        }
        Ok(FileConfig { entries })
    }

    /// Removes and returns a key's value; each command takes the keys it
    /// understands and then calls [`FileConfig::ensure_consumed`].
    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    /// Errors on the first key no command consumed.
    pub fn ensure_consumed(&self) -> Result<()> {
        match self.entries.keys().next() {
            None => Ok(()),
            Some(k) => Err(bad(
                "config",
                format!("unknown key `{k}` for this command"),
            )),
        }
    }
}

fn parse_value(v: &str, lineno: usize) -> Result<String> {
    if let Some(rest) = v.strip_prefix('"') {
        let close = rest.find('"').ok_or_else(|| {
            bad("config", format!("unterminated string on line {lineno}"))
        })?;
        let inner = &rest[..close];
        if inner.contains('\\') {
            return Err(bad(
                "config",
                format!("escape sequences are not supported (line {lineno})"),
            ));
        }
        let tail = rest[close + 1..].trim();
        if !(tail.is_empty() || tail.starts_with('#')) {
            return Err(bad(
                "config",
                format!("trailing text after string on line {lineno}"),
            ));
        }
        return Ok(inner.to_string());
    }
    // bare value: cut an inline comment, then take the trimmed rest
    let body = match v.find('#') {
        Some(i) => v[..i].trim_end(),
        None => v,
    };
    if body.is_empty() {
        return Err(bad("config", format!("empty value on line {lineno}")));
    }
    Ok(body.to_string())
}

/// Flag-over-file merge for values that clap has already typed.
pub struct Merge<'a> {
    file: &'a mut FileConfig,
}

impl<'a> Merge<'a> {
    pub fn new(file: &'a mut FileConfig) -> Self {
        Merge { file }
    }

    /// Raw descriptor string (parsed later by a descriptor parser).
    pub fn string(&mut self, flag: Option<String>, key: &str) -> Option<String> {
        let file = self.file.take(key);
        flag.or(file)
    }

    pub fn path(&mut self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        let file = self.file.take(key).map(PathBuf::from);
        flag.or(file)
    }

    pub fn f64(&mut self, flag: Option<f64>, key: &'static str) -> Result<Option<f64>> {
        match (flag, self.file.take(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => parse_f64(key, &s).map(Some),
            (None, None) => Ok(None),
        }
    }

    pub fn u64(&mut self, flag: Option<u64>, key: &'static str) -> Result<Option<u64>> {
        match (flag, self.file.take(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => parse_u64(key, &s).map(Some),
            (None, None) => Ok(None),
        }
    }

    pub fn usize(
        &mut self,
        flag: Option<usize>,
        key: &'static str,
    ) -> Result<Option<usize>> {
        match (flag, self.file.take(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => parse_usize(key, &s).map(Some),
            (None, None) => Ok(None),
        }
    }
}

/// Rejects a missing required key by name.
pub fn required<T>(value: Option<T>, key: &'static str) -> Result<T> {
    value.ok_or_else(|| bad(key, "missing required key".to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_descriptor_round_trips() {
        let g = parse_grid("-8:8:512").unwrap();
        assert_eq!(g.lo(), -8.0);
        assert_eq!(g.hi(), 8.0);
        assert_eq!(g.cells(), 512);
        assert!(parse_grid("-8:8").is_err());
        assert!(parse_grid("a:8:512").is_err());
        assert!(parse_grid("-8:8:0").is_err());
    }

    #[test]
    fn gauss_descriptor_second_field_is_the_variance() {
        let spec = InitSpec::parse("init", "gauss:3,4").unwrap();
        assert_eq!(
            spec,
            InitSpec::Gauss {
                mean: 3.0,
                variance: 4.0
            }
        );
        let g = Grid1D::new(-12.0, 18.0, 1024).unwrap();
        let rho = spec.realize(g).unwrap();
        let (mean, var) = freeflow_core::measures::density_moments(&rho);
        assert!((mean - 3.0).abs() < 1e-6, "mean {mean}");
        assert!((var - 4.0).abs() < 1e-3, "variance {var}");
    }

    #[test]
    fn bad_descriptors_name_the_key() {
        for s in ["gauss:0", "gauss:0,0", "gauss:0,-1", "blob:1,2", "gauss"] {
            match InitSpec::parse("init", s) {
                Err(Error::InvalidInput { what, .. }) => assert_eq!(what, "init"),
                other => panic!("`{s}` gave {other:?}"),
            }
        }
        assert!(parse_potential("quad:x").is_err());
        assert!(parse_potential("cubic:1").is_err());
        assert!(PatternArg::parse("vpsde").is_err());
        assert!(FieldArg::parse("identity").is_err());
        assert!(OutputFormat::parse("yaml").is_err());
    }

    #[test]
    fn config_file_accepts_the_flat_subset() {
        let text = "\
            # experiment\n\
            init = \"gauss:0,1\"   # quoted\n\
            t-end = 2.0            # bare with comment\n\
            seed = 7\n\
            \n\
            out = result.csv\n";
        let mut cfg = FileConfig::parse(text).unwrap();
        assert_eq!(cfg.take("init").as_deref(), Some("gauss:0,1"));
        assert_eq!(cfg.take("t-end").as_deref(), Some("2.0"));
        assert_eq!(cfg.take("seed").as_deref(), Some("7"));
        assert_eq!(cfg.take("out").as_deref(), Some("result.csv"));
        cfg.ensure_consumed().unwrap();
    }

    #[test]
    fn config_file_rejects_malformed_lines() {
        assert!(FileConfig::parse("just words\n").is_err());
        assert!(FileConfig::parse("a = 1\na = 2\n").is_err());
        assert!(FileConfig::parse("x = \"unterminated\n").is_err());
        assert!(FileConfig::parse("x = \"a\" trailing\n").is_err());
        assert!(FileConfig::parse("x =    # nothing\n").is_err());
        assert!(FileConfig::parse("bad key = 1\n").is_err());
    }

    #[test]
    fn unconsumed_keys_are_reported_by_name() {
        let cfg = FileConfig::parse("mystery = 1\n").unwrap();
        match cfg.ensure_consumed() {
            Err(Error::InvalidInput { why, .. }) => {
                assert!(why.contains("mystery"), "message: {why}")
            }
            other => panic!("expected unknown-key error, got {other:?}"),
        }
    }

    #[test]
    fn flags_override_file_keys() {
        let mut cfg = FileConfig::parse("seed = 3\ndt = 0.5\n").unwrap();
        let mut m = Merge::new(&mut cfg);
        // flag wins, file key still consumed
        assert_eq!(m.u64(Some(9), "seed").unwrap(), Some(9));
        assert_eq!(m.f64(None, "dt").unwrap(), Some(0.5));
        cfg.ensure_consumed().unwrap();
    }
}
