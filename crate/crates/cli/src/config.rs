//! Config-file loading and the small parsers shared by the subcommands:
//! grids, control functions, families, and the seed resolution chain.

use crate::report::CliError;
use monomial_lab::{linear_grid, ControlFunction, EquationFamily, Mode, Preset, Scalar};
use std::collections::BTreeMap;
use std::path::Path;

/// Environment variable consulted when neither flag nor config set a seed.
pub const SEED_ENV: &str = "MONOMIAL_LAB_SEED";

/// A parsed `key=value` config file. Keys are unique; the last assignment
/// wins. Lines that are empty or start with `#` are skipped.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(
                    "BadConfig",
                    format!("line {}: expected key=value, got {line:?}", lineno + 1),
                )
            })?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::usage("BadConfig", format!("cannot read {}: {e}", path.display()))
        })?;
        ConfigFile::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Rejects keys outside the allowed set (catches typos early).
    pub fn restrict_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.entries.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::usage(
                    "BadConfig",
                    format!("unknown config key {key:?}; allowed: {}", allowed.join(", ")),
                ));
            }
        }
        Ok(())
    }
}

/// `lo,hi,n` into a uniform grid in the given mode.
pub fn parse_grid(text: &str, mode: Mode) -> Result<Vec<Scalar>, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::usage("BadGrid", format!("expected lo,hi,n with n >= 1, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = Scalar::parse(parts[0], mode)
        .map_err(|e| CliError::usage("BadGrid", e.to_string()))?;
    let hi = Scalar::parse(parts[1], mode)
        .map_err(|e| CliError::usage("BadGrid", e.to_string()))?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n < 1 {
        return Err(bad());
    }
    Ok(linear_grid(&lo, &hi, n))
}

/// True when the grid bounds contain a float-only literal.
pub fn grid_requires_float(text: &str) -> bool {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    parts
        .iter()
        .take(2)
        .any(|p| p.contains(['.', 'e', 'E']))
}

/// A control-function request: `auto`, `const:DELTA`, or `power:p=P,w=W`.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiSpec {
    Auto,
    Constant { delta: f64 },
    Power { p: f64, weight: f64 },
}

impl PsiSpec {
    pub fn parse(text: &str) -> Result<PsiSpec, CliError> {
        let bad = |msg: String| CliError::usage("BadPsi", msg);
        let t = text.trim();
        if t == "auto" {
            return Ok(PsiSpec::Auto);
        }
        if let Some(rest) = t.strip_prefix("const:") {
            let delta: f64 = rest
                .trim()
                .parse()
                .map_err(|_| bad(format!("expected const:DELTA, got {text:?}")))?;
            if !delta.is_finite() || delta < 0.0 {
                return Err(bad(format!("delta must be finite and nonnegative, got {delta}")));
            }
            return Ok(PsiSpec::Constant { delta });
        }
        if let Some(rest) = t.strip_prefix("power:") {
            let mut p = None;
            let mut w = None;
            for item in rest.split(',') {
                let (k, v) = item
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| bad(format!("expected power:p=P,w=W, got {text:?}")))?;
                let parsed: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("bad number {v:?} in {text:?}")))?;
                match k.trim() {
                    "p" => p = Some(parsed),
                    "w" => w = Some(parsed),
                    other => return Err(bad(format!("unknown field {other:?} in {text:?}"))),
                }
            }
            let (p, weight) = match (p, w) {
                (Some(p), Some(w)) => (p, w),
                _ => return Err(bad(format!("power control needs p and w, got {text:?}"))),
            };
            if !weight.is_finite() || weight < 0.0 || !p.is_finite() {
                return Err(bad(format!("p and w must be finite with w >= 0, got {text:?}")));
            }
            return Ok(PsiSpec::Power { p, weight });
        }
        Err(bad(format!(
            "expected auto, const:DELTA, or power:p=P,w=W, got {text:?}"
        )))
    }

    /// Builds the concrete control when the request is not `auto`.
    pub fn to_control(&self) -> Option<ControlFunction> {
        match self {
            PsiSpec::Auto => None,
            PsiSpec::Constant { delta } => Some(ControlFunction::constant(*delta)),
            PsiSpec::Power { p, weight } => Some(ControlFunction::power(*p, *weight)),
        }
    }
}

/// `--family`: either a preset name or eight comma-separated numbers
/// `a,b,c1,c2,c3,c4,c5,c6`.
pub fn parse_family(text: &str, mode: Mode) -> Result<EquationFamily, CliError> {
    if let Ok(preset) = text.trim().parse::<Preset>() {
        return Ok(preset.family(mode));
    }
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 8 {
        return Err(CliError::usage(
            "InvalidFamily",
            format!(
                "expected a preset (quadratic, cubic, quartic, halving_additive) \
                 or a,b,c1,c2,c3,c4,c5,c6; got {text:?}"
            ),
        ));
    }
    let mut nums = Vec::with_capacity(8);
    for p in &parts {
        nums.push(
            Scalar::parse(p, mode)
                .map_err(|e| CliError::usage("InvalidFamily", e.to_string()))?,
        );
    }
    let c: [Scalar; 6] = nums.split_off(2).try_into().expect("six coefficients");
    let b = nums.pop().expect("b");
    let a = nums.pop().expect("a");
    EquationFamily::new(a, b, c)
        .map_err(|e| CliError::usage("InvalidFamily", e.to_string()))
}

/// True when a family string holds float-only literals (presets never do).
pub fn family_requires_float(text: &str) -> bool {
    text.trim().parse::<Preset>().is_err() && text.contains(['.', 'e', 'E'])
}

/// Seed precedence: explicit flag, then config, then the environment
/// variable, then zero.
pub fn resolve_seed(
    flag: Option<u64>,
    config: Option<&ConfigFile>,
) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(cfg) = config {
        if let Some(raw) = cfg.get("seed") {
            return raw.parse().map_err(|_| {
                CliError::usage("BadConfig", format!("seed must be a u64, got {raw:?}"))
            });
        }
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw.parse().map_err(|_| {
            CliError::usage(
                "BadConfig",
                format!("{SEED_ENV} must be a u64, got {raw:?}"),
            )
        }),
        Err(_) => Ok(0),
    }
}
