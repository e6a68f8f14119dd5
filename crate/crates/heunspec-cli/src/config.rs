//! Line-oriented `key = value` parameter files and the merged run
//! configuration. Flags override file values; duplicate keys warn and the
//! last occurrence wins; parse and domain errors carry the line number.

use std::fmt;
use std::path::Path;

/// Parameter state after merging preset defaults, an optional config file,
/// and command-line overrides.
#[derive(Debug, Clone)]
pub struct ParamSet {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub b_field: f64,
    pub nu: f64,
    pub n: u32,
    pub m: i32,
    pub quark_mass: Option<f64>,
    pub theta: Option<f64>,
    pub xi: Option<f64>,
}

impl ParamSet {
    /// Charmonium-preset defaults with the standard field configuration.
    pub fn defaults(preset: heunspec::Species) -> Self {
        let (params, fields) = heunspec::preset(preset);
        Self {
            mu: params.mu,
            a: params.a,
            b: params.b,
            g: params.g,
            b_field: fields.b_field,
            nu: fields.nu,
            n: 1,
            m: 1,
            quark_mass: params.quark_mass,
            theta: None,
            xi: None,
        }
    }

    pub fn phys_params(&self) -> Result<heunspec::PhysParams, ConfigError> {
        let mut p = heunspec::PhysParams::new(self.mu, self.a, self.b, self.g)
            .map_err(|e| ConfigError::domain(e.to_string()))?;
        p.quark_mass = self.quark_mass;
        Ok(p)
    }

    pub fn field_config(&self) -> Result<heunspec::FieldConfig, ConfigError> {
        heunspec::FieldConfig::new(self.b_field, self.nu)
            .map_err(|e| ConfigError::domain(e.to_string()))
    }
}

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), message: message.into() }
    }
    pub fn domain(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {line}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Apply a `key = value` file on top of `set`. UTF-8, `#` comments, blank
/// lines allowed. Unknown keys, malformed numbers, and domain violations
/// are errors with the offending line number; duplicate keys warn on
/// standard error and keep the last value.
pub fn apply_file(set: &mut ParamSet, path: &Path) -> Result<(), ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::domain(format!("cannot read {}: {e}", path.display())))?;
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::at(line_no, format!("expected `key = value`, got `{raw}`")));
        };
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            eprintln!("warning: config line {line_no}: duplicate key `{key}`, last value wins");
        } else {
            seen.push(key.to_string());
        }
        apply_pair(set, key, value).map_err(|msg| ConfigError::at(line_no, msg))?;
    }
    Ok(())
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    let x: f64 = value
        .parse()
        .map_err(|_| format!("`{key}` needs a number, got `{value}`"))?;
    if !x.is_finite() {
        return Err(format!("`{key}` must be finite, got `{value}`"));
    }
    Ok(x)
}

fn apply_pair(set: &mut ParamSet, key: &str, value: &str) -> Result<(), String> {
    match key {
        "mu" => {
            let x = parse_f64(key, value)?;
            if x <= 0.0 {
                return Err(format!("mu = {x} violates mu > 0"));
            }
            set.mu = x;
        }
        "a" => {
            let x = parse_f64(key, value)?;
            if x <= 0.0 {
                return Err(format!("a = {x} violates a > 0"));
            }
            set.a = x;
        }
        "b" => {
            let x = parse_f64(key, value)?;
            if x < 0.0 {
                return Err(format!("b = {x} violates b >= 0"));
            }
            set.b = x;
        }
        "g" => {
            let x = parse_f64(key, value)?;
            if x < 0.0 {
                return Err(format!("g = {x} violates g >= 0"));
            }
            set.g = x;
        }
        "B" => {
            let x = parse_f64(key, value)?;
            if x < 0.0 {
                return Err(format!("B = {x} violates B >= 0"));
            }
            set.b_field = x;
        }
        "nu" => set.nu = parse_f64(key, value)?,
        "n" => {
            let x: u32 = value.parse().map_err(|_| format!("`n` needs an integer >= 1, got `{value}`"))?;
            if x < 1 {
                return Err("n must be >= 1".into());
            }
            set.n = x;
        }
        "m" => {
            set.m = value.parse().map_err(|_| format!("`m` needs an integer, got `{value}`"))?;
        }
        "quark_mass" => {
            let x = parse_f64(key, value)?;
            if x <= 0.0 {
                return Err(format!("quark_mass = {x} violates quark_mass > 0"));
            }
            set.quark_mass = Some(x);
        }
        "theta" => {
            let x = parse_f64(key, value)?;
            if x <= 0.0 {
                return Err(format!("theta = {x} violates theta > 0"));
            }
            set.theta = Some(x);
        }
        "xi" => set.xi = Some(parse_f64(key, value)?),
        other => return Err(format!("unknown key `{other}`")),
    }
    Ok(())
}

/// Parse a `lo:hi:steps` range specification.
pub fn parse_range(spec: &str) -> Result<(f64, f64, usize), ConfigError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(ConfigError::domain(format!("range `{spec}` must be lo:hi:steps")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| ConfigError::domain(format!("range lower bound `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| ConfigError::domain(format!("range upper bound `{}`", parts[1])))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| ConfigError::domain(format!("range step count `{}`", parts[2])))?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(ConfigError::domain(format!("range `{spec}` needs lo < hi")));
    }
    if steps < 2 {
        return Err(ConfigError::domain(format!("range `{spec}` needs steps >= 2")));
    }
    Ok((lo, hi, steps))
}

/// Parse a temperature specification: either a single value or `lo:hi:steps`.
pub fn parse_temperatures(spec: &str) -> Result<Vec<f64>, ConfigError> {
    if spec.contains(':') {
        let (lo, hi, steps) = parse_range(spec)?;
        if lo <= 0.0 {
            return Err(ConfigError::domain(format!("temperature range `{spec}` needs lo > 0")));
        }
        Ok((0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect())
    } else {
        let t: f64 = spec
            .parse()
            .map_err(|_| ConfigError::domain(format!("temperature `{spec}`")))?;
        if !(t.is_finite() && t > 0.0) {
            return Err(ConfigError::domain(format!("temperature {t} must be > 0")));
        }
        Ok(vec![t])
    }
}
