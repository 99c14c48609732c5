//! Run configuration: CLI flags mirrored by an optional JSON config file
//! (flags override the file), complex-number literals, and tolerance
//! overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_complex::Complex64 as C64;
use serde::Deserialize;

/// Tolerance families and their defaults. Overridable per family with
/// `--tol <family>=<value>`; loosening beyond `1e-6` requires `--unsafe`.
pub const TOLERANCE_DEFAULTS: &[(&str, f64)] = &[
    ("r_unitarity", 1e-12),
    ("ybe_lax", 1e-10),
    ("ybe_monodromy", 1e-10),
    ("transfer_commutator", 1e-10),
    ("transfer_reconstruction", 1e-10),
    ("transfer_band_limit", 1e-11),
    ("transfer_asymptotics", 1e-12),
    ("hamiltonian_match", 1e-9),
    ("vector_relations", 1e-12),
    ("gauged_commutation", 1e-10),
    ("gauge_trace", 1e-12),
    ("gauge_reconstruct", 1e-12),
    ("vacuum", 1e-11),
    ("offshell", 1e-10),
    ("bae_log", 1e-12),
    ("bae_product", 1e-11),
    ("unwanted", 1e-10),
    ("lambda_band_limit", 1e-9),
    ("lambda_leading_product", 1e-10),
    ("lambda_leading_phase", 1e-10),
    ("energy_identity", 1e-9),
    ("tq_consistency", 1e-10),
];

/// Loosest tolerance allowed without `--unsafe`.
pub const SAFE_TOLERANCE_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Ybe,
    Hamiltonian,
    Commutation,
    Vacuum,
    Offshell,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "ybe" => Ok(Suite::Ybe),
            "hamiltonian" => Ok(Suite::Hamiltonian),
            "commutation" => Ok(Suite::Commutation),
            "vacuum" => Ok(Suite::Vacuum),
            "offshell" => Ok(Suite::Offshell),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite `{other}` (expected ybe|hamiltonian|commutation|vacuum|offshell|all)"
            )),
        }
    }
}

/// Parse a complex literal: `1.5`, `-0.3+0.2i`, `0.4i`, `1e-2-3e-1i`.
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some(body) = t.strip_suffix('i') {
        // Split into real and imaginary parts at the last +/- that is not an
        // exponent sign and not the leading sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = body[..idx]
                    .parse()
                    .map_err(|e| format!("bad real part in `{s}`: {e}"))?;
                let im_str = &body[idx..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str
                        .parse()
                        .map_err(|e| format!("bad imaginary part in `{s}`: {e}"))?
                };
                Ok(C64::new(re, im))
            }
            None => {
                let im: f64 = if body.is_empty() {
                    1.0
                } else {
                    body.parse()
                        .map_err(|e| format!("bad imaginary part in `{s}`: {e}"))?
                };
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t
            .parse()
            .map_err(|e| format!("bad real literal `{s}`: {e}"))?;
        Ok(C64::new(re, 0.0))
    }
}

/// `N=2,M=1,q=1` triple for deriving eta from the discrete constraint.
#[derive(Debug, Clone, Copy, Deserialize)]
pub struct ConstraintSpec {
    pub n: usize,
    pub m: usize,
    pub q: i64,
}

pub fn parse_constraint(s: &str) -> Result<ConstraintSpec, String> {
    let mut n = None;
    let mut m = None;
    let mut q = None;
    for part in s.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("bad constraint component `{part}` (want key=value)"))?;
        match key.trim() {
            "N" | "n" => n = Some(value.parse::<usize>().map_err(|e| e.to_string())?),
            "M" | "m" => m = Some(value.parse::<usize>().map_err(|e| e.to_string())?),
            "q" | "Q" => q = Some(value.parse::<i64>().map_err(|e| e.to_string())?),
            other => return Err(format!("unknown constraint key `{other}`")),
        }
    }
    Ok(ConstraintSpec {
        n: n.ok_or("constraint needs N=")?,
        m: m.ok_or("constraint needs M=")?,
        q: q.ok_or("constraint needs q=")?,
    })
}

/// Comma-separated integer list, e.g. branch tuples.
pub fn parse_int_list(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| e.to_string()))
        .collect()
}

/// Optional JSON config file mirroring the flags; flags override.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub suite: Option<String>,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub r: Option<i64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub q: Option<i64>,
    pub g: Option<String>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub branch: Option<Vec<i64>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub eta_from_constraint: Option<String>,
    pub format: Option<String>,
    pub output: Option<String>,
    pub tol: Option<BTreeMap<String, f64>>,
    #[serde(rename = "unsafe")]
    pub unsafe_tolerances: Option<bool>,
}

pub fn load_file_config(path: &PathBuf) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}

/// Resolved tolerance table.
#[derive(Debug, Clone)]
pub struct Tolerances {
    table: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn resolve(
        overrides: impl Iterator<Item = (String, f64)>,
        allow_unsafe: bool,
    ) -> Result<Tolerances, String> {
        let mut table: BTreeMap<String, f64> = TOLERANCE_DEFAULTS
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        for (key, value) in overrides {
            if !table.contains_key(&key) {
                return Err(format!(
                    "unknown tolerance family `{key}` (known: {})",
                    TOLERANCE_DEFAULTS
                        .iter()
                        .map(|(k, _)| *k)
                        .collect::<Vec<_>>()
                        .join(", ")
                ));
            }
            if !(value > 0.0 && value.is_finite()) {
                return Err(format!("tolerance for `{key}` must be positive, got {value}"));
            }
            if value > SAFE_TOLERANCE_LIMIT && !allow_unsafe {
                return Err(format!(
                    "tolerance {value:e} for `{key}` is looser than {SAFE_TOLERANCE_LIMIT:e}; pass --unsafe to allow"
                ));
            }
            table.insert(key, value);
        }
        Ok(Tolerances { table })
    }

    pub fn get(&self, family: &str) -> f64 {
        *self
            .table
            .get(family)
            .unwrap_or_else(|| panic!("unknown tolerance family {family}"))
    }
}

/// Parse `family=value` override strings.
pub fn parse_tol_overrides(items: &[String]) -> Result<Vec<(String, f64)>, String> {
    items
        .iter()
        .map(|item| {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("bad tolerance override `{item}` (want family=value)"))?;
            let v: f64 = value
                .parse()
                .map_err(|e| format!("bad tolerance value in `{item}`: {e}"))?;
            Ok((key.trim().to_string(), v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5").unwrap(), C64::new(0.5, 0.0));
        assert_eq!(parse_complex("-1.25").unwrap(), C64::new(-1.25, 0.0));
        assert_eq!(parse_complex("0.3+0.1i").unwrap(), C64::new(0.3, 0.1));
        assert_eq!(parse_complex("0.3-0.1i").unwrap(), C64::new(0.3, -0.1));
        assert_eq!(parse_complex("0.4i").unwrap(), C64::new(0.0, 0.4));
        assert_eq!(parse_complex("-0.4i").unwrap(), C64::new(0.0, -0.4));
        assert_eq!(parse_complex("1e-2-3e-1i").unwrap(), C64::new(0.01, -0.3));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert!(parse_complex("pear").is_err());
    }

    #[test]
    fn constraint_spec() {
        let c = parse_constraint("N=2,M=1,q=1").unwrap();
        assert_eq!((c.n, c.m, c.q), (2, 1, 1));
        assert!(parse_constraint("N=2,M=1").is_err());
    }

    #[test]
    fn tolerance_guard() {
        let ok = Tolerances::resolve([("ybe_lax".to_string(), 1e-8)].into_iter(), false).unwrap();
        assert_eq!(ok.get("ybe_lax"), 1e-8);
        assert!(Tolerances::resolve([("ybe_lax".to_string(), 1e-4)].into_iter(), false).is_err());
        assert!(Tolerances::resolve([("ybe_lax".to_string(), 1e-4)].into_iter(), true).is_ok());
        assert!(Tolerances::resolve([("nope".to_string(), 1e-9)].into_iter(), false).is_err());
    }
}
