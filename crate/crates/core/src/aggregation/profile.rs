use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};

/// Named trade-off weights over the five trust dimensions in
/// (F, P, U, Fair, R) order. `weights` sums to 1; `raw` keeps the weights as
/// given, for display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustProfile {
    pub name: String,
    pub weights: [f64; 5],
    pub raw: [f64; 5],
}

impl TrustProfile {
    pub fn from_raw(name: impl Into<String>, raw: [f64; 5]) -> Result<Self> {
        let name = name.into();
        if raw.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(AuditError::invalid(format!(
                "profile {name} has a negative or non-finite weight"
            )));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(AuditError::invalid(format!("profile {name} has all-zero weights")));
        }
        Ok(TrustProfile {
            name,
            weights: raw.map(|w| w / total),
            raw,
        })
    }

    /// Raw notation such as `(50,100,100,50,50)/350`.
    pub fn notation(&self) -> String {
        let mut s = String::from("(");
        for (i, w) in self.raw.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", fmt_weight(*w));
        }
        let _ = write!(s, ")/{}", fmt_weight(self.raw.iter().sum()));
        s
    }
}

fn fmt_weight(w: f64) -> String {
    if w.fract() == 0.0 && w.abs() < 1e15 {
        format!("{}", w as i64)
    } else {
        format!("{w}")
    }
}

/// The ten example profiles: all dimensions, emphasis profiles, and
/// "only" profiles.
pub fn preset_profiles() -> Vec<TrustProfile> {
    [
        ("all", [100.0, 100.0, 100.0, 100.0, 100.0]),
        ("e(PU)", [50.0, 100.0, 100.0, 50.0, 50.0]),
        ("e(PUF)", [50.0, 100.0, 100.0, 100.0, 50.0]),
        ("U", [0.0, 0.0, 100.0, 0.0, 0.0]),
        ("PU", [0.0, 100.0, 100.0, 0.0, 0.0]),
        ("UF", [0.0, 0.0, 100.0, 100.0, 0.0]),
        ("e(UF)r(R)", [50.0, 50.0, 100.0, 100.0, 0.0]),
        ("UFR", [0.0, 0.0, 100.0, 100.0, 100.0]),
        ("UR", [0.0, 0.0, 100.0, 0.0, 100.0]),
        ("PUR", [0.0, 100.0, 100.0, 0.0, 100.0]),
    ]
    .into_iter()
    .map(|(n, w)| TrustProfile::from_raw(n, w).expect("valid preset"))
    .collect()
}

/// Parses `"(50,100,100,50,50)"` or `"(50,100,100,50,50)/350"`; the divisor
/// is ignored because weights are normalized anyway.
fn parse_notation(text: &str) -> Option<[f64; 5]> {
    let body = text.trim();
    let body = body.split_once('/').map_or(body, |(b, _)| b).trim();
    let inner = body.strip_prefix('(')?.strip_suffix(')')?;
    let vals: Vec<f64> = inner.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
    vals.try_into().ok()
}

/// Profile file: JSON object mapping names to five weights, given either as
/// an array of numbers or in `(a,b,c,d,e)/sum` notation. Profiles keep the
/// file's key order sorted by name.
pub fn parse_profiles(text: &str) -> Result<Vec<TrustProfile>> {
    let map: BTreeMap<String, serde_json::Value> = serde_json::from_str(text).map_err(|source| AuditError::Json {
        context: "profiles".into(),
        source,
    })?;
    map.into_iter()
        .map(|(name, v)| {
            let raw = match &v {
                serde_json::Value::String(s) => parse_notation(s),
                serde_json::Value::Array(a) => a
                    .iter()
                    .map(|x| x.as_f64())
                    .collect::<Option<Vec<f64>>>()
                    .and_then(|v| v.try_into().ok()),
                _ => None,
            }
            .ok_or_else(|| AuditError::invalid(format!("profile {name}: expected five weights")))?;
            TrustProfile::from_raw(name, raw)
        })
        .collect()
}

pub fn load_profiles(path: &Path) -> Result<Vec<TrustProfile>> {
    let text = std::fs::read_to_string(path).map_err(|source| AuditError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_profiles(&text)
}
