//! Instance configuration: JSON ingestion with exhaustive schema validation.
//! Rationals travel as "p/q" strings and are never parsed as floats.

use crate::error::{Error, Result};
use crate::lattice::{box_elements, BoxElement, GitPresentation, LineBundleTwist, StackyFan};
use crate::rational::*;
use num::complex::Complex64;
use num::{Signed, Zero};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Deserialize)]
pub struct RawConfig {
    pub name: String,
    pub n: usize,
    pub rays: Vec<Vec<i64>>,
    #[serde(default)]
    pub extra_vectors: Vec<Vec<i64>>,
    pub eta: Vec<String>,
    pub twist: Vec<String>,
    pub t: Vec<ReIm>,
    pub z: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub degree_bound: String,
    #[serde(default)]
    pub seeds: Seeds,
    /// Optional override for the nef-adapted dual basis, rows in the
    /// canonical kernel coordinates.
    #[serde(default)]
    pub p_basis: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct Tolerances {
    #[serde(default = "default_series_tol")]
    pub series: f64,
    #[serde(default = "default_quad_tol")]
    pub quadrature: f64,
    #[serde(default = "default_compare_tol")]
    pub compare_rel: f64,
}

fn default_series_tol() -> f64 {
    1e-10
}
fn default_quad_tol() -> f64 {
    1e-9
}
fn default_compare_tol() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            series: default_series_tol(),
            quadrature: default_quad_tol(),
            compare_rel: default_compare_tol(),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct Seeds {
    #[serde(default = "default_seed")]
    pub localization: u64,
}

fn default_seed() -> u64 {
    42
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds {
            localization: default_seed(),
        }
    }
}

/// A validated instance ready for computation.
#[derive(Debug, Clone)]
pub struct InstanceConfig {
    pub name: String,
    pub git: GitPresentation,
    pub fan: StackyFan,
    pub boxes: Vec<BoxElement>,
    pub twist: LineBundleTwist,
    pub t: Vec<Complex64>,
    pub z: f64,
    pub tolerances: Tolerances,
    pub degree_bound: Rat,
    pub seeds: Seeds,
}

impl InstanceConfig {
    /// The evaluation point of the B-side comparisons: the twist-compatible
    /// translate t - 2 pi i h.
    pub fn t_effective(&self) -> Vec<Complex64> {
        self.t
            .iter()
            .zip(&self.twist.h)
            .map(|(t, h)| t - Complex64::new(0.0, 2.0 * std::f64::consts::PI * rat_to_f64(h)))
            .collect()
    }
}

pub fn load_config(path: &Path) -> Result<InstanceConfig> {
    let text = std::fs::read_to_string(path)?;
    let raw: RawConfig =
        serde_json::from_str(&text).map_err(|e| Error::ParseError(e.to_string()))?;
    validate(raw)
}

/// Validate a raw config, accumulating every schema violation.
pub fn validate(raw: RawConfig) -> Result<InstanceConfig> {
    let mut violations: Vec<String> = Vec::new();
    if raw.n == 0 {
        violations.push("/n: must be at least 1".into());
    }
    if raw.rays.len() < raw.n {
        violations.push("/rays: need at least n rays".into());
    }
    for (i, ray) in raw.rays.iter().enumerate() {
        if ray.len() != raw.n {
            violations.push(format!("/rays/{i}: expected {} coordinates", raw.n));
        }
    }
    for (i, v) in raw.extra_vectors.iter().enumerate() {
        if v.len() != raw.n {
            violations.push(format!("/extra_vectors/{i}: expected {} coordinates", raw.n));
        }
    }
    let mut eta = Vec::new();
    for (i, s) in raw.eta.iter().enumerate() {
        match rat_from_str(s) {
            Some(v) => eta.push(v),
            None => violations.push(format!("/eta/{i}: not a rational")),
        }
    }
    let mut twist_c = Vec::new();
    for (i, s) in raw.twist.iter().enumerate() {
        match rat_from_str(s) {
            Some(v) => twist_c.push(v),
            None => violations.push(format!("/twist/{i}: not a rational")),
        }
    }
    if !(raw.z > 0.0) {
        violations.push("/z: z must be positive".into());
    }
    if !raw.z.is_finite() {
        violations.push("/z: must be finite".into());
    }
    for (i, c) in raw.t.iter().enumerate() {
        if !c.re.is_finite() || !c.im.is_finite() {
            violations.push(format!("/t/{i}: must be finite"));
        }
    }
    let degree_bound = match rat_from_str(&raw.degree_bound) {
        Some(v) if v.is_positive() || v.is_zero() => Some(v),
        Some(_) => {
            violations.push("/degree_bound: must be nonnegative".into());
            None
        }
        None => {
            violations.push("/degree_bound: not a rational".into());
            None
        }
    };
    if !violations.is_empty() {
        return Err(Error::SchemaError(violations));
    }
    let rays: Vec<Vec<Int>> = raw
        .rays
        .iter()
        .map(|r| r.iter().map(|&x| int(x)).collect())
        .collect();
    let extra: Vec<Vec<Int>> = raw
        .extra_vectors
        .iter()
        .map(|r| r.iter().map(|&x| int(x)).collect())
        .collect();
    let p_override = raw
        .p_basis
        .map(|rows| rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect());
    let (git, fan) = GitPresentation::build(raw.n, rays, extra, eta, p_override)?;
    let r_total = git.r_total;
    if twist_c.len() != r_total {
        return Err(Error::SchemaError(vec![format!(
            "/twist: expected {} entries, got {}",
            r_total,
            twist_c.len()
        )]));
    }
    if raw.t.len() != git.k() {
        return Err(Error::SchemaError(vec![format!(
            "/t: expected {} entries, got {}",
            git.k(),
            raw.t.len()
        )]));
    }
    let twist = LineBundleTwist::new(&git, twist_c)?;
    let boxes = box_elements(&fan, &git);
    Ok(InstanceConfig {
        name: raw.name,
        git,
        fan,
        boxes,
        twist,
        t: raw.t.iter().map(|c| Complex64::new(c.re, c.im)).collect(),
        z: raw.z,
        tolerances: raw.tolerances,
        degree_bound: degree_bound.expect("validated"),
        seeds: raw.seeds,
    })
}
