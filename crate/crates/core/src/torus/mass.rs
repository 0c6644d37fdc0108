use std::f64::consts::PI;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{PhiPreset, SimConfig};
use super::lattice::{torus_distance, Grid, LatticeField};
use super::TorusError;

/// How far `‖ζ‖₂` may be from one before [`outside_mass`] refuses.
pub const NORM_SLACK: f64 = 1e-6;

/// Zero set of `w`, the singular set of `φ = (w)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SingularSet {
    Points { points: Vec<(f64, f64)> },
    /// `w ≡ 0`.
    Everywhere,
}

impl SingularSet {
    pub fn is_empty(&self) -> bool {
        matches!(self, SingularSet::Points { points } if points.is_empty())
    }

    /// Whether `(x, y)` lies in the closed `δ`-neighborhood.
    pub fn near(&self, at: (f64, f64), delta: f64) -> bool {
        match self {
            SingularSet::Everywhere => true,
            SingularSet::Points { points } => points.iter().any(|&z| torus_distance(at, z) <= delta),
        }
    }
}

/// Zeros of the preset: exact for `constant` and `sin_zeros`; for Fourier
/// presets, grid sites where `w` vanishes plus the centers of cells around
/// which `w` winds.
pub fn singular_set(preset: &PhiPreset, grid: Grid) -> SingularSet {
    match preset {
        PhiPreset::Constant { re, im } => {
            if *re == 0.0 && *im == 0.0 {
                SingularSet::Everywhere
            } else {
                SingularSet::Points { points: vec![] }
            }
        }
        PhiPreset::SinZeros => SingularSet::Points {
            points: vec![(0.0, 0.0), (PI, 0.0), (0.0, PI), (PI, PI)],
        },
        PhiPreset::Fourier { .. } => {
            let w = grid.sample(preset);
            if w.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                SingularSet::Everywhere
            } else {
                SingularSet::Points {
                    points: winding_zeros(grid, &w),
                }
            }
        }
    }
}

fn winding_zeros(grid: Grid, w: &[Complex64]) -> Vec<(f64, f64)> {
    let n = grid.n;
    let h = grid.spacing();
    let scale = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = 1e-12 * scale;
    let mut out: Vec<(f64, f64)> = Vec::new();
    let add = |p: (f64, f64), out: &mut Vec<(f64, f64)>| {
        if out.iter().all(|&q| torus_distance(p, q) > 0.5 * h) {
            out.push(p);
        }
    };
    for k in 0..grid.sites() {
        if w[k].norm() <= tiny {
            add(grid.coords(k), &mut out);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let corners = [
                w[grid.index(i, j)],
                w[grid.index((i + 1) % n, j)],
                w[grid.index((i + 1) % n, (j + 1) % n)],
                w[grid.index(i, (j + 1) % n)],
            ];
            if corners.iter().any(|z| z.norm() <= tiny) {
                continue;
            }
            let mut turn = 0.0;
            for a in 0..4 {
                turn += (corners[(a + 1) % 4] / corners[a]).arg();
            }
            if (turn / (2.0 * PI)).round() != 0.0 {
                add(((i as f64 + 0.5) * h, (j as f64 + 0.5) * h), &mut out);
            }
        }
    }
    out
}

/// Fraction of `‖ζ‖₂²` carried by sites farther than `δ` from the singular
/// set. The field must have unit norm up to [`NORM_SLACK`].
pub fn outside_mass(field: &LatticeField, zeros: &SingularSet, delta: f64) -> Result<f64, TorusError> {
    let norm = field.norm_sqr().sqrt();
    if !field.is_finite() || (norm - 1.0).abs() > NORM_SLACK {
        return Err(TorusError::NotNormalized { norm });
    }
    let grid = field.grid();
    let rho = field.density();
    let total: f64 = rho.iter().sum();
    let outside: f64 = rho
        .iter()
        .enumerate()
        .filter(|&(k, _)| !zeros.near(grid.coords(k), delta))
        .map(|(_, r)| r)
        .sum();
    Ok((outside / total).clamp(0.0, 1.0))
}

pub fn outside_mass_for(field: &LatticeField, config: &SimConfig) -> Result<f64, TorusError> {
    let zeros = singular_set(&config.phi, field.grid());
    outside_mass(field, &zeros, config.delta)
}
