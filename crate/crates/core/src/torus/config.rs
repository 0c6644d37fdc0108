use std::f64::consts::PI;
use std::path::Path;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TorusError;

/// One Fourier mode `c · e^{i(kx·x + ky·y)}` of a custom `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub kx: i32,
    pub ky: i32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// The scalar field `w` with `φ = (w)` on the trivial line bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum PhiPreset {
    /// `w ≡ re + i·im`.
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// `w = sin x + i sin y`, simple zeros at `(0,0), (π,0), (0,π), (π,π)`.
    SinZeros,
    /// `w = Σ c_k e^{i k·(x, y)}`.
    Fourier { modes: Vec<FourierMode> },
}

impl PhiPreset {
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        match self {
            PhiPreset::Constant { re, im } => Complex64::new(*re, *im),
            PhiPreset::SinZeros => Complex64::new(x.sin(), y.sin()),
            PhiPreset::Fourier { modes } => modes
                .iter()
                .map(|m| {
                    Complex64::new(m.re, m.im)
                        * Complex64::from_polar(1.0, m.kx as f64 * x + m.ky as f64 * y)
                })
                .sum(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PhiPreset::Constant { .. } => "constant",
            PhiPreset::SinZeros => "sin_zeros",
            PhiPreset::Fourier { .. } => "fourier",
        }
    }
}

fn default_eig_count() -> usize {
    4
}

fn default_eig_tol() -> f64 {
    1e-8
}

fn default_max_iter() -> usize {
    4000
}

fn default_true() -> bool {
    true
}

/// Torus simulation parameters; mirrors the keys of the TOML config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Grid points per axis.
    pub grid: usize,
    pub s_values: Vec<f64>,
    pub phi: PhiPreset,
    /// Radius of the excluded neighborhood of the zero set.
    pub delta: f64,
    #[serde(default = "default_eig_count")]
    pub eig_count: usize,
    #[serde(default = "default_eig_tol")]
    pub eig_tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// FFT preconditioner for the eigensolver.
    #[serde(default = "default_true")]
    pub precondition: bool,
}

impl SimConfig {
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.grid as f64
    }

    pub fn validate(&self) -> Result<(), TorusError> {
        let bad = |msg: String| Err(TorusError::InvalidConfig(msg));
        if self.grid < 16 || !self.grid.is_power_of_two() {
            return bad(format!("grid must be a power of two >= 16, got {}", self.grid));
        }
        if self.s_values.is_empty() {
            return bad("s_values must not be empty".into());
        }
        if self.s_values.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return bad("s_values must be positive and finite".into());
        }
        if self.s_values.windows(2).any(|w| w[1] <= w[0]) {
            return bad("s_values must be strictly increasing".into());
        }
        if !(self.delta.is_finite() && self.delta > self.spacing()) {
            return bad(format!(
                "delta = {} must exceed the grid spacing {:.6}",
                self.delta,
                self.spacing()
            ));
        }
        if self.delta >= PI {
            return bad("delta must be below pi".into());
        }
        if self.eig_count == 0 {
            return bad("eig_count must be at least 1".into());
        }
        if !(self.eig_tol.is_finite() && self.eig_tol > 0.0) {
            return bad("eig_tol must be positive".into());
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        match &self.phi {
            PhiPreset::Constant { re, im } if !(re.is_finite() && im.is_finite()) => {
                return bad("constant preset must be finite".into())
            }
            PhiPreset::Fourier { modes } => {
                if modes.is_empty() {
                    return bad("fourier preset needs at least one mode".into());
                }
                let limit = (self.grid / 2) as i32;
                for m in modes {
                    if m.kx.abs() >= limit || m.ky.abs() >= limit {
                        return bad(format!("mode ({}, {}) is not resolved by the grid", m.kx, m.ky));
                    }
                    if !(m.re.is_finite() && m.im.is_finite()) {
                        return bad("fourier coefficients must be finite".into());
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, TorusError> {
        let cfg: SimConfig =
            toml::from_str(text).map_err(|e| TorusError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, TorusError> {
        let text = std::fs::read_to_string(path).map_err(|e| TorusError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
