use std::f64::consts::PI;

use num::complex::Complex64;

use super::config::PhiPreset;

/// Uniform periodic `N × N` grid on `[0, 2π)²`; site `(i, j)` sits at
/// `(x, y) = (i h, j h)` and has flat index `i N + j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Self {
        Grid { n }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// `h²`, the area of one cell.
    pub fn cell_area(&self) -> f64 {
        self.spacing() * self.spacing()
    }

    pub fn sites(&self) -> usize {
        self.n * self.n
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn coords(&self, k: usize) -> (f64, f64) {
        let h = self.spacing();
        ((k / self.n) as f64 * h, (k % self.n) as f64 * h)
    }

    pub fn sample(&self, preset: &PhiPreset) -> Vec<Complex64> {
        (0..self.sites())
            .map(|k| {
                let (x, y) = self.coords(k);
                preset.eval(x, y)
            })
            .collect()
    }
}

/// Periodic distance on the circle of length `2π`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

pub fn torus_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    circle_distance(p.0, q.0).hypot(circle_distance(p.1, q.1))
}

/// A section of `(S⁺ ⊕ S⁻) ⊗ E` on the grid: per site the real 4-vector
/// `(Re u, Im u, Re v, Im v)` with `u` the function part and `v` the
/// coefficient of `θ̄¹`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    grid: Grid,
    sites: Vec<[f64; 4]>,
}

impl LatticeField {
    pub fn zeros(grid: Grid) -> Self {
        LatticeField {
            grid,
            sites: vec![[0.0; 4]; grid.sites()],
        }
    }

    pub fn from_parts(grid: Grid, u: &[Complex64], v: &[Complex64]) -> Self {
        assert_eq!(u.len(), grid.sites());
        assert_eq!(v.len(), grid.sites());
        let sites = u
            .iter()
            .zip(v)
            .map(|(a, b)| [a.re, a.im, b.re, b.im])
            .collect();
        LatticeField { grid, sites }
    }

    /// A pure `S⁺` field.
    pub fn from_positive(grid: Grid, u: &[Complex64]) -> Self {
        Self::from_parts(grid, u, &vec![Complex64::new(0.0, 0.0); grid.sites()])
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn sites(&self) -> &[[f64; 4]] {
        &self.sites
    }

    pub fn u(&self) -> Vec<Complex64> {
        self.sites.iter().map(|s| Complex64::new(s[0], s[1])).collect()
    }

    pub fn v(&self) -> Vec<Complex64> {
        self.sites.iter().map(|s| Complex64::new(s[2], s[3])).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.sites.iter().flatten().all(|x| x.is_finite())
    }

    /// `|u|² + |v|²` per site.
    pub fn density(&self) -> Vec<f64> {
        self.sites.iter().map(|s| s.iter().map(|x| x * x).sum()).collect()
    }

    /// `‖ζ‖₂² = h² Σ |ζ|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.grid.cell_area() * self.density().iter().sum::<f64>()
    }

    pub fn scale(&mut self, c: f64) {
        for s in &mut self.sites {
            for x in s.iter_mut() {
                *x *= c;
            }
        }
    }

    /// Real `L²` inner product.
    pub fn real_inner(&self, other: &LatticeField) -> f64 {
        self.grid.cell_area()
            * self
                .sites
                .iter()
                .zip(&other.sites)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>())
                .sum::<f64>()
    }
}
