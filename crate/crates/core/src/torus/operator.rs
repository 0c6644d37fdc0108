use nalgebra::DMatrix;
use num::complex::Complex64;

use super::config::SimConfig;
use super::lattice::{Grid, LatticeField};

/// `D_s u = (∂_x + i∂_y)u − s·conj(w u)`, the coefficient of `θ̄¹`, with
/// fourth-order central periodic differences.
///
/// Real-linear but not complex-linear. Its transpose for the real inner
/// product `Re Σ a b̄` is `D_sᵀ v = (−∂_x + i∂_y)v − s·conj(w v)`.
#[derive(Clone, Debug)]
pub struct DeformedOperator {
    grid: Grid,
    w: Vec<Complex64>,
    s: f64,
}

impl DeformedOperator {
    pub fn new(grid: Grid, w: Vec<Complex64>, s: f64) -> Self {
        assert_eq!(w.len(), grid.sites());
        DeformedOperator { grid, w, s }
    }

    pub fn assemble(config: &SimConfig, s: f64) -> Self {
        let grid = Grid::new(config.grid);
        Self::new(grid, grid.sample(&config.phi), s)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn w(&self) -> &[Complex64] {
        &self.w
    }

    pub fn with_s(&self, s: f64) -> Self {
        DeformedOperator {
            grid: self.grid,
            w: self.w.clone(),
            s,
        }
    }

    /// `(∂_x u, ∂_y u)`.
    fn gradient(&self, u: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.grid.n;
        let c = 1.0 / (12.0 * self.grid.spacing());
        let mut dx = vec![Complex64::new(0.0, 0.0); n * n];
        let mut dy = vec![Complex64::new(0.0, 0.0); n * n];
        let wrap = |a: usize, d: isize| (a as isize + d).rem_euclid(n as isize) as usize;
        for i in 0..n {
            let (ip1, ip2, im1, im2) = (wrap(i, 1), wrap(i, 2), wrap(i, -1), wrap(i, -2));
            for j in 0..n {
                let (jp1, jp2, jm1, jm2) = (wrap(j, 1), wrap(j, 2), wrap(j, -1), wrap(j, -2));
                let at = |a: usize, b: usize| u[a * n + b];
                dx[i * n + j] =
                    (at(im2, j) - at(ip2, j) + (at(ip1, j) - at(im1, j)) * 8.0) * c;
                dy[i * n + j] =
                    (at(i, jm2) - at(i, jp2) + (at(i, jp1) - at(i, jm1)) * 8.0) * c;
            }
        }
        (dx, dy)
    }

    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let (dx, dy) = self.gradient(u);
        let i = Complex64::i();
        (0..u.len())
            .map(|k| dx[k] + i * dy[k] - (self.w[k] * u[k]).conj() * self.s)
            .collect()
    }

    pub fn apply_transpose(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (dx, dy) = self.gradient(v);
        let i = Complex64::i();
        (0..v.len())
            .map(|k| -dx[k] + i * dy[k] - (self.w[k] * v[k]).conj() * self.s)
            .collect()
    }

    /// `D_sᵀ D_s`.
    pub fn normal(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.apply_transpose(&self.apply(u))
    }

    /// The odd operator `(u, v) ↦ (D_sᵀ v, D_s u)` on the full 4-real field.
    pub fn apply_field(&self, f: &LatticeField) -> LatticeField {
        LatticeField::from_parts(self.grid, &self.apply_transpose(&f.v()), &self.apply(&f.u()))
    }

    /// `D_sᵀ D_s` on interleaved real coordinates `[Re u₀, Im u₀, Re u₁, …]`.
    pub fn normal_real(&self, x: &[f64]) -> Vec<f64> {
        to_real(&self.normal(&to_complex(x)))
    }

    /// Dense real matrix of `D_s` in interleaved coordinates; meant for small
    /// grids only.
    pub fn dense(&self) -> DMatrix<f64> {
        let m = 2 * self.grid.sites();
        let mut out = DMatrix::zeros(m, m);
        let mut e = vec![0.0; m];
        for col in 0..m {
            e[col] = 1.0;
            let img = to_real(&self.apply(&to_complex(&e)));
            out.set_column(col, &nalgebra::DVector::from_vec(img));
            e[col] = 0.0;
        }
        out
    }
}

pub fn to_real(z: &[Complex64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

pub fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

/// Discrete symbol of the fourth-order first-derivative stencil at integer
/// wavenumber `m`: `(8 sin(mh) − sin(2mh)) / (6h)`.
pub fn modified_wavenumber(m: i64, h: f64) -> f64 {
    let t = m as f64 * h;
    (8.0 * t.sin() - (2.0 * t).sin()) / (6.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn real_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x * y.conj()).re).sum()
    }

    fn sin_op(n: usize, s: f64) -> DeformedOperator {
        let g = Grid::new(n);
        DeformedOperator::new(g, g.sample(&super::super::config::PhiPreset::SinZeros), s)
    }

    #[test]
    fn transpose_consistency() {
        let op = sin_op(32, 5.0);
        let x = random_field(32 * 32, 1);
        let y = random_field(32 * 32, 2);
        let lhs = real_inner(&op.apply(&x), &y);
        let rhs = real_inner(&x, &op.apply_transpose(&y));
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn plane_wave_symbol() {
        let g = Grid::new(64);
        let op = DeformedOperator::new(g, vec![Complex64::new(0.0, 0.0); g.sites()], 3.0);
        let (m, k) = (2i64, -1i64);
        let u: Vec<Complex64> = (0..g.sites())
            .map(|p| {
                let (x, y) = g.coords(p);
                Complex64::from_polar(1.0, m as f64 * x + k as f64 * y)
            })
            .collect();
        let du = op.apply(&u);
        let ratio = (real_inner(&du, &du) / real_inner(&u, &u)).sqrt();
        let continuum = (m as f64).hypot(k as f64);
        assert!((ratio - continuum).abs() < 1e-3 * continuum);
        let h = g.spacing();
        let discrete = modified_wavenumber(m, h).hypot(modified_wavenumber(k, h));
        assert!((ratio - discrete).abs() < 1e-12);
    }

    #[test]
    fn constant_input() {
        let g = Grid::new(16);
        let op = DeformedOperator::new(g, vec![Complex64::new(1.0, 0.0); g.sites()], 4.0);
        let u0 = Complex64::new(0.3, -0.7);
        let du = op.apply(&vec![u0; g.sites()]);
        for z in du {
            assert!((z + u0.conj() * 4.0).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_matches_matvec() {
        let op = sin_op(16, 2.0);
        let d = op.dense();
        let x = random_field(256, 3);
        let via_dense = &d * nalgebra::DVector::from_vec(to_real(&x));
        let via_op = to_real(&op.apply(&x));
        for (a, b) in via_dense.iter().zip(&via_op) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
