//! Matrix-free LOBPCG for the lowest eigenpairs of a symmetric positive
//! semidefinite operator, with an optional Fourier preconditioner.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use super::operator::{modified_wavenumber, to_complex, to_real};
use super::TorusError;

#[derive(Clone, Debug, PartialEq)]
pub struct EigenOptions {
    pub count: usize,
    /// Relative residual tolerance: `‖Ax − λx‖ ≤ tol · λ_max`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// Euclidean-orthonormal columns.
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub lambda_max_estimate: f64,
}

const DROP_TOL: f64 = 1e-10;
const POWER_STEPS: usize = 40;

/// Lowest `opts.count` eigenpairs of `apply`, acting on vectors of length
/// `dim`. Non-convergence within `max_iter` is an error carrying the worst
/// residual reached.
pub fn lobpcg(
    dim: usize,
    apply: &dyn Fn(&[f64]) -> Vec<f64>,
    precondition: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
    opts: &EigenOptions,
) -> Result<EigenResult, TorusError> {
    if opts.count == 0 || opts.count > dim {
        return Err(TorusError::InvalidConfig(format!(
            "eigenpair count {} outside 1..={dim}",
            opts.count
        )));
    }
    let k = opts.count;
    let m = (k + k.max(4)).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let lambda_max = power_estimate(dim, apply, &mut rng);
    let threshold = opts.tol * lambda_max.max(f64::MIN_POSITIVE);

    let mut init: Vec<DVector<f64>> = Vec::with_capacity(m);
    while init.len() < m {
        let v = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        push_orthonormal(&mut init, v);
    }
    let mut x = DMatrix::from_columns(&init);
    let mut ax = apply_block(apply, &x);
    let (mut lambda, c) = ritz(&x, &ax, m);
    x = &x * &c;
    ax = &ax * &c;
    let mut p: Option<DMatrix<f64>> = None;

    let mut residuals = vec![f64::INFINITY; m];
    for it in 1..=opts.max_iter {
        let r = &ax - &x * DMatrix::from_diagonal(&DVector::from_vec(lambda.clone()));
        for (j, res) in residuals.iter_mut().enumerate() {
            *res = r.column(j).norm();
        }
        if residuals[..k].iter().all(|&res| res <= threshold) {
            return Ok(EigenResult {
                values: lambda[..k].to_vec(),
                vectors: x.columns(0, k).into_owned(),
                residuals: residuals[..k].to_vec(),
                iterations: it,
                lambda_max_estimate: lambda_max,
            });
        }

        let mut basis: Vec<DVector<f64>> = x.column_iter().map(|c| c.into_owned()).collect();
        for j in 0..m {
            let rj = r.column(j);
            let w = match precondition {
                Some(t) => DVector::from_vec(t(rj.as_slice())),
                None => rj.into_owned(),
            };
            push_orthonormal(&mut basis, w);
        }
        if let Some(p) = &p {
            for c in p.column_iter() {
                push_orthonormal(&mut basis, c.into_owned());
            }
        }
        if basis.len() == m {
            break;
        }
        let extra = DMatrix::from_columns(&basis[m..]);
        let a_extra = apply_block(apply, &extra);
        let s = DMatrix::from_columns(&basis);
        let mut as_ = DMatrix::zeros(dim, basis.len());
        as_.columns_mut(0, m).copy_from(&ax);
        as_.columns_mut(m, basis.len() - m).copy_from(&a_extra);

        let (vals, c) = ritz(&s, &as_, m);
        lambda = vals;
        x = &s * &c;
        ax = &as_ * &c;
        let tail = c.rows(m, basis.len() - m).into_owned();
        p = Some(&extra * tail);
    }
    let worst = residuals[..k].iter().cloned().fold(0.0, f64::max);
    Err(TorusError::NotConverged {
        iterations: opts.max_iter,
        residual: worst,
        threshold,
    })
}

/// Rayleigh–Ritz on span `s` (orthonormal columns): the lowest `m` Ritz
/// values and their coefficient vectors.
fn ritz(s: &DMatrix<f64>, as_: &DMatrix<f64>, m: usize) -> (Vec<f64>, DMatrix<f64>) {
    let g = s.transpose() * as_;
    let g = (&g + g.transpose()) * 0.5;
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let m = m.min(order.len());
    let vals = order[..m].iter().map(|&j| eig.eigenvalues[j]).collect();
    let cols: Vec<DVector<f64>> = order[..m]
        .iter()
        .map(|&j| eig.eigenvectors.column(j).into_owned())
        .collect();
    (vals, DMatrix::from_columns(&cols))
}

/// Modified Gram–Schmidt, applied twice; the candidate is dropped when
/// little of it survives the projection.
fn push_orthonormal(basis: &mut Vec<DVector<f64>>, mut v: DVector<f64>) {
    let n0 = v.norm();
    if !(n0 > 0.0 && n0.is_finite()) {
        return;
    }
    v /= n0;
    for _ in 0..2 {
        for b in basis.iter() {
            let c = b.dot(&v);
            v.axpy(-c, b, 1.0);
        }
    }
    let n1 = v.norm();
    if n1 > DROP_TOL {
        basis.push(v / n1);
    }
}

fn apply_block(apply: &dyn Fn(&[f64]) -> Vec<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = x
        .column_iter()
        .map(|c| DVector::from_vec(apply(c.as_slice())))
        .collect();
    DMatrix::from_columns(&cols)
}

fn power_estimate<R: Rng>(dim: usize, apply: &dyn Fn(&[f64]) -> Vec<f64>, rng: &mut R) -> f64 {
    let mut v = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
    v.normalize_mut();
    let mut est = 0.0;
    for _ in 0..POWER_STEPS {
        let w = DVector::from_vec(apply(v.as_slice()));
        est = w.norm();
        if est == 0.0 {
            break;
        }
        v = w / est;
    }
    est
}

/// `(−Δ_h + σ)⁻¹` on complex grid functions in interleaved real
/// coordinates, diagonal in Fourier space with the discrete symbol of the
/// fourth-order stencil.
pub struct FourierPreconditioner {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    symbol: Vec<f64>,
}

impl FourierPreconditioner {
    pub fn new(n: usize, shift: f64) -> Self {
        let mut planner = FftPlanner::new();
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let d: Vec<f64> = (0..n)
            .map(|m| {
                let m = m as i64;
                let m = if m < n as i64 / 2 { m } else { m - n as i64 };
                modified_wavenumber(m, h)
            })
            .collect();
        let shift = shift.max(1e-2);
        let scale = 1.0 / (n * n) as f64;
        let mut symbol = Vec::with_capacity(n * n);
        for a in &d {
            for b in &d {
                symbol.push(scale / (a * a + b * b + shift));
            }
        }
        FourierPreconditioner {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            symbol,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut z = to_complex(x);
        self.fft2(&mut z, &self.forward);
        for (v, s) in z.iter_mut().zip(&self.symbol) {
            *v *= *s;
        }
        self.fft2(&mut z, &self.inverse);
        to_real(&z)
    }

    fn fft2(&self, z: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        fft.process(z);
        transpose(z, n);
        fft.process(z);
        transpose(z, n);
    }
}

fn transpose(z: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            z.swap(i * n + j, j * n + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_op(d: Vec<f64>) -> impl Fn(&[f64]) -> Vec<f64> {
        move |x| x.iter().zip(&d).map(|(a, b)| a * b).collect()
    }

    #[test]
    fn diagonal_spectrum() {
        let d: Vec<f64> = (0..60).map(|i| ((i * 37) % 60) as f64 + 0.5).collect();
        let op = diag_op(d);
        let opts = EigenOptions {
            count: 3,
            tol: 1e-10,
            max_iter: 500,
            seed: 1,
        };
        let r = lobpcg(60, &op, None, &opts).unwrap();
        for (v, e) in r.values.iter().zip([0.5, 1.5, 2.5]) {
            assert!((v - e).abs() < 1e-8, "{:?}", r.values);
        }
        let gram = r.vectors.transpose() * &r.vectors;
        assert!((gram - DMatrix::identity(3, 3)).norm() < 1e-8);
    }

    #[test]
    fn non_convergence_is_reported() {
        let d: Vec<f64> = (0..200).map(|i| 1.0 + i as f64 * 1e-3).collect();
        let op = diag_op(d);
        let opts = EigenOptions {
            count: 2,
            tol: 1e-14,
            max_iter: 2,
            seed: 3,
        };
        assert!(matches!(
            lobpcg(200, &op, None, &opts),
            Err(TorusError::NotConverged { .. })
        ));
    }

    #[test]
    fn preconditioner_inverts_shifted_laplacian() {
        let n = 16;
        let pre = FourierPreconditioner::new(n, 2.5);
        let grid = super::super::lattice::Grid::new(n);
        let zero = vec![Complex64::new(0.0, 0.0); n * n];
        let op = super::super::operator::DeformedOperator::new(grid, zero, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..2 * n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lx: Vec<f64> = op
            .normal_real(&x)
            .iter()
            .zip(&x)
            .map(|(a, b)| a + 2.5 * b)
            .collect();
        let back = pre.apply(&lx);
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
