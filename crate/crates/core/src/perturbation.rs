//! The conjugate-linear bundle map `A_φ`, its real adjoint, the
//! concentrating-condition defect, the singular set test and the standard
//! nondegenerate pairings.
//!
//! Given `φ : E → K ⊗ E*` with matrix `φ_ij` in unitary frames and a unit
//! frame `η` of `K`,
//!
//! ```text
//! (A_φ z)_i  = τ( Σ_j φ_ij η ∧ z_j )
//! (A_φ* y)_j = (-1)ⁿ Σ_i conj(φ_ij) · η⁻¹ τ(y_i)
//! ```
//!
//! where `η⁻¹` strips the factor `η` from an `(n, q)` form. Both maps are
//! conjugate-linear and exchange `S⁺ ⊗ E` and `S⁻ ⊗ E` when `n` is odd.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::{clifford_spinor, Chirality, Spinor, SymbolKind, SymbolOperator, symbol};
use crate::error::{Error, Result};
use crate::exterior::{Covector, FiberContext, Form, Monomial};
use crate::hodge::tau_graded;
use crate::matrix::Matrix;
use crate::scalar::{Scalar, ScalarMode};

/// Which summand of `E* ⊗ E* = Sym²E* ⊕ Λ²E*` the matrix lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Symmetric,
    Antisymmetric,
    General,
}

impl SymmetryClass {
    /// The class for which the concentrating condition holds in complex
    /// dimension `n` (odd): symmetric when `n ≡ 1 mod 4`, antisymmetric when
    /// `n ≡ 3 mod 4`.
    pub fn concentrating_for(n: usize) -> Option<SymmetryClass> {
        match n % 4 {
            1 => Some(SymmetryClass::Symmetric),
            3 => Some(SymmetryClass::Antisymmetric),
            _ => None,
        }
    }

    pub fn opposite(self) -> SymmetryClass {
        match self {
            SymmetryClass::Symmetric => SymmetryClass::Antisymmetric,
            SymmetryClass::Antisymmetric => SymmetryClass::Symmetric,
            SymmetryClass::General => SymmetryClass::General,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SymmetryClass::Symmetric => "symmetric",
            SymmetryClass::Antisymmetric => "antisymmetric",
            SymmetryClass::General => "general",
        }
    }
}

/// `φ : E → K ⊗ E*` at one fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiMap<S: Scalar> {
    n: usize,
    phi: Matrix<S>,
    eta_scalar: S,
    class: SymmetryClass,
}

impl<S: Scalar> PhiMap<S> {
    pub fn new(
        ctx: &FiberContext<S>,
        phi: Matrix<S>,
        eta_scalar: S,
        class: SymmetryClass,
    ) -> Result<Self> {
        if !phi.is_square() {
            return Err(Error::NotSquare {
                rows: phi.rows(),
                cols: phi.cols(),
            });
        }
        if phi.rows() == 0 {
            return Err(Error::InvalidRank);
        }
        let r = phi.rows();
        for i in 0..r {
            for j in 0..r {
                let ok = match class {
                    SymmetryClass::Symmetric => phi[(i, j)] == phi[(j, i)],
                    SymmetryClass::Antisymmetric => phi[(i, j)] == -phi[(j, i)].clone(),
                    SymmetryClass::General => true,
                };
                if !ok {
                    return Err(Error::SymmetryViolated {
                        class: class.name(),
                        i,
                        j,
                    });
                }
            }
        }
        let unit = match S::MODE {
            ScalarMode::Exact => eta_scalar.norm_sqr() == S::one(),
            ScalarMode::Floating => (eta_scalar.to_c64().norm_sqr() - 1.0).abs() < 1e-12,
        };
        if !unit {
            return Err(Error::NonUnitEta);
        }
        Ok(PhiMap {
            n: ctx.n(),
            phi,
            eta_scalar,
            class,
        })
    }

    /// Random matrix of the requested class with entries from
    /// [`Scalar::sample`]; `eta_scalar` is a random unit when `random_eta`.
    pub fn random<R: Rng + ?Sized>(
        ctx: &FiberContext<S>,
        rank: usize,
        class: SymmetryClass,
        random_eta: bool,
        rng: &mut R,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank);
        }
        let mut phi = Matrix::zeros(rank, rank);
        for i in 0..rank {
            for j in 0..rank {
                match class {
                    SymmetryClass::General => phi[(i, j)] = S::sample(rng),
                    SymmetryClass::Symmetric if j >= i => {
                        let z = S::sample(rng);
                        phi[(i, j)] = z.clone();
                        phi[(j, i)] = z;
                    }
                    SymmetryClass::Antisymmetric if j > i => {
                        let z = S::sample(rng);
                        phi[(i, j)] = z.clone();
                        phi[(j, i)] = -z;
                    }
                    _ => {}
                }
            }
        }
        let eta = if random_eta {
            S::sample_unit(rng)
        } else {
            S::one()
        };
        PhiMap::new(ctx, phi, eta, class)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.phi.rows()
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.phi
    }

    pub fn eta_scalar(&self) -> &S {
        &self.eta_scalar
    }

    pub fn class(&self) -> SymmetryClass {
        self.class
    }

    pub fn is_zero(&self) -> bool {
        self.phi.is_zero()
    }

    /// `η = eta_scalar · θ¹ ∧ … ∧ θⁿ`.
    pub fn eta(&self) -> Form<S> {
        let full = ((1u32 << self.n) - 1) as u16;
        let mut f = Form::zero(self.n);
        f.add_term(Monomial::new(full, 0), self.eta_scalar.clone());
        f
    }

    /// Removes the factor `η` from a form in `Λ^{n,•}`.
    fn strip_eta(&self, f: &Form<S>) -> Form<S> {
        let full = ((1u32 << self.n) - 1) as u16;
        let inv = self.eta_scalar.conj();
        let mut out = Form::zero(self.n);
        for (m, z) in f.terms() {
            debug_assert_eq!(m.holo(), full, "form is not of type (n, q)");
            out.add_term(Monomial::new(0, m.anti()), z.clone() * inv.clone());
        }
        out
    }

    fn check_spinor(&self, z: &Spinor<S>) -> Result<()> {
        if self.n % 2 == 0 {
            return Err(Error::EvenDimension { n: self.n });
        }
        if z.n() != self.n {
            return Err(Error::ContextMismatch {
                left: self.n,
                right: z.n(),
            });
        }
        if z.chirality() == Chirality::Mixed {
            return Err(Error::MixedChirality);
        }
        if z.rank() != self.rank() {
            return Err(Error::RankMismatch {
                left: self.rank(),
                right: z.rank(),
            });
        }
        Ok(())
    }
}

/// `A_φ : Λ^{0,p} ⊗ E → Λ^{0,n-p} ⊗ E`, the composition of `Id ⊗ φ`, the
/// identification `Λ^{0,p} ⊗ K ≅ Λ^{n,p}` by `β ↦ η ∧ β`, and `τ_E`.
pub fn apply_a<S: Scalar>(phi: &PhiMap<S>, z: &Spinor<S>) -> Result<Spinor<S>> {
    phi.check_spinor(z)?;
    let eta = phi.eta();
    let eta_z: Vec<Form<S>> = z
        .parts()
        .iter()
        .map(|f| eta.wedge(f))
        .collect::<Result<_>>()?;
    let r = phi.rank();
    let mut parts = Vec::with_capacity(r);
    for i in 0..r {
        let mut acc = Form::zero(phi.n);
        for (j, ez) in eta_z.iter().enumerate() {
            let c = &phi.phi[(i, j)];
            if !c.is_zero() {
                acc = acc.add(&ez.scale(c))?;
            }
        }
        parts.push(tau_graded(&acc));
    }
    Ok(Spinor::from_parts_unchecked(
        phi.n,
        z.chirality().flip(),
        parts,
    ))
}

/// The adjoint of [`apply_a`] for the real inner product `Re⟨·,·⟩`.
pub fn apply_a_adjoint<S: Scalar>(phi: &PhiMap<S>, y: &Spinor<S>) -> Result<Spinor<S>> {
    phi.check_spinor(y)?;
    let sign = S::one().signed(phi.n as i64);
    let stripped: Vec<Form<S>> = y
        .parts()
        .iter()
        .map(|f| phi.strip_eta(&tau_graded(f)))
        .collect();
    let r = phi.rank();
    let mut parts = Vec::with_capacity(r);
    for j in 0..r {
        let mut acc = Form::zero(phi.n);
        for (i, w) in stripped.iter().enumerate() {
            let c = phi.phi[(i, j)].conj();
            if !c.is_zero() {
                acc = acc.add(&w.scale(&c))?;
            }
        }
        parts.push(acc.scale(&sign));
    }
    Ok(Spinor::from_parts_unchecked(
        phi.n,
        y.chirality().flip(),
        parts,
    ))
}

/// Size of `σ_{D*}(γ)∘A_φ + A_φ*∘σ_D(γ)` measured over the real orthonormal
/// basis `{e_k, i e_k}` of `S⁺ ⊗ E`.
#[derive(Clone, Debug, PartialEq)]
pub struct Defect<S: Scalar> {
    /// Largest squared image norm, exact in exact mode.
    pub max_norm_sqr: S,
    /// Largest image norm.
    pub max_norm: f64,
    /// True iff every basis image vanishes.
    pub is_zero: bool,
    pub columns: usize,
}

/// The concentrating-condition map `x ↦ c(γ)A_φ x + A_φ* c(γ) x` on `S⁺ ⊗ E`.
pub fn concentrating_map<S: Scalar>(
    phi: &PhiMap<S>,
    g: &Covector<S>,
    x: &Spinor<S>,
) -> Result<Spinor<S>> {
    let first = clifford_spinor(g, &apply_a(phi, x)?)?;
    let second = apply_a_adjoint(phi, &clifford_spinor(g, x)?)?;
    first.add(&second)
}

pub fn concentrating_defect<S: Scalar>(phi: &PhiMap<S>, g: &Covector<S>) -> Result<Defect<S>> {
    if phi.n % 2 == 0 {
        return Err(Error::EvenDimension { n: phi.n });
    }
    if g.n() != phi.n {
        return Err(Error::ContextMismatch {
            left: phi.n,
            right: g.n(),
        });
    }
    let ctx = FiberContext::<S>::new(phi.n)?;
    let basis = Spinor::basis(&ctx, Chirality::Even, phi.rank())?;
    let i = S::imag();
    let mut best = S::zero();
    let mut best_f = 0.0f64;
    let mut all_zero = true;
    let mut columns = 0;
    for e in &basis {
        for x in [e.clone(), e.scale(&i)] {
            let img = concentrating_map(phi, g, &x)?;
            columns += 1;
            if img.is_zero() {
                continue;
            }
            all_zero = false;
            let ns = img.norm_sqr();
            let v = ns.to_c64().re;
            if v > best_f {
                best_f = v;
                best = ns;
            }
        }
    }
    Ok(Defect {
        max_norm_sqr: best,
        max_norm: best_f.sqrt(),
        is_zero: all_zero,
        columns,
    })
}

/// `A_φ` from `S^c ⊗ E` as a [`SymbolOperator`].
pub fn a_operator<S: Scalar>(phi: &PhiMap<S>, source: Chirality) -> Result<SymbolOperator<S>> {
    let ctx = FiberContext::<S>::new(phi.n)?;
    SymbolOperator::from_real_linear(&ctx, phi.rank(), source, source.flip(), |z| {
        apply_a(phi, z)
    })
}

/// The concentrating-condition operator assembled by composing matrices:
/// `σ_{D*}(γ)·A_φ + (A_φ)*·σ_D(γ)` with the adjoint taken blockwise.
pub fn concentrating_operator<S: Scalar>(
    phi: &PhiMap<S>,
    g: &Covector<S>,
) -> Result<SymbolOperator<S>> {
    if phi.n % 2 == 0 {
        return Err(Error::EvenDimension { n: phi.n });
    }
    let r = phi.rank();
    let sd = symbol(g, r, SymbolKind::D)?;
    let sds = symbol(g, r, SymbolKind::DStar)?;
    let a_plus = a_operator(phi, Chirality::Even)?;
    let left = sds.compose(&a_plus)?;
    let right = a_plus.real_adjoint().compose(&sd)?;
    left.add(&right)
}

/// `det(φ_ij)` and whether the fiber lies in the singular set.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularVerdict<S: Scalar> {
    pub det_value: S,
    pub is_singular: bool,
}

/// Relative tolerance for the floating-mode singularity test, applied to
/// the Hadamard scale `‖φ‖_F^r`.
pub const SINGULAR_TOL: f64 = 1e-12;

pub fn singular_verdict<S: Scalar>(phi: &PhiMap<S>) -> SingularVerdict<S> {
    let det = phi.phi.det();
    let is_singular = match S::MODE {
        ScalarMode::Exact => det.is_zero(),
        ScalarMode::Floating => {
            let scale = phi.phi.frobenius_sqr().to_c64().re.sqrt();
            det.to_c64().norm() <= SINGULAR_TOL * scale.powi(phi.rank() as i32)
        }
    };
    SingularVerdict {
        det_value: det,
        is_singular,
    }
}

/// The standard nondegenerate pairings `ψ` on `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExampleKind {
    /// `F = End(W)`, `ψ(A, B) = tr(A∘B)`, `dim W = w`.
    TracePairing { w: usize },
    /// `F = W ⊕ W*`, `ψ((w₁,f₁),(w₂,f₂)) = f₂(w₁) − f₁(w₂)`, `dim W = w`.
    SymplecticDouble { w: usize },
    /// `F = TX ⊗ ℂ` with the bilinear metric `g_ℂ`.
    MetricGc,
    /// `F = TX ⊗ ℂ` with `ω_ℂ(u, v) = g_ℂ(u, Jv)`.
    OmegaC,
}

/// Matrix of the pairing with `η` the unit frame.
///
/// For `TX ⊗ ℂ` the frame is `Z_1..Z_n, Z̄_1..Z̄_n`, dual to `θ, θ̄`; there
/// `g_ℂ(Z_i, Z̄_j) = δ_ij`, `g_ℂ(Z_i, Z_j) = 0`, `J Z = iZ` and `J Z̄ = -iZ̄`.
pub fn example_phi<S: Scalar>(kind: ExampleKind, ctx: &FiberContext<S>) -> Result<PhiMap<S>> {
    let n = ctx.n();
    let (phi, class) = match kind {
        ExampleKind::TracePairing { w } => {
            if w == 0 {
                return Err(Error::InvalidExample {
                    kind: "trace_pairing",
                    reason: "dim W must be at least 1".into(),
                });
            }
            // tr(E_ab E_cd) = δ_bc δ_ad with E_ab ↦ index a·w + b
            let m = Matrix::from_fn(w * w, w * w, |x, y| {
                let (a, b) = (x / w, x % w);
                let (c, d) = (y / w, y % w);
                if b == c && a == d {
                    S::one()
                } else {
                    S::zero()
                }
            });
            (m, SymmetryClass::Symmetric)
        }
        ExampleKind::SymplecticDouble { w } => {
            if w == 0 {
                return Err(Error::InvalidExample {
                    kind: "symplectic_double",
                    reason: "dim W must be at least 1".into(),
                });
            }
            // ψ(e_i, f_j) = δ_ij, ψ(f_j, e_i) = -δ_ij
            let m = Matrix::from_fn(2 * w, 2 * w, |x, y| {
                if x < w && y == x + w {
                    S::one()
                } else if x >= w && y + w == x {
                    -S::one()
                } else {
                    S::zero()
                }
            });
            (m, SymmetryClass::Antisymmetric)
        }
        ExampleKind::MetricGc => {
            let m = Matrix::from_fn(2 * n, 2 * n, |x, y| {
                if x + n == y || y + n == x {
                    S::one()
                } else {
                    S::zero()
                }
            });
            (m, SymmetryClass::Symmetric)
        }
        ExampleKind::OmegaC => {
            // ω(Z_i, Z̄_j) = g(Z_i, -i Z̄_j) = -i δ_ij, ω(Z̄_i, Z_j) = i δ_ij
            let m = Matrix::from_fn(2 * n, 2 * n, |x, y| {
                if x + n == y {
                    -S::imag()
                } else if y + n == x {
                    S::imag()
                } else {
                    S::zero()
                }
            });
            (m, SymmetryClass::Antisymmetric)
        }
    };
    PhiMap::new(ctx, phi, S::one(), class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Complex64, Exact};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(n: usize) -> FiberContext<Exact> {
        FiberContext::new(n).unwrap()
    }

    fn phi1(c: &FiberContext<Exact>, w: Exact) -> PhiMap<Exact> {
        PhiMap::new(c, Matrix::from_rows(vec![vec![w]]), Exact::one(), SymmetryClass::Symmetric)
            .unwrap()
    }

    #[test]
    fn a_in_dimension_one() {
        // A_φ(u·1⊗e) = τ(w u θ¹) = conj(w u)·τ(θ¹) = -conj(w u) θ̄¹
        let c = ctx(1);
        let w = Exact::gauss((2, 1), (-1, 3));
        let u = Exact::gauss((1, 2), (5, 1));
        let z = Spinor::new(&c, Chirality::Even, vec![c.scalar(u.clone())]).unwrap();
        let az = apply_a(&phi1(&c, w.clone()), &z).unwrap();
        let expected = c.theta_bar(0).scale(&-(w.clone() * u).conj());
        assert_eq!(az.parts()[0], expected);
        assert_eq!(az.chirality(), Chirality::Odd);

        let zero = PhiMap::new(&c, Matrix::zeros(1, 1), Exact::one(), SymmetryClass::General).unwrap();
        assert!(apply_a(&zero, &z).unwrap().is_zero());
    }

    #[test]
    fn a_adjoint_in_dimension_one() {
        let c = ctx(1);
        let w = Exact::gauss((-1, 1), (2, 1));
        let v = Exact::gauss((3, 1), (1, 2));
        let y = Spinor::new(&c, Chirality::Odd, vec![c.theta_bar(0).scale(&v)]).unwrap();
        let ay = apply_a_adjoint(&phi1(&c, w.clone()), &y).unwrap();
        assert_eq!(ay.parts()[0], c.scalar(-(w * v).conj()));
    }

    #[test]
    fn a_is_isometric_for_unit_rank_one() {
        let c = ctx(1);
        let w = Exact::gauss((3, 5), (4, 5));
        let z = Spinor::new(&c, Chirality::Even, vec![c.scalar(Exact::gauss((2, 1), (1, 1)))]).unwrap();
        let az = apply_a(&phi1(&c, w), &z).unwrap();
        assert_eq!(az.norm_sqr(), z.norm_sqr());
    }

    #[test]
    fn rank_one_cancellation_by_hand() {
        // n = 1, r = 1: c(γ)A(u) = c(γ)(-w̄ū θ̄) = √2 ā w̄ ū and
        // A*c(γ)(u) = A*(√2 a u θ̄) = -√2 conj(w a u), which cancel.
        let c = ctx(1);
        let w = Exact::gauss((1, 3), (-2, 1));
        let a = Exact::gauss((2, 1), (1, 2));
        let u = Exact::gauss((-1, 1), (4, 1));
        let g = c.covector(vec![a.clone()]).unwrap();
        let phi = phi1(&c, w.clone());
        let z = Spinor::new(&c, Chirality::Even, vec![c.scalar(u.clone())]).unwrap();
        let first = clifford_spinor(&g, &apply_a(&phi, &z).unwrap()).unwrap();
        let expected = Exact::sqrt2() * a.conj() * w.conj() * u.conj();
        assert_eq!(first.parts()[0], c.scalar(expected.clone()));
        let second = apply_a_adjoint(&phi, &clifford_spinor(&g, &z).unwrap()).unwrap();
        assert_eq!(second.parts()[0], c.scalar(-expected));
        assert!(concentrating_defect(&phi, &g).unwrap().is_zero);
    }

    #[test]
    fn adjoint_pairs_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [1, 3] {
            let c = ctx(n);
            for r in 1..=3 {
                let phi = PhiMap::random(&c, r, SymmetryClass::General, true, &mut rng).unwrap();
                for src in [Chirality::Even, Chirality::Odd] {
                    let x = Spinor::random(&c, src, r, &mut rng).unwrap();
                    let y = Spinor::random(&c, src.flip(), r, &mut rng).unwrap();
                    let lhs = apply_a(&phi, &x).unwrap().real_inner(&y).unwrap();
                    let rhs = x.real_inner(&apply_a_adjoint(&phi, &y).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn even_dimension_and_mixed_chirality_are_rejected() {
        let c2 = ctx(2);
        let phi = PhiMap::new(&c2, Matrix::identity(1), Exact::one(), SymmetryClass::Symmetric).unwrap();
        let z = Spinor::new(&c2, Chirality::Even, vec![c2.scalar(Exact::one())]).unwrap();
        assert_eq!(apply_a(&phi, &z).unwrap_err(), Error::EvenDimension { n: 2 });
        let g = c2.covector(vec![Exact::one(), Exact::zero()]).unwrap();
        assert_eq!(
            concentrating_defect(&phi, &g).unwrap_err(),
            Error::EvenDimension { n: 2 }
        );

        let c1 = ctx(1);
        let phi = phi1(&c1, Exact::one());
        let mixed = Spinor::new(
            &c1,
            Chirality::Mixed,
            vec![c1.scalar(Exact::one()).add(&c1.theta_bar(0)).unwrap()],
        )
        .unwrap();
        assert_eq!(apply_a(&phi, &mixed).unwrap_err(), Error::MixedChirality);
    }

    #[test]
    fn phi_validation() {
        let c = ctx(1);
        let m = Matrix::from_rows(vec![
            vec![Exact::one(), Exact::from_int(2)],
            vec![Exact::from_int(3), Exact::one()],
        ]);
        assert!(matches!(
            PhiMap::new(&c, m.clone(), Exact::one(), SymmetryClass::Symmetric),
            Err(Error::SymmetryViolated { .. })
        ));
        assert!(matches!(
            PhiMap::new(&c, m.clone(), Exact::from_int(2), SymmetryClass::General),
            Err(Error::NonUnitEta)
        ));
        assert!(PhiMap::new(&c, m, Exact::imag(), SymmetryClass::General).is_ok());
    }

    #[test]
    fn singular_verdict_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = ctx(3);
        for _ in 0..20 {
            let phi = PhiMap::random(&c, 3, SymmetryClass::Antisymmetric, false, &mut rng).unwrap();
            let v = singular_verdict(&phi);
            assert!(v.is_singular);
            assert!(v.det_value.is_zero());
        }
        let one = phi1(&ctx(1), Exact::one());
        let v = singular_verdict(&one);
        assert_eq!(v.det_value, Exact::one());
        assert!(!v.is_singular);

        let cc = Exact::gauss((2, 3), (-1, 1));
        let m = Matrix::from_rows(vec![
            vec![Exact::zero(), cc.clone()],
            vec![-cc.clone(), Exact::zero()],
        ]);
        let phi = PhiMap::new(&c, m, Exact::one(), SymmetryClass::Antisymmetric).unwrap();
        assert_eq!(singular_verdict(&phi).det_value, cc.clone() * cc);
        let zero = PhiMap::new(&c, Matrix::zeros(2, 2), Exact::one(), SymmetryClass::Antisymmetric)
            .unwrap();
        assert!(singular_verdict(&zero).is_singular);
    }

    #[test]
    fn floating_singular_tolerance() {
        let c = FiberContext::<Complex64>::new(1).unwrap();
        let m = Matrix::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(4.0, 1e-15)],
        ]);
        let phi = PhiMap::new(&c, m, Complex64::new(1.0, 0.0), SymmetryClass::Symmetric).unwrap();
        assert!(singular_verdict(&phi).is_singular);
    }

    #[test]
    fn example_pairings() {
        let c = ctx(2);
        let tp = example_phi(ExampleKind::TracePairing { w: 2 }, &c).unwrap();
        assert_eq!(tp.rank(), 4);
        assert_eq!(tp.class(), SymmetryClass::Symmetric);
        // the trace form on 2x2 matrices swaps E_12 and E_21
        assert_eq!(singular_verdict(&tp).det_value, Exact::from_int(-1));

        let sd = example_phi(ExampleKind::SymplecticDouble { w: 1 }, &c).unwrap();
        assert_eq!(
            *sd.matrix(),
            Matrix::from_rows(vec![
                vec![Exact::zero(), Exact::one()],
                vec![-Exact::one(), Exact::zero()],
            ])
        );
        assert_eq!(singular_verdict(&sd).det_value, Exact::one());

        let g = example_phi(ExampleKind::MetricGc, &c).unwrap();
        assert_eq!(g.rank(), 4);
        assert_eq!(g.matrix()[(0, 2)], Exact::one());
        assert_eq!(g.matrix()[(0, 0)], Exact::zero());
        assert!(!singular_verdict(&g).is_singular);

        let w = example_phi(ExampleKind::OmegaC, &ctx(1)).unwrap();
        assert_eq!(singular_verdict(&w).det_value, -Exact::one());

        assert!(example_phi(ExampleKind::TracePairing { w: 0 }, &c).is_err());
    }

    #[test]
    fn form_and_matrix_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for (n, class) in [(1, SymmetryClass::Antisymmetric), (3, SymmetryClass::Symmetric)] {
            let c = ctx(n);
            let phi = PhiMap::random(&c, 2, class, true, &mut rng).unwrap();
            let g = c.random_covector(&mut rng);
            let op = concentrating_operator(&phi, &g).unwrap();
            for e in Spinor::basis(&c, Chirality::Even, 2).unwrap() {
                assert_eq!(op.apply(&e).unwrap(), concentrating_map(&phi, &g, &e).unwrap());
            }
            // A is purely conjugate-linear
            assert!(a_operator(&phi, Chirality::Even).unwrap().linear.is_zero());
        }
    }
}
