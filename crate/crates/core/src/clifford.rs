//! Clifford multiplication on `S = Λ^{0,•}`, twisted spinors `S± ⊗ E` and
//! the principal symbols of the twisted Dirac operator and its adjoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{contract, subsets, Covector, FiberContext, Form, Monomial};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Chiral grading of `S = Λ^{0,even} ⊕ Λ^{0,odd}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chirality {
    Even,
    Odd,
    Mixed,
}

impl Chirality {
    pub fn flip(self) -> Chirality {
        match self {
            Chirality::Even => Chirality::Odd,
            Chirality::Odd => Chirality::Even,
            Chirality::Mixed => Chirality::Mixed,
        }
    }

    fn admits(self, q: usize) -> bool {
        match self {
            Chirality::Even => q % 2 == 0,
            Chirality::Odd => q % 2 == 1,
            Chirality::Mixed => true,
        }
    }
}

/// `c(γ)α = √2 (γ^{0,1} ∧ α − ι(γ^{1,0}) α)` on antiholomorphic forms.
pub fn clifford<S: Scalar>(g: &Covector<S>, x: &Form<S>) -> Result<Form<S>> {
    if let Some((m, _)) = x.terms().find(|(m, _)| m.p() != 0) {
        return Err(Error::NotAntiholomorphic { p: m.p() });
    }
    let wedge = g.part01().wedge(x)?;
    let inner = contract(g, x)?;
    Ok(wedge.sub(&inner)?.scale(&S::sqrt2()))
}

/// Antiholomorphic monomials spanning the given chirality, graded
/// lexicographically.
pub fn spinor_monomials(n: usize, chirality: Chirality) -> Vec<Monomial> {
    (0..=n)
        .filter(|&q| chirality.admits(q))
        .flat_map(|q| subsets(n, q))
        .map(|a| Monomial::new(0, a))
        .collect()
}

/// Element of `S^± ⊗ E`: one antiholomorphic form per unitary frame vector
/// `φ_j` of `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spinor<S: Scalar> {
    n: usize,
    chirality: Chirality,
    parts: Vec<Form<S>>,
}

impl<S: Scalar> Spinor<S> {
    pub fn new(ctx: &FiberContext<S>, chirality: Chirality, parts: Vec<Form<S>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidRank);
        }
        for f in &parts {
            if f.n() != ctx.n() {
                return Err(Error::ContextMismatch {
                    left: ctx.n(),
                    right: f.n(),
                });
            }
            for (m, _) in f.terms() {
                if m.p() != 0 {
                    return Err(Error::NotAntiholomorphic { p: m.p() });
                }
                if !chirality.admits(m.q()) {
                    return Err(Error::ChiralityViolated {
                        declared: chirality,
                        q: m.q(),
                    });
                }
            }
        }
        Ok(Spinor {
            n: ctx.n(),
            chirality,
            parts,
        })
    }

    pub fn zero(ctx: &FiberContext<S>, chirality: Chirality, rank: usize) -> Result<Self> {
        Spinor::new(ctx, chirality, vec![ctx.zero(); rank])
    }

    /// Orthonormal complex basis of `S^c ⊗ E`: antiholomorphic monomials in
    /// graded-lexicographic order with the `E` index varying fastest.
    pub fn basis(ctx: &FiberContext<S>, chirality: Chirality, rank: usize) -> Result<Vec<Self>> {
        if rank == 0 {
            return Err(Error::InvalidRank);
        }
        let mut out = Vec::new();
        for m in spinor_monomials(ctx.n(), chirality) {
            for e in 0..rank {
                let mut parts = vec![ctx.zero(); rank];
                parts[e] = ctx.monomial(m, S::one());
                out.push(Spinor {
                    n: ctx.n(),
                    chirality,
                    parts,
                });
            }
        }
        Ok(out)
    }

    /// Random spinor with every basis coefficient drawn by [`Scalar::sample`].
    pub fn random<R: rand::Rng + ?Sized>(
        ctx: &FiberContext<S>,
        chirality: Chirality,
        rank: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let monos = spinor_monomials(ctx.n(), chirality);
        let coords: Vec<S> = (0..monos.len() * rank).map(|_| S::sample(rng)).collect();
        Spinor::from_coords(ctx, chirality, rank, &coords)
    }

    pub fn from_coords(
        ctx: &FiberContext<S>,
        chirality: Chirality,
        rank: usize,
        coords: &[S],
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidRank);
        }
        let monos = spinor_monomials(ctx.n(), chirality);
        assert_eq!(coords.len(), monos.len() * rank, "coordinate length");
        let mut parts = vec![ctx.zero(); rank];
        for (b, m) in monos.iter().enumerate() {
            for (e, part) in parts.iter_mut().enumerate() {
                part.add_term(*m, coords[b * rank + e].clone());
            }
        }
        Ok(Spinor {
            n: ctx.n(),
            chirality,
            parts,
        })
    }

    /// Coordinates in the basis of [`Spinor::basis`].
    pub fn coords(&self) -> Vec<S> {
        let monos = spinor_monomials(self.n, self.chirality);
        let mut out = Vec::with_capacity(monos.len() * self.rank());
        for m in monos {
            for part in &self.parts {
                out.push(part.coefficient(m));
            }
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    pub fn parts(&self) -> &[Form<S>] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Form::is_zero)
    }

    fn check_compatible(&self, o: &Spinor<S>) -> Result<()> {
        if self.n != o.n {
            return Err(Error::ContextMismatch {
                left: self.n,
                right: o.n,
            });
        }
        if self.rank() != o.rank() {
            return Err(Error::RankMismatch {
                left: self.rank(),
                right: o.rank(),
            });
        }
        Ok(())
    }

    pub fn add(&self, o: &Spinor<S>) -> Result<Spinor<S>> {
        self.check_compatible(o)?;
        let chirality = if self.chirality == o.chirality {
            self.chirality
        } else {
            Chirality::Mixed
        };
        let parts = self
            .parts
            .iter()
            .zip(&o.parts)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Spinor {
            n: self.n,
            chirality,
            parts,
        })
    }

    pub fn scale(&self, z: &S) -> Spinor<S> {
        Spinor {
            n: self.n,
            chirality: self.chirality,
            parts: self.parts.iter().map(|f| f.scale(z)).collect(),
        }
    }

    /// Hermitian inner product on `S ⊗ E`, conjugate-linear in `o`.
    pub fn inner(&self, o: &Spinor<S>) -> Result<S> {
        self.check_compatible(o)?;
        let mut acc = S::zero();
        for (a, b) in self.parts.iter().zip(&o.parts) {
            acc += a.inner(b)?;
        }
        Ok(acc)
    }

    /// `Re⟨self, o⟩`, the real inner product used for real-linear adjoints.
    pub fn real_inner(&self, o: &Spinor<S>) -> Result<S> {
        Ok(self.inner(o)?.re())
    }

    pub fn norm_sqr(&self) -> S {
        self.parts.iter().fold(S::zero(), |acc, f| acc + f.norm_sqr())
    }

    /// Applies `f` to every `E`-component.
    pub fn map_parts(
        &self,
        chirality: Chirality,
        f: impl Fn(&Form<S>) -> Result<Form<S>>,
    ) -> Result<Spinor<S>> {
        Ok(Spinor {
            n: self.n,
            chirality,
            parts: self.parts.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub(crate) fn from_parts_unchecked(n: usize, chirality: Chirality, parts: Vec<Form<S>>) -> Self {
        Spinor {
            n,
            chirality,
            parts,
        }
    }
}

/// `c(γ) ⊗ Id_E`.
pub fn clifford_spinor<S: Scalar>(g: &Covector<S>, z: &Spinor<S>) -> Result<Spinor<S>> {
    z.map_parts(z.chirality().flip(), |f| clifford(g, f))
}

/// Real-linear map `x ↦ L x + C x̄` between spinor spaces, in the
/// coordinates of [`Spinor::basis`].
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolOperator<S: Scalar> {
    pub n: usize,
    pub rank: usize,
    pub source: Chirality,
    pub target: Chirality,
    /// Complex-linear block `L`.
    pub linear: Matrix<S>,
    /// Conjugate-linear block `C`.
    pub antilinear: Matrix<S>,
}

impl<S: Scalar> SymbolOperator<S> {
    /// Recovers `(L, C)` from a real-linear map by evaluating it on `e_k` and
    /// `i e_k`: `L e_k = (f(e_k) − i f(i e_k))/2`, `C e_k = (f(e_k) + i f(i e_k))/2`.
    pub fn from_real_linear(
        ctx: &FiberContext<S>,
        rank: usize,
        source: Chirality,
        target: Chirality,
        f: impl Fn(&Spinor<S>) -> Result<Spinor<S>>,
    ) -> Result<Self> {
        let basis = Spinor::basis(ctx, source, rank)?;
        let rows = spinor_monomials(ctx.n(), target).len() * rank;
        let mut linear = Matrix::zeros(rows, basis.len());
        let mut antilinear = Matrix::zeros(rows, basis.len());
        let half = S::from_ratio(1, 2);
        let i = S::imag();
        for (k, e) in basis.iter().enumerate() {
            let fe = as_chirality(f(e)?, target)?.coords();
            let fie = as_chirality(f(&e.scale(&i))?, target)?.coords();
            let l: Vec<S> = fe
                .iter()
                .zip(&fie)
                .map(|(a, b)| (a.clone() - i.clone() * b.clone()) * half.clone())
                .collect();
            let c: Vec<S> = fe
                .iter()
                .zip(&fie)
                .map(|(a, b)| (a.clone() + i.clone() * b.clone()) * half.clone())
                .collect();
            linear.set_column(k, &l);
            antilinear.set_column(k, &c);
        }
        Ok(SymbolOperator {
            n: ctx.n(),
            rank,
            source,
            target,
            linear,
            antilinear,
        })
    }

    pub fn apply(&self, z: &Spinor<S>) -> Result<Spinor<S>> {
        if z.chirality() != self.source {
            return Err(Error::ChiralityMismatch {
                expected: self.source,
                got: z.chirality(),
            });
        }
        if z.rank() != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: z.rank(),
            });
        }
        let x = z.coords();
        let xbar: Vec<S> = x.iter().map(Scalar::conj).collect();
        let y: Vec<S> = self
            .linear
            .mul_vec(&x)
            .into_iter()
            .zip(self.antilinear.mul_vec(&xbar))
            .map(|(a, b)| a + b)
            .collect();
        let ctx = FiberContext::<S>::new(self.n)?;
        Spinor::from_coords(&ctx, self.target, self.rank, &y)
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &SymbolOperator<S>) -> Result<SymbolOperator<S>> {
        if first.target != self.source {
            return Err(Error::ChiralityMismatch {
                expected: self.source,
                got: first.target,
            });
        }
        if first.rank != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: first.rank,
            });
        }
        // (L1, C1)∘(L2, C2) = (L1 L2 + C1 C̄2, L1 C2 + C1 L̄2)
        let linear = self
            .linear
            .mul(&first.linear)
            .add(&self.antilinear.mul(&first.antilinear.conj()));
        let antilinear = self
            .linear
            .mul(&first.antilinear)
            .add(&self.antilinear.mul(&first.linear.conj()));
        Ok(SymbolOperator {
            n: self.n,
            rank: self.rank,
            source: first.source,
            target: self.target,
            linear,
            antilinear,
        })
    }

    /// Adjoint for `Re⟨·,·⟩`: `(L, C)* = (Lᴴ, Cᵀ)`.
    pub fn real_adjoint(&self) -> SymbolOperator<S> {
        SymbolOperator {
            n: self.n,
            rank: self.rank,
            source: self.target,
            target: self.source,
            linear: self.linear.adjoint(),
            antilinear: self.antilinear.transpose(),
        }
    }

    pub fn add(&self, o: &SymbolOperator<S>) -> Result<SymbolOperator<S>> {
        if (self.source, self.target) != (o.source, o.target) {
            return Err(Error::ChiralityMismatch {
                expected: self.source,
                got: o.source,
            });
        }
        Ok(SymbolOperator {
            linear: self.linear.add(&o.linear),
            antilinear: self.antilinear.add(&o.antilinear),
            ..self.clone()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.linear.is_zero() && self.antilinear.is_zero()
    }
}

fn as_chirality<S: Scalar>(z: Spinor<S>, c: Chirality) -> Result<Spinor<S>> {
    if z.chirality() == c || z.is_zero() {
        return Ok(Spinor::from_parts_unchecked(z.n(), c, z.parts().to_vec()));
    }
    Err(Error::ChiralityMismatch {
        expected: c,
        got: z.chirality(),
    })
}

/// Which principal symbol to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    /// `σ_{D_E}(γ) : S⁺⊗E → S⁻⊗E`.
    D,
    /// `σ_{D_E*}(γ) : S⁻⊗E → S⁺⊗E`.
    DStar,
}

/// `c(γ) ⊗ Id_E` as a [`SymbolOperator`]; both symbols share this formula.
pub fn symbol<S: Scalar>(g: &Covector<S>, rank: usize, which: SymbolKind) -> Result<SymbolOperator<S>> {
    if rank == 0 {
        return Err(Error::InvalidRank);
    }
    let ctx = FiberContext::<S>::new(g.n())?;
    let (source, target) = match which {
        SymbolKind::D => (Chirality::Even, Chirality::Odd),
        SymbolKind::DStar => (Chirality::Odd, Chirality::Even),
    };
    SymbolOperator::from_real_linear(&ctx, rank, source, target, |z| clifford_spinor(g, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(n: usize) -> FiberContext<Exact> {
        FiberContext::new(n).unwrap()
    }

    #[test]
    fn clifford_in_dimension_one() {
        let c = ctx(1);
        let g = c.covector(vec![Exact::one()]).unwrap();
        let one = c.scalar(Exact::one());
        assert_eq!(
            clifford(&g, &one).unwrap(),
            c.theta_bar(0).scale(&Exact::sqrt2())
        );
        assert_eq!(
            clifford(&g, &c.theta_bar(0)).unwrap(),
            c.scalar(-Exact::sqrt2())
        );
    }

    #[test]
    fn clifford_rejects_holomorphic_input() {
        let c = ctx(2);
        let g = c.covector(vec![Exact::one(), Exact::one()]).unwrap();
        assert_eq!(
            clifford(&g, &c.theta(1)).unwrap_err(),
            Error::NotAntiholomorphic { p: 1 }
        );
    }

    /// Brute-force oracle: expands c(γ)∘c(γ) on each basis monomial by hand
    /// from the wedge and contraction tables.
    #[test]
    fn clifford_relation_against_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=4 {
            let c = ctx(n);
            for _ in 0..10 {
                let g = c.random_covector(&mut rng);
                for q in 0..=n {
                    let x = c.random_form_with(0, q, &mut rng).unwrap();
                    let cc = clifford(&g, &clifford(&g, &x).unwrap()).unwrap();
                    assert_eq!(cc, x.scale(&-g.norm_sqr()));
                }
            }
        }
    }

    #[test]
    fn parity_flip_and_skew_adjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = ctx(3);
        for _ in 0..20 {
            let g = c.random_covector(&mut rng);
            let a = Spinor::random(&c, Chirality::Even, 2, &mut rng).unwrap();
            let b = Spinor::random(&c, Chirality::Odd, 2, &mut rng).unwrap();
            let ca = clifford_spinor(&g, &a).unwrap();
            assert_eq!(ca.chirality(), Chirality::Odd);
            assert!(Spinor::new(&c, Chirality::Odd, ca.parts().to_vec()).is_ok());
            let cb = clifford_spinor(&g, &b).unwrap();
            let lhs = ca.inner(&b).unwrap() + a.inner(&cb).unwrap();
            assert!(lhs.is_zero());
        }
    }

    #[test]
    fn symbol_examples() {
        let c = ctx(1);
        let zero = c.covector(vec![Exact::zero()]).unwrap();
        assert!(symbol(&zero, 2, SymbolKind::D).unwrap().is_zero());

        let g = c.covector(vec![Exact::one()]).unwrap();
        let s = symbol(&g, 1, SymbolKind::D).unwrap();
        assert_eq!(s.linear, Matrix::from_rows(vec![vec![Exact::sqrt2()]]));
        assert!(s.antilinear.is_zero());
    }

    #[test]
    fn symbol_composition_gives_clifford_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=3 {
            let c = ctx(n);
            for r in 1..=3 {
                let g = c.random_covector(&mut rng);
                let d = symbol(&g, r, SymbolKind::D).unwrap();
                let ds = symbol(&g, r, SymbolKind::DStar).unwrap();
                let prod = ds.compose(&d).unwrap();
                let dim = prod.linear.rows();
                assert_eq!(prod.linear, Matrix::identity(dim).scale(&-g.norm_sqr()));
                assert!(prod.antilinear.is_zero());
                assert!(d.compose(&d).is_err());
            }
        }
    }

    #[test]
    fn symbol_is_real_linear_in_covector() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let c = ctx(2);
        let g = c.random_covector(&mut rng);
        let h = c.random_covector(&mut rng);
        let (x, y) = (Exact::from_ratio(3, 2), Exact::from_int(-2));
        let gh = g.combine(&x, &h, &y).unwrap();
        let lhs = symbol(&gh, 2, SymbolKind::D).unwrap();
        let sg = symbol(&g, 2, SymbolKind::D).unwrap();
        let sh = symbol(&h, 2, SymbolKind::D).unwrap();
        assert_eq!(lhs.linear, sg.linear.scale(&x).add(&sh.linear.scale(&y)));
    }

    #[test]
    fn real_adjoint_of_conjugate_linear_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let c = ctx(1);
        let op = SymbolOperator::<Exact> {
            n: 1,
            rank: 2,
            source: Chirality::Even,
            target: Chirality::Odd,
            linear: Matrix::from_fn(2, 2, |_, _| Exact::sample(&mut ChaCha8Rng::seed_from_u64(1))),
            antilinear: Matrix::from_rows(vec![
                vec![Exact::imag(), Exact::from_int(2)],
                vec![Exact::gauss((1, 2), (1, 1)), Exact::zero()],
            ]),
        };
        let adj = op.real_adjoint();
        for _ in 0..10 {
            let x = Spinor::random(&c, Chirality::Even, 2, &mut rng).unwrap();
            let y = Spinor::random(&c, Chirality::Odd, 2, &mut rng).unwrap();
            let lhs = op.apply(&x).unwrap().real_inner(&y).unwrap();
            let rhs = x.real_inner(&adj.apply(&y).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn spinor_validation() {
        let c = ctx(2);
        assert!(matches!(
            Spinor::new(&c, Chirality::Even, vec![c.theta_bar(0)]),
            Err(Error::ChiralityViolated { .. })
        ));
        assert!(matches!(
            Spinor::new(&c, Chirality::Odd, vec![c.theta(0)]),
            Err(Error::NotAntiholomorphic { .. })
        ));
        assert_eq!(Spinor::new(&c, Chirality::Odd, vec![]).unwrap_err(), Error::InvalidRank);
        let basis = Spinor::basis(&c, Chirality::Even, 3).unwrap();
        // {1, θ̄¹θ̄²} ⊗ E, E-index fastest
        assert_eq!(basis.len(), 6);
        assert_eq!(basis[1].parts()[1], c.scalar(Exact::one()));
        assert!(!basis[3].parts()[0].is_zero());
        assert!(basis[3].parts()[1].is_zero());
    }
}
