//! Conjugate-linear Hodge star `*̄`, its unit rescaling `τ = ε_k *̄` and the
//! volume form.
//!
//! The volume form is `dv = iⁿ θ¹∧θ̄¹∧…∧θⁿ∧θ̄ⁿ`, which is the volume of the
//! real orthonormal coframe `e¹, …, e²ⁿ` with `θʲ = (e^{2j-1} + i e^{2j})/√2`.
//! On a basis monomial `m` of bidegree `(p, q)` the star is determined by
//! `m ∧ *̄m = dv`, and it is extended conjugate-linearly.

use std::fmt;

use crate::error::{Error, Result};
use crate::exterior::{wedge_parity, FiberContext, Form, Monomial};
use crate::scalar::Scalar;

/// A power of the imaginary unit, `i^k` with `k` taken mod 4.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);

    pub fn i_pow(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    /// `(-1)^k`.
    pub fn sign(k: i64) -> Phase {
        Phase::i_pow(2 * k.rem_euclid(2))
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn inv(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn to_scalar<S: Scalar>(self) -> S {
        S::i_pow(self.0 as i64)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, o: Phase) -> Phase {
        Phase((self.0 + o.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "1",
            1 => "i",
            2 => "-1",
            _ => "-i",
        };
        write!(f, "{s}")
    }
}

/// `ε_k = i^{k(k-1)+n}` evaluated for any integer `k`.
pub fn epsilon_formula(k: i64, n: usize) -> Phase {
    Phase::i_pow(k * (k - 1) + n as i64)
}

/// `ε_k = i^{k(k-1)+n}` for `0 ≤ k ≤ 2n`.
pub fn epsilon(k: usize, n: usize) -> Result<Phase> {
    if k > 2 * n {
        return Err(Error::DegreeOutOfRange {
            k: k as i64,
            max: 2 * n,
        });
    }
    Ok(epsilon_formula(k as i64, n))
}

/// The volume form of the model fiber.
#[derive(Clone, Debug)]
pub struct VolumeConvention<S: Scalar> {
    pub n: usize,
    pub dv: Form<S>,
}

impl<S: Scalar> VolumeConvention<S> {
    /// Builds `iⁿ θ¹∧θ̄¹∧…∧θⁿ∧θ̄ⁿ` by explicit wedge products.
    pub fn new(ctx: &FiberContext<S>) -> Self {
        let mut dv = ctx.scalar(S::i_pow(ctx.n() as i64));
        for j in 0..ctx.n() {
            let pair = ctx
                .theta(j)
                .wedge(&ctx.theta_bar(j))
                .expect("same context");
            dv = dv.wedge(&pair).expect("same context");
        }
        VolumeConvention { n: ctx.n(), dv }
    }
}

/// Coefficient of `dv` on the canonical top monomial:
/// `iⁿ (-1)^{n(n-1)/2}` from reordering `θ¹θ̄¹θ²θ̄²…` into `θ¹…θⁿθ̄¹…θ̄ⁿ`.
fn volume_phase(n: usize) -> Phase {
    let n = n as i64;
    Phase::i_pow(n) * Phase::sign(n * (n - 1) / 2)
}

fn top_key(n: usize) -> Monomial {
    let full = ((1u32 << n) - 1) as u16;
    Monomial::new(full, full)
}

/// `*̄` applied termwise, with no purity requirement.
pub(crate) fn star_any<S: Scalar>(x: &Form<S>) -> Form<S> {
    let n = x.n();
    let top = top_key(n);
    let vol = volume_phase(n);
    let mut out = Form::zero(n);
    for (m, z) in x.terms() {
        let comp = Monomial::new(top.holo() ^ m.holo(), top.anti() ^ m.anti());
        let parity = wedge_parity(m, comp).expect("complement is disjoint");
        let c = vol * Phase::sign(parity);
        out.add_term(comp, z.conj() * c.to_scalar::<S>());
    }
    out
}

/// Conjugate-linear Hodge star `Λ^{p,q} → Λ^{n-p,n-q}`, characterised by
/// `α ∧ *̄β = ⟨α, β⟩ dv`.
pub fn bar_star<S: Scalar>(x: &Form<S>) -> Result<Form<S>> {
    if !x.is_pure() {
        return Err(Error::NotPure);
    }
    Ok(star_any(x))
}

/// `τ = ε_k *̄` on `Λ^k`. Conjugate-linear: `τ(zx) = z̄ τ(x)`.
pub fn tau<S: Scalar>(x: &Form<S>) -> Result<Form<S>> {
    let Some(k) = x.degree() else {
        if x.is_zero() {
            return Ok(x.clone());
        }
        return Err(Error::NotHomogeneous);
    };
    let eps = epsilon(k, x.n())?;
    Ok(star_any(x).scale(&eps.to_scalar()))
}

/// `τ` extended additively over the total-degree decomposition.
pub fn tau_graded<S: Scalar>(x: &Form<S>) -> Form<S> {
    let mut out = Form::zero(x.n());
    for (_, part) in x.by_degree() {
        let t = tau(&part).expect("homogeneous by construction");
        out = out.add(&t).expect("same n");
    }
    out
}

/// `Re⟨τx, y⟩ - Re⟨x, (-1)ⁿ τy⟩` for `deg x + deg y = 2n`; always zero.
pub fn tau_adjoint_defect<S: Scalar>(x: &Form<S>, y: &Form<S>) -> Result<S> {
    let n = x.n();
    if y.n() != n {
        return Err(Error::ContextMismatch {
            left: n,
            right: y.n(),
        });
    }
    let dx = homogeneous_degree(x)?;
    let dy = homogeneous_degree(y)?;
    if let (Some(a), Some(b)) = (dx, dy) {
        if a + b != 2 * n {
            return Err(Error::DegreeMismatch {
                left: a,
                right: b,
                total: 2 * n,
            });
        }
    }
    let lhs = tau(x)?.inner(y)?.re();
    let rhs = x.inner(&tau(y)?.scale(&S::one().signed(n as i64)))?.re();
    Ok(lhs - rhs)
}

fn homogeneous_degree<S: Scalar>(x: &Form<S>) -> Result<Option<usize>> {
    match x.degree() {
        Some(k) => Ok(Some(k)),
        None if x.is_zero() => Ok(None),
        None => Err(Error::NotHomogeneous),
    }
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
    fn star_in_dimension_one() {
        let c = ctx(1);
        let i = Exact::imag();
        let vol = VolumeConvention::new(&c);
        assert_eq!(bar_star(&c.scalar(Exact::one())).unwrap(), vol.dv);
        assert_eq!(
            vol.dv,
            c.theta(0).wedge(&c.theta_bar(0)).unwrap().scale(&i)
        );
        assert_eq!(bar_star(&c.theta_bar(0)).unwrap(), c.theta(0).scale(&-i.clone()));
        assert_eq!(bar_star(&c.theta(0)).unwrap(), c.theta_bar(0).scale(&i));
        let twice = bar_star(&bar_star(&c.theta_bar(0)).unwrap()).unwrap();
        assert_eq!(twice, c.theta_bar(0).neg());
    }

    #[test]
    fn tau_in_dimension_one() {
        let c = ctx(1);
        assert_eq!(tau(&c.theta_bar(0)).unwrap(), c.theta(0));
        assert_eq!(tau(&c.theta(0)).unwrap(), c.theta_bar(0).neg());
        let twice = tau(&tau(&c.theta_bar(0)).unwrap()).unwrap();
        assert_eq!(twice, c.theta_bar(0).neg());
    }

    #[test]
    fn tau_is_conjugate_linear() {
        let c = ctx(2);
        let x = c.random_form(1, 1, 3).unwrap();
        let z = Exact::gauss((1, 2), (3, 1));
        assert_eq!(tau(&x.scale(&z)).unwrap(), tau(&x).unwrap().scale(&z.conj()));
    }

    #[test]
    fn epsilon_values() {
        assert_eq!(epsilon(0, 1).unwrap(), Phase::i_pow(1));
        assert_eq!(epsilon(1, 1).unwrap(), Phase::i_pow(1));
        assert_eq!(epsilon(2, 1).unwrap(), Phase::i_pow(3));
        assert_eq!(epsilon(2, 3).unwrap(), Phase::i_pow(1));
        assert!(epsilon(3, 1).is_err());
        for n in 1..6 {
            for k in 0..=2 * n {
                if k + 4 <= 2 * n {
                    assert_eq!(epsilon(k, n).unwrap(), epsilon(k + 4, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn volume_is_unit_and_real() {
        for n in 1..=5 {
            let c = ctx(n);
            let vol = VolumeConvention::new(&c);
            assert_eq!(vol.dv.inner(&vol.dv).unwrap(), Exact::one());
            assert_eq!(vol.dv.conjugate(), vol.dv);
        }
    }

    #[test]
    fn defining_property_on_all_basis_pairs() {
        for n in 1..=4 {
            let c = ctx(n);
            let dv = VolumeConvention::new(&c).dv;
            for p in 0..=n {
                for q in 0..=n {
                    let basis = c.basis(p, q).unwrap();
                    for a in &basis {
                        for b in &basis {
                            let alpha = c.monomial(*a, Exact::one());
                            let beta = c.monomial(*b, Exact::one());
                            let lhs = alpha.wedge(&bar_star(&beta).unwrap()).unwrap();
                            let rhs = dv.scale(&alpha.inner(&beta).unwrap());
                            assert_eq!(lhs, rhs, "n={n} α={a} β={b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn bar_star_rejects_mixed_bidegree() {
        let c = ctx(2);
        let x = c.theta(0).add(&c.theta_bar(0)).unwrap();
        assert_eq!(bar_star(&x).unwrap_err(), Error::NotPure);
        let y = c.theta(0).add(&c.scalar(Exact::one())).unwrap();
        assert_eq!(tau(&y).unwrap_err(), Error::NotHomogeneous);
        // same total degree, different bidegrees: fine for τ
        assert!(tau(&x).is_ok());
    }

    #[test]
    fn tau_isometry_and_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            let c = ctx(n);
            for k in 0..=2 * n {
                let x = c.random_degree_with(k, &mut rng).unwrap();
                let t = tau(&x).unwrap();
                assert_eq!(t.norm_sqr(), x.norm_sqr());
                let tt = tau(&t).unwrap();
                assert_eq!(tt, x.scale(&Exact::one().signed(n as i64)));
                let p = k.min(n);
                let y = c.random_form_with(p, k - p, &mut rng).unwrap();
                let ss = bar_star(&bar_star(&y).unwrap()).unwrap();
                assert_eq!(ss, y.scale(&Exact::one().signed(k as i64)));
            }
        }
    }

    #[test]
    fn adjoint_defect_examples() {
        let c = ctx(1);
        let d = tau_adjoint_defect(&c.theta_bar(0), &c.theta(0)).unwrap();
        assert!(d.is_zero());
        let d = tau_adjoint_defect(&c.zero(), &c.theta(0)).unwrap();
        assert!(d.is_zero());
        assert!(matches!(
            tau_adjoint_defect(&c.theta(0), &c.scalar(Exact::one())),
            Err(Error::DegreeMismatch { .. })
        ));
    }
}
