//! The exterior algebra `Λ^{p,q}(ℂⁿ)*` at a single point, written in a
//! unitary coframe `θ¹, …, θⁿ` of `(T*X)^{1,0}` together with the conjugates
//! `θ̄¹, …, θ̄ⁿ`.
//!
//! A basis monomial `θ^I ∧ θ̄^J` is stored as a bitmask. The generators are
//! ordered `θ¹ < … < θⁿ < θ̄¹ < … < θ̄ⁿ`, so the canonical representative of a
//! monomial always lists its holomorphic factors first. Monomials are
//! orthonormal for the hermitian metric `⟨α, β⟩ = g_ℂ(α, β̄)`.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarMode};

/// Largest complex dimension the bitmask encoding supports.
pub const MAX_N: usize = 16;

const ANTI_SHIFT: u32 = 16;

/// Basis monomial `θ^I ∧ θ̄^J`. Indices are zero-based: bit `j` of the
/// holomorphic mask stands for `θ^{j+1}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(u32);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn new(holo: u16, anti: u16) -> Self {
        Monomial(holo as u32 | (anti as u32) << ANTI_SHIFT)
    }

    /// Builds the monomial with the given index sets, ignoring order.
    /// Returns `None` if an index repeats.
    pub fn from_indices(holo: &[usize], anti: &[usize]) -> Option<Self> {
        let mut h = 0u16;
        for &i in holo {
            let bit = 1u16.checked_shl(i as u32)?;
            if h & bit != 0 {
                return None;
            }
            h |= bit;
        }
        let mut a = 0u16;
        for &j in anti {
            let bit = 1u16.checked_shl(j as u32)?;
            if a & bit != 0 {
                return None;
            }
            a |= bit;
        }
        Some(Monomial::new(h, a))
    }

    pub fn holo(self) -> u16 {
        self.0 as u16
    }

    pub fn anti(self) -> u16 {
        (self.0 >> ANTI_SHIFT) as u16
    }

    pub fn p(self) -> usize {
        self.holo().count_ones() as usize
    }

    pub fn q(self) -> usize {
        self.anti().count_ones() as usize
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn holo_indices(self) -> Vec<usize> {
        bits(self.holo() as u32)
    }

    pub fn anti_indices(self) -> Vec<usize> {
        bits(self.anti() as u32)
    }

    pub(crate) fn key(self) -> u32 {
        self.0
    }

    pub(crate) fn from_key(key: u32) -> Self {
        Monomial(key)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for i in self.holo_indices() {
            parts.push(format!("θ{}", i + 1));
        }
        for j in self.anti_indices() {
            parts.push(format!("θ̄{}", j + 1));
        }
        write!(f, "{}", parts.join("∧"))
    }
}

fn bits(mut x: u32) -> Vec<usize> {
    let mut out = Vec::new();
    while x != 0 {
        let b = x.trailing_zeros();
        out.push(b as usize);
        x &= x - 1;
    }
    out
}

/// Parity of the sign of `m_a ∧ m_b` relative to the canonical monomial
/// `m_a ∪ m_b` (0 for `+`, 1 for `-`), or `None` if the factors share a
/// generator.
pub(crate) fn wedge_parity(a: Monomial, b: Monomial) -> Option<i64> {
    let (a, b) = (a.key(), b.key());
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        inversions += (a >> y).count_ones();
        rest &= rest - 1;
    }
    Some((inversions % 2) as i64)
}

/// Parity of the sign picked up when generator `bit` moves to the front of `m`.
pub(crate) fn removal_parity(m: Monomial, bit: u32) -> i64 {
    let below = m.key() & ((1u32 << bit) - 1);
    (below.count_ones() % 2) as i64
}

/// All `k`-subsets of `{0..n}` as bitmasks, in lexicographic order of their
/// sorted index lists.
pub fn subsets(n: usize, k: usize) -> Vec<u16> {
    fn rec(start: usize, n: usize, k: usize, acc: u16, out: &mut Vec<u16>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            rec(i + 1, n, k - 1, acc | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, 0, &mut out);
    }
    out
}

/// The model fiber `ℂⁿ` together with the coefficient ring.
pub struct FiberContext<S> {
    n: usize,
    _scalar: PhantomData<fn() -> S>,
}

impl<S> Clone for FiberContext<S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for FiberContext<S> {}

impl<S> fmt::Debug for FiberContext<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiberContext").field("n", &self.n).finish()
    }
}

impl<S: Scalar> FiberContext<S> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::InvalidDimension { n, max: MAX_N });
        }
        Ok(FiberContext {
            n,
            _scalar: PhantomData,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> ScalarMode {
        S::MODE
    }

    pub fn zero(&self) -> Form<S> {
        Form::zero(self.n)
    }

    pub fn scalar(&self, z: S) -> Form<S> {
        self.monomial(Monomial::ONE, z)
    }

    pub fn monomial(&self, m: Monomial, z: S) -> Form<S> {
        let mut f = Form::zero(self.n);
        f.add_term(m, z);
        f
    }

    /// `θ^{j+1}`.
    pub fn theta(&self, j: usize) -> Form<S> {
        assert!(j < self.n, "index {j} out of range for n = {}", self.n);
        self.monomial(Monomial::new(1 << j, 0), S::one())
    }

    /// `θ̄^{j+1}`.
    pub fn theta_bar(&self, j: usize) -> Form<S> {
        assert!(j < self.n, "index {j} out of range for n = {}", self.n);
        self.monomial(Monomial::new(0, 1 << j), S::one())
    }

    /// The unit frame `η = θ¹ ∧ … ∧ θⁿ` of the canonical bundle.
    pub fn eta(&self) -> Form<S> {
        self.monomial(Monomial::new(self.full_mask(), 0), S::one())
    }

    pub(crate) fn full_mask(&self) -> u16 {
        ((1u32 << self.n) - 1) as u16
    }

    /// Monomial basis of `Λ^{p,q}`, holomorphic part varying slowest.
    pub fn basis(&self, p: usize, q: usize) -> Result<Vec<Monomial>> {
        self.check_bidegree(p, q)?;
        let mut out = Vec::new();
        for h in subsets(self.n, p) {
            for a in subsets(self.n, q) {
                out.push(Monomial::new(h, a));
            }
        }
        Ok(out)
    }

    fn check_bidegree(&self, p: usize, q: usize) -> Result<()> {
        if p > self.n || q > self.n {
            return Err(Error::BidegreeOutOfRange { n: self.n, p, q });
        }
        Ok(())
    }

    pub fn covector(&self, a: Vec<S>) -> Result<Covector<S>> {
        if a.len() != self.n {
            return Err(Error::CovectorLength {
                n: self.n,
                got: a.len(),
            });
        }
        Ok(Covector { n: self.n, a })
    }

    pub fn random_covector<R: Rng + ?Sized>(&self, rng: &mut R) -> Covector<S> {
        Covector {
            n: self.n,
            a: (0..self.n).map(|_| S::sample(rng)).collect(),
        }
    }

    /// Pure `(p, q)` form with independent coefficients drawn by
    /// [`Scalar::sample`] on every basis monomial; deterministic in `seed`.
    pub fn random_form(&self, p: usize, q: usize, seed: u64) -> Result<Form<S>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.random_form_with(p, q, &mut rng)
    }

    pub fn random_form_with<R: Rng + ?Sized>(
        &self,
        p: usize,
        q: usize,
        rng: &mut R,
    ) -> Result<Form<S>> {
        let mut f = self.zero();
        for m in self.basis(p, q)? {
            f.add_term(m, S::sample(rng));
        }
        Ok(f)
    }

    /// Random element of `Λ^k` with every bidegree `(a, k - a)` populated.
    pub fn random_degree_with<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<Form<S>> {
        if k > 2 * self.n {
            return Err(Error::DegreeOutOfRange {
                k: k as i64,
                max: 2 * self.n,
            });
        }
        let mut f = self.zero();
        for p in k.saturating_sub(self.n)..=k.min(self.n) {
            f = f.add(&self.random_form_with(p, k - p, rng)?)?;
        }
        Ok(f)
    }
}

/// Element of `Λ*_ℂ` in canonical sparse form: sorted monomials, no zero
/// coefficients.
#[derive(Clone, PartialEq)]
pub struct Form<S> {
    n: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> fmt::Debug for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form(n={}; {self})", self.n)
    }
}

impl<S: Scalar> fmt::Display for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, z)| format!("[{z}]·{m}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn check_same(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::ContextMismatch { left: a, right: b });
    }
    Ok(())
}

impl<S: Scalar> Form<S> {
    pub fn zero(n: usize) -> Self {
        Form {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &S)> {
        self.terms.iter().map(|(m, z)| (*m, z))
    }

    pub fn coefficient(&self, m: Monomial) -> S {
        self.terms.get(&m).cloned().unwrap_or_else(S::zero)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, z: S) {
        if z.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(z);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += z;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `Some((p, q))` when every term has the same bidegree. The zero form
    /// has no bidegree.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let bd = (first.p(), first.q());
        it.all(|m| (m.p(), m.q()) == bd).then_some(bd)
    }

    /// `Some(k)` when every term has total degree `k`.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys();
        let k = it.next()?.degree();
        it.all(|m| m.degree() == k).then_some(k)
    }

    pub fn is_pure(&self) -> bool {
        self.is_zero() || self.bidegree().is_some()
    }

    /// Splits into homogeneous components by total degree.
    pub fn by_degree(&self) -> BTreeMap<usize, Form<S>> {
        let mut out: BTreeMap<usize, Form<S>> = BTreeMap::new();
        for (m, z) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Form::zero(self.n))
                .add_term(*m, z.clone());
        }
        out
    }

    pub fn add(&self, other: &Form<S>) -> Result<Form<S>> {
        check_same(self.n, other.n)?;
        let mut out = self.clone();
        for (m, z) in &other.terms {
            out.add_term(*m, z.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form<S>) -> Result<Form<S>> {
        check_same(self.n, other.n)?;
        let mut out = self.clone();
        for (m, z) in &other.terms {
            out.add_term(*m, -z.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Form<S> {
        self.scale(&-S::one())
    }

    pub fn scale(&self, z: &S) -> Form<S> {
        let mut out = Form::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(*m, c.clone() * z.clone());
        }
        out
    }

    /// Exterior product. Bilinear, associative, graded-commutative.
    pub fn wedge(&self, other: &Form<S>) -> Result<Form<S>> {
        check_same(self.n, other.n)?;
        let mut out = Form::zero(self.n);
        for (ma, za) in &self.terms {
            for (mb, zb) in &other.terms {
                if let Some(parity) = wedge_parity(*ma, *mb) {
                    let m = Monomial::from_key(ma.key() | mb.key());
                    out.add_term(m, (za.clone() * zb.clone()).signed(parity));
                }
            }
        }
        Ok(out)
    }

    /// Hermitian inner product, conjugate-linear in the second slot.
    pub fn inner(&self, other: &Form<S>) -> Result<S> {
        check_same(self.n, other.n)?;
        let mut acc = S::zero();
        for (m, z) in &self.terms {
            if let Some(w) = other.terms.get(m) {
                acc += z.clone() * w.conj();
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> S {
        self.terms
            .values()
            .fold(S::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Structural conjugation `θ ↔ θ̄` with conjugated coefficients.
    pub fn conjugate(&self) -> Form<S> {
        let mut out = Form::zero(self.n);
        for (m, z) in &self.terms {
            // θ̄^I ∧ θ^J = (-1)^{|I||J|} θ^J ∧ θ̄^I
            let swapped = Monomial::new(m.anti(), m.holo());
            let sign = (m.p() * m.q()) as i64;
            out.add_term(swapped, z.conj().signed(sign));
        }
        out
    }

    /// Applies `f` to every coefficient, dropping those that become zero.
    pub fn map_coefficients(&self, f: impl Fn(&S) -> S) -> Form<S> {
        let mut out = Form::zero(self.n);
        for (m, z) in &self.terms {
            out.add_term(*m, f(z));
        }
        out
    }
}

/// Real covector `γ = γ^{1,0} + γ^{0,1}` stored through
/// `γ^{0,1} = Σ a_i θ̄^i`; the `(1,0)` part is `Σ ā_i θ^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Covector<S> {
    n: usize,
    a: Vec<S>,
}

impl<S: Scalar> Covector<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[S] {
        &self.a
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|z| z.is_zero())
    }

    /// `γ^{0,1}`.
    pub fn part01(&self) -> Form<S> {
        let mut f = Form::zero(self.n);
        for (j, z) in self.a.iter().enumerate() {
            f.add_term(Monomial::new(0, 1 << j), z.clone());
        }
        f
    }

    /// `γ^{1,0}`.
    pub fn part10(&self) -> Form<S> {
        let mut f = Form::zero(self.n);
        for (j, z) in self.a.iter().enumerate() {
            f.add_term(Monomial::new(1 << j, 0), z.conj());
        }
        f
    }

    /// Norm of the real covector, `|γ|² = 2 Σ |a_i|²`.
    pub fn norm_sqr(&self) -> S {
        self.a
            .iter()
            .fold(S::zero(), |acc, z| acc + z.norm_sqr())
            * S::from_int(2)
    }

    /// Real-linear combination `x·self + y·other`.
    pub fn combine(&self, x: &S, other: &Covector<S>, y: &S) -> Result<Covector<S>> {
        check_same(self.n, other.n)?;
        Ok(Covector {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(u, v)| u.clone() * x.clone() + v.clone() * y.clone())
                .collect(),
        })
    }
}

pub fn wedge<S: Scalar>(x: &Form<S>, y: &Form<S>) -> Result<Form<S>> {
    x.wedge(y)
}

pub fn inner<S: Scalar>(x: &Form<S>, y: &Form<S>) -> Result<S> {
    x.inner(y)
}

/// Contraction `ι(γ^{1,0})` by the `g_ℂ`-dual vector of `γ^{1,0}`.
///
/// On `θ^I ∧ θ̄^J` it removes one `θ̄` factor at a time with coefficient
/// `ā_j` and the antiderivation sign, passing over the holomorphic factors.
pub fn contract<S: Scalar>(g: &Covector<S>, x: &Form<S>) -> Result<Form<S>> {
    check_same(g.n, x.n)?;
    let mut out = Form::zero(x.n);
    for (m, z) in &x.terms {
        for j in m.anti_indices() {
            let bit = ANTI_SHIFT + j as u32;
            let parity = removal_parity(*m, bit);
            let rest = Monomial::from_key(m.key() & !(1u32 << bit));
            out.add_term(rest, (g.a[j].conj() * z.clone()).signed(parity));
        }
    }
    Ok(out)
}
