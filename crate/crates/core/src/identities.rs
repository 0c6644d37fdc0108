//! Randomized exact checks of the fiber identities.
//!
//! Each check draws fresh exact inputs for a fixed `(n, p)`, evaluates both
//! sides and compares them structurally. A failure carries the offending
//! inputs in exact text form so it can be replayed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::clifford;
use crate::error::Result;
use crate::exterior::{contract, Covector, FiberContext, Form, Monomial};
use crate::hodge::{bar_star, epsilon_formula, tau, tau_adjoint_defect, tau_graded, Phase, VolumeConvention};
use crate::scalar::{Exact, Scalar};

/// Above this dimension random inputs are sparse (a handful of monomials)
/// rather than dense, which keeps exact wedge products tractable.
pub const DENSE_MAX_N: usize = 5;
const SPARSE_TERMS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `⟨γ^{0,1}∧α, β⟩ = ⟨α, ι(γ^{1,0})β⟩`.
    Adjunction,
    /// `ι(v)(x∧y) = ι(v)x∧y + (−1)^{deg x} x∧ι(v)y`.
    ContractionAntiderivation,
    /// `ι(v)ι(v) = 0`.
    DoubleContraction,
    /// `⟨c(γ)α, β⟩ = −⟨α, c(γ)β⟩`.
    CliffordSkewAdjoint,
    /// `c(γ)² = −|γ|²`.
    CliffordSquare,
    /// `α ∧ *̄β = ⟨α, β⟩ dv`.
    StarDefining,
    /// `*̄² = (−1)^k` on `Λ^k`.
    StarSquare,
    /// `τ² = (−1)^n`.
    TauSquare,
    /// `|η|² *̄(γ^{0,1}∧β) = (−1)^{n(p+1)+p} η∧ι(γ^{1,0}) *̄(η∧β)`.
    StarOfWedge,
    /// `|η|² *̄(ι(γ^{1,0})β) = (−1)^{(n+1)(p−1)} η∧γ^{0,1}∧*̄(η∧β)`.
    StarOfContraction,
    /// `|η|² τ(c(γ)β) = (−1)^{n(n+1)/2+1} η∧c(γ)τ(η∧β)`.
    TauClifford,
    /// `Re⟨τx, y⟩ = Re⟨x, (−1)^n τy⟩`.
    TauAdjoint,
}

impl Identity {
    pub const ALL: [Identity; 12] = [
        Identity::Adjunction,
        Identity::ContractionAntiderivation,
        Identity::DoubleContraction,
        Identity::CliffordSkewAdjoint,
        Identity::CliffordSquare,
        Identity::StarDefining,
        Identity::StarSquare,
        Identity::TauSquare,
        Identity::StarOfWedge,
        Identity::StarOfContraction,
        Identity::TauClifford,
        Identity::TauAdjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Adjunction => "adjunction",
            Identity::ContractionAntiderivation => "contraction_antiderivation",
            Identity::DoubleContraction => "double_contraction",
            Identity::CliffordSkewAdjoint => "clifford_skew_adjoint",
            Identity::CliffordSquare => "clifford_square",
            Identity::StarDefining => "star_defining_property",
            Identity::StarSquare => "star_square",
            Identity::TauSquare => "tau_square",
            Identity::StarOfWedge => "star_of_wedge",
            Identity::StarOfContraction => "star_of_contraction",
            Identity::TauClifford => "tau_clifford",
            Identity::TauAdjoint => "tau_adjoint",
        }
    }

    fn index(self) -> u64 {
        Identity::ALL.iter().position(|&i| i == self).unwrap() as u64
    }

    /// Runs one random trial; `Some` carries a serialized counterexample.
    pub fn trial<R: Rng + ?Sized>(
        self,
        ctx: &FiberContext<Exact>,
        p: usize,
        rng: &mut R,
    ) -> Result<Option<Counterexample>> {
        let n = ctx.n();
        let mut ce = Counterexample::default();
        let defect = match self {
            Identity::Adjunction => {
                let g = ctx.random_covector(rng);
                let a = random_input(ctx, 0, p, rng)?;
                let b = random_antiholomorphic(ctx, rng)?;
                ce.push("gamma", covector_text(&g));
                ce.push("alpha", &a);
                ce.push("beta", &b);
                let lhs = g.part01().wedge(&a)?.inner(&b)?;
                let rhs = a.inner(&contract(&g, &b)?)?;
                scalar_defect(lhs, rhs)
            }
            Identity::ContractionAntiderivation => {
                let g = ctx.random_covector(rng);
                let r = rng.random_range(0..=n);
                let x = random_input(ctx, r, p, rng)?;
                let y = random_input(ctx, rng.random_range(0..=n), rng.random_range(0..=n), rng)?;
                ce.push("gamma", covector_text(&g));
                ce.push("x", &x);
                ce.push("y", &y);
                let lhs = contract(&g, &x.wedge(&y)?)?;
                let rhs = contract(&g, &x)?
                    .wedge(&y)?
                    .add(&x.wedge(&contract(&g, &y)?)?.scale(&Exact::one().signed((r + p) as i64)))?;
                form_defect(&lhs, &rhs)?
            }
            Identity::DoubleContraction => {
                let g = ctx.random_covector(rng);
                let x = random_input(ctx, rng.random_range(0..=n), p, rng)?;
                ce.push("gamma", covector_text(&g));
                ce.push("x", &x);
                form_defect(&contract(&g, &contract(&g, &x)?)?, &ctx.zero())?
            }
            Identity::CliffordSkewAdjoint => {
                let g = ctx.random_covector(rng);
                let a = random_input(ctx, 0, p, rng)?;
                let b = random_antiholomorphic(ctx, rng)?;
                ce.push("gamma", covector_text(&g));
                ce.push("alpha", &a);
                ce.push("beta", &b);
                let lhs = clifford(&g, &a)?.inner(&b)?;
                let rhs = -a.inner(&clifford(&g, &b)?)?;
                scalar_defect(lhs, rhs)
            }
            Identity::CliffordSquare => {
                let g = ctx.random_covector(rng);
                let a = random_input(ctx, 0, p, rng)?;
                ce.push("gamma", covector_text(&g));
                ce.push("alpha", &a);
                let lhs = clifford(&g, &clifford(&g, &a)?)?;
                let rhs = a.scale(&-g.norm_sqr());
                form_defect(&lhs, &rhs)?
            }
            Identity::StarDefining => {
                let r = rng.random_range(0..=n);
                let a = random_input(ctx, r, p, rng)?;
                let b = random_input(ctx, r, p, rng)?;
                ce.push("alpha", &a);
                ce.push("beta", &b);
                let dv = VolumeConvention::new(ctx).dv;
                let lhs = a.wedge(&bar_star(&b)?)?;
                let rhs = dv.scale(&a.inner(&b)?);
                form_defect(&lhs, &rhs)?
            }
            Identity::StarSquare => {
                let r = rng.random_range(0..=n);
                let b = random_input(ctx, r, p, rng)?;
                ce.push("beta", &b);
                let lhs = bar_star(&bar_star(&b)?)?;
                form_defect(&lhs, &b.scale(&Exact::one().signed((r + p) as i64)))?
            }
            Identity::TauSquare => {
                let k = rng.random_range(0..=n) + p;
                let b = random_degree(ctx, k, rng)?;
                ce.push("beta", &b);
                let lhs = tau(&tau(&b)?)?;
                form_defect(&lhs, &b.scale(&Exact::one().signed(n as i64)))?
            }
            Identity::StarOfWedge => {
                let (g, eta, b) = star_inputs(ctx, p, rng, &mut ce)?;
                let lhs = bar_star(&g.part01().wedge(&b)?)?.scale(&eta.norm_sqr());
                let inner = bar_star(&eta.wedge(&b)?)?;
                let rhs = eta
                    .wedge(&contract(&g, &inner)?)?
                    .scale(&Exact::one().signed((n * (p + 1) + p) as i64));
                form_defect(&lhs, &rhs)?
            }
            Identity::StarOfContraction => {
                let (g, eta, b) = star_inputs(ctx, p, rng, &mut ce)?;
                let lhs = bar_star(&contract(&g, &b)?)?.scale(&eta.norm_sqr());
                let inner = bar_star(&eta.wedge(&b)?)?;
                let rhs = eta
                    .wedge(&g.part01().wedge(&inner)?)?
                    .scale(&Exact::one().signed(((n + 1) * (p + 1)) as i64));
                form_defect(&lhs, &rhs)?
            }
            Identity::TauClifford => {
                let (g, eta, b) = star_inputs(ctx, p, rng, &mut ce)?;
                let lhs = tau_graded(&clifford(&g, &b)?).scale(&eta.norm_sqr());
                let inner = tau(&eta.wedge(&b)?)?;
                let rhs = eta
                    .wedge(&clifford(&g, &inner)?)?
                    .scale(&Exact::one().signed((n * (n + 1) / 2 + 1) as i64));
                form_defect(&lhs, &rhs)?
            }
            Identity::TauAdjoint => {
                let k = rng.random_range(0..=n) + p;
                let x = random_degree(ctx, k, rng)?;
                let y = random_degree(ctx, 2 * n - k, rng)?;
                ce.push("x", &x);
                ce.push("y", &y);
                let d = tau_adjoint_defect(&x, &y)?;
                scalar_defect(d, Exact::zero())
            }
        };
        Ok(defect.map(|d| {
            ce.defect = d;
            ce
        }))
    }
}

/// Inputs of a failing trial, every value in exact text form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub inputs: BTreeMap<String, String>,
    pub defect: String,
}

impl Counterexample {
    fn push(&mut self, name: &str, value: impl ToString) {
        self.inputs.insert(name.to_string(), value.to_string());
    }
}

/// Outcome of all trials for one `(identity, n, p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub identity: Identity,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
    pub error: Option<String>,
}

/// Deterministic per-cell seed so cells can run in any order.
pub fn cell_seed(seed: u64, identity: Identity, n: usize, p: usize) -> u64 {
    seed ^ (identity.index() << 40) ^ ((n as u64) << 20) ^ (p as u64)
}

pub fn run_cell(identity: Identity, n: usize, p: usize, trials: usize, seed: u64) -> IdentityResult {
    let cell = cell_seed(seed, identity, n, p);
    let mut rng = ChaCha8Rng::seed_from_u64(cell);
    let mut out = IdentityResult {
        identity,
        n,
        p,
        seed: cell,
        trials: 0,
        failures: 0,
        passed: true,
        counterexample: None,
        error: None,
    };
    let ctx = match FiberContext::<Exact>::new(n) {
        Ok(c) => c,
        Err(e) => {
            out.passed = false;
            out.error = Some(e.to_string());
            return out;
        }
    };
    for _ in 0..trials {
        out.trials += 1;
        match identity.trial(&ctx, p, &mut rng) {
            Ok(None) => {}
            Ok(Some(ce)) => {
                out.failures += 1;
                out.counterexample.get_or_insert(ce);
            }
            Err(e) => {
                out.failures += 1;
                out.error.get_or_insert(e.to_string());
            }
        }
    }
    out.passed = out.failures == 0;
    out
}

/// Runs every identity for `1 ≤ n ≤ n_max`, `0 ≤ p ≤ n`, spreading cells
/// over `threads` workers. Results are ordered by `(identity, n, p)` and do
/// not depend on the thread count.
pub fn run_suite(n_max: usize, trials: usize, seed: u64, threads: usize) -> Vec<IdentityResult> {
    let mut cells = Vec::new();
    for id in Identity::ALL {
        for n in 1..=n_max {
            for p in 0..=n {
                cells.push((id, n, p));
            }
        }
    }
    // heavy cells first for better load balance
    cells.sort_by_key(|&(id, n, p)| (std::cmp::Reverse(n), id, p));
    let threads = threads.max(1);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<IdentityResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        let Some(&(id, n, p)) = cells.get(k) else { break };
                        local.push(run_cell(id, n, p, trials, seed));
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("identity worker panicked"))
            .collect()
    });
    results.sort_by_key(|r| (r.identity, r.n, r.p));
    results
}

/// One row of the phase identity behind the `τ`/Clifford commutation:
/// `ε_{p+1} ε_{n+p}⁻¹ (−1)^{n(p+1)+p} = (−1)^{n(n+1)/2} = ε_{p−1} ε_{n+p}⁻¹ (−1)^{(n+1)(p−1)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub n: usize,
    pub p: usize,
    pub left: String,
    pub middle: String,
    pub right: String,
    pub holds: bool,
}

pub fn epsilon_row(n: usize, p: usize) -> EpsilonRow {
    let (ni, pi) = (n as i64, p as i64);
    let inv = epsilon_formula(ni + pi, n).inv();
    let left = epsilon_formula(pi + 1, n) * inv * Phase::sign(ni * (pi + 1) + pi);
    let middle = Phase::sign(ni * (ni + 1) / 2);
    // ε_{−1} at p = 0 is read off the closed formula
    let right = epsilon_formula(pi - 1, n) * inv * Phase::sign((ni + 1) * (pi - 1));
    EpsilonRow {
        n,
        p,
        left: left.to_string(),
        middle: middle.to_string(),
        right: right.to_string(),
        holds: left == middle && middle == right,
    }
}

/// Exhaustive table for `0 ≤ p ≤ n ≤ n_max`.
pub fn epsilon_table(n_max: usize) -> Vec<EpsilonRow> {
    (0..=n_max)
        .flat_map(|n| (0..=n).map(move |p| epsilon_row(n, p)))
        .collect()
}

fn star_inputs<R: Rng + ?Sized>(
    ctx: &FiberContext<Exact>,
    p: usize,
    rng: &mut R,
    ce: &mut Counterexample,
) -> Result<(Covector<Exact>, Form<Exact>, Form<Exact>)> {
    let g = ctx.random_covector(rng);
    let eta = ctx.eta().scale(&Exact::sample_unit(rng));
    let b = random_input(ctx, 0, p, rng)?;
    ce.push("gamma", covector_text(&g));
    ce.push("eta", &eta);
    ce.push("beta", &b);
    Ok((g, eta, b))
}

/// Dense random `(p, q)` form for small `n`, sparse above [`DENSE_MAX_N`].
fn random_input<R: Rng + ?Sized>(
    ctx: &FiberContext<Exact>,
    p: usize,
    q: usize,
    rng: &mut R,
) -> Result<Form<Exact>> {
    if ctx.n() <= DENSE_MAX_N {
        return ctx.random_form_with(p, q, rng);
    }
    let basis = ctx.basis(p, q)?;
    let mut f = ctx.zero();
    for _ in 0..SPARSE_TERMS.min(basis.len()) {
        let m: Monomial = basis[rng.random_range(0..basis.len())];
        f = f.add(&ctx.monomial(m, Exact::sample(rng)))?;
    }
    Ok(f)
}

fn random_degree<R: Rng + ?Sized>(
    ctx: &FiberContext<Exact>,
    k: usize,
    rng: &mut R,
) -> Result<Form<Exact>> {
    let n = ctx.n();
    let mut f = ctx.zero();
    for r in k.saturating_sub(n)..=k.min(n) {
        f = f.add(&random_input(ctx, r, k - r, rng)?)?;
    }
    Ok(f)
}

fn random_antiholomorphic<R: Rng + ?Sized>(
    ctx: &FiberContext<Exact>,
    rng: &mut R,
) -> Result<Form<Exact>> {
    let mut f = ctx.zero();
    for q in 0..=ctx.n() {
        f = f.add(&random_input(ctx, 0, q, rng)?)?;
    }
    Ok(f)
}

fn covector_text(g: &Covector<Exact>) -> String {
    let parts: Vec<String> = g.coefficients().iter().map(|a| a.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn scalar_defect(lhs: Exact, rhs: Exact) -> Option<String> {
    let d = lhs - rhs;
    (!d.is_zero()).then(|| d.to_string())
}

fn form_defect(lhs: &Form<Exact>, rhs: &Form<Exact>) -> Result<Option<String>> {
    let d = lhs.sub(rhs)?;
    Ok((!d.is_zero()).then(|| d.to_string()))
}
