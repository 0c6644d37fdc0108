//! Randomized exact trials of the concentrating condition and of the
//! odd-rank antisymmetric degeneracy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exterior::{Covector, FiberContext};
use crate::matrix::Matrix;
use crate::perturbation::{concentrating_defect, singular_verdict, PhiMap, SymmetryClass};
use crate::scalar::{Exact, Scalar};

/// Bound on resampling a degenerate (`φ = 0` or `γ = 0`) draw.
const MAX_RESAMPLE: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    /// The class for which the defect must vanish.
    Correct,
    /// The opposite class; the defect is expected to be generically nonzero.
    Wrong,
    /// `det φ = 0` for antisymmetric `φ` of odd rank.
    OddRankDeterminant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub kind: RowKind,
    pub n: usize,
    pub r: usize,
    pub class: SymmetryClass,
    pub seed: u64,
    pub trials: usize,
    /// Trials whose defect (or determinant) is exactly zero.
    pub zero: usize,
    pub nonzero: usize,
    /// Degenerate draws that were redrawn.
    pub resampled: usize,
    /// Largest defect norm seen, in floating point.
    pub max_defect: f64,
    pub passed: bool,
    /// Exact text of the first trial that broke the row's expectation.
    pub counterexample: Option<ConditionCounterexample>,
    /// Why the row was not run, if it was not.
    pub skipped: Option<String>,
    /// The class forces `φ = 0` at this rank, so the row holds trivially.
    pub forced_zero: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCounterexample {
    pub phi: String,
    pub eta_scalar: String,
    pub gamma: Option<String>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub rows: Vec<ConditionRow>,
    pub wrong_class_trials: usize,
    pub wrong_class_nonzero: usize,
    pub wrong_class_rate: Option<f64>,
    /// Minimum acceptable wrong-class nonzero rate.
    pub wrong_class_threshold: f64,
}

impl ConditionSummary {
    pub fn correct_class_passed(&self) -> bool {
        self.rows_of(RowKind::Correct).all(|r| r.passed)
    }

    pub fn determinant_passed(&self) -> bool {
        self.rows_of(RowKind::OddRankDeterminant).all(|r| r.passed)
    }

    pub fn wrong_class_passed(&self) -> bool {
        self.wrong_class_rate
            .is_none_or(|rate| rate >= self.wrong_class_threshold)
    }

    pub fn passed(&self) -> bool {
        self.correct_class_passed() && self.determinant_passed() && self.wrong_class_passed()
    }

    pub fn rows_of(&self, kind: RowKind) -> impl Iterator<Item = &ConditionRow> {
        self.rows.iter().filter(move |r| r.kind == kind)
    }
}

pub const WRONG_CLASS_THRESHOLD: f64 = 0.95;

fn row_seed(seed: u64, kind: RowKind, n: usize, r: usize) -> u64 {
    let k = match kind {
        RowKind::Correct => 1u64,
        RowKind::Wrong => 2,
        RowKind::OddRankDeterminant => 3,
    };
    seed ^ (k << 48) ^ ((n as u64) << 24) ^ (r as u64)
}

/// Every row for `n ∈ n_list` (odd) and `r ∈ r_list`: correct class,
/// wrong class, and odd-rank determinant rows, spread over `threads`.
pub fn run_condition(
    n_list: &[usize],
    r_list: &[usize],
    trials: usize,
    seed: u64,
    threads: usize,
) -> ConditionSummary {
    let mut jobs = Vec::new();
    for &n in n_list {
        for &r in r_list {
            jobs.push((RowKind::Correct, n, r));
            jobs.push((RowKind::Wrong, n, r));
            if r % 2 == 1 {
                jobs.push((RowKind::OddRankDeterminant, n, r));
            }
        }
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut rows: Vec<(usize, ConditionRow)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads.max(1))
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        let Some(&(kind, n, r)) = jobs.get(k) else { break };
                        local.push((k, run_row(kind, n, r, trials, seed)));
                    }
                    local
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("condition worker panicked"))
            .collect()
    });
    rows.sort_by_key(|(k, _)| *k);
    let rows: Vec<ConditionRow> = rows.into_iter().map(|(_, r)| r).collect();
    let (t, nz) = rows
        .iter()
        .filter(|r| r.kind == RowKind::Wrong && r.skipped.is_none())
        .fold((0, 0), |(t, nz), r| (t + r.trials, nz + r.nonzero));
    ConditionSummary {
        rows,
        wrong_class_trials: t,
        wrong_class_nonzero: nz,
        wrong_class_rate: (t > 0).then(|| nz as f64 / t as f64),
        wrong_class_threshold: WRONG_CLASS_THRESHOLD,
    }
}

pub fn run_row(kind: RowKind, n: usize, r: usize, trials: usize, seed: u64) -> ConditionRow {
    let seed = row_seed(seed, kind, n, r);
    let concentrating = SymmetryClass::concentrating_for(n);
    let class = match (kind, concentrating) {
        (RowKind::Correct, Some(c)) => c,
        (RowKind::Wrong, Some(c)) => c.opposite(),
        _ => SymmetryClass::Antisymmetric,
    };
    let mut row = ConditionRow {
        kind,
        n,
        r,
        class,
        seed,
        trials: 0,
        zero: 0,
        nonzero: 0,
        resampled: 0,
        max_defect: 0.0,
        passed: true,
        counterexample: None,
        skipped: None,
        forced_zero: class == SymmetryClass::Antisymmetric && r == 1,
        error: None,
    };
    if concentrating.is_none() {
        row.passed = false;
        row.error = Some(format!("n = {n} is even"));
        return row;
    }
    if kind == RowKind::Wrong && class == SymmetryClass::Antisymmetric && r == 1 {
        row.skipped = Some("a rank-one antisymmetric matrix is zero".into());
        return row;
    }
    match fill_row(&mut row, trials) {
        Ok(()) => {}
        Err(e) => {
            row.passed = false;
            row.error = Some(e.to_string());
        }
    }
    row
}

fn fill_row(row: &mut ConditionRow, trials: usize) -> Result<()> {
    let ctx = FiberContext::<Exact>::new(row.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(row.seed);
    for _ in 0..trials {
        let (phi, g) = loop {
            let phi = PhiMap::random(&ctx, row.r, row.class, true, &mut rng)?;
            let g = ctx.random_covector(&mut rng);
            // only wrong-class rows need a nonzero pair to be meaningful
            let degenerate = row.kind == RowKind::Wrong && (phi.is_zero() || g.is_zero());
            if !degenerate {
                break (phi, g);
            }
            row.resampled += 1;
            if row.resampled > MAX_RESAMPLE * trials.max(1) {
                return Err(crate::error::Error::InvalidExample {
                    kind: "trial",
                    reason: "too many degenerate random draws".into(),
                });
            }
        };
        row.trials += 1;
        let (is_zero, value, size) = match row.kind {
            RowKind::OddRankDeterminant => {
                let v = singular_verdict(&phi);
                (v.is_singular, v.det_value.to_string(), v.det_value.to_c64().norm())
            }
            _ => {
                let d = concentrating_defect(&phi, &g)?;
                (d.is_zero, d.max_norm_sqr.to_string(), d.max_norm)
            }
        };
        row.max_defect = row.max_defect.max(size);
        if is_zero {
            row.zero += 1;
        } else {
            row.nonzero += 1;
        }
        let unexpected = match row.kind {
            RowKind::Correct | RowKind::OddRankDeterminant => !is_zero,
            RowKind::Wrong => is_zero,
        };
        if unexpected && row.counterexample.is_none() {
            row.counterexample = Some(ConditionCounterexample {
                phi: matrix_text(phi.matrix()),
                eta_scalar: phi.eta_scalar().to_string(),
                gamma: (row.kind != RowKind::OddRankDeterminant).then(|| covector_text(&g)),
                value,
            });
        }
    }
    row.passed = match row.kind {
        RowKind::Correct | RowKind::OddRankDeterminant => row.nonzero == 0,
        // judged in aggregate
        RowKind::Wrong => true,
    };
    Ok(())
}

pub fn matrix_text<S: Scalar>(m: &Matrix<S>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = (0..m.cols()).map(|j| m[(i, j)].to_string()).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn covector_text<S: Scalar>(g: &Covector<S>) -> String {
    let parts: Vec<String> = g.coefficients().iter().map(|a| a.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep() {
        let s = run_condition(&[1, 3], &[1, 2, 3], 4, 2, 2);
        assert!(s.correct_class_passed(), "{:?}", s.rows);
        assert!(s.determinant_passed());
        assert!(s.wrong_class_rate.unwrap() >= 0.95);
        let skipped: Vec<_> = s.rows.iter().filter(|r| r.skipped.is_some()).collect();
        assert_eq!(skipped.len(), 1);
        assert_eq!((skipped[0].n, skipped[0].r), (1, 1));
        let forced: Vec<_> = s.rows_of(RowKind::Correct).filter(|r| r.forced_zero).collect();
        assert_eq!(forced.len(), 1);
        assert_eq!((forced[0].n, forced[0].r, forced[0].trials), (3, 1, 4));
    }

    #[test]
    fn deterministic_across_threads() {
        assert_eq!(run_condition(&[1], &[2], 3, 9, 1), run_condition(&[1], &[2], 3, 9, 3));
    }

    #[test]
    fn even_dimension_row_fails() {
        let row = run_row(RowKind::Correct, 2, 1, 1, 0);
        assert!(!row.passed);
        assert!(row.error.is_some());
    }
}
