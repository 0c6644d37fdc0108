use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::config::{PhiPreset, SimConfig};
use super::eigen::{lobpcg, EigenOptions, FourierPreconditioner};
use super::lattice::LatticeField;
use super::mass::{outside_mass, singular_set, SingularSet};
use super::operator::{to_complex, DeformedOperator};
use super::TorusError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Relative tolerance of the `σ_min = s|c|` oracle for constant `w = c`.
pub const SIGMA_REL_TOL: f64 = 0.01;

/// Eigenpairs of `D_sᵀ D_s` with fields normalized to `‖ζ‖₂ = 1`.
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub fields: Vec<LatticeField>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

pub fn smallest_eigenpairs(
    op: &DeformedOperator,
    count: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
    precondition: bool,
) -> Result<Eigenpairs, TorusError> {
    let grid = op.grid();
    let dim = 2 * grid.sites();
    let mean_w2 = op.w().iter().map(|z| z.norm_sqr()).sum::<f64>() / grid.sites() as f64;
    let pre = precondition.then(|| FourierPreconditioner::new(grid.n, op.s() * op.s() * mean_w2));
    let apply = |x: &[f64]| op.normal_real(x);
    let pre_fn = pre.as_ref().map(|p| move |x: &[f64]| p.apply(x));
    let opts = EigenOptions {
        count,
        tol,
        max_iter,
        seed,
    };
    let res = lobpcg(
        dim,
        &apply,
        pre_fn.as_ref().map(|f| f as &dyn Fn(&[f64]) -> Vec<f64>),
        &opts,
    )?;
    let h = grid.spacing();
    let fields = res
        .vectors
        .column_iter()
        .map(|c| {
            let mut f = LatticeField::from_positive(grid, &to_complex(c.as_slice()));
            f.scale(1.0 / h);
            f
        })
        .collect();
    Ok(Eigenpairs {
        values: res.values.iter().map(|v| v.max(0.0)).collect(),
        fields,
        residuals: res.residuals,
        iterations: res.iterations,
    })
}

/// Singular values of the dense real matrix of `D_s`, ascending. Only for
/// small grids.
pub fn dense_singular_values(op: &DeformedOperator) -> Vec<f64> {
    let svd = op.dense().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(f64::total_cmp);
    sv
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub s: f64,
    pub converged: bool,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// `√λ₀`.
    pub sigma_min: Option<f64>,
    /// Outside mass of the lowest eigenvector.
    pub outside_mass: Option<f64>,
    /// Outside mass of every returned eigenvector.
    pub outside_mass_all: Vec<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    pub grid: usize,
    pub spacing: f64,
    pub torus_length: f64,
    pub stencil: String,
    pub unknowns: usize,
    pub preconditioned: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub schema_version: u32,
    pub preset: String,
    pub singular_set: SingularSet,
    pub delta: f64,
    pub entries: Vec<SweepEntry>,
    /// Least-squares slope of `log(outside mass)` against `log s`.
    pub mass_slope: Option<f64>,
    /// Least-squares slope of `log σ_min` against `log s`.
    pub sigma_slope: Option<f64>,
    /// `max_s s · outside_mass(s)`, an empirical constant for the `C′/s` bound.
    pub c_prime_estimate: Option<f64>,
    pub contracts: Vec<ContractCheck>,
    pub discretization: Discretization,
    pub runtime_secs: f64,
}

impl SpectralReport {
    pub fn passed(&self) -> bool {
        self.contracts.iter().all(|c| c.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["s", "eigenvalues", "outside_mass", "sigma_min"])
            .expect("in-memory csv");
        let opt = |x: Option<f64>| x.map(|v| format!("{v:.12e}")).unwrap_or_default();
        for e in &self.entries {
            let eig: Vec<String> = e.eigenvalues.iter().map(|v| format!("{v:.12e}")).collect();
            w.write_record([
                format!("{}", e.s),
                eig.join(";"),
                opt(e.outside_mass),
                opt(e.sigma_min),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
    }
}

pub struct SweepOutcome {
    pub report: SpectralReport,
    /// Lowest eigenvector per converged `s`, paired with that `s`.
    pub lowest: Vec<(f64, LatticeField)>,
}

pub fn run_sweep(config: &SimConfig) -> Result<SweepOutcome, TorusError> {
    config.validate()?;
    let start = Instant::now();
    let base = DeformedOperator::assemble(config, 0.0);
    let grid = base.grid();
    let zeros = singular_set(&config.phi, grid);
    let mut entries = Vec::new();
    let mut lowest = Vec::new();
    for (idx, &s) in config.s_values.iter().enumerate() {
        let op = base.with_s(s);
        let seed = config.seed.wrapping_add(idx as u64);
        let solved = smallest_eigenpairs(
            &op,
            config.eig_count,
            config.eig_tol,
            config.max_iter,
            seed,
            config.precondition,
        )
        .and_then(|pairs| {
            let masses = pairs
                .fields
                .iter()
                .map(|f| outside_mass(f, &zeros, config.delta))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((pairs, masses))
        });
        match solved {
            Ok((pairs, masses)) => {
                lowest.push((s, pairs.fields[0].clone()));
                entries.push(SweepEntry {
                    s,
                    converged: true,
                    sigma_min: Some(pairs.values[0].sqrt()),
                    eigenvalues: pairs.values,
                    residuals: pairs.residuals,
                    iterations: pairs.iterations,
                    outside_mass: Some(masses[0]),
                    outside_mass_all: masses,
                    error: None,
                });
            }
            Err(e) => entries.push(SweepEntry {
                s,
                converged: false,
                eigenvalues: vec![],
                residuals: vec![],
                iterations: 0,
                sigma_min: None,
                outside_mass: None,
                outside_mass_all: vec![],
                error: Some(e.to_string()),
            }),
        }
    }

    let ok: Vec<&SweepEntry> = entries.iter().filter(|e| e.converged).collect();
    let pairs = |f: fn(&SweepEntry) -> Option<f64>| -> Vec<(f64, f64)> {
        ok.iter().filter_map(|e| f(e).map(|v| (e.s, v))).collect()
    };
    let mass_pts = pairs(|e| e.outside_mass);
    let sigma_pts = pairs(|e| e.sigma_min);
    let c_prime = mass_pts
        .iter()
        .map(|(s, m)| s * m)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));

    let contracts = contracts(config, &zeros, &entries);
    let report = SpectralReport {
        schema_version: REPORT_SCHEMA_VERSION,
        preset: config.phi.name().to_string(),
        singular_set: zeros,
        delta: config.delta,
        mass_slope: loglog_slope(&mass_pts),
        sigma_slope: loglog_slope(&sigma_pts),
        c_prime_estimate: c_prime,
        entries,
        contracts,
        discretization: Discretization {
            grid: grid.n,
            spacing: grid.spacing(),
            torus_length: 2.0 * std::f64::consts::PI,
            stencil: "fourth-order central differences, periodic".into(),
            unknowns: 2 * grid.sites(),
            preconditioned: config.precondition,
        },
        runtime_secs: start.elapsed().as_secs_f64(),
    };
    Ok(SweepOutcome { report, lowest })
}

fn contracts(config: &SimConfig, zeros: &SingularSet, entries: &[SweepEntry]) -> Vec<ContractCheck> {
    let mut out = Vec::new();
    let failed: Vec<String> = entries
        .iter()
        .filter(|e| !e.converged)
        .map(|e| format!("s={}: {}", e.s, e.error.as_deref().unwrap_or("unknown")))
        .collect();
    out.push(ContractCheck {
        name: "solver_converged".into(),
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} of {} converged", entries.len(), entries.len())
        } else {
            failed.join("; ")
        },
    });
    if !failed.is_empty() {
        return out;
    }
    match zeros {
        SingularSet::Points { points } if !points.is_empty() => {
            let mass: Vec<f64> = entries.iter().map(|e| e.outside_mass.unwrap_or(f64::NAN)).collect();
            let decreasing = mass.windows(2).all(|w| w[1] < w[0]);
            out.push(ContractCheck {
                name: "outside_mass_strictly_decreasing".into(),
                passed: decreasing,
                detail: format!("{mass:?}"),
            });
            let scaled: Vec<f64> = entries.iter().zip(&mass).map(|(e, m)| e.s * m).collect();
            let bounded = scaled.iter().all(|v| *v <= scaled[0]);
            out.push(ContractCheck {
                name: "s_times_outside_mass_bounded".into(),
                passed: bounded,
                detail: format!("{scaled:?}"),
            });
        }
        SingularSet::Points { .. } => {
            let sigma: Vec<f64> = entries.iter().map(|e| e.sigma_min.unwrap_or(0.0)).collect();
            out.push(ContractCheck {
                name: "trivial_kernel".into(),
                passed: sigma.iter().all(|v| *v > 0.0),
                detail: format!("sigma_min = {sigma:?}"),
            });
            if let PhiPreset::Constant { re, im } = config.phi {
                let c = re.hypot(im);
                let worst = entries
                    .iter()
                    .map(|e| (e.sigma_min.unwrap_or(0.0) - e.s * c).abs() / (e.s * c))
                    .fold(0.0, f64::max);
                out.push(ContractCheck {
                    name: "sigma_min_equals_s_abs_c".into(),
                    passed: worst <= SIGMA_REL_TOL,
                    detail: format!("worst relative deviation {worst:.3e}"),
                });
            }
        }
        SingularSet::Everywhere => {}
    }
    out
}

/// Least-squares slope of `log y` against `log x`; `None` unless at least
/// two points with positive coordinates.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 || pts.len() != points.len() {
        return None;
    }
    let xs = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.0));
    let ys = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let xm = xs.mean();
    let ym = ys.mean();
    let dx = xs.add_scalar(-xm);
    let denom = dx.dot(&dx);
    (denom > 0.0).then(|| dx.dot(&ys.add_scalar(-ym)) / denom)
}
