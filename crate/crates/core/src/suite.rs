//! Named verification suites and the truncation stability comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelManifold;
use crate::spectral::{
    self, kernel_dims, multiset_distance, Check, Tolerances, VerificationReport, DEFAULT_T_SAMPLES,
};
use crate::torsion::{self, lambda_cut, DEFAULT_S_GRID};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    /// Complex property and kernel coincidence of `Δ_dR` and `Δ_RN`.
    Kernel,
    /// Primitivity of harmonic forms.
    Primitivity,
    /// Harmonic forms and the Forman family `Δ_t`.
    Forman,
    /// CR identities, Q-decomposition, eigenvalue law and middle degree.
    Eigen,
    /// Half-Laplacian decomposition of the Rumin spectrum and κ partial sums.
    Reeb,
}

impl Suite {
    pub const PARTS: [Suite; 5] = [Suite::Kernel, Suite::Primitivity, Suite::Forman, Suite::Eigen, Suite::Reeb];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Kernel => "kernel",
            Suite::Primitivity => "primitivity",
            Suite::Forman => "forman",
            Suite::Eigen => "eigen",
            Suite::Reeb => "reeb",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub max_weight: usize,
    pub t_samples: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub tolerances: Tolerances,
}

impl SuiteConfig {
    pub fn new(max_weight: usize) -> Self {
        SuiteConfig {
            max_weight,
            t_samples: DEFAULT_T_SAMPLES.to_vec(),
            s_grid: DEFAULT_S_GRID.to_vec(),
            tolerances: Tolerances::default(),
        }
    }

    fn at_weight(&self, max_weight: usize) -> Self {
        SuiteConfig { max_weight, ..self.clone() }
    }
}

/// Runs one suite; `All` runs every part plus the truncation comparison
/// between `max_weight − 2` and `max_weight` when `max_weight ≥ 4`.
pub fn run_suite(model: &ModelManifold, suite: Suite, cfg: &SuiteConfig) -> Result<VerificationReport> {
    let (m, tol) = (cfg.max_weight, &cfg.tolerances);
    let mut report = VerificationReport::new(suite.name(), model, m, *tol);
    match suite {
        Suite::All => {
            for part in Suite::PARTS {
                report.merge(run_suite(model, part, cfg)?);
            }
            if m >= 4 {
                report.merge(verify_truncation_stability(model, m - 2, m, cfg)?);
            }
        }
        Suite::Kernel => {
            report.merge(spectral::verify_complex_property(model, m, tol)?);
            report.merge(spectral::verify_kernel_coincidence(model, m, tol)?);
        }
        Suite::Primitivity => report.merge(spectral::verify_primitivity(model, m, tol)?),
        Suite::Forman => report.merge(spectral::verify_forman_family(model, m, &cfg.t_samples, tol)?),
        Suite::Eigen => {
            report.merge(spectral::verify_sasakian_identities(model, m, tol)?);
            report.merge(spectral::verify_eigenvalue_identity(model, m, tol)?);
            report.merge(spectral::verify_middle_degree(model, m, tol)?);
        }
        Suite::Reeb => {
            let t = torsion::reeb_decomposition(model, m, &cfg.s_grid, tol)?;
            report.merge(t.as_verification(*tol));
        }
    }
    Ok(report)
}

/// Suite outcomes, kernel dimensions and the Rumin/Reeb multisets below the
/// lower cutoff's `Λ_cut` agree between two truncations.
pub fn verify_truncation_stability(model: &ModelManifold, low: usize, high: usize, cfg: &SuiteConfig) -> Result<VerificationReport> {
    if low >= high {
        return Err(Error::InvalidParameter(format!("need low < high, got {low} and {high}")));
    }
    let tol = &cfg.tolerances;
    let mut report = VerificationReport::new("stability", model, high, *tol);
    let detail = format!("max weight {low} vs {high}");
    for part in [Suite::Kernel, Suite::Primitivity, Suite::Forman, Suite::Eigen] {
        let a = run_suite(model, part, &cfg.at_weight(low))?.passed();
        let b = run_suite(model, part, &cfg.at_weight(high))?.passed();
        report.checks.push(
            Check::count("stability.outcome", "suite outcome independent of the cutoff", usize::from(a), usize::from(b))
                .with_detail(format!("{}; {detail}", part.name())),
        );
    }
    let top = 2 * model.frame().n() + 1;
    let ka = kernel_dims(&spectral::verify_kernel_coincidence(model, low, tol)?, top);
    let kb = kernel_dims(&spectral::verify_kernel_coincidence(model, high, tol)?, top);
    for k in 0..=top {
        report.checks.push(
            Check::count("stability.kernel_dim", "dim Ker Δ_dR^k independent of the cutoff", ka[k], kb[k])
                .with_degree(k)
                .with_detail(detail.clone()),
        );
    }
    let ra = torsion::reeb_decomposition(model, low, &cfg.s_grid, tol)?;
    let rb = torsion::reeb_decomposition(model, high, &cfg.s_grid, tol)?;
    report.checks.push(
        Check::count("stability.outcome", "suite outcome independent of the cutoff", usize::from(ra.passed), usize::from(rb.passed))
            .with_detail(format!("reeb; {detail}")),
    );
    let cut = lambda_cut(model, low)?;
    for k in 0..=model.frame().n() {
        let (la, pa) = ra.multisets_below(k, cut);
        let (lb, pb) = rb.multisets_below(k, cut);
        report.checks.push(
            Check::new("stability.rumin_multiset", "spec⁺Δ_RN^k below Λ_cut independent of the cutoff", multiset_distance(&la, &lb, 0.0), tol.eigen_rel)
                .with_degree(k)
                .with_detail(format!("{detail}; Λ_cut = {cut}; {} eigenvalues", la.len())),
        );
        report.checks.push(
            Check::new("stability.reeb_multiset", "−L_T² piece spectra below Λ_cut independent of the cutoff", multiset_distance(&pa, &pb, 0.0), tol.eigen_rel)
                .with_degree(k)
                .with_detail(format!("{detail}; Λ_cut = {cut}; {} eigenvalues", pa.len())),
        );
    }
    Ok(report)
}
