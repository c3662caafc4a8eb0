//! Scan drivers: particle-loss robustness of the quantum purity measure
//! and the analytic rank-2 spin-2 curves.

use crate::catalogue;
use crate::error::{Error, Result};
use crate::exact::rat;
use crate::half::SpinQuantumNumber;
use crate::io::StateFile;
use crate::measures::MeasureKind;
use crate::reduce::reduce;
use crate::roof::{quantum_fidelity, quantum_purity, Certification, RoofOptions};
use crate::spin::SpinState;
use serde::Serialize;

/// Input family for the particle-loss scan.
#[derive(Clone, Debug)]
pub enum LossFamily {
    Ghz,
    W,
    UserFile(StateFile),
}

impl LossFamily {
    pub fn name(&self) -> &'static str {
        match self {
            LossFamily::Ghz => "ghz",
            LossFamily::W => "w",
            LossFamily::UserFile(_) => "file",
        }
    }
}

/// One record of the loss scan: the quantum purity-based measure of the
/// q-qubit marginal, seen as a spin-q/2 state.
#[derive(Clone, Debug, Serialize)]
pub struct LossScanRecord {
    pub family: String,
    pub n: u32,
    pub q: u32,
    pub t: u32,
    pub value: f64,
    pub certification: String,
}

fn family_state(family: &LossFamily, n: u32) -> Result<SpinState<f64>> {
    let j = SpinQuantumNumber::from_two_j(n);
    match family {
        LossFamily::Ghz => Ok(catalogue::ghz(j)?.to_state()),
        LossFamily::W => Ok(catalogue::w_state(j)?.to_state()),
        LossFamily::UserFile(file) => {
            let state = file.to_state(1e-8)?;
            if state.j().two_j() != n {
                return Err(Error::Dimension(format!(
                    "state file has 2j = {}, expected {n}",
                    state.j().two_j()
                )));
            }
            Ok(state)
        }
    }
}

/// Quantum purity-based anticoherence of every q-qubit marginal,
/// q = t..=N for each N in the range. Rows with t > q are skipped.
pub fn loss_scan(
    family: &LossFamily,
    n_range: impl Iterator<Item = u32>,
    t: u32,
    opts: &RoofOptions,
) -> Result<Vec<LossScanRecord>> {
    let mut records = Vec::new();
    for n in n_range {
        if n < 1 {
            continue;
        }
        let state = family_state(family, n)?;
        for q in 1..=n {
            if t > q {
                continue;
            }
            let marginal = if q == n {
                state.clone()
            } else {
                reduce(&state, q)?.into_state()
            };
            let roof = quantum_purity(&marginal, t, opts)?;
            records.push(LossScanRecord {
                family: family.name().into(),
                n,
                q,
                t,
                value: crate::to_f64(roof.value),
                certification: roof.certified.as_str().into(),
            });
        }
    }
    Ok(records)
}

/// Analytic values for the rank-2 spin-2 mixture: (total, quantum,
/// classical) as functions of the mixing weight.
pub fn rank2_mixture_analytic(lambda: f64, t: u32, kind: MeasureKind) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain("mixing weight must lie in [0, 1]".into()));
    }
    let l = lambda;
    match (kind, t) {
        (MeasureKind::PurityP, 1) => Ok((1.0, 1.0, 0.0)),
        (MeasureKind::PurityP, 2) => {
            let q = l * l - l + 1.0;
            Ok((1.0, q, l * (1.0 - l)))
        }
        (MeasureKind::PurityP, 3) => {
            let total = 2.0 / 3.0 * (-2.0 * l * l + 2.0 * l + 1.0);
            Ok((total, 2.0 / 3.0, total - 2.0 / 3.0))
        }
        (MeasureKind::Fidelity, 1) => Ok((1.0, 1.0, 0.0)),
        (MeasureKind::Fidelity, 2) => {
            let q = 0.5 + (l - 0.5).abs();
            Ok((1.0, q, 1.0 - q))
        }
        (MeasureKind::Fidelity, 3) => {
            let total = (1.0 + 4.0 * (l * (1.0 - l)).sqrt()) / 3.0;
            Ok((total, 1.0 / 3.0, total - 1.0 / 3.0))
        }
        _ => Err(Error::Unsupported(format!(
            "no closed form for kind {kind:?} at t = {t}"
        ))),
    }
}

/// One row of the analytic-vs-numeric comparison grid.
#[derive(Clone, Debug, Serialize)]
pub struct CurveRecord {
    pub lambda: f64,
    pub t: u32,
    pub kind: String,
    pub total_analytic: f64,
    pub total_numeric: f64,
    pub quantum_analytic: f64,
    pub quantum_numeric: f64,
    pub classical_analytic: f64,
    pub classical_numeric: f64,
    pub certification: String,
}

impl CurveRecord {
    pub fn max_deviation(&self) -> f64 {
        (self.total_analytic - self.total_numeric)
            .abs()
            .max((self.quantum_analytic - self.quantum_numeric).abs())
            .max((self.classical_analytic - self.classical_numeric).abs())
    }
}

/// Recompute the rank-2 spin-2 curves numerically next to the closed
/// forms, for t = 1, 2, 3 and both the purity and fidelity kinds.
pub fn rank2_mixture_curves(lambda_grid: &[f64], opts: &RoofOptions) -> Result<Vec<CurveRecord>> {
    let mut rows = Vec::new();
    for &lambda in lambda_grid {
        // Exact rational λ on a grid of machine floats: use a close rational.
        let lam_rat = rat((lambda * 1_000_000.0).round() as i64, 1_000_000);
        let entry = catalogue::j2_rank2(lam_rat)?;
        let rho: SpinState<f64> = entry.to_state();
        for t in 1..=3u32 {
            for kind in [MeasureKind::PurityP, MeasureKind::Fidelity] {
                let (ta, qa, ca) = rank2_mixture_analytic(lambda, t, kind)?;
                let total_numeric = crate::measures::total_measure(&rho, t, kind)?;
                let roof = match kind {
                    MeasureKind::PurityP => quantum_purity(&rho, t, opts)?,
                    MeasureKind::Fidelity => quantum_fidelity(&rho, t, opts)?,
                    _ => unreachable!(),
                };
                let quantum_numeric = crate::to_f64(roof.value);
                rows.push(CurveRecord {
                    lambda,
                    t,
                    kind: kind.name(),
                    total_analytic: ta,
                    total_numeric,
                    quantum_analytic: qa,
                    quantum_numeric,
                    classical_analytic: ca,
                    classical_numeric: total_numeric - quantum_numeric,
                    certification: match roof.certified {
                        Certification::Analytic => "analytic".into(),
                        Certification::Heuristic => "heuristic".into(),
                    },
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ghz_quantum_anticoherence_collapses_under_loss() {
        let opts = RoofOptions { restarts: 16, ..Default::default() };
        let records = loss_scan(&LossFamily::Ghz, [4u32].into_iter(), 1, &opts).unwrap();
        for r in &records {
            if r.q == r.n {
                assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-7);
            } else {
                assert!(r.value < 1e-5, "GHZ marginal q={} has quantum value {}", r.q, r.value);
            }
        }
    }

    #[test]
    fn w_marginal_value_matches_direct_reduction() {
        // For the N = 4 single-excitation Dicke state the q = N row is the
        // pure-state purity measure itself: the one-qubit marginal is
        // diag(3/4, 1/4), so A₁ = 2(1 - 10/16) = 3/4.
        let opts = RoofOptions { restarts: 8, ..Default::default() };
        let records = loss_scan(&LossFamily::W, [4u32].into_iter(), 1, &opts).unwrap();
        let full = records.iter().find(|r| r.q == 4).unwrap();
        assert_abs_diff_eq!(full.value, 0.75, epsilon = 1e-7);
    }

    #[test]
    fn loss_monotone_in_q() {
        let opts = RoofOptions { restarts: 12, ..Default::default() };
        let records = loss_scan(&LossFamily::W, [5u32].into_iter(), 1, &opts).unwrap();
        let mut by_q: Vec<(u32, f64)> = records.iter().map(|r| (r.q, r.value)).collect();
        by_q.sort_by(|a, b| a.0.cmp(&b.0));
        for w in by_q.windows(2) {
            assert!(
                w[0].1 <= w[1].1 + 1e-5,
                "quantum measure increased under loss: {:?}",
                by_q
            );
        }
    }

    #[test]
    fn analytic_curve_shapes() {
        // Symmetry about λ = 1/2 for the quantum purity curve at t = 2.
        let (_, q_left, _) = rank2_mixture_analytic(0.3, 2, MeasureKind::PurityP).unwrap();
        let (_, q_right, _) = rank2_mixture_analytic(0.7, 2, MeasureKind::PurityP).unwrap();
        assert_abs_diff_eq!(q_left, q_right, epsilon = 1e-15);
        // Kink of the fidelity quantum curve at λ = 1/2.
        let (_, q_mid, _) = rank2_mixture_analytic(0.5, 2, MeasureKind::Fidelity).unwrap();
        assert_abs_diff_eq!(q_mid, 0.5, epsilon = 1e-15);
        let (_, q_edge, _) = rank2_mixture_analytic(1.0, 2, MeasureKind::Fidelity).unwrap();
        assert_abs_diff_eq!(q_edge, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn curves_match_analytic_at_a_few_points() {
        let opts = RoofOptions { restarts: 24, ..Default::default() };
        let rows = rank2_mixture_curves(&[0.0, 0.5, 0.8], &opts).unwrap();
        for row in rows {
            assert!(
                row.max_deviation() < 2e-5,
                "λ={} t={} {}: deviation {}",
                row.lambda,
                row.t,
                row.kind,
                row.max_deviation()
            );
        }
    }
}
