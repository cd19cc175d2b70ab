//! The classical measure-and-prepare copying machine for one input qubit:
//! analytic density matrix, Monte Carlo Stern-Gerlach simulation, and the
//! M^-3 convergence of the quantum cloner towards it.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::ToPrimitive;

use crate::bloch::{amplitudes, orthogonal, sample_uniform, Qubit};
use crate::cloner::alpha_sq_exact;
use crate::symspace::{dicke_from_pair, dicke_in_computational, projector, HermitianMatrix};
use crate::{QcmError, Result};

/// Weights w_s = 2(m+1-s)/((m+1)(m+2)) of the measure-and-prepare output in
/// the ψ-Dicke basis, as exact rationals.
pub fn ccm_weights_exact(m: usize) -> Vec<Ratio<i64>> {
    let m = m as i64;
    (0..=m)
        .map(|s| Ratio::new(2 * (m + 1 - s), (m + 1) * (m + 2)))
        .collect()
}

/// ρ_CCM in the computational Dicke basis: the mixture of ψ-Dicke projectors
/// weighted by [`ccm_weights_exact`].
pub fn ccm_density_analytic(psi: &Qubit, m: usize) -> Result<HermitianMatrix> {
    let dim = m + 1;
    let mut rho = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (s, w) in ccm_weights_exact(m).iter().enumerate() {
        let p = projector(&dicke_in_computational(psi, m, s)?);
        rho += p.entries() * Complex64::new(w.to_f64().expect("finite"), 0.0);
    }
    HermitianMatrix::new(rho)
}

/// Monte Carlo ρ_CCM with entrywise standard errors.
pub struct McDensity {
    pub matrix: HermitianMatrix,
    /// stderr of |entry| per matrix element.
    pub stderr: DMatrix<f64>,
    pub trials: u64,
}

/// Empirical average over Haar-random Stern-Gerlach bases φ of the
/// two-outcome prepare-M-copies channel,
/// |⟨ψ|φ⟩|² P_{|Mφ⟩} + |⟨ψ|φ⊥⟩|² P_{|Mφ⊥⟩}.
/// Each trial contributes a trace-1 convex mixture, so the estimate has unit
/// trace at every trial count.
pub fn ccm_density_montecarlo(
    psi: &Qubit,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<McDensity> {
    if trials == 0 {
        return Err(QcmError::Domain("trials must be >= 1".into()));
    }
    let dim = m + 1;
    let a_psi = amplitudes(psi);
    let mut mean = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    let mut m2 = DMatrix::from_element(dim, dim, 0.0f64);
    for (i, phi) in sample_uniform(seed, trials as usize).iter().enumerate() {
        let a = amplitudes(phi);
        let o = orthogonal(phi);
        let p_up = a_psi.inner(&a).norm_sqr();
        let p_dn = a_psi.inner(&o).norm_sqr();
        // |M phi> and |M phi_perp> Dicke expansions (j = 0 and j = m)
        let v_up = dicke_from_pair(&a, &o, m, 0)?;
        let v_dn = dicke_from_pair(&a, &o, m, m)?;
        let count = (i + 1) as f64;
        for r in 0..dim {
            for c in 0..dim {
                let sample = Complex64::new(p_up, 0.0) * v_up.amps()[r] * v_up.amps()[c].conj()
                    + Complex64::new(p_dn, 0.0) * v_dn.amps()[r] * v_dn.amps()[c].conj();
                let delta = sample - mean[(r, c)];
                mean[(r, c)] += delta / count;
                m2[(r, c)] += (delta.conj() * (sample - mean[(r, c)])).re;
            }
        }
    }
    let tf = trials as f64;
    let stderr = m2.map(|v| {
        if trials > 1 {
            (v / (tf - 1.0) / tf).sqrt()
        } else {
            f64::INFINITY
        }
    });
    // numerically symmetrize round-off before the Hermitian check
    let sym = (&mean + mean.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(McDensity {
        matrix: HermitianMatrix::new(sym)?,
        stderr,
        trials,
    })
}

/// Hilbert-Schmidt distance Tr[(ρ_QCM - ρ_CCM)²] for N = 1, as an exact
/// rational. Both matrices are diagonal in the ψ-Dicke basis, so the distance
/// is Σ_j (α_j² - w_j)² and independent of ψ.
pub fn qcm_ccm_distance_exact(m: usize) -> Result<BigRational> {
    if m < 2 {
        return Err(QcmError::BadCloneCounts { n: 1, m });
    }
    let mut qcm: Vec<BigRational> = alpha_sq_exact(1, m)?;
    qcm.push(BigRational::new(BigInt::from(0), BigInt::from(1))); // j = m never occurs for n = 1
    let ccm = ccm_weights_exact(m);
    let mut acc = BigRational::new(BigInt::from(0), BigInt::from(1));
    for (q, w) in qcm.iter().zip(&ccm) {
        let wb = BigRational::new(BigInt::from(*w.numer()), BigInt::from(*w.denom()));
        let d = q - wb;
        acc += &d * &d;
    }
    Ok(acc)
}

pub fn qcm_ccm_distance(m: usize) -> Result<f64> {
    Ok(qcm_ccm_distance_exact(m)?.to_f64().expect("finite"))
}

/// Trace-norm distance (1/2)Σ_j |α_j² - w_j| (diagonal in the shared basis).
pub fn qcm_ccm_trace_distance(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(QcmError::BadCloneCounts { n: 1, m });
    }
    let mut qcm: Vec<f64> = alpha_sq_exact(1, m)?
        .iter()
        .map(|r| r.to_f64().expect("finite"))
        .collect();
    qcm.push(0.0);
    let acc: f64 = qcm
        .iter()
        .zip(ccm_weights_exact(m))
        .map(|(q, w)| (q - w.to_f64().expect("finite")).abs())
        .sum();
    Ok(acc / 2.0)
}

/// Log-log least-squares fit of a distance-vs-m power law.
#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub m_values: Vec<usize>,
    pub distances: Vec<f64>,
    pub fitted_slope: f64,
    pub fit_residual: f64,
}

/// Ordinary least squares of ln(distance) against ln(m).
pub fn fit_scaling(m_values: &[usize], distances: &[f64]) -> Result<ScalingReport> {
    if m_values.len() != distances.len() || m_values.len() < 3 {
        return Err(QcmError::Domain(
            "scaling fit needs at least 3 (m, distance) points".into(),
        ));
    }
    if !m_values.windows(2).all(|w| w[0] < w[1]) {
        return Err(QcmError::Domain("m values must be strictly increasing".into()));
    }
    if distances.iter().any(|&d| !(d > 0.0)) {
        return Err(QcmError::Domain("distances must be positive".into()));
    }
    let xs: Vec<f64> = m_values.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = distances.iter().map(|&d| d.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residual: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        .sqrt();
    Ok(ScalingReport {
        m_values: m_values.to_vec(),
        distances: distances.to_vec(),
        fitted_slope: slope,
        fit_residual: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symspace::reduce_one_qubit;
    use nalgebra::DVector;
    use num_traits::One;

    #[test]
    fn weights_examples_and_normalization() {
        assert_eq!(
            ccm_weights_exact(2),
            vec![Ratio::new(1, 2), Ratio::new(1, 3), Ratio::new(1, 6)]
        );
        for m in 1..=100 {
            let sum: Ratio<i64> = ccm_weights_exact(m).iter().sum();
            assert!(sum.is_one(), "m={m}");
        }
    }

    #[test]
    fn analytic_density_fidelity_is_two_thirds() {
        for (i, psi) in sample_uniform(4, 6).iter().enumerate() {
            let m = 1 + i * 3; // 1, 4, 7, 10, 13, 16
            let rho = ccm_density_analytic(psi, m).unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            let one = reduce_one_qubit(&rho, m).unwrap();
            let a = amplitudes(psi);
            let v = DVector::from_vec(vec![a.up, a.down]);
            let f = one.expectation(&v);
            assert!((f - 2.0 / 3.0).abs() < 1e-12, "m={m} f={f}");
        }
    }

    #[test]
    fn mc_density_converges_to_analytic() {
        let psi = Qubit::new(1.1, 0.3).unwrap();

        // m = 1: analytic weights (2/3, 1/3) in the psi basis
        let mc = ccm_density_montecarlo(&psi, 1, 100_000, 5).unwrap();
        let analytic = ccm_density_analytic(&psi, 1).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let dev = (mc.matrix.entries()[(r, c)] - analytic.entries()[(r, c)]).norm();
                assert!(dev < 5.0 * mc.stderr[(r, c)].max(1e-6), "({r},{c}) dev={dev}");
            }
        }

        // trace exactly 1 at any trial count
        for trials in [1u64, 3, 10] {
            let mc = ccm_density_montecarlo(&psi, 3, trials, 8).unwrap();
            assert!((mc.matrix.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mc_estimator_unbiased_over_seeds() {
        let psi = Qubit::new(0.8, 2.0).unwrap();
        let analytic = ccm_density_analytic(&psi, 2).unwrap().entries()[(0, 0)].re;
        let mut devs = 0.0;
        let trials = 20_000u64;
        let seeds = 8;
        let mut pooled_var = 0.0;
        for seed in 0..seeds {
            let mc = ccm_density_montecarlo(&psi, 2, trials, seed).unwrap();
            devs += mc.matrix.entries()[(0, 0)].re - analytic;
            pooled_var += mc.stderr[(0, 0)] * mc.stderr[(0, 0)];
        }
        let mean_dev = devs / seeds as f64;
        let stderr_of_mean = (pooled_var / (seeds * seeds) as f64).sqrt();
        assert!(mean_dev.abs() < 5.0 * stderr_of_mean);
    }

    #[test]
    fn distance_examples() {
        let d2 = qcm_ccm_distance_exact(2).unwrap();
        assert_eq!(d2, BigRational::new(BigInt::from(1), BigInt::from(18)));
        assert!(qcm_ccm_distance_exact(1).is_err());

        // psi-independence: compare full matrices at random psi
        let m = 5;
        let d_ref = qcm_ccm_distance(m).unwrap();
        for psi in sample_uniform(17, 10) {
            let q = crate::cloner::clone_density(&psi, 1, m).unwrap();
            let c = ccm_density_analytic(&psi, m).unwrap();
            let delta = q.entries() - c.entries();
            let d = (&delta * &delta).trace().re;
            assert!((d - d_ref).abs() < 1e-12);
        }
    }

    #[test]
    fn qcm_beats_ccm_at_finite_m() {
        for m in 2..=40 {
            let top_qcm = alpha_sq_exact(1, m).unwrap()[0].to_f64().unwrap();
            let top_ccm = ccm_weights_exact(m)[0].to_f64().unwrap();
            assert!((top_qcm - 2.0 / (m as f64 + 1.0)).abs() < 1e-14);
            assert!((top_ccm - 2.0 / (m as f64 + 2.0)).abs() < 1e-14);
            let f_qcm = crate::cloner::fidelity_formula(1, m).unwrap();
            assert!(f_qcm > Ratio::new(2, 3), "m={m}");
        }
    }

    #[test]
    fn scaling_fit_basics() {
        let ms: Vec<usize> = vec![8, 16, 32, 64, 128];
        let exact: Vec<f64> = ms.iter().map(|&m| (m as f64).powi(-3)).collect();
        let rep = fit_scaling(&ms, &exact).unwrap();
        assert!((rep.fitted_slope + 3.0).abs() < 1e-10);
        assert!(rep.fit_residual < 1e-10);

        let flat = vec![2.0; 5];
        let rep = fit_scaling(&ms, &flat).unwrap();
        assert!(rep.fitted_slope.abs() < 1e-12);

        assert!(fit_scaling(&ms, &[1.0, -1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(fit_scaling(&[1, 2], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn distance_scales_like_m_cubed() {
        let ms: Vec<usize> = vec![8, 16, 32, 64, 128];
        let ds: Vec<f64> = ms.iter().map(|&m| qcm_ccm_distance(m).unwrap()).collect();
        assert!(ds.iter().all(|&d| d > 0.0));
        let rep = fit_scaling(&ms, &ds).unwrap();
        assert!(
            (-3.4..=-2.6).contains(&rep.fitted_slope),
            "slope {}",
            rep.fitted_slope
        );
    }
}
