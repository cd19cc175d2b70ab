//! The optimal universal N→M cloning machine: amplitude coefficients, the
//! covariant joint state of clones and ancilla, clone density matrices, the
//! analytic fidelity formulas, and isometry checks on the cloning map.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive};

use crate::bloch::{amplitudes, orthogonal, sample_uniform, Qubit};
use crate::symspace::{
    dicke_from_pair, dicke_in_computational, embed_full, full_tensor_from_pair, projector,
    reduce_one_qubit, HermitianMatrix, SymVector,
};
use crate::{QcmError, Result};

/// The amplitude vector α_j of the N→M cloner, j = 0..m-n errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneCoefficients {
    n: usize,
    m: usize,
    alpha: Vec<f64>,
}

impl CloneCoefficients {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }
}

fn check_counts(n: usize, m: usize) -> Result<()> {
    if n < 1 || n >= m {
        return Err(QcmError::BadCloneCounts { n, m });
    }
    Ok(())
}

/// Exact squared amplitudes α_j² as rationals:
/// α_j² = (n+1)/(m+1) · Π_{t<j} (m-n-t)/(m-t),
/// the telescoped form of the factorial-ratio expression.
pub fn alpha_sq_exact(n: usize, m: usize) -> Result<Vec<BigRational>> {
    check_counts(n, m)?;
    let ratio = |p: usize, q: usize| {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    };
    let mut out = Vec::with_capacity(m - n + 1);
    let mut acc = ratio(n + 1, m + 1);
    for j in 0..=(m - n) {
        out.push(acc.clone());
        if j < m - n {
            acc = acc * ratio(m - n - j, m - j);
        }
    }
    Ok(out)
}

/// The α_j of the N→M cloning unitary, as floats.
pub fn alpha(n: usize, m: usize) -> Result<CloneCoefficients> {
    let alpha = alpha_sq_exact(n, m)?
        .iter()
        .map(|r| r.to_f64().expect("finite rational").sqrt())
        .collect();
    Ok(CloneCoefficients { n, m, alpha })
}

/// Exact per-copy fidelity F_{N,M} = (M(N+1)+N)/(M(N+2)); F = 1 at n = m
/// (identity channel, accepted for sweep convenience).
pub fn fidelity_formula(n: usize, m: usize) -> Result<Ratio<i64>> {
    if n < 1 || n > m {
        return Err(QcmError::BadCloneCounts { n, m });
    }
    if n == m {
        return Ok(Ratio::one());
    }
    let (n, m) = (n as i64, m as i64);
    Ok(Ratio::new(m * (n + 1) + n, m * (n + 2)))
}

/// The large-M measurement limit (n+1)/(n+2).
pub fn fidelity_limit(n: usize) -> Ratio<i64> {
    Ratio::new(n as i64 + 1, n as i64 + 2)
}

/// The pure output state of the cloner: for each ancilla label j the M
/// clones sit in |(M-j)ψ, jψ⊥⟩ while the ancilla carries
/// |(M-N-j)ψ*, j(ψ*)⊥⟩, weighted by α_j.
#[derive(Debug, Clone)]
pub struct JointState {
    n: usize,
    m: usize,
    coefficients: CloneCoefficients,
    clone_blocks: Vec<SymVector>,
    ancilla_blocks: Vec<SymVector>,
}

impl JointState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coefficients(&self) -> &CloneCoefficients {
        &self.coefficients
    }

    pub fn clone_blocks(&self) -> &[SymVector] {
        &self.clone_blocks
    }

    pub fn ancilla_blocks(&self) -> &[SymVector] {
        &self.ancilla_blocks
    }

    /// ⟨self|other⟩ over clones ⊗ ancilla.
    pub fn overlap(&self, other: &JointState) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, (cj, aj)) in self
            .clone_blocks
            .iter()
            .zip(&self.ancilla_blocks)
            .enumerate()
        {
            for (k, (ck, ak)) in other
                .clone_blocks
                .iter()
                .zip(&other.ancilla_blocks)
                .enumerate()
            {
                let w = self.coefficients.alpha[j] * other.coefficients.alpha[k];
                acc += w * cj.inner(ck) * aj.inner(ak);
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.overlap(self).re.sqrt()
    }

    /// Clone density matrix via an honest blockwise partial trace over the
    /// ancilla, using the actual ancilla inner products rather than assuming
    /// their orthogonality. Oracle for [`clone_density`].
    pub fn density_via_partial_trace(&self) -> Result<HermitianMatrix> {
        let dim = self.m + 1;
        let mut rho = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for (j, (cj, aj)) in self
            .clone_blocks
            .iter()
            .zip(&self.ancilla_blocks)
            .enumerate()
        {
            for (k, (ck, ak)) in self
                .clone_blocks
                .iter()
                .zip(&self.ancilla_blocks)
                .enumerate()
            {
                let w = self.coefficients.alpha[j] * self.coefficients.alpha[k] * ak.inner(aj);
                for r in 0..dim {
                    for c in 0..dim {
                        rho[(r, c)] += w * cj.amps()[r] * ck.amps()[c].conj();
                    }
                }
            }
        }
        HermitianMatrix::new(rho)
    }
}

/// Apply the N→M cloner to |Nψ⟩.
pub fn clone_state(psi: &Qubit, n: usize, m: usize) -> Result<JointState> {
    let coefficients = alpha(n, m)?;
    let a = amplitudes(psi);
    let o = orthogonal(psi);
    let (ac, oc) = (a.conj(), o.conj());
    let mut clone_blocks = Vec::with_capacity(m - n + 1);
    let mut ancilla_blocks = Vec::with_capacity(m - n + 1);
    for j in 0..=(m - n) {
        clone_blocks.push(dicke_from_pair(&a, &o, m, j)?);
        ancilla_blocks.push(dicke_from_pair(&ac, &oc, m - n, j)?);
    }
    Ok(JointState {
        n,
        m,
        coefficients,
        clone_blocks,
        ancilla_blocks,
    })
}

/// Density matrix of the M clones in the computational Dicke basis,
/// ρ = Σ_j α_j² P_{|(M-j)ψ, jψ⊥⟩}.
pub fn clone_density(psi: &Qubit, n: usize, m: usize) -> Result<HermitianMatrix> {
    let coefficients = alpha(n, m)?;
    let dim = m + 1;
    let mut rho = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (j, &aj) in coefficients.alpha.iter().enumerate() {
        let p = projector(&dicke_in_computational(psi, m, j)?);
        rho += p.entries() * Complex64::new(aj * aj, 0.0);
    }
    HermitianMatrix::new(rho)
}

/// Reduced density matrix of a single clone (computational basis).
pub fn single_clone_density(psi: &Qubit, n: usize, m: usize) -> Result<HermitianMatrix> {
    reduce_one_qubit(&clone_density(psi, n, m)?, m)
}

/// Probabilities α_j² of j errors among the M copies.
pub fn error_distribution(n: usize, m: usize) -> Result<Vec<f64>> {
    Ok(alpha_sq_exact(n, m)?
        .iter()
        .map(|r| r.to_f64().expect("finite rational"))
        .collect())
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Sphere average of ⟨ψ|ρ_out|ψ⟩ over Haar-random inputs.
pub fn average_fidelity_mc(n: usize, m: usize, trials: u64, seed: u64) -> Result<McEstimate> {
    check_counts(n, m)?;
    if trials == 0 {
        return Err(QcmError::Domain("trials must be >= 1".into()));
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, psi) in sample_uniform(seed, trials as usize).iter().enumerate() {
        let rho = single_clone_density(psi, n, m)?;
        let a = amplitudes(psi);
        let v = DVector::from_vec(vec![a.up, a.down]);
        let f = rho.expectation(&v);
        let count = (i + 1) as f64;
        let delta = f - mean;
        mean += delta / count;
        m2 += delta * (f - mean);
    }
    let tf = trials as f64;
    let stderr = if trials > 1 {
        (m2 / (tf - 1.0) / tf).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(McEstimate {
        mean,
        stderr,
        trials,
    })
}

/// Isometry diagnostics for the cloning map.
#[derive(Debug, Clone)]
pub struct UnitarityReport {
    pub n: usize,
    pub m: usize,
    /// max | ||image|| - 1 | over the computational images (n = 1 only).
    pub norm_defect: f64,
    /// max |⟨image(↑)|image(↓)⟩| (n = 1 only).
    pub orthogonality_defect: f64,
    /// max |G_out - G_in| over random symmetric inputs.
    pub gram_defect: f64,
}

/// Checks that U_{1,M} maps ↑ and ↓ to orthonormal states of clones ⊗
/// ancilla, and that U_{N,M} preserves the Gram matrix ⟨ψ_a|ψ_b⟩^N on
/// random symmetric inputs.
pub fn unitarity_check(m: usize) -> Result<UnitarityReport> {
    unitarity_check_general(1, m, 20, 12345)
}

pub fn unitarity_check_general(
    n: usize,
    m: usize,
    states: usize,
    seed: u64,
) -> Result<UnitarityReport> {
    check_counts(n, m)?;
    let (mut norm_defect, mut orth_defect) = (0.0f64, 0.0f64);
    if n == 1 {
        // Images of the computational basis as (clone Dicke label, ancilla
        // label) coefficient matrices: up -> sum_j alpha_j |D_j> (x) R_j,
        // down -> sum_j alpha_{m-1-j} |D_{j+1}> (x) R_j.
        let a = alpha(1, m)?;
        let mut img_up = DMatrix::from_element(m + 1, m, Complex64::new(0.0, 0.0));
        let mut img_dn = img_up.clone();
        for j in 0..m {
            img_up[(j, j)] = Complex64::new(a.alpha[j], 0.0);
            img_dn[(j + 1, j)] = Complex64::new(a.alpha[m - 1 - j], 0.0);
        }
        norm_defect = (img_up.norm() - 1.0).abs().max((img_dn.norm() - 1.0).abs());
        orth_defect = img_up.dotc(&img_dn).norm();
    }
    let gram_defect = gram_preservation(n, m, states, seed)?;
    Ok(UnitarityReport {
        n,
        m,
        norm_defect,
        orthogonality_defect: orth_defect,
        gram_defect,
    })
}

/// max entrywise |⟨U Nψ_a|U Nψ_b⟩ - ⟨ψ_a|ψ_b⟩^n| over random input pairs.
pub fn gram_preservation(n: usize, m: usize, states: usize, seed: u64) -> Result<f64> {
    check_counts(n, m)?;
    let psis = sample_uniform(seed, states);
    let images: Vec<JointState> = psis
        .iter()
        .map(|p| clone_state(p, n, m))
        .collect::<Result<_>>()?;
    let mut defect = 0.0f64;
    for (ia, pa) in psis.iter().enumerate() {
        for (ib, pb) in psis.iter().enumerate() {
            let g_in = amplitudes(pa).inner(&amplitudes(pb)).powu(n as u32);
            let g_out = images[ia].overlap(&images[ib]);
            defect = defect.max((g_out - g_in).norm());
        }
    }
    Ok(defect)
}

/// Image of |ψ⟩ under U_{1,M} computed by linearity from the computational
/// branch definitions, in the full 2^m ⊗ m tensor representation
/// (clone index major, ancilla label minor).
pub fn u1m_image_by_linearity(psi: &Qubit, m: usize) -> Result<DVector<Complex64>> {
    check_counts(1, m)?;
    let a = alpha(1, m)?;
    let dicke_full = |k: usize| -> Result<DVector<Complex64>> {
        let mut amps = DVector::from_element(m + 1, Complex64::new(0.0, 0.0));
        amps[k] = Complex64::new(1.0, 0.0);
        embed_full(&SymVector::new(m, amps)?)
    };
    let clones_dim = 1usize << m;
    let mut out = DVector::from_element(clones_dim * m, Complex64::new(0.0, 0.0));
    let input = amplitudes(psi);
    for j in 0..m {
        let up_block = dicke_full(j)?;
        let dn_block = dicke_full(j + 1)?;
        for s in 0..clones_dim {
            out[s * m + j] += input.up * a.alpha[j] * up_block[s]
                + input.down * a.alpha[m - 1 - j] * dn_block[s];
        }
    }
    Ok(out)
}

/// The covariant closed form of the same image: clones in the rotated Dicke
/// states, ancilla in conjugate rotated Dicke states expanded over the
/// computational R_j labels. Same tensor layout as
/// [`u1m_image_by_linearity`]; the two must agree to numerical precision.
pub fn u1m_image_covariant(psi: &Qubit, m: usize) -> Result<DVector<Complex64>> {
    check_counts(1, m)?;
    let a = alpha(1, m)?;
    let amp = amplitudes(psi);
    let orth = orthogonal(psi);
    let (ac, oc) = (amp.conj(), orth.conj());
    let clones_dim = 1usize << m;
    let mut out = DVector::from_element(clones_dim * m, Complex64::new(0.0, 0.0));
    for j in 0..m {
        let clones = full_tensor_from_pair(&amp, &orth, m, j)?;
        let ancilla = dicke_from_pair(&ac, &oc, m - 1, j)?;
        for s in 0..clones_dim {
            for l in 0..m {
                out[s * m + l] += a.alpha[j] * clones[s] * ancilla.amps()[l];
            }
        }
    }
    Ok(out)
}
