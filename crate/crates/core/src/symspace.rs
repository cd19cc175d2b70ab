//! The (m+1)-dimensional symmetric (Dicke) subspace of m qubits: rotated
//! Dicke bases, projectors, the closed-form single-qubit partial trace, and a
//! brute-force full-tensor oracle used to validate the closed forms.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bloch::{amplitudes, orthogonal, AmplitudePair, Qubit};
use crate::{QcmError, Result};

/// Largest m for which the 2^m full tensor oracle may be built.
pub const MAX_TENSOR_QUBITS: usize = 12;

/// A state in the symmetric subspace of `m` qubits. Index k counts qubits in
/// the second basis state of whatever rotated basis the vector refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct SymVector {
    m: usize,
    amps: DVector<Complex64>,
}

impl SymVector {
    pub fn new(m: usize, amps: DVector<Complex64>) -> Result<Self> {
        if amps.len() != m + 1 {
            return Err(QcmError::ShapeMismatch {
                expected: m + 1,
                got: amps.len(),
            });
        }
        Ok(Self { m, amps })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn amps(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &SymVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }
}

/// A Hermitian matrix (density matrices, the optimality matrix A).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Wraps `entries`, rejecting matrices with Hermiticity defect above 1e-12.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let defect = hermiticity_defect(&entries);
        if defect > 1e-12 {
            return Err(QcmError::NotHermitian { defect });
        }
        Ok(Self {
            dim: entries.nrows(),
            entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.entries.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    /// ⟨v|A|v⟩ (real part; the imaginary part vanishes for Hermitian A).
    pub fn expectation(&self, v: &DVector<Complex64>) -> f64 {
        v.dotc(&(&self.entries * v)).re
    }
}

pub fn hermiticity_defect(entries: &DMatrix<Complex64>) -> f64 {
    let mut defect: f64 = 0.0;
    for i in 0..entries.nrows() {
        for j in 0..entries.ncols() {
            defect = defect.max((entries[(i, j)] - entries[(j, i)].conj()).norm());
        }
    }
    defect
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Expansion of the symmetrized state with `m - j` qubits in `state` and `j`
/// in `orth` over the computational Dicke basis.
///
/// The coefficients are those of the spin-(m/2) representation of the basis
/// change `(|↑⟩,|↓⟩) → (state, orth)`, obtained from the generating
/// polynomial `(a + b x)^{m-j} (u + v x)^j`: the Dicke amplitude at index k is
/// the x^k coefficient times √(C(m,j)/C(m,k)).
pub fn dicke_from_pair(
    state: &AmplitudePair,
    orth: &AmplitudePair,
    m: usize,
    j: usize,
) -> Result<SymVector> {
    if j > m {
        return Err(QcmError::LabelOutOfRange { j, m });
    }
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for factor in 0..m {
        let (lo, hi) = if factor < m - j {
            (state.up, state.down)
        } else {
            (orth.up, orth.down)
        };
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (k, &c) in poly.iter().enumerate() {
            next[k] += c * lo;
            next[k + 1] += c * hi;
        }
        poly = next;
    }
    let cj = binomial_f64(m, j);
    let amps = DVector::from_iterator(
        m + 1,
        poly.iter()
            .enumerate()
            .map(|(k, &c)| c * (cj / binomial_f64(m, k)).sqrt()),
    );
    SymVector::new(m, amps)
}

/// `|（m-j)ψ, jψ⊥⟩` in the computational Dicke basis.
pub fn dicke_in_computational(psi: &Qubit, m: usize, j: usize) -> Result<SymVector> {
    dicke_from_pair(&amplitudes(psi), &orthogonal(psi), m, j)
}

/// Full 2^m tensor of the symmetrized state with `j` qubits in `orth`,
/// built by explicit summation over all C(m, j) placements. Qubit 0 is the
/// most significant bit of the basis index.
pub fn full_tensor_from_pair(
    state: &AmplitudePair,
    orth: &AmplitudePair,
    m: usize,
    j: usize,
) -> Result<DVector<Complex64>> {
    if m > MAX_TENSOR_QUBITS {
        return Err(QcmError::TensorTooLarge {
            m,
            max: MAX_TENSOR_QUBITS,
        });
    }
    if j > m {
        return Err(QcmError::LabelOutOfRange { j, m });
    }
    let dim = 1usize << m;
    let mut total = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    let mut placement = vec![false; m];
    placement[m - j..].fill(true);
    // iterate over all distinct permutations of the placement mask
    loop {
        let mut prod = vec![Complex64::new(1.0, 0.0)];
        for &is_orth in &placement {
            let pair = if is_orth { orth } else { state };
            let mut next = Vec::with_capacity(prod.len() * 2);
            for &c in &prod {
                next.push(c * pair.up);
                next.push(c * pair.down);
            }
            prod = next;
        }
        for (s, &c) in prod.iter().enumerate() {
            total[s] += c;
        }
        if !next_permutation(&mut placement) {
            break;
        }
    }
    let norm = total.norm();
    Ok(total / Complex64::new(norm, 0.0))
}

/// Brute-force oracle for [`dicke_in_computational`].
pub fn full_tensor_oracle(psi: &Qubit, m: usize, j: usize) -> Result<DVector<Complex64>> {
    full_tensor_from_pair(&amplitudes(psi), &orthogonal(psi), m, j)
}

fn next_permutation(mask: &mut [bool]) -> bool {
    // lexicographic next permutation over booleans (false < true)
    let n = mask.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && mask[i - 1] >= mask[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut k = n - 1;
    while mask[k] <= mask[i - 1] {
        k -= 1;
    }
    mask.swap(i - 1, k);
    mask[i..].reverse();
    true
}

/// Embed a Dicke-basis vector into the full 2^m tensor representation.
pub fn embed_full(v: &SymVector) -> Result<DVector<Complex64>> {
    let m = v.m;
    if m > MAX_TENSOR_QUBITS {
        return Err(QcmError::TensorTooLarge {
            m,
            max: MAX_TENSOR_QUBITS,
        });
    }
    let dim = 1usize << m;
    let mut out = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    for s in 0..dim {
        let k = (s as u32).count_ones() as usize;
        out[s] = v.amps[k] / binomial_f64(m, k).sqrt();
    }
    Ok(out)
}

/// Single-qubit reduced density matrix of a symmetric m-qubit state given in
/// the Dicke basis, via the closed-form partial trace:
/// the ↑↑ entry collects ρ_{kk}(m-k)/m and the ↑↓ entry collects
/// ρ_{k,k+1}·√((m-k)(k+1))/m (coefficients frozen against the tensor oracle).
pub fn reduce_one_qubit(rho: &HermitianMatrix, m: usize) -> Result<HermitianMatrix> {
    if rho.dim != m + 1 {
        return Err(QcmError::ShapeMismatch {
            expected: m + 1,
            got: rho.dim,
        });
    }
    let mf = m as f64;
    let mut upup = Complex64::new(0.0, 0.0);
    let mut updown = Complex64::new(0.0, 0.0);
    for k in 0..=m {
        upup += rho.entries[(k, k)] * ((m - k) as f64 / mf);
        if k < m {
            let coeff = (((m - k) * (k + 1)) as f64).sqrt() / mf;
            updown += rho.entries[(k, k + 1)] * coeff;
        }
    }
    let downdown = rho.trace() - upup;
    let entries = DMatrix::from_row_slice(2, 2, &[upup, updown, updown.conj(), downdown]);
    HermitianMatrix::new(entries)
}

/// Partial trace down to the first qubit, computed in the full 2^m tensor
/// representation. Independent oracle for [`reduce_one_qubit`].
pub fn reduce_one_qubit_oracle(rho: &HermitianMatrix, m: usize) -> Result<HermitianMatrix> {
    if rho.dim != m + 1 {
        return Err(QcmError::ShapeMismatch {
            expected: m + 1,
            got: rho.dim,
        });
    }
    if m > MAX_TENSOR_QUBITS {
        return Err(QcmError::TensorTooLarge {
            m,
            max: MAX_TENSOR_QUBITS,
        });
    }
    // embed each Dicke basis ket and accumulate rho in the full representation
    let kets: Vec<DVector<Complex64>> = (0..=m)
        .map(|k| {
            let mut amps = DVector::from_element(m + 1, Complex64::new(0.0, 0.0));
            amps[k] = Complex64::new(1.0, 0.0);
            embed_full(&SymVector::new(m, amps).unwrap()).unwrap()
        })
        .collect();
    let half = 1usize << (m - 1);
    let mut out = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
    for k in 0..=m {
        for kp in 0..=m {
            let w = rho.entries[(k, kp)];
            if w.norm() == 0.0 {
                continue;
            }
            // Tr_{2..m} |ket_k><ket_kp|, first qubit = most significant bit
            for a in 0..2usize {
                for b in 0..2usize {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for rest in 0..half {
                        acc += kets[k][a * half + rest] * kets[kp][b * half + rest].conj();
                    }
                    out[(a, b)] += w * acc;
                }
            }
        }
    }
    HermitianMatrix::new(out)
}

/// Rank-1 projector |v⟩⟨v|.
pub fn projector(v: &SymVector) -> HermitianMatrix {
    let n = v.amps.len();
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = v.amps[i] * v.amps[j].conj();
        }
    }
    HermitianMatrix {
        dim: n,
        entries,
    }
}
