//! Numerical reproduction of the cloning optimality bound: the
//! sphere-averaged fourth-moment matrix A, its 2x2 block form, the largest
//! eigenvalue (2M+1)/6M, and the general-N extension by direct eigensolve.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::cloner::{alpha, fidelity_formula};
use crate::symspace::{hermiticity_defect, HermitianMatrix};
use crate::{QcmError, Result};

/// Computational spin labels entering the fourth-moment kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn excitation(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

const GL_NODES: usize = 64;
const PHI_NODES: usize = 128;

/// Sphere average of the product of spin-(n/2) coherent components and two
/// single-qubit rotation entries,
/// ∫ dΩ/4π conj(O^(n)_jp) O_ip conj(O_i) O^(n)_j,
/// by Gauss-Legendre (64 nodes in cos θ) x trapezoid (128 nodes in φ).
/// Exact for the trigonometric polynomials arising here.
fn haar_moment_general(n: usize, jp: usize, ip: Spin, i: Spin, j: usize) -> Complex64 {
    let (xs, ws) = gauss_legendre(GL_NODES);
    let binom = |k: usize| -> f64 {
        let k = k.min(n - k);
        (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
    };
    let norm = (binom(jp) * binom(j)).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, &w) in xs.iter().zip(&ws) {
        let c = ((1.0 + x) / 2.0).sqrt(); // cos(theta/2)
        let s = ((1.0 - x) / 2.0).sqrt();
        let theta_part = norm
            * c.powi((2 * n - jp - j) as i32)
            * s.powi((jp + j) as i32)
            * c.powi((2 - ip.excitation() - i.excitation()) as i32)
            * s.powi((ip.excitation() + i.excitation()) as i32);
        let winding =
            (j as i64 - jp as i64) + (ip.excitation() as i64 - i.excitation() as i64);
        let mut phi_sum = Complex64::new(0.0, 0.0);
        for p in 0..PHI_NODES {
            let phi = 2.0 * std::f64::consts::PI * p as f64 / PHI_NODES as f64;
            phi_sum += Complex64::from_polar(1.0, winding as f64 * phi);
        }
        acc += (w / 2.0) * theta_part * phi_sum / PHI_NODES as f64;
    }
    acc
}

/// Fourth moment of SU(2) rotation entries over the uniform sphere measure,
/// ∫ dΩ/4π O*_{↑j'} O_{↑i'} O*_{↑i} O_{↑j}.
pub fn haar_fourth_moment(jp: Spin, ip: Spin, i: Spin, j: Spin) -> Complex64 {
    haar_moment_general(1, jp.excitation(), ip, i, j.excitation())
}

/// Matrix element Tr[⟨(m-k')↑, k'↓| (|i'⟩⟨i| ⊗ 1) |(m-k)↑, k↓⟩] of a
/// single-copy operator between computational Dicke states.
pub fn single_clone_overlap_trace(kp: usize, ip: Spin, i: Spin, k: usize, m: usize) -> f64 {
    if kp > m || k > m {
        return 0.0;
    }
    // peel the first qubit off each Dicke state; the remaining (m-1)-qubit
    // labels must match
    let rest_k = k as i64 - i.excitation() as i64;
    let rest_kp = kp as i64 - ip.excitation() as i64;
    if rest_k != rest_kp || rest_k < 0 || rest_k > m as i64 - 1 {
        return 0.0;
    }
    let mf = m as f64;
    let u = |spin: Spin, label: usize| -> f64 {
        match spin {
            Spin::Up => ((m - label) as f64 / mf).sqrt(),
            Spin::Down => (label as f64 / mf).sqrt(),
        }
    };
    u(ip, kp) * u(i, k)
}

/// The optimality matrix over composite (input label j, output label k)
/// indices, packed row-major with j outer and k inner.
#[derive(Debug, Clone)]
pub struct AMatrix {
    n: usize,
    m: usize,
    entries: DMatrix<Complex64>,
}

impl AMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Flat index of the composite label (j, k).
    pub fn index(&self, j: usize, k: usize) -> usize {
        j * (self.m + 1) + k
    }

    /// Debug hook for the CLI: injects a non-Hermitian perturbation so the
    /// validation path in [`lambda_max`] can be exercised.
    pub fn perturb_non_hermitian(&mut self, eps: f64) {
        self.entries[(0, 1)] += Complex64::new(0.0, eps);
    }
}

/// A for one input qubit (Haar fourth-moment kernel contracted with the
/// single-copy trace term).
pub fn build_a(m: usize) -> Result<AMatrix> {
    build_a_general(1, m)
}

/// General-n A: the single-qubit rotation factors on the input side are
/// replaced by spin-(n/2) coherent components over the symmetric input basis
/// |(n-j)↑, j↓⟩. Reduces to [`build_a`] at n = 1.
pub fn build_a_general(n: usize, m: usize) -> Result<AMatrix> {
    if n < 1 || n >= m {
        return Err(QcmError::BadCloneCounts { n, m });
    }
    let spins = [Spin::Up, Spin::Down];
    // the moment tensor depends only on the four spin/excitation labels
    let mut moments = vec![Complex64::new(0.0, 0.0); (n + 1) * (n + 1) * 4];
    for jp in 0..=n {
        for j in 0..=n {
            for (a, &ip) in spins.iter().enumerate() {
                for (b, &i) in spins.iter().enumerate() {
                    moments[((jp * (n + 1) + j) * 2 + a) * 2 + b] =
                        haar_moment_general(n, jp, ip, i, j);
                }
            }
        }
    }
    let dim = (n + 1) * (m + 1);
    let mut entries = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for jp in 0..=n {
        for kp in 0..=m {
            for j in 0..=n {
                for k in 0..=m {
                    let mut val = Complex64::new(0.0, 0.0);
                    for (a, &ip) in spins.iter().enumerate() {
                        for (b, &i) in spins.iter().enumerate() {
                            let t = single_clone_overlap_trace(kp, ip, i, k, m);
                            if t != 0.0 {
                                val += moments[((jp * (n + 1) + j) * 2 + a) * 2 + b] * t;
                            }
                        }
                    }
                    entries[(jp * (m + 1) + kp, j * (m + 1) + k)] = val;
                }
            }
        }
    }
    Ok(AMatrix { n, m, entries })
}

/// Largest eigenvalue of a (validated) Hermitian A.
pub fn lambda_max(a: &AMatrix) -> Result<f64> {
    let defect = hermiticity_defect(&a.entries);
    if defect > 1e-12 {
        return Err(QcmError::NotHermitian { defect });
    }
    let eig = a.entries.clone().symmetric_eigen();
    Ok(eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// The 2x2 block of A at K = k - j for n = 1:
/// (1/6M) [[2M-K, √((M-K)(K+1))], [√((M-K)(K+1)), M+K+1]].
pub fn closed_form_block(m: usize, kcap: usize) -> [[f64; 2]; 2] {
    let (mf, kf) = (m as f64, kcap as f64);
    let off = ((mf - kf) * (kf + 1.0)).sqrt();
    let s = 1.0 / (6.0 * mf);
    [
        [s * (2.0 * mf - kf), s * off],
        [s * off, s * (mf + kf + 1.0)],
    ]
}

/// max |A_{j'k',jk}| over entries violating the δ_{k-j,k'-j'} block structure
/// (n = 1 only).
pub fn block_structure_defect(a: &AMatrix) -> f64 {
    let m = a.m;
    let mut defect = 0.0f64;
    for jp in 0..=a.n {
        for kp in 0..=m {
            for j in 0..=a.n {
                for k in 0..=m {
                    if k as i64 - j as i64 != kp as i64 - jp as i64 {
                        defect = defect
                            .max(a.entries[(jp * (m + 1) + kp, j * (m + 1) + k)].norm());
                    }
                }
            }
        }
    }
    defect
}

/// Eigenvalue bound versus the achieved cloner fidelity.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n: usize,
    pub m: usize,
    pub lambda_max: f64,
    /// (n+1)·λ_max: the trace of the identity constraint on the
    /// (n+1)-dimensional symmetric input space replaces the 2 of the
    /// single-qubit argument.
    pub bound: f64,
    pub achieved: f64,
    pub gap: f64,
}

/// Upper bound on the N→M fidelity from the largest eigenvalue of A, and its
/// gap to the closed-form fidelity of the explicit cloner.
pub fn optimal_bound(n: usize, m: usize) -> Result<BoundReport> {
    let a = build_a_general(n, m)?;
    let lam = lambda_max(&a)?;
    let bound = (n as f64 + 1.0) * lam;
    let achieved = fidelity_formula(n, m)?.to_f64().expect("finite");
    Ok(BoundReport {
        n,
        m,
        lambda_max: lam,
        bound,
        achieved,
        gap: bound - achieved,
    })
}

/// Coefficients of the optimal machine's final states |R_{jk}⟩ over the
/// orthonormal ancilla labels R_0..R_{m-1}, for n = 1: rows are composite
/// (j, k) indices, columns ancilla labels.
fn machine_states_n1(m: usize) -> Result<DMatrix<Complex64>> {
    let a = alpha(1, m)?;
    let mut v = DMatrix::from_element(2 * (m + 1), m, Complex64::new(0.0, 0.0));
    for k in 0..m {
        // input up: clone label k carries alpha_k R_k
        v[(k, k)] = Complex64::new(a.alpha()[k], 0.0);
        // input down: clone label k+1 carries alpha_{m-1-k} R_k
        v[(m + 1 + k + 1, k)] = Complex64::new(a.alpha()[m - 1 - k], 0.0);
    }
    Ok(v)
}

/// The fidelity bilinear ⟨R_{j'k'}|R_{jk}⟩ A_{j'k'jk} evaluated on the
/// explicit optimal machine states (n = 1). Must equal (2M+1)/3M.
pub fn bilinear_fidelity_n1(m: usize) -> Result<f64> {
    let a = build_a(m)?;
    let v = machine_states_n1(m)?;
    let mut f = Complex64::new(0.0, 0.0);
    let dim = 2 * (m + 1);
    for row in 0..dim {
        for col in 0..dim {
            // <R_row|R_col> = sum_l conj(V[row,l]) V[col,l]
            let mut g = Complex64::new(0.0, 0.0);
            for l in 0..m {
                g += v[(row, l)].conj() * v[(col, l)];
            }
            f += g * a.entries[(row, col)];
        }
    }
    Ok(f.re)
}

/// Residual ‖(A - λ_max) |R_{jk}⟩‖_max of the stationarity equation with a
/// scalar multiplier, evaluated on the optimal machine states (n = 1).
pub fn eigen_residual_n1(m: usize) -> Result<f64> {
    let a = build_a(m)?;
    let lam = lambda_max(&a)?;
    let v = machine_states_n1(m)?;
    let dim = 2 * (m + 1);
    let mut defect = 0.0f64;
    for l in 0..m {
        let col = DVector::from_fn(dim, |r, _| v[(r, l)]);
        let res = &a.entries * &col - &col * Complex64::new(lam, 0.0);
        defect = defect.max(res.iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    Ok(defect)
}

/// A wrapped as a validated [`HermitianMatrix`].
pub fn a_as_hermitian(a: &AMatrix) -> Result<HermitianMatrix> {
    HermitianMatrix::new(a.entries.clone())
}
