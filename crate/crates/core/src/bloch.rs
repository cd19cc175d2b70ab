//! Pure qubit states as points on the Poincaré sphere, their orthogonal and
//! conjugate partners, and uniform sphere sampling.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

use crate::{QcmError, Result};

/// Name of the random generator backing [`sample_uniform`], recorded in
/// report metadata so runs can be reproduced bit-identically.
pub const RNG_NAME: &str = "chacha8";

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// A pure qubit state `cos(θ/2)|↑⟩ + e^{iφ} sin(θ/2)|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit {
    theta: f64,
    phi: f64,
}

impl Qubit {
    /// `theta` must be finite and in `[0, π]`; `phi` is reduced mod 2π.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite()
            || !phi.is_finite()
            || !(0.0..=std::f64::consts::PI).contains(&theta)
        {
            return Err(QcmError::InvalidAngle { theta, phi });
        }
        Ok(Self {
            theta,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The state transforming under the complex-conjugate representation,
    /// `cos(θ/2)|↑⟩ + e^{-iφ} sin(θ/2)|↓⟩`, i.e. φ → -φ.
    pub fn conjugate_qubit(&self) -> Qubit {
        Qubit {
            theta: self.theta,
            phi: (-self.phi).rem_euclid(TAU),
        }
    }
}

/// Computational-basis components of a single-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub up: Complex64,
    pub down: Complex64,
}

impl AmplitudePair {
    /// ⟨self|other⟩.
    pub fn inner(&self, other: &AmplitudePair) -> Complex64 {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    pub fn norm(&self) -> f64 {
        (self.up.norm_sqr() + self.down.norm_sqr()).sqrt()
    }

    pub fn conj(&self) -> AmplitudePair {
        AmplitudePair {
            up: self.up.conj(),
            down: self.down.conj(),
        }
    }
}

/// Components `(cos(θ/2), e^{iφ} sin(θ/2))` of ψ.
pub fn amplitudes(psi: &Qubit) -> AmplitudePair {
    let (s, c) = (psi.theta / 2.0).sin_cos();
    AmplitudePair {
        up: Complex64::new(c, 0.0),
        down: Complex64::from_polar(s, psi.phi),
    }
}

/// The orthogonal partner ψ⊥ with the fixed phase convention
/// `(-e^{-iφ} sin(θ/2), cos(θ/2))`.
///
/// This convention pairs with [`conjugate`] so that the covariant form of the
/// cloning unitary holds with no extra phases (checked in the cloner tests).
pub fn orthogonal(psi: &Qubit) -> AmplitudePair {
    let (s, c) = (psi.theta / 2.0).sin_cos();
    AmplitudePair {
        up: -Complex64::from_polar(s, -psi.phi),
        down: Complex64::new(c, 0.0),
    }
}

/// Components `(cos(θ/2), e^{-iφ} sin(θ/2))` of ψ*.
pub fn conjugate(psi: &Qubit) -> AmplitudePair {
    amplitudes(psi).conj()
}

/// `n` qubits drawn from the uniform (Haar) measure on the sphere:
/// cos θ uniform on [-1, 1], φ uniform on [0, 2π). Deterministic per seed.
pub fn sample_uniform(seed: u64, n: usize) -> Vec<Qubit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..=1.0);
            let phi: f64 = rng.random_range(0.0..TAU);
            Qubit {
                theta: z.clamp(-1.0, 1.0).acos(),
                phi,
            }
        })
        .collect()
}
