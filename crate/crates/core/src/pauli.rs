//! Single-qubit Pauli channels `ρ ↦ p0 ρ + px XρX + py YρY + pz ZρZ`.
//!
//! The superoperator is diagonal in the Pauli operator basis with entries
//! `(1, ηx, ηy, ηz)`, `η_i = 1 − 2(p_j + p_k)`, so composition is pointwise
//! multiplication of eigenvalues and every closed-form operation here reduces
//! to arithmetic on `η`.

use serde::Serialize;

use crate::channel::{ChannelDense, Tolerances};
use crate::error::{Error, Result};
use crate::linalg::{c, pauli_matrices};
use crate::spectral::BlockDims;

/// Tolerance on `Σp = 1` for [`PauliChannel::new`].
pub const SUM_TOL: f64 = 1e-12;

/// Slack accepted by [`PauliChannel::absorb_identity`]; the mismatch is moved
/// into `p0` so the error rates, and hence `η`, are untouched.
pub const LENIENT_SUM_TOL: f64 = 1e-4;

/// Tolerance for deciding whether an eigenvalue is unimodular.
const UNIMODULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliChannel {
    p: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PauliEigenvalues {
    pub eta: [f64; 3],
}

impl PauliChannel {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidInput(format!("probabilities must be nonnegative: {p:?}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidInput(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { p })
    }

    /// Channel with the given X, Y, Z error rates and `p0 = 1 − Σ`.
    pub fn from_error_rates(px: f64, py: f64, pz: f64) -> Result<Self> {
        Self::new([1.0 - px - py - pz, px, py, pz])
    }

    /// Accepts a vector whose sum is within [`LENIENT_SUM_TOL`] of 1 by
    /// resetting `p0 = 1 − (px + py + pz)`.
    pub fn absorb_identity(p: [f64; 4]) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > LENIENT_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {sum}, more than {LENIENT_SUM_TOL:e} away from 1"
            )));
        }
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidInput(format!("probabilities must be nonnegative: {p:?}")));
        }
        Self::from_error_rates(p[1], p[2], p[3])
    }

    /// Parses `"p0,px,py,pz"`.
    pub fn parse(text: &str) -> Result<Self> {
        let values: Vec<f64> = text
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad probability `{s}`: {e}"))))
            .collect::<Result<_>>()?;
        let p: [f64; 4] = values
            .try_into()
            .map_err(|v: Vec<f64>| Error::InvalidInput(format!("expected 4 values, got {}", v.len())))?;
        Self::absorb_identity(p)
    }

    pub fn identity() -> Self {
        Self { p: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn probabilities(&self) -> [f64; 4] {
        self.p
    }

    pub fn eigenvalues(&self) -> PauliEigenvalues {
        let [_, px, py, pz] = self.p;
        PauliEigenvalues { eta: [1.0 - 2.0 * (py + pz), 1.0 - 2.0 * (px + pz), 1.0 - 2.0 * (px + py)] }
    }

    /// `t`-fold composition; non-integer `t` requires all `η ≥ 0`.
    pub fn power(&self, t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!("power must be a finite t ≥ 0, got {t}")));
        }
        let eta = self.eigenvalues().eta;
        if t.fract() != 0.0 {
            if let Some(&neg) = eta.iter().find(|&&e| e < 0.0) {
                return Err(Error::FractionalPowerOfNegative { t, eta: neg });
            }
        }
        // powf is exact in sign for integral exponents of negative bases.
        PauliEigenvalues { eta: eta.map(|e| e.powf(t)) }.to_channel()
    }

    /// `self ∘ other`, pointwise product of eigenvalues.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (self.eigenvalues().eta, other.eigenvalues().eta);
        PauliEigenvalues { eta: [a[0] * b[0], a[1] * b[1], a[2] * b[2]] }
            .to_channel()
            .expect("composition of Pauli channels is a Pauli channel")
    }

    pub fn shannon_entropy(&self) -> f64 {
        shannon_entropy_bits(&self.p)
    }

    /// `max(0, 1 − H(p))`.
    pub fn hashing_lb(&self) -> f64 {
        (1.0 - self.shannon_entropy()).max(0.0)
    }

    pub fn to_dense(&self) -> ChannelDense {
        let paulis = pauli_matrices();
        let kraus =
            paulis.into_iter().zip(self.p).filter(|(_, p)| *p > 0.0).map(|(m, p)| m * c(p.sqrt(), 0.0)).collect();
        ChannelDense::from_kraus(kraus, &Tolerances::default()).expect("Pauli channels are CPTP")
    }

    /// Peripheral block sizes: `(1)` when no `η_i` is unimodular, `(1, 1)`
    /// when exactly one is, `(2)` when all three are (a Pauli unitary).
    pub fn peripheral_dims(&self) -> BlockDims {
        let unimodular = self.eigenvalues().eta.iter().filter(|e| e.abs() >= 1.0 - UNIMODULAR_TOL).count();
        match unimodular {
            0 => BlockDims(vec![1]),
            1 => BlockDims(vec![1, 1]),
            _ => BlockDims(vec![2]),
        }
    }

    /// `−ln` of the largest non-unimodular `|η_i|`; `+∞` if none remain or
    /// the largest is zero.
    pub fn lambda_gap(&self) -> f64 {
        let r =
            self.eigenvalues().eta.iter().map(|e| e.abs()).filter(|&a| a < 1.0 - UNIMODULAR_TOL).fold(0.0, f64::max);
        if r == 0.0 {
            f64::INFINITY
        } else {
            -r.ln()
        }
    }
}

impl PauliEigenvalues {
    pub fn to_channel(&self) -> Result<PauliChannel> {
        let [x, y, z] = self.eta;
        let mut p =
            [(1.0 + x + y + z) / 4.0, (1.0 + x - y - z) / 4.0, (1.0 - x + y - z) / 4.0, (1.0 - x - y + z) / 4.0];
        let min_probability = p.iter().copied().fold(f64::INFINITY, f64::min);
        if min_probability < -1e-12 {
            return Err(Error::InvalidEigenvalues { min_probability });
        }
        for v in &mut p {
            *v = v.max(0.0);
        }
        Ok(PauliChannel { p })
    }
}

/// `−Σ p log₂ p` with `0 log 0 = 0`.
pub fn shannon_entropy_bits(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// Binary entropy in bits, zero at both endpoints.
pub fn binary_entropy(x: f64) -> f64 {
    shannon_entropy_bits(&[x, 1.0 - x])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(PauliChannel::identity().eigenvalues().eta, [1.0, 1.0, 1.0]);
        let w = 0.1;
        let eta = PauliChannel::new([1.0 - 3.0 * w, w, w, w]).unwrap().eigenvalues().eta;
        for e in eta {
            assert_relative_eq!(e, 0.6, epsilon = 1e-15);
        }
        let weak = PauliChannel::absorb_identity([0.9986, 0.00047, 0.00047, 0.00047]).unwrap();
        for e in weak.eigenvalues().eta {
            assert_relative_eq!(e, 0.99812, max_relative = 1e-14);
        }
    }

    #[test]
    fn from_eigenvalue_examples() {
        let p = PauliEigenvalues { eta: [1.0, 1.0, 1.0] }.to_channel().unwrap();
        assert_eq!(p.probabilities(), [1.0, 0.0, 0.0, 0.0]);
        let p = PauliEigenvalues { eta: [0.0; 3] }.to_channel().unwrap();
        assert_eq!(p.probabilities(), [0.25; 4]);
        let err = PauliEigenvalues { eta: [1.0, -1.0, 1.0] }.to_channel().unwrap_err();
        assert!(matches!(err, Error::InvalidEigenvalues { .. }));
    }

    #[test]
    fn power_examples() {
        let p = PauliChannel::new([0.7, 0.3, 0.0, 0.0]).unwrap();
        assert_eq!(p.power(0.0).unwrap().probabilities(), [1.0, 0.0, 0.0, 0.0]);
        let p2 = p.power(2.0).unwrap().probabilities();
        for (a, b) in p2.iter().zip([0.58, 0.42, 0.0, 0.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        let weak = PauliChannel::absorb_identity([0.9986, 0.00047, 0.00047, 0.00047]).unwrap();
        let eta = weak.power(1000.0).unwrap().eigenvalues().eta;
        let expected = 0.99812f64.powi(1000);
        for e in eta {
            assert_relative_eq!(e, expected, max_relative = 1e-10);
        }
        assert_relative_eq!(expected, 0.1524, epsilon = 1e-4);
    }

    #[test]
    fn fractional_power_of_negative_eigenvalue_rejected() {
        let p = PauliChannel::new([0.1, 0.9, 0.0, 0.0]).unwrap();
        assert!(matches!(p.power(0.5), Err(Error::FractionalPowerOfNegative { .. })));
        assert!(p.power(3.0).is_ok());
        assert!(p.power(-1.0).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(PauliChannel::identity().shannon_entropy(), 0.0);
        assert_eq!(PauliChannel::new([0.25; 4]).unwrap().shannon_entropy(), 2.0);
        assert_eq!(PauliChannel::new([0.5, 0.5, 0.0, 0.0]).unwrap().shannon_entropy(), 1.0);
        assert_eq!(PauliChannel::identity().hashing_lb(), 1.0);
        assert_eq!(PauliChannel::new([0.25; 4]).unwrap().hashing_lb(), 0.0);
        assert_relative_eq!(binary_entropy(0.1), 0.468_995_593_589_281_2, epsilon = 1e-15);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
    }

    #[test]
    fn parse_and_normalization() {
        let p = PauliChannel::parse("0.9986, 0.00047,0.00047,0.00047").unwrap();
        assert_relative_eq!(p.probabilities()[0], 1.0 - 3.0 * 0.00047, epsilon = 1e-16);
        assert!(PauliChannel::parse("0.5,0.5,0.5,0.5").is_err());
        assert!(PauliChannel::parse("0.5,0.5").is_err());
        assert!(PauliChannel::parse("a,b,c,d").is_err());
        assert!(PauliChannel::new([1.1, -0.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn peripheral_dims_cases() {
        let full = PauliChannel::new([0.7, 0.1, 0.1, 0.1]).unwrap();
        assert_eq!(full.peripheral_dims(), BlockDims(vec![1]));
        let dephase = PauliChannel::new([0.5, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(dephase.peripheral_dims(), BlockDims(vec![1, 1]));
        assert_eq!(PauliChannel::identity().peripheral_dims(), BlockDims(vec![2]));
        let flip = PauliChannel::new([0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(flip.peripheral_dims(), BlockDims(vec![2]));
        assert!(PauliChannel::identity().lambda_gap().is_infinite());
        assert!(PauliChannel::new([0.25; 4]).unwrap().lambda_gap().is_infinite());
        assert_relative_eq!(full.lambda_gap(), -(0.6f64).ln(), max_relative = 1e-14);
    }

    fn valid_p() -> impl Strategy<Value = PauliChannel> {
        (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64).prop_filter_map("nonzero", |(a, b, c, d)| {
            let s = a + b + c + d;
            (s > 1e-6).then(|| {
                let (px, py, pz) = (b / s, c / s, d / s);
                PauliChannel::from_error_rates(px, py, pz).ok()
            })?
        })
    }

    proptest! {
        #[test]
        fn eigenvalue_round_trip(p in valid_p()) {
            let back = p.eigenvalues().to_channel().unwrap();
            for (a, b) in back.probabilities().iter().zip(p.probabilities()) {
                prop_assert!((a - b).abs() <= 1e-14);
            }
        }

        #[test]
        fn semigroup_law(p in valid_p(), s in 0u32..20, t in 0u32..20) {
            let lhs = p.power((s + t) as f64).unwrap().eigenvalues().eta;
            let rhs = p.power(s as f64).unwrap().compose(&p.power(t as f64).unwrap()).eigenvalues().eta;
            for (a, b) in lhs.iter().zip(rhs) {
                prop_assert!((a - b).abs() <= 1e-13);
            }
        }

        #[test]
        fn hashing_nonincreasing_for_nonnegative_eta(px in 0.0..0.25f64, py in 0.0..0.25f64, pz in 0.0..0.25f64) {
            let p = PauliChannel::from_error_rates(px / 3.0 * 2.0, py / 3.0 * 2.0, pz / 3.0 * 2.0).unwrap();
            prop_assert!(p.eigenvalues().eta.iter().all(|&e| e >= 0.0));
            let mut prev = p.hashing_lb();
            for t in 2..40 {
                let next = p.power(t as f64).unwrap().hashing_lb();
                prop_assert!(next <= prev + 1e-12);
                prev = next;
            }
        }
    }
}
