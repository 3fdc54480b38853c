//! Pure states in C^d, the Hadamard sign-vector family, Born probabilities and
//! the quantum distance/overlap measures.
//!
//! States whose amplitudes are all of the form `s/sqrt(n)` with `s` in
//! {-1, 0, +1} (and `n` the support size) are kept in an exact signed
//! representation. Inner products between two such states reduce to integer
//! dot products, so orthogonality and Born probabilities are exact for them.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `|<a|b>| < ORTHO_TOL` counts as orthogonal off the exact path.
pub const ORTHO_TOL: f64 = 1e-10;
/// `|<a|b>|^2 > 1 - SAME_RAY_TOL` counts as the same ray.
pub const SAME_RAY_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;
pub const DEFAULT_ENUMERATION_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    /// Amplitude `i` is `signs[i] / sqrt(support)`.
    Signed {
        signs: Vec<i8>,
        support: usize,
    },
    Complex(Vec<Complex64>),
}

/// A normalized vector in C^d, d >= 2.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    repr: Repr,
}

/// Normalizes `amplitudes` into a state.
pub fn make_state(amplitudes: &[Complex64]) -> Result<PureState> {
    if amplitudes.len() < 2 {
        return Err(Error::DimensionTooSmall(amplitudes.len()));
    }
    if amplitudes
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::InvalidParameter("non-finite amplitude".into()));
    }
    let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if norm_sqr == 0.0 {
        return Err(Error::ZeroVector);
    }
    if let Some(signs) = detect_signed(amplitudes) {
        return PureState::from_signs(signs);
    }
    let norm = norm_sqr.sqrt();
    Ok(PureState {
        repr: Repr::Complex(amplitudes.iter().map(|z| z / norm).collect()),
    })
}

fn detect_signed(amplitudes: &[Complex64]) -> Option<Vec<i8>> {
    if amplitudes.iter().any(|z| z.im != 0.0) {
        return None;
    }
    let mag = amplitudes.iter().find(|z| z.re != 0.0)?.re.abs();
    amplitudes
        .iter()
        .map(|z| {
            if z.re == 0.0 {
                Some(0)
            } else if z.re.abs() == mag {
                Some(if z.re > 0.0 { 1 } else { -1 })
            } else {
                None
            }
        })
        .collect()
}

impl PureState {
    /// State with amplitudes `signs[i] / sqrt(#nonzero)`.
    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if signs.len() < 2 {
            return Err(Error::DimensionTooSmall(signs.len()));
        }
        if signs.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(Error::InvalidParameter("signs must be -1, 0 or +1".into()));
        }
        let support = signs.iter().filter(|&&s| s != 0).count();
        if support == 0 {
            return Err(Error::ZeroVector);
        }
        Ok(PureState {
            repr: Repr::Signed { signs, support },
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        make_state(&c)
    }

    /// Standard basis vector e_i.
    pub fn basis_vector(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis vector",
                index: i,
                len: dim,
            });
        }
        let mut signs = vec![0; dim];
        signs[i] = 1;
        Self::from_signs(signs)
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Signed { signs, .. } => signs.len(),
            Repr::Complex(v) => v.len(),
        }
    }

    /// True when the state lives on the exact signed representation.
    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Signed { .. })
    }

    pub fn signs(&self) -> Option<&[i8]> {
        match &self.repr {
            Repr::Signed { signs, .. } => Some(signs),
            Repr::Complex(_) => None,
        }
    }

    pub fn amplitude(&self, i: usize) -> Complex64 {
        match &self.repr {
            Repr::Signed { signs, support } => {
                Complex64::new(signs[i] as f64 / (*support as f64).sqrt(), 0.0)
            }
            Repr::Complex(v) => v[i],
        }
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.amplitude(i)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.repr {
            Repr::Signed { .. } => 1.0,
            Repr::Complex(v) => v.iter().map(|z| z.norm_sqr()).sum(),
        }
    }
}

fn check_dims(a: &PureState, b: &PureState) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Integer dot product and support sizes, when both states are exact.
fn exact_parts(a: &PureState, b: &PureState) -> Option<(i64, i64, i64)> {
    match (&a.repr, &b.repr) {
        (
            Repr::Signed {
                signs: sa,
                support: na,
            },
            Repr::Signed {
                signs: sb,
                support: nb,
            },
        ) => {
            let dot: i64 = sa.iter().zip(sb).map(|(&x, &y)| (x * y) as i64).sum();
            Some((dot, *na as i64, *nb as i64))
        }
        _ => None,
    }
}

/// Hermitian inner product `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    check_dims(a, b)?;
    if let Some((dot, na, nb)) = exact_parts(a, b) {
        return Ok(Complex64::new(dot as f64 / ((na * nb) as f64).sqrt(), 0.0));
    }
    Ok((0..a.dim())
        .map(|i| a.amplitude(i).conj() * b.amplitude(i))
        .sum())
}

/// `|<a|psi>|^2` as an exact rational, when both states are exact.
pub fn exact_born(a: &PureState, psi: &PureState) -> Result<Option<Rational64>> {
    check_dims(a, psi)?;
    Ok(exact_parts(a, psi).map(|(dot, na, nb)| Rational64::new(dot * dot, na * nb)))
}

/// `|<a|psi>|^2`, clamped to [0, 1].
pub fn born_probability(a: &PureState, psi: &PureState) -> Result<f64> {
    if let Some(r) = exact_born(a, psi)? {
        return Ok(r.to_f64().unwrap_or(0.0));
    }
    Ok(inner_product(a, psi)?.norm_sqr().clamp(0.0, 1.0))
}

pub fn is_orthogonal(a: &PureState, b: &PureState) -> Result<bool> {
    check_dims(a, b)?;
    if let Some((dot, _, _)) = exact_parts(a, b) {
        return Ok(dot == 0);
    }
    Ok(inner_product(a, b)?.norm() < ORTHO_TOL)
}

/// Equality up to global phase.
pub fn same_ray(a: &PureState, b: &PureState) -> Result<bool> {
    if let Some(r) = exact_born(a, b)? {
        return Ok(r == Rational64::from_integer(1));
    }
    Ok(born_probability(a, b)? > 1.0 - SAME_RAY_TOL)
}

/// `L_Q = 1 - sqrt(1 - |<phi|psi>|^2)`.
pub fn quantum_overlap(psi: &PureState, phi: &PureState) -> Result<f64> {
    Ok(1.0 - trace_distance(psi, phi)?)
}

/// Pure-state trace distance `D_Q = sqrt(1 - |<phi|psi>|^2)`.
pub fn trace_distance(psi: &PureState, phi: &PureState) -> Result<f64> {
    let p = born_probability(phi, psi)?;
    Ok((1.0 - p).max(0.0).sqrt())
}

/// A Hadamard state `(1/sqrt d)(+-1, ..., +-1)`. Coordinate `i` is stored in
/// bit `dim - 1 - i`, so the integer order of `bits` is the lexicographic
/// order of the bit string; bit 1 means amplitude `-1/sqrt d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector {
    dim: usize,
    bits: u64,
}

impl SignVector {
    pub const MAX_DIM: usize = 64;

    pub fn new(dim: usize, bits: u64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if dim > Self::MAX_DIM {
            return Err(Error::InvalidParameter(format!(
                "sign vectors support d <= {}, got {dim}",
                Self::MAX_DIM
            )));
        }
        if dim < 64 && bits >> dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "bit pattern {bits:#x} does not fit in {dim} coordinates"
            )));
        }
        Ok(SignVector { dim, bits })
    }

    pub fn from_bit_string(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for ch in s.chars() {
            bits = match ch {
                '0' => bits << 1,
                '1' => (bits << 1) | 1,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "bad character {ch:?} in bit string"
                    )))
                }
            };
        }
        if s.len() > Self::MAX_DIM {
            return Err(Error::InvalidParameter("bit string too long".into()));
        }
        Self::new(s.len(), bits)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Bit for coordinate `i` (1 = negative amplitude).
    pub fn bit(&self, i: usize) -> bool {
        (self.bits >> (self.dim - 1 - i)) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn hamming(&self, other: &SignVector) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// `<a|b> = (d - 2h)/d` with `h` the Hamming distance.
    pub fn inner_product(&self, other: &SignVector) -> Result<Rational64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let d = self.dim as i64;
        Ok(Rational64::new(d - 2 * self.hamming(other) as i64, d))
    }

    pub fn to_state(&self) -> PureState {
        let signs = (0..self.dim)
            .map(|i| if self.bit(i) { -1 } else { 1 })
            .collect();
        PureState {
            repr: Repr::Signed {
                signs,
                support: self.dim,
            },
        }
    }

    /// Recovers the sign vector from an exact state with full support.
    pub fn from_state(state: &PureState) -> Option<Self> {
        let signs = state.signs()?;
        if signs.contains(&0) || signs.len() > Self::MAX_DIM {
            return None;
        }
        let bits = signs
            .iter()
            .fold(0u64, |acc, &s| (acc << 1) | u64::from(s < 0));
        Some(SignVector {
            dim: signs.len(),
            bits,
        })
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// All `2^d` Hadamard sign vectors in lexicographic order.
pub fn hadamard_family(d: usize) -> Result<Vec<SignVector>> {
    hadamard_family_with_cap(d, DEFAULT_ENUMERATION_CAP)
}

pub fn hadamard_family_with_cap(d: usize, cap: usize) -> Result<Vec<SignVector>> {
    if d < 2 {
        return Err(Error::DimensionTooSmall(d));
    }
    let count: u128 = 1u128 << d.min(127);
    if d > SignVector::MAX_DIM || count > cap as u128 {
        return Err(Error::capacity("Hadamard family", count, cap as u128));
    }
    (0..count as u64)
        .map(|bits| SignVector::new(d, bits))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let amps = self.amplitudes();
        StateJson {
            dim: self.dim(),
            re: amps.iter().map(|z| z.re).collect(),
            im: amps.iter().map(|z| z.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = StateJson::deserialize(deserializer)?;
        if raw.re.len() != raw.dim || raw.im.len() != raw.dim {
            return Err(D::Error::custom("re/im length must equal dim"));
        }
        let amps: Vec<Complex64> = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        make_state(&amps).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SignJson {
    dim: usize,
    bits: String,
}

impl Serialize for SignVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SignJson {
            dim: self.dim,
            bits: self.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SignJson::deserialize(deserializer)?;
        let v = SignVector::from_bit_string(&raw.bits).map_err(D::Error::custom)?;
        if v.dim != raw.dim {
            return Err(D::Error::custom("bit string length must equal dim"));
        }
        Ok(v)
    }
}
