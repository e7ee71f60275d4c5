//! Small dense complex linear algebra for one and two qubits.
//!
//! Basis order is fixed as `b1 = |00>`, `b2 = |01>`, `b3 = |10>`, `b4 = |11>`
//! and every matrix is stored row-major in that order. Basis indices in the
//! public API are 1-based to line up with the usual `U_ij` notation.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex amplitude. Serializes as `[re, im]`.
pub type ComplexScalar = Complex64;

/// Normalization tolerance for state vectors.
pub const NORM_TOL: f64 = 1e-12;
/// Entrywise tolerance for `U^dagger U = I`.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("strategy not normalized: squared norm {norm_sq} differs from 1 by more than {tol}")]
    NotNormalized { norm_sq: f64, tol: f64 },
    #[error(
        "matrix is not unitary: max |U^dagger U - I| entry is {deviation:e} (tolerance {tol:e})"
    )]
    NotUnitary { deviation: f64, tol: f64 },
    #[error("non-finite amplitude")]
    NonFinite,
    #[error("unknown gate `{0}` (expected identity, cnot, swap, cz or custom)")]
    UnknownGate(String),
    #[error("custom gate requires a 4x4 matrix payload")]
    MissingPayload,
    #[error("bloch angle out of range: alpha={alpha} must lie in [0, pi], phi={phi} in [0, 2pi)")]
    AngleOutOfRange { alpha: f64, phi: f64 },
    #[error("basis index {0} out of range 1..=4")]
    BasisIndex(usize),
}

fn check_finite(zs: &[Complex64]) -> Result<(), LinalgError> {
    if zs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

fn check_norm(zs: &[Complex64]) -> Result<(), LinalgError> {
    check_finite(zs)?;
    let norm_sq: f64 = zs.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > NORM_TOL {
        return Err(LinalgError::NotNormalized {
            norm_sq,
            tol: NORM_TOL,
        });
    }
    Ok(())
}

/// Validates a 1-based basis index.
pub fn basis_index(i: usize) -> Result<usize, LinalgError> {
    if (1..=4).contains(&i) {
        Ok(i)
    } else {
        Err(LinalgError::BasisIndex(i))
    }
}

/// Pure single-qubit state `x|0> + y|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    x: Complex64,
    y: Complex64,
}

impl QubitState {
    pub fn new(x: Complex64, y: Complex64) -> Result<Self, LinalgError> {
        check_norm(&[x, y])?;
        Ok(Self { x, y })
    }

    /// `|0>`
    pub fn zero() -> Self {
        Self { x: ONE, y: ZERO }
    }

    /// `|1>`
    pub fn one() -> Self {
        Self { x: ZERO, y: ONE }
    }

    /// Builds a state from a pair that is already known to be unit-norm up to
    /// rounding, e.g. the output of an angle parameterization.
    pub(crate) fn from_unit(x: Complex64, y: Complex64) -> Self {
        Self { x, y }
    }

    pub fn x(&self) -> Complex64 {
        self.x
    }

    pub fn y(&self) -> Complex64 {
        self.y
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.x, self.y]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr()
    }

    /// Multiplies both amplitudes by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let w = Complex64::from_polar(1.0, phase);
        Self {
            x: self.x * w,
            y: self.y * w,
        }
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &QubitState) -> Complex64 {
        self.x.conj() * other.x + self.y.conj() * other.y
    }

    /// Great-circle angle between the two states on the Bloch sphere, in `[0, pi]`.
    pub fn bloch_distance(&self, other: &QubitState) -> f64 {
        2.0 * self.inner(other).norm().min(1.0).acos()
    }

    /// Bloch angles of this state, with the global phase removed so that the
    /// `|0>` amplitude is real and nonnegative. Inverse of [`from_angles`] up to
    /// global phase.
    pub fn to_angles(&self) -> BlochAngles {
        let alpha = 2.0 * self.y.norm().atan2(self.x.norm());
        // at the poles the relative phase is undefined; pin it to 0
        let phi = if self.x.norm() == 0.0 || self.y.norm() == 0.0 {
            0.0
        } else {
            (self.y.arg() - self.x.arg()).rem_euclid(TAU)
        };
        // rem_euclid can return TAU itself for tiny negative inputs
        let phi = if phi >= TAU { 0.0 } else { phi };
        BlochAngles {
            alpha: alpha.clamp(0.0, PI),
            phi,
        }
    }
}

impl fmt::Display for QubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6})|0> + ({:.6})|1>", self.x, self.y)
    }
}

/// Pure two-qubit state with amplitudes on `b1..b4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amp: [Complex64; 4],
}

impl TwoQubitState {
    pub fn new(amp: [Complex64; 4]) -> Result<Self, LinalgError> {
        check_norm(&amp)?;
        Ok(Self { amp })
    }

    /// Computational basis state `b_i`, 1-based.
    pub fn basis(i: usize) -> Result<Self, LinalgError> {
        let i = basis_index(i)?;
        let mut amp = [ZERO; 4];
        amp[i - 1] = ONE;
        Ok(Self { amp })
    }

    /// Amplitude on `b_i`, 1-based.
    ///
    /// # Panics
    /// If `i` is not in `1..=4`.
    pub fn amp(&self, i: usize) -> Complex64 {
        self.amp[i - 1]
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

// States serialize as plain amplitude arrays, matrices as nested row-major arrays.
impl Serialize for QubitState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.amplitudes().serialize(s)
    }
}

impl Serialize for TwoQubitState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.amp.serialize(s)
    }
}

impl Serialize for Unitary4 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

/// Polar parameterization of a pure qubit state up to global phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochAngles {
    pub alpha: f64,
    pub phi: f64,
}

impl BlochAngles {
    pub fn new(alpha: f64, phi: f64) -> Result<Self, LinalgError> {
        let ok = alpha.is_finite()
            && phi.is_finite()
            && (0.0..=PI).contains(&alpha)
            && (0.0..TAU).contains(&phi);
        if ok {
            Ok(Self { alpha, phi })
        } else {
            Err(LinalgError::AngleOutOfRange { alpha, phi })
        }
    }
}

/// `x = cos(alpha/2)`, `y = e^{i phi} sin(alpha/2)`.
pub fn from_angles(a: BlochAngles) -> QubitState {
    let (s, c) = (a.alpha / 2.0).sin_cos();
    QubitState::from_unit(Complex64::new(c, 0.0), Complex64::from_polar(s, a.phi))
}

/// Same as [`from_angles`] but without the range check; angles are used as
/// given. Used by the grid search, which stays inside the ranges anyway.
pub(crate) fn from_angles_raw(alpha: f64, phi: f64) -> QubitState {
    from_angles(BlochAngles { alpha, phi })
}

/// `a ⊗ b`, amplitudes `(x_a x_b, x_a y_b, y_a x_b, y_a y_b)`.
pub fn tensor(a: &QubitState, b: &QubitState) -> TwoQubitState {
    TwoQubitState {
        amp: [a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y],
    }
}

/// `<p|q>`, conjugate-linear in `p`.
pub fn inner(p: &TwoQubitState, q: &TwoQubitState) -> Complex64 {
    p.amp
        .iter()
        .zip(q.amp.iter())
        .map(|(a, b)| a.conj() * b)
        .sum()
}

/// Matrix-vector product `U s`.
pub fn apply(u: &Unitary4, s: &TwoQubitState) -> TwoQubitState {
    let mut amp = [ZERO; 4];
    for (i, row) in u.m.iter().enumerate() {
        amp[i] = row.iter().zip(s.amp.iter()).map(|(a, b)| a * b).sum();
    }
    TwoQubitState { amp }
}

/// A validated 4x4 unitary, row `i` = output basis index, column `j` = input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary4 {
    m: [[Complex64; 4]; 4],
}

impl Unitary4 {
    pub fn new(m: [[Complex64; 4]; 4]) -> Result<Self, LinalgError> {
        check_finite(m.as_flattened())?;
        let deviation = unitarity_deviation(&m);
        if deviation > UNITARY_TOL {
            return Err(LinalgError::NotUnitary {
                deviation,
                tol: UNITARY_TOL,
            });
        }
        Ok(Self { m })
    }

    fn permutation(rows: [usize; 4]) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, &j) in rows.iter().enumerate() {
            m[i][j] = ONE;
        }
        Self { m }
    }

    pub fn identity() -> Self {
        Self::permutation([0, 1, 2, 3])
    }

    /// Control on the first qubit: `|10> <-> |11>`.
    pub fn cnot() -> Self {
        Self::permutation([0, 1, 3, 2])
    }

    pub fn swap() -> Self {
        Self::permutation([0, 2, 1, 3])
    }

    pub fn cz() -> Self {
        let mut u = Self::identity();
        u.m[3][3] = -ONE;
        u
    }

    /// Entry `U_ij`, 1-based.
    ///
    /// # Panics
    /// If either index is not in `1..=4`.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    /// Max entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.m)
    }

    pub fn dagger(&self) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = self.m[j][i].conj();
            }
        }
        Self { m }
    }

    pub fn mul(&self, other: &Unitary4) -> Self {
        Self {
            m: matmul(&self.m, &other.m),
        }
    }
}

fn matmul(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn unitarity_deviation(m: &[[Complex64; 4]; 4]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let g: Complex64 = (0..4).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

/// Named gate library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateName {
    Identity,
    Cnot,
    Swap,
    Cz,
    Custom,
}

impl std::str::FromStr for GateName {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "i" => Ok(Self::Identity),
            "cnot" | "cx" => Ok(Self::Cnot),
            "swap" => Ok(Self::Swap),
            "cz" => Ok(Self::Cz),
            "custom" => Ok(Self::Custom),
            _ => Err(LinalgError::UnknownGate(s.to_string())),
        }
    }
}

/// Looks up a gate; `custom` takes its matrix from `payload` and validates it.
pub fn gate(name: GateName, payload: Option<[[Complex64; 4]; 4]>) -> Result<Unitary4, LinalgError> {
    match name {
        GateName::Identity => Ok(Unitary4::identity()),
        GateName::Cnot => Ok(Unitary4::cnot()),
        GateName::Swap => Ok(Unitary4::swap()),
        GateName::Cz => Ok(Unitary4::cz()),
        GateName::Custom => Unitary4::new(payload.ok_or(LinalgError::MissingPayload)?),
    }
}

/// Like [`gate`] but takes the name as a string.
pub fn gate_by_name(
    name: &str,
    payload: Option<[[Complex64; 4]; 4]>,
) -> Result<Unitary4, LinalgError> {
    gate(name.parse()?, payload)
}

/// Deterministic pseudo-random unitary: a complex Gaussian matrix seeded by
/// `seed`, orthonormalized column by column (modified Gram-Schmidt).
pub fn random_unitary(seed: u64) -> Unitary4 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols = [[ZERO; 4]; 4];
    loop {
        for col in cols.iter_mut() {
            for z in col.iter_mut() {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *z = Complex64::new(re, im);
            }
        }
        if gram_schmidt(&mut cols) {
            break;
        }
    }
    let mut m = [[ZERO; 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            m[i][j] = *z;
        }
    }
    Unitary4 { m }
}

/// Orthonormalizes the columns in place. Returns false if a column collapsed.
fn gram_schmidt(cols: &mut [[Complex64; 4]; 4]) -> bool {
    for j in 0..4 {
        // two passes keep the result orthogonal to machine precision
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..4).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                let ck = cols[k];
                for (c, v) in cols[j].iter_mut().zip(ck) {
                    *c -= proj * v;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return false;
        }
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    true
}
