//! Four-qubit Pauli algebra on dense 16x16 complex matrices.
//!
//! Qubit A is the leftmost tensor factor and the most significant bit of the
//! computational index, so basis state `|abcd>` sits at `8a + 4b + 2c + d`.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{Complex, SMatrix, SVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Matrix2 = SMatrix<C64, 2, 2>;
pub type Matrix16 = SMatrix<C64, 16, 16>;
pub type Vector16 = SVector<C64, 16>;

/// Entrywise tolerance used to decide whether a matrix is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I_UNIT: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub const ALL: [PauliLabel; 4] = [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    /// The 2x2 matrix of this label. Entries are exact.
    pub fn matrix(self) -> Matrix2 {
        match self {
            PauliLabel::I => Matrix2::new(ONE, ZERO, ZERO, ONE),
            PauliLabel::X => Matrix2::new(ZERO, ONE, ONE, ZERO),
            PauliLabel::Y => Matrix2::new(ZERO, -I_UNIT, I_UNIT, ZERO),
            PauliLabel::Z => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(PauliLabel::I),
            'X' => Some(PauliLabel::X),
            'Y' => Some(PauliLabel::Y),
            'Z' => Some(PauliLabel::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLabel::I => 'I',
            PauliLabel::X => 'X',
            PauliLabel::Y => 'Y',
            PauliLabel::Z => 'Z',
        }
    }

    /// Position of this label in a Bloch 4-vector `(1, x, y, z)`.
    pub fn bloch_index(self) -> usize {
        self as usize
    }
}

/// A tensor monomial `P_A ⊗ P_B ⊗ P_C ⊗ P_D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString4(pub [PauliLabel; 4]);

impl PauliString4 {
    pub const IDENTITY: PauliString4 = PauliString4([PauliLabel::I; 4]);

    pub fn labels(&self) -> [PauliLabel; 4] {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Swap the tensor factors at (zero-based) positions `a` and `b`.
    pub fn swapped(&self, a: usize, b: usize) -> PauliString4 {
        let mut labels = self.0;
        labels.swap(a, b);
        PauliString4(labels)
    }

    /// Dense Kronecker product in the order A⊗B⊗C⊗D.
    pub fn matrix(&self) -> HermitianOperator16 {
        let factors = self.0.map(PauliLabel::matrix);
        let m = Matrix16::from_fn(|r, c| {
            let mut acc = ONE;
            for (q, f) in factors.iter().enumerate() {
                let shift = 3 - q;
                acc *= f[((r >> shift) & 1, (c >> shift) & 1)];
                if acc == ZERO {
                    break;
                }
            }
            acc
        });
        HermitianOperator16(m)
    }
}

impl fmt::Display for PauliString4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParsePauliError {
    #[error("expected 4 labels, got {0}")]
    WrongLength(usize),
    #[error("invalid Pauli label {found:?} at position {position}")]
    BadLabel { position: usize, found: char },
}

/// Parse a four-character Pauli string such as `"ZZII"` (case-insensitive).
pub fn parse_pauli_string(text: &str) -> Result<PauliString4, ParsePauliError> {
    let n = text.chars().count();
    if n != 4 {
        return Err(ParsePauliError::WrongLength(n));
    }
    let mut labels = [PauliLabel::I; 4];
    for (position, c) in text.chars().enumerate() {
        labels[position] =
            PauliLabel::from_char(c).ok_or(ParsePauliError::BadLabel { position: position + 1, found: c })?;
    }
    Ok(PauliString4(labels))
}

impl FromStr for PauliString4 {
    type Err = ParsePauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pauli_string(s)
    }
}

impl Serialize for PauliString4 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString4 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Dense 16x16 complex operator that is Hermitian by construction.
///
/// Only the algebra in this crate builds these directly; external matrices go
/// through [`HermitianOperator16::try_new`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator16(pub(crate) Matrix16);

impl HermitianOperator16 {
    pub fn try_new(m: Matrix16) -> Result<Self> {
        let asym = max_asymmetry(&m);
        if asym > HERMITIAN_TOL {
            return Err(Error::NonHermitian { max_asymmetry: asym });
        }
        Ok(Self(m))
    }

    pub fn zeros() -> Self {
        Self(Matrix16::zeros())
    }

    pub fn identity() -> Self {
        Self(Matrix16::identity())
    }

    /// Rank-one projector `|v><v|`.
    pub fn projector(v: &Vector16) -> Self {
        Self(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix16 {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix16 {
        self.0
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0 * C64::new(k, 0.0))
    }

    /// Real part of the trace (the imaginary part is zero for Hermitian input).
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &HermitianOperator16) -> f64 {
        let mut acc = ZERO;
        for r in 0..16 {
            for c in 0..16 {
                acc += self.0[(r, c)] * other.0[(c, r)];
            }
        }
        acc.re
    }

    /// `<v|M|v>`
    pub fn expectation(&self, v: &Vector16) -> f64 {
        (v.adjoint() * self.0 * v)[(0, 0)].re
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator16) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> [f64; 16] {
        sorted_eigenvalues(&self.0)
    }
}

impl Add for &HermitianOperator16 {
    type Output = HermitianOperator16;
    fn add(self, rhs: Self) -> HermitianOperator16 {
        HermitianOperator16(self.0 + rhs.0)
    }
}

impl Sub for &HermitianOperator16 {
    type Output = HermitianOperator16;
    fn sub(self, rhs: Self) -> HermitianOperator16 {
        HermitianOperator16(self.0 - rhs.0)
    }
}

impl Mul<f64> for &HermitianOperator16 {
    type Output = HermitianOperator16;
    fn mul(self, k: f64) -> HermitianOperator16 {
        self.scale(k)
    }
}

/// Largest entrywise modulus of `M - M†`.
pub fn max_asymmetry(m: &Matrix16) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..16 {
        for c in r..16 {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

fn sorted_eigenvalues(m: &Matrix16) -> [f64; 16] {
    let eig = SymmetricEigen::new(*m);
    let mut out = [0.0; 16];
    out.copy_from_slice(eig.eigenvalues.as_slice());
    out.sort_by(f64::total_cmp);
    out
}

/// Ascending eigenvalues of a Hermitian 16x16 matrix.
pub fn hermitian_eigenvalues(m: &Matrix16) -> Result<[f64; 16]> {
    let asym = max_asymmetry(m);
    if asym > HERMITIAN_TOL {
        return Err(Error::NonHermitian { max_asymmetry: asym });
    }
    Ok(sorted_eigenvalues(m))
}

/// Eigenpairs of a Hermitian 16x16 matrix, ascending by eigenvalue.
/// Column `k` of the returned matrix is the eigenvector for value `k`.
pub fn hermitian_eigen(m: &Matrix16) -> Result<([f64; 16], Matrix16)> {
    let asym = max_asymmetry(m);
    if asym > HERMITIAN_TOL {
        return Err(Error::NonHermitian { max_asymmetry: asym });
    }
    let eig = SymmetricEigen::new(*m);
    let mut order: Vec<usize> = (0..16).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = [0.0; 16];
    let mut vectors = Matrix16::zeros();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}
