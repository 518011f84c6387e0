//! The generalized four-qubit Bell basis and Bell-diagonal states.
//!
//! Indices of basis states, probabilities and energies are 1-based in every
//! public accessor (`p(1)` is the GHZ weight); storage is 0-based.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{HermitianOperator16, PauliString4, Vector16, C64};

/// Tolerance on a negative probability component.
pub const NEGATIVE_TOL: f64 = 1e-12;
/// Tolerance on the deviation of the sum of probabilities from one.
pub const SUM_TOL: f64 = 1e-9;
/// Largest Bell-basis off-diagonal element tolerated in a "diagonal" Hamiltonian.
pub const OFF_DIAGONAL_TOL: f64 = 1e-10;

/// Computational index of the `|0...>` half of Bell state `i` (1-based).
fn low_index(i: usize) -> usize {
    (i - 1) / 2
}

/// `|psi_i> = (|k> ± |15-k>)/√2` with `+` for odd `i` and `−` for even `i`.
pub fn bell_basis_vector(i: usize) -> Result<Vector16> {
    if !(1..=16).contains(&i) {
        return Err(Error::IndexOutOfRange { what: "Bell basis", index: i, min: 1, max: 16 });
    }
    let lo = low_index(i);
    let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
    let mut v = Vector16::zeros();
    v[lo] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[15 - lo] = C64::new(sign * FRAC_1_SQRT_2, 0.0);
    Ok(v)
}

/// All sixteen basis vectors in order `psi_1..psi_16`.
pub fn bell_basis() -> [Vector16; 16] {
    std::array::from_fn(|k| bell_basis_vector(k + 1).expect("index in range"))
}

/// Pauli strings paired with `r_1..r_15`, in the order of the ρ expansion.
pub const CORRELATION_STRINGS: [&str; 15] = [
    "IZZI", "IZIZ", "IIZZ", "ZIIZ", "ZIZI", "ZZII", "ZZZZ", "XXXX", "XYYX", "XYXY", "XXYY", "YXYX",
    "YXXY", "YYXX", "YYYY",
];

/// Signs of `p_1..p_16` in each `r_k`. Row `k-1` is `r_k`.
const SIGN_ROWS: [&str; 15] = [
    "++++--------++++",
    "++--++----++--++",
    "++----++++----++",
    "++--++--++--++--",
    "++++----++++----",
    "++++++++--------",
    "++----++--++++--",
    "+-+-+-+-+-+-+-+-",
    "-+-++-+-+-+--+-+",
    "-++--++-+--++--+",
    "-++-+--+-++-+--+",
    "-+-++-+--+-++-+-",
    "-++--++--++--++-",
    "-+-+-+-++-+-+-+-",
    "+--+-++--++-+--+",
];

/// The ±1 sign table: `sign_table()[k][i]` is the sign of `p_{i+1}` in `r_{k+1}`.
pub fn sign_table() -> [[f64; 16]; 15] {
    std::array::from_fn(|k| {
        let row = SIGN_ROWS[k].as_bytes();
        std::array::from_fn(|i| if row[i] == b'+' { 1.0 } else { -1.0 })
    })
}

/// Parsed [`CORRELATION_STRINGS`].
pub fn correlation_strings() -> [PauliString4; 15] {
    CORRELATION_STRINGS.map(|s| s.parse().expect("static Pauli string"))
}

/// Position (1-based) of `s` among the correlation strings, if any.
pub fn correlation_index(s: &PauliString4) -> Option<usize> {
    correlation_strings().iter().position(|c| c == s).map(|k| k + 1)
}

/// Weights `p_1..p_16` of a Bell-diagonal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbabilityVector([f64; 16]);

impl ProbabilityVector {
    pub fn new(p: [f64; 16]) -> Result<Self> {
        for (k, &v) in p.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidProbabilities(format!("p{} is not finite", k + 1)));
            }
            if v < -NEGATIVE_TOL {
                return Err(Error::InvalidProbabilities(format!("p{} = {v} is negative", k + 1)));
            }
            if v > 1.0 + NEGATIVE_TOL {
                return Err(Error::InvalidProbabilities(format!("p{} = {v} exceeds 1", k + 1)));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidProbabilities(format!("components sum to {sum}, not 1")));
        }
        Ok(Self(p))
    }

    pub fn from_slice(p: &[f64]) -> Result<Self> {
        let arr: [f64; 16] = p
            .try_into()
            .map_err(|_| Error::InvalidProbabilities(format!("expected 16 values, got {}", p.len())))?;
        Self::new(arr)
    }

    pub fn uniform() -> Self {
        Self([1.0 / 16.0; 16])
    }

    /// Weight one on basis state `i` (1-based).
    pub fn pure(i: usize) -> Result<Self> {
        if !(1..=16).contains(&i) {
            return Err(Error::IndexOutOfRange { what: "Bell basis", index: i, min: 1, max: 16 });
        }
        let mut p = [0.0; 16];
        p[i - 1] = 1.0;
        Ok(Self(p))
    }

    /// `p_i`, 1-based.
    pub fn p(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    pub fn as_array(&self) -> &[f64; 16] {
        &self.0
    }

    /// `λ·self + (1−λ)·other` for `λ ∈ [0,1]`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        Self::new(std::array::from_fn(|k| lambda * self.0[k] + (1.0 - lambda) * other.0[k]))
    }
}

impl<'de> Deserialize<'de> for ProbabilityVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<f64>::deserialize(d)?;
        Self::from_slice(&raw).map_err(serde::de::Error::custom)
    }
}

/// Pauli correlations `r_1..r_15`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorrelationVector(pub [f64; 15]);

impl CorrelationVector {
    /// `r_k`, 1-based.
    pub fn r(&self, k: usize) -> f64 {
        self.0[k - 1]
    }

    /// Expectation `Tr(ρ·s)` of any Pauli string on the Bell-diagonal state
    /// these correlations describe. Strings outside the diagonal set vanish.
    pub fn expectation(&self, s: &PauliString4) -> f64 {
        if s.is_identity() {
            return 1.0;
        }
        correlation_index(s).map_or(0.0, |k| self.r(k))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `ρ = Σ p_i |psi_i><psi_i|`.
pub fn density_from_probs(p: &ProbabilityVector) -> HermitianOperator16 {
    // Each projector only touches the 2x2 block on {k, 15-k}.
    let mut m = HermitianOperator16::zeros();
    for pair in 0..8 {
        let plus = p.0[2 * pair];
        let minus = p.0[2 * pair + 1];
        let lo = pair;
        let hi = 15 - pair;
        let diag = C64::new(0.5 * (plus + minus), 0.0);
        let off = C64::new(0.5 * (plus - minus), 0.0);
        m.0[(lo, lo)] = diag;
        m.0[(hi, hi)] = diag;
        m.0[(lo, hi)] = off;
        m.0[(hi, lo)] = off;
    }
    m
}

/// `r_k` as signed sums of the `p_i` from the sign table.
pub fn correlations_from_probs(p: &ProbabilityVector) -> CorrelationVector {
    let table = sign_table();
    CorrelationVector(std::array::from_fn(|k| table[k].iter().zip(p.0.iter()).map(|(s, v)| s * v).sum()))
}

/// `r_k = Tr(ρ · P_k)` for the correlation strings.
pub fn correlations_via_trace(rho: &HermitianOperator16) -> Result<CorrelationVector> {
    let rho = HermitianOperator16::try_new(*rho.matrix())?;
    let strings = correlation_strings();
    Ok(CorrelationVector(std::array::from_fn(|k| rho.trace_product(&strings[k].matrix()))))
}

/// Invert the sign table: `p_i = (1 + Σ_k s_{k,i} r_k) / 16`.
///
/// The 16x16 matrix formed by an all-ones row and the sign table has
/// orthogonal rows, so its inverse is its transpose over 16.
pub fn probs_from_correlations(r: &CorrelationVector) -> [f64; 16] {
    let table = sign_table();
    std::array::from_fn(|i| (1.0 + (0..15).map(|k| table[k][i] * r.0[k]).sum::<f64>()) / 16.0)
}

/// Energies `E_1..E_16` of a Hamiltonian diagonal in the Bell basis (k_B = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct EnergySpectrum([f64; 16]);

impl EnergySpectrum {
    pub fn new(e: [f64; 16]) -> Result<Self> {
        if let Some(k) = e.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEnergy { index: k + 1, value: e[k] });
        }
        Ok(Self(e))
    }

    /// `E_i`, 1-based.
    pub fn e(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    pub fn as_array(&self) -> &[f64; 16] {
        &self.0
    }

    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::new(self.0.map(|e| e + c))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl<'de> Deserialize<'de> for EnergySpectrum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = <[f64; 16]>::deserialize(d)?;
        Self::new(raw).map_err(serde::de::Error::custom)
    }
}

/// Boltzmann weights `exp(−(E_i − E_min)/T)` together with `E_min`.
pub(crate) fn shifted_boltzmann_weights(e: &EnergySpectrum, t: f64) -> Result<([f64; 16], f64)> {
    if t <= 0.0 || t.is_nan() {
        return Err(Error::NonPositiveTemperature(t));
    }
    let e_min = e.min();
    Ok((e.0.map(|v| (-(v - e_min) / t).exp()), e_min))
}

/// Thermal weights `p_i = exp(−E_i/T)/Z`, computed after subtracting `min E_i`.
pub fn energies_to_probs(e: &EnergySpectrum, t: f64) -> Result<ProbabilityVector> {
    let (w, _) = shifted_boltzmann_weights(e, t)?;
    let z: f64 = w.iter().sum();
    Ok(ProbabilityVector(w.map(|v| v / z)))
}

/// A real linear combination of Pauli strings. Repeated strings are merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliHamiltonianTerms {
    terms: Vec<(f64, PauliString4)>,
}

impl PauliHamiltonianTerms {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, coeff: f64, s: PauliString4) {
        match self.terms.iter_mut().find(|(_, t)| *t == s) {
            Some((c, _)) => *c += coeff,
            None => self.terms.push((coeff, s)),
        }
    }

    pub fn with(mut self, coeff: f64, s: PauliString4) -> Self {
        self.add(coeff, s);
        self
    }

    pub fn terms(&self) -> &[(f64, PauliString4)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn matrix(&self) -> HermitianOperator16 {
        self.terms.iter().fold(HermitianOperator16::zeros(), |acc, (c, s)| &acc + &(&s.matrix() * *c))
    }
}

impl FromIterator<(f64, PauliString4)> for PauliHamiltonianTerms {
    fn from_iter<I: IntoIterator<Item = (f64, PauliString4)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (c, s) in iter {
            out.add(c, s);
        }
        out
    }
}

/// Diagonalize a Pauli-term Hamiltonian in the Bell basis.
///
/// Fails with the first `(i, j)` pair whose Bell-basis matrix element exceeds
/// [`OFF_DIAGONAL_TOL`] in modulus.
pub fn pauli_terms_to_energies(terms: &PauliHamiltonianTerms) -> Result<EnergySpectrum> {
    let h = terms.matrix();
    let basis = bell_basis();
    let mut energies = [0.0; 16];
    for i in 0..16 {
        let hv = h.matrix() * basis[i];
        for (j, bj) in basis.iter().enumerate() {
            let elem = (bj.adjoint() * hv)[(0, 0)];
            if i == j {
                energies[i] = elem.re;
            } else if elem.norm() > OFF_DIAGONAL_TOL {
                return Err(Error::NotBellDiagonal { i: i + 1, j: j + 1, magnitude: elem.norm() });
            }
        }
    }
    EnergySpectrum::new(energies)
}
