//! Partial transposes, PPT classification and the closed-form PPT polytope.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bell::{density_from_probs, ProbabilityVector};
use crate::error::{Error, Result};
use crate::pauli::{HermitianOperator16, Matrix16};

/// Default tolerance for both eigenvalues and inequality residuals.
pub const PPT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    A,
    B,
    C,
    D,
}

impl Qubit {
    /// Bit of this qubit in a computational index (A is the most significant).
    fn index_bit(self) -> usize {
        1 << (3 - self as usize)
    }
}

/// A nonempty proper subset of the four qubits, stored as an index mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition(u8);

impl Bipartition {
    pub const A: Bipartition = Bipartition(0b1000);
    pub const B: Bipartition = Bipartition(0b0100);
    pub const C: Bipartition = Bipartition(0b0010);
    pub const D: Bipartition = Bipartition(0b0001);
    pub const AB: Bipartition = Bipartition(0b1100);
    pub const AC: Bipartition = Bipartition(0b1010);
    pub const AD: Bipartition = Bipartition(0b1001);

    /// The seven cuts needed to cover all bipartitions up to complement.
    pub const CANONICAL: [Bipartition; 7] = [Self::A, Self::B, Self::C, Self::D, Self::AB, Self::AC, Self::AD];

    pub fn new(qubits: &[Qubit]) -> Result<Self> {
        let mask = qubits.iter().fold(0u8, |m, q| m | q.index_bit() as u8);
        Self::from_mask(mask)
    }

    pub fn from_mask(mask: u8) -> Result<Self> {
        if mask == 0 || mask >= 0b1111 {
            return Err(Error::InvalidBipartition);
        }
        Ok(Self(mask))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub fn complement(self) -> Bipartition {
        Bipartition(!self.0 & 0b1111)
    }

    /// All fourteen nonempty proper subsets.
    pub fn all() -> impl Iterator<Item = Bipartition> {
        (1u8..15).map(Bipartition)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, name) in ['A', 'B', 'C', 'D'].iter().enumerate() {
            if self.0 & (1 << (3 - q)) != 0 {
                write!(f, "{name}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Bipartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bipartition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let mut qubits = Vec::new();
        for c in s.chars() {
            qubits.push(match c.to_ascii_uppercase() {
                'A' => Qubit::A,
                'B' => Qubit::B,
                'C' => Qubit::C,
                'D' => Qubit::D,
                _ => return Err(serde::de::Error::custom(format!("unknown qubit {c:?}"))),
            });
        }
        Bipartition::new(&qubits).map_err(serde::de::Error::custom)
    }
}

/// Transpose the tensor factors listed in `part`.
pub fn partial_transpose(rho: &HermitianOperator16, part: Bipartition) -> HermitianOperator16 {
    let mask = part.0 as usize;
    let src = rho.matrix();
    let out = Matrix16::from_fn(|r, c| {
        let r_src = (r & !mask) | (c & mask);
        let c_src = (c & !mask) | (r & mask);
        src[(r_src, c_src)]
    });
    HermitianOperator16(out)
}

/// One of the four sign patterns of the `Set(p_i, p_j, p_k, p_l)` notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignPattern(pub [i8; 4]);

impl SignPattern {
    /// Row order of the Set notation: the minus sign walks from `l` to `i`.
    pub const ALL: [SignPattern; 4] = [
        SignPattern([1, 1, 1, -1]),
        SignPattern([1, 1, -1, 1]),
        SignPattern([1, -1, 1, 1]),
        SignPattern([-1, 1, 1, 1]),
    ];

    pub fn apply(self, values: [f64; 4]) -> f64 {
        self.0.iter().zip(values).map(|(&s, v)| f64::from(s) * v).sum()
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            f.write_str(if s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl Serialize for SignPattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// 1-based indices `(i, j, k, l)` of one `Set(...)` quad.
pub type InequalityQuad = [usize; 4];

/// The inequality blocks in printed order: T_A, T_B, T_C, T_D, T_AB, T_AC, T_AD.
pub const INEQUALITY_BLOCKS: [(Bipartition, [InequalityQuad; 4]); 7] = [
    (Bipartition::A, [[1, 2, 15, 16], [3, 4, 13, 14], [5, 6, 11, 12], [7, 8, 9, 10]]),
    (Bipartition::B, [[1, 2, 9, 10], [3, 4, 11, 12], [5, 6, 13, 14], [7, 8, 15, 16]]),
    (Bipartition::C, [[1, 2, 5, 6], [3, 4, 7, 8], [9, 10, 13, 14], [11, 12, 15, 16]]),
    (Bipartition::D, [[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12], [13, 14, 15, 16]]),
    (Bipartition::AB, [[1, 2, 7, 8], [3, 4, 5, 6], [9, 10, 15, 16], [11, 12, 13, 14]]),
    (Bipartition::AC, [[1, 2, 11, 12], [3, 4, 9, 10], [5, 6, 15, 16], [7, 8, 13, 14]]),
    (Bipartition::AD, [[1, 2, 13, 14], [3, 4, 15, 16], [5, 6, 9, 10], [7, 8, 11, 12]]),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityResidual {
    pub block: Bipartition,
    pub quad: InequalityQuad,
    pub pattern: SignPattern,
    /// Left-hand side; nonnegative means satisfied.
    pub residual: f64,
}

/// All 112 residuals, in block / quad / pattern order.
pub fn ppt_inequalities(p: &ProbabilityVector) -> Vec<InequalityResidual> {
    let mut out = Vec::with_capacity(112);
    for (block, quads) in INEQUALITY_BLOCKS {
        for quad in quads {
            let values = quad.map(|i| p.p(i));
            for pattern in SignPattern::ALL {
                out.push(InequalityResidual { block, quad, pattern, residual: pattern.apply(values) });
            }
        }
    }
    out
}

/// Smallest of the 112 residuals.
pub fn min_inequality_residual(p: &ProbabilityVector) -> f64 {
    ppt_inequalities(p).iter().map(|r| r.residual).fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptReport {
    pub is_ppt: bool,
    pub min_eigenvalue: f64,
    pub worst_bipartition: Bipartition,
    #[serde(rename = "violated")]
    pub violated_inequalities: Vec<InequalityResidual>,
}

/// Spectral PPT test over the seven canonical partial transposes.
///
/// `violated_inequalities` lists the closed-form inequalities with residual
/// below `-tol`, so a report is self-consistent whenever the two routes agree.
pub fn is_ppt_spectral(p: &ProbabilityVector, tol: f64) -> PptReport {
    let rho = density_from_probs(p);
    let mut min_eigenvalue = f64::INFINITY;
    let mut worst_bipartition = Bipartition::A;
    for part in Bipartition::CANONICAL {
        let lowest = partial_transpose(&rho, part).eigenvalues()[0];
        if lowest < min_eigenvalue {
            min_eigenvalue = lowest;
            worst_bipartition = part;
        }
    }
    let violated_inequalities = ppt_inequalities(p).into_iter().filter(|r| r.residual < -tol).collect();
    PptReport { is_ppt: min_eigenvalue >= -tol, min_eigenvalue, worst_bipartition, violated_inequalities }
}

/// Verdict of the closed-form route alone.
pub fn is_ppt_by_inequalities(p: &ProbabilityVector, tol: f64) -> bool {
    min_inequality_residual(p) >= -tol
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedRegionReport {
    /// `8p1 − 6p2 ≤ 1`
    pub p1_over_p2: bool,
    /// `8p2 − 6p1 ≤ 1`
    pub p2_over_p1: bool,
    /// `p1 + p3 ≤ 1/2`
    pub p1_plus_p3: bool,
}

impl DerivedRegionReport {
    pub fn all(&self) -> bool {
        self.p1_over_p2 && self.p2_over_p1 && self.p1_plus_p3
    }
}

/// Necessary conditions implied by the 112 inequalities, checked to [`PPT_TOL`].
pub fn derived_region_checks(p: &ProbabilityVector) -> DerivedRegionReport {
    let (p1, p2, p3) = (p.p(1), p.p(2), p.p(3));
    DerivedRegionReport {
        p1_over_p2: 8.0 * p1 - 6.0 * p2 <= 1.0 + PPT_TOL,
        p2_over_p1: 8.0 * p2 - 6.0 * p1 <= 1.0 + PPT_TOL,
        p1_plus_p3: p1 + p3 <= 0.5 + PPT_TOL,
    }
}

/// A state built by one of the boundary/separable constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstructedState {
    pub probs: ProbabilityVector,
    /// Separable by the zero-pair argument. The product decomposition itself
    /// is not constructed; only PPT and witness nonnegativity are checked.
    pub certified_separable: bool,
}

/// Zero the pair `(p_{2k−1}, p_{2k})` and split every other pair's weight in
/// half. `pair_weights` lists the remaining seven pairs in ascending order and
/// is normalized to sum to one.
pub fn separable_family_state(zeroed_pair: usize, pair_weights: [f64; 7]) -> Result<ConstructedState> {
    if !(1..=8).contains(&zeroed_pair) {
        return Err(Error::IndexOutOfRange { what: "pair", index: zeroed_pair, min: 1, max: 8 });
    }
    if pair_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidParameters("pair weights must be finite and nonnegative".into()));
    }
    let total: f64 = pair_weights.iter().sum();
    if total <= 0.0 || total.is_nan() {
        return Err(Error::InvalidParameters("pair weights sum to zero".into()));
    }
    let mut p = [0.0; 16];
    let mut weights = pair_weights.iter();
    for pair in 1..=8 {
        if pair == zeroed_pair {
            continue;
        }
        let half = weights.next().expect("seven weights") / total / 2.0;
        p[2 * pair - 2] = half;
        p[2 * pair - 1] = half;
    }
    Ok(ConstructedState { probs: ProbabilityVector::new(p)?, certified_separable: true })
}

/// Boundary families from the feasible-region case analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseFamily {
    /// `p1 = p3 = 1/8`, `p2 = p4 = 0`; the pairs `(p5,p6)..(p15,p16)` have the
    /// given sums, each of which must be at least 1/8 (hence exactly 1/8).
    /// `splits[m]` is the fraction of pair `m`'s sum given to its odd member.
    Case1 { pair_sums: [f64; 6], splits: [f64; 6] },
    /// `p2 = 0`, `p3 = 3p4/4 + 1/8`, `p1 = 1/8 − p4/4`, and every remaining
    /// pair sums to `p1`.
    Case2 { p4: f64, splits: [f64; 6] },
}

const CASE_TOL: f64 = 1e-12;

pub fn case_family_state(family: CaseFamily) -> Result<ConstructedState> {
    let mut p = [0.0; 16];
    let (sums, splits) = match family {
        CaseFamily::Case1 { pair_sums, splits } => {
            if let Some(s) = pair_sums.iter().find(|&&s| s < 0.125 - CASE_TOL || s.is_nan()) {
                return Err(Error::InvalidParameters(format!("case 1 pair sum {s} is below 1/8")));
            }
            let total: f64 = 0.25 + pair_sums.iter().sum::<f64>();
            if (total - 1.0).abs() > CASE_TOL {
                return Err(Error::InvalidParameters(format!("case 1 state sums to {total}, not 1")));
            }
            p[0] = 0.125;
            p[2] = 0.125;
            (pair_sums, splits)
        }
        CaseFamily::Case2 { p4, splits } => {
            if !(0.0..=0.5).contains(&p4) {
                return Err(Error::InvalidParameters(format!("case 2 requires p4 in [0, 1/2], got {p4}")));
            }
            let p1 = 0.125 - p4 / 4.0;
            p[0] = p1;
            p[2] = 0.75 * p4 + 0.125;
            p[3] = p4;
            ([p1; 6], splits)
        }
    };
    for (m, (&sum, &split)) in sums.iter().zip(splits.iter()).enumerate() {
        if !(0.0..=1.0).contains(&split) {
            return Err(Error::InvalidParameters(format!("split {split} outside [0, 1]")));
        }
        p[4 + 2 * m] = sum * split;
        p[5 + 2 * m] = sum * (1.0 - split);
    }
    Ok(ConstructedState { probs: ProbabilityVector::new(p)?, certified_separable: false })
}
