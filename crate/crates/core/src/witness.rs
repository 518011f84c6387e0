//! Linear entanglement witnesses for Bell-diagonal states and their envelope.
//!
//! A witness in the family is
//!
//! ```text
//! W = IIII ± O + [XXXX + s1·XXYY]·A1 + [YYXX + s2·YYYY]·A2
//!              + [XYYX + s3·XYXY]·A3 + [YXYX + s4·YXXY]·A4
//! ```
//!
//! with `s_k = (−1)^{i_k}`, a diagonal z-string `O`, an optional qubit
//! transposition applied to every tensor factor, and amplitudes parametrized by
//! a mixing weight `p` and two angles `ψ1`, `ψ2`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{correlations_from_probs, PauliHamiltonianTerms, ProbabilityVector};
use crate::error::{Error, Result};
use crate::pauli::{HermitianOperator16, PauliLabel, PauliString4};
use crate::sampling::seeded_rng;

/// Tolerance on the amplitude normalization `A0 = B0 = √(h1²+h4²) + √(h2²+h3²)`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::InvalidParameters(format!("sign must be +1 or -1, got {v}")))
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The diagonal z-string added to the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OTerm {
    ZZII,
    IIZZ,
    IZIZ,
    IZZI,
    ZIZI,
    ZIIZ,
    ZZZZ,
}

impl OTerm {
    /// Distinct operators, in printed order.
    pub const ALL: [OTerm; 7] =
        [OTerm::ZZII, OTerm::IIZZ, OTerm::IZIZ, OTerm::IZZI, OTerm::ZIZI, OTerm::ZIIZ, OTerm::ZZZZ];

    /// The printed eight-entry list, which repeats `ZZII` in slot 5.
    pub const PRINTED: [OTerm; 8] = [
        OTerm::ZZII,
        OTerm::IIZZ,
        OTerm::IZIZ,
        OTerm::IZZI,
        OTerm::ZZII,
        OTerm::ZIZI,
        OTerm::ZIIZ,
        OTerm::ZZZZ,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OTerm::ZZII => "ZZII",
            OTerm::IIZZ => "IIZZ",
            OTerm::IZIZ => "IZIZ",
            OTerm::IZZI => "IZZI",
            OTerm::ZIZI => "ZIZI",
            OTerm::ZIIZ => "ZIIZ",
            OTerm::ZZZZ => "ZZZZ",
        }
    }

    pub fn pauli(self) -> PauliString4 {
        self.name().parse().expect("static Pauli string")
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|o| o.name().eq_ignore_ascii_case(s))
    }
}

/// Sign exponents `(i1, i2, i3, i4)` of the bracket partners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilySigns(pub [u8; 4]);

impl FamilySigns {
    pub const BASE: FamilySigns = FamilySigns([0, 0, 0, 0]);
    pub const ALL: [FamilySigns; 4] =
        [FamilySigns([0, 0, 0, 0]), FamilySigns([0, 0, 1, 1]), FamilySigns([1, 1, 0, 0]), FamilySigns([1, 1, 1, 1])];

    pub fn new(i: [u8; 4]) -> Result<Self> {
        let f = FamilySigns(i);
        if Self::ALL.contains(&f) {
            Ok(f)
        } else {
            Err(Error::InvalidParameters(format!("family {i:?} is not one of the four sign tuples")))
        }
    }

    fn partner_sign(self, bracket: usize) -> f64 {
        if self.0[bracket] == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl fmt::Display for FamilySigns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in self.0 {
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Transposition of two tensor factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitPermutation {
    Identity,
    P12,
    P13,
    P14,
    P23,
    P34,
}

impl QubitPermutation {
    pub const ALL: [QubitPermutation; 6] = [
        QubitPermutation::Identity,
        QubitPermutation::P12,
        QubitPermutation::P13,
        QubitPermutation::P14,
        QubitPermutation::P23,
        QubitPermutation::P34,
    ];
    pub const NONTRIVIAL: [QubitPermutation; 5] =
        [QubitPermutation::P12, QubitPermutation::P13, QubitPermutation::P14, QubitPermutation::P23, QubitPermutation::P34];

    pub fn code(self) -> &'static str {
        match self {
            QubitPermutation::Identity => "id",
            QubitPermutation::P12 => "12",
            QubitPermutation::P13 => "13",
            QubitPermutation::P14 => "14",
            QubitPermutation::P23 => "23",
            QubitPermutation::P34 => "34",
        }
    }

    pub fn from_code(s: &str) -> Option<Self> {
        let s = s.trim_start_matches(['p', 'P']);
        Self::ALL.into_iter().find(|q| q.code() == s)
    }

    fn positions(self) -> Option<(usize, usize)> {
        match self {
            QubitPermutation::Identity => None,
            QubitPermutation::P12 => Some((0, 1)),
            QubitPermutation::P13 => Some((0, 2)),
            QubitPermutation::P14 => Some((0, 3)),
            QubitPermutation::P23 => Some((1, 2)),
            QubitPermutation::P34 => Some((2, 3)),
        }
    }

    pub fn apply(self, s: PauliString4) -> PauliString4 {
        match self.positions() {
            Some((a, b)) => s.swapped(a, b),
            None => s,
        }
    }
}

/// The discrete structure of a witness: everything except `(p, ψ1, ψ2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WitnessShape {
    pub family: FamilySigns,
    pub z_sign: Sign,
    pub o_term: OTerm,
    pub perm: QubitPermutation,
}

impl WitnessShape {
    /// `IIII + ZZII + ...` with unflipped brackets and no permutation.
    pub const BASE: WitnessShape = WitnessShape {
        family: FamilySigns::BASE,
        z_sign: Sign::Plus,
        o_term: OTerm::ZZII,
        perm: QubitPermutation::Identity,
    };

    /// Stable identifier, e.g. `f0000_z+_oZZII_pid`.
    pub fn id(&self) -> String {
        format!("f{}_z{}_o{}_p{}", self.family, self.z_sign, self.o_term.name(), self.perm.code())
    }

    pub fn with_params(self, p: f64, psi1: f64, psi2: f64) -> WitnessSpec {
        WitnessSpec { p, psi1, psi2, shape: self }
    }
}

/// One concrete witness of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSpec {
    pub p: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub shape: WitnessShape,
}

impl WitnessSpec {
    pub fn base(p: f64, psi1: f64, psi2: f64) -> Self {
        WitnessShape::BASE.with_params(p, psi1, psi2)
    }

    pub fn id(&self) -> String {
        self.shape.id()
    }

    pub fn amplitudes(&self) -> WitnessAmplitudes {
        WitnessAmplitudes::from_mixing(self.p, self.psi1, self.psi2)
    }
}

#[derive(Serialize, Deserialize)]
struct WitnessSpecRecord {
    p: f64,
    psi1: f64,
    psi2: f64,
    z_sign: i8,
    family: [u8; 4],
    o_term: String,
    perm: String,
    #[serde(default)]
    id: Option<String>,
}

impl Serialize for WitnessSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WitnessSpecRecord {
            p: self.p,
            psi1: self.psi1,
            psi2: self.psi2,
            z_sign: self.shape.z_sign.value() as i8,
            family: self.shape.family.0,
            o_term: self.shape.o_term.name().to_string(),
            perm: self.shape.perm.code().to_string(),
            id: Some(self.id()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WitnessSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = WitnessSpecRecord::deserialize(d)?;
        let z_sign = Sign::from_value(f64::from(r.z_sign)).map_err(D::Error::custom)?;
        let family = FamilySigns::new(r.family).map_err(D::Error::custom)?;
        let o_term = OTerm::from_name(&r.o_term).ok_or_else(|| D::Error::custom("unknown o_term"))?;
        let perm = QubitPermutation::from_code(&r.perm).ok_or_else(|| D::Error::custom("unknown perm"))?;
        let spec = WitnessShape { family, z_sign, o_term, perm }.with_params(r.p, r.psi1, r.psi2);
        if let Some(id) = r.id {
            if id != spec.id() {
                return Err(D::Error::custom(format!("id {id} does not match fields ({})", spec.id())));
            }
        }
        Ok(spec)
    }
}

/// Raw amplitudes of the generic witness `A0·IIII ± B0·O + Σ A_k·bracket_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessAmplitudes {
    pub a0: f64,
    pub b0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl WitnessAmplitudes {
    /// Normalized amplitudes (`A0 = B0 = 1`) for mixing weight `p`.
    pub fn from_mixing(p: f64, psi1: f64, psi2: f64) -> Self {
        let (s1, c1) = psi1.sin_cos();
        let (s2, c2) = psi2.sin_cos();
        let q = 1.0 - p;
        WitnessAmplitudes {
            a0: 1.0,
            b0: 1.0,
            a1: p * c1 + q * c2,
            a2: p * c1 - q * c2,
            a3: p * s1 + q * s2,
            a4: -p * s1 + q * s2,
        }
    }

    /// `(h1, h2, h3, h4) = ((A1+A2)/2, (A1−A2)/2, (A3+A4)/2, (A3−A4)/2)`.
    pub fn h(&self) -> [f64; 4] {
        [
            0.5 * (self.a1 + self.a2),
            0.5 * (self.a1 - self.a2),
            0.5 * (self.a3 + self.a4),
            0.5 * (self.a3 - self.a4),
        ]
    }

    /// `√(h1²+h4²) + √(h2²+h3²)`, the smallest `A0` keeping the witness positive.
    pub fn positivity_bound(&self) -> f64 {
        let [h1, h2, h3, h4] = self.h();
        h1.hypot(h4) + h2.hypot(h3)
    }

    pub fn normalization_residual(&self) -> f64 {
        (self.a0 - self.b0).abs().max((self.a0 - self.positivity_bound()).abs())
    }

    pub fn scaled(&self, k: f64) -> Self {
        WitnessAmplitudes {
            a0: k * self.a0,
            b0: k * self.b0,
            a1: k * self.a1,
            a2: k * self.a2,
            a3: k * self.a3,
            a4: k * self.a4,
        }
    }
}

const BRACKETS: [(&str, &str); 4] = [("XXXX", "XXYY"), ("YYXX", "YYYY"), ("XYYX", "XYXY"), ("YXYX", "YXXY")];

/// Pauli expansion of the (unnormalized) witness.
pub fn witness_terms(shape: &WitnessShape, amp: &WitnessAmplitudes) -> PauliHamiltonianTerms {
    let perm = shape.perm;
    let mut terms = PauliHamiltonianTerms::new()
        .with(amp.a0, PauliString4::IDENTITY)
        .with(shape.z_sign.value() * amp.b0, perm.apply(shape.o_term.pauli()));
    let coeffs = [amp.a1, amp.a2, amp.a3, amp.a4];
    for (k, (lead, partner)) in BRACKETS.iter().enumerate() {
        let lead: PauliString4 = lead.parse().expect("static Pauli string");
        let partner: PauliString4 = partner.parse().expect("static Pauli string");
        terms.add(coeffs[k], perm.apply(lead));
        terms.add(coeffs[k] * shape.family.partner_sign(k), perm.apply(partner));
    }
    terms
}

/// The witness matrix divided by `A0`, so the identity coefficient is one.
pub fn witness_matrix(spec: &WitnessSpec, amp: &WitnessAmplitudes) -> Result<HermitianOperator16> {
    let residual = amp.normalization_residual();
    if residual > NORMALIZATION_TOL * amp.a0.abs().max(1.0) || residual.is_nan() {
        return Err(Error::AmplitudeNormalization { residual });
    }
    Ok(witness_terms(&spec.shape, amp).matrix().scale(1.0 / amp.a0))
}

/// Spherical angles of a pure four-qubit product state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductStateAngles {
    pub theta: [f64; 4],
    pub phi: [f64; 4],
}

impl ProductStateAngles {
    /// `(1, sinθ cosφ, sinθ sinφ, cosθ)` for qubit `q` (0-based).
    pub fn bloch(&self, q: usize) -> [f64; 4] {
        let (st, ct) = self.theta[q].sin_cos();
        let (sp, cp) = self.phi[q].sin_cos();
        [1.0, st * cp, st * sp, ct]
    }

    pub fn from_bloch(n: &[[f64; 3]; 4]) -> Self {
        let mut theta = [0.0; 4];
        let mut phi = [0.0; 4];
        for q in 0..4 {
            let [x, y, z] = n[q];
            theta[q] = z.clamp(-1.0, 1.0).acos();
            phi[q] = y.atan2(x).rem_euclid(TAU);
        }
        ProductStateAngles { theta, phi }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        ProductStateAngles {
            theta: std::array::from_fn(|_| rng.random_range(-1.0f64..=1.0).acos()),
            phi: std::array::from_fn(|_| rng.random_range(0.0..TAU)),
        }
    }
}

/// Witness terms flattened to `(coefficient, Bloch index per qubit)`.
#[derive(Debug, Clone)]
struct CompiledTerms(Vec<(f64, [usize; 4])>);

impl CompiledTerms {
    fn new(shape: &WitnessShape, amp: &WitnessAmplitudes) -> Self {
        CompiledTerms(
            witness_terms(shape, amp)
                .terms()
                .iter()
                .map(|(c, s)| (*c, s.labels().map(PauliLabel::bloch_index)))
                .collect(),
        )
    }

    fn eval(&self, u: &[[f64; 4]; 4]) -> f64 {
        self.0.iter().map(|(c, l)| c * u[0][l[0]] * u[1][l[1]] * u[2][l[2]] * u[3][l[3]]).sum()
    }

    /// The trace is affine in qubit `q`'s Bloch vector: `w[0] + w[1..]·n_q`.
    fn affine_in(&self, q: usize, u: &[[f64; 4]; 4]) -> [f64; 4] {
        let mut w = [0.0; 4];
        for (c, l) in &self.0 {
            let mut prod = *c;
            for (r, ur) in u.iter().enumerate() {
                if r != q {
                    prod *= ur[l[r]];
                }
            }
            w[l[q]] += prod;
        }
        w
    }
}

/// `Tr(W ρ_s)` for the product state with the given angles, evaluated from
/// the Bloch components of each qubit. `W` carries the raw amplitudes.
pub fn product_state_trace(spec: &WitnessSpec, amp: &WitnessAmplitudes, angles: &ProductStateAngles) -> f64 {
    let u: [[f64; 4]; 4] = std::array::from_fn(|q| angles.bloch(q));
    CompiledTerms::new(&spec.shape, amp).eval(&u)
}

/// The base-family trace in its `h`-parametrized trigonometric form.
pub fn reduced_product_trace(z_sign: Sign, amp: &WitnessAmplitudes, angles: &ProductStateAngles) -> f64 {
    let [h1, h2, h3, h4] = amp.h();
    let [t1, t2, t3, t4] = angles.theta;
    let [f1, f2, f3, f4] = angles.phi;
    amp.a0
        + z_sign.value() * amp.b0 * t1.cos() * t2.cos()
        + t1.sin()
            * t2.sin()
            * t3.sin()
            * t4.sin()
            * ((f3 - f4).cos() * (h1 * (f1 - f2).cos() + h2 * (f1 + f2).cos())
                + (f3 + f4).sin() * (h3 * (f1 + f2).sin() + h4 * (f2 - f1).sin()))
}

/// Search effort for [`min_product_trace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultistartBudget {
    /// Random restarts of the local refinement, in addition to the grid seed.
    pub starts: usize,
    /// Angular step of the coarse grid over qubits 1 and 2.
    pub grid_step: f64,
    pub seed: u64,
}

impl Default for MultistartBudget {
    fn default() -> Self {
        MultistartBudget { starts: 64, grid_step: PI / 24.0, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductMinimum {
    pub value: f64,
    pub angles: ProductStateAngles,
}

const MAX_SWEEPS: usize = 2000;

/// Refine by exact block-coordinate descent: the trace is affine in each
/// qubit's Bloch vector, so each qubit's optimum given the others is closed form.
fn refine(terms: &CompiledTerms, u: &mut [[f64; 4]; 4]) -> f64 {
    let mut value = terms.eval(u);
    for _ in 0..MAX_SWEEPS {
        for q in 0..4 {
            let w = terms.affine_in(q, u);
            let norm = (w[1] * w[1] + w[2] * w[2] + w[3] * w[3]).sqrt();
            if norm > 0.0 {
                u[q] = [1.0, -w[1] / norm, -w[2] / norm, -w[3] / norm];
            }
        }
        let next = terms.eval(u);
        let improvement = value - next;
        value = next;
        if improvement <= 1e-16 {
            break;
        }
    }
    value
}

fn grid_axis(step: f64, upper: f64, closed: bool) -> Vec<f64> {
    let n = (upper / step).round() as usize;
    let count = if closed { n + 1 } else { n };
    (0..count).map(|k| k as f64 * step).collect()
}

/// Numerical minimum of `Tr(W ρ_s)` over all pure product states.
///
/// A coarse grid over `(θ1, φ1, θ2, φ2)` with qubits 3 and 4 at
/// `θ = π/2, φ = π/4` seeds one refinement; `budget.starts` random product
/// states seed the others. The smallest refined value is returned.
pub fn min_product_trace(spec: &WitnessSpec, amp: &WitnessAmplitudes, budget: &MultistartBudget) -> ProductMinimum {
    let terms = CompiledTerms::new(&spec.shape, amp);
    let fixed = ProductStateAngles { theta: [FRAC_PI_2; 4], phi: [FRAC_PI_4; 4] };
    let u3 = fixed.bloch(2);
    let u4 = fixed.bloch(3);

    // Restricted to qubits 1 and 2 the trace is a bilinear form u1ᵀ M u2.
    let mut m = [[0.0f64; 4]; 4];
    for (c, l) in &terms.0 {
        m[l[0]][l[1]] += c * u3[l[2]] * u4[l[3]];
    }
    let thetas = grid_axis(budget.grid_step, PI, true);
    let phis = grid_axis(budget.grid_step, TAU, false);
    let points: Vec<(f64, f64, [f64; 4])> = thetas
        .iter()
        .flat_map(|&t| phis.iter().map(move |&f| (t, f)))
        .map(|(t, f)| {
            let a = ProductStateAngles { theta: [t; 4], phi: [f; 4] };
            (t, f, a.bloch(0))
        })
        .collect();
    let mut best_grid = (f64::INFINITY, 0usize, 0usize);
    for (i, (_, _, u1)) in points.iter().enumerate() {
        let v: [f64; 4] = std::array::from_fn(|b| (0..4).map(|a| u1[a] * m[a][b]).sum());
        for (j, (_, _, u2)) in points.iter().enumerate() {
            let val = v[0] * u2[0] + v[1] * u2[1] + v[2] * u2[2] + v[3] * u2[3];
            if val < best_grid.0 {
                best_grid = (val, i, j);
            }
        }
    }
    let (_, i, j) = best_grid;
    let seed_angles = ProductStateAngles {
        theta: [points[i].0, points[j].0, fixed.theta[2], fixed.theta[3]],
        phi: [points[i].1, points[j].1, fixed.phi[2], fixed.phi[3]],
    };

    let mut rng = seeded_rng(budget.seed);
    let mut best = ProductMinimum { value: f64::INFINITY, angles: seed_angles };
    for start in 0..=budget.starts {
        let angles = if start == 0 { seed_angles } else { ProductStateAngles::random(&mut rng) };
        let mut u: [[f64; 4]; 4] = std::array::from_fn(|q| angles.bloch(q));
        let value = refine(&terms, &mut u);
        if value < best.value {
            let n: [[f64; 3]; 4] = std::array::from_fn(|q| [u[q][1], u[q][2], u[q][3]]);
            best = ProductMinimum { value, angles: ProductStateAngles::from_bloch(&n) };
        }
    }
    best
}

/// `Tr(W ρ)` for a Bell-diagonal `ρ`, from its Pauli correlations.
///
/// Every string of the family stays inside the sixteen diagonal strings under
/// the allowed permutations; anything else would contribute zero.
pub fn linear_trace_with(shape: &WitnessShape, amp: &WitnessAmplitudes, probs: &ProbabilityVector) -> f64 {
    let r = correlations_from_probs(probs);
    let total: f64 = witness_terms(shape, amp).terms().iter().map(|(c, s)| c * r.expectation(s)).sum();
    total / amp.a0
}

pub fn linear_trace(spec: &WitnessSpec, probs: &ProbabilityVector) -> f64 {
    linear_trace_with(&spec.shape, &spec.amplitudes(), probs)
}

/// The four differences the envelope depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeComponents {
    /// `p11 − p12 + p13 − p14`, the `cos ψ1` coefficient.
    pub x1: f64,
    /// `p9 − p10 − p15 + p16`, the `sin ψ1` coefficient.
    pub y1: f64,
    /// `p3 − p4 + p5 − p6`, the `cos ψ2` coefficient.
    pub x2: f64,
    /// `p1 − p2 − p7 + p8`; enters with `−sin ψ2`.
    pub y2: f64,
    /// `1 − 2 Σ_{j=9}^{16} p_j`.
    pub z: f64,
}

pub fn envelope_components(probs: &ProbabilityVector) -> EnvelopeComponents {
    let p = |i| probs.p(i);
    EnvelopeComponents {
        x1: p(11) - p(12) + p(13) - p(14),
        y1: p(9) - p(10) - p(15) + p(16),
        x2: p(3) - p(4) + p(5) - p(6),
        y2: p(1) - p(2) - p(7) + p(8),
        z: 1.0 - 2.0 * (9..=16).map(p).sum::<f64>(),
    }
}

/// Base-family `Tr(Wρ)` written directly in the `p_i`.
pub fn printed_linear_trace(p: f64, psi1: f64, psi2: f64, z_sign: Sign, probs: &ProbabilityVector) -> f64 {
    let c = envelope_components(probs);
    1.0 + z_sign.value() * c.z
        + 4.0 * p * (c.x1 * psi1.cos() + c.y1 * psi1.sin())
        + 4.0 * (1.0 - p) * (c.x2 * psi2.cos() - c.y2 * psi2.sin())
}

/// A stationary angle of the linear trace, or a degenerate (flat) direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StationaryAngle {
    /// Both ratio components vanish; the term does not depend on the angle.
    Degenerate,
    /// `principal` is the quadrant-aware inverse tangent of the ratio, in
    /// `(−π, π]`. It maximizes its term; `principal + π` minimizes it.
    Angle { principal: f64 },
}

impl StationaryAngle {
    fn from_ratio(num: f64, den: f64) -> Self {
        if num == 0.0 && den == 0.0 {
            StationaryAngle::Degenerate
        } else {
            StationaryAngle::Angle { principal: num.atan2(den) }
        }
    }

    pub fn principal(&self) -> Option<f64> {
        match *self {
            StationaryAngle::Angle { principal } => Some(principal),
            StationaryAngle::Degenerate => None,
        }
    }

    /// The minimizing stationary angle in `[0, 2π)`; zero when degenerate.
    pub fn minimizing(&self) -> f64 {
        match *self {
            StationaryAngle::Angle { principal } => (principal + PI).rem_euclid(TAU),
            StationaryAngle::Degenerate => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryAngles {
    pub psi1: StationaryAngle,
    pub psi2: StationaryAngle,
}

/// `tan ψ1 = y1/x1` and `tan ψ2 = −y2/x2`.
pub fn envelope_stationary_angles(probs: &ProbabilityVector) -> StationaryAngles {
    let c = envelope_components(probs);
    StationaryAngles {
        psi1: StationaryAngle::from_ratio(c.y1, c.x1),
        psi2: StationaryAngle::from_ratio(-c.y2, c.x2),
    }
}

/// `a_i = +1` when `ψ` lies in `[2πk − π/2, 2πk + π/2]`, else `−1`.
/// Boundary angles resolve to `+1`.
pub fn quadrant_selector(psi: f64) -> Sign {
    let reduced = (psi + PI).rem_euclid(TAU) - PI;
    if reduced.abs() <= FRAC_PI_2 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Sign function with `sgn(0) = 0`.
pub fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Selectors `(a0, a1, a2)` of the signed envelope expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignSelectors {
    pub a0: Sign,
    pub a1: Sign,
    pub a2: Sign,
}

/// Which form of the nonlinear witness to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeSigns {
    /// Both radicals enter negatively: the minimum of the linear family.
    Minimizing { a0: Sign },
    /// The signed expression `a_i · R_i · sgn(x_i)` with `sgn(0) = 0`.
    Printed(SignSelectors),
}

/// `1 + a0·z − 4p·R1 − 4(1−p)·R2`: the minimum over `ψ1, ψ2` of the
/// base-family linear trace.
pub fn envelope_trace(probs: &ProbabilityVector, p: f64, a0: Sign) -> f64 {
    let c = envelope_components(probs);
    1.0 + a0.value() * c.z - 4.0 * p * c.x1.hypot(c.y1) - 4.0 * (1.0 - p) * c.x2.hypot(c.y2)
}

/// `1 + a0·z + 4p·a1·R1·sgn(x1) + 4(1−p)·a2·R2·sgn(x2)`.
pub fn envelope_trace_signed(probs: &ProbabilityVector, p: f64, sel: SignSelectors) -> f64 {
    let c = envelope_components(probs);
    1.0 + sel.a0.value() * c.z
        + 4.0 * p * sel.a1.value() * c.x1.hypot(c.y1) * sgn(c.x1)
        + 4.0 * (1.0 - p) * sel.a2.value() * c.x2.hypot(c.y2) * sgn(c.x2)
}

pub fn envelope_trace_with(probs: &ProbabilityVector, p: f64, signs: EnvelopeSigns) -> f64 {
    match signs {
        EnvelopeSigns::Minimizing { a0 } => envelope_trace(probs, p, a0),
        EnvelopeSigns::Printed(sel) => envelope_trace_signed(probs, p, sel),
    }
}

/// Mixing weight of the worked example.
pub const EXAMPLE_MIXING: f64 = 0.1;

/// The example slice: `p_i = 0` for `i ≥ 4` and `p3 = 1 − p1 − p2`.
pub fn example_state(p1: f64, p2: f64) -> Result<ProbabilityVector> {
    let mut p = [0.0; 16];
    p[0] = p1;
    p[1] = p2;
    p[2] = 1.0 - p1 - p2;
    ProbabilityVector::new(p)
}

/// Linear trace on the example slice for witness angle `ψ2` (with `p = 1/10`
/// and the plus sign): `2 + 18/5 (p2−p1) sin ψ2 + 18/5 (1−p1−p2) cos ψ2`.
pub fn example_linear_trace(psi2: f64, p1: f64, p2: f64) -> f64 {
    2.0 + 3.6 * (p2 - p1) * psi2.sin() + 3.6 * (1.0 - p1 - p2) * psi2.cos()
}

/// The zero line of [`example_linear_trace`] solved for `p2`.
/// `None` where the line is parallel to the `p2` axis.
pub fn example_linear_witness_p2(psi2: f64, p1: f64) -> Option<f64> {
    slice_linear_witness_p2(EXAMPLE_MIXING, Sign::Plus, psi2, p1)
}

/// Zero line of the base-family linear trace on the example slice for general
/// `(p, a0)`:
/// `p2 = ((1+a0)/(4(1−p)) + (1−p1) cos ψ2 − p1 sin ψ2) / (cos ψ2 − sin ψ2)`.
pub fn slice_linear_witness_p2(p: f64, a0: Sign, psi2: f64, p1: f64) -> Option<f64> {
    let (s, c) = psi2.sin_cos();
    let den = c - s;
    if den.abs() < 1e-15 || p >= 1.0 || p.is_nan() {
        return None;
    }
    let offset = (1.0 + a0.value()) / (4.0 * (1.0 - p));
    Some((offset + (1.0 - p1) * c - p1 * s) / den)
}

/// Left end of both branch intervals, `(9 − 5√2)/18`.
pub fn example_branch_start() -> f64 {
    (9.0 - 5.0 * 2f64.sqrt()) / 18.0
}

/// Right end of the lower branch.
pub const EXAMPLE_LOWER_END: f64 = 7.0 / 9.0;
/// Right end of the upper branch.
pub const EXAMPLE_UPPER_END: f64 = 2.0 / 9.0;

const BRANCH_EPS: f64 = 1e-12;

fn example_radical(p1: f64) -> f64 {
    let radicand = 324.0 * p1 * (1.0 - p1) - 31.0;
    if radicand < 0.0 && radicand > -BRANCH_EPS * 324.0 {
        0.0
    } else {
        radicand.sqrt()
    }
}

/// `p2 = (9 − √(324 p1(1−p1) − 31))/18` on its interval.
pub fn example_lower_branch(p1: f64) -> Option<f64> {
    let (lo, hi) = (example_branch_start(), EXAMPLE_LOWER_END);
    (p1 >= lo - BRANCH_EPS && p1 <= hi + BRANCH_EPS).then(|| (9.0 - example_radical(p1)) / 18.0)
}

/// `p2 = (9 + √(324 p1(1−p1) − 31))/18` on its interval.
pub fn example_upper_branch(p1: f64) -> Option<f64> {
    let (lo, hi) = (example_branch_start(), EXAMPLE_UPPER_END);
    (p1 >= lo - BRANCH_EPS && p1 <= hi + BRANCH_EPS).then(|| (9.0 + example_radical(p1)) / 18.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeCurvePoint {
    pub p1: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// Both envelope branches of the worked example at each `p1`.
pub fn example_envelope_curve(p1_grid: &[f64]) -> Result<Vec<EnvelopeCurvePoint>> {
    p1_grid
        .iter()
        .map(|&p1| {
            let lower = example_lower_branch(p1);
            let upper = example_upper_branch(p1);
            if lower.is_none() && upper.is_none() {
                return Err(Error::OutsideBranchIntervals(p1));
            }
            Ok(EnvelopeCurvePoint { p1, lower, upper })
        })
        .collect()
}

/// Zero locus of the minimizing envelope on the example slice for general
/// `(p, a0)`: a circle `(1−p1−p2)² + (p2−p1)² = ρ²` with `ρ = (1+a0)/(4(1−p))`.
/// Returns the lower and upper `p2` where they lie in the slice.
pub fn slice_envelope_branches(p: f64, a0: Sign, p1: f64) -> (Option<f64>, Option<f64>) {
    if p >= 1.0 || p.is_nan() {
        return (None, None);
    }
    let rho = (1.0 + a0.value()) / (4.0 * (1.0 - p));
    let mut radicand = 0.5 * rho * rho - (p1 - 0.5).powi(2);
    if radicand < 0.0 && radicand > -BRANCH_EPS {
        radicand = 0.0;
    }
    if radicand < 0.0 || !(0.0..=1.0).contains(&p1) {
        return (None, None);
    }
    let r = radicand.sqrt();
    let valid = |p2: f64| (p2 >= -BRANCH_EPS && p1 + p2 <= 1.0 + BRANCH_EPS).then_some(p2.max(0.0));
    (valid(0.5 - r), valid(0.5 + r))
}

/// How to read the printed family when enumerating it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyReading {
    /// Seven distinct z-strings, all six permutations (including identity).
    Deduplicated,
    /// Eight printed z-string slots (with the repeat) and the five listed
    /// transpositions: the literal 64 × 5 count.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyTemplate {
    pub shape: WitnessShape,
    pub id: String,
    /// 1-based slot in the printed z-string list (literal reading only).
    pub printed_slot: Option<usize>,
}

/// Enumerate the family in deterministic order: family tuple, z sign,
/// z-string, permutation.
pub fn enumerate_family(reading: FamilyReading) -> Vec<FamilyTemplate> {
    let mut out = Vec::new();
    for family in FamilySigns::ALL {
        for z_sign in [Sign::Plus, Sign::Minus] {
            match reading {
                FamilyReading::Deduplicated => {
                    for o_term in OTerm::ALL {
                        for perm in QubitPermutation::ALL {
                            let shape = WitnessShape { family, z_sign, o_term, perm };
                            out.push(FamilyTemplate { shape, id: shape.id(), printed_slot: None });
                        }
                    }
                }
                FamilyReading::Literal => {
                    for (slot, o_term) in OTerm::PRINTED.into_iter().enumerate() {
                        for perm in QubitPermutation::NONTRIVIAL {
                            let shape = WitnessShape { family, z_sign, o_term, perm };
                            let id = format!("{}_j{}", shape.id(), slot + 1);
                            out.push(FamilyTemplate { shape, id, printed_slot: Some(slot + 1) });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Worst product-state trace found for one family member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberPositivity {
    pub id: String,
    pub min_trace: f64,
    /// Parameters of the draw that produced `min_trace`.
    pub p: f64,
    pub psi1: f64,
    pub psi2: f64,
}

/// Minimize the product-state trace of every family member at `draws` random
/// `(p, ψ1, ψ2)`, each uniform on `[0,1] × [0,2π)²`.
///
/// Parameters come from `budget.seed`; each minimization gets its own
/// derived seed so results do not depend on iteration order.
pub fn family_positivity(reading: FamilyReading, draws: usize, budget: &MultistartBudget) -> Vec<MemberPositivity> {
    let mut rng = seeded_rng(budget.seed);
    let mut calls = 0u64;
    enumerate_family(reading)
        .into_iter()
        .map(|t| {
            let mut worst = MemberPositivity { id: t.id, min_trace: f64::INFINITY, p: 0.0, psi1: 0.0, psi2: 0.0 };
            for _ in 0..draws {
                let (p, psi1, psi2) = (rng.random::<f64>(), rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
                let spec = t.shape.with_params(p, psi1, psi2);
                calls += 1;
                let local = MultistartBudget { seed: budget.seed.wrapping_add(calls), ..*budget };
                let min = min_product_trace(&spec, &spec.amplitudes(), &local);
                if min.value < worst.min_trace {
                    worst = MemberPositivity { min_trace: min.value, p, psi1, psi2, ..worst };
                }
            }
            worst
        })
        .collect()
}
