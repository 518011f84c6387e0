//! Thermal Bell-diagonal states: Boltzmann weights, the envelope trace as a
//! function of temperature, threshold temperatures and GHZ fidelity.
//!
//! Units have `k_B = 1`.

use serde::Serialize;

use crate::bell::{
    bell_basis_vector, density_from_probs, energies_to_probs, shifted_boltzmann_weights, EnergySpectrum,
    PauliHamiltonianTerms, ProbabilityVector,
};
use crate::error::{Error, Result};
use crate::pauli::PauliString4;
use crate::witness::{envelope_trace_with, EnvelopeSigns, Sign};

/// Where the sixteen energies come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalModel {
    Spectrum(EnergySpectrum),
    /// The pair-coupling plus four-body-field Hamiltonian with couplings `J`, `h`.
    Couplings { j: f64, h: f64 },
}

impl ThermalModel {
    pub fn spectrum(&self) -> Result<EnergySpectrum> {
        match *self {
            ThermalModel::Spectrum(e) => Ok(e),
            ThermalModel::Couplings { j, h } => heisenberg_like_energies(j, h),
        }
    }

    pub fn probs(&self, t: f64) -> Result<ProbabilityVector> {
        energies_to_probs(&self.spectrum()?, t)
    }
}

const PAIR_TERMS: [&str; 6] = ["ZZII", "IZZI", "IIZZ", "ZIIZ", "ZIZI", "IZIZ"];
const FIELD_TERMS: [&str; 3] = ["XXXX", "YYYY", "ZZZZ"];

/// `H = −J Σ_pairs Z_a Z_b + h (XXXX + YYYY + ZZZZ)` as Pauli terms.
pub fn heisenberg_like_terms(j: f64, h: f64) -> PauliHamiltonianTerms {
    let pauli = |s: &str| s.parse::<PauliString4>().expect("static Pauli string");
    PAIR_TERMS
        .iter()
        .map(|s| (-j, pauli(s)))
        .chain(FIELD_TERMS.iter().map(|s| (h, pauli(s))))
        .collect()
}

/// Bell-basis energies of [`heisenberg_like_terms`].
pub fn heisenberg_like_energies(j: f64, h: f64) -> Result<EnergySpectrum> {
    let a = 3.0 * h - 6.0 * j;
    let b = -h - 6.0 * j;
    let c = -h;
    let d = 3.0 * h + 2.0 * j;
    let e = -h + 2.0 * j;
    EnergySpectrum::new([a, b, c, c, c, c, d, e, c, c, d, e, d, e, c, c])
}

/// `ln Z` with `Z = Σ exp(−E_j/T)`, evaluated after shifting by `min E`.
pub fn log_partition_function(e: &EnergySpectrum, t: f64) -> Result<f64> {
    let (w, e_min) = shifted_boltzmann_weights(e, t)?;
    Ok(w.iter().sum::<f64>().ln() - e_min / t)
}

pub fn partition_function(e: &EnergySpectrum, t: f64) -> Result<f64> {
    Ok(log_partition_function(e, t)?.exp())
}

/// The closed-form partition function of the coupling model,
/// `8e^{h/T} + 3e^{(−3h−2J)/T} + 3e^{(h−2J)/T} + e^{(−3h+6J)/T} + e^{(h+6J)/T}`.
pub fn example_partition_function(j: f64, h: f64, t: f64) -> Result<f64> {
    check_temperature(t)?;
    Ok(8.0 * (h / t).exp()
        + 3.0 * ((-3.0 * h - 2.0 * j) / t).exp()
        + 3.0 * ((h - 2.0 * j) / t).exp()
        + ((-3.0 * h + 6.0 * j) / t).exp()
        + ((h + 6.0 * j) / t).exp())
}

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveTemperature(t))
    }
}

/// Envelope trace of the thermal state at temperature `t`.
pub fn thermal_envelope_trace(model: &ThermalModel, t: f64, p: f64, signs: EnvelopeSigns) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters(format!("mixing weight p = {p} outside [0, 1]")));
    }
    Ok(envelope_trace_with(&model.probs(t)?, p, signs))
}

/// Exponents `x_k` and coefficients `c_k` of `Σ c_k e^{x_k}`, summed after
/// subtracting `shift`.
fn shifted_sum(terms: &[(f64, f64)], shift: f64) -> f64 {
    terms.iter().map(|(c, x)| c * (x - shift).exp()).sum()
}

/// Denominator terms `3 + 3u + 8e^{2(2h+J)/T} + (1+u)e^{8J/T}`, `u = e^{4h/T}`.
fn example_denominator(j: f64, h: f64, t: f64) -> [(f64, f64); 5] {
    [
        (3.0, 0.0),
        (3.0, 4.0 * h / t),
        (8.0, 2.0 * (2.0 * h + j) / t),
        (1.0, 8.0 * j / t),
        (1.0, (4.0 * h + 8.0 * j) / t),
    ]
}

fn max_exponent(terms: &[(f64, f64)]) -> f64 {
    terms.iter().map(|&(_, x)| x).fold(f64::NEG_INFINITY, f64::max)
}

/// `1 + [a0(1+u)(e^{8J/T}−1) + 8 a1 p (1−u)] / [3 + 3u + 8e^{2(2h+J)/T} + (1+u)e^{8J/T}]`
/// with `u = e^{4h/T}`, all exponentials shifted by the largest denominator exponent.
pub fn closed_form_example_trace(j: f64, h: f64, t: f64, a0: Sign, a1: Sign, p: f64) -> Result<f64> {
    check_temperature(t)?;
    let den = example_denominator(j, h, t);
    let shift = max_exponent(&den);
    let (a0, a1) = (a0.value(), a1.value());
    let num = [
        (a0, 8.0 * j / t),
        (a0, (4.0 * h + 8.0 * j) / t),
        (-a0, 0.0),
        (-a0, 4.0 * h / t),
        (8.0 * a1 * p, 0.0),
        (-8.0 * a1 * p, 4.0 * h / t),
    ];
    Ok(1.0 + shifted_sum(&num, shift) / shifted_sum(&den, shift))
}

/// The closed form with the `e^{8J/T}` and `e^{2J/T}` terms dropped, the
/// `J → −∞` limit at fixed `h` and `T`:
/// `1 + [−a0(1+u) + 8 a1 p (1−u)] / (3 + 3u)`.
pub fn reduced_infinite_coupling_trace(h: f64, t: f64, a0: Sign, a1: Sign, p: f64) -> Result<f64> {
    check_temperature(t)?;
    let x = 4.0 * h / t;
    // Divide through by max(1, u) to keep the ratio finite.
    let (one, u) = if x > 0.0 { ((-x).exp(), 1.0) } else { (1.0, x.exp()) };
    Ok(1.0 + (-a0.value() * (one + u) + 8.0 * a1.value() * p * (one - u)) / (3.0 * (one + u)))
}

/// `1 − (a0 + 8 a1 p)/3`, the trace when both couplings are taken to infinity.
pub fn asymptotic_trace(a0: Sign, a1: Sign, p: f64) -> f64 {
    1.0 - (a0.value() + 8.0 * a1.value() * p) / 3.0
}

/// A located sign change of a temperature-dependent trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub t_th: f64,
    /// Final bisection bracket; the trace has opposite signs at its ends.
    pub bracket: (f64, f64),
    /// Trace value at `t_th`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ThresholdOutcome {
    Found(ThresholdResult),
    /// The trace has the same sign at both ends of the search bracket.
    NoneInRange { trace_lo: f64, trace_hi: f64 },
}

impl ThresholdOutcome {
    pub fn temperature(&self) -> Option<f64> {
        match self {
            ThresholdOutcome::Found(r) => Some(r.t_th),
            ThresholdOutcome::NoneInRange { .. } => None,
        }
    }
}

pub const DEFAULT_BRACKET: (f64, f64) = (1e-2, 1e2);
/// Bracket width at which bisection may stop.
pub const THRESHOLD_T_TOL: f64 = 1e-8;
/// Largest acceptable `|trace|` at the reported threshold.
pub const THRESHOLD_RESIDUAL_TOL: f64 = 1e-9;
const MAX_BISECTIONS: usize = 200;

/// Bisection for a sign change of `f` on `bracket`.
///
/// Halving continues until the bracket is narrower than [`THRESHOLD_T_TOL`]
/// and `|f|` at the midpoint is below [`THRESHOLD_RESIDUAL_TOL`], or until the
/// bracket cannot shrink further in floating point.
pub fn bisect_sign_change<F>(mut f: F, bracket: (f64, f64)) -> Result<ThresholdOutcome>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameters(format!("temperature bracket ({lo}, {hi}) must satisfy 0 < lo < hi")));
    }
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    for (t, v) in [(lo, f_lo), (hi, f_hi)] {
        if v == 0.0 {
            return Ok(ThresholdOutcome::Found(ThresholdResult { t_th: t, bracket: (lo, hi), residual: 0.0 }));
        }
    }
    if f_lo.signum() == f_hi.signum() {
        return Ok(ThresholdOutcome::NoneInRange { trace_lo: f_lo, trace_hi: f_hi });
    }
    let mut best = if f_lo.abs() < f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid.abs() < best.1.abs() {
            best = (mid, f_mid);
        }
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= THRESHOLD_T_TOL && f_mid.abs() <= THRESHOLD_RESIDUAL_TOL {
            break;
        }
    }
    Ok(ThresholdOutcome::Found(ThresholdResult { t_th: best.0, bracket: (lo, hi), residual: best.1 }))
}

/// Temperature at which the thermal envelope trace crosses zero.
pub fn threshold_temperature(
    model: &ThermalModel,
    p: f64,
    signs: EnvelopeSigns,
    bracket: (f64, f64),
) -> Result<ThresholdOutcome> {
    let spectrum = model.spectrum()?;
    let model = ThermalModel::Spectrum(spectrum);
    bisect_sign_change(|t| thermal_envelope_trace(&model, t, p, signs), bracket)
}

/// Zero of [`reduced_infinite_coupling_trace`] in `bracket`.
pub fn infinite_coupling_threshold(h: f64, a0: Sign, a1: Sign, p: f64, bracket: (f64, f64)) -> Result<ThresholdOutcome> {
    bisect_sign_change(|t| reduced_infinite_coupling_trace(h, t, a0, a1, p), bracket)
}

/// GHZ fidelity `⟨ψ_GHZ|ρ|ψ_GHZ⟩`, which is `p1`.
pub fn fidelity(probs: &ProbabilityVector) -> f64 {
    probs.p(1)
}

/// The same fidelity as a quadratic form on the density matrix.
pub fn fidelity_via_matrix(probs: &ProbabilityVector) -> f64 {
    let ghz = bell_basis_vector(1).expect("index 1 is valid");
    density_from_probs(probs).expectation(&ghz)
}

/// `F > 1/2`, a sufficient condition for entanglement.
pub fn fidelity_detects(probs: &ProbabilityVector) -> bool {
    fidelity(probs) > 0.5
}

/// Closed-form GHZ fidelity of the coupling model:
/// `e^{8J/T} / [3 + 3e^{4h/T} + 8e^{2(2h+J)/T} + (1+e^{4h/T})e^{8J/T}]`.
pub fn example_fidelity(j: f64, h: f64, t: f64) -> Result<f64> {
    check_temperature(t)?;
    let den = example_denominator(j, h, t);
    let shift = max_exponent(&den);
    Ok((8.0 * j / t - shift).exp() / shifted_sum(&den, shift))
}

/// One row of a temperature sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalSweepRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub trace: f64,
    pub fidelity: f64,
    pub detected_by_witness: bool,
    pub detected_by_fidelity: bool,
}

/// `steps` evenly spaced temperatures from `lo` to `hi` inclusive.
pub fn temperature_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::NonPositiveTemperature(lo.min(hi)));
    }
    if steps == 0 {
        return Err(Error::InvalidParameters("temperature grid needs at least one step".into()));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let n = (steps - 1) as f64;
    Ok((0..steps).map(|k| lo + (hi - lo) * k as f64 / n).collect())
}

pub fn thermal_sweep(model: &ThermalModel, temps: &[f64], p: f64, signs: EnvelopeSigns) -> Result<Vec<ThermalSweepRow>> {
    let model = ThermalModel::Spectrum(model.spectrum()?);
    temps
        .iter()
        .map(|&t| {
            let probs = model.probs(t)?;
            let trace = thermal_envelope_trace(&model, t, p, signs)?;
            let fidelity = fidelity(&probs);
            Ok(ThermalSweepRow {
                t,
                trace,
                fidelity,
                detected_by_witness: trace < 0.0,
                detected_by_fidelity: fidelity > 0.5,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::pauli_terms_to_energies;
    use crate::witness::{envelope_trace, SignSelectors};

    const ALL_PLUS: EnvelopeSigns =
        EnvelopeSigns::Printed(SignSelectors { a0: Sign::Plus, a1: Sign::Plus, a2: Sign::Plus });

    #[test]
    fn spectrum_values() {
        assert!(heisenberg_like_energies(0.0, 0.0).unwrap().as_array().iter().all(|&e| e == 0.0));
        let e = heisenberg_like_energies(-1.0, 1.0).unwrap();
        assert_eq!(e.e(1), 9.0);
        assert_eq!(e.e(2), 5.0);
        assert_eq!(e.as_array().iter().filter(|&&x| x == -1.0).count(), 8);
        assert_eq!(e.as_array().iter().filter(|&&x| x == 1.0).count(), 3);
        assert_eq!(e.as_array().iter().filter(|&&x| x == -3.0).count(), 3);
    }

    #[test]
    fn spectrum_matches_bell_diagonalization() {
        for (j, h) in [(-1.0, 1.0), (0.3, -2.0), (-4.0, 0.5), (2.5, 3.5)] {
            let direct = pauli_terms_to_energies(&heisenberg_like_terms(j, h)).unwrap();
            let closed = heisenberg_like_energies(j, h).unwrap();
            for i in 1..=16 {
                assert!((direct.e(i) - closed.e(i)).abs() < 1e-12, "E{i} at J={j}, h={h}");
            }
        }
    }

    #[test]
    fn partition_function_forms_agree() {
        let e = EnergySpectrum::new([0.0; 16]).unwrap();
        assert!((partition_function(&e, 1.0).unwrap() - 16.0).abs() < 1e-12);
        assert!((partition_function(&heisenberg_like_energies(-1.0, 1.0).unwrap(), 1e9).unwrap() - 16.0).abs() < 1e-6);
        for (j, h, t) in [(-1.0, 1.0, 1.0), (-2.0, 0.5, 0.7), (1.5, 2.0, 3.0)] {
            let z = partition_function(&heisenberg_like_energies(j, h).unwrap(), t).unwrap();
            let closed = example_partition_function(j, h, t).unwrap();
            assert!((z - closed).abs() <= 1e-12 * closed);
        }
        assert!(partition_function(&e, 0.0).is_err());
        assert!(example_partition_function(-1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn closed_form_chain() {
        for j in [-4.0, -2.2, -0.5, 0.0] {
            for h in [0.0, 0.7, 2.0, 4.0] {
                for t in [0.2, 1.0, 5.0, 20.0] {
                    for (a0, a1, p) in [(Sign::Plus, Sign::Plus, 1.0), (Sign::Minus, Sign::Plus, 0.4), (Sign::Plus, Sign::Minus, 0.7)] {
                        let signs = EnvelopeSigns::Printed(SignSelectors { a0, a1, a2: Sign::Plus });
                        let model = ThermalModel::Couplings { j, h };
                        let thermal = thermal_envelope_trace(&model, t, p, signs).unwrap();
                        let closed = closed_form_example_trace(j, h, t, a0, a1, p).unwrap();
                        assert!((thermal - closed).abs() < 1e-12, "J={j} h={h} T={t}: {thermal} vs {closed}");
                    }
                }
            }
        }
    }

    #[test]
    fn minimizing_form_agrees_at_full_mixing() {
        let model = ThermalModel::Couplings { j: -1.5, h: 1.0 };
        for t in [0.5, 2.0, 8.0] {
            let probs = model.probs(t).unwrap();
            let a = thermal_envelope_trace(&model, t, 1.0, ALL_PLUS).unwrap();
            assert!((a - envelope_trace(&probs, 1.0, Sign::Plus)).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_edge_cases() {
        for t in [0.3, 1.0, 4.0] {
            let v = closed_form_example_trace(0.0, 0.0, t, Sign::Plus, Sign::Plus, 0.6).unwrap();
            assert!((v - 1.0).abs() < 1e-15);
            let j: f64 = -0.8;
            let expected = 1.0 + 2.0 * (-1.0 + (8.0 * j / t).exp()) / (6.0 + 8.0 * (2.0 * j / t).exp() + 2.0 * (8.0 * j / t).exp());
            let v = closed_form_example_trace(j, 0.0, t, Sign::Plus, Sign::Minus, 0.3).unwrap();
            assert!((v - expected).abs() < 1e-14);
        }
        let v = closed_form_example_trace(-1e4, 1e4, 1e-3, Sign::Plus, Sign::Plus, 1.0).unwrap();
        assert!(v.is_finite());
        assert!(closed_form_example_trace(-1.0, 1.0, 0.0, Sign::Plus, Sign::Plus, 1.0).is_err());
    }

    #[test]
    fn table_thresholds() {
        for (j, expected) in [(-1.0, 2.6135), (-2.0, 3.6232), (-3.0, 4.3418)] {
            let model = ThermalModel::Couplings { j, h: 1.0 };
            let ThresholdOutcome::Found(r) = threshold_temperature(&model, 1.0, ALL_PLUS, DEFAULT_BRACKET).unwrap() else {
                panic!("no threshold for J={j}");
            };
            assert!((r.t_th - expected).abs() < 1e-3, "J={j}: {}", r.t_th);
            assert!(r.residual.abs() <= THRESHOLD_RESIDUAL_TOL);
            assert!(r.bracket.1 - r.bracket.0 <= THRESHOLD_T_TOL);
        }
        let r = infinite_coupling_threshold(1.0, Sign::Plus, Sign::Plus, 1.0, DEFAULT_BRACKET).unwrap();
        let t = r.temperature().unwrap();
        assert!((t - 4.0 / (5.0f64 / 3.0).ln()).abs() < 1e-7);
        assert!((t - 7.8305).abs() < 5e-3);
    }

    #[test]
    fn no_threshold_when_always_entangled() {
        let model = ThermalModel::Couplings { j: -40.0, h: 40.0 };
        let r = threshold_temperature(&model, 1.0, ALL_PLUS, DEFAULT_BRACKET).unwrap();
        assert!(matches!(r, ThresholdOutcome::NoneInRange { .. }));
    }

    #[test]
    fn bisection_rejects_bad_brackets() {
        assert!(bisect_sign_change(|t| Ok(t - 1.0), (2.0, 1.0)).is_err());
        assert!(bisect_sign_change(|t| Ok(t - 1.0), (-1.0, 2.0)).is_err());
        let r = bisect_sign_change(|t| Ok(t - 1.0), (1.0, 2.0)).unwrap();
        assert_eq!(r.temperature(), Some(1.0));
    }

    #[test]
    fn asymptotic_values() {
        assert_eq!(asymptotic_trace(Sign::Plus, Sign::Plus, 1.0), -2.0);
        assert!(asymptotic_trace(Sign::Plus, Sign::Plus, 0.25).abs() < 1e-15);
        for t in [0.5, 1.0, 5.0] {
            let v = closed_form_example_trace(-40.0, 40.0, t, Sign::Plus, Sign::Plus, 1.0).unwrap();
            assert!((v + 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn high_temperature_limit() {
        let model = ThermalModel::Couplings { j: -1.0, h: 1.0 };
        let v = thermal_envelope_trace(&model, 1e9, 0.5, ALL_PLUS).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
        let v = thermal_envelope_trace(&model, 50.0, 1.0, ALL_PLUS).unwrap();
        assert!(v > 0.9 && v < 1.0);
    }

    #[test]
    fn fidelity_forms() {
        assert_eq!(fidelity(&ProbabilityVector::pure(1).unwrap()), 1.0);
        assert!(fidelity_detects(&ProbabilityVector::pure(1).unwrap()));
        assert!((fidelity(&ProbabilityVector::uniform()) - 1.0 / 16.0).abs() < 1e-15);
        assert!(!fidelity_detects(&ProbabilityVector::uniform()));
        for (j, h, t) in [(-1.0, 1.0, 0.3), (-3.0, 1.0, 4.0), (0.5, 2.0, 1.0)] {
            let probs = ThermalModel::Couplings { j, h }.probs(t).unwrap();
            assert!((fidelity_via_matrix(&probs) - fidelity(&probs)).abs() < 1e-14);
            assert!((example_fidelity(j, h, t).unwrap() - fidelity(&probs)).abs() < 1e-12);
        }
        assert!((example_fidelity(-2.0, 1.0, 1e6).unwrap() - 1.0 / 16.0).abs() < 1e-5);
    }

    #[test]
    fn energy_shift_invariance() {
        let e = heisenberg_like_energies(-1.3, 0.8).unwrap();
        let shifted = ThermalModel::Spectrum(e.shifted(123.4).unwrap());
        let model = ThermalModel::Spectrum(e);
        for t in [0.1, 1.0, 10.0] {
            let a = thermal_envelope_trace(&model, t, 0.6, ALL_PLUS).unwrap();
            let b = thermal_envelope_trace(&shifted, t, 0.6, ALL_PLUS).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        let ta = threshold_temperature(&model, 1.0, ALL_PLUS, DEFAULT_BRACKET).unwrap().temperature();
        let tb = threshold_temperature(&shifted, 1.0, ALL_PLUS, DEFAULT_BRACKET).unwrap().temperature();
        assert!((ta.unwrap() - tb.unwrap()).abs() < 1e-7);
    }

    #[test]
    fn grid_and_sweep() {
        let grid = temperature_grid(1.0, 3.0, 5).unwrap();
        assert_eq!(grid, vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert!(temperature_grid(0.0, 3.0, 5).is_err());
        assert!(temperature_grid(1.0, 3.0, 0).is_err());
        let rows = thermal_sweep(&ThermalModel::Couplings { j: -1.0, h: 1.0 }, &[1.0, 50.0], 1.0, ALL_PLUS).unwrap();
        assert!(rows[0].detected_by_witness && !rows[1].detected_by_witness);
        assert!(rows.iter().all(|r| !r.detected_by_fidelity));
    }
}
