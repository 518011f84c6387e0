//! Text formats: probability files, Hamiltonian term lists, run configuration
//! and number formatting for emitted tables.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bell::{PauliHamiltonianTerms, ProbabilityVector};
use crate::error::Error;
use crate::pauli::parse_pauli_string;
use crate::thermal::DEFAULT_BRACKET;
use crate::witness::{FamilyReading, MultistartBudget, Sign, EXAMPLE_MIXING};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("entry {index}: {message}")]
    Entry { index: usize, message: String },

    #[error("expected 16 probabilities, found {0}")]
    Arity(usize),

    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    #[error("{0}")]
    Invalid(#[from] Error),

    #[error("config: {0}")]
    Config(String),
}

fn parse_number(token: &str) -> Result<f64, String> {
    let v: f64 = token.parse().map_err(|_| format!("'{token}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{token}' is not finite"))
    }
}

/// Sixteen probabilities as a JSON array or a single comma-separated line.
/// Blank lines and lines starting with `#` are ignored in the CSV form.
pub fn parse_probability_vector(text: &str) -> Result<ProbabilityVector, InputError> {
    let trimmed = text.trim_start();
    let values = if trimmed.starts_with('[') {
        let raw: Vec<serde_json::Value> = serde_json::from_str(text).map_err(|e| InputError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        raw.iter()
            .enumerate()
            .map(|(k, v)| {
                v.as_f64().ok_or_else(|| InputError::Entry { index: k + 1, message: format!("{v} is not a number") })
            })
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let Some((_, line)) = lines.next() else {
            return Err(InputError::Arity(0));
        };
        if let Some((extra, _)) = lines.next() {
            return Err(InputError::Line { line: extra + 1, message: "expected a single CSV line".into() });
        }
        line.split(',')
            .enumerate()
            .map(|(k, tok)| parse_number(tok.trim()).map_err(|message| InputError::Entry { index: k + 1, message }))
            .collect::<Result<Vec<_>, _>>()?
    };
    if values.len() != 16 {
        return Err(InputError::Arity(values.len()));
    }
    Ok(ProbabilityVector::from_slice(&values)?)
}

/// One term per line, `<coefficient> <PAULI>`, with `#` starting a comment.
pub fn parse_hamiltonian(text: &str) -> Result<PauliHamiltonianTerms, InputError> {
    let mut terms = PauliHamiltonianTerms::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let [coeff, pauli] = tokens[..] else {
            return Err(InputError::Line {
                line,
                message: format!("expected '<coefficient> <pauli string>', got {} fields", tokens.len()),
            });
        };
        let coeff = parse_number(coeff).map_err(|message| InputError::Line { line, message })?;
        let pauli = parse_pauli_string(pauli).map_err(|e| InputError::Line { line, message: e.to_string() })?;
        terms.add(coeff, pauli);
    }
    Ok(terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn sign_from_int(v: i8, name: &str) -> Result<Sign, InputError> {
    Sign::from_value(f64::from(v)).map_err(|_| InputError::Config(format!("{name} must be 1 or -1, got {v}")))
}

/// Worked-example envelope grid. Defaults: `p1` spans the lower branch
/// interval, 400 steps, `p = 0.1`, `a0 = 1`, 50 linear witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvelopeConfig {
    pub p1_min: Option<f64>,
    pub p1_max: Option<f64>,
    pub steps: usize,
    pub p: f64,
    pub a0: i8,
    pub linear_family: usize,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig { p1_min: None, p1_max: None, steps: 400, p: EXAMPLE_MIXING, a0: 1, linear_family: 50 }
    }
}

impl EnvelopeConfig {
    pub fn a0(&self) -> Result<Sign, InputError> {
        sign_from_int(self.a0, "envelope.a0")
    }
}

/// Temperature sweep of the coupling model. Defaults: `J ∈ {−1, −2, −3}`,
/// `h = 1`, `p = a0 = a1 = 1`, `T` from 0.05 to 50 in 1000 steps, threshold
/// bracket `(0.01, 100)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalConfig {
    pub j: Vec<f64>,
    pub h: f64,
    pub p: f64,
    pub a0: i8,
    pub a1: i8,
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
    pub bracket: [f64; 2],
}

impl Default for ThermalConfig {
    fn default() -> Self {
        ThermalConfig {
            j: vec![-1.0, -2.0, -3.0],
            h: 1.0,
            p: 1.0,
            a0: 1,
            a1: 1,
            t_min: 0.05,
            t_max: 50.0,
            steps: 1000,
            bracket: [DEFAULT_BRACKET.0, DEFAULT_BRACKET.1],
        }
    }
}

impl ThermalConfig {
    pub fn a0(&self) -> Result<Sign, InputError> {
        sign_from_int(self.a0, "thermal.a0")
    }

    pub fn a1(&self) -> Result<Sign, InputError> {
        sign_from_int(self.a1, "thermal.a1")
    }
}

/// GHZ fidelity sweep. Defaults: `J ∈ {−1, −2, −3}`, `h = 1`, `T` from 0.05
/// to 50 in 1000 steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FidelityConfig {
    pub j: Vec<f64>,
    pub h: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
}

impl Default for FidelityConfig {
    fn default() -> Self {
        FidelityConfig { j: vec![-1.0, -2.0, -3.0], h: 1.0, t_min: 0.05, t_max: 50.0, steps: 1000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReadingChoice {
    #[default]
    Deduplicated,
    Literal,
}

impl From<ReadingChoice> for FamilyReading {
    fn from(r: ReadingChoice) -> Self {
        match r {
            ReadingChoice::Deduplicated => FamilyReading::Deduplicated,
            ReadingChoice::Literal => FamilyReading::Literal,
        }
    }
}

/// Positivity sweep over the witness family. Defaults: deduplicated
/// enumeration, 10 parameter draws per member, 64 random restarts, grid step
/// `π/24`, tolerance `1e-7`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    pub reading: ReadingChoice,
    pub draws: usize,
    pub starts: usize,
    pub grid_divisions: usize,
    pub tolerance: f64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig { reading: ReadingChoice::Deduplicated, draws: 10, starts: 64, grid_divisions: 24, tolerance: 1e-7 }
    }
}

impl FamilyConfig {
    pub fn budget(&self, seed: u64) -> MultistartBudget {
        MultistartBudget { starts: self.starts, grid_step: PI / self.grid_divisions.max(1) as f64, seed }
    }
}

/// Settings shared by every subcommand. Unknown keys are rejected.
/// Defaults: seed 0, CSV output to stdout.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub envelope: EnvelopeConfig,
    pub thermal: ThermalConfig,
    pub fidelity: FidelityConfig,
    pub family: FamilyConfig,
}

pub fn parse_run_config(text: &str) -> Result<RunConfig, InputError> {
    toml::from_str(text).map_err(|e| InputError::Config(e.to_string()))
}

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn fmt_sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let s = format!("{rounded:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig12).unwrap_or_default()
}

/// JSON with every float rounded to 12 significant digits.
pub fn round_json(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = fmt_sig12(x).parse().unwrap_or(x);
            serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIFORM_CSV: &str = "0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625,0.0625";

    #[test]
    fn probability_formats() {
        let a = parse_probability_vector(UNIFORM_CSV).unwrap();
        let b = parse_probability_vector(&format!("[{UNIFORM_CSV}]")).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, ProbabilityVector::uniform());
        let with_comment = format!("# uniform\n\n{UNIFORM_CSV}\n");
        assert_eq!(parse_probability_vector(&with_comment).unwrap(), a);
    }

    #[test]
    fn probability_errors_are_positioned() {
        let fifteen = vec!["0.0625"; 15].join(",");
        assert_eq!(parse_probability_vector(&fifteen), Err(InputError::Arity(15)));
        let mut bad: Vec<&str> = vec!["0.0625"; 16];
        bad[6] = "x";
        assert!(matches!(parse_probability_vector(&bad.join(",")), Err(InputError::Entry { index: 7, .. })));
        assert!(matches!(parse_probability_vector("[0.1,\n0.2,"), Err(InputError::Syntax { line: 2, .. })));
        assert!(matches!(parse_probability_vector("[0.1, \"a\"]"), Err(InputError::Entry { index: 2, .. })));
        assert!(matches!(parse_probability_vector(""), Err(InputError::Arity(0))));
        assert!(matches!(
            parse_probability_vector(&format!("{UNIFORM_CSV}\n{UNIFORM_CSV}")),
            Err(InputError::Line { line: 2, .. })
        ));
        let mut neg = vec!["0.0625".to_string(); 16];
        neg[0] = "-0.0625".into();
        neg[1] = "0.1875".into();
        assert!(matches!(parse_probability_vector(&neg.join(",")), Err(InputError::Invalid(_))));
        assert!(parse_probability_vector("inf,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0").is_err());
    }

    #[test]
    fn hamiltonian_format() {
        let text = "# pair couplings\n1 ZZII\n 1.0 IZZI # inline\n\n-2.5e0 xxxx\n1 ZZII\n";
        let terms = parse_hamiltonian(text).unwrap();
        assert_eq!(terms.terms().len(), 3);
        assert_eq!(terms.terms()[0].0, 2.0);
        assert!(parse_hamiltonian("").unwrap().is_empty());

        assert_eq!(
            parse_hamiltonian("1 ZZII\n1 ZZI\n"),
            Err(InputError::Line { line: 2, message: "expected 4 labels, got 3".into() })
        );
        assert!(matches!(parse_hamiltonian("abc ZZII"), Err(InputError::Line { line: 1, .. })));
        assert!(matches!(parse_hamiltonian("\n\n1 ZZII extra"), Err(InputError::Line { line: 3, .. })));
        assert!(matches!(parse_hamiltonian("1 ZQII"), Err(InputError::Line { line: 1, .. })));
    }

    #[test]
    fn config_defaults_and_rejection() {
        let c = parse_run_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.thermal.j, vec![-1.0, -2.0, -3.0]);
        assert_eq!(c.family.budget(3).starts, 64);

        let c = parse_run_config("seed = 9\nformat = \"json\"\n[thermal]\nj = [-50.0]\nsteps = 10\n").unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.format, OutputFormat::Json);
        assert_eq!(c.thermal.j, vec![-50.0]);
        assert_eq!(c.thermal.h, 1.0);

        assert!(parse_run_config("sed = 1").is_err());
        assert!(parse_run_config("[thermal]\nJ = [1.0]").is_err());
        assert!(parse_run_config("[family]\nreading = \"other\"").is_err());
        let c = parse_run_config("[envelope]\na0 = 2").unwrap();
        assert!(c.envelope.a0().is_err());
    }

    #[test]
    fn config_roundtrip() {
        let c = RunConfig { seed: 5, ..Default::default() };
        let text = toml::to_string(&c).unwrap();
        assert_eq!(parse_run_config(&text).unwrap(), c);
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_sig12(0.0625), "0.0625");
        assert_eq!(fmt_sig12(1.0), "1");
        assert_eq!(fmt_sig12(-2.0), "-2");
        assert_eq!(fmt_sig12(2.0 / 9.0), "0.222222222222");
        assert_eq!(fmt_sig12(7.830462665120001), "7.83046266512");
        assert_eq!(fmt_sig12(f64::NAN), "NaN");
        assert_eq!(fmt_opt(None), "");
    }
}
