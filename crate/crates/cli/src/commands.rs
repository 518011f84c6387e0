use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt::Write;

use serde_json::{json, Value};

use mubwit::bell::pauli_terms_to_energies;
use mubwit::io::{
    fmt_opt, fmt_sig12, parse_hamiltonian, parse_probability_vector, round_json, EnvelopeConfig, FamilyConfig,
    FidelityConfig, OutputFormat, ThermalConfig,
};
use mubwit::ppt::{is_ppt_spectral, PPT_TOL};
use mubwit::thermal::{
    example_fidelity, infinite_coupling_threshold, temperature_grid, thermal_sweep, threshold_temperature,
    ThermalModel,
};
use mubwit::witness::{
    envelope_trace, example_state, family_positivity, slice_envelope_branches, slice_linear_witness_p2,
    EnvelopeSigns, SignSelectors, Sign,
};
use mubwit::Error;

use crate::{Outcome, UsageError};

fn json_text(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&round_json(v)).expect("JSON value serializes");
    s.push('\n');
    s
}

pub fn ppt(text: &str, format: OutputFormat) -> Result<Outcome, UsageError> {
    let probs = parse_probability_vector(text)?;
    let report = is_ppt_spectral(&probs, PPT_TOL);
    let exit = if report.is_ppt { 0 } else { 1 };
    let text = match format {
        OutputFormat::Json => json_text(serde_json::to_value(&report)?),
        OutputFormat::Csv => format!(
            "is_ppt,min_eigenvalue,worst_bipartition,violated\n{},{},{},{}\n",
            report.is_ppt,
            fmt_sig12(report.min_eigenvalue),
            report.worst_bipartition,
            report.violated_inequalities.len()
        ),
    };
    Ok(Outcome { text, exit })
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect()
}

pub fn envelope(cfg: &EnvelopeConfig, format: OutputFormat) -> Result<Outcome, UsageError> {
    let a0 = cfg.a0()?;
    if !(0.0..1.0).contains(&cfg.p) {
        return Err(UsageError(format!("p must lie in [0, 1), got {}", cfg.p)));
    }
    if cfg.steps == 0 {
        return Err(UsageError("steps must be positive".into()));
    }
    // The zero locus is a circle of radius rho about (1/2, 1/2) in (p1, p2).
    let rho = (1.0 + a0.value()) / (4.0 * (1.0 - cfg.p));
    let lo = cfg.p1_min.unwrap_or((0.5 - rho / SQRT_2).max(0.0));
    let hi = cfg.p1_max.unwrap_or(0.5 + (0.5 * rho).min(rho / SQRT_2));
    if lo > hi || lo.is_nan() || hi.is_nan() {
        return Err(UsageError(format!("empty p1 range [{lo}, {hi}]")));
    }
    let grid = linspace(lo, hi, cfg.steps);

    let mut rows = Vec::with_capacity(grid.len());
    for &p1 in &grid {
        let (lower, upper) = slice_envelope_branches(cfg.p, a0, p1);
        if lower.is_none() && upper.is_none() {
            return Err(Error::OutsideBranchIntervals(p1).into());
        }
        let mut worst = 0.0f64;
        for p2 in [lower, upper].into_iter().flatten() {
            let probs = example_state(p1, p2.min(1.0 - p1))?;
            worst = worst.max(envelope_trace(&probs, cfg.p, a0).abs());
        }
        rows.push((p1, lower, upper, worst));
    }

    let n = cfg.linear_family;
    let mut lines = Vec::new();
    for k in 0..n {
        let psi2 = FRAC_PI_2 + k as f64 * PI / n as f64;
        for &p1 in &grid {
            if let Some(p2) = slice_linear_witness_p2(cfg.p, a0, psi2, p1) {
                if p2 >= -1e-12 && p2 <= 1.0 - p1 + 1e-12 {
                    lines.push((psi2, p1, p2));
                }
            }
        }
    }

    let text = match format {
        OutputFormat::Csv => {
            let mut s = String::from("p1,p2_lower,p2_upper,trace_on_curve\n");
            for (p1, l, u, t) in &rows {
                writeln!(s, "{},{},{},{}", fmt_sig12(*p1), fmt_opt(*l), fmt_opt(*u), fmt_sig12(*t)).unwrap();
            }
            if n > 0 {
                s.push_str("\npsi2,p1,p2\n");
                for (psi2, p1, p2) in &lines {
                    writeln!(s, "{},{},{}", fmt_sig12(*psi2), fmt_sig12(*p1), fmt_sig12(*p2)).unwrap();
                }
            }
            s
        }
        OutputFormat::Json => json_text(json!({
            "p": cfg.p,
            "a0": a0.value(),
            "envelope": rows.iter().map(|(p1, l, u, t)| json!({
                "p1": p1, "p2_lower": l, "p2_upper": u, "trace_on_curve": t
            })).collect::<Vec<_>>(),
            "linear_family": lines.iter().map(|(psi2, p1, p2)| json!({
                "psi2": psi2, "p1": p1, "p2": p2
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome { text, exit: 0 })
}

pub fn thermal(cfg: &ThermalConfig, with_limit: bool, format: OutputFormat) -> Result<Outcome, UsageError> {
    let (a0, a1) = (cfg.a0()?, cfg.a1()?);
    let signs = EnvelopeSigns::Printed(SignSelectors { a0, a1, a2: Sign::Plus });
    let temps = temperature_grid(cfg.t_min, cfg.t_max, cfg.steps)?;
    let bracket = (cfg.bracket[0], cfg.bracket[1]);

    let mut sweeps = Vec::new();
    for &j in &cfg.j {
        let model = ThermalModel::Couplings { j, h: cfg.h };
        let rows = thermal_sweep(&model, &temps, cfg.p, signs)?;
        let t_th = threshold_temperature(&model, cfg.p, signs, bracket)?.temperature();
        sweeps.push((j, rows, t_th));
    }
    let limit = if with_limit {
        Some(infinite_coupling_threshold(cfg.h, a0, a1, cfg.p, bracket)?.temperature())
    } else {
        None
    };

    let text = match format {
        OutputFormat::Csv => {
            let mut s = String::new();
            for (j, rows, _) in &sweeps {
                writeln!(s, "# J={}, h={}", fmt_sig12(*j), fmt_sig12(cfg.h)).unwrap();
                s.push_str("T,trace,fidelity,detected_by_witness,detected_by_fidelity\n");
                for r in rows {
                    writeln!(
                        s,
                        "{},{},{},{},{}",
                        fmt_sig12(r.t),
                        fmt_sig12(r.trace),
                        fmt_sig12(r.fidelity),
                        r.detected_by_witness,
                        r.detected_by_fidelity
                    )
                    .unwrap();
                }
                s.push('\n');
            }
            s.push_str("J,T_th\n");
            let show = |t: Option<f64>| t.map(fmt_sig12).unwrap_or_else(|| "none".into());
            for (j, _, t_th) in &sweeps {
                writeln!(s, "{},{}", fmt_sig12(*j), show(*t_th)).unwrap();
            }
            if let Some(t) = limit {
                writeln!(s, "-inf,{}", show(t)).unwrap();
            }
            s
        }
        OutputFormat::Json => json_text(json!({
            "h": cfg.h,
            "p": cfg.p,
            "sweeps": sweeps.iter().map(|(j, rows, t_th)| json!({
                "J": j, "T_th": t_th, "rows": rows
            })).collect::<Vec<_>>(),
            "T_th_limit": limit.flatten(),
        })),
    };
    Ok(Outcome { text, exit: 0 })
}

pub fn fidelity(cfg: &FidelityConfig, format: OutputFormat) -> Result<Outcome, UsageError> {
    let temps = temperature_grid(cfg.t_min, cfg.t_max, cfg.steps)?;
    let mut sweeps = Vec::new();
    for &j in &cfg.j {
        let rows = temps
            .iter()
            .map(|&t| example_fidelity(j, cfg.h, t).map(|f| (t, f, f > 0.5)))
            .collect::<Result<Vec<_>, _>>()?;
        sweeps.push((j, rows));
    }
    let text = match format {
        OutputFormat::Csv => {
            let mut s = String::new();
            for (k, (j, rows)) in sweeps.iter().enumerate() {
                if k > 0 {
                    s.push('\n');
                }
                writeln!(s, "# J={}, h={}", fmt_sig12(*j), fmt_sig12(cfg.h)).unwrap();
                s.push_str("T,F,detects\n");
                for (t, f, d) in rows {
                    writeln!(s, "{},{},{}", fmt_sig12(*t), fmt_sig12(*f), d).unwrap();
                }
            }
            s
        }
        OutputFormat::Json => json_text(json!({
            "h": cfg.h,
            "sweeps": sweeps.iter().map(|(j, rows)| json!({
                "J": j,
                "rows": rows.iter().map(|(t, f, d)| json!({"T": t, "F": f, "detects": d})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome { text, exit: 0 })
}

pub fn hamiltonian(text: &str, format: OutputFormat) -> Result<Outcome, UsageError> {
    let terms = parse_hamiltonian(text)?;
    match pauli_terms_to_energies(&terms) {
        Ok(e) => {
            let text = match format {
                OutputFormat::Csv => {
                    let mut s = String::from("# bell_diagonal: true\nindex,energy\n");
                    for (k, v) in e.as_array().iter().enumerate() {
                        writeln!(s, "{},{}", k + 1, fmt_sig12(*v)).unwrap();
                    }
                    s
                }
                OutputFormat::Json => json_text(json!({"bell_diagonal": true, "energies": e.as_array()})),
            };
            Ok(Outcome { text, exit: 0 })
        }
        Err(Error::NotBellDiagonal { i, j, magnitude }) => {
            let text = match format {
                OutputFormat::Csv => {
                    format!("# bell_diagonal: false\ni,j,magnitude\n{i},{j},{}\n", fmt_sig12(magnitude))
                }
                OutputFormat::Json => json_text(json!({
                    "bell_diagonal": false,
                    "offending": {"i": i, "j": j, "magnitude": magnitude},
                })),
            };
            Ok(Outcome { text, exit: 1 })
        }
        Err(e) => Err(e.into()),
    }
}

pub fn family_verify(cfg: &FamilyConfig, seed: u64, format: OutputFormat) -> Result<Outcome, UsageError> {
    let results = family_positivity(cfg.reading.into(), cfg.draws, &cfg.budget(seed));
    let violations = results.iter().filter(|m| m.min_trace < -cfg.tolerance).count();
    let text = match format {
        OutputFormat::Csv => {
            let mut s = String::from("id,min_trace,p,psi1,psi2,positive\n");
            for m in &results {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    m.id,
                    fmt_sig12(m.min_trace),
                    fmt_sig12(m.p),
                    fmt_sig12(m.psi1),
                    fmt_sig12(m.psi2),
                    m.min_trace >= -cfg.tolerance
                )
                .unwrap();
            }
            s
        }
        OutputFormat::Json => json_text(json!({
            "seed": seed,
            "members": results,
            "violations": violations,
        })),
    };
    Ok(Outcome { text, exit: if violations > 0 { 1 } else { 0 } })
}
