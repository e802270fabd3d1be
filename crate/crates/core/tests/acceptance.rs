//! Acceptance criteria, one test per criterion. Each test prints a single
//! `PASS`/`FAIL` line straight to stdout, so the lines appear even when the
//! harness captures output.

use std::io::Write;
use std::process::Command;
use std::sync::OnceLock;

use oscillator_chain::verify::{
    self, CriterionReport, ModeRun, OracleRun, Status, DEVIATION_TOL, ENERGY_DRIFT_TOL,
    HALVING_RATIO, MOMENTUM_TOL, SPECTRUM_N_MAX, TRANSLATION_TOL,
};

fn line(pass: bool, label: &str, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{verdict} {label}: {detail}");
    let _ = out.flush();
}

fn judge(report: CriterionReport) {
    let label = format!("criterion {} ({})", report.criterion, report.name);
    let metrics = report
        .metrics
        .iter()
        .map(|(k, v)| format!("{k}={v:e}"))
        .collect::<Vec<_>>()
        .join(" ");
    let detail = format!(
        "{} cases, {} failed {metrics}",
        report.cases, report.failed_cases
    );
    let pass = report.status == Status::Pass;
    line(pass, &label, detail.trim_end());
    assert!(pass, "{label} failed: {:#?}", report.failures);
}

fn oracle_runs() -> &'static [OracleRun] {
    static RUNS: OnceLock<Vec<OracleRun>> = OnceLock::new();
    RUNS.get_or_init(|| verify::oracle_runs(SPECTRUM_N_MAX))
}

fn mode_runs() -> &'static (ModeRun, ModeRun) {
    static RUNS: OnceLock<(ModeRun, ModeRun)> = OnceLock::new();
    RUNS.get_or_init(|| verify::mode_runs().expect("reference mode runs"))
}

#[test]
fn criterion_1_spectrum_equivalence() {
    judge(verify::criterion_spectrum(SPECTRUM_N_MAX, oracle_runs()));
}

#[test]
fn criterion_2_degeneracy_structure() {
    judge(verify::criterion_degeneracy(usize::MAX));
}

#[test]
fn criterion_3_symmetry_relations() {
    judge(verify::criterion_symmetry(usize::MAX));
}

#[test]
fn criterion_4_spectral_reflection() {
    judge(verify::criterion_reflection(oracle_runs()));
}

#[test]
fn criterion_5_commutant_lemma() {
    judge(verify::criterion_commutant(usize::MAX));
}

#[test]
fn criterion_6_chebyshev_identities() {
    judge(verify::criterion_chebyshev(usize::MAX));
}

#[test]
fn criterion_7a_mode_energy_drift() {
    let (full, _) = mode_runs();
    let pass = full.energy_drift < ENERGY_DRIFT_TOL;
    line(
        pass,
        "criterion 7a (linear n=8 mode 3 energy drift)",
        &format!("{:e} < {ENERGY_DRIFT_TOL:e}", full.energy_drift),
    );
    assert!(pass, "relative energy drift {:e}", full.energy_drift);
}

#[test]
fn criterion_7b_mode_deviation_from_analytic() {
    let (full, _) = mode_runs();
    let pass = full.max_deviation < DEVIATION_TOL;
    line(
        pass,
        "criterion 7b (linear n=8 mode 3 deviation from analytic)",
        &format!("{:e} < {DEVIATION_TOL:e}", full.max_deviation),
    );
    assert!(pass, "max deviation {:e}", full.max_deviation);
}

#[test]
fn criterion_7c_halving_dt() {
    let (full, half) = mode_runs();
    let ratio = full.max_deviation / half.max_deviation;
    let pass = (HALVING_RATIO.0..=HALVING_RATIO.1).contains(&ratio);
    line(
        pass,
        "criterion 7c (halving dt reduces deviation)",
        &format!(
            "ratio {ratio} in [{}, {}]",
            HALVING_RATIO.0, HALVING_RATIO.1
        ),
    );
    assert!(pass, "ratio {ratio}");
}

#[test]
fn criterion_7d_ring_translation() {
    let (position_error, momentum_error) = verify::translation_run().unwrap();
    let pass = position_error < TRANSLATION_TOL && momentum_error <= MOMENTUM_TOL;
    line(
        pass,
        "criterion 7d (circular n=4 uniform translation)",
        &format!(
            "position error {position_error:e} < {TRANSLATION_TOL:e}, momentum error {momentum_error:e} <= {MOMENTUM_TOL:e}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_8_determinism() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_oscchain"))
            .args(["verify", "--n-max", "64"])
            .output()
            .expect("run oscchain")
    };
    let (first, second) = (run(), run());
    let pass = !first.stdout.is_empty()
        && first.stdout == second.stdout
        && first.status.code() == second.status.code();
    line(
        pass,
        "criterion 8 (determinism)",
        &format!(
            "two `verify --n-max 64` reports of {} bytes are identical: {}",
            first.stdout.len(),
            first.stdout == second.stdout
        ),
    );
    assert!(pass);
}
