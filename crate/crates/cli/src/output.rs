//! CSV writers. Floats use `{:.16e}` (17 significant digits), lines end in
//! LF, and every file opens with `#` comment lines describing the model and
//! any sample times moved off a breakpoint.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use warpcurv::cosmo::{c1_matching_residual, fluid_state};
use warpcurv::genfun::Location;
use warpcurv::verify::{verify_cosmology, verify_model, VerificationReport};
use warpcurv::warped::curvature_profile;

use crate::error::{CliError, Result};
use crate::scenario::{ModelKind, Nudge, OutputKind, Scenario, Spacing};

pub const PROFILE_HEADER: &str = "t,f,fp,fpp,ric_uu,ric_sp,scalar";
pub const EVENTS_HEADER: &str = "t_i,fpp_atom,ric_uu_atom,ric_sp_atom,scalar_atom";
pub const FLUID_HEADER: &str = "t,segment,rho,P,w";
pub const VERIFY_HEADER: &str = "check,passed,measured,threshold";

pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// `key = value` lines describing the model, shared by file headers and `describe`.
pub fn model_lines(s: &Scenario) -> Vec<String> {
    let m = s.model();
    let mut lines = Vec::new();
    match s.kind() {
        ModelKind::Preset {
            params,
            k_defaulted,
        } => {
            let (r1, r2) = c1_matching_residual(params);
            lines.push(format!("model = {}", crate::scenario::PRESET_NAME));
            lines.push(format!("time_unit = {}", params.time_unit()));
            lines.push(format!("c0 = {}", fmt_f(params.c0())));
            lines.push(format!("t1 = {}", fmt_f(params.t1())));
            lines.push(format!("t2 = {}", fmt_f(params.t2())));
            let origin = if *k_defaulted { " (default 2/(3 t2))" } else { "" };
            lines.push(format!("K = {}{origin}", fmt_f(params.k_rate())));
            lines.push(format!("lambda = {}", fmt_f(params.lambda())));
            lines.push(format!("c1 = {}", fmt_f(params.c1())));
            lines.push(format!("c2 = {}", fmt_f(params.c2())));
            lines.push(format!("r1 = {}", fmt_f(r1)));
            lines.push(format!("r2 = {}", fmt_f(r2)));
        }
        ModelKind::Custom => {
            lines.push("model = custom".into());
            lines.push(format!("k = {}", m.k()));
            lines.push(format!("lambda = {}", fmt_f(m.lambda())));
            for (i, seg) in m.scale_factor().segments().iter().enumerate() {
                lines.push(format!(
                    "segment {i} = ({}, {}): {}",
                    fmt_f(seg.lo),
                    fmt_f(seg.hi),
                    seg.law
                ));
            }
        }
    }
    for (t, class) in m.scale_factor().continuity_classes() {
        lines.push(format!("glue at {} = {class}", fmt_f(t)));
    }
    lines
}

fn header(s: &Scenario, title: &str, nudges: &[Nudge]) -> String {
    let mut out = format!("# warpcurv {title}\n");
    for line in model_lines(s) {
        let _ = writeln!(out, "# {line}");
    }
    if nudges.is_empty() {
        out.push_str("# nudged = none\n");
    }
    for n in nudges {
        let _ = writeln!(out, "# nudged = {} -> {}", fmt_f(n.requested), fmt_f(n.used));
    }
    out
}

fn csv_row(fields: &[f64]) -> String {
    let mut row = fields.iter().map(|&x| fmt_f(x)).collect::<Vec<_>>().join(",");
    row.push('\n');
    row
}

pub fn profile_csv(s: &Scenario) -> Result<String> {
    let (times, nudges) = s.sample_times();
    let profile = curvature_profile(s.model(), &times).map_err(CliError::computation("curvature profile"))?;
    let mut out = header(s, "curvature profile", &nudges);
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    for p in &profile.samples {
        out.push_str(&csv_row(&[p.t, p.f, p.fp, p.fpp, p.ric_uu, p.ric_sp, p.scalar]));
    }
    Ok(out)
}

pub fn events_csv(s: &Scenario) -> Result<String> {
    let profile = curvature_profile(s.model(), &[]).map_err(CliError::computation("delta events"))?;
    let mut out = header(s, "delta events", &[]);
    out.push_str(EVENTS_HEADER);
    out.push('\n');
    for e in &profile.events {
        out.push_str(&csv_row(&[e.t, e.fpp_atom, e.ric_uu_atom, e.ric_sp_atom, e.scalar_atom]));
    }
    Ok(out)
}

/// `w` is left empty where `ρ` vanishes.
pub fn fluid_csv(s: &Scenario) -> Result<String> {
    let (times, nudges) = s.sample_times();
    let m = s.model();
    let mut out = header(s, "fluid state", &nudges);
    out.push_str(FLUID_HEADER);
    out.push('\n');
    for t in times {
        let segment = match m.scale_factor().locate(t) {
            Ok(Location::Interior(i)) => i,
            Ok(Location::Breakpoint(_)) => unreachable!("sample times are nudged off breakpoints"),
            Err(e) => return Err(CliError::computation("fluid state")(e)),
        };
        let state = fluid_state(m, t).map_err(CliError::computation(format!("fluid state at t = {t}")))?;
        let w = state.w.map(fmt_f).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{segment},{},{},{w}",
            fmt_f(t),
            fmt_f(state.rho),
            fmt_f(state.pressure)
        );
    }
    Ok(out)
}

pub fn verification(s: &Scenario) -> Result<VerificationReport> {
    let opts = s.verify_options();
    let mut report = verify_model(s.model(), &opts).map_err(CliError::computation("verification"))?;
    if let Some(params) = s.params() {
        let extra = verify_cosmology(params, &opts).map_err(CliError::computation("verification"))?;
        report.checks.extend(extra);
    }
    Ok(report)
}

pub fn verify_csv(s: &Scenario, report: &VerificationReport) -> String {
    let mut out = header(s, "verification report", &[]);
    out.push_str(VERIFY_HEADER);
    out.push('\n');
    for c in &report.checks {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            c.name,
            if c.passed { "pass" } else { "fail" },
            fmt_f(c.measured),
            fmt_f(c.threshold)
        );
    }
    out
}

/// gnuplot script plotting whatever CSVs the scenario writes.
pub fn plot_script(s: &Scenario) -> String {
    let mut out = String::from("# gnuplot script written by warpcurv\n");
    out.push_str("set datafile separator ','\nset datafile commentschars '#'\n");
    out.push_str("set key autotitle columnhead\nset terminal pngcairo size 1000,700\n");
    if s.spacing() == Spacing::Log {
        out.push_str("set logscale x\n");
    }
    if s.outputs().contains(&OutputKind::Profile) {
        out.push_str("set output 'profile.png'\nset xlabel 't'\n");
        out.push_str(
            "plot 'profile.csv' using 1:5 with lines, '' using 1:6 with lines, '' using 1:7 with lines\n",
        );
    }
    if s.outputs().contains(&OutputKind::Events) {
        out.push_str("set output 'events.png'\n");
        out.push_str("plot 'events.csv' using 1:2 with impulses, '' using 1:5 with impulses\n");
    }
    if s.outputs().contains(&OutputKind::Fluid) {
        out.push_str("set output 'fluid.png'\n");
        out.push_str("plot 'fluid.csv' using 1:5 with points\n");
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub emit_plot_script: bool,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub written: Vec<PathBuf>,
    pub verification: Option<VerificationReport>,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(CliError::io(&path))?;
    Ok(path)
}

/// Writes every requested output. A failed verification is reported as an
/// error after the report itself has been written.
pub fn run(s: &Scenario, opts: &RunOptions) -> Result<RunSummary> {
    std::fs::create_dir_all(&opts.out_dir).map_err(CliError::io(&opts.out_dir))?;
    let mut written = Vec::new();
    let mut verification = None;
    for kind in s.outputs() {
        let (name, contents) = match kind {
            OutputKind::Profile => ("profile.csv", profile_csv(s)?),
            OutputKind::Events => ("events.csv", events_csv(s)?),
            OutputKind::Fluid => ("fluid.csv", fluid_csv(s)?),
            OutputKind::Verify => {
                let report = self::verification(s)?;
                let text = verify_csv(s, &report);
                verification = Some(report);
                ("verify.csv", text)
            }
        };
        written.push(write_file(&opts.out_dir, name, &contents)?);
    }
    if opts.emit_plot_script {
        written.push(write_file(&opts.out_dir, "plot.gp", &plot_script(s))?);
    }
    if let Some(report) = &verification {
        check_report(report)?;
    }
    Ok(RunSummary {
        written,
        verification,
    })
}

pub fn check_report(report: &VerificationReport) -> Result<()> {
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed {
            failed: report.failures().map(|c| c.name.clone()).collect(),
            total: report.checks.len(),
        })
    }
}

/// The text printed by `warpcurv describe`.
pub fn describe(s: &Scenario) -> String {
    let mut out = String::new();
    for line in model_lines(s) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(fmt_f(4.7e4), "4.7000000000000000e4");
        assert_eq!(fmt_f(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
