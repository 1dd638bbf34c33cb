use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use qotto::cycle::{
    strong_cycle, strong_cycle_via_oracle, CycleConfig, CycleParams, CycleReport, Regime,
};
use qotto::scan::{power_trace, witness_scan};
use qotto::{run_sweep, CouplingProfile, ProfileShape, SweepMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::Command;
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, fmt_opt, Table};
use crate::settings::Settings;

pub const DYNAMICS_POINTS: usize = 2001;
pub const WITNESS_POINTS: usize = 2000;
pub const WITNESS_T_MAX: f64 = 2.0;
pub const AUDIT_POINTS: usize = 100;

/// What a command produced: the CSV and an optional human-readable summary.
pub struct Outcome {
    pub table: Table,
    pub summary: Option<String>,
    /// Set when a law audit failed; the CSV is still written.
    pub audit_failure: Option<String>,
}

impl Outcome {
    fn plain(table: Table) -> Self {
        Self {
            table,
            summary: None,
            audit_failure: None,
        }
    }
}

fn metadata(command: Command, settings: &Settings) -> Vec<String> {
    let mut lines = vec![
        format!("qotto {}", env!("CARGO_PKG_VERSION")),
        format!("command={}", command.name()),
    ];
    lines.extend(settings.echo.iter().map(|(k, v)| format!("{k}={v}")));
    lines
}

fn scan_profiles(settings: &Settings) -> CliResult<Vec<CouplingProfile>> {
    let mut profiles = vec![
        CouplingProfile::markovian(settings.g)?,
        CouplingProfile::non_markovian(settings.g)?,
    ];
    if let Some(table) = &settings.table {
        profiles.push(CouplingProfile::tabulated(table.clone(), settings.g)?);
    }
    Ok(profiles)
}

pub fn dynamics(settings: &Settings) -> CliResult<Table> {
    let profiles = scan_profiles(settings)?;
    let t_max = settings.t_max.unwrap_or(5.0 * settings.g);
    let points = settings.points.unwrap_or(DYNAMICS_POINTS);
    let mut header = vec!["t".to_string()];
    header.extend(
        profiles
            .iter()
            .map(|p| format!("p_ratio_{}", p.name().replace('_', ""))),
    );
    let mut table = Table {
        header,
        ..Table::default()
    };
    for row in power_trace(&profiles, t_max, points)? {
        let mut cells = vec![fmt_f64(row.t)];
        cells.extend(row.ratios.iter().copied().map(fmt_f64));
        table.push(cells);
    }
    Ok(table)
}

pub fn witness(settings: &Settings) -> CliResult<Table> {
    let profiles = scan_profiles(settings)?;
    let t_max = settings.t_max.unwrap_or(WITNESS_T_MAX);
    let points = settings.points.unwrap_or(WITNESS_POINTS);
    let mut table = Table::new(&[
        "profile",
        "t",
        "f",
        "F",
        "gamma",
        "markovian_flag",
        "witness_min_eigenvalue",
    ]);
    for profile in &profiles {
        for row in witness_scan(profile, settings.omega, t_max, points)? {
            table.push(vec![
                profile.name().to_string(),
                fmt_f64(row.t),
                fmt_f64(row.f),
                fmt_f64(row.phase),
                fmt_f64(row.gamma),
                row.flag.code().to_string(),
                fmt_f64(row.witness_min_eigenvalue),
            ]);
        }
    }
    Ok(table)
}

pub fn cycle(settings: &Settings) -> CliResult<Outcome> {
    let config = CycleConfig::new(settings.cycle.clone())?;
    let report = strong_cycle(&config)?;
    let oracle = if settings.oracle {
        Some(strong_cycle_via_oracle(&config, settings.steps)?)
    } else {
        None
    };

    let mut header = vec![
        "stroke",
        "W",
        "Q",
        "E_initial",
        "E_final",
        "entropy_production",
        "first_law_residual",
    ];
    if oracle.is_some() {
        header.extend(["oracle_W", "oracle_Q", "oracle_E_final", "oracle_deviation"]);
    }
    let mut table = Table::new(&header);
    for (k, entry) in report.entries.iter().enumerate() {
        let l = &entry.ledger;
        let mut row = vec![
            entry.stroke.name().to_string(),
            fmt_f64(l.work),
            fmt_f64(l.heat),
            fmt_f64(l.internal_energy_initial),
            fmt_f64(l.internal_energy_final),
            fmt_f64(l.entropy_production),
            fmt_f64(l.first_law_residual()),
        ];
        if let Some(o) = &oracle {
            let m = &o.entries[k].ledger;
            let dev = [
                (l.work, m.work),
                (l.heat, m.heat),
                (l.internal_energy_final, m.internal_energy_final),
            ]
            .iter()
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
            row.extend([
                fmt_f64(m.work),
                fmt_f64(m.heat),
                fmt_f64(m.internal_energy_final),
                fmt_f64(dev),
            ]);
        }
        table.push(row);
    }
    let total = |r: &CycleReport| {
        let first = &r.entries[0].ledger;
        let last = &r.entries[r.entries.len() - 1].ledger;
        let sigma: f64 = r.entries.iter().map(|e| e.ledger.entropy_production).sum();
        (
            r.flows.work,
            r.flows.q_h + r.flows.q_c,
            first.internal_energy_initial,
            last.internal_energy_final,
            sigma,
        )
    };
    let (w, q, e0, e1, sigma) = total(&report);
    let mut row = vec![
        "total".to_string(),
        fmt_f64(w),
        fmt_f64(q),
        fmt_f64(e0),
        fmt_f64(e1),
        fmt_f64(sigma),
        fmt_f64(report.audits.first_law_cycle_residual),
    ];
    if let Some(o) = &oracle {
        let (ow, oq, _, oe1, _) = total(o);
        row.extend([
            fmt_f64(ow),
            fmt_f64(oq),
            fmt_f64(oe1),
            fmt_opt(o.audits.oracle_max_deviation),
        ]);
    }
    table.push(row);

    let mut failures = report.audit_failures();
    if let Some(o) = &oracle {
        failures.extend(
            o.audit_failures()
                .into_iter()
                .map(|f| format!("oracle: {f}")),
        );
    }
    let summary = summarize(&report, oracle.as_ref(), &failures);
    Ok(Outcome {
        table,
        summary: Some(summary),
        audit_failure: (!failures.is_empty()).then(|| failures.join("; ")),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |v| format!("{v:.10}"))
}

fn summarize(r: &CycleReport, oracle: Option<&CycleReport>, failures: &[String]) -> String {
    let b = &r.baselines;
    let mut s = String::new();
    let _ = writeln!(s, "regime              {}", r.regime.name());
    let _ = writeln!(s, "ratio-rule regime   {}", r.ratio_rule_regime.name());
    match r.regime {
        Regime::Engine => {
            let _ = writeln!(
                s,
                "efficiency          {}  (weak coupling {:.10})",
                opt(r.metrics.eta),
                b.eta0
            );
            let _ = writeln!(
                s,
                "power               {}  (weak coupling {})",
                opt(r.metrics.power),
                opt(b.p0)
            );
            let _ = writeln!(s, "Carnot bound        {:.10}", b.carnot_eta);
        }
        Regime::Refrigerator => {
            let _ = writeln!(
                s,
                "COP                 {}  (weak coupling {:.10})",
                opt(r.metrics.cop),
                b.k0
            );
            let _ = writeln!(
                s,
                "cooling rate        {}  (weak coupling {})",
                opt(r.metrics.kappa),
                opt(b.kappa0)
            );
            let _ = writeln!(s, "Carnot bound        {:.10}", b.carnot_cop);
        }
        Regime::Other => {
            let _ = writeln!(
                s,
                "Carnot bounds       efficiency {:.10}, COP {:.10}",
                b.carnot_eta, b.carnot_cop
            );
        }
    }
    let _ = writeln!(s, "work                {:.10}", r.flows.work);
    let _ = writeln!(
        s,
        "heat (hot, cold)    {:.10}, {:.10}",
        r.flows.q_h, r.flows.q_c
    );
    let _ = writeln!(s, "sin^2 F (hot, cold) {:.10}, {:.10}", r.sin2_h, r.sin2_c);
    let _ = writeln!(s, "Carnot satisfied    {}", r.audits.carnot_satisfied);
    let _ = writeln!(s, "cyclicity residual  {:.3e}", r.cyclicity_residual);
    if let Some(o) = oracle {
        let _ = writeln!(
            s,
            "oracle deviation    {}",
            o.audits
                .oracle_max_deviation
                .map_or("n/a".into(), |d| format!("{d:.3e}"))
        );
    }
    if failures.is_empty() {
        let _ = writeln!(s, "law audits          pass");
    } else {
        let _ = writeln!(s, "law audits          FAIL");
        for f in failures {
            let _ = writeln!(s, "  {f}");
        }
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

const SWEEP_HEADER: [&str; 18] = [
    "index",
    "axis",
    "value",
    "valid",
    "error",
    "regime",
    "W",
    "Q_h",
    "Q_c",
    "eta",
    "power",
    "cop",
    "kappa",
    "sin2_h",
    "sin2_c",
    "cyclicity_residual",
    "oracle_max_deviation",
    "audits_pass",
];

pub fn sweep(settings: &Settings) -> CliResult<Outcome> {
    let spec = settings
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("sweep needs --sweep AXIS:LO:HI:N".into()))?;
    let method = if settings.oracle {
        SweepMethod::Oracle {
            steps: settings.steps,
        }
    } else {
        SweepMethod::ClosedForm
    };
    let mut table = Table::new(&SWEEP_HEADER);
    let mut failed = Vec::new();
    for point in run_sweep(&settings.cycle, spec, method) {
        let mut row = vec![
            point.index.to_string(),
            spec.axis.name().to_string(),
            fmt_f64(point.value),
        ];
        match &point.outcome {
            Ok(r) => {
                let pass = r.audits_pass();
                if !pass {
                    failed.push(point.index.to_string());
                }
                row.extend([
                    "1".to_string(),
                    String::new(),
                    r.regime.name().to_string(),
                    fmt_f64(r.flows.work),
                    fmt_f64(r.flows.q_h),
                    fmt_f64(r.flows.q_c),
                    fmt_opt(r.metrics.eta),
                    fmt_opt(r.metrics.power),
                    fmt_opt(r.metrics.cop),
                    fmt_opt(r.metrics.kappa),
                    fmt_f64(r.sin2_h),
                    fmt_f64(r.sin2_c),
                    fmt_f64(r.cyclicity_residual),
                    fmt_opt(r.audits.oracle_max_deviation),
                    u8::from(pass).to_string(),
                ]);
            }
            Err(e) => {
                row.extend(["0".to_string(), e.to_string()]);
                row.resize(SWEEP_HEADER.len(), String::new());
            }
        }
        table.push(row);
    }
    let audit_failure = (!failed.is_empty())
        .then(|| format!("law audits failed at sweep points {}", failed.join(", ")));
    Ok(Outcome {
        table,
        summary: None,
        audit_failure,
    })
}

/// A random cycle with both contact profiles drawn from the analytic shapes.
pub fn random_params(rng: &mut impl Rng) -> CycleParams {
    let shape = |rng: &mut dyn rand::RngCore| {
        if rng.gen_bool(0.5) {
            ProfileShape::MarkovianSemigroup
        } else {
            ProfileShape::NonMarkovianCorrected
        }
    };
    let omega_c = rng.gen_range(0.3..2.0);
    let beta_c = rng.gen_range(0.2..2.5);
    CycleParams {
        omega_c,
        omega_h: omega_c * rng.gen_range(1.1..3.0),
        beta_c,
        beta_h: beta_c * rng.gen_range(0.05..0.95),
        tau_u1: rng.gen_range(0.0..2.0),
        tau_h: rng.gen_range(0.05..6.0),
        tau_u2: rng.gen_range(0.0..2.0),
        tau_c: rng.gen_range(0.05..6.0),
        shape_h: shape(rng),
        shape_c: shape(rng),
    }
}

pub fn audit(settings: &Settings) -> CliResult<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let points = settings.points.unwrap_or(AUDIT_POINTS);
    let mut table = Table::new(&[
        "index",
        "omega_c",
        "omega_h",
        "beta_c",
        "beta_h",
        "tau_u1",
        "tau_h",
        "tau_u2",
        "tau_c",
        "profile_h",
        "profile_c",
        "regime",
        "pass",
        "failures",
    ]);
    let mut failed = 0usize;
    for index in 0..points {
        let params = random_params(&mut rng);
        let config = CycleConfig::new(params.clone())?;
        let mut failures = strong_cycle(&config)?.audit_failures();
        let regime = qotto::weak_cycle(&config)?.regime;
        if settings.oracle {
            let o = strong_cycle_via_oracle(&config, settings.steps)?;
            failures.extend(
                o.audit_failures()
                    .into_iter()
                    .map(|f| format!("oracle: {f}")),
            );
        }
        if !failures.is_empty() {
            failed += 1;
        }
        table.push(vec![
            index.to_string(),
            fmt_f64(params.omega_c),
            fmt_f64(params.omega_h),
            fmt_f64(params.beta_c),
            fmt_f64(params.beta_h),
            fmt_f64(params.tau_u1),
            fmt_f64(params.tau_h),
            fmt_f64(params.tau_u2),
            fmt_f64(params.tau_c),
            config.profile_h.name().to_string(),
            config.profile_c.name().to_string(),
            regime.name().to_string(),
            u8::from(failures.is_empty()).to_string(),
            failures.join("; "),
        ]);
    }
    let summary = format!(
        "audited {points} random cycles with seed {}: {failed} failed\n",
        settings.seed
    );
    let audit_failure =
        (failed > 0).then(|| format!("{failed} of {points} random cycles failed law audits"));
    Ok(Outcome {
        table,
        summary: Some(summary),
        audit_failure,
    })
}

pub fn execute(command: Command, settings: &Settings) -> CliResult<Outcome> {
    let mut outcome = match command {
        Command::Dynamics => Outcome::plain(dynamics(settings)?),
        Command::Witness => Outcome::plain(witness(settings)?),
        Command::Cycle => cycle(settings)?,
        Command::Sweep => sweep(settings)?,
        Command::Audit => audit(settings)?,
    };
    outcome.table.metadata = metadata(command, settings);
    Ok(outcome)
}

/// Runs `command`, writes its CSV and summary, and maps audit failures to an error.
pub fn run(command: Command, settings: &Settings) -> CliResult<Option<PathBuf>> {
    let outcome = execute(command, settings)?;
    let path = settings.output_path(command.name());
    if let Some(dir) = path
        .as_ref()
        .and_then(|p| p.parent())
        .filter(|d| !d.as_os_str().is_empty())
    {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    outcome.table.write(path.as_deref())?;
    if let Some(summary) = &outcome.summary {
        // Keep stdout clean when it carries the CSV.
        if path.is_some() {
            print!("{summary}");
            std::io::stdout().flush()?;
        } else {
            eprint!("{summary}");
        }
    }
    match outcome.audit_failure {
        Some(msg) => Err(CliError::Audit(msg)),
        None => Ok(path),
    }
}
