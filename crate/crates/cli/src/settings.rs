use std::path::{Path, PathBuf};

use qotto::cycle::CycleParams;
use qotto::{ProfileShape, SweepSpec, TabulatedCoupling};
use serde::Deserialize;

use crate::args::Options;
use crate::error::{CliError, CliResult};

pub const OUT_DIR_ENV: &str = "QOTTO_OUT_DIR";

/// Keys accepted in a configuration file. Unknown keys are errors.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub omega_c: Option<f64>,
    pub omega_h: Option<f64>,
    pub beta_c: Option<f64>,
    pub beta_h: Option<f64>,
    pub tau_u1: Option<f64>,
    pub tau_h: Option<f64>,
    pub tau_u2: Option<f64>,
    pub tau_c: Option<f64>,
    pub profile_h: Option<String>,
    pub profile_c: Option<String>,
    pub table_h: Option<PathBuf>,
    pub table_c: Option<PathBuf>,
    pub g: Option<f64>,
    pub omega: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub oracle: Option<bool>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub sweep: Option<String>,
    pub seed: Option<u64>,
    pub table: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = Self::parse(&text)?;
        // Table paths in a config file are relative to that file.
        let base = path.parent().unwrap_or(Path::new(""));
        for table in [&mut config.table_h, &mut config.table_c, &mut config.table] {
            if let Some(p) = table.as_mut() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(config)
    }
}

/// Merged run settings: defaults, then the config file, then flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub cycle: CycleParams,
    pub g: f64,
    pub omega: f64,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub oracle: bool,
    pub steps: usize,
    pub out: Option<PathBuf>,
    pub sweep: Option<SweepSpec>,
    pub seed: u64,
    pub table: Option<TabulatedCoupling>,
    /// `key=value` pairs echoed into CSV metadata.
    pub echo: Vec<(String, String)>,
}

pub const DEFAULT_G: f64 = 0.8;
pub const DEFAULT_STEPS: usize = 201;
pub const DEFAULT_SEED: u64 = 0;

fn load_table(path: &Path) -> CliResult<TabulatedCoupling> {
    TabulatedCoupling::load(path).map_err(|e| match e {
        qotto::Error::Io(msg) => CliError::Runtime(msg),
        other => CliError::Usage(format!("{}: {other}", path.display())),
    })
}

fn shape(field: &str, name: Option<&str>, table: Option<&Path>) -> CliResult<ProfileShape> {
    match name.unwrap_or("markovian") {
        "markovian" => Ok(ProfileShape::MarkovianSemigroup),
        "non_markovian" => Ok(ProfileShape::NonMarkovianCorrected),
        "tabulated" => {
            let path = table.ok_or_else(|| {
                CliError::Usage(format!("{field} = tabulated needs a table file"))
            })?;
            Ok(ProfileShape::Tabulated(load_table(path)?))
        }
        other => Err(CliError::Usage(format!(
            "{field}: unknown profile '{other}' (expected markovian, non_markovian or tabulated)"
        ))),
    }
}

impl Settings {
    pub fn resolve(opts: &Options) -> CliResult<Self> {
        let file = match &opts.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(file, opts)
    }

    pub fn merge(file: FileConfig, opts: &Options) -> CliResult<Self> {
        let d = CycleParams::default();
        let pick =
            |flag: Option<f64>, key: Option<f64>, default: f64| flag.or(key).unwrap_or(default);
        let profile_h = opts.profile_h.clone().or(file.profile_h);
        let profile_c = opts.profile_c.clone().or(file.profile_c);
        let table_h = opts.table_h.clone().or(file.table_h);
        let table_c = opts.table_c.clone().or(file.table_c);
        let cycle = CycleParams {
            omega_c: pick(opts.omega_c, file.omega_c, d.omega_c),
            omega_h: pick(opts.omega_h, file.omega_h, d.omega_h),
            beta_c: pick(opts.beta_c, file.beta_c, d.beta_c),
            beta_h: pick(opts.beta_h, file.beta_h, d.beta_h),
            tau_u1: pick(opts.tau_u1, file.tau_u1, d.tau_u1),
            tau_h: pick(opts.tau_h, file.tau_h, d.tau_h),
            tau_u2: pick(opts.tau_u2, file.tau_u2, d.tau_u2),
            tau_c: pick(opts.tau_c, file.tau_c, d.tau_c),
            shape_h: shape("profile_h", profile_h.as_deref(), table_h.as_deref())?,
            shape_c: shape("profile_c", profile_c.as_deref(), table_c.as_deref())?,
        };
        let sweep = opts
            .sweep
            .clone()
            .or(file.sweep)
            .map(|s| {
                s.parse::<SweepSpec>()
                    .map_err(|e| CliError::Usage(e.to_string()))
            })
            .transpose()?;
        let table = opts
            .table
            .clone()
            .or(file.table)
            .map(|p| load_table(&p))
            .transpose()?;
        let mut settings = Self {
            g: pick(opts.g, file.g, DEFAULT_G),
            omega: pick(opts.omega, file.omega, 1.0),
            t_max: opts.t_max.or(file.t_max),
            points: opts.points.or(file.points),
            oracle: opts.oracle || file.oracle.unwrap_or(false),
            steps: opts.steps.or(file.steps).unwrap_or(DEFAULT_STEPS),
            out: opts.out.clone().or(file.out),
            seed: opts.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            sweep,
            table,
            echo: Vec::new(),
            cycle,
        };
        settings.echo = vec![
            ("omega_c".into(), settings.cycle.omega_c.to_string()),
            ("omega_h".into(), settings.cycle.omega_h.to_string()),
            ("beta_c".into(), settings.cycle.beta_c.to_string()),
            ("beta_h".into(), settings.cycle.beta_h.to_string()),
            ("tau_u1".into(), settings.cycle.tau_u1.to_string()),
            ("tau_h".into(), settings.cycle.tau_h.to_string()),
            ("tau_u2".into(), settings.cycle.tau_u2.to_string()),
            ("tau_c".into(), settings.cycle.tau_c.to_string()),
            (
                "profile_h".into(),
                profile_h.unwrap_or_else(|| "markovian".into()),
            ),
            (
                "profile_c".into(),
                profile_c.unwrap_or_else(|| "markovian".into()),
            ),
            ("g".into(), settings.g.to_string()),
            ("omega".into(), settings.omega.to_string()),
            ("oracle".into(), settings.oracle.to_string()),
            ("steps".into(), settings.steps.to_string()),
            ("seed".into(), settings.seed.to_string()),
        ];
        if let Some(spec) = &settings.sweep {
            settings.echo.push(("sweep".into(), spec.to_string()));
        }
        Ok(settings)
    }

    /// `--out`, else `$QOTTO_OUT_DIR/<command>.csv`, else `None` for stdout.
    pub fn output_path(&self, command: &str) -> Option<PathBuf> {
        self.out.clone().or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|v| !v.is_empty())
                .map(|dir| PathBuf::from(dir).join(format!("{command}.csv")))
        })
    }
}
