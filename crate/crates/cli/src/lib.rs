//! Command-line front end for the `csos` library.
//!
//! [`run`] parses an argument vector, executes one subcommand and returns the
//! process exit code together with the report it produced.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use csos::bethe::RESIDUAL_TARGET;
use csos::formfactor::{mean_szm, szm_between};
use csos::identities::{max_gaps, suite_appendix_a, suite_appendix_b, RandomTestConfig, VerifyReport};
use csos::thermo::{ff_limit, polarization, Formula, PolarizationQuery};
use csos::{solve_ground_state, Complex64, CsosError, GroundStateLabel, ModelParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Largest lattice accepted by `converge`.
pub const MAX_SWEEP_N: usize = 64;
/// Gap thresholds for the two identity suites.
pub const APPENDIX_A_TOL: f64 = 1e-10;
pub const APPENDIX_B_TOL: f64 = 1e-9;

/// Everything a subcommand produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub params: ModelParams,
    pub results: Value,
    /// Milliseconds per stage.
    pub timings: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
}

/// One CSV row. Columns: N, value_re, value_im, gap, runtime_ms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub value_re: Option<f64>,
    pub value_im: Option<f64>,
    pub gap: Option<f64>,
    pub runtime_ms: f64,
}

#[derive(Debug, Parser)]
#[command(
    name = "csos",
    version,
    about = "Ground states, form factors and polarizations of the cyclic SOS model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the Bethe equations for one ground state.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        k: i64,
        #[arg(long, default_value_t = 0)]
        ell: i64,
    },
    /// Normalized σ^z matrix element between two ground states.
    Formfactor {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_label)]
        bra: GroundStateLabel,
        #[arg(long, value_parser = parse_label)]
        ket: GroundStateLabel,
        #[arg(long, default_value_t = 1)]
        site: usize,
    },
    /// Mean value of σ^z in one ground state.
    Mean {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        k: i64,
        #[arg(long, default_value_t = 0)]
        ell: i64,
        #[arg(long, default_value_t = 1)]
        site: usize,
    },
    /// Spontaneous staggered polarization of a polarized ground state.
    Polarization {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        t: i64,
        #[arg(long, default_value_t = 0)]
        epsilon: i64,
        #[arg(long, default_value = "result2", value_parser = Formula::from_str)]
        formula: Formula,
        #[arg(long, default_value_t = 1)]
        site: usize,
    },
    /// Finite-size form factors against their thermodynamic limit.
    Converge {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_label, default_value = "0,0")]
        bra: GroundStateLabel,
        #[arg(long, value_parser = parse_label, default_value = "1,0")]
        ket: GroundStateLabel,
        #[arg(long, default_value_t = 1)]
        site: usize,
        #[arg(long = "N-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
    },
    /// Randomized checks of the theta-function identities.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = ["appendixA", "appendixB"])]
        suite: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long = "L", default_value_t = 3)]
    l: u32,
    #[arg(long = "tau-im", default_value_t = 1.0)]
    tau_im: f64,
    /// Real part of τ. Experimental: most quantities require imaginary τ.
    #[arg(long = "tau-re", default_value_t = 0.0)]
    tau_re: f64,
    #[arg(long = "N", default_value_t = 8)]
    n: usize,
    /// Theta-series truncation tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Output path; `.csv` selects CSV, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ModelArgs {
    fn params(&self) -> csos::Result<ModelParams> {
        if self.tau_re != 0.0 {
            warn!("--tau-re is experimental; density and thermodynamic routines require imaginary tau");
        }
        let tau = Complex64::new(self.tau_re, self.tau_im);
        match self.tol {
            Some(t) => ModelParams::with_tol(self.r, self.l, tau, self.n, t),
            None => ModelParams::new(self.r, self.l, tau, self.n),
        }
    }

    fn tolerances(&self, p: &ModelParams) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("theta_tol".to_string(), p.theta_tol()),
            ("bethe_residual".to_string(), RESIDUAL_TARGET),
        ])
    }
}

fn parse_label(s: &str) -> std::result::Result<GroundStateLabel, String> {
    let (k, ell) = s
        .split_once(',')
        .ok_or_else(|| format!("expected k,ell but got {s:?}"))?;
    let k = k.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let ell = ell.trim().parse::<i64>().map_err(|e| e.to_string())?;
    Ok(GroundStateLabel::new(k, ell))
}

/// Failure of a run, mapped to an exit code.
#[derive(Debug)]
enum RunError {
    Usage(String),
    Numerical(String),
}

impl From<CsosError> for RunError {
    fn from(e: CsosError) -> Self {
        if e.is_validation() {
            RunError::Usage(e.to_string())
        } else {
            RunError::Numerical(e.to_string())
        }
    }
}

impl RunError {
    fn code(&self) -> i32 {
        match self {
            RunError::Usage(_) => EXIT_USAGE,
            RunError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

fn c_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Output of one subcommand before serialization.
struct Outcome {
    report: RunReport,
    rows: Vec<CsvRow>,
    out: Option<PathBuf>,
    /// Set when the computation finished but failed its own check.
    failed: Option<String>,
}

/// Parse `argv` (including the program name), execute, and write the report
/// to stdout or `--out`.
pub fn run<I, T>(argv: I) -> (i32, Option<RunReport>)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return (code, None);
        }
    };
    match execute(cli.command) {
        Ok(o) => {
            if let Err(e) = emit(&o) {
                eprintln!("error: {e}");
                return (EXIT_USAGE, Some(o.report));
            }
            match &o.failed {
                Some(msg) => {
                    eprintln!("error: {msg}");
                    (EXIT_NUMERICAL, Some(o.report))
                }
                None => (EXIT_OK, Some(o.report)),
            }
        }
        Err(e) => {
            let msg = match &e {
                RunError::Usage(m) | RunError::Numerical(m) => m,
            };
            eprintln!("error: {msg}");
            (e.code(), None)
        }
    }
}

fn emit(o: &Outcome) -> std::io::Result<()> {
    match &o.out {
        None => {
            let text = serde_json::to_string_pretty(&o.report)?;
            match writeln!(std::io::stdout().lock(), "{text}") {
                // A closed pipe (e.g. `| head`) is not an error for us.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r,
            }
        }
        Some(path) if is_csv(path) => {
            let mut w = csv::Writer::from_path(path)?;
            for row in &o.rows {
                w.serialize(row)?;
            }
            w.flush()
        }
        Some(path) => fs::write(path, serde_json::to_string_pretty(&o.report)?),
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn execute(cmd: Command) -> Result<Outcome, RunError> {
    match cmd {
        Command::Solve { model, k, ell } => {
            let p = model.params()?;
            let t0 = Instant::now();
            let st = solve_ground_state(GroundStateLabel::new(k, ell), &p)?;
            let dt = ms(t0);
            info!("solved ({k},{ell}) at N={} with residual {:e}", p.n_sites, st.residual);
            let rows = vec![CsvRow {
                n: Some(p.n_sites),
                value_re: Some(st.root_sum()),
                value_im: Some(0.0),
                gap: Some(st.residual),
                runtime_ms: dt,
            }];
            Ok(outcome(
                "solve",
                &model,
                p,
                serde_json::to_value(&st).unwrap(),
                dt,
                rows,
            ))
        }
        Command::Formfactor { model, bra, ket, site } => {
            let p = model.params()?;
            let t0 = Instant::now();
            let x = solve_ground_state(bra, &p)?;
            let y = solve_ground_state(ket, &p)?;
            let ff = szm_between(&x, &y, site, &p)?;
            let dt = ms(t0);
            let rows = vec![CsvRow {
                n: Some(p.n_sites),
                value_re: Some(ff.value_re),
                value_im: Some(ff.value_im),
                gap: None,
                runtime_ms: dt,
            }];
            Ok(outcome(
                "formfactor",
                &model,
                p,
                serde_json::to_value(&ff).unwrap(),
                dt,
                rows,
            ))
        }
        Command::Mean { model, k, ell, site } => {
            let p = model.params()?;
            let t0 = Instant::now();
            let st = solve_ground_state(GroundStateLabel::new(k, ell), &p)?;
            let v = mean_szm(&st, site, &p)?;
            let dt = ms(t0);
            let rows = vec![CsvRow {
                n: Some(p.n_sites),
                value_re: Some(v.re),
                value_im: Some(v.im),
                gap: None,
                runtime_ms: dt,
            }];
            let res = json!({ "label": st.label, "site": site, "value": c_json(v) });
            Ok(outcome("mean", &model, p, res, dt, rows))
        }
        Command::Polarization {
            model,
            t,
            epsilon,
            formula,
            site,
        } => {
            let p = model.params()?;
            if site == 0 {
                return Err(RunError::Usage("site must be at least 1".into()));
            }
            let q = PolarizationQuery {
                epsilon,
                t,
                site_parity: (site % 2) as u8,
                formula,
            };
            let t0 = Instant::now();
            let v = polarization(&q, &p)?;
            let dt = ms(t0);
            let rows = vec![CsvRow {
                n: None,
                value_re: Some(v.re),
                value_im: Some(v.im),
                gap: None,
                runtime_ms: dt,
            }];
            let res = json!({ "query": q, "site": site, "value": c_json(v) });
            Ok(outcome("polarization", &model, p, res, dt, rows))
        }
        Command::Converge {
            model,
            bra,
            ket,
            site,
            n_list,
        } => converge(model, bra, ket, site, n_list),
        Command::Verify {
            model,
            suite,
            trials,
            seed,
        } => verify(model, &suite, trials, seed),
    }
}

fn outcome(command: &str, model: &ModelArgs, p: ModelParams, results: Value, dt: f64, rows: Vec<CsvRow>) -> Outcome {
    let tolerances = model.tolerances(&p);
    Outcome {
        report: RunReport {
            command: command.into(),
            params: p,
            results,
            timings: BTreeMap::from([("total".to_string(), dt)]),
            tolerances,
        },
        rows,
        out: model.out.clone(),
        failed: None,
    }
}

/// Thermodynamic limit of the form factor between two ground states.
fn limit_value(bra: GroundStateLabel, ket: GroundStateLabel, site: usize, p: &ModelParams) -> csos::Result<Complex64> {
    let k = ket.k - bra.k;
    if k.rem_euclid(2) == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if k != 1 {
        return Err(CsosError::NotApplicable(format!(
            "limit known for bra (0,l), ket (1,l') or equal k; got {bra:?} / {ket:?}"
        )));
    }
    ff_limit(k, ket.ell - bra.ell, site, p)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweepRow {
    #[serde(rename = "N")]
    n: usize,
    value: Value,
    limit: Value,
    gap: f64,
    runtime_ms: f64,
}

fn converge(
    model: ModelArgs,
    bra: GroundStateLabel,
    ket: GroundStateLabel,
    site: usize,
    n_list: Vec<usize>,
) -> Result<Outcome, RunError> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RunError::Usage("N-list must be strictly ascending".into()));
    }
    if n_list.last().is_some_and(|&n| n > MAX_SWEEP_N) {
        return Err(RunError::Usage(format!("N-list entries must be at most {MAX_SWEEP_N}")));
    }
    let p = model.params()?;
    let t0 = Instant::now();
    let limit = limit_value(bra, ket, site, &p)?;
    let rows: Vec<csos::Result<(usize, Complex64, f64)>> = n_list
        .par_iter()
        .map(|&n| {
            let t = Instant::now();
            let pn = p.with_n_sites(n)?;
            let x = solve_ground_state(bra, &pn)?;
            let y = solve_ground_state(ket, &pn)?;
            let v = szm_between(&x, &y, site, &pn)?.value();
            Ok((n, v, ms(t)))
        })
        .collect();
    let rows = rows.into_iter().collect::<csos::Result<Vec<_>>>()?;
    let table: Vec<SweepRow> = rows
        .iter()
        .map(|&(n, v, dt)| SweepRow {
            n,
            value: c_json(v),
            limit: c_json(limit),
            gap: (v - limit).norm(),
            runtime_ms: dt,
        })
        .collect();
    let monotone = table.windows(2).all(|w| w[1].gap < w[0].gap);
    if !monotone {
        warn!("gap sequence is not strictly decreasing");
    }
    let csv_rows = rows
        .iter()
        .zip(&table)
        .map(|(&(n, v, dt), r)| CsvRow {
            n: Some(n),
            value_re: Some(v.re),
            value_im: Some(v.im),
            gap: Some(r.gap),
            runtime_ms: dt,
        })
        .collect();
    let res = json!({
        "bra": bra,
        "ket": ket,
        "site": site,
        "limit": c_json(limit),
        "rows": table,
        "monotone": monotone,
        "non_monotone_warning": !monotone,
    });
    let mut o = outcome("converge", &model, p, res, ms(t0), csv_rows);
    o.report.tolerances.insert("max_sweep_N".into(), MAX_SWEEP_N as f64);
    Ok(o)
}

fn verify(model: ModelArgs, suite: &str, trials: usize, seed: u64) -> Result<Outcome, RunError> {
    let p = model.params()?;
    let t0 = Instant::now();
    let (reports, tol): (Vec<VerifyReport>, f64) = match suite {
        "appendixA" => {
            let mut cfg = RandomTestConfig::new(seed, trials, (1, 6));
            cfg.tau = p.tau;
            (suite_appendix_a(cfg)?, APPENDIX_A_TOL)
        }
        "appendixB" => {
            let mut cfg = RandomTestConfig::new(seed, trials, (2, 4));
            cfg.tau = p.tau;
            (suite_appendix_b(cfg)?, APPENDIX_B_TOL)
        }
        other => return Err(RunError::Usage(format!("unknown suite {other}"))),
    };
    let dt = ms(t0);
    let worst = max_gaps(&reports);
    let max_gap = worst.iter().map(|(_, g)| *g).fold(0.0, f64::max);
    let rows = reports
        .iter()
        .map(|r| CsvRow {
            n: Some(r.n),
            value_re: None,
            value_im: None,
            gap: Some(r.gap),
            runtime_ms: dt / reports.len() as f64,
        })
        .collect();
    let res = json!({
        "suite": suite,
        "seed": seed,
        "trials": trials,
        "max_gap": max_gap,
        "max_gap_by_identity": worst.iter().cloned().collect::<BTreeMap<_, _>>(),
        "reports": reports,
    });
    let mut o = outcome("verify", &model, p, res, dt, rows);
    o.report.tolerances.insert("identity_gap".into(), tol);
    if max_gap >= tol {
        o.failed = Some(format!("{suite}: max gap {max_gap:e} exceeds {tol:e}"));
    }
    Ok(o)
}
