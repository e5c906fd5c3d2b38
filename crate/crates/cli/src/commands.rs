use std::path::PathBuf;

use periods_core::statistics::{
    benoist_report, clt_report, collect, count_and_fit, histogram, proximal_fraction, synthetic_dataset,
    BenoistReport, CltReport, CollectOptions, Dataset, GrowthFit, Observable, ProximalReport,
};
use periods_core::suites::{class_suites, power_limit_suite, random_suites, PowerLimitResult, SuiteResult};
use periods_core::words::enumerate_classes_with_budget;
use periods_core::{canonical_class, schottky_sl2, sym_power, CountMode, Error, ExteriorLift, GroupRep, Word};
use serde::Serialize;

use crate::config::{Family, RunConfig};
use crate::error::CliError;
use crate::output::{opt_real, real, OutDir};

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    tool_version: &'a str,
    representation: &'a str,
    dim: usize,
    rank: usize,
    letter_order: String,
    rows: usize,
    config: RunConfig,
}

fn canonical(cfg: &RunConfig) -> RunConfig {
    let mut c = cfg.clone();
    c.run.workers = 0;
    c.run.out = None;
    c
}

fn metadata(out: &OutDir, command: &str, cfg: &RunConfig, rep: &GroupRep, rows: usize) -> Result<PathBuf, CliError> {
    let letters: Vec<String> = rep.alphabet().letters().map(|l| l.to_char().to_string()).collect();
    out.json(
        &format!("{command}.meta.json"),
        &Metadata {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            representation: rep.label(),
            dim: rep.dim(),
            rank: rep.alphabet().rank(),
            letter_order: letters.join(" < "),
            rows,
            config: canonical(cfg),
        },
    )
}

fn collect_options(cfg: &RunConfig) -> CollectOptions {
    CollectOptions {
        max_len: cfg.enumeration.max_len,
        mode: cfg.enumeration.mode,
        r: cfg.proximality.r,
        eps: cfg.proximality.eps,
        n_samples: cfg.proximality.samples,
        class_budget: cfg.enumeration.class_budget,
    }
}

/// `classes.csv`: one row per class in enumeration order.
pub fn enumerate(cfg: &RunConfig, out: &OutDir) -> Result<Vec<PathBuf>, CliError> {
    let rep = cfg.build_rep()?;
    let e = &cfg.enumeration;
    let classes = enumerate_classes_with_budget(rep.alphabet(), e.max_len, e.mode, e.class_budget)?;
    let header = ["class_id", "length", "period", "word"].map(String::from);
    let rows = classes
        .iter()
        .enumerate()
        .map(|(i, c)| vec![i.to_string(), c.len().to_string(), c.period().to_string(), c.to_string()]);
    let csv = out.csv("classes.csv", &header, rows)?;
    let meta = metadata(out, "enumerate", cfg, &rep, classes.len())?;
    Ok(vec![csv, meta])
}

pub fn dataset(cfg: &RunConfig) -> Result<(GroupRep, Dataset), CliError> {
    let rep = cfg.build_rep()?;
    let lift = ExteriorLift::new(&rep)?;
    let functionals = cfg.functionals(rep.dim())?;
    let ds = collect(&lift, &functionals, &collect_options(cfg))?;
    Ok((rep, ds))
}

/// `spectra.csv`: periods, Cartan values and Gromov terms per functional,
/// plus the proximality certificate of each class.
pub fn spectra(cfg: &RunConfig, out: &OutDir) -> Result<Vec<PathBuf>, CliError> {
    let (rep, ds) = dataset(cfg)?;
    let mut header: Vec<String> =
        ["class_id", "word", "length", "rotation", "proximal", "prox_gap"].map(String::from).to_vec();
    for col in ["jordan_period", "cartan_value", "class_gromov"] {
        header.extend(ds.functionals.iter().map(|f| format!("{col}_{}", f.name())));
    }
    header.extend(["cert_r_value", "cert_eps", "cert_proximal", "cert_method", "cert_failed"].map(String::from));
    let rows = ds.records.iter().map(|r| {
        let mut row = vec![
            r.class_id.to_string(),
            r.word.clone(),
            r.length.to_string(),
            r.rotation.to_string(),
            r.proximal.to_string(),
            real(r.prox_gap),
        ];
        row.extend(r.jordan_period.iter().map(|&x| real(x)));
        row.extend(r.cartan_value.iter().map(|&x| real(x)));
        row.extend(r.class_gromov.iter().map(|&x| opt_real(x)));
        match &r.cert {
            Some(c) => {
                row.push(real(c.r_value));
                row.push(real(c.eps_estimate));
                row.push(c.is_proximal.to_string());
                row.push(enum_name(&c.method));
                row.push(c.failed.as_ref().map(enum_name).unwrap_or_default());
            }
            None => row.extend(std::iter::repeat_n(String::new(), 5)),
        }
        row
    });
    let csv = out.csv("spectra.csv", &header, rows)?;
    let meta = metadata(out, "spectra", cfg, &rep, ds.records.len())?;
    Ok(vec![csv, meta])
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub random: Vec<SuiteResult>,
    pub classes: Vec<SuiteResult>,
    pub power_limit: Vec<PowerLimitResult>,
    pub passed: bool,
}

fn class_reps(cfg: &RunConfig, rep: GroupRep) -> Result<Vec<GroupRep>, CliError> {
    let r = &cfg.representation;
    if r.family == Family::File {
        return Ok(vec![rep]);
    }
    let base = schottky_sl2(r.multiplier, r.angle)?;
    let mut powers = cfg.verify.class_sym_powers.clone();
    powers.push(r.sym_power);
    powers.sort_unstable();
    powers.dedup();
    powers
        .into_iter()
        .map(|k| if k == 1 { Ok(base.clone()) } else { Ok(sym_power(&base, k)?) })
        .collect()
}

pub fn verify_report(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    // the representation is validated before any suite runs
    let rep = cfg.build_rep()?;
    let seed = cfg.run.seed;
    let v = &cfg.verify;
    let mut random = Vec::new();
    let mut power_limit = Vec::new();
    for &d in &v.dims {
        random.extend(random_suites(d, v.random_instances, seed)?);
        if v.power_samples > 0 {
            power_limit.push(power_limit_suite(d, v.power_samples, seed)?);
        }
    }
    let mut classes = Vec::new();
    for rep in class_reps(cfg, rep)? {
        classes.extend(class_suites(&ExteriorLift::new(&rep)?, v.class_max_len)?);
    }
    let passed = random.iter().chain(&classes).all(|s| s.passed) && power_limit.iter().all(|p| p.passed);
    Ok(VerifyReport { seed, random, classes, power_limit, passed })
}

/// `verify.json`; a failed suite is reported after the file is written.
pub fn verify(cfg: &RunConfig, out: &OutDir) -> Result<Vec<PathBuf>, CliError> {
    let report = verify_report(cfg)?;
    let path = out.json("verify.json", &report)?;
    if !report.passed {
        let worst: Vec<String> = report
            .random
            .iter()
            .chain(&report.classes)
            .filter(|s| !s.passed)
            .map(|s| {
                format!(
                    "{} on {}: max residual {:e} >= {:e} at {}",
                    s.suite,
                    s.source,
                    s.max_residual,
                    s.tolerance,
                    s.worst_instance.as_deref().unwrap_or("?")
                )
            })
            .chain(
                report
                    .power_limit
                    .iter()
                    .filter(|p| !p.passed)
                    .map(|p| format!("power limit in dimension {}: {p:?}", p.dim)),
            )
            .collect();
        return Err(CliError::SuiteFailure(format!("{} (see {})", worst.join("; "), path.display())));
    }
    Ok(vec![path])
}

#[derive(Serialize)]
pub struct CltOutput {
    pub source: String,
    pub classes: usize,
    pub exceptional: usize,
    pub order: String,
    pub observe: String,
    pub count_t_grid: Vec<f64>,
    pub clt_t_grid: Vec<f64>,
    pub growth: GrowthFit,
    /// Growth fit over primitive classes only, when all classes were counted.
    pub growth_primitive: Option<GrowthFit>,
    pub clt_jordan: Option<CltReport>,
    pub clt_cartan: Option<CltReport>,
    /// The ordering functional observed against itself; informational.
    pub clt_self: Option<CltReport>,
    pub clt_errors: Vec<String>,
    pub proximal: Option<ProximalReport>,
    pub benoist: Option<BenoistReport>,
}

/// The same dataset restricted to primitive classes.
fn primitive_subset(ds: &Dataset, rep: &GroupRep) -> Result<Dataset, CliError> {
    let keep = ds
        .records
        .iter()
        .map(|r| Ok(canonical_class(&Word::parse(rep.alphabet(), &r.word)?)?.is_primitive()))
        .collect::<Result<Vec<bool>, Error>>()?;
    let mut sub = ds.clone();
    sub.mode = CountMode::Primitive;
    let mut flags = keep.into_iter();
    sub.records.retain(|_| flags.next().unwrap_or(false));
    Ok(sub)
}

/// Everything `clt` reports, plus the first CLT error if no report could be made.
pub fn clt_output(cfg: &RunConfig) -> Result<(CltOutput, Option<Error>), CliError> {
    let (source, ds, rep) = match &cfg.synthetic {
        Some(s) => {
            let ds = synthetic_dataset(s.h, s.l, s.sigma, s.t_max, cfg.run.seed)?;
            (format!("synthetic(h={}, l={}, sigma={}, t_max={})", s.h, s.l, s.sigma, s.t_max), ds, None)
        }
        None => {
            let (rep, ds) = dataset(cfg)?;
            (rep.label().to_string(), ds, Some(rep))
        }
    };
    let real_data = rep.is_some();
    let order = 0;
    let obs = ds.functionals.len() - 1;
    let c = &cfg.clt;
    let (count_grid, clt_grid) = match &c.t_grid {
        Some(g) => (g.clone(), g.clone()),
        None => (ds.t_grid(order, c.grid_start, c.grid_points)?, ds.clt_grid(order, c.grid_start, c.grid_points)?),
    };
    let growth = count_and_fit(&ds, order, &count_grid)?;
    let mut errors = Vec::new();
    let mut first_error = None;
    let mut run = |observable| match clt_report(&ds, order, obs, observable, &clt_grid, &growth) {
        Ok(r) => Some(r),
        Err(e) => {
            errors.push(format!("{observable:?}: {e}"));
            first_error.get_or_insert(e);
            None
        }
    };
    let clt_jordan = run(Observable::Jordan);
    let clt_cartan = if real_data { run(Observable::Cartan) } else { None };
    let clt_self = match clt_report(&ds, order, order, Observable::Jordan, &clt_grid, &growth) {
        Ok(r) => Some(r),
        Err(e) => {
            errors.push(format!("self-conditioned: {e}"));
            None
        }
    };
    let growth_primitive = match &rep {
        Some(rep) if ds.mode == CountMode::All => match count_and_fit(&primitive_subset(&ds, rep)?, order, &count_grid) {
            Ok(g) => Some(g),
            Err(e) => {
                errors.push(format!("primitive growth fit: {e}"));
                None
            }
        },
        _ => None,
    };
    let (proximal, benoist) = if real_data {
        (
            Some(proximal_fraction(&ds, order, &count_grid, &growth)?),
            Some(benoist_report(&ds, order, obs, &count_grid)?),
        )
    } else {
        (None, None)
    };
    let failed = clt_jordan.is_none() && clt_cartan.is_none();
    let output = CltOutput {
        source,
        classes: ds.records.len(),
        exceptional: ds.exceptional(),
        order: ds.functionals[order].name().to_string(),
        observe: ds.functionals[obs].name().to_string(),
        count_t_grid: count_grid,
        clt_t_grid: clt_grid,
        growth,
        growth_primitive,
        clt_jordan,
        clt_cartan,
        clt_self,
        clt_errors: errors,
        proximal,
        benoist,
    };
    Ok((output, if failed { first_error } else { None }))
}

/// `clt.json` and `clt_histogram.csv`. A degenerate observable still writes
/// the report, then fails with its own exit code.
pub fn clt(cfg: &RunConfig, out: &OutDir) -> Result<Vec<PathBuf>, CliError> {
    let (report, error) = clt_output(cfg)?;
    let json = out.json("clt.json", &report)?;
    let w = cfg.clt.histogram_width;
    let hist = |r: &Option<CltReport>| r.as_ref().map(|r| histogram(&r.final_samples, -4.0, 4.0, w));
    let (hj, hc) = (hist(&report.clt_jordan), hist(&report.clt_cartan));
    let bins = histogram(&[], -4.0, 4.0, w);
    let header = ["lower", "upper", "gaussian_mass", "jordan_count", "jordan_density", "cartan_count", "cartan_density"]
        .map(String::from);
    let density = |h: &Option<Vec<(f64, f64, usize)>>, r: &Option<CltReport>, i: usize| match (h, r) {
        (Some(h), Some(r)) => {
            let n = r.final_samples.len() as f64;
            vec![h[i].2.to_string(), real(h[i].2 as f64 / (n * w))]
        }
        _ => vec![String::new(), String::new()],
    };
    let rows = bins
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi, _))| -> Result<Vec<String>, CliError> {
            let mass = periods_core::statistics::gaussian_cdf_interval(lo, hi)?;
            let mut row = vec![real(lo), real(hi), real(mass)];
            row.extend(density(&hj, &report.clt_jordan, i));
            row.extend(density(&hc, &report.clt_cartan, i));
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let csv = out.csv("clt_histogram.csv", &header, rows)?;
    match error {
        Some(e) => Err(e.into()),
        None => Ok(vec![json, csv]),
    }
}
