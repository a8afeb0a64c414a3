//! File-in/file-out commands behind the `incentive-policy` binary.
//!
//! Each command is a pure function of its input files and flags; the only
//! field that varies between reruns is `runtime_secs` in the manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::concavize::concavize_all;
use crate::error::{Error, Result};
use crate::generator::{synthesize_population, GeneratorConfig};
use crate::greedy::{certify, GreedySolver};
use crate::imperfect::{simulate_sequential, SimulationReport, StochasticInstance};
use crate::io::{load_instance, save_instance, Format};
use crate::oracle::{exact, OracleConfig};
use crate::report::{
    fmt_sig6, round_sig6, to_json_pretty, write_allocation_csv, write_curve_csv,
    write_proposal_log_csv, ResultJson, SimulationJson,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub flags: BTreeMap<String, String>,
    /// Hash of the command, its flags and the bytes of every input.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub runtime_secs: f64,
    pub outputs: Vec<String>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex(&Sha256::digest(&bytes)))
}

impl RunManifest {
    fn new(
        command: &str,
        inputs: &[&Path],
        flags: BTreeMap<String, String>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let inputs = inputs
            .iter()
            .map(|p| {
                Ok(InputRecord {
                    path: p.display().to_string(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for (k, v) in &flags {
            h.update([0]);
            h.update(k.as_bytes());
            h.update([0]);
            h.update(v.as_bytes());
        }
        for i in &inputs {
            h.update([1]);
            h.update(i.sha256.as_bytes());
        }
        Ok(RunManifest {
            command: command.into(),
            inputs,
            flags,
            config_hash: hex(&h.finalize()),
            seed,
            tool_version: TOOL_VERSION.into(),
            runtime_secs: 0.0,
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, path: &Path, started: Instant) -> Result<()> {
        self.runtime_secs = started.elapsed().as_secs_f64();
        self.outputs.push(path.display().to_string());
        write_text(path, &to_json_pretty(self)?)
    }
}

fn flags<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// What a command prints, whether it passed, and its manifest.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub stdout: String,
    pub passed: bool,
    pub manifest: RunManifest,
}

fn load(path: &Path, format: Option<Format>) -> Result<crate::model::Instance> {
    load_instance(path, format.unwrap_or_else(|| Format::from_path(path)))
}

pub fn cmd_generate(config: &Path, seed: u64, out: &Path, format: Option<Format>) -> Result<Outcome> {
    let started = Instant::now();
    let cfg = GeneratorConfig::from_json_file(config)?;
    let format = format.unwrap_or_else(|| Format::from_path(out));
    let mut manifest = RunManifest::new(
        "generate",
        &[config],
        flags([("seed", seed.to_string()), ("format", format!("{format:?}").to_lowercase())]),
        Some(seed),
    )?;
    let instance = synthesize_population(&cfg, seed)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    save_instance(&instance, out, format)?;
    manifest.outputs.push(out.display().to_string());
    manifest.write(&sidecar(out), started)?;
    Ok(Outcome {
        stdout: format!(
            "generated {} individuals, {} alternatives -> {}\n",
            instance.len(),
            instance.num_alternatives(),
            out.display()
        ),
        passed: true,
        manifest,
    })
}

pub fn cmd_solve(
    instance_path: &Path,
    budget: f64,
    out_dir: &Path,
    format: Option<Format>,
) -> Result<Outcome> {
    let started = Instant::now();
    let mut manifest = RunManifest::new(
        "solve",
        &[instance_path],
        flags([("budget", budget.to_string())]),
        None,
    )?;
    let instance = load(instance_path, format)?;
    let profiles = concavize_all(&instance);
    let result = GreedySolver::new(&profiles).solve(budget)?;

    ensure_dir(out_dir)?;
    let result_path = out_dir.join("result.json");
    let alloc_path = out_dir.join("allocation.csv");
    let curve_path = out_dir.join("curve.csv");
    write_text(&result_path, &to_json_pretty(&ResultJson::from(&result))?)?;
    write_with(&alloc_path, |w| write_allocation_csv(&result, w))?;
    write_with(&curve_path, |w| write_curve_csv(&result.curve, w))?;
    for p in [&result_path, &alloc_path, &curve_path] {
        manifest.outputs.push(p.display().to_string());
    }
    manifest.write(&out_dir.join("manifest.json"), started)?;

    let split = result
        .split
        .map_or("none".to_string(), |s| fmt_sig6(s.incr_eff));
    let stdout = format!(
        "welfare_kg={}\nbudget_used_eur={}\ngap_bound_kg={}\nsplit_eff={}\nshifted={}\n",
        fmt_sig6(result.welfare),
        fmt_sig6(result.budget_used),
        fmt_sig6(result.gap_bound),
        split,
        result.allocation.shifted(),
    );
    Ok(Outcome {
        stdout,
        passed: true,
        manifest,
    })
}

pub fn cmd_curve(
    instance_path: &Path,
    max_budget: f64,
    out: &Path,
    format: Option<Format>,
) -> Result<Outcome> {
    let started = Instant::now();
    let mut manifest = RunManifest::new(
        "curve",
        &[instance_path],
        flags([("max-budget", max_budget.to_string())]),
        None,
    )?;
    let instance = load(instance_path, format)?;
    let profiles = concavize_all(&instance);
    let curve = GreedySolver::new(&profiles).curve(max_budget)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_with(out, |w| write_curve_csv(&curve, w))?;
    manifest.outputs.push(out.display().to_string());
    manifest.write(&sidecar(out), started)?;
    Ok(Outcome {
        stdout: format!(
            "{} breakpoints up to {} EUR -> {}\n",
            curve.breakpoints().len(),
            fmt_sig6(max_budget),
            out.display()
        ),
        passed: true,
        manifest,
    })
}

#[derive(Debug, Serialize)]
struct CertifyJson {
    greedy: ResultJson,
    exact: ResultJson,
    #[serde(serialize_with = "crate::cli::sig6_ser")]
    gap: f64,
    verdict: &'static str,
}

fn sig6_ser<S: serde::Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig6(*x))
}

pub fn cmd_certify(
    instance_path: &Path,
    budget: f64,
    out_dir: Option<&Path>,
    format: Option<Format>,
    oracle: &OracleConfig,
) -> Result<Outcome> {
    let started = Instant::now();
    let mut manifest = RunManifest::new(
        "certify",
        &[instance_path],
        flags([
            ("budget", budget.to_string()),
            ("oracle", format!("{:?}/{}", oracle.mode, oracle.weight_scale)),
        ]),
        None,
    )?;
    let instance = load(instance_path, format)?;
    let profiles = concavize_all(&instance);
    let result = GreedySolver::new(&profiles).solve(budget)?;
    let exact_sol = exact(&instance, budget, oracle)?;
    let passed = certify(&result, exact_sol.welfare);
    let gap = exact_sol.welfare - result.welfare;
    let verdict = if passed { "PASS" } else { "FAIL" };

    if let Some(dir) = out_dir {
        ensure_dir(dir)?;
        let path = dir.join("certify.json");
        let body = CertifyJson {
            greedy: ResultJson::from(&result),
            exact: ResultJson::from_oracle(&exact_sol, budget),
            gap,
            verdict,
        };
        write_text(&path, &to_json_pretty(&body)?)?;
        manifest.outputs.push(path.display().to_string());
        manifest.write(&dir.join("manifest.json"), started)?;
    }
    let stdout = format!(
        "exact_welfare_kg={}\ngreedy_welfare_kg={}\ngap_kg={}\nbound_kg={}\n{verdict}\n",
        fmt_sig6(exact_sol.welfare),
        fmt_sig6(result.welfare),
        fmt_sig6(gap),
        fmt_sig6(result.gap_bound),
    );
    Ok(Outcome {
        stdout,
        passed,
        manifest,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MeanSd {
    #[serde(serialize_with = "sig6_ser")]
    pub mean: f64,
    #[serde(serialize_with = "sig6_ser")]
    pub sd: f64,
}

impl MeanSd {
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Self {
        let xs: Vec<f64> = xs.into_iter().collect();
        if xs.is_empty() {
            return MeanSd::default();
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        MeanSd { mean, sd }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerfectSummary {
    pub budget_spent: MeanSd,
    pub welfare_kg: MeanSd,
    pub shifted: MeanSd,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImperfectSummary {
    pub budget_spent: MeanSd,
    pub proposals: MeanSd,
    pub accepted: MeanSd,
    pub acceptance_rate: MeanSd,
    pub welfare_kg: MeanSd,
    pub shifted: MeanSd,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationSummary {
    #[serde(serialize_with = "sig6_ser")]
    pub budget: f64,
    #[serde(serialize_with = "sig6_ser")]
    pub mu: f64,
    pub seed: u64,
    pub repetitions: usize,
    pub perfect_information: PerfectSummary,
    pub imperfect_information: ImperfectSummary,
}

/// One repetition: imperfect-information run and the perfect-information
/// solve on the same realized utilities.
#[derive(Clone, Debug)]
pub struct Repetition {
    pub seed: u64,
    pub imperfect: SimulationReport,
    pub perfect_welfare: f64,
    pub perfect_spent: f64,
    pub perfect_shifted: usize,
}

pub fn run_repetitions(
    deterministic: &crate::model::Instance,
    mu: f64,
    seed: u64,
    budget: f64,
    reps: usize,
) -> Result<Vec<Repetition>> {
    (0..reps)
        .into_par_iter()
        .map(|k| {
            let rep_seed = seed.wrapping_add(k as u64);
            let stoch = StochasticInstance::new(deterministic.clone(), mu, rep_seed)?;
            let imperfect = simulate_sequential(&stoch, budget)?;
            let realized = stoch.realized();
            let profiles = concavize_all(&realized);
            let perfect = GreedySolver::new(&profiles).solve(budget)?;
            Ok(Repetition {
                seed: rep_seed,
                imperfect,
                perfect_welfare: perfect.welfare,
                perfect_spent: perfect.budget_used,
                perfect_shifted: perfect.allocation.shifted(),
            })
        })
        .collect()
}

pub fn summarize(reps: &[Repetition], budget: f64, mu: f64, seed: u64) -> SimulationSummary {
    let im = |f: fn(&SimulationReport) -> f64| MeanSd::of(reps.iter().map(|r| f(&r.imperfect)));
    SimulationSummary {
        budget,
        mu,
        seed,
        repetitions: reps.len(),
        perfect_information: PerfectSummary {
            budget_spent: MeanSd::of(reps.iter().map(|r| r.perfect_spent)),
            welfare_kg: MeanSd::of(reps.iter().map(|r| r.perfect_welfare)),
            shifted: MeanSd::of(reps.iter().map(|r| r.perfect_shifted as f64)),
        },
        imperfect_information: ImperfectSummary {
            budget_spent: im(|r| r.budget_spent),
            proposals: im(|r| r.proposals as f64),
            accepted: im(|r| r.acceptances as f64),
            acceptance_rate: im(|r| r.acceptance_rate),
            welfare_kg: im(|r| r.welfare),
            shifted: im(|r| r.shifted as f64),
        },
    }
}

/// `instance_path` holds the systematic utilities; noise is drawn per
/// repetition with seed `seed + k`.
pub fn cmd_simulate(
    instance_path: &Path,
    mu: f64,
    seed: u64,
    budget: f64,
    reps: usize,
    out_dir: &Path,
    format: Option<Format>,
) -> Result<Outcome> {
    let started = Instant::now();
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidScale(mu));
    }
    let mut manifest = RunManifest::new(
        "simulate",
        &[instance_path],
        flags([
            ("budget", budget.to_string()),
            ("mu", mu.to_string()),
            ("reps", reps.to_string()),
            ("seed", seed.to_string()),
        ]),
        Some(seed),
    )?;
    let instance = load(instance_path, format)?;
    let runs = run_repetitions(&instance, mu, seed, budget, reps)?;

    ensure_dir(out_dir)?;
    for (k, r) in runs.iter().enumerate() {
        let json = out_dir.join(format!("run_{k:03}.json"));
        let log = out_dir.join(format!("run_{k:03}_log.csv"));
        write_text(&json, &to_json_pretty(&SimulationJson::from(&r.imperfect))?)?;
        write_with(&log, |w| write_proposal_log_csv(&r.imperfect, w))?;
        manifest.outputs.push(json.display().to_string());
        manifest.outputs.push(log.display().to_string());
    }
    let summary = summarize(&runs, budget, mu, seed);
    let summary_path = out_dir.join("summary.json");
    write_text(&summary_path, &to_json_pretty(&summary)?)?;
    manifest.outputs.push(summary_path.display().to_string());
    manifest.write(&out_dir.join("manifest.json"), started)?;

    let p = &summary.perfect_information;
    let i = &summary.imperfect_information;
    let stdout = format!(
        "{:<22}{:>14}{:>14}\n{:<22}{:>14}{:>14}\n{:<22}{:>14}{:>14}\n{:<22}{:>14}{:>14}\n{:<22}{:>14}{:>14}\n",
        "", "perfect", "imperfect",
        "budget spent (EUR)", fmt_sig6(p.budget_spent.mean), fmt_sig6(i.budget_spent.mean),
        "proposals", "-", fmt_sig6(i.proposals.mean),
        "acceptance rate", "1", fmt_sig6(i.acceptance_rate.mean),
        "welfare (kg CO2)", fmt_sig6(p.welfare_kg.mean), fmt_sig6(i.welfare_kg.mean),
    );
    Ok(Outcome {
        stdout,
        passed: true,
        manifest,
    })
}
