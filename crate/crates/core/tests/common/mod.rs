#![allow(dead_code)]

use incentive_policy::{Alternative, ExtremeProfile, Individual, Instance};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Utilities on the cent grid in [-8, 0] €, social indicators on a 0.1 kg grid.
pub fn random_individual<R: Rng>(rng: &mut R, id: u64, alternatives: usize) -> Individual {
    Individual::new(
        id,
        (0..alternatives)
            .map(|k| {
                let cents: i64 = rng.gen_range(-800..=0);
                let tenths: i64 = rng.gen_range(0..=300);
                Alternative::new(k as u32, cents as f64 / 100.0, tenths as f64 / 10.0)
            })
            .collect(),
    )
}

pub fn random_instance<R: Rng>(rng: &mut R, n: usize, max_alts: usize) -> Instance {
    let inds = (0..n)
        .map(|i| {
            let k = rng.gen_range(1..=max_alts);
            random_individual(rng, i as u64, k)
        })
        .collect();
    Instance::new(inds).unwrap()
}

/// Individuals given as `(weight, gain)` points, the first point the default.
pub fn from_points(inds: &[&[(f64, f64)]]) -> Instance {
    Instance::new(
        inds.iter()
            .enumerate()
            .map(|(i, pts)| {
                Individual::new(
                    i as u64 + 1,
                    pts.iter()
                        .enumerate()
                        .map(|(k, &(w, g))| Alternative::new(k as u32, -w, g))
                        .collect(),
                )
            })
            .collect(),
    )
    .unwrap()
}

/// ind 1: {(0,0),(1,5),(3,9)}, ind 2: {(0,0),(2,8)}
pub fn desk_instance() -> Instance {
    from_points(&[&[(0.0, 0.0), (1.0, 5.0), (3.0, 9.0)], &[(0.0, 0.0), (2.0, 8.0)]])
}

/// Brute-force check of a profile against the raw alternatives. Returns a
/// description of every violation found.
pub fn hull_certificate_failures(ind: &Individual, profile: &ExtremeProfile) -> Vec<String> {
    const TOL: f64 = 1e-9;
    let mut failures = Vec::new();

    // default: max utility, then max social, then lowest id
    let best_u = ind.alternatives.iter().map(|a| a.utility).fold(f64::MIN, f64::max);
    let best_s = ind
        .alternatives
        .iter()
        .filter(|a| a.utility == best_u)
        .map(|a| a.social)
        .fold(f64::MIN, f64::max);
    let default = ind
        .alternatives
        .iter()
        .filter(|a| a.utility == best_u && a.social == best_s)
        .map(|a| a.id)
        .min()
        .unwrap();
    if profile.default_alt != default {
        failures.push(format!("default {} != {}", profile.default_alt, default));
        return failures;
    }
    let d = ind.alternative(default).unwrap();
    let point = |a: &Alternative| (d.utility - a.utility, a.social - d.social);

    let retained = profile.alt_ids();
    let mut poly: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for s in &profile.steps {
        let a = ind.alternative(s.alt_id).unwrap();
        let (w, g) = point(a);
        if (w - s.weight).abs() > TOL || (g - s.social_gain).abs() > TOL {
            failures.push(format!("alt {} coordinates mismatch", s.alt_id));
        }
        poly.push((w, g));
    }
    for k in 1..poly.len() {
        let (w0, g0) = poly[k - 1];
        let (w1, g1) = poly[k];
        let step = &profile.steps[k - 1];
        if !(w1 > w0 && g1 > g0) {
            failures.push(format!("step {k} not strictly increasing"));
        }
        if ((w1 - w0) - step.incr_weight).abs() > TOL * (1.0 + w1.abs())
            || ((g1 - g0) - step.incr_social).abs() > TOL * (1.0 + g1.abs())
        {
            failures.push(format!("step {k} increments are not consecutive differences"));
        }
        if k >= 2 && step.incr_eff >= profile.steps[k - 2].incr_eff || step.incr_eff.is_nan() {
            failures.push(format!("step {k} efficiency not strictly decreasing"));
        }
    }

    for a in &ind.alternatives {
        if retained.contains(&a.id) {
            continue;
        }
        let (w, g) = point(a);
        let non_positive = g <= 0.0;
        let dominated = poly.iter().any(|&(pw, pg)| pw <= w + TOL && pg >= g - TOL);
        let below = poly.windows(2).any(|s| {
            let ((w0, g0), (w1, g1)) = (s[0], s[1]);
            w0 <= w && w <= w1 && g <= g0 + (g1 - g0) * (w - w0) / (w1 - w0) + TOL
        });
        if !(non_positive || dominated || below) {
            failures.push(format!("alt {} removed without certificate ({w}, {g})", a.id));
        }
    }
    failures
}

/// Monte-Carlo estimate of E[Δ + D | D > −Δ] with D = ε_a − ε_b, ε ~ Gumbel(0, μ)
/// drawn by inverse CDF. Returns (mean, standard error) over `samples`
/// conditional draws.
pub fn conditional_gumbel_mc<R: Rng>(rng: &mut R, delta: f64, mu: f64, samples: usize) -> (f64, f64) {
    let gumbel = |u: f64| -mu * (-u.ln()).ln();
    let (mut n, mut sum, mut sum_sq) = (0usize, 0.0f64, 0.0f64);
    while n < samples {
        let a = gumbel(rng.gen_range(f64::MIN_POSITIVE..1.0));
        let b = gumbel(rng.gen_range(f64::MIN_POSITIVE..1.0));
        let d = a - b;
        if d > -delta {
            let x = delta + d;
            n += 1;
            sum += x;
            sum_sq += x * x;
        }
    }
    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean) * n as f64 / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Synthetic commuting population used by the imperfect-information checks.
pub fn synthetic_case(individuals: usize, seed: u64) -> Instance {
    let config = incentive_policy::GeneratorConfig {
        individuals,
        ..Default::default()
    };
    incentive_policy::synthesize_population(&config, seed).unwrap()
}

pub const BIN: &str = env!("CARGO_BIN_EXE_incentive-policy");

/// Runs the binary in `dir` and returns (exit code, stdout).
pub fn run_cli(dir: &std::path::Path, args: &[&str]) -> (i32, String) {
    let out = std::process::Command::new(BIN)
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

/// Writes the desk instance and a small generator config into `dir`, then runs
/// every subcommand with relative paths.
pub fn run_every_command(dir: &std::path::Path) -> Vec<String> {
    incentive_policy::save_instance(&desk_instance(), &dir.join("desk.csv"), incentive_policy::Format::Csv)
        .unwrap();
    let config = incentive_policy::GeneratorConfig {
        individuals: 300,
        ..Default::default()
    };
    std::fs::write(dir.join("config.json"), serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let commands: &[&[&str]] = &[
        &["generate", "--config", "config.json", "--seed", "7", "--out", "pop.csv"],
        &["generate", "--config", "config.json", "--seed", "7", "--out", "pop.json"],
        &["solve", "desk.csv", "--budget", "4", "--out", "solve"],
        &["solve", "pop.csv", "--budget", "25", "--out", "solve_pop"],
        &["curve", "pop.csv", "--max-budget", "40", "--out", "curve.csv"],
        &["certify", "desk.csv", "--budget", "4", "--out", "certify"],
        &["simulate", "pop.csv", "--mu", "1", "--seed", "3", "--budget", "25", "--reps", "4", "--out", "sim"],
    ];
    commands
        .iter()
        .map(|args| {
            let (code, stdout) = run_cli(dir, args);
            assert_eq!(code, 0, "{args:?}");
            stdout
        })
        .collect()
}

/// sha256 of every file under `dir`, keyed by relative path. Manifests are
/// hashed with their wall-clock `runtime_secs` removed.
pub fn hash_tree(dir: &std::path::Path) -> std::collections::BTreeMap<String, String> {
    use sha2::{Digest, Sha256};
    let mut out = std::collections::BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let mut bytes = std::fs::read(&path).unwrap();
            if path.to_string_lossy().ends_with("manifest.json") {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                v.as_object_mut().unwrap().remove("runtime_secs");
                bytes = serde_json::to_vec(&v).unwrap();
            }
            let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
            out.insert(rel, format!("{:x}", Sha256::digest(&bytes)));
        }
    }
    out
}
