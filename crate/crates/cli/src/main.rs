//! CLI surface: build models, verify axioms, compare fingerprints.

use clap::{Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use vlab_core::algebra::Kind;
use vlab_core::check::{self, CheckMode, SympIndex};
use vlab_core::error::Error;
use vlab_core::fingerprint;
use vlab_core::model::{self, VarietyModel};
use vlab_core::{dual, gf_make, veronese};

#[derive(Parser)]
#[command(name = "vlab", about = "Veronese variety workbench over small finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a model and write it as JSON.
    Build {
        /// v2:ternions | v2:hpp | v2:sextonions | segre:l,k | grassmann:n |
        /// hds:l,k | ds:l,k | dg:n
        #[arg(long)]
        kind: String,
        /// field order, a prime power with 3 <= q <= 9
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run shape and axiom checks against a model file.
    Verify {
        #[arg(long)]
        model: PathBuf,
        /// comma-separated subset of s1,s2,s3,shape
        #[arg(long, default_value = "shape,s1,s2,s3")]
        axioms: String,
        /// exhaustive | sampled
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        /// pair budget for sampled s1/s2
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// point sample size for s3 (0 = exhaustive)
        #[arg(long, default_value_t = 200)]
        sample: usize,
        /// seed, mandatory whenever any sampled mode is selected
        #[arg(long)]
        seed: Option<u64>,
        /// nonzero exit on any failing verdict; recount stored counts
        #[arg(long, default_value_t = false)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the fingerprints of two model files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_kind_arg(s: &str) -> Result<(String, Vec<usize>), Error> {
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, r),
        None => (s, ""),
    };
    let args: Vec<usize> = if rest.is_empty() {
        Vec::new()
    } else {
        rest.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::ConfigError(format!("bad kind parameter {t:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    Ok((name.to_string(), args))
}

fn build_model(kind: &str, q: u32) -> Result<VarietyModel, Error> {
    let f = gf_make(q)?;
    let (name, args) = parse_kind_arg(kind)?;
    match (name.as_str(), args.as_slice()) {
        ("v2", []) => Err(Error::ConfigError(
            "v2 needs a kind, e.g. v2:ternions".into(),
        )),
        ("v2", _) => Err(Error::ConfigError("v2 parameters are named".into())),
        ("segre", [l, k]) => dual::segre(*l, *k, &f),
        ("grassmann", [n]) => dual::grassmann(*n, &f),
        ("hds", [l, k]) => dual::build_hds(*l, *k, &f),
        ("ds", [l, k]) => dual::build_ds(*l, *k, &f),
        ("dg", [n]) => dual::build_dg(*n, &f),
        _ => Err(Error::ConfigError(format!("unknown kind {kind:?}"))),
    }
}

fn build_any(kind: &str, q: u32) -> Result<VarietyModel, Error> {
    match kind {
        "v2:ternions" => veronese::build_v2(Kind::Ternions, &gf_make(q)?),
        "v2:hpp" => veronese::build_v2(Kind::Hpp, &gf_make(q)?),
        "v2:sextonions" => veronese::build_v2(Kind::Sextonions, &gf_make(q)?),
        other => build_model(other, q),
    }
}

fn summary(m: &VarietyModel, elapsed: std::time::Duration) -> String {
    format!(
        "route={} N={} |X|={} |Z|={} params={:?} |Xi|={} |Theta|={} built in {:.2?}",
        m.provenance.route,
        m.n(),
        m.x.len(),
        m.z.len(),
        m.params.tuple(),
        m.xi.len(),
        m.theta.len(),
        elapsed
    )
}

#[derive(Serialize)]
struct ReportBundle {
    model: String,
    strict: bool,
    reports: Vec<check::AxiomReport>,
    all_pass: bool,
}

fn run_verify(
    model_path: &PathBuf,
    axioms: &str,
    mode: &str,
    budget: usize,
    sample: usize,
    seed: Option<u64>,
    strict: bool,
    out: Option<&PathBuf>,
) -> Result<bool, Error> {
    let m = model::load(model_path)?;
    if strict {
        m.recount()?;
    }
    let wanted: Vec<&str> = axioms.split(',').map(|s| s.trim()).collect();
    let sampled = mode == "sampled";
    if sampled && seed.is_none() {
        return Err(Error::ConfigError(
            "sampled mode requires --seed".into(),
        ));
    }
    // exhaustive is mandatory at desk scale
    let effective_sampled = sampled && m.all.len() > 20_000;
    let pair_mode = if effective_sampled {
        CheckMode::Sampled {
            budget,
            seed: seed.unwrap(),
        }
    } else {
        CheckMode::Exhaustive
    };
    let mut reports: Vec<check::AxiomReport> = Vec::new();
    if wanted.contains(&"shape") {
        reports.push(shape_report(&m));
    }
    let needs_index = wanted.contains(&"s1") || wanted.contains(&"s3");
    let idx = if needs_index {
        Some(SympIndex::build(&m))
    } else {
        None
    };
    if wanted.contains(&"s1") {
        reports.push(check::check_s1(&m, idx.as_ref().unwrap(), pair_mode));
    }
    if wanted.contains(&"s2") {
        reports.push(check::check_s2(&m, pair_mode));
    }
    if wanted.contains(&"s3") {
        let (n, s) = if effective_sampled {
            (sample, seed.unwrap())
        } else {
            (0, 0)
        };
        reports.push(check::check_s3(&m, idx.as_ref().unwrap(), n, s));
    }
    let all_pass = reports.iter().all(|r| r.verdict);
    for r in &reports {
        println!(
            "{}: {} ({} checked, {} failures, {})",
            r.axiom,
            if r.verdict { "pass" } else { "FAIL" },
            r.checked,
            r.failures.len(),
            r.mode
        );
    }
    let bundle = ReportBundle {
        model: model_path.display().to_string(),
        strict,
        all_pass,
        reports,
    };
    if let Some(path) = out {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), &bundle)?;
    }
    Ok(all_pass)
}

/// Re-classifies every stored symp span and compares against the record.
fn shape_report(m: &VarietyModel) -> check::AxiomReport {
    let mut failures = Vec::new();
    let mut checked = 0u64;
    for (fam, symps) in [("xi", &m.xi), ("theta", &m.theta)] {
        for (i, s) in symps.iter().enumerate() {
            checked += 1;
            let xy = m.xy_points_in(&s.span);
            match vlab_core::quadric::classify_shape(&m.field, &s.span, &xy) {
                Ok(shape) if shape == s.shape => {}
                _ => failures.push(check::Witness {
                    what: format!("{fam} member shape mismatch"),
                    indices: vec![i as u64],
                }),
            }
        }
    }
    check::AxiomReport {
        axiom: "shape".into(),
        mode: "exhaustive".into(),
        checked,
        verdict: failures.is_empty(),
        failures,
    }
}

#[derive(Serialize)]
struct CompareOut {
    equal: bool,
    diffs: Vec<String>,
    a: fingerprint::FingerprintRecord,
    b: fingerprint::FingerprintRecord,
}

fn real_main() -> Result<u8, Error> {
    if let Ok(threads) = std::env::var("VLAB_THREADS") {
        let n: usize = threads
            .parse()
            .map_err(|_| Error::ConfigError("VLAB_THREADS must be an integer".into()))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let cli = Cli::parse();
    match cli.command {
        Command::Build { kind, q, out } => {
            let t0 = std::time::Instant::now();
            let m = build_any(&kind, q)?;
            model::save(&m, &out)?;
            println!("{}", summary(&m, t0.elapsed()));
            Ok(0)
        }
        Command::Verify {
            model,
            axioms,
            mode,
            budget,
            sample,
            seed,
            strict,
            out,
        } => {
            let ok = run_verify(
                &model,
                &axioms,
                &mode,
                budget,
                sample,
                seed,
                strict,
                out.as_ref(),
            )?;
            Ok(if ok || !strict { 0 } else { 1 })
        }
        Command::Compare { a, b, out } => {
            let ma = model::load(&a)?;
            let mb = model::load(&b)?;
            let fa = fingerprint::fingerprint(&ma)?;
            let fb = fingerprint::fingerprint(&mb)?;
            let (equal, diffs) = fingerprint::compare(&fa, &fb);
            println!(
                "fingerprints {}",
                if equal { "equal" } else { "differ" }
            );
            for d in &diffs {
                println!("  {d}");
            }
            if let Some(path) = out {
                let file = std::fs::File::create(path)?;
                serde_json::to_writer(
                    std::io::BufWriter::new(file),
                    &CompareOut {
                        equal,
                        diffs,
                        a: fa,
                        b: fb,
                    },
                )?;
            }
            Ok(if equal { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(10)
        }
    }
}
