use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use consensus_core::consensus::{mean_partition, stationarity_report, SolverConfig};
use consensus_core::ensemble::{
    gen_gaussian_grid, gen_uniform, generate_ensemble, Dataset, EnsembleSpec, KMeansConfig,
};
use consensus_core::io::{
    read_dataset_csv, read_ensemble, write_dataset_csv, write_ensemble, write_json,
    write_motif_csv, write_stability_csv, MeanReport, MotifReport,
};
use consensus_core::oracle::run_suite;
use consensus_core::profile::{check_tau, motifs_of, profile_of};
use consensus_core::rng::derive_seed;
use consensus_core::stability::{
    average_reports, stability_sweep, SelectedK, StabilityReport, SweepConfig,
};
use consensus_core::{Error, LabeledPartition};

use crate::manifest::{manifest_path, with_suffix, RunManifest};
use crate::{
    CliError, Command, DataKind, EnsembleArgs, GenDataArgs, GeneratorArgs, KMeansArgs, MeanArgs,
    MotifsArgs, OracleArgs, SolverArgs, StabilityArgs,
};

const DEFAULT_SIGMA: f64 = 0.12;
const DEFAULT_POINTS_PER: usize = 100;
const DEFAULT_DIM: usize = 2;

/// Paths a command read and wrote, and where its manifest goes.
struct Outcome {
    seed: u64,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    manifest: Option<PathBuf>,
}

pub fn run(command: Command) -> Result<(), CliError> {
    if let Command::Rerun(args) = &command {
        let recorded = RunManifest::read(&args.manifest)?;
        if recorded.version != env!("CARGO_PKG_VERSION") {
            eprintln!(
                "warning: manifest written by version {}, running {}",
                recorded.version,
                env!("CARGO_PKG_VERSION")
            );
        }
        return run(recorded.invocation);
    }
    let start = Instant::now();
    let mut command = command;
    let outcome = match &mut command {
        Command::GenData(a) => gen_data(a)?,
        Command::Ensemble(a) => ensemble(a)?,
        Command::Mean(a) => mean(a)?,
        Command::Motifs(a) => motifs(a)?,
        Command::Stability(a) => stability(a)?,
        Command::Oracle(a) => return oracle(a, start),
        Command::Rerun(_) => unreachable!("handled above"),
    };
    if let Some(path) = outcome.manifest {
        RunManifest {
            invocation: command,
            seed: outcome.seed,
            inputs: outcome.inputs,
            outputs: outcome.outputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_secs: start.elapsed().as_secs_f64(),
        }
        .write(&path)?;
    }
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| {
        CliError::Core(Error::Validation(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Core(Error::Io(e)))
}

fn write_report<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_json(create(path)?, value)?;
    Ok(())
}

fn read_data(path: &Path) -> Result<Dataset, CliError> {
    read_dataset_csv(open(path)?).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())).into(),
        other => other.into(),
    })
}

fn read_sample(path: &Path) -> Result<Vec<LabeledPartition>, CliError> {
    read_ensemble(open(path)?).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())).into(),
        other => other.into(),
    })
}

enum Source {
    Grid {
        rows: usize,
        cols: usize,
        sigma: f64,
        points_per: usize,
    },
    Uniform {
        m: usize,
        d: usize,
    },
}

impl Source {
    fn generate(&self, seed: u64) -> Result<Dataset, CliError> {
        Ok(match *self {
            Source::Grid {
                rows,
                cols,
                sigma,
                points_per,
            } => gen_gaussian_grid(rows, cols, sigma, points_per, seed)?,
            Source::Uniform { m, d } => gen_uniform(m, d, seed)?,
        })
    }
}

/// Checks the flag combination and fills in defaults, so the manifest
/// records every value used.
fn resolve_generator(g: &mut GeneratorArgs) -> Result<Source, CliError> {
    let usage = |msg: &str| Err(CliError::Usage(msg.to_string()));
    match g.kind {
        None => usage("--kind is required (gaussian-grid or uniform)"),
        Some(DataKind::GaussianGrid) => {
            if g.m.is_some() || g.d.is_some() {
                return usage("--m and --d apply to --kind uniform only");
            }
            let (Some(rows), Some(cols)) = (g.rows, g.cols) else {
                return usage("--kind gaussian-grid requires --rows and --cols");
            };
            let sigma = *g.sigma.get_or_insert(DEFAULT_SIGMA);
            let points_per = *g.points_per.get_or_insert(DEFAULT_POINTS_PER);
            Ok(Source::Grid {
                rows,
                cols,
                sigma,
                points_per,
            })
        }
        Some(DataKind::Uniform) => {
            if g.rows.is_some() || g.cols.is_some() || g.sigma.is_some() || g.points_per.is_some() {
                return usage(
                    "--rows, --cols, --sigma and --points-per apply to --kind gaussian-grid only",
                );
            }
            let Some(m) = g.m else {
                return usage("--kind uniform requires --m");
            };
            let d = *g.d.get_or_insert(DEFAULT_DIM);
            Ok(Source::Uniform { m, d })
        }
    }
}

fn generator_given(g: &GeneratorArgs) -> bool {
    g.kind.is_some()
        || g.rows.is_some()
        || g.cols.is_some()
        || g.sigma.is_some()
        || g.points_per.is_some()
        || g.m.is_some()
        || g.d.is_some()
}

fn kmeans_config(a: &KMeansArgs) -> Result<KMeansConfig, CliError> {
    if a.n_init == 0 || a.kmeans_max_iters == 0 {
        return Err(CliError::Usage(
            "--n-init and --kmeans-max-iters must be at least 1".into(),
        ));
    }
    Ok(KMeansConfig {
        n_init: a.n_init,
        max_iters: a.kmeans_max_iters,
        empty_clusters: a.empty_clusters.into(),
    })
}

fn solver_config(a: &SolverArgs, seed: u64) -> Result<SolverConfig, CliError> {
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {}",
            a.tol
        )));
    }
    if a.restarts == 0 || a.max_iters == 0 {
        return Err(CliError::Usage(
            "--restarts and --max-iters must be at least 1".into(),
        ));
    }
    Ok(SolverConfig {
        restarts: a.restarts,
        max_iters: a.max_iters,
        tol: a.tol,
        seed,
    })
}

fn gen_data(a: &mut GenDataArgs) -> Result<Outcome, CliError> {
    let source = resolve_generator(&mut a.generator)?;
    let data = source.generate(a.seed)?;
    write_dataset_csv(create(&a.out)?, &data)?;
    println!(
        "wrote {} ({} points, d = {})",
        a.out.display(),
        data.m(),
        data.d()
    );
    Ok(Outcome {
        seed: a.seed,
        inputs: vec![],
        outputs: vec![a.out.clone()],
        manifest: Some(manifest_path(&a.out)),
    })
}

fn ensemble(a: &mut EnsembleArgs) -> Result<Outcome, CliError> {
    let kmeans = kmeans_config(&a.kmeans)?;
    let data = read_data(&a.data)?;
    let spec = EnsembleSpec {
        n: a.n,
        k: a.k,
        seed: a.seed,
        kmeans,
    };
    let sample = generate_ensemble(&data, &spec)?;
    write_ensemble(create(&a.out)?, &sample)?;
    println!(
        "wrote {} ({} partitions, ell = {})",
        a.out.display(),
        sample.len(),
        a.k
    );
    Ok(Outcome {
        seed: a.seed,
        inputs: vec![a.data.clone()],
        outputs: vec![a.out.clone()],
        manifest: Some(manifest_path(&a.out)),
    })
}

fn mean(a: &mut MeanArgs) -> Result<Outcome, CliError> {
    let cfg = solver_config(&a.solver, a.seed)?;
    let sample = read_sample(&a.ensemble)?;
    let r = mean_partition(&sample, &cfg)?;
    let report = MeanReport::new(&r, stationarity_report(&r)?);
    write_report(&a.out, &report)?;
    println!(
        "F = {} after {} iterations ({:?}), stationary: {}",
        report.frechet_value, report.iterations, report.stop_reason, report.stationary
    );
    Ok(Outcome {
        seed: a.seed,
        inputs: vec![a.ensemble.clone()],
        outputs: vec![a.out.clone()],
        manifest: Some(manifest_path(&a.out)),
    })
}

fn motifs(a: &mut MotifsArgs) -> Result<Outcome, CliError> {
    check_tau(a.tau)?;
    let cfg = solver_config(&a.solver, a.seed)?;
    let sample = read_sample(&a.ensemble)?;
    let m = sample[0].m();
    let data = a.data.as_deref().map(read_data).transpose()?;
    if let Some(ds) = &data {
        if ds.m() != m {
            return Err(Error::Validation(format!(
                "dataset has {} points, ensemble partitions have m = {m}",
                ds.m()
            ))
            .into());
        }
    }
    let r = mean_partition(&sample, &cfg)?;
    let set = motifs_of(&profile_of(&r.alignment), a.tau)?;
    let csv = a
        .csv
        .get_or_insert_with(|| a.out.with_extension("csv"))
        .clone();
    write_report(
        &a.out,
        &MotifReport::new(&set, data.as_ref().and_then(|d| d.ground_truth())),
    )?;
    write_motif_csv(create(&csv)?, &set, m, data.as_ref())?;
    let sizes: Vec<usize> = set.motifs.iter().map(Vec::len).collect();
    println!("motif sizes {sizes:?}, {} uncovered", set.uncovered.len());
    let mut inputs = vec![a.ensemble.clone()];
    inputs.extend(a.data.clone());
    Ok(Outcome {
        seed: a.seed,
        inputs,
        outputs: vec![a.out.clone(), csv],
        manifest: Some(manifest_path(&a.out)),
    })
}

#[derive(Serialize)]
struct StabilitySummary<'a> {
    selected_k: SelectedSummary,
    averaged: &'a StabilityReport,
    trials: &'a [StabilityReport],
}

#[derive(Serialize)]
struct SelectedSummary {
    averaged: SelectedK,
    per_trial: Vec<SelectedK>,
}

fn stability(a: &mut StabilityArgs) -> Result<Outcome, CliError> {
    if a.kmin > a.kmax {
        return Err(CliError::Usage(format!(
            "--kmin {} exceeds --kmax {}",
            a.kmin, a.kmax
        )));
    }
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let kmeans = kmeans_config(&a.kmeans)?;
    let solver = solver_config(&a.solver, a.seed)?;
    let fixed = match (&a.data, generator_given(&a.generator)) {
        (Some(_), true) => {
            return Err(CliError::Usage(
                "--data excludes the generator flags".into(),
            ))
        }
        (None, false) => return Err(CliError::Usage("give --data or --kind".into())),
        (Some(path), false) => Some(read_data(path)?),
        (None, true) => None,
    };
    let source = match fixed {
        None => Some(resolve_generator(&mut a.generator)?),
        Some(_) => None,
    };
    let mut reports = Vec::with_capacity(a.trials);
    for t in 0..a.trials as u64 {
        let data = match (&fixed, &source) {
            (Some(d), _) => d.clone(),
            (None, Some(s)) => s.generate(derive_seed(a.seed, "dataset", t))?,
            (None, None) => unreachable!("one source is set"),
        };
        let sweep = SweepConfig {
            seed: derive_seed(a.seed, "sweep", t),
            kmeans,
        };
        let cfg = SolverConfig {
            seed: derive_seed(a.seed, "solver", t),
            ..solver
        };
        reports.push(stability_sweep(&data, a.kmin, a.kmax, a.n, &sweep, &cfg)?);
    }
    let averaged = average_reports(&reports)?;

    let mut outputs = Vec::new();
    for (t, rep) in reports.iter().enumerate() {
        let path = with_suffix(&a.out_prefix, &format!(".trial-{t}.csv"));
        write_stability_csv(create(&path)?, rep)?;
        outputs.push(path);
    }
    let avg_path = with_suffix(&a.out_prefix, ".csv");
    write_stability_csv(create(&avg_path)?, &averaged)?;
    outputs.push(avg_path);
    let json_path = with_suffix(&a.out_prefix, ".json");
    write_report(
        &json_path,
        &StabilitySummary {
            selected_k: SelectedSummary {
                averaged: averaged.selected,
                per_trial: reports.iter().map(|r| r.selected).collect(),
            },
            averaged: &averaged,
            trials: &reports,
        },
    )?;
    outputs.push(json_path);
    let s = averaged.selected;
    println!(
        "selected k (trial average): G {}, g {}, F {}",
        s.pairwise, s.multiple, s.frechet
    );
    Ok(Outcome {
        seed: a.seed,
        inputs: a.data.iter().cloned().collect(),
        outputs,
        manifest: Some(with_suffix(&a.out_prefix, ".manifest.json")),
    })
}

fn oracle(a: &mut OracleArgs, start: Instant) -> Result<(), CliError> {
    let report = run_suite(a.suite.into(), a.cases, a.seed)?;
    for c in &report.cases {
        let opt = match c.optimal {
            Some(true) => " optimal",
            Some(false) => " suboptimal",
            None => "",
        };
        println!(
            "case {:>4} n={} ell={} m={:>2} residual={:.3e} {}{opt}",
            c.case,
            c.n,
            c.ell,
            c.m,
            c.residual,
            if c.ok { "ok" } else { "VIOLATION" }
        );
    }
    println!(
        "{:?}: {}/{} agreements, max residual {:.3e}",
        report.suite,
        report.passed,
        report.cases.len(),
        report.max_residual
    );
    if let Some(opt) = report.optimal_count {
        println!(
            "heuristic attained the exhaustive optimum in {opt}/{} cases",
            report.cases.len()
        );
    }
    if let Some(out) = &a.out {
        write_report(out, &report)?;
        RunManifest {
            invocation: Command::Oracle(a.clone()),
            seed: a.seed,
            inputs: vec![],
            outputs: vec![out.clone()],
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_secs: start.elapsed().as_secs_f64(),
        }
        .write(&manifest_path(out))?;
    }
    if report.violations > 0 {
        return Err(CliError::Failed(format!(
            "{} of {} cases violated the oracle",
            report.violations,
            report.cases.len()
        )));
    }
    Ok(())
}
