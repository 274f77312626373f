//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use consensus_core::consensus::{
    exhaustive_mean, f_value, frechet_value, g_value, h_value, mean_partition, MultipleAlignment,
    SolverConfig,
};
use consensus_core::ensemble::{
    gen_gaussian_grid, gen_uniform, generate_ensemble, EnsembleSpec, KMeansConfig,
};
use consensus_core::oracle::{random_hard, random_permutation, random_soft};
use consensus_core::partition::{frobenius_norm, is_asymmetric, stabilizer};
use consensus_core::profile::{motifs_of, profile_of, truncate};
use consensus_core::rng::{derive_seed, stream};
use consensus_core::stability::{
    average_reports, pairwise_instability, stability_sweep, StabilityReport, SweepConfig,
};
use consensus_core::{check_stationarity, delta, delta_bruteforce, LabeledPartition, Permutation};

const TOL: f64 = 1e-9;
const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_member<R: Rng>(ell: usize, m: usize, soft: bool, r: &mut R) -> LabeledPartition {
    if soft {
        random_soft(ell, m, r)
    } else {
        random_hard(ell, m, r)
    }
}

fn metric_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut agree = 0;
    for i in 0..500 {
        let mut r = stream(SEED, "c1", i);
        let ell = r.random_range(2..=6);
        let m = r.random_range(3..=12);
        let (x, y) = (random_soft(ell, m, &mut r), random_soft(ell, m, &mut r));
        let fast = delta(&x, &y).map_err(|e| e.to_string())?.distance;
        let slow = delta_bruteforce(&x, &y)
            .map_err(|e| e.to_string())?
            .distance;
        let d = (fast - slow).abs();
        worst = worst.max(d);
        agree += usize::from(d < TOL);
    }
    let t = start.elapsed();
    check(
        agree == 500 && t < Duration::from_secs(10),
        format!("{agree}/500 agree, max |diff| {worst:.2e}, {t:.2?} (limit 10 s)"),
    )
}

fn same_orbit(x: &LabeledPartition, y: &LabeledPartition) -> bool {
    Permutation::all(x.ell()).any(|p| x.permuted(&p).max_abs_diff(y).unwrap() < 1e-12)
}

fn metric_axioms() -> Outcome {
    let mut bad = Vec::new();
    for i in 0..1000 {
        let mut r = stream(SEED, "c2-triple", i);
        let ell = r.random_range(2..=5);
        let m = r.random_range(2..=8);
        let soft = i % 2 == 0;
        let x = random_member(ell, m, soft, &mut r);
        let y = random_member(ell, m, soft, &mut r);
        let z = random_member(ell, m, soft, &mut r);
        let d = |a: &LabeledPartition, b: &LabeledPartition| delta(a, b).unwrap().distance;
        let (xy, yx, yz, xz) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z));
        if (xy - yx).abs() > TOL {
            bad.push(format!("symmetry #{i}"));
        }
        if xz > xy + yz + TOL {
            bad.push(format!("triangle #{i}"));
        }
        if (xy <= TOL) != same_orbit(&x, &y) || d(&x, &x) > TOL {
            bad.push(format!("identity #{i}"));
        }
    }
    for i in 0..200 {
        let mut r = stream(SEED, "c2-orbit", i);
        let ell = r.random_range(2..=6);
        let m = r.random_range(2..=10);
        let x = random_member(ell, m, i % 2 == 0, &mut r);
        let p = random_permutation(ell, &mut r);
        if delta(&x, &x.permuted(&p)).unwrap().distance > TOL {
            bad.push(format!("orbit #{i}"));
        }
    }
    check(
        bad.is_empty(),
        format!("1000 triples + 200 orbit pairs, violations: {bad:?}"),
    )
}

fn stationarity() -> Outcome {
    let (mut converged, mut bad) = (0, Vec::new());
    for i in 0..100 {
        let mut r = stream(SEED, "c3", i);
        let n = r.random_range(2..=10);
        let ell = r.random_range(2..=5);
        let m = r.random_range(3..=20);
        let soft = r.random_bool(0.5);
        let sample: Vec<_> = (0..n)
            .map(|_| random_member(ell, m, soft, &mut r))
            .collect();
        let res = mean_partition(
            &sample,
            &SolverConfig {
                seed: i,
                ..SolverConfig::default()
            },
        )
        .map_err(|e| e.to_string())?;
        let monotone = res
            .f_trace
            .windows(2)
            .all(|w| w[1] <= w[0] + 1e-12 * w[0].max(1.0));
        if !monotone {
            bad.push(format!("trace #{i}"));
        }
        if res.converged {
            converged += 1;
            if !check_stationarity(&res) {
                bad.push(format!("stationarity #{i}"));
            }
        }
    }
    check(
        bad.is_empty(),
        format!("{converged}/100 runs converged, all checked; violations: {bad:?}"),
    )
}

fn global_optimum() -> Outcome {
    let start = Instant::now();
    let (mut hits, mut bad, mut worst) = (0, Vec::new(), 0.0_f64);
    for i in 0..50 {
        let mut r = stream(SEED, "c4", i);
        let n = r.random_range(2..=4);
        let ell = r.random_range(2..=3);
        let m = r.random_range(3..=6);
        let soft = r.random_bool(0.5);
        let sample: Vec<_> = (0..n)
            .map(|_| random_member(ell, m, soft, &mut r))
            .collect();
        let exact = exhaustive_mean(&sample).map_err(|e| e.to_string())?;
        let f = f_value(&exact.alignment);
        let g = g_value(&exact.alignment);
        let res = (exact.frechet_value - f).abs().max((f - g / 2.0).abs());
        worst = worst.max(res);
        if res > TOL {
            bad.push(format!("identity #{i}"));
        }
        let heur = mean_partition(
            &sample,
            &SolverConfig {
                restarts: 6,
                seed: i,
                ..SolverConfig::default()
            },
        )
        .map_err(|e| e.to_string())?;
        if heur.frechet_value < exact.frechet_value - TOL {
            bad.push(format!("heuristic below optimum #{i}"));
        }
        hits += usize::from(heur.frechet_value <= exact.frechet_value + TOL);
    }
    let t = start.elapsed();
    check(
        bad.is_empty() && t < Duration::from_secs(30),
        format!(
            "max identity residual {worst:.2e}; heuristic attained F* in {hits}/50; {t:.2?} (limit 30 s); violations: {bad:?}"
        ),
    )
}

fn identities() -> Outcome {
    let (mut worst_a, mut worst_g) = (0.0_f64, 0.0_f64);
    for i in 0..200 {
        let mut r = stream(SEED, "c5-align", i);
        let n = r.random_range(2..=10);
        let ell = r.random_range(2..=6);
        let m = r.random_range(2..=20);
        let sample: Vec<_> = (0..n)
            .map(|_| random_member(ell, m, i % 2 == 0, &mut r))
            .collect();
        let perms = (0..n).map(|_| random_permutation(ell, &mut r)).collect();
        let a = MultipleAlignment::from_sample(&sample, perms).map_err(|e| e.to_string())?;
        let nf = n as f64;
        let (g, f, h) = (g_value(&a), f_value(&a), h_value(&a));
        let norms = a
            .members()
            .iter()
            .map(|x| frobenius_norm(x).powi(2))
            .sum::<f64>()
            / nf;
        worst_a = worst_a
            .max((g - 2.0 * f).abs())
            .max((f - (norms - h / nf)).abs());
    }
    for i in 0..100 {
        let mut r = stream(SEED, "c5-ensemble", i);
        let n = r.random_range(2..=10);
        let ell = r.random_range(2..=6);
        let m = r.random_range(2..=20);
        let sample: Vec<_> = (0..n)
            .map(|_| random_member(ell, m, i % 2 == 0, &mut r))
            .collect();
        let big_g = pairwise_instability(&sample).map_err(|e| e.to_string())?;
        let mut avg = 0.0;
        for x in &sample {
            avg += frechet_value(&sample, x).map_err(|e| e.to_string())?;
        }
        worst_g = worst_g.max((big_g - avg / n as f64).abs());
    }
    check(
        worst_a < TOL && worst_g < TOL,
        format!("alignment identities max residual {worst_a:.2e}; G vs mean F_n(X_i) max residual {worst_g:.2e}"),
    )
}

fn chain_rows(rep: &StabilityReport, bad: &mut Vec<String>, tag: &str) -> usize {
    for row in &rep.rows {
        if row.pairwise > row.multiple + TOL || row.gap < 0.0 {
            bad.push(format!("{tag} k={}", row.k));
        }
        if let Some(e) = row.exact {
            if e.frechet > row.pairwise + TOL || row.pairwise > e.g + TOL {
                bad.push(format!("{tag} exact k={}", row.k));
            }
        }
    }
    rep.rows.iter().filter(|r| r.exact.is_some()).count()
}

fn inequality_chain() -> Outcome {
    let mut bad = Vec::new();
    let mut rows = 0;
    let mut exact_rows = 0;
    let solver = SolverConfig::default();
    for t in 0..3 {
        let sweep = SweepConfig {
            seed: derive_seed(SEED, "c6-sweep", t),
            kmeans: KMeansConfig::default(),
        };
        let grid = gen_gaussian_grid(2, 2, 0.2, 15, derive_seed(SEED, "c6-grid", t)).unwrap();
        let rep = stability_sweep(&grid, 1, 7, 12, &sweep, &solver).map_err(|e| e.to_string())?;
        rows += rep.rows.len();
        exact_rows += chain_rows(&rep, &mut bad, "grid");
        let uni = gen_uniform(40, 2, derive_seed(SEED, "c6-uniform", t)).unwrap();
        let rep = stability_sweep(&uni, 2, 6, 12, &sweep, &solver).map_err(|e| e.to_string())?;
        rows += rep.rows.len();
        exact_rows += chain_rows(&rep, &mut bad, "uniform");
        let tiny = gen_uniform(8, 2, derive_seed(SEED, "c6-tiny", t)).unwrap();
        let rep = stability_sweep(&tiny, 2, 3, 3, &sweep, &solver).map_err(|e| e.to_string())?;
        rows += rep.rows.len();
        exact_rows += chain_rows(&rep, &mut bad, "tiny");
    }
    for i in 0..100 {
        let mut r = stream(SEED, "c6-exact", i);
        let n = r.random_range(2..=4);
        let ell = r.random_range(2..=3);
        let m = r.random_range(3..=6);
        let soft = r.random_bool(0.5);
        let sample: Vec<_> = (0..n)
            .map(|_| random_member(ell, m, soft, &mut r))
            .collect();
        let e = exhaustive_mean(&sample).map_err(|e| e.to_string())?;
        let big_g = pairwise_instability(&sample).map_err(|e| e.to_string())?;
        if e.frechet_value > big_g + TOL || big_g > g_value(&e.alignment) + TOL {
            bad.push(format!("exact #{i}"));
        }
    }
    check(
        bad.is_empty(),
        format!("{rows} stability rows ({exact_rows} with exhaustive scores) + 100 exhaustive instances; violations: {bad:?}"),
    )
}

fn motif_structure() -> Outcome {
    let mut bad = Vec::new();
    for i in 0..100 {
        let mut r = stream(SEED, "c7", i);
        let n = r.random_range(1..=12);
        let ell = r.random_range(2..=6);
        let m = r.random_range(2..=25);
        let soft = r.random_bool(0.3);
        let sample: Vec<_> = (0..n)
            .map(|_| random_member(ell, m, soft, &mut r))
            .collect();
        let perms = (0..n).map(|_| random_permutation(ell, &mut r)).collect();
        let a = MultipleAlignment::from_sample(&sample, perms).map_err(|e| e.to_string())?;
        let p = profile_of(&a);
        let mut prev: Option<BTreeSet<usize>> = None;
        for tau in [0.55, 0.7, 0.9] {
            let t = truncate(&p, tau).map_err(|e| e.to_string())?;
            if (0..m).any(|j| (0..ell).map(|k| t[k * m + j] as usize).sum::<usize>() > 1) {
                bad.push(format!("column #{i} tau {tau}"));
            }
            let ms = motifs_of(&p, tau).map_err(|e| e.to_string())?;
            let total: usize = ms.motifs.iter().map(Vec::len).sum();
            let union: BTreeSet<usize> = ms.motifs.iter().flatten().copied().collect();
            if total != union.len() {
                bad.push(format!("overlap #{i} tau {tau}"));
            }
            let covered: BTreeSet<usize> = ms.covered.iter().copied().collect();
            if union != covered || covered.len() + ms.uncovered.len() != m {
                bad.push(format!("cover #{i} tau {tau}"));
            }
            if let Some(before) = &prev {
                if !covered.is_subset(before) {
                    bad.push(format!("monotone #{i} tau {tau}"));
                }
            }
            prev = Some(covered);
        }
    }
    check(
        bad.is_empty(),
        format!("100 profiles x 3 thresholds; violations: {bad:?}"),
    )
}

fn grid_motifs() -> Outcome {
    let start = Instant::now();
    let mut counts = Vec::new();
    let mut overlap = false;
    for s in 0..5 {
        let data = gen_gaussian_grid(3, 3, 0.12, 40, derive_seed(SEED, "c8-data", s)).unwrap();
        let spec = EnsembleSpec {
            n: 100,
            k: 9,
            seed: derive_seed(SEED, "c8-ensemble", s),
            kmeans: KMeansConfig::default(),
        };
        let sample = generate_ensemble(&data, &spec).map_err(|e| e.to_string())?;
        let cfg = SolverConfig {
            seed: derive_seed(SEED, "c8-solver", s),
            ..SolverConfig::default()
        };
        let res = mean_partition(&sample, &cfg).map_err(|e| e.to_string())?;
        let ms = motifs_of(&profile_of(&res.alignment), 0.8).map_err(|e| e.to_string())?;
        let total: usize = ms.motifs.iter().map(Vec::len).sum();
        overlap |= total != ms.covered.len();
        let gt = data.ground_truth().unwrap();
        let purity = ms.purity(gt);
        let majority = ms.majority_labels(gt);
        let mut found = BTreeSet::new();
        for (k, motif) in ms.motifs.iter().enumerate() {
            if let (Some(p), Some(c)) = (purity[k], majority[k]) {
                let size_of_c = gt.iter().filter(|&&l| l == c).count();
                if p >= 0.9 && 2 * motif.len() >= size_of_c {
                    found.insert(c);
                }
            }
        }
        counts.push(found.len());
    }
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    let t = start.elapsed();
    check(
        !overlap && mean >= 7.0 && t < Duration::from_secs(60),
        format!(
            "components with a >= 90% pure motif per seed {counts:?}, mean {mean:.1} (need >= 7); disjoint: {}; {t:.2?} (limit 60 s)",
            !overlap
        ),
    )
}

/// Index of the smallest value when it lies strictly inside the curve and is
/// at least 20% below both neighbours.
fn pronounced_interior_min(ks: &[usize], v: &[f64]) -> Option<usize> {
    let i = (0..v.len()).fold(0, |b, i| if v[i] < v[b] { i } else { b });
    (i > 0 && i + 1 < v.len() && v[i] <= 0.8 * v[i - 1] && v[i] <= 0.8 * v[i + 1]).then(|| ks[i])
}

fn cluster_count() -> Outcome {
    let start = Instant::now();
    let solver = SolverConfig::default();
    let run = |label: &str, make: &dyn Fn(u64) -> consensus_core::Dataset| {
        (0..5u64)
            .map(|t| {
                let sweep = SweepConfig {
                    seed: derive_seed(SEED, &format!("{label}-sweep"), t),
                    kmeans: KMeansConfig::default(),
                };
                let cfg = SolverConfig {
                    seed: derive_seed(SEED, &format!("{label}-solver"), t),
                    ..solver
                };
                stability_sweep(&make(t), 2, 8, 30, &sweep, &cfg)
            })
            .collect::<consensus_core::Result<Vec<_>>>()
    };
    let grid = run("c9-grid", &|t| {
        gen_gaussian_grid(2, 2, 0.12, 50, derive_seed(SEED, "c9-grid-data", t)).unwrap()
    })
    .map_err(|e| e.to_string())?;
    let hits = grid
        .iter()
        .filter(|r| r.selected.pairwise == 4 && r.selected.multiple == 4 && r.selected.frechet == 4)
        .count();
    let grid_avg = average_reports(&grid).map_err(|e| e.to_string())?.selected;

    let uni = run("c9-uniform", &|t| {
        gen_uniform(200, 2, derive_seed(SEED, "c9-uniform-data", t)).unwrap()
    })
    .map_err(|e| e.to_string())?;
    let avg = average_reports(&uni).map_err(|e| e.to_string())?;
    let ks: Vec<usize> = avg.rows.iter().map(|r| r.k).collect();
    let curve =
        |f: fn(&consensus_core::StabilityRow) -> f64| avg.rows.iter().map(f).collect::<Vec<_>>();
    let pronounced: Vec<(&str, usize)> = [
        ("G", pronounced_interior_min(&ks, &curve(|r| r.pairwise))),
        ("g", pronounced_interior_min(&ks, &curve(|r| r.multiple))),
        ("F", pronounced_interior_min(&ks, &curve(|r| r.frechet))),
    ]
    .into_iter()
    .filter_map(|(n, k)| k.map(|k| (n, k)))
    .collect();
    let g_uniform: Vec<String> = curve(|r| r.pairwise)
        .iter()
        .map(|v| format!("{v:.1}"))
        .collect();
    let t = start.elapsed();
    check(
        hits >= 4 && pronounced.is_empty() && t < Duration::from_secs(300),
        format!(
            "grid: argmin k=4 for G, g, F in {hits}/5 trials (need >= 4), trial-average selects {:?}; uniform: pronounced interior minima {pronounced:?} (need none), averaged G over k=2..8 [{}]; {t:.2?} (limit 300 s)",
            (grid_avg.pairwise, grid_avg.multiple, grid_avg.frechet),
            g_uniform.join(", ")
        ),
    )
}

fn asymmetry() -> Outcome {
    let mut symmetric = 0;
    for i in 0..100 {
        let mut r = stream(SEED, "c10", i);
        let ell = r.random_range(2..=6);
        let m = r.random_range(1..=12);
        let base = random_hard(ell, m, &mut r);
        let noise = random_soft(ell, m, &mut r);
        let rows: Vec<Vec<f64>> = (0..ell)
            .map(|k| {
                (0..m)
                    .map(|j| 0.9 * base.get(k, j) + 0.1 * noise.get(k, j))
                    .collect()
            })
            .collect();
        let x = LabeledPartition::from_rows(&rows).map_err(|e| e.to_string())?;
        symmetric += usize::from(!is_asymmetric(&x).map_err(|e| e.to_string())?);
    }
    let mut orders = Vec::new();
    let mut uniform_ok = true;
    for ell in 1..=6 {
        let u = LabeledPartition::uniform(ell, 5).map_err(|e| e.to_string())?;
        let order = stabilizer(&u).map_err(|e| e.to_string())?.len();
        uniform_ok &= order == (1..=ell).product::<usize>();
        orders.push(order);
    }
    check(
        symmetric == 0 && uniform_ok,
        format!("{symmetric}/100 perturbed partitions symmetric; uniform stabilizer orders for ell=1..6: {orders:?}"),
    )
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_consensus")
}

fn run_cli(args: &[&str], threads: usize) -> Result<(), String> {
    let out = Command::new(bin())
        .args(args)
        .env("THREADS", threads.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?} exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn snapshot(paths: &[PathBuf]) -> Result<Vec<Vec<u8>>, String> {
    paths
        .iter()
        .map(|p| std::fs::read(p).map_err(|e| format!("{}: {e}", p.display())))
        .collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name);
    let s = |path: &Path| path.to_str().unwrap().to_string();
    let (data, ens, mean, motifs, stab, oracle) = (
        p("d.csv"),
        p("e.json"),
        p("m.json"),
        p("mo.json"),
        p("st"),
        p("o.json"),
    );
    let steps: Vec<(Vec<String>, PathBuf, Vec<PathBuf>)> = vec![
        (
            vec![
                "gen-data",
                "--kind",
                "gaussian-grid",
                "--rows",
                "3",
                "--cols",
                "3",
                "--points-per",
                "30",
                "--seed",
                "7",
                "--out",
                &s(&data),
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            p("d.csv.manifest.json"),
            vec![data.clone()],
        ),
        (
            vec![
                "ensemble",
                "--data",
                &s(&data),
                "--k",
                "9",
                "--n",
                "40",
                "--seed",
                "3",
                "--out",
                &s(&ens),
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            p("e.json.manifest.json"),
            vec![ens.clone()],
        ),
        (
            vec![
                "mean",
                "--ensemble",
                &s(&ens),
                "--restarts",
                "6",
                "--seed",
                "5",
                "--out",
                &s(&mean),
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            p("m.json.manifest.json"),
            vec![mean.clone()],
        ),
        (
            vec![
                "motifs",
                "--ensemble",
                &s(&ens),
                "--tau",
                "0.8",
                "--data",
                &s(&data),
                "--seed",
                "5",
                "--out",
                &s(&motifs),
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            p("mo.json.manifest.json"),
            vec![motifs.clone(), p("mo.csv")],
        ),
        (
            vec![
                "stability",
                "--kind",
                "gaussian-grid",
                "--rows",
                "2",
                "--cols",
                "2",
                "--points-per",
                "20",
                "--kmin",
                "2",
                "--kmax",
                "5",
                "--n",
                "8",
                "--trials",
                "2",
                "--seed",
                "9",
                "--out-prefix",
                &s(&stab),
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            p("st.manifest.json"),
            vec![
                p("st.csv"),
                p("st.json"),
                p("st.trial-0.csv"),
                p("st.trial-1.csv"),
            ],
        ),
        (
            vec![
                "oracle",
                "--suite",
                "mean",
                "--cases",
                "20",
                "--seed",
                "4",
                "--out",
                &s(&oracle),
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            p("o.json.manifest.json"),
            vec![oracle.clone()],
        ),
    ];
    let mut checked = 0;
    for (args, manifest, outputs) in &steps {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        run_cli(&argv, 1)?;
        let first = snapshot(outputs)?;
        for threads in [4, 2] {
            run_cli(&["rerun", "--manifest", &s(manifest)], threads)?;
            if snapshot(outputs)? != first {
                return Err(format!(
                    "{} differs on rerun with THREADS={threads}",
                    argv[0]
                ));
            }
            checked += outputs.len();
        }
    }
    Ok(format!(
        "{} commands re-run from manifests with THREADS=1,4,2; {checked} output comparisons byte-identical",
        steps.len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("metric-oracle equivalence", metric_oracle),
        ("metric axioms", metric_axioms),
        ("stationarity of converged means", stationarity),
        ("global optimum oracle", global_optimum),
        ("algebraic identities", identities),
        ("inequality chain", inequality_chain),
        ("motif structure", motif_structure),
        ("3x3 grid motif recovery", grid_motifs),
        ("cluster-count selection", cluster_count),
        ("asymmetry prevalence", asymmetry),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {:>2}", i + 1);
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || id.ends_with(f.as_str()))
        {
            continue;
        }
        match run() {
            Ok(detail) => println!("{id} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
