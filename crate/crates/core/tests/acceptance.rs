//! Acceptance suite: one test per release criterion, each printing a
//! single PASS/FAIL line (run with `-- --nocapture` to see them all).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use calibra::binning::{ece, BinningSpec, BinningStrategy};
use calibra::cumulative::{ecce, max_interval_miscalibration, sigma_n};
use calibra::dataset::canonicalize;
use calibra::pvalues::{
    exceedance, simulate_path_functionals, tail_maxabs, tail_range, BrownianTails, TailKind,
};
use calibra::synth::{generate, CalibrationFunction, GridKind, ScoreGrid, SynthConfig};

fn verdict(name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {name}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {name} failed: {detail}");
}

fn perfect_dataset(n: usize, seed: u64) -> calibra::dataset::Dataset {
    generate(&SynthConfig {
        grid: ScoreGrid {
            kind: GridKind::Equispaced,
            n,
        },
        calibration: CalibrationFunction::Perfect,
        seed,
    })
    .unwrap()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Under the null, the normalized statistics concentrate near the Brownian
/// expectations sqrt(pi/2) and 2*sqrt(2/pi).
#[test]
fn c01_null_normalized_means() {
    let reports: Vec<_> = (0..9)
        .map(|s| ecce(&perfect_dataset(32_768, s), &BrownianTails).unwrap())
        .collect();
    let mad = mean(&reports.iter().map(|r| r.mad_normalized).collect::<Vec<_>>());
    let r = mean(&reports.iter().map(|r| r.r_normalized).collect::<Vec<_>>());
    let ok = (1.10..=1.40).contains(&mad) && (1.45..=1.75).contains(&r);
    verdict(
        "1 null normalized means",
        ok,
        &format!("mean mad/sigma = {mad:.4} in [1.10, 1.40], mean r/sigma = {r:.4} in [1.45, 1.75]"),
    );
}

/// The binned ECE^2 has a sampling-noise floor near 1/96 that does not
/// shrink with n when the bin population is held at 16 draws per bin.
#[test]
fn c02_ece2_noise_floor() {
    let sizes = [8_192usize, 32_768, 131_072];
    let means: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let spec = BinningSpec {
                strategy: BinningStrategy::EqualCount,
                m: n / 16,
            };
            let vals: Vec<f64> = (0..9)
                .map(|s| ece(&perfect_dataset(n, s), &spec).unwrap().ece2)
                .collect();
            mean(&vals)
        })
        .collect();
    let mut ok = means.iter().all(|&m| (0.0083..=0.0125).contains(&m));
    for i in 0..means.len() {
        for j in 0..means.len() {
            let ratio = means[i] / means[j];
            ok &= (0.8..=1.25).contains(&ratio);
        }
    }
    verdict(
        "2 ece2 noise floor",
        ok,
        &format!(
            "mean ece2 = {:.5} / {:.5} / {:.5} at n = 8192 / 32768 / 131072, target band [0.0083, 0.0125]",
            means[0], means[1], means[2]
        ),
    );
}

/// ECCE-MAD converges to a positive limit under the sine perturbation but
/// keeps shrinking like sigma_n under perfect calibration.
#[test]
fn c03_ecce_consistency_vs_floor() {
    let sine = CalibrationFunction::sine(0.1, 2).unwrap();
    let sine_mads: Vec<f64> = (0..9)
        .map(|s| {
            let ds = generate(&SynthConfig {
                grid: ScoreGrid {
                    kind: GridKind::Equispaced,
                    n: 131_072,
                },
                calibration: sine.clone(),
                seed: s,
            })
            .unwrap();
            ecce(&ds, &BrownianTails).unwrap().ecce_mad
        })
        .collect();
    let sine_mean = mean(&sine_mads);
    let limit = 0.0159155;
    let rel = (sine_mean - limit).abs() / limit;

    let perfect_mad = |n: usize| {
        let vals: Vec<f64> = (0..9)
            .map(|s| ecce(&perfect_dataset(n, s), &BrownianTails).unwrap().ecce_mad)
            .collect();
        mean(&vals)
    };
    let shrink = perfect_mad(8_192) / perfect_mad(131_072);

    let ok = rel <= 0.25 && (2.5..=6.0).contains(&shrink);
    verdict(
        "3 ecce consistency vs floor",
        ok,
        &format!(
            "sine mean ecce_mad = {sine_mean:.6} vs limit {limit} (rel err {rel:.3}), perfect shrink 8192->131072 = {shrink:.2}"
        ),
    );
}

/// Published tail probabilities at the normalized statistics of the
/// reference examples.
#[test]
fn c04_pvalue_anchors() {
    let anchors: [(&str, f64, f64); 5] = [
        ("maxabs", 4.274, 3.8e-5),
        ("maxabs", 5.512, 7.1e-8),
        ("maxabs", 6.607, 7.8e-11),
        ("range", 5.186, 8.6e-7),
        ("range", 6.780, 4.8e-11),
    ];
    let mut ok = true;
    let mut worst = 0.0f64;
    for (kind, x, expected) in anchors {
        let p = match kind {
            "maxabs" => tail_maxabs(x).unwrap().p,
            _ => tail_range(x).unwrap().p,
        };
        let rel = (p - expected).abs() / expected;
        worst = worst.max(rel);
        ok &= rel <= 0.05;
    }
    verdict(
        "4 p-value anchors",
        ok,
        &format!("worst relative error {worst:.4} over 5 anchors, tolerance 0.05"),
    );
}

/// The truncated series agrees with a Monte Carlo exceedance estimate over
/// one shared simulation of a million Brownian paths.
#[test]
fn c05_series_vs_monte_carlo() {
    let sims = simulate_path_functionals(1_000_000, 4_096, 22);
    let mut ok = true;
    let mut worst = 0.0f64;
    for kind in [TailKind::MaxAbs, TailKind::Range] {
        for x in [0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
            let series = match kind {
                TailKind::MaxAbs => tail_maxabs(x).unwrap().p,
                TailKind::Range => tail_range(x).unwrap().p,
            };
            let mc = exceedance(&sims, kind, x);
            if mc.std_error == 0.0 {
                // Every path on one side: consistent as long as the series
                // predicts fewer than a handful of exceptions in expectation.
                let paths = sims.maxabs.len() as f64;
                ok &= (series - mc.estimate).abs() * paths <= 10.0;
                continue;
            }
            let devs = (series - mc.estimate).abs() / mc.std_error;
            worst = worst.max(devs);
            ok &= devs <= 4.0;
        }
    }
    verdict(
        "5 series vs monte carlo",
        ok,
        &format!("worst deviation {worst:.2} standard errors over 12 points, tolerance 4"),
    );
}

/// ECE^1 dominates ECE^2 on every dataset.
#[test]
fn c06_ece1_dominates_ece2() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0usize;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=256);
        let pairs: Vec<(f64, u8)> = (0..n)
            .map(|_| (rng.gen::<f64>(), rng.gen_range(0..=1)))
            .collect();
        let ds = canonicalize(&pairs, rng.gen()).unwrap();
        let spec = BinningSpec {
            strategy: if rng.gen() {
                BinningStrategy::Equispaced
            } else {
                BinningStrategy::EqualCount
            },
            m: rng.gen_range(1..=n),
        };
        let report = ece(&ds, &spec).unwrap();
        if report.ece1 < report.ece2 - 1e-15 {
            violations += 1;
        }
    }
    verdict(
        "6 ece1 >= ece2",
        violations == 0,
        &format!("{violations} violations in 10000 random datasets"),
    );
}

/// ECCE-R coincides with the brute-force maximum interval miscalibration.
#[test]
fn c07_interval_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let n = rng.gen_range(1..=64);
        let pairs: Vec<(f64, u8)> = (0..n)
            .map(|_| (rng.gen::<f64>(), rng.gen_range(0..=1)))
            .collect();
        let ds = canonicalize(&pairs, rng.gen()).unwrap();
        let report = ecce(&ds, &BrownianTails).unwrap();
        worst = worst.max((report.ecce_r - max_interval_miscalibration(&ds)).abs());
    }
    verdict(
        "7 interval oracle",
        worst < 1e-12,
        &format!("worst |ecce_r - oracle| = {worst:.2e} over 1000 datasets, tolerance 1e-12"),
    );
}

/// sigma_n never exceeds 1/(2 sqrt(n)), with equality when every score
/// is one half.
#[test]
fn c08_sigma_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ok = true;
    for _ in 0..1_000 {
        let n = rng.gen_range(1..=256);
        let pairs: Vec<(f64, u8)> = (0..n)
            .map(|_| (rng.gen::<f64>(), rng.gen_range(0..=1)))
            .collect();
        let ds = canonicalize(&pairs, rng.gen()).unwrap();
        ok &= sigma_n(&ds).unwrap() <= 1.0 / (2.0 * (n as f64).sqrt()) + 1e-15;
    }
    let n = 1_024usize;
    let half = canonicalize(&vec![(0.5, 1u8); n], 0).unwrap();
    let gap = (sigma_n(&half).unwrap() - 1.0 / (2.0 * (n as f64).sqrt())).abs();
    ok &= gap < 1e-12;
    verdict(
        "8 sigma bound",
        ok,
        &format!("bound held on 1000 datasets, all-0.5 equality gap {gap:.2e}"),
    );
}

/// Under the null the MAD P-value is approximately uniform.
#[test]
fn c09_pvalue_uniformity() {
    let mut ps: Vec<f64> = (0..1_000)
        .map(|s| ecce(&perfect_dataset(4_096, s), &BrownianTails).unwrap().p_mad)
        .collect();
    ps.sort_by(f64::total_cmp);
    let n = ps.len() as f64;
    let mut sup = 0.0f64;
    for (i, p) in ps.iter().enumerate() {
        sup = sup.max((p - i as f64 / n).abs());
        sup = sup.max((p - (i + 1) as f64 / n).abs());
    }
    verdict(
        "9 p-value uniformity",
        sup < 0.06,
        &format!("ECDF sup deviation {sup:.4} over 1000 null datasets, tolerance 0.06"),
    );
}

/// Every subcommand is deterministic: identical seed and input give
/// byte-identical outputs.
#[test]
fn c10_cli_determinism() {
    use calibra::cli::run_cli;
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path();
    let p = |name: &str| base.join(name).display().to_string();

    let data = p("d.csv");
    assert_eq!(
        run_cli([
            "calibra", "synth", "--n", "2048", "--grid", "squared", "--calibration",
            "sine:amp=0.1,freq=2", "--seed", "9", "--output", &data,
        ]),
        0
    );

    let commands: Vec<Vec<String>> = vec![
        vec![
            "synth", "--n", "512", "--grid", "sqrt", "--calibration", "perfect", "--seed", "3",
            "--output", &p("synth.out"),
        ],
        vec![
            "compute", "--input", &data, "--bins", "16", "--strategy", "equal-count", "--json",
            &p("compute.out"),
        ],
        vec![
            "cumulative", "--input", &data, "--svg", &p("cum_svg.out"), "--json",
            &p("cum_json.out"),
        ],
        vec![
            "reliability", "--input", &data, "--bins", "8", "--strategy", "equal-count",
            "--bootstrap", "20", "--seed", "5", "--svg", &p("rel.out"),
        ],
        vec![
            "sweep-bins", "--input", &data, "--bins", "4,8,16", "--csv", &p("sb_csv.out"),
            "--svg", &p("sb_svg.out"),
        ],
        vec![
            "sweep-n", "--sizes", "256,512", "--realizations", "2", "--draws-per-bin", "16",
            "--seed", "11", "--csv", &p("sn_csv.out"),
        ],
    ]
    .into_iter()
    .map(|args| args.into_iter().map(String::from).collect())
    .collect();

    let mut ok = true;
    for args in &commands {
        let mut argv = vec!["calibra".to_string()];
        argv.extend(args.iter().cloned());
        assert_eq!(run_cli(argv.clone()), 0, "{} failed", args[0]);
        let outs: Vec<&String> = args.iter().filter(|a| a.ends_with(".out")).collect();
        let first: Vec<Vec<u8>> = outs.iter().map(|o| std::fs::read(o).unwrap()).collect();
        assert_eq!(run_cli(argv), 0, "{} rerun failed", args[0]);
        for (out, before) in outs.iter().zip(first) {
            ok &= std::fs::read(out).unwrap() == before;
        }
    }
    verdict(
        "10 cli determinism",
        ok,
        "all 6 subcommands rerun byte-identical",
    );
}
