//! Acceptance checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always print; exits non-zero if any check fails.

use std::time::{Duration, Instant};

use clap::Parser;
use perfci::quantile::{inv_norm_cdf, sidak_quantile, QuantileRequest};
use perfci::{
    covariance_matrix, influence, max_abs_quantile, rare_positive_stress, run_coverage,
    BinaryDataset, Catalog, Choice, CorrelationMatrix, CoverageResult, EvaluationTarget,
    MeasureSpec, MomentTriple, SimConfig, WidthAudit,
};
use perfci_cli::args::{Cli, Command};
use perfci_cli::{analyze_cmd, coverage_cmd};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (
        elapsed < limit,
        format!("{:.2}s of {}s", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn inverse_normal() -> Outcome {
    let start = Instant::now();
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/tests/data/inv_norm_grid.csv"
    );
    let text = std::fs::read_to_string(path).unwrap();
    let grid: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (p, z) = l.split_once(',').unwrap();
            (p.parse().unwrap(), z.parse().unwrap())
        })
        .collect();
    let worst = grid
        .iter()
        .map(|&(p, z)| (inv_norm_cdf(p).unwrap() - z).abs())
        .fold(0.0, f64::max);
    let q975 = inv_norm_cdf(0.975).unwrap();
    let (fast, time) = within(start.elapsed(), Duration::from_secs(1));
    check(
        grid.len() == 1000 && worst < 1e-8 && (q975 - 1.959964).abs() < 1e-6 && fast,
        format!(
            "{} points, max error {worst:.2e}, Phi^-1(0.975) = {q975:.9}, {time}",
            grid.len()
        ),
    )
}

fn quantile_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for d in [1, 2, 3, 6, 12] {
        let req = QuantileRequest::new(0.05, CorrelationMatrix::identity(d)).seed(SEED);
        let q = max_abs_quantile(&req).unwrap().q;
        worst = worst.max((q - sidak_quantile(0.05, d).unwrap()).abs());
    }
    let ones = CorrelationMatrix::exchangeable(3, 1.0).unwrap();
    let q_ones = max_abs_quantile(&QuantileRequest::new(0.05, ones).seed(SEED))
        .unwrap()
        .q;
    let (fast, time) = within(start.elapsed(), Duration::from_secs(10));
    check(
        worst < 0.01 && (q_ones - 1.96).abs() < 0.01 && fast,
        format!("max |q - sidak| = {worst:.4}, all-ones q = {q_ones:.4}, {time}"),
    )
}

fn gradients() -> Outcome {
    let start = Instant::now();
    let measures = [
        MeasureSpec::accuracy(),
        MeasureSpec::f_beta(0.5).unwrap(),
        MeasureSpec::f_beta(1.0).unwrap(),
        MeasureSpec::f_beta(2.0).unwrap(),
        MeasureSpec::jaccard(),
        MeasureSpec::tversky(0.3, 0.4).unwrap(),
        MeasureSpec::tversky(0.5, 0.5).unwrap(),
        MeasureSpec::correlation(),
        MeasureSpec::cosine(),
        MeasureSpec::lift(),
        MeasureSpec::overlap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let h = 1e-6;
    for m in &measures {
        let mut done = 0;
        while done < 20 {
            let a: f64 = rng.random_range(0.05..0.95);
            let z: f64 = rng.random_range(0.05..0.95);
            let (lo, hi) = ((a + z - 1.0).max(0.0) + 0.01, a.min(z) - 0.01);
            if lo >= hi || (a - z).abs() < 0.02 {
                continue;
            }
            let t = MomentTriple::new(rng.random_range(lo..hi), a, z).unwrap();
            let g = m.gradient(&t).unwrap().as_array();
            let base = [t.za, t.a, t.z];
            let f = |x: [f64; 3]| {
                m.evaluate(&MomentTriple {
                    za: x[0],
                    a: x[1],
                    z: x[2],
                })
                .unwrap()
            };
            let mut err = 0.0;
            for c in 0..3 {
                let (mut up, mut down) = (base, base);
                up[c] += h;
                down[c] -= h;
                err += ((f(up) - f(down)) / (2.0 * h) - g[c]).powi(2);
            }
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            worst = worst.max(err.sqrt() / norm);
            done += 1;
            count += 1;
        }
    }
    let (fast, time) = within(start.elapsed(), Duration::from_secs(1));
    check(
        worst < 1e-5 && fast,
        format!(
            "{} measures x 20 triples ({count}), max relative error {worst:.2e}, {time}",
            measures.len()
        ),
    )
}

fn delta_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let catalog = Catalog::default();
    let names = ["accuracy", "f1", "jaccard", "cosine", "lift", "correlation"];
    let (mut worst, mut worst_acc): (f64, f64) = (0.0, 0.0);
    let mut datasets = 0;
    while datasets < 100 {
        let n = rng.random_range(5..=50);
        let z: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.5))).collect();
        let cols: Vec<(String, Vec<u8>)> = (0..2)
            .map(|r| {
                (
                    format!("r{r}"),
                    z.iter()
                        .map(|&v| v ^ u8::from(rng.random_bool(0.3)))
                        .collect(),
                )
            })
            .collect();
        let data = BinaryDataset::new(z.clone(), cols.clone()).unwrap();
        let k = rng.random_range(1..=4);
        let targets: Vec<EvaluationTarget> = (0..k)
            .map(|_| {
                EvaluationTarget::new(
                    format!("r{}", rng.random_range(0..2)),
                    names[rng.random_range(0..names.len())],
                )
            })
            .collect();
        let Ok(hs) = targets
            .iter()
            .map(|t| influence(&data, t, &catalog.get(&t.measure).unwrap()))
            .collect::<Result<Vec<_>, _>>()
        else {
            continue;
        };
        let v = covariance_matrix(&hs).unwrap().v;

        // W_i = (z a0, a0, z, z a1, a1, z)
        let w: Vec<[f64; 6]> = (0..n)
            .map(|i| {
                let (zi, a0, a1) = (z[i] as f64, cols[0].1[i] as f64, cols[1].1[i] as f64);
                [zi * a0, a0, zi, zi * a1, a1, zi]
            })
            .collect();
        let mean: Vec<f64> = (0..6)
            .map(|j| w.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let sigma = |p: usize, q: usize| {
            w.iter()
                .map(|r| (r[p] - mean[p]) * (r[q] - mean[q]))
                .sum::<f64>()
                / (n as f64 - 1.0)
        };
        let embed = |t: usize| {
            let mut g = [0.0; 6];
            let off = if targets[t].rule == "r0" { 0 } else { 3 };
            g[off..off + 3].copy_from_slice(&hs[t].gradient.as_array());
            g
        };
        for i in 0..k {
            for j in 0..k {
                let (gi, gj) = (embed(i), embed(j));
                let s: f64 = (0..6)
                    .flat_map(|p| (0..6).map(move |q| (p, q)))
                    .map(|(p, q)| gi[p] * sigma(p, q) * gj[q])
                    .sum();
                worst = worst.max((v[(i, j)] - s).abs() / s.abs().max(1.0));
            }
            if targets[i].measure == "accuracy" {
                let p = hs[i].estimate;
                let nf = n as f64;
                worst_acc = worst_acc.max((v[(i, i)] - nf * p * (1.0 - p) / (nf - 1.0)).abs());
            }
        }
        datasets += 1;
    }
    check(
        worst < 1e-12 && worst_acc < 1e-12,
        format!("100 datasets, max sandwich discrepancy {worst:.1e}, accuracy binomial discrepancy {worst_acc:.1e}"),
    )
}

fn range_check(values: &[f64], lo: f64, hi: f64) -> bool {
    values.iter().all(|&v| (lo..=hi).contains(&v))
}

fn mixture_criteria(result: &CoverageResult, elapsed: Duration) -> [Outcome; 3] {
    let c = result.choice(Choice::Uncorrected).unwrap();
    let (fast, time) = within(elapsed, Duration::from_secs(120));
    let ind: Vec<String> = c
        .individual_coverage
        .iter()
        .map(|p| format!("{p:.4}"))
        .collect();
    let joint = c.joint[0].coverage;
    [
        check(
            range_check(&c.individual_coverage, 0.93, 0.965) && fast,
            format!("individual coverages [{}], {time}", ind.join(", ")),
        ),
        check(
            c.all_individual_coverage <= 0.90,
            format!(
                "all six individual intervals cover together {:.4}",
                c.all_individual_coverage
            ),
        ),
        check(
            (0.93..=0.965).contains(&joint),
            format!(
                "joint coverage {joint:.4}, mean q {:.4}",
                c.joint[0].mean_q.unwrap_or(f64::NAN)
            ),
        ),
    ]
}

fn stress_criterion(result: &CoverageResult, elapsed: Duration) -> Outcome {
    let plain = result.choice(Choice::Uncorrected).unwrap().joint[0].coverage;
    let blurred = result.choice(Choice::Blurred).unwrap().joint[0].coverage;
    let (fast, time) = within(elapsed, Duration::from_secs(300));
    let truth: Vec<String> = result
        .truths
        .values
        .iter()
        .map(|t| format!("{}={:.4}", t.measure, t.value))
        .collect();
    check(
        blurred >= plain && (0.93..=0.975).contains(&blurred) && plain <= blurred - 0.01 && fast,
        format!(
            "true {}, joint coverage choice I {plain:.4}, choice II {blurred:.4}, {} replications, {time}",
            truth.join(" "),
            result.replications
        ),
    )
}

fn width_criterion(audits: &[WidthAudit]) -> Outcome {
    let sum = |f: fn(&WidthAudit) -> usize| audits.iter().map(f).sum::<usize>();
    let (jc, jv) = (sum(|a| a.joint_checks), sum(|a| a.joint_below_individual));
    let (cc, cv) = (
        sum(|a| a.choice_checks),
        sum(|a| a.blurred_below_uncorrected),
    );
    check(
        jv == 0 && cv == 0 && jc > 0 && cc > 0,
        format!("joint below individual {jv}/{jc}, choice II below choice I {cv}/{cc}"),
    )
}

fn determinism() -> Outcome {
    let input = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/predictions.csv");
    let analyze = Cli::parse_from([
        "perfci",
        "analyze",
        "-i",
        input,
        "--measures",
        "accuracy,f_beta(0.5),jaccard",
        "--joint",
        "all",
        "--seed",
        "5",
    ]);
    let coverage = Cli::parse_from([
        "perfci",
        "coverage",
        "--preset",
        "rare-positive",
        "--replications",
        "100",
        "--draws",
        "20000",
        "--seed",
        "5",
    ]);
    let run = |cli: &Cli| match &cli.command {
        Command::Analyze(a) => analyze_cmd(a).unwrap().text,
        Command::Coverage(c) => coverage_cmd(c).unwrap().text,
        Command::Quantile(_) => unreachable!(),
    };
    let a = (run(&analyze), run(&analyze));
    let c = (run(&coverage), run(&coverage));
    check(
        a.0 == a.1 && c.0 == c.1,
        format!(
            "analyze {} bytes, coverage {} bytes, repeated runs identical: {} / {}",
            a.0.len(),
            c.0.len(),
            a.0 == a.1,
            c.0 == c.1
        ),
    )
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "inverse normal CDF accuracy", inverse_normal()),
        (2, "equicoordinate quantile vs Sidak", quantile_oracle()),
        (3, "gradients vs finite differences", gradients()),
        (4, "delta-method identity", delta_identity()),
    ];

    let catalog = Catalog::default();
    let start = Instant::now();
    let mixture = run_coverage(&SimConfig::mixture_thresholds(SEED), &catalog).unwrap();
    let mixture_time = start.elapsed();
    let [c5, c6, c7] = mixture_criteria(&mixture, mixture_time);
    results.push((5, "individual coverage, mixture", c5));
    results.push((6, "joint-of-individual undercoverage", c6));
    results.push((7, "joint interval coverage, mixture", c7));

    let start = Instant::now();
    let stress =
        rare_positive_stress(SEED, 2000, perfci::quantile::DEFAULT_DRAWS, &catalog).unwrap();
    results.push((
        8,
        "blurring correction, rare positives",
        stress_criterion(&stress, start.elapsed()),
    ));
    results.push((
        9,
        "width dominance",
        width_criterion(&[mixture.width_audit, stress.width_audit]),
    ));
    results.push((10, "determinism", determinism()));

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("criterion {n:>2} {tag}  {name}: {}", o.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
