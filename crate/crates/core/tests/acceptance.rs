//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p driftvote --test acceptance`.

use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use driftvote::adaptive::threshold_value;
use driftvote::driftgen::{apply_permute_drift, resolve_stream, PAPER_BLOCK_LEN};
use driftvote::eval::{accuracy, median_window};
use driftvote::{
    compute_a_const, compute_phi, exact_correlation_from_p, generate_synthetic, recover_accuracies,
    run_strategy, AdaptiveConfig, ClipRange, RawVoteVector, StepReport, Strategy, StreamStep,
    SyntheticStreamConfig, VoteVector, WindowSchedule, WindowedCorrelationBank,
};

const SEEDS: u64 = 10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn paper_config() -> AdaptiveConfig {
    AdaptiveConfig::with_defaults(3).unwrap()
}

fn random_votes(rng: &mut ChaCha8Rng, n: usize) -> Vec<i8> {
    (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect()
}

fn stationary_votes(rng: &mut ChaCha8Rng, p: &[f64]) -> VoteVector {
    let y: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
    VoteVector::new(p.iter().map(|&pi| if rng.gen_bool(pi) { y } else { -y }).collect()).unwrap()
}

/// Runs `f(seed)` for every seed on its own thread, results in seed order.
fn per_seed<T: Send>(seeds: std::ops::Range<u64>, f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = seeds.map(|seed| s.spawn(move || f(seed))).collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn median(mut xs: Vec<usize>) -> usize {
    xs.sort_unstable();
    xs[(xs.len() - 1) / 2]
}

fn triplet_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let n = 3 + trial % 6;
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(0.55..=0.95)).collect();
        let c = exact_correlation_from_p(&p).unwrap();
        let est = recover_accuracies(&c, ClipRange::default()).unwrap();
        for (got, want) in est.raw_p.iter().zip(&p) {
            worst = worst.max((got - want).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("max |p_hat - p| = {worst:.2e} (tol 1e-9), {elapsed:.2?} (< 1s)"),
    )
}

fn incremental_oracle() -> Outcome {
    let start = Instant::now();
    let n = 5;
    let windows: Vec<usize> = (0..14).map(|k| 1usize << k).collect();
    let mut bank = WindowedCorrelationBank::new(n, &windows).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    let mut history: Vec<Vec<i8>> = Vec::new();
    let mut checks = 0;
    let mut mismatches = 0;
    for step in 1..=10_000usize {
        let v = random_votes(&mut rng, n);
        bank.push(&VoteVector::new(v.clone()).unwrap()).unwrap();
        history.push(v);
        if step % 97 != 0 {
            continue;
        }
        for &r in &windows {
            let len = r.min(step);
            let mut sums = vec![0i64; n * n];
            for v in &history[step - len..] {
                for i in 0..n {
                    for j in 0..n {
                        sums[i * n + j] += (v[i] * v[j]) as i64;
                    }
                }
            }
            let c = bank.correlation(r).unwrap();
            let exact = sums
                .iter()
                .zip(c.as_row_major())
                .all(|(&s, &x)| x == s as f64 / len as f64);
            checks += 1;
            if bank.sums(r).unwrap() != sums.as_slice() || !exact {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(10),
        format!("{checks} window checks, {mismatches} mismatches, {elapsed:.2?} (< 10s)"),
    )
}

fn synthetic_reproduction() -> Outcome {
    let cfg = paper_config();
    let runs: Vec<(SyntheticStreamConfig, Vec<StepReport>)> = per_seed(0..SEEDS, |seed| {
        let stream_cfg = SyntheticStreamConfig::paper_preset(PAPER_BLOCK_LEN, seed).unwrap();
        let steps = generate_synthetic(&stream_cfg);
        let resolved = resolve_stream(&steps, seed).unwrap();
        let reports = run_strategy(resolved, Strategy::Adaptive, &cfg).unwrap();
        (stream_cfg, reports)
    });
    let layout = &runs[0].0;

    // (a) mean clipped estimate over the second half of each block
    let mut worst_dev = 0.0f64;
    let mut start = 0usize;
    for block in &layout.blocks {
        let half = start + block.length / 2..start + block.length;
        for (i, &p) in block.accuracies.iter().enumerate() {
            let mut total = 0.0;
            let mut count = 0usize;
            for (_, reports) in &runs {
                for r in &reports[half.clone()] {
                    total += r.p_hat.as_ref().unwrap()[i];
                    count += 1;
                }
            }
            worst_dev = worst_dev.max((total / count as f64 - p).abs());
        }
        start += block.length;
    }
    let part_a = worst_dev <= 0.05;

    // (b) window medians around each boundary, pooled over seeds
    let mut part_b = true;
    let mut ratios = Vec::new();
    let mut per_seed_ok = 0;
    let mut delays = Vec::new();
    for &b in &layout.boundaries() {
        let first_new = (b - 1) as usize;
        for (_, reports) in &runs {
            let before = reports[first_new - 1].window.unwrap();
            if let Some(d) = reports[first_new..].iter().position(|r| 4 * r.window.unwrap() <= before) {
                delays.push(d);
            }
        }
        let window = |range: std::ops::Range<usize>, reports: &[StepReport]| -> Vec<usize> {
            reports[range].iter().map(|r| r.window.unwrap()).collect::<Vec<_>>()
        };
        let before: Vec<usize> = runs.iter().flat_map(|(_, r)| window(first_new - 200..first_new, r)).collect();
        let after: Vec<usize> = runs.iter().flat_map(|(_, r)| window(first_new..first_new + 200, r)).collect();
        let (mb, ma) = (median(before), median(after));
        part_b &= 4 * ma <= mb;
        ratios.push(format!("{ma}/{mb}"));
        per_seed_ok += runs
            .iter()
            .filter(|(_, r)| {
                4 * median(window(first_new..first_new + 200, r)) <= median(window(first_new - 200..first_new, r))
            })
            .count();
    }
    outcome(
        part_a && part_b,
        format!(
            "(a) worst |mean p_hat - p| = {worst_dev:.4} (tol 0.05); (b) median after/before = {} (need <= 1/4), per-seed {per_seed_ok}/{}; steps until window first shrinks 4x: min {} median {} max {}",
            ratios.join(", "),
            SEEDS as usize * layout.boundaries().len(),
            delays.iter().min().unwrap_or(&0),
            median(delays.clone()),
            delays.iter().max().unwrap_or(&0),
        ),
    )
}

fn fixed_one_is_majority() -> Outcome {
    let mut differing = 0;
    let mut steps_checked = 0;
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let n = 3 + seed as usize;
        let steps: Vec<StreamStep> = (0..3000)
            .map(|_| StreamStep {
                raw: RawVoteVector::new((0..n).map(|_| rng.gen_range(-1i8..=1)).collect()).unwrap(),
                truth: None,
                block_id: None,
            })
            .collect();
        let cfg = AdaptiveConfig::with_defaults(n).unwrap();
        let fixed = run_strategy(resolve_stream(&steps, seed).unwrap(), Strategy::Fixed(1), &cfg).unwrap();
        let major = run_strategy(resolve_stream(&steps, seed).unwrap(), Strategy::Majority, &cfg).unwrap();
        differing += fixed.iter().zip(&major).filter(|(a, b)| a.prediction != b.prediction).count();
        steps_checked += fixed.len();
    }
    outcome(
        differing == 0,
        format!("{differing} differing predictions over {steps_checked} steps (5 streams, n = 3..7, with abstentions)"),
    )
}

fn adaptive_competitiveness() -> Outcome {
    let cfg = paper_config();
    let mut strategies = vec![Strategy::Adaptive];
    strategies.extend(cfg.schedule().sizes().iter().map(|&r| Strategy::Fixed(r)));
    let per_run: Vec<Vec<f64>> = per_seed(0..SEEDS, |seed| {
        let stream_cfg = SyntheticStreamConfig::paper_preset(PAPER_BLOCK_LEN, seed).unwrap();
        let resolved = resolve_stream(&generate_synthetic(&stream_cfg), seed).unwrap();
        strategies
            .iter()
            .map(|&s| accuracy(&run_strategy(resolved.clone(), s, &cfg).unwrap()).unwrap())
            .collect()
    });
    let mean = |k: usize| per_run.iter().map(|accs| accs[k]).sum::<f64>() / SEEDS as f64;
    let adaptive = mean(0);
    let (best_k, best) = (1..strategies.len())
        .map(|k| (k, mean(k)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    outcome(
        adaptive >= best - 0.02,
        format!(
            "adaptive {adaptive:.4} vs best fixed {} {best:.4} (need >= best - 0.02)",
            strategies[best_k]
        ),
    )
}

fn permute_sensitivity() -> Outcome {
    let cfg = paper_config();
    let pairs: Vec<(usize, usize)> = per_seed(0..SEEDS, |seed| {
        let stream_cfg = SyntheticStreamConfig::new(
            vec!["20000:0.9,0.9,0.6".parse().unwrap()],
            1000 + seed,
        )
        .unwrap();
        let base = generate_synthetic(&stream_cfg);
        let shuffled = apply_permute_drift(&base, 1e-3, 1000 + seed).unwrap();
        let run = |steps: &[StreamStep]| {
            let reports = run_strategy(resolve_stream(steps, seed).unwrap(), Strategy::Adaptive, &cfg).unwrap();
            median_window(&reports).unwrap()
        };
        (run(&base), run(&shuffled))
    });
    let smaller = pairs.iter().filter(|(plain, perm)| perm < plain).count();
    let shown: Vec<String> = pairs.iter().map(|(a, b)| format!("{a}->{b}")).collect();
    outcome(
        smaller >= 8,
        format!("median window smaller under shuffling in {smaller}/10 pairs (need >= 8): {}", shown.join(" ")),
    )
}

fn concentration_bound() -> Outcome {
    let p = [0.9, 0.9, 0.6];
    let exact = exact_correlation_from_p(&p).unwrap();
    let a = compute_a_const(3, 20, 0.1).unwrap();
    let windows = [64usize, 256, 1024];
    let trials = 200;
    let mut within = [0usize; 3];
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(70_000 + trial);
        let mut bank = WindowedCorrelationBank::new(3, &windows).unwrap();
        for _ in 0..1024 {
            bank.push(&stationary_votes(&mut rng, &p)).unwrap();
        }
        for (k, &r) in windows.iter().enumerate() {
            let err = bank.correlation(r).unwrap().sup_distance(&exact);
            if err <= a / (r as f64).sqrt() {
                within[k] += 1;
            }
        }
    }
    let fractions: Vec<f64> = within.iter().map(|&w| w as f64 / trials as f64).collect();
    outcome(
        fractions.iter().all(|&f| f >= 0.9),
        format!(
            "fraction within A/sqrt(r) for r = 64, 256, 1024: {:?} (need >= 0.90)",
            fractions
        ),
    )
}

fn constant_spot_checks() -> Outcome {
    // 40-digit mpmath evaluations
    const A_REF: f64 = 3.939011604032602;
    const PHI_REF: f64 = 24.31370849898476;
    const THRESHOLD_REF: f64 = 1.786552068595237;
    let a = compute_a_const(3, 20, 0.1).unwrap();
    let phi = compute_phi(
        &WindowSchedule::powers_of_two(20).unwrap(),
        std::f64::consts::SQRT_2 - 1.0,
    )
    .unwrap();
    let thr = threshold_value(a, 0.1, 4, 8);
    let errs = [(a - A_REF).abs(), (phi - PHI_REF).abs(), (thr - THRESHOLD_REF).abs()];
    outcome(
        errs.iter().all(|&e| e <= 1e-9),
        format!("A = {a:.12}, Phi = {phi:.12}, threshold = {thr:.12}; max err {:.1e} (tol 1e-9)", errs.iter().cloned().fold(0.0, f64::max)),
    )
}

fn memory_bound() -> Outcome {
    let schedule = WindowSchedule::powers_of_two(14).unwrap();
    let r_max = schedule.largest();
    let mut bank = WindowedCorrelationBank::for_schedule(4, &schedule).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut peak = 0;
    for _ in 0..10 * r_max {
        bank.push(&VoteVector::new(random_votes(&mut rng, 4)).unwrap()).unwrap();
        peak = peak.max(bank.retained());
    }
    outcome(
        peak <= r_max && bank.capacity() == r_max,
        format!("peak retained {peak} vectors over {} steps (r_max = {r_max})", 10 * r_max),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("triplet round-trip", triplet_round_trip),
        ("incremental update matches recomputation", incremental_oracle),
        ("synthetic block-drift reproduction", synthetic_reproduction),
        ("fixed:1 equals majority vote", fixed_one_is_majority),
        ("adaptive competitive with best fixed window", adaptive_competitiveness),
        ("smaller windows under identity shuffling", permute_sensitivity),
        ("stationary concentration bound", concentration_bound),
        ("constant spot-checks", constant_spot_checks),
        ("ring memory bound", memory_bound),
    ];
    let mut failed = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let Outcome { pass, detail } = check();
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} [{}] {name}: {detail} ({:.2?})",
            idx + 1,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed()
        );
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
