//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each, and exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use eventflux::analysis::{
    binomial_above_chance, binomial_tail_ln, hp_sensitivity_values, pairwise_cosine, GradientSet, SensitivityOptions,
};
use eventflux::formats::{
    read_atis_bin, read_csv, read_jsonl, read_native, write_atis_bin, write_csv, write_jsonl, write_native,
};
use eventflux::represent::count_histogram;
use eventflux::subsample::{select_indices, subsample_many};
use eventflux::synth::{FanDatasetSpec, FAST_LABEL};
use eventflux::{est_frames, subsample, EventStream, KernelSpec, ReprConfig, SubsamplePlan};
use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s as f64, || {
        format!("took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

fn ac1_est_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0xAC1);
    let mut worst: f64 = 0.0;
    let mut total_events = 0;
    for i in 0..200 {
        // short windows put many timestamps exactly on bin boundaries
        let max_t = if i % 3 == 0 { 64 } else { 1_000_000 };
        let s = random_stream(&mut r, 10_000, 64, 64, max_t);
        total_events += s.len();
        let channels = if i % 2 == 0 { 9 } else { r.random_range(1..=12) };
        let kernel = match i % 4 {
            0 => KernelSpec::Delta,
            1 => KernelSpec::Triangular,
            2 => KernelSpec::gaussian(r.random_range(0.02..0.6)).unwrap(),
            _ => KernelSpec::Mlp(random_mlp(&mut r)),
        };
        let cfg = ReprConfig::new(channels, kernel.clone()).map_err(|e| e.to_string())?;
        let got = est_frames(&s, &cfg).map_err(|e| e.to_string())?;
        let want = est_grouped(&s, channels, &kernel);
        check(got.data.len() == want.len(), || format!("stream {i}: length mismatch"))?;
        for (j, (a, b)) in got.data.iter().zip(&want).enumerate() {
            let d = (a - b).abs();
            worst = worst.max(d);
            check(d <= 1e-9, || {
                format!("stream {i} ({:?}, C={channels}) element {j}: {a} vs {b}", kernel.kind())
            })?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 60)?;
    Ok(format!(
        "200 streams, {total_events} events, max abs diff {worst:.2e}, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn ac2_channels() -> Outcome {
    let mut r = rng(0xAC2);
    let mut fixtures: Vec<EventStream> = (0..50).map(|_| random_stream(&mut r, 500, 64, 64, 100_000)).collect();
    let fan = FanDatasetSpec {
        n_slow: 3,
        n_fast: 3,
        ..FanDatasetSpec::default()
    };
    fixtures.extend(fan.generate().map_err(|e| e.to_string())?);
    let cfg = ReprConfig::default();
    for s in &fixtures {
        let t = est_frames(s, &cfg).map_err(|e| e.to_string())?;
        check(t.total_channels() == 18, || {
            format!("{}: {} channels", s.video_id, t.total_channels())
        })?;
        check(t.shape() == (2, 9, s.height as usize, s.width as usize), || {
            format!("{}: shape {:?}", s.video_id, t.shape())
        })?;
    }
    Ok(format!("18 channels on {} fixtures", fixtures.len()))
}

fn ac3_pairs() -> Outcome {
    let mut r = rng(0xAC3);
    let vectors: Vec<Vec<f32>> = (0..100)
        .map(|_| (0..256).map(|_| r.random_range(-1.0f32..1.0)).collect())
        .collect();
    let g = GradientSet::new("fc", vectors).map_err(|e| e.to_string())?;
    let sims = pairwise_cosine(&g).map_err(|e| e.to_string())?;
    check(sims.len() == 4950, || format!("{} pairs", sims.len()))?;
    check(sims.iter().all(|v| (-1.0..=1.0).contains(v)), || {
        "similarity outside [-1, 1]".into()
    })?;
    Ok("M = 100 gives 4950 pairs".into())
}

fn spikes(parts: &[(f64, usize)]) -> Vec<f64> {
    parts.iter().flat_map(|&(v, n)| std::iter::repeat_n(v, n)).collect()
}

fn ac4_sensitivity_oracle() -> Outcome {
    let start = Instant::now();
    let opts = SensitivityOptions::default();
    let metric = |v: &[f64]| {
        hp_sensitivity_values(v, &opts)
            .map(|r| r.metric)
            .map_err(|e| e.to_string())
    };

    let two = spikes(&[(0.5, 40), (1.0, 10)]);
    let m2 = metric(&two)?;
    check((m2 - 0.5).abs() <= 1e-6, || format!("two spikes: {m2}"))?;
    check((sensitivity_oracle(&two, 10) - 0.5).abs() <= 1e-6, || {
        "two spikes: oracle disagrees with 0.5".into()
    })?;

    let three = spikes(&[(0.2, 30), (0.6, 15), (0.95, 5)]);
    let m3 = metric(&three)?;
    let expected = (0.95 - 0.2) / 0.95;
    let oracle = sensitivity_oracle(&three, 10);
    check((m3 - expected).abs() <= 1e-6, || {
        format!("three spikes: {m3} vs {expected}")
    })?;
    check((oracle - expected).abs() <= 1e-6, || {
        format!("three spikes: oracle {oracle} vs {expected}")
    })?;

    let m0 = metric(&[0.8; 40])?;
    check(m0 == 0.0, || format!("constant data: {m0}"))?;

    let elapsed = start.elapsed();
    within(elapsed, 5)?;
    Ok(format!(
        "two spikes {m2}, three spikes {m3:.6}, constant {m0}, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn ac5_sensitivity_invariances() -> Outcome {
    let mut r = rng(0xAC5);
    let opts = SensitivityOptions::default();
    let mut worst_drift: f64 = 0.0;
    for i in 0..1000 {
        let mut v: Vec<f64> = (0..50).map(|_| r.random_range(0.0..=1.0)).collect();
        let m = hp_sensitivity_values(&v, &opts).map_err(|e| e.to_string())?.metric;
        check((0.0..=1.0).contains(&m), || format!("set {i}: metric {m}"))?;

        v.shuffle(&mut r);
        let shuffled = hp_sensitivity_values(&v, &opts).map_err(|e| e.to_string())?.metric;
        check(shuffled == m, || format!("set {i}: permuted metric {shuffled} vs {m}"))?;

        let s = 10f64.powf(r.random_range(-3.0..3.0));
        let scaled: Vec<f64> = v.iter().map(|x| x * s).collect();
        let ms = hp_sensitivity_values(&scaled, &opts).map_err(|e| e.to_string())?.metric;
        worst_drift = worst_drift.max((ms - m).abs());
        check((ms - m).abs() <= 1e-12, || {
            format!("set {i}: scale {s} drifts {m} -> {ms}")
        })?;
    }
    Ok(format!("1000 sets, max rescaling drift {worst_drift:.1e}"))
}

fn ac6_subsampling() -> Outcome {
    const N: usize = 10_000;
    const DRAWS: u64 = 10_000;
    let mut counts = vec![0u64; N];
    for d in 0..DRAWS {
        let plan = SubsamplePlan::new(1, d / 100, d % 100);
        for i in select_indices(N, &plan, "uniformity") {
            counts[i] += 1;
        }
    }
    let expected = DRAWS as f64 / N as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((N - 1) as f64).map_err(|e| e.to_string())?;
    let p = dist.sf(chi2);
    check(p > 0.01, || format!("chi-square {chi2:.1}, p = {p:.4}"))?;

    let mut r = rng(0xAC6);
    let streams: Vec<EventStream> = (0..64)
        .map(|i| random_stream(&mut r, 5_000, 64, 64, 1_000_000).with_video_id(format!("v{i}")))
        .collect();
    let plan = SubsamplePlan::new(256, 17, 3);
    let bytes = |out: Vec<EventStream>| out.iter().map(write_native).collect::<Vec<_>>();
    let run_on = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| bytes(subsample_many(&streams, &plan)))
    };
    let serial = bytes(streams.iter().map(|s| subsample(s, &plan)).collect());
    let one = run_on(1);
    let eight = run_on(8);
    let again = run_on(8);
    check(serial == one && one == eight && eight == again, || {
        "selections differ between runs or thread counts".into()
    })?;
    Ok(format!(
        "chi-square {chi2:.1} on {} dof, p = {p:.3}; 1 vs 8 threads byte-identical",
        N - 1
    ))
}

fn ac7_round_trips() -> Outcome {
    let mut r = rng(0xAC7);
    for i in 0..1000 {
        // ATIS: 8-bit coordinates and 23-bit timestamps
        let s = random_stream(&mut r, 300, 256, 256, (1 << 23) - 1);
        let bytes = write_atis_bin(&s).map_err(|e| e.to_string())?;
        let back = read_atis_bin(&bytes, s.width, s.height).map_err(|e| e.to_string())?;
        check(back.events == s.events, || format!("atis stream {i}: events differ"))?;
        check(write_atis_bin(&back).map_err(|e| e.to_string())? == bytes, || {
            format!("atis stream {i}: bytes differ")
        })?;

        let s = random_stream(&mut r, 300, u16::MAX, u16::MAX, u64::MAX / 2);
        let text = write_csv(&s);
        let back = read_csv(&text, Some((s.width, s.height))).map_err(|e| e.to_string())?;
        check(back.events == s.events, || format!("csv stream {i}: events differ"))?;
        check(write_csv(&back) == text, || format!("csv stream {i}: text differs"))?;

        let s = random_stream(&mut r, 300, u16::MAX, u16::MAX, u64::MAX).with_label(format!("class{}", i % 7));
        let bytes = write_native(&s);
        let back = read_native(&bytes).map_err(|e| e.to_string())?;
        check(back == s, || format!("native stream {i}: stream differs"))?;
        check(write_native(&back) == bytes, || {
            format!("native stream {i}: bytes differ")
        })?;

        let s = random_stream(&mut r, 100, u16::MAX, u16::MAX, u64::MAX / 2);
        let text = write_jsonl(&s).map_err(|e| e.to_string())?;
        let back = read_jsonl(&text).map_err(|e| e.to_string())?;
        check(back == s, || format!("jsonl stream {i}: stream differs"))?;
    }
    Ok("1000 streams each through atis-bin, csv, native and jsonl".into())
}

fn ac8_binomial() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for &(a, b) in &[(1u64, 2u64), (1, 24), (1, 101)] {
        let chance = a as f64 / b as f64;
        for n in 1..=200u64 {
            let exact = binomial_tails_exact_ln(n, a, b);
            for k in 0..=n {
                let got = binomial_tail_ln(k, n, chance).map_err(|e| e.to_string())?;
                // ln-space difference equals relative error of the p-value
                let rel = (got - exact[k as usize]).abs();
                worst = worst.max(rel);
                points += 1;
                check(rel <= 5e-12, || {
                    format!("n={n} k={k} chance={a}/{b}: ln p {got} vs {}", exact[k as usize])
                })?;
                let p = binomial_above_chance(k, n, chance).map_err(|e| e.to_string())?;
                let want = exact[k as usize].exp();
                if want > 1e-300 {
                    check(((p - want) / want).abs() <= 5e-12, || {
                        format!("n={n} k={k} chance={a}/{b}: p {p} vs {want}")
                    })?;
                }
            }
        }
    }
    Ok(format!("{points} points, max relative error {worst:.1e}"))
}

fn mean_radius(s: &EventStream) -> Result<f64, String> {
    let hist = count_histogram(s).map_err(|e| e.to_string())?;
    let (cx, cy) = ((s.width as f64 - 1.0) / 2.0, (s.height as f64 - 1.0) / 2.0);
    let (mut sum, mut n) = (0.0, 0.0);
    for ((_, _, y, x), count) in hist.nonzero() {
        sum += count * (x as f64 - cx).hypot(y as f64 - cy);
        n += count;
    }
    Ok(if n > 0.0 { sum / n } else { 0.0 })
}

fn on_fraction(s: &EventStream) -> Result<f64, String> {
    let hist = count_histogram(s).map_err(|e| e.to_string())?;
    let on: f64 = hist.nonzero().filter(|((p, ..), _)| *p == 1).map(|(_, v)| v).sum();
    let all: f64 = hist.nonzero().map(|(_, v)| v).sum();
    Ok(if all > 0.0 { on / all } else { 0.0 })
}

fn ac9_fan() -> Outcome {
    let start = Instant::now();
    let spec = FanDatasetSpec {
        n_slow: 100,
        n_fast: 100,
        ..FanDatasetSpec::default()
    };
    let videos = spec.generate().map_err(|e| e.to_string())?;
    let is_fast = |s: &EventStream| s.label.as_deref() == Some(FAST_LABEL);

    // 8 events: count-histogram statistics of both classes, p averaged over seeds
    let seeds = 0..10u64;
    let n_seeds = seeds.end as f64;
    let (mut p_radius, mut p_on) = (0.0, 0.0);
    for seed in seeds {
        let plan = SubsamplePlan::new(8, seed, 0);
        let (mut slow_r, mut fast_r, mut slow_on, mut fast_on) = (vec![], vec![], vec![], vec![]);
        for v in &videos {
            let s = subsample(v, &plan);
            let (r, on) = (mean_radius(&s)?, on_fraction(&s)?);
            if is_fast(v) {
                fast_r.push(r);
                fast_on.push(on);
            } else {
                slow_r.push(r);
                slow_on.push(on);
            }
        }
        p_radius += mann_whitney_p(&slow_r, &fast_r) / n_seeds;
        p_on += mann_whitney_p(&slow_on, &fast_on) / n_seeds;
    }
    check(p_radius > 0.01, || format!("8 events: mean-radius p = {p_radius:.4}"))?;
    check(p_on > 0.01, || format!("8 events: on-fraction p = {p_on:.4}"))?;

    // 4096 events: threshold halfway between the class mean event rates
    let plan = SubsamplePlan::new(4096, 0, 0);
    let rates: Vec<(bool, f64)> = videos
        .iter()
        .map(|v| {
            let s = subsample(v, &plan);
            (is_fast(v), s.len() as f64 / s.duration_us() as f64)
        })
        .collect();
    let class_mean = |fast: bool| {
        let r: Vec<f64> = rates.iter().filter(|x| x.0 == fast).map(|x| x.1).collect();
        r.iter().sum::<f64>() / r.len() as f64
    };
    let threshold = (class_mean(false) + class_mean(true)) / 2.0;
    let correct = rates.iter().filter(|(fast, rate)| (*rate > threshold) == *fast).count();
    let accuracy = correct as f64 / rates.len() as f64;
    check(accuracy >= 0.95, || {
        format!("4096 events: threshold accuracy {accuracy:.3}")
    })?;

    let elapsed = start.elapsed();
    within(elapsed, 120)?;
    Ok(format!(
        "8 events: p(radius) = {p_radius:.3}, p(on fraction) = {p_on:.3}; 4096 events: accuracy {accuracy:.3}; {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1 est oracle equivalence", ac1_est_oracle),
        ("AC2 default channel count", ac2_channels),
        ("AC3 pairwise cosine count", ac3_pairs),
        ("AC4 sensitivity oracle", ac4_sensitivity_oracle),
        ("AC5 sensitivity bounds and invariances", ac5_sensitivity_invariances),
        ("AC6 subsampling statistics", ac6_subsampling),
        ("AC7 format round trips", ac7_round_trips),
        ("AC8 binomial oracle", ac8_binomial),
        ("AC9 synthetic fan", ac9_fan),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
