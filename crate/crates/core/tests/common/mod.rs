//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the optimized code paths it is
//! compared against.

#![allow(dead_code)]

use std::collections::BTreeMap;

use eventflux::represent::{DenseLayer, MlpKernel};
use eventflux::{Event, EventStream, KernelSpec, Polarity};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sorted random stream with the given limits. The window is widened past
/// the event range on either side at random.
pub fn random_stream(r: &mut ChaCha8Rng, max_events: usize, max_w: u16, max_h: u16, max_t: u64) -> EventStream {
    let w = r.random_range(1..=max_w);
    let h = r.random_range(1..=max_h);
    let n = r.random_range(0..=max_events);
    let t_start = r.random_range(0..=max_t / 4);
    let t_end = r.random_range(t_start + 1..=max_t);
    let mut events: Vec<Event> = (0..n)
        .map(|_| {
            let p = if r.random_bool(0.5) {
                Polarity::On
            } else {
                Polarity::Off
            };
            Event::new(
                r.random_range(0..w),
                r.random_range(0..h),
                r.random_range(t_start..=t_end),
                p,
            )
        })
        .collect();
    events.sort_by_key(|e| e.t);
    EventStream {
        events,
        ..EventStream::empty(w, h, t_start, t_end)
    }
    .with_video_id(format!("rand-{}", r.random::<u32>()))
}

pub fn random_mlp(r: &mut ChaCha8Rng) -> MlpKernel {
    let mut layer = |rows: usize, cols: usize| DenseLayer {
        rows,
        cols,
        weights: (0..rows * cols).map(|_| r.random_range(-1.0f32..1.0)).collect(),
        bias: (0..cols).map(|_| r.random_range(-0.5f32..0.5)).collect(),
    };
    let layers = vec![layer(1, 30), layer(30, 30), layer(30, 1)];
    MlpKernel::new(layers).expect("valid shapes")
}

/// Kernel weight of bin `c` for normalized time `tau`, written from the
/// formula definitions.
pub fn oracle_weight(k: &KernelSpec, channels: usize, c: usize, tau: f64) -> f64 {
    let center = if channels == 1 {
        0.0
    } else {
        c as f64 / (channels - 1) as f64
    };
    let u = tau - center;
    match k {
        KernelSpec::Delta => {
            if channels == 1 {
                return 1.0;
            }
            let h = 1.0 / (channels - 1) as f64;
            let last = c == channels - 1;
            let lower_ok = u >= -h / 2.0;
            let upper_ok = if last { u <= h / 2.0 } else { u < h / 2.0 };
            if lower_ok && upper_ok {
                1.0
            } else {
                0.0
            }
        }
        KernelSpec::Triangular => {
            if channels == 1 {
                1.0
            } else {
                let v = 1.0 - u.abs() * (channels - 1) as f64;
                if v > 0.0 {
                    v
                } else {
                    0.0
                }
            }
        }
        KernelSpec::Gaussian { sigma } => (-(u * u) / (2.0 * sigma * sigma)).exp(),
        KernelSpec::Mlp(m) => mlp_forward(m, u),
    }
}

fn mlp_forward(m: &MlpKernel, u: f64) -> f64 {
    let act = |v: f64| if v < 0.0 { 0.1 * v } else { v };
    let mut x = vec![u];
    for (li, l) in m.layers().iter().enumerate() {
        let mut y = Vec::with_capacity(l.cols);
        for j in 0..l.cols {
            let mut s = f64::from(l.bias[j]);
            for (i, xi) in x.iter().enumerate() {
                s += xi * f64::from(l.weights[i * l.cols + j]);
            }
            y.push(if li < 2 { act(s) } else { s });
        }
        x = y;
    }
    x[0]
}

fn tau(stream: &EventStream, t: u64) -> f64 {
    (t - stream.t_start) as f64 / (stream.t_end - stream.t_start) as f64
}

/// Direct quadruple loop over `(p, c, y, x)` and every event. Only usable on
/// small inputs.
pub fn est_bruteforce(stream: &EventStream, channels: usize, k: &KernelSpec) -> Vec<f64> {
    let (w, h) = (stream.width as usize, stream.height as usize);
    let mut out = Vec::with_capacity(2 * channels * h * w);
    for p in 0..2 {
        for c in 0..channels {
            for y in 0..h {
                for x in 0..w {
                    let mut v = 0.0;
                    for e in &stream.events {
                        let ep = if e.p == Polarity::On { 1 } else { 0 };
                        if e.x as usize == x && e.y as usize == y && ep == p {
                            let t = tau(stream, e.t);
                            v += t * oracle_weight(k, channels, c, t);
                        }
                    }
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Same sum as [`est_bruteforce`], with the indicator resolved by grouping
/// events per `(p, y, x)` first so that it scales to 10^4 events.
pub fn est_grouped(stream: &EventStream, channels: usize, k: &KernelSpec) -> Vec<f64> {
    let (w, h) = (stream.width as usize, stream.height as usize);
    let mut groups: BTreeMap<(usize, usize, usize), Vec<u64>> = BTreeMap::new();
    for e in &stream.events {
        let p = if e.p == Polarity::On { 1 } else { 0 };
        groups.entry((p, e.y as usize, e.x as usize)).or_default().push(e.t);
    }
    let mut out = vec![0.0; 2 * channels * h * w];
    for ((p, y, x), ts) in &groups {
        for c in 0..channels {
            let v: f64 = ts
                .iter()
                .map(|&t| {
                    let tau = tau(stream, t);
                    tau * oracle_weight(k, channels, c, tau)
                })
                .sum();
            out[((p * channels + c) * h + y) * w + x] = v;
        }
    }
    out
}

/// Minimum within-cluster sum of squares over every contiguous split of the
/// sorted values into `k` groups, with the groups themselves.
pub fn exhaustive_partition(sorted: &[f64], k: usize) -> (f64, Vec<Vec<f64>>) {
    fn cost(v: &[f64]) -> f64 {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum()
    }
    fn go(v: &[f64], k: usize) -> (f64, Vec<Vec<f64>>) {
        if k == 1 {
            return (cost(v), vec![v.to_vec()]);
        }
        let mut best = (f64::INFINITY, Vec::new());
        for cut in 1..=v.len() - (k - 1) {
            // splitting a run of equal values is never better than not
            if v[cut - 1] == v[cut] {
                continue;
            }
            let (rest, mut groups) = go(&v[cut..], k - 1);
            let total = cost(&v[..cut]) + rest;
            if total < best.0 {
                groups.insert(0, v[..cut].to_vec());
                best = (total, groups);
            }
        }
        best
    }
    go(sorted, k)
}

/// Sensitivity metric from exhaustive clustering, following the metric's
/// definition directly.
pub fn sensitivity_oracle(values: &[f64], k_max: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut distinct = v.clone();
    distinct.dedup();
    let max = *v.last().unwrap();
    let mut best: f64 = 0.0;
    for k in 2..=k_max.min(distinct.len()) {
        let (_, groups) = exhaustive_partition(&v, k);
        let centers: Vec<f64> = groups.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect();
        let max_center = *centers.last().unwrap();
        let top = groups.iter().map(Vec::len).max().unwrap();
        let d = groups
            .iter()
            .zip(&centers)
            .filter(|(g, _)| g.len() == top)
            .map(|(_, c)| (c - max_center).abs())
            .fold(0.0, f64::max);
        best = best.max(d / max);
    }
    best
}

/// `ln` of a positive big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).ln();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let top = top.iter_u64_digits().next().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact upper tails `P[X >= k]` for every `k in 0..=n`, with
/// `X ~ Binomial(n, a / b)`, returned as natural logs.
pub fn binomial_tails_exact_ln(n: u64, a: u64, b: u64) -> Vec<f64> {
    let a_big = BigUint::from(a);
    let c_big = BigUint::from(b - a);
    let mut choose = BigUint::one();
    let mut numerators = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        if k > 0 {
            choose = choose * BigUint::from(n - k + 1) / BigUint::from(k);
        }
        let term = &choose * a_big.pow(k as u32) * c_big.pow((n - k) as u32);
        numerators.push(term);
    }
    let denom = BigUint::from(b).pow(n as u32);
    let ln_denom = ln_big(&denom);
    let mut tails = vec![0.0; n as usize + 1];
    let mut acc = BigUint::zero();
    for k in (0..=n as usize).rev() {
        acc += &numerators[k];
        tails[k] = ln_big(&acc) - ln_denom;
    }
    tails
}

/// Two-sided Mann-Whitney U test (normal approximation with tie correction).
pub fn mann_whitney_p(a: &[f64], b: &[f64]) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let mut all: Vec<(f64, usize)> = a.iter().map(|&v| (v, 0)).chain(b.iter().map(|&v| (v, 1))).collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = all.len();
    let mut ranks = vec![0.0; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for rank in ranks.iter_mut().take(j + 1).skip(i) {
            *rank = r;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let r1: f64 = all.iter().zip(&ranks).filter(|(x, _)| x.1 == 0).map(|(_, r)| r).sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let nn = n1 + n2;
    let var = n1 * n2 / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = (u - mean).abs() / var.sqrt();
    2.0 * (1.0 - Normal::standard().cdf(z))
}
