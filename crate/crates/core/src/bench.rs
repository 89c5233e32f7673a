//! Runtime scaling of both searches over random instances.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::generate::{generate_instance, GenError};
use crate::{search_three_bounce, search_two_bounce, SearchOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<(usize, usize)>,
    pub seed: u64,
    /// Random instances per size; their timings are averaged.
    pub instances: usize,
    /// Timed repetitions per instance; the fastest is kept.
    pub repeats: usize,
    pub opts: SearchOptions,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: table_sizes(5, 25, 5),
            seed: 0,
            instances: 3,
            repeats: 3,
            opts: SearchOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub nk: usize,
    pub nt: usize,
    pub two_bounce_s: f64,
    pub three_bounce_s: f64,
}

/// Three blocks: `(n, n)`, then `(5, n)`, then `(n, 5)` for `n` in `from..=to`.
pub fn table_sizes(from: usize, to: usize, step: usize) -> Vec<(usize, usize)> {
    let ns: Vec<usize> = (from..=to).step_by(step.max(1)).collect();
    let mut out: Vec<(usize, usize)> = ns.iter().map(|&n| (n, n)).collect();
    out.extend(ns.iter().map(|&n| (5, n)));
    out.extend(ns.iter().map(|&n| (n, 5)));
    out
}

fn instance_seed(seed: u64, nk: usize, nt: usize, i: usize) -> u64 {
    seed ^ ((nk as u64) << 40) ^ ((nt as u64) << 20) ^ i as u64
}

/// Fastest of `repeats` runs; the minimum is the least disturbed by other load.
fn time<F: FnMut()>(repeats: usize, mut f: F) -> f64 {
    (0..repeats.max(1))
        .map(|_| {
            let t0 = Instant::now();
            f();
            t0.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, GenError> {
    let mut rows = Vec::with_capacity(cfg.sizes.len());
    for &(nk, nt) in &cfg.sizes {
        let (mut t2, mut t3) = (0.0, 0.0);
        let instances = cfg.instances.max(1);
        for i in 0..instances {
            let (k, t) = generate_instance(nk, nt, instance_seed(cfg.seed, nk, nt, i))?;
            t2 += time(cfg.repeats, || {
                std::hint::black_box(search_two_bounce(&k, &t, &cfg.opts));
            });
            t3 += time(cfg.repeats, || {
                std::hint::black_box(search_three_bounce(&k, &t, &cfg.opts));
            });
        }
        rows.push(BenchRow {
            nk,
            nt,
            two_bounce_s: t2 / instances as f64,
            three_bounce_s: t3 / instances as f64,
        });
    }
    Ok(rows)
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut s = format!(
        "{:>6} {:>6} {:>14} {:>14}\n",
        "|V(K)|", "|V(T)|", "2-bounce [s]", "3-bounce [s]"
    );
    for r in rows {
        s.push_str(&format!(
            "{:>6} {:>6} {:>14.6} {:>14.6}\n",
            r.nk, r.nt, r.two_bounce_s, r.three_bounce_s
        ));
    }
    s
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        // ties share the mean rank
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation. `NaN` for fewer than two points or constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return f64::NAN;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let mean = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (a, b) = (rx[i] - mean, ry[i] - mean);
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    sxy / (sxx * syy).sqrt()
}

/// Summary of how the timings scale, computed from the `(5, n)` and `(n, 5)` blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trends {
    /// Rank agreement between `t2(n, 5)` and `t2(5, n)`.
    pub two_bounce_swap_rank: f64,
    /// Smallest and largest `t2(n, 5) / t2(5, n)`.
    pub two_bounce_swap_ratio: (f64, f64),
    /// Rank correlation of `t3` with `|V(K)|` over the `(n, 5)` block.
    pub three_bounce_k_rank: f64,
    /// `t3` at the largest over the smallest size, `(5, n)` block.
    pub three_bounce_t_growth: f64,
    /// Same over the `(n, 5)` block.
    pub three_bounce_k_growth: f64,
}

pub fn trends(rows: &[BenchRow]) -> Option<Trends> {
    let mut t_block: Vec<&BenchRow> = rows.iter().filter(|r| r.nk == 5).collect();
    let mut k_block: Vec<&BenchRow> = rows.iter().filter(|r| r.nt == 5).collect();
    t_block.sort_by_key(|r| r.nt);
    k_block.sort_by_key(|r| r.nk);
    t_block.dedup_by_key(|r| r.nt);
    k_block.dedup_by_key(|r| r.nk);
    // pair up sizes present in both blocks
    let paired: Vec<(&BenchRow, &BenchRow)> = k_block
        .iter()
        .filter_map(|a| t_block.iter().find(|b| b.nt == a.nk).map(|b| (*a, *b)))
        .collect();
    if paired.len() < 2 {
        return None;
    }
    let a: Vec<f64> = paired.iter().map(|p| p.0.two_bounce_s).collect();
    let b: Vec<f64> = paired.iter().map(|p| p.1.two_bounce_s).collect();
    let ratios = paired.iter().map(|p| p.0.two_bounce_s / p.1.two_bounce_s);
    let ratio = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r), hi.max(r))
    });
    let nk: Vec<f64> = k_block.iter().map(|r| r.nk as f64).collect();
    let t3k: Vec<f64> = k_block.iter().map(|r| r.three_bounce_s).collect();
    let growth =
        |block: &[&BenchRow]| block[block.len() - 1].three_bounce_s / block[0].three_bounce_s;
    Some(Trends {
        two_bounce_swap_rank: spearman(&a, &b),
        two_bounce_swap_ratio: ratio,
        three_bounce_k_rank: spearman(&nk, &t3k),
        three_bounce_t_growth: growth(&t_block),
        three_bounce_k_growth: growth(&k_block),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1., 2., 3.], &[10., 20., 30.]) - 1.0).abs() < 1e-12);
        assert!((spearman(&[1., 2., 3.], &[3., 2., 1.]) + 1.0).abs() < 1e-12);
        assert!((spearman(&[1., 2., 3., 4.], &[1., 3., 2., 4.]) - 0.8).abs() < 1e-12);
        assert!(spearman(&[1., 1.], &[1., 2.]).is_nan());
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(ranks(&[3., 1., 3., 2.]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn size_blocks() {
        let s = table_sizes(5, 15, 5);
        assert_eq!(
            s,
            vec![
                (5, 5),
                (10, 10),
                (15, 15),
                (5, 5),
                (5, 10),
                (5, 15),
                (5, 5),
                (10, 5),
                (15, 5)
            ]
        );
    }

    #[test]
    fn tiny_bench_runs() {
        let cfg = BenchConfig {
            sizes: table_sizes(5, 6, 1),
            instances: 1,
            repeats: 1,
            opts: SearchOptions::sequential(),
            ..BenchConfig::default()
        };
        let rows = run_bench(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows
            .iter()
            .all(|r| r.two_bounce_s >= 0.0 && r.three_bounce_s >= 0.0));
        assert!(trends(&rows).is_some());
    }
}
