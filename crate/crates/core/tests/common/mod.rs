//! Random instance generators and brute-force oracles shared by the
//! integration tests. The oracles deliberately avoid the library's closure
//! and cycle code.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use revpref::matrix::SquareMatrix;
use revpref::TradeStatistics;

pub type Ts = TradeStatistics<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Prices in [0.5, 2], quantities in [0, 2] with occasional exact zeros
/// (never an all-zero row).
pub fn random_statistics<R: Rng>(rng: &mut R, periods: usize, goods: usize) -> Ts {
    let prices = (0..periods)
        .map(|_| (0..goods).map(|_| rng.random_range(0.5..2.0)).collect())
        .collect();
    let quantities = (0..periods)
        .map(|_| loop {
            let q: Vec<f64> = (0..goods)
                .map(|_| if rng.random_bool(0.15) { 0.0 } else { rng.random_range(0.0..2.0) })
                .collect();
            if q.iter().any(|&v| v > 0.0) {
                break q;
            }
        })
        .collect();
    TradeStatistics::new(prices, quantities).unwrap()
}

/// CES demands with random elasticity, shares, prices and expenditures;
/// homothetic, hence HARP(1)-consistent.
pub fn homothetic_statistics<R: Rng>(rng: &mut R, periods: usize, goods: usize) -> Ts {
    let sigma: f64 = rng.random_range(0.2..3.0);
    let a: Vec<f64> = (0..goods).map(|_| rng.random_range(0.2..1.0)).collect();
    let mut prices = Vec::new();
    let mut quantities = Vec::new();
    for _ in 0..periods {
        let p: Vec<f64> = (0..goods).map(|_| rng.random_range(0.3..3.0)).collect();
        let e: f64 = rng.random_range(0.5..5.0);
        let denom: f64 = a.iter().zip(&p).map(|(ai, pi)| ai.powf(sigma) * pi.powf(1.0 - sigma)).sum();
        let q = a.iter().zip(&p).map(|(ai, pi)| ai.powf(sigma) * pi.powf(-sigma) * e / denom).collect();
        prices.push(p);
        quantities.push(q);
    }
    TradeStatistics::new(prices, quantities).unwrap()
}

/// Half homothetic, half uniform random.
pub fn mixed_statistics<R: Rng>(rng: &mut R, max_periods: usize, max_goods: usize) -> Ts {
    let t = rng.random_range(1..=max_periods);
    let m = rng.random_range(1..=max_goods);
    if rng.random_bool(0.5) {
        homothetic_statistics(rng, t, m)
    } else {
        random_statistics(rng, t, m)
    }
}

/// Max over all simple paths `t → s` (`t != s`) and simple cycles through
/// `t` (`t == s`) of the edge-weight product, by explicit enumeration;
/// `diverged` iff some simple cycle has product above one.
pub fn brute_force_closure(m: &SquareMatrix<f64>) -> (Vec<Vec<f64>>, bool) {
    let n = m.dim();
    let mut best = vec![vec![0.0f64; n]; n];
    let mut diverged = false;
    for start in 0..n {
        let mut path = vec![start];
        let mut used = vec![false; n];
        used[start] = true;
        extend(m, &mut path, &mut used, 1.0, &mut best, &mut diverged);
    }
    (best, diverged)
}

fn extend(
    m: &SquareMatrix<f64>,
    path: &mut Vec<usize>,
    used: &mut [bool],
    prod: f64,
    best: &mut [Vec<f64>],
    diverged: &mut bool,
) {
    let start = path[0];
    let last = *path.last().unwrap();
    for next in 0..m.dim() {
        let p = prod * m.get(last, next);
        if next == start {
            best[start][start] = best[start][start].max(p);
            if p > 1.0 {
                *diverged = true;
            }
        } else if !used[next] {
            best[start][next] = best[start][next].max(p);
            used[next] = true;
            path.push(next);
            extend(m, path, used, p, best, diverged);
            path.pop();
            used[next] = false;
        }
    }
}

pub fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Random point with exponential coordinates, some set to zero.
pub fn random_demand<R: Rng>(rng: &mut R, goods: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..goods)
            .map(|_| if rng.random_bool(0.1) { 0.0 } else { -rng.random_range(1e-9f64..1.0).ln() })
            .collect();
        if x.iter().any(|&v| v > 0.0) {
            return x;
        }
    }
}

/// Homothetic data with multiplicative quantity noise of size `noise`.
pub fn noisy_homothetic<R: Rng>(rng: &mut R, periods: usize, goods: usize, noise: f64) -> Ts {
    let ts = homothetic_statistics(rng, periods, goods);
    let quantities = ts
        .quantities()
        .iter()
        .map(|q| q.iter().map(|&v| v * (noise * rng.random_range(-1.0..1.0)).exp()).collect())
        .collect();
    TradeStatistics::new(ts.prices().to_vec(), quantities).unwrap()
}

/// Random statistics (T ≤ `max_periods`, m ≤ `max_goods`) passing HARP(1).
pub fn harp_instance<R: Rng>(rng: &mut R, max_periods: usize, max_goods: usize) -> Ts {
    loop {
        let t = rng.random_range(1..=max_periods);
        let m = rng.random_range(1..=max_goods);
        let noise = if rng.random_bool(0.5) { 0.0 } else { 0.05 };
        let ts = noisy_homothetic(rng, t, m, noise);
        if revpref::check_harp(&ts, 1.0).satisfied {
            return ts;
        }
    }
}

/// Random partition tree over all goods of `ts`: the root has two or three
/// parts, each a leaf or (when large enough) a node with two leaves;
/// sometimes a good is kept as a pass-through at the root.
pub fn random_tree<R: Rng>(rng: &mut R, ts: &Ts) -> revpref::hierarchy::PartitionTree {
    use rand::seq::SliceRandom;
    use revpref::hierarchy::PartitionTree;
    let mut ids: Vec<String> = ts.good_ids().to_vec();
    ids.shuffle(rng);
    let passthrough = if ids.len() >= 3 && rng.random_bool(0.3) { ids.pop() } else { None };
    let parts = rng.random_range(2..=3.min(ids.len()).max(2));
    let mut groups: Vec<Vec<String>> = vec![Vec::new(); parts];
    for (i, id) in ids.into_iter().enumerate() {
        let k = if i < parts { i } else { rng.random_range(0..parts) };
        groups[k].push(id);
    }
    let mut leaf_no = 0;
    let mut leaf = |goods: &[String]| {
        leaf_no += 1;
        let refs: Vec<&str> = goods.iter().map(String::as_str).collect();
        PartitionTree::leaf(format!("leaf{leaf_no}"), &refs)
    };
    let children = groups
        .iter()
        .filter(|g| !g.is_empty())
        .enumerate()
        .map(|(i, g)| {
            if g.len() >= 2 && rng.random_bool(0.4) {
                let cut = rng.random_range(1..g.len());
                PartitionTree::node(format!("inner{i}"), vec![leaf(&g[..cut]), leaf(&g[cut..])], &[])
            } else {
                leaf(g)
            }
        })
        .collect();
    let pass: Vec<&str> = passthrough.iter().map(String::as_str).collect();
    PartitionTree::node("root", children, &pass)
}
