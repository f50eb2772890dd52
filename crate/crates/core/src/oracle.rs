//! Brute-force growth estimates used to cross-check every spectral result:
//! word counts, hole survivor cylinders, unique β-words, box counts and
//! Moran covers of weighted graphs.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::beta_exp::{quasi_greedy_one, BetaError, BetaSystem};
use crate::exactnum::{rint, Rational};
use crate::ifs_core::Ifs;
use crate::markov::{AdjacencyMatrix, WeightedGraph};
use crate::open_map::Hole;

pub const EXPLOSION_GUARD: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("matrix has no edges")]
    ZeroMatrix,
    #[error("enumeration would exceed {0} objects")]
    ExplosionGuard(u64),
    #[error("too few levels for a slope")]
    TooFewLevels,
    #[error(transparent)]
    Beta(#[from] BetaError),
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthEstimate {
    /// (n, count) pairs; counts as decimal strings when large.
    pub counts: Vec<(usize, String)>,
    /// Growth rate of log count against the scale variable, fitted over the
    /// second half of the range.
    pub slope: f64,
    pub dimension: f64,
    pub note: Option<String>,
}

fn slope_last_half(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len();
    let start = k / 2;
    let (x, y) = (&xs[start..], &ys[start..]);
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Least-squares fit of y = h·x + k·ln x + c over the second half; returns h.
/// The ln x term absorbs polynomial prefactors of the counts.
fn growth_with_log_term(xs: &[f64], ys: &[f64]) -> f64 {
    let start = xs.len() / 2;
    let rows: Vec<[f64; 3]> = xs[start..].iter().map(|&x| [x, x.ln(), 1.0]).collect();
    if rows.len() < 4 {
        return slope_last_half(xs, ys);
    }
    let mut a = [[0.0f64; 4]; 3];
    for (r, y) in rows.iter().zip(&ys[start..]) {
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += r[i] * r[j];
            }
            a[i][3] += r[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        if a[c][c].abs() < 1e-300 {
            return slope_last_half(xs, ys);
        }
        for r in 0..3 {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..4 {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    a[0][3] / a[0][0]
}

fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::MAX).ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Copy)]
enum Fit {
    Linear,
    /// Linear plus a logarithmic term for polynomially corrected counts.
    WithLog,
}

fn estimate(counts: Vec<(usize, BigUint)>, scale: f64, fit: Fit, note: Option<String>) -> Result<GrowthEstimate, OracleError> {
    if counts.len() < 2 {
        return Err(OracleError::TooFewLevels);
    }
    let xs: Vec<f64> = counts.iter().map(|(n, _)| *n as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, c)| ln_big(c)).collect();
    let slope = match fit {
        Fit::Linear => slope_last_half(&xs, &ys),
        Fit::WithLog => growth_with_log_term(&xs, &ys).max(0.0),
    };
    Ok(GrowthEstimate {
        counts: counts.into_iter().map(|(n, c)| (n, c.to_string())).collect(),
        slope,
        dimension: slope / scale,
        note,
    })
}

/// Admissible words of length n = 1ᵀ S^{n−1} 1 for n = 1..=n_max; the
/// dimension is slope/log(base).
pub fn count_sft_words(s: &AdjacencyMatrix, n_max: usize, base: f64) -> Result<GrowthEstimate, OracleError> {
    if s.edge_count() == 0 {
        return Err(OracleError::ZeroMatrix);
    }
    let k = s.size();
    let mut v: Vec<BigUint> = vec![BigUint::from(1u8); k];
    let mut counts = vec![];
    for n in 1..=n_max {
        counts.push((n, v.iter().sum::<BigUint>()));
        let mut next = vec![BigUint::zero(); k];
        for (u, vu) in v.iter().enumerate() {
            for w in s.successors(u) {
                next[w] += vu;
            }
        }
        v = next;
    }
    estimate(counts, base.ln(), Fit::WithLog, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoleKind {
    HalfOpen,
    Open,
}

/// Binary n-cylinders C with T^j(C) not inside the hole for every j < n.
pub fn survivor_cylinder_count(hole: &Hole, n_max: usize, kind: HoleKind) -> Result<GrowthEstimate, OracleError> {
    if n_max > 40 {
        return Err(OracleError::ExplosionGuard(EXPLOSION_GUARD));
    }
    // a level-m cylinder [v/2^m, (v+1)/2^m) lies inside the hole iff lo[m] <= v <= hi[m]
    let mut lo = vec![];
    let mut hi = vec![];
    for m in 0..=n_max {
        let p = Rational::from_integer((1u64 << m).into());
        let a = &hole.a * &p;
        let b = &hole.b * &p;
        let (l, h) = match kind {
            HoleKind::HalfOpen => (a.ceil(), b.floor() - rint(1)),
            HoleKind::Open => ((a.floor() + rint(1)), (b.ceil() - rint(2))),
        };
        lo.push(l.to_integer().to_i64().unwrap_or(i64::MAX));
        hi.push(h.to_integer().to_i64().unwrap_or(i64::MIN));
    }
    let mut counts = vec![0u64; n_max + 1];
    // prepend digits: the suffix value v of length m extends to d·2^m + v
    let mut stack: Vec<(usize, i64)> = vec![(0, 0)];
    let mut visited = 0u64;
    while let Some((m, v)) = stack.pop() {
        counts[m] += 1;
        visited += 1;
        if visited > EXPLOSION_GUARD {
            return Err(OracleError::ExplosionGuard(EXPLOSION_GUARD));
        }
        if m == n_max {
            continue;
        }
        for d in 0..2i64 {
            let w = (d << m) + v;
            let inside = lo[m + 1] <= w && w <= hi[m + 1];
            if !inside {
                stack.push((m + 1, w));
            }
        }
    }
    let counts = (1..=n_max).map(|n| (n, BigUint::from(counts[n]))).collect();
    estimate(counts, std::f64::consts::LN_2, Fit::WithLog, None)
}

/// Words of length n satisfying the uniqueness conditions against the
/// quasi-greedy expansion of 1 truncated to the word length. Ties count as
/// admissible, so the count is an over-count.
pub fn unique_word_count(sys: &BetaSystem, n_max: usize, bound: usize) -> Result<GrowthEstimate, OracleError> {
    let e = quasi_greedy_one(sys, bound)?;
    let eta = e.quasi_greedy.ok_or(BetaError::QuasiGreedyUnresolved(bound))?;
    let eta = eta.prefix(n_max + 1);
    let mut counts = vec![0u64; n_max + 1];
    // (length, tied constraints as (reflected, matched length))
    let mut stack: Vec<(usize, Vec<(bool, usize)>)> = vec![(0, vec![])];
    let mut visited = 0u64;
    while let Some((len, tied)) = stack.pop() {
        counts[len] += 1;
        visited += 1;
        if visited > EXPLOSION_GUARD {
            return Err(OracleError::ExplosionGuard(EXPLOSION_GUARD));
        }
        if len == n_max {
            continue;
        }
        'digit: for d in 0..2u8 {
            let mut next = Vec::with_capacity(tied.len() + 1);
            for &(refl, k) in &tied {
                let c = if refl { 1 - d } else { d };
                match c.cmp(&eta[k]) {
                    Ordering::Greater => continue 'digit,
                    Ordering::Less => {}
                    Ordering::Equal => next.push((refl, k + 1)),
                }
            }
            next.push((d == 1, 0));
            stack.push((len + 1, next));
        }
    }
    let counts = (1..=n_max).map(|n| (n, BigUint::from(counts[n]))).collect();
    estimate(counts, sys.beta_f64().ln(), Fit::WithLog, Some("truncated comparisons over-count; the bias vanishes in the slope".into()))
}

/// Boxes of width δ_n = r^n·|hull| (r the smallest ratio) meeting the union of
/// the stopping-time cover: cylinders f_w(hull) refined until their length is
/// at most δ_n. Cylinders whose endpoints agree to 10⁻⁹·δ_n are merged, which
/// removes the duplicates produced by exact overlaps.
pub fn box_count_ifs(ifs: &Ifs, level: usize) -> Result<GrowthEstimate, OracleError> {
    let r = ifs.maps.iter().map(|m| m.ratio.to_f64().abs()).fold(f64::INFINITY, f64::min);
    let fmaps: Vec<(f64, f64)> = ifs.maps.iter().map(|m| (m.ratio.to_f64(), m.offset.to_f64())).collect();
    let (h0, h1) = ifs.hull.to_f64();
    let width = h1 - h0;
    let mut counts = vec![];
    let mut cover: Vec<(f64, f64)> = vec![(h0, h1)];
    for n in 1..=level {
        let delta = r.powi(n as i32) * width;
        let mut pending = std::mem::take(&mut cover);
        let mut small = vec![];
        while let Some((a, b)) = pending.pop() {
            if b - a <= delta * (1.0 + 1e-9) {
                small.push((a, b));
                continue;
            }
            for &(p, q) in &fmaps {
                let (x, y) = (p * a + q, p * b + q);
                pending.push((x.min(y), x.max(y)));
            }
            if (pending.len() + small.len()) as u64 > EXPLOSION_GUARD {
                return Err(OracleError::ExplosionGuard(EXPLOSION_GUARD));
            }
        }
        small.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let eps = 1e-9 * delta;
        small.dedup_by(|x, y| (x.0 - y.0).abs() < eps && (x.1 - y.1).abs() < eps);
        let mut boxes = 0u64;
        let mut last: i64 = i64::MIN;
        for (lo, hi) in &small {
            let a = (((lo - h0) / delta).floor() as i64).max(last + 1);
            let b = ((hi - h0) / delta).floor() as i64;
            if b >= a {
                boxes += (b - a + 1) as u64;
                last = last.max(b);
            }
        }
        counts.push((n, BigUint::from(boxes)));
        cover = small;
    }
    estimate(counts, -r.ln(), Fit::Linear, None)
}

/// Moran cover of a weighted graph: paths whose weight product first drops
/// to δ_n = e^{-n·step}; dimension = slope of log N against −log δ. Levels
/// stop early once a count exceeds `cap`.
pub fn moran_cover_count(g: &WeightedGraph, levels: usize, step: f64, cap: u64) -> Result<GrowthEstimate, OracleError> {
    if g.edges.is_empty() {
        return Err(OracleError::ZeroMatrix);
    }
    let mut out: Vec<Vec<(usize, f64)>> = vec![vec![]; g.size];
    for (u, v, w) in &g.edges {
        out[*u].push((*v, -w.to_f64().ln()));
    }
    let mut counts = vec![];
    'levels: for n in 1..=levels {
        let budget = n as f64 * step;
        let mut total = 0u64;
        let mut stack: Vec<(usize, f64)> = (0..g.size).map(|u| (u, 0.0)).collect();
        while let Some((u, acc)) = stack.pop() {
            for &(v, c) in &out[u] {
                let a = acc + c;
                if a >= budget - 1e-9 {
                    total += 1;
                } else {
                    stack.push((v, a));
                }
            }
            if total > cap {
                break 'levels;
            }
        }
        counts.push((n, BigUint::from(total)));
    }
    let mut e = estimate(counts, step, Fit::Linear, None)?;
    e.note = Some("paths stopped at the first weight below the level; dead ends are not counted".into());
    Ok(e)
}

/// Largest step dividing every edge cost −log w when the weights are powers
/// of a common ratio; otherwise the smallest cost.
pub fn common_step(g: &WeightedGraph) -> f64 {
    let logs: Vec<f64> = g.edges.iter().map(|(_, _, w)| -w.to_f64().ln()).collect();
    let min = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let ks: Vec<u64> = logs.iter().map(|l| (l / min).round() as u64).collect();
    let exact = logs.iter().zip(&ks).all(|(l, &k)| (l - k as f64 * min).abs() < 1e-9);
    if exact {
        let g = ks.iter().fold(0u64, |a, &b| a.gcd(&b));
        min / g.max(1) as f64
    } else {
        min
    }
}
