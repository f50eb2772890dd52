//! Doubling map T(x) = 2x mod 1 with a hole [a, b): Markov partition from the
//! orbits of a and b, survivor dimension and the Parry measure.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dimension::{perron_vector, shift_dimension, transpose, DimError, SpectralResult};
use crate::exactnum::{format_rational, rat, rint, Rational};
use crate::markov::{block_name, scc_decompose, AdjacencyMatrix, SccReport};
use crate::words::Word;

pub const ORBIT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpenMapError {
    #[error("malformed binary word: {0}")]
    MalformedWord(String),
    #[error("binary word ends in 1^∞")]
    AllOnesPeriod,
    #[error("hole must satisfy 0 < a < b < 1")]
    InvalidHole,
    #[error("orbit exceeded {0} steps")]
    OrbitCap(usize),
    #[error("every block is pruned; the survivor set is countable")]
    EmptySurvivor,
    #[error("S′ is not irreducible")]
    NotIrreducible(SccReport),
    #[error("block path is not admissible at step {0}")]
    InadmissiblePath(usize),
    #[error(transparent)]
    Dim(#[from] DimError),
}

/// Exact value of a binary word `"pre(period)"`.
pub fn parse_binary(s: &str) -> Result<Rational, OpenMapError> {
    let w = Word::parse(s).ok_or_else(|| OpenMapError::MalformedWord(s.to_string()))?;
    if w.pre.iter().chain(&w.period).any(|&d| d > 1) {
        return Err(OpenMapError::MalformedWord(s.to_string()));
    }
    if w.period.iter().all(|&d| d == 1) {
        return Err(OpenMapError::AllOnesPeriod);
    }
    Ok(binary_value(&w))
}

fn binary_value(w: &Word) -> Rational {
    let bits = |v: &[u8]| v.iter().fold(BigInt::zero(), |acc, &d| acc * 2 + d);
    let two_n = Rational::from_integer(BigInt::one() << w.pre.len());
    let per = Rational::new(bits(&w.period), (BigInt::one() << w.period.len()) - 1);
    (Rational::from_integer(bits(&w.pre)) + per) / two_n
}

/// Binary expansion of a rational in [0, 1) generated by the doubling map.
pub fn binary_word(x: &Rational) -> Result<Word, OpenMapError> {
    let (_, digits, start) = doubling_orbit(x)?;
    Ok(Word::new(digits[..start].to_vec(), digits[start..].to_vec()))
}

pub fn doubling(x: &Rational) -> Rational {
    let y = x * rint(2);
    if y >= rint(1) {
        y - rint(1)
    } else {
        y
    }
}

/// Orbit values, digits, and the index where the cycle starts.
fn doubling_orbit(x: &Rational) -> Result<(Vec<Rational>, Vec<u8>, usize), OpenMapError> {
    let mut seen = std::collections::HashMap::new();
    let mut vals = vec![];
    let mut digits = vec![];
    let mut cur = x.clone();
    for i in 0..ORBIT_CAP {
        if let Some(&j) = seen.get(&cur) {
            return Ok((vals, digits, j));
        }
        seen.insert(cur.clone(), i);
        vals.push(cur.clone());
        digits.push((cur >= rat(1, 2)) as u8);
        cur = doubling(&cur);
    }
    Err(OpenMapError::OrbitCap(ORBIT_CAP))
}

#[derive(Debug, Clone, Serialize)]
pub struct Hole {
    #[serde(with = "crate::exactnum::serde_rat")]
    pub a: Rational,
    #[serde(with = "crate::exactnum::serde_rat")]
    pub b: Rational,
    pub a_word: Word,
    pub b_word: Word,
    pub warnings: Vec<String>,
}

impl Hole {
    pub fn new(a: Rational, b: Rational) -> Result<Self, OpenMapError> {
        if !(a > Rational::zero() && a < b && b < rint(1)) {
            return Err(OpenMapError::InvalidHole);
        }
        let mut warnings = vec![];
        if b > rat(1, 2) {
            warnings.push(format!("hole [{}, {}) leaves (0, 1/2)", format_rational(&a), format_rational(&b)));
        }
        Ok(Hole { a_word: binary_word(&a)?, b_word: binary_word(&b)?, a, b, warnings })
    }

    pub fn from_words(a: &str, b: &str) -> Result<Self, OpenMapError> {
        Hole::new(parse_binary(a)?, parse_binary(b)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParryChain {
    pub states: Vec<usize>,
    pub transition: Vec<Vec<f64>>,
    pub stationary: Vec<f64>,
    pub entropy: f64,
}

#[derive(Debug, Clone)]
pub struct HoleAnalysis {
    pub hole: Hole,
    /// 0 = d_1 < … < d_p = 1; block i is [d_i, d_{i+1}).
    pub points: Vec<Rational>,
    pub s: AdjacencyMatrix,
    pub hole_blocks: Vec<usize>,
    /// Principal submatrix on the non-hole blocks.
    pub s_prime: AdjacencyMatrix,
    pub s_prime_index: Vec<usize>,
    /// S′ after iteratively deleting blocks with empty rows.
    pub core: AdjacencyMatrix,
    pub core_index: Vec<usize>,
    pub irreducible: bool,
    pub sccs: SccReport,
}

impl HoleAnalysis {
    pub fn blocks(&self) -> usize {
        self.points.len() - 1
    }

    pub fn block(&self, i: usize) -> (&Rational, &Rational) {
        (&self.points[i], &self.points[i + 1])
    }

    /// T maps every block onto a union of blocks.
    pub fn check_cover_exactness(&self) -> bool {
        (0..self.blocks()).all(|i| {
            let (lo, hi) = self.image(i);
            self.points.contains(&lo) && self.points.contains(&hi)
        })
    }

    fn image(&self, i: usize) -> (Rational, Rational) {
        let (lo, hi) = self.block(i);
        let shift = if *lo >= rat(1, 2) { rint(1) } else { Rational::zero() };
        (lo * rint(2) - &shift, hi * rint(2) - shift)
    }
}

pub fn hole_partition(hole: &Hole) -> Result<HoleAnalysis, OpenMapError> {
    let mut pts: BTreeSet<Rational> = [Rational::zero(), rat(1, 2), hole.a.clone(), hole.b.clone(), rint(1)].into();
    for x in [&hole.a, &hole.b] {
        pts.extend(doubling_orbit(x)?.0);
    }
    let points: Vec<Rational> = pts.into_iter().collect();
    let n = points.len() - 1;
    let mut entries = vec![vec![0u8; n]; n];
    let half = rat(1, 2);
    for (i, row) in entries.iter_mut().enumerate() {
        let shift = if points[i] >= half { rint(1) } else { Rational::zero() };
        let lo = &points[i] * rint(2) - &shift;
        let hi = &points[i + 1] * rint(2) - &shift;
        for (j, e) in row.iter_mut().enumerate() {
            *e = (points[j] >= lo && points[j + 1] <= hi) as u8;
        }
    }
    let names = (0..n).map(block_name).collect();
    let s = AdjacencyMatrix { entries, labels: Default::default(), names };
    let hole_blocks: Vec<usize> = (0..n).filter(|&i| points[i] >= hole.a && points[i + 1] <= hole.b).collect();
    let keep: Vec<usize> = (0..n).filter(|i| !hole_blocks.contains(i)).collect();
    let s_prime = s.principal(&keep);
    let mut core_index = keep.clone();
    loop {
        let next: Vec<usize> = core_index.iter().copied().filter(|&u| core_index.iter().any(|&v| s.has_edge(u, v))).collect();
        if next.len() == core_index.len() {
            break;
        }
        core_index = next;
    }
    let core = s.principal(&core_index);
    let sccs = scc_decompose(&core);
    Ok(HoleAnalysis {
        hole: hole.clone(),
        points,
        s,
        hole_blocks,
        s_prime,
        s_prime_index: keep,
        irreducible: sccs.strongly_connected,
        core,
        core_index,
        sccs,
    })
}

/// dim J[a, b) = log ρ(S′)/log 2, ρ the largest Perron root over the SCCs.
pub fn survivor_dimension(h: &HoleAnalysis) -> Result<SpectralResult, OpenMapError> {
    if h.core_index.is_empty() {
        return Err(OpenMapError::EmptySurvivor);
    }
    let mut r = shift_dimension(&h.core, 2.0)?;
    if let Some(p) = &r.char_poly {
        r.exact_form = Some(format!("log r / log 2, r = largest root of {p}"));
    }
    r.warnings.extend(h.hole.warnings.iter().cloned());
    Ok(r)
}

/// Parry chain of an irreducible 0/1 matrix.
pub fn parry_measure(s: &AdjacencyMatrix) -> Result<ParryChain, OpenMapError> {
    let scc = scc_decompose(s);
    if !scc.strongly_connected || s.edge_count() == 0 {
        return Err(OpenMapError::NotIrreducible(scc));
    }
    let m = s.as_f64();
    let (lambda, v) = perron_vector(&m);
    let (_, u) = perron_vector(&transpose(&m));
    let n = s.size();
    let transition: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let row: Vec<f64> = (0..n).map(|j| m[i][j] * v[j] / (lambda * v[i])).collect();
            // absorb the eigenvector residual so rows sum to 1 to rounding
            let sum: f64 = row.iter().sum();
            row.into_iter().map(|p| p / sum).collect()
        })
        .collect();
    let z: f64 = (0..n).map(|i| u[i] * v[i]).sum();
    let stationary = (0..n).map(|i| u[i] * v[i] / z).collect();
    Ok(ParryChain { states: (0..n).collect(), transition, stationary, entropy: lambda.ln() })
}

impl ParryChain {
    /// μ[i_1 … i_n] = π_{i_1} ∏ P_{i_k i_{k+1}}.
    pub fn cylinder_measure(&self, path: &[usize]) -> f64 {
        let Some(&first) = path.first() else { return 1.0 };
        path.windows(2).fold(self.stationary[first], |acc, w| acc * self.transition[w[0]][w[1]])
    }
}

/// Binary digits of a block path: 0 on blocks inside [0, 1/2), 1 otherwise.
pub fn conjugacy_digits(h: &HoleAnalysis, path: &[usize]) -> Result<Vec<u8>, OpenMapError> {
    for (k, &i) in path.iter().enumerate() {
        if i >= h.blocks() {
            return Err(OpenMapError::InadmissiblePath(k));
        }
        if k > 0 && !h.s.has_edge(path[k - 1], i) {
            return Err(OpenMapError::InadmissiblePath(k));
        }
    }
    let half = rat(1, 2);
    Ok(path.iter().map(|&i| (h.points[i] >= half) as u8).collect())
}
