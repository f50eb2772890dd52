//! Codings of single points: the graph of exact orbit values x → T_i(x),
//! path counting, and the multiplicity sets U_k of the four-map family
//! f_1 = λx, f_2 = λx + 2λ, f_3 = λx + 3λ − λ², f_4 = λx + 1 − λ.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::analysis::{analyze_ifs, AnalysisError, IfsAnalysis, IfsOptions};
use crate::dimension::{perron_root, shift_dimension, DimError, SpectralResult};
use crate::exactnum::{FieldElement, NumError, Poly};
use crate::ifs_core::{ord, AffineMap, Ifs, IfsError};
use crate::markov::{scc_decompose, AdjacencyMatrix};

pub const DEFAULT_DEPTH: usize = 40;
const NODE_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodingError {
    #[error("point lies outside the convex hull")]
    OutsideHull,
    #[error("λ must satisfy 0 < λ < (5 - √21)/2")]
    LambdaOutOfRange,
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Dim(#[from] DimError),
}

/// Reachable orbit values of x under the expanding maps T_i = f_i^{-1},
/// restricted to the hull.
#[derive(Debug, Clone)]
pub struct CodingTree {
    pub root: FieldElement,
    pub values: Vec<FieldElement>,
    /// (map index, child node) per node; a child exists iff T_i(value) lies in the hull.
    pub children: Vec<Vec<(usize, usize)>>,
    /// BFS depth of each node.
    pub level: Vec<usize>,
    /// Nodes whose children were not generated.
    pub frontier: Vec<bool>,
    pub depth: usize,
}

impl CodingTree {
    pub fn complete(&self) -> bool {
        !self.frontier.iter().any(|&f| f)
    }
}

pub fn enumerate_codings(ifs: &Ifs, x: &FieldElement, depth: usize) -> Result<CodingTree, CodingError> {
    if !ifs.hull.contains(x) {
        return Err(CodingError::OutsideHull);
    }
    let mut index: HashMap<FieldElement, usize> = HashMap::new();
    let mut t = CodingTree { root: x.clone(), values: vec![x.clone()], children: vec![vec![]], level: vec![0], frontier: vec![true], depth };
    index.insert(x.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        if t.level[u] >= depth || t.values.len() >= NODE_LIMIT {
            continue;
        }
        t.frontier[u] = false;
        let v = t.values[u].clone();
        for (k, m) in ifs.maps.iter().enumerate() {
            let y = m.apply_inverse(&v);
            if !ifs.hull.contains(&y) {
                continue;
            }
            let id = *index.entry(y.clone()).or_insert_with(|| {
                t.values.push(y);
                t.children.push(vec![]);
                t.level.push(t.level[u] + 1);
                t.frontier.push(true);
                queue.push_back(t.values.len() - 1);
                t.values.len() - 1
            });
            t.children[u].push((k, id));
        }
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Exactly(usize),
    /// Countably infinitely many codings.
    Countable,
    Uncountable,
    AtLeast { count: usize, depth: usize },
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match self {
            Verdict::Exactly(k) => m.serialize_entry("exactly", k)?,
            Verdict::Countable => m.serialize_entry("countable", &true)?,
            Verdict::Uncountable => m.serialize_entry("uncountable", &true)?,
            Verdict::AtLeast { count, depth } => {
                m.serialize_entry("at_least", count)?;
                m.serialize_entry("depth", depth)?;
            }
        }
        m.end()
    }
}

/// Eventually periodic coding as map indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coding {
    pub pre: Vec<usize>,
    pub period: Vec<usize>,
}

impl Coding {
    pub fn render(&self, labels: &[String]) -> String {
        let s = |v: &[usize]| v.iter().map(|&k| labels[k].as_str()).collect::<String>();
        format!("{}({})", s(&self.pre), s(&self.period))
    }
}

#[derive(Debug, Clone)]
pub struct MultiplicityReport {
    pub point: FieldElement,
    pub verdict: Verdict,
    /// All codings when the verdict is Exactly(k).
    pub codings: Vec<Coding>,
}

/// Nodes from which an infinite path may start (frontier nodes count as live).
fn live_nodes(t: &CodingTree) -> Vec<bool> {
    let n = t.values.len();
    let mut live = vec![true; n];
    loop {
        let mut changed = false;
        for u in 0..n {
            if live[u] && !t.frontier[u] && !t.children[u].iter().any(|&(_, v)| live[v]) {
                live[u] = false;
                changed = true;
            }
        }
        if !changed {
            return live;
        }
    }
}

pub fn classify_multiplicity(t: &CodingTree) -> MultiplicityReport {
    let live = live_nodes(t);
    let point = t.root.clone();
    if !live[0] {
        return MultiplicityReport { point, verdict: Verdict::Exactly(0), codings: vec![] };
    }
    let n = t.values.len();
    // live subgraph as a 0/1 matrix for the SCC structure
    let mut entries = vec![vec![0u8; n]; n];
    let mut mult = vec![vec![0usize; n]; n];
    for u in 0..n {
        for &(_, v) in &t.children[u] {
            if live[u] && live[v] {
                entries[u][v] = 1;
                mult[u][v] += 1;
            }
        }
    }
    let adj = AdjacencyMatrix { entries, labels: Default::default(), names: vec![String::new(); n] };
    let scc = scc_decompose(&adj);
    let mut comp = vec![0; n];
    for (ci, c) in scc.components.iter().enumerate() {
        for &u in c {
            comp[u] = ci;
        }
    }
    let reach = reachable(&adj, 0);
    let mut branching_cycle = false;
    let mut cycle_exit = false;
    for (ci, c) in scc.components.iter().enumerate() {
        if !scc.nontrivial[ci] || !reach[c[0]] {
            continue;
        }
        let inner: usize = c.iter().map(|&u| c.iter().map(|&v| mult[u][v]).sum::<usize>()).sum();
        if inner > c.len() {
            branching_cycle = true;
        }
        if c.iter().any(|&u| (0..n).any(|v| mult[u][v] > 0 && comp[v] != ci)) {
            cycle_exit = true;
        }
    }
    if branching_cycle {
        return MultiplicityReport { point, verdict: Verdict::Uncountable, codings: vec![] };
    }
    let frontier_reached = (0..n).any(|u| reach[u] && t.frontier[u] && live[u]);
    if frontier_reached {
        let count = prefixes_alive(t, &live);
        return MultiplicityReport { point, verdict: Verdict::AtLeast { count, depth: t.depth }, codings: vec![] };
    }
    if cycle_exit {
        return MultiplicityReport { point, verdict: Verdict::Countable, codings: vec![] };
    }
    let mut codings = vec![];
    let mut path = vec![];
    collect_paths(t, &live, &comp, &scc.nontrivial, 0, &mut vec![], &mut path, &mut codings);
    codings.sort();
    MultiplicityReport { point, verdict: Verdict::Exactly(codings.len()), codings }
}

fn reachable(adj: &AdjacencyMatrix, s: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.size()];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(u) = stack.pop() {
        for v in adj.successors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Number of live branches at the exploration depth.
fn prefixes_alive(t: &CodingTree, live: &[bool]) -> usize {
    let mut cur: HashMap<usize, usize> = HashMap::from([(0, 1)]);
    for _ in 0..t.depth {
        let mut next: HashMap<usize, usize> = HashMap::new();
        for (&u, &c) in &cur {
            if t.frontier[u] {
                *next.entry(u).or_default() += c;
                continue;
            }
            for &(_, v) in &t.children[u] {
                if live[v] {
                    let e = next.entry(v).or_default();
                    *e = e.saturating_add(c);
                }
            }
        }
        cur = next;
    }
    cur.values().fold(0usize, |a, &b| a.saturating_add(b))
}

/// Paths in a graph whose reachable cycles are simple and closed; each path
/// ends in one cycle.
#[allow(clippy::too_many_arguments)]
fn collect_paths(
    t: &CodingTree,
    live: &[bool],
    comp: &[usize],
    nontrivial: &[bool],
    u: usize,
    nodes: &mut Vec<usize>,
    digits: &mut Vec<usize>,
    out: &mut Vec<Coding>,
) {
    if let Some(pos) = nodes.iter().position(|&w| w == u) {
        out.push(Coding { pre: digits[..pos].to_vec(), period: digits[pos..].to_vec() });
        return;
    }
    nodes.push(u);
    for &(k, v) in &t.children[u] {
        if !live[v] {
            continue;
        }
        // inside a closed cycle only the cycle edge continues
        if nontrivial[comp[u]] && comp[v] != comp[u] {
            continue;
        }
        digits.push(k);
        collect_paths(t, live, comp, nontrivial, v, nodes, digits, out);
        digits.pop();
    }
    nodes.pop();
}

pub fn count_codings(ifs: &Ifs, x: &FieldElement, depth: usize) -> Result<MultiplicityReport, CodingError> {
    Ok(classify_multiplicity(&enumerate_codings(ifs, x, depth)?))
}

/// The four-map family for a given λ.
pub fn uk_family(lambda: &FieldElement) -> Result<Ifs, CodingError> {
    check_lambda(lambda)?;
    let f = lambda.field();
    let one = FieldElement::one(f);
    let l2 = lambda * lambda;
    let offsets = [
        FieldElement::zero(f),
        lambda.scale(&crate::exactnum::rint(2)),
        &lambda.scale(&crate::exactnum::rint(3)) - &l2,
        &one - lambda,
    ];
    let maps = offsets.into_iter().map(|o| AffineMap::new(lambda.clone(), o)).collect();
    Ok(Ifs::new(f.clone(), maps, (1..=4).map(|i| i.to_string()).collect())?)
}

/// 0 < λ and λ < (5 − √21)/2, i.e. λ² − 5λ + 1 > 0 with λ < 5/2.
pub fn check_lambda(lambda: &FieldElement) -> Result<(), CodingError> {
    let f = lambda.field();
    let q = &(&(lambda * lambda) - &lambda.scale(&crate::exactnum::rint(5))) + &FieldElement::one(f);
    let ok = lambda.sign()? > 0 && q.sign()? > 0 && ord(lambda, &FieldElement::from_rational(f, crate::exactnum::rat(5, 2))) == Ordering::Less;
    if ok {
        Ok(())
    } else {
        Err(CodingError::LambdaOutOfRange)
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub point: FieldElement,
    pub report: MultiplicityReport,
}

#[derive(Debug, Clone)]
pub struct UkFamilyReport {
    pub ifs: Ifs,
    pub analysis: IfsAnalysis,
    /// Char poly of S′ and its divisibility by x² − 4x + 2.
    pub s_prime_char_poly: Poly,
    pub perron_is_2_plus_sqrt2: bool,
    pub dim_u1: SpectralResult,
    /// log(2 + √2)/(−log λ).
    pub closed_form: f64,
    pub witnesses: Vec<Witness>,
}

pub fn uk_family_report(lambda: &FieldElement, depth: usize) -> Result<UkFamilyReport, CodingError> {
    let ifs = uk_family(lambda)?;
    let analysis = analyze_ifs(&ifs, &IfsOptions::default())?;
    let (p, _) = perron_root(&analysis.s_prime.principal)?;
    let perron_is = p.rem(&Poly::from_ints(&[2, -4, 1])).degree().is_none();
    let l = lambda.to_f64();
    let dim_u1 = shift_dimension(&analysis.s_prime.principal, 1.0 / l)?;
    let closed_form = (2.0 + 2f64.sqrt()).ln() / -l.ln();
    let three = lambda.scale(&crate::exactnum::rint(3));
    let points = [&three - &(lambda * lambda), three, FieldElement::zero(lambda.field())];
    let mut witnesses = vec![];
    for x in points {
        let report = count_codings(&ifs, &x, depth)?;
        witnesses.push(Witness { point: x, report });
    }
    // f_2 ∘ f_4 doubles the number of codings
    let doubled = ifs.maps[1].apply(&ifs.maps[3].apply(&witnesses[0].point));
    let report = count_codings(&ifs, &doubled, depth)?;
    witnesses.push(Witness { point: doubled, report });
    Ok(UkFamilyReport { ifs, analysis, s_prime_char_poly: p, perron_is_2_plus_sqrt2: perron_is, dim_u1, closed_form, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, NumberField};

    fn lam(n: i64, d: i64) -> FieldElement {
        FieldElement::from_rational(&NumberField::rational(), rat(n, d))
    }

    #[test]
    fn lambda_range() {
        assert!(check_lambda(&lam(1, 10)).is_ok());
        assert!(check_lambda(&lam(19, 100)).is_ok());
        assert_eq!(check_lambda(&lam(21, 100)).unwrap_err(), CodingError::LambdaOutOfRange);
        assert_eq!(check_lambda(&lam(0, 1)).unwrap_err(), CodingError::LambdaOutOfRange);
    }

    #[test]
    fn two_codings() {
        let l = lam(1, 10);
        let ifs = uk_family(&l).unwrap();
        let x = &l.scale(&crate::exactnum::rint(3)) - &(&l * &l);
        let r = count_codings(&ifs, &x, DEFAULT_DEPTH).unwrap();
        assert_eq!(r.verdict, Verdict::Exactly(2));
        let words: Vec<String> = r.codings.iter().map(|c| c.render(&ifs.labels)).collect();
        assert_eq!(words, ["24(1)", "3(1)"]);
        let r = count_codings(&ifs, &FieldElement::zero(l.field()), DEFAULT_DEPTH).unwrap();
        assert_eq!(r.verdict, Verdict::Exactly(1));
    }

    #[test]
    fn cantor_endpoints() {
        let ifs = crate::ifs_core::tests::rational_ifs(&[(rat(1, 3), rat(0, 1)), (rat(1, 3), rat(2, 3))]);
        let f = ifs.field.clone();
        let r = count_codings(&ifs, &FieldElement::from_rational(&f, rat(1, 3)), 10).unwrap();
        assert_eq!(r.verdict, Verdict::Exactly(1));
        let r = count_codings(&ifs, &FieldElement::from_rational(&f, rat(1, 2)), 10).unwrap();
        assert_eq!(r.verdict, Verdict::Exactly(0));
    }
}
