//! Markov partitions from breakpoint sets, adjacency matrices, switch
//! pruning, strongly connected components and weighted graphs.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::FieldElement;
use crate::ifs_core::{ord, Ifs, Interval};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarkovError {
    #[error("not a Markov partition: T_{map}(block {block}) has endpoint {point} outside the breakpoints")]
    NonMarkov { block: usize, map: usize, point: String },
    #[error("every block was pruned; the remaining set is at most countable")]
    AllBlocksPruned,
    #[error("need at least two breakpoints")]
    TooFewBreakpoints,
}

/// Which admissible expanding map labels the edges out of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MapChoice {
    /// smallest admissible index
    Lazy,
    /// largest admissible index
    Greedy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub map: usize,
    /// Retained blocks covering T_map(block), left to right.
    pub cover: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MarkovPartition {
    pub breakpoints: Vec<FieldElement>,
    pub blocks: Vec<Interval>,
    pub names: Vec<String>,
    /// All admissible transitions per block.
    pub transitions: Vec<Vec<Transition>>,
    /// Index into `transitions[j]` of the labelled map.
    pub chosen: Vec<usize>,
    pub switch_blocks: Vec<usize>,
    /// Intervals between breakpoints deleted for having no outgoing path.
    pub pruned: Vec<Interval>,
    pub choice: MapChoice,
    pub warnings: Vec<String>,
}

pub fn block_name(i: usize) -> String {
    let letters = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    if i < 26 {
        (letters[i] as char).to_string()
    } else {
        format!("{}{}", letters[i % 26] as char, i / 26)
    }
}

fn locate(points: &[FieldElement], x: &FieldElement) -> Option<usize> {
    points.binary_search_by(|p| ord(p, x)).ok()
}

/// Builds the partition into intervals between consecutive breakpoints and
/// records exact block covers of every T_k(A_j) with A_j ⊆ f_k(hull).
/// `regions` are the certified switch intervals.
pub fn build_partition(
    ifs: &Ifs,
    breakpoints: &[FieldElement],
    regions: &[Interval],
    choice: MapChoice,
) -> Result<MarkovPartition, MarkovError> {
    if breakpoints.len() < 2 {
        return Err(MarkovError::TooFewBreakpoints);
    }
    let raw: Vec<Interval> = breakpoints
        .windows(2)
        .map(|w| Interval::new(w[0].clone(), w[1].clone()))
        .collect();
    let images: Vec<Interval> = (0..ifs.len()).map(|k| ifs.image(k)).collect();
    // raw covers as ranges of raw block indices; the labelled map must be
    // Markov, other admissible maps are recorded only when they are
    let mut raw_tr: Vec<Vec<(usize, usize, usize)>> = vec![vec![]; raw.len()];
    let mut raw_pick: Vec<Option<usize>> = vec![None; raw.len()];
    for (j, b) in raw.iter().enumerate() {
        let adm: Vec<usize> = (0..ifs.len()).filter(|&k| images[k].contains_interval(b)).collect();
        let pick = match choice {
            MapChoice::Lazy => adm.first().copied(),
            MapChoice::Greedy => adm.last().copied(),
        };
        for &k in &adm {
            let a = ifs.maps[k].apply_inverse(&b.lo);
            let c = ifs.maps[k].apply_inverse(&b.hi);
            match (locate(breakpoints, &a), locate(breakpoints, &c)) {
                (Some(ia), Some(ic)) => {
                    if Some(k) == pick {
                        raw_pick[j] = Some(raw_tr[j].len());
                    }
                    raw_tr[j].push((k, ia, ic));
                }
                (ia, _) if Some(k) == pick => {
                    let point = if ia.is_none() { a } else { c };
                    return Err(MarkovError::NonMarkov { block: j, map: k, point: point.to_string() });
                }
                _ => {}
            }
        }
    }
    // iterated pruning of blocks without an outgoing path
    let mut alive = vec![true; raw.len()];
    loop {
        let mut changed = false;
        for j in 0..raw.len() {
            if !alive[j] {
                continue;
            }
            let has = raw_pick[j].is_some_and(|t| {
                let (_, a, c) = raw_tr[j][t];
                (a..c).any(|i| alive[i])
            });
            if !has {
                alive[j] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut new_index = vec![usize::MAX; raw.len()];
    let mut blocks = vec![];
    let mut pruned = vec![];
    for (j, b) in raw.iter().enumerate() {
        if alive[j] {
            new_index[j] = blocks.len();
            blocks.push(b.clone());
        } else {
            pruned.push(b.clone());
        }
    }
    let mut transitions = vec![];
    let mut chosen = vec![];
    for j in 0..raw.len() {
        if !alive[j] {
            continue;
        }
        let pk = raw_tr[j][raw_pick[j].unwrap()].0;
        let trs: Vec<Transition> = raw_tr[j]
            .iter()
            .map(|&(k, a, c)| Transition { map: k, cover: (a..c).filter(|&i| alive[i]).map(|i| new_index[i]).collect() })
            .filter(|t| !t.cover.is_empty() || t.map == pk)
            .collect();
        chosen.push(trs.iter().position(|t| t.map == pk).unwrap());
        transitions.push(trs);
    }
    let mut switch_blocks = vec![];
    let mut warnings = vec![];
    for (i, b) in blocks.iter().enumerate() {
        if regions.iter().any(|r| r.contains_interval(b)) {
            switch_blocks.push(i);
        }
    }
    for r in regions {
        let tiled = blocks.iter().any(|b| b.lo == r.lo) && blocks.iter().any(|b| b.hi == r.hi);
        if !tiled {
            warnings.push(format!("switch region {:?} is not a union of partition blocks", r));
        }
    }
    for (i, b) in blocks.iter().enumerate() {
        if switch_blocks.contains(&i) {
            continue;
        }
        if regions.iter().any(|r| r.overlaps(b)) {
            warnings.push(format!("block {} partially overlaps a switch region", block_name(i)));
        }
    }
    let names = (0..blocks.len()).map(block_name).collect();
    Ok(MarkovPartition { breakpoints: breakpoints.to_vec(), blocks, names, transitions, chosen, switch_blocks, pruned, choice, warnings })
}

impl MarkovPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn chosen_transition(&self, j: usize) -> &Transition {
        &self.transitions[j][self.chosen[j]]
    }

    /// Readable list such as `T_1(A) = A ∪ B`.
    pub fn describe(&self, ifs: &Ifs) -> Vec<String> {
        (0..self.len())
            .map(|j| {
                let t = self.chosen_transition(j);
                let cover: Vec<&str> = t.cover.iter().map(|&i| self.names[i].as_str()).collect();
                format!("T_{}({}) = {}", ifs.labels[t.map], self.names[j], cover.join(" ∪ "))
            })
            .collect()
    }

    /// Every recorded transition maps block endpoints onto breakpoints and
    /// its cover abuts without gaps among retained blocks.
    pub fn check_cover_exactness(&self, ifs: &Ifs) -> bool {
        for (j, trs) in self.transitions.iter().enumerate() {
            let b = &self.blocks[j];
            for t in trs {
                let a = ifs.maps[t.map].apply_inverse(&b.lo);
                let c = ifs.maps[t.map].apply_inverse(&b.hi);
                if locate(&self.breakpoints, &a).is_none() || locate(&self.breakpoints, &c).is_none() {
                    return false;
                }
                let span = Interval::new(a, c);
                if !t.cover.iter().all(|&i| span.contains_interval(&self.blocks[i])) {
                    return false;
                }
                if t.cover.windows(2).any(|w| w[0] >= w[1]) {
                    return false;
                }
            }
        }
        true
    }
}

/// 0/1 matrix with edge labels (map index per edge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    pub entries: Vec<Vec<u8>>,
    pub labels: BTreeMap<(usize, usize), usize>,
    pub names: Vec<String>,
}

impl Serialize for AdjacencyMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Labels<'a>(&'a BTreeMap<(usize, usize), usize>);
        impl Serialize for Labels<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for ((u, v), k) in self.0 {
                    m.serialize_entry(&format!("{u},{v}"), k)?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("rows", &self.rows())?;
        m.serialize_entry("names", &self.names)?;
        m.serialize_entry("labels", &Labels(&self.labels))?;
        m.end()
    }
}

impl AdjacencyMatrix {
    pub fn from_rows(rows: &[&str]) -> Self {
        let entries: Vec<Vec<u8>> = rows.iter().map(|r| r.bytes().map(|c| (c == b'1') as u8).collect()).collect();
        let names = (0..entries.len()).map(block_name).collect();
        AdjacencyMatrix { entries, labels: BTreeMap::new(), names }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn rows(&self) -> Vec<String> {
        self.entries.iter().map(|r| r.iter().map(|&v| if v == 1 { '1' } else { '0' }).collect()).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.entries[u][v] == 1
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.entries[u].iter().enumerate().filter(|(_, &e)| e == 1).map(|(v, _)| v)
    }

    pub fn edge_count(&self) -> usize {
        self.entries.iter().map(|r| r.iter().filter(|&&v| v == 1).count()).sum()
    }

    /// Principal submatrix on `keep` (indices into self), preserving order.
    pub fn principal(&self, keep: &[usize]) -> AdjacencyMatrix {
        let entries = keep.iter().map(|&u| keep.iter().map(|&v| self.entries[u][v]).collect()).collect();
        let mut labels = BTreeMap::new();
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate() {
                if let Some(&k) = self.labels.get(&(u, v)) {
                    labels.insert((a, b), k);
                }
            }
        }
        let names = keep.iter().map(|&u| self.names[u].clone()).collect();
        AdjacencyMatrix { entries, labels, names }
    }

    pub fn as_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect()
    }

    pub fn as_rational(&self) -> crate::exactnum::RatMatrix {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&v| crate::exactnum::rint(v as i64)).collect())
            .collect()
    }
}

pub fn adjacency(p: &MarkovPartition) -> AdjacencyMatrix {
    let n = p.len();
    let mut entries = vec![vec![0u8; n]; n];
    let mut labels = BTreeMap::new();
    for j in 0..n {
        let t = p.chosen_transition(j);
        for &i in &t.cover {
            entries[j][i] = 1;
            labels.insert((j, i), t.map);
        }
    }
    AdjacencyMatrix { entries, labels, names: p.names.clone() }
}

/// S′ in two forms: the principal submatrix on non-switch blocks, and its
/// core after iteratively deleting vertices with empty rows.
#[derive(Debug, Clone)]
pub struct SwitchPruned {
    pub principal: AdjacencyMatrix,
    pub principal_index: Vec<usize>,
    pub core: AdjacencyMatrix,
    pub core_index: Vec<usize>,
}

pub fn prune_switch(switch_blocks: &[usize], s: &AdjacencyMatrix) -> Result<SwitchPruned, MarkovError> {
    let keep: Vec<usize> = (0..s.size()).filter(|i| !switch_blocks.contains(i)).collect();
    let principal = s.principal(&keep);
    let mut core_index = keep.clone();
    loop {
        let next: Vec<usize> = core_index
            .iter()
            .copied()
            .filter(|&u| core_index.iter().any(|&v| s.has_edge(u, v)))
            .collect();
        if next.len() == core_index.len() {
            break;
        }
        core_index = next;
    }
    if core_index.is_empty() {
        return Err(MarkovError::AllBlocksPruned);
    }
    let core = s.principal(&core_index);
    Ok(SwitchPruned { principal, principal_index: keep, core, core_index })
}

/// Strongly connected components in Tarjan order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SccReport {
    pub components: Vec<Vec<usize>>,
    /// A component carries an infinite path (size > 1 or a self-loop).
    pub nontrivial: Vec<bool>,
    pub strongly_connected: bool,
}

pub fn scc_decompose(s: &AdjacencyMatrix) -> SccReport {
    let n = s.size();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = vec![];
    let mut comps: Vec<Vec<usize>> = vec![];
    let mut counter = 0;
    // iterative Tarjan
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        while let Some(top) = work.len().checked_sub(1) {
            let (v, mut next) = work[top];
            if next == 0 && index[v] == usize::MAX {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let mut child = None;
            while next < n {
                let w = next;
                next += 1;
                if !s.has_edge(v, w) {
                    continue;
                }
                if index[w] == usize::MAX {
                    child = Some(w);
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            work[top].1 = next;
            if let Some(w) = child {
                work.push((w, 0));
                continue;
            }
            work.pop();
            if let Some(&(u, _)) = work.last() {
                low[u] = low[u].min(low[v]);
            }
            if low[v] == index[v] {
                let mut c = vec![];
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    c.push(w);
                    if w == v {
                        break;
                    }
                }
                c.sort();
                comps.push(c);
            }
        }
    }
    comps.sort();
    let nontrivial = comps.iter().map(|c| c.len() > 1 || s.has_edge(c[0], c[0])).collect();
    let strongly_connected = comps.len() == 1 && n > 0;
    SccReport { components: comps, nontrivial, strongly_connected }
}

/// Edge weights |ratio| of the labelling contraction.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    pub size: usize,
    pub edges: Vec<(usize, usize, FieldElement)>,
}

pub fn weighted_graph(ifs: &Ifs, s: &AdjacencyMatrix) -> WeightedGraph {
    let mut edges = vec![];
    for (&(u, v), &k) in &s.labels {
        if s.has_edge(u, v) {
            edges.push((u, v, ifs.maps[k].ratio.abs().expect("ratio sign")));
        }
    }
    WeightedGraph { size: s.size(), edges }
}

impl WeightedGraph {
    pub fn adjacency(&self) -> AdjacencyMatrix {
        let mut entries = vec![vec![0u8; self.size]; self.size];
        for (u, v, _) in &self.edges {
            entries[*u][*v] = 1;
        }
        AdjacencyMatrix { entries, labels: BTreeMap::new(), names: (0..self.size).map(block_name).collect() }
    }

    pub fn restrict(&self, keep: &[usize]) -> WeightedGraph {
        let pos = |x: usize| keep.iter().position(|&k| k == x);
        let edges = self
            .edges
            .iter()
            .filter_map(|(u, v, w)| Some((pos(*u)?, pos(*v)?, w.clone())))
            .collect();
        WeightedGraph { size: keep.len(), edges }
    }

    pub fn weight_matrix_f64(&self, t: f64) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.size]; self.size];
        for (u, v, w) in &self.edges {
            m[*u][*v] += w.to_f64().powf(t);
        }
        m
    }
}

/// Open set condition for the graph-directed system on `p`: for each u the
/// images g_{u,v}(A_v) are contained in A_u and have disjoint interiors.
pub fn check_osc(ifs: &Ifs, p: &MarkovPartition, s: &AdjacencyMatrix, keep: &[usize]) -> bool {
    for (a, &u) in keep.iter().enumerate() {
        let mut imgs: Vec<Interval> = vec![];
        for &v in keep {
            if !s.has_edge(u, v) {
                continue;
            }
            let k = s.labels[&(u, v)];
            let img = ifs.maps[k].image(&p.blocks[v]);
            if !p.blocks[u].contains_interval(&img) {
                return false;
            }
            imgs.push(img);
        }
        let _ = a;
        imgs.sort_by(|x, y| ord(&x.lo, &y.lo));
        for w in imgs.windows(2) {
            if ord(&w[0].hi, &w[1].lo) == Ordering::Greater {
                return false;
            }
        }
    }
    true
}
