//! Iterated function systems of similitudes on the line: loading, hull,
//! exact overlap certificates, lazy expanding steps and endpoint orbits.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{parse_rational, FieldElement, NumError, NumberField, Poly};

pub const DEFAULT_MAX_STEPS: usize = 10_000;
pub const DEFAULT_OVERLAP_DEPTH: usize = 8;
const WORD_GUARD: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IfsError {
    #[error("an IFS needs at least two maps")]
    EmptySpec,
    #[error("map {0} is not a contraction")]
    NotContraction(usize),
    #[error("map {0} has a negative or zero ratio; only orientation preserving maps are supported")]
    NotSupported(usize),
    #[error("field construction failed: {0}")]
    FieldConstructionFailure(NumError),
    #[error("malformed spec: {0}")]
    Malformed(String),
    #[error("intersection of maps {0} and {1} is not certified as a union of exact overlaps within depth {2}")]
    UnresolvedOverlap(usize, usize, usize),
    #[error("point {0} lies in no image f_k(hull)")]
    NoAdmissibleMap(String),
    #[error("orbit of endpoint {0} did not close within {1} points")]
    OrbitNotPeriodic(String, usize),
    #[error("word enumeration exceeded {0} cylinders")]
    ExplosionGuard(usize),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Exact comparison helper for elements known to share a field.
pub fn ord(a: &FieldElement, b: &FieldElement) -> Ordering {
    a.cmp_exact(b).expect("elements of one field")
}

pub fn sort_dedup(v: &mut Vec<FieldElement>) {
    v.sort_by(ord);
    v.dedup();
}

/// Closed interval [lo, hi] with exact endpoints.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: FieldElement,
    pub hi: FieldElement,
}

impl Interval {
    pub fn new(lo: FieldElement, hi: FieldElement) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        ord(&self.lo, x) != Ordering::Greater && ord(x, &self.hi) != Ordering::Greater
    }

    pub fn contains_interval(&self, o: &Interval) -> bool {
        self.contains(&o.lo) && self.contains(&o.hi)
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let lo = if ord(&self.lo, &o.lo) == Ordering::Less { o.lo.clone() } else { self.lo.clone() };
        let hi = if ord(&self.hi, &o.hi) == Ordering::Greater { o.hi.clone() } else { self.hi.clone() };
        if ord(&lo, &hi) == Ordering::Greater {
            None
        } else {
            Some(Interval { lo, hi })
        }
    }

    /// True when the intersection has positive length.
    pub fn overlaps(&self, o: &Interval) -> bool {
        self.intersect(o).is_some_and(|i| !i.is_point())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> FieldElement {
        &self.hi - &self.lo
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// f(x) = ratio·x + offset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub ratio: FieldElement,
    pub offset: FieldElement,
}

impl AffineMap {
    pub fn new(ratio: FieldElement, offset: FieldElement) -> Self {
        AffineMap { ratio, offset }
    }

    pub fn identity(field: &Arc<NumberField>) -> Self {
        AffineMap::new(FieldElement::one(field), FieldElement::zero(field))
    }

    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        &(&self.ratio * x) + &self.offset
    }

    /// The expanding map T(x) = (x − offset)/ratio.
    pub fn inverse(&self) -> AffineMap {
        let inv = self.ratio.inverse().expect("nonzero ratio");
        let off = -(&inv * &self.offset);
        AffineMap::new(inv, off)
    }

    pub fn apply_inverse(&self, x: &FieldElement) -> FieldElement {
        let inv = self.ratio.inverse().expect("nonzero ratio");
        &inv * &(x - &self.offset)
    }

    /// self ∘ inner.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        AffineMap::new(&self.ratio * &inner.ratio, &(&self.ratio * &inner.offset) + &self.offset)
    }

    pub fn image(&self, iv: &Interval) -> Interval {
        let a = self.apply(&iv.lo);
        let b = self.apply(&iv.hi);
        if ord(&a, &b) == Ordering::Greater {
            Interval::new(b, a)
        } else {
            Interval::new(a, b)
        }
    }

    pub fn fixed_point(&self) -> FieldElement {
        let one = FieldElement::one(self.ratio.field());
        self.offset.try_div(&(&one - &self.ratio)).expect("contraction")
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})x + ({})", self.ratio, self.offset)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MapSpec {
    pub ratio: CoeffSpec,
    pub offset: CoeffSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Either a list of power-basis coefficients or a single rational.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CoeffSpec {
    List(Vec<serde_json::Value>),
    Scalar(serde_json::Value),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IfsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_poly: Option<Poly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_hint: Option<(String, String)>,
    pub maps: Vec<MapSpec>,
}

impl CoeffSpec {
    fn to_element(&self, field: &Arc<NumberField>) -> Result<FieldElement, IfsError> {
        let vals: Vec<&serde_json::Value> = match self {
            CoeffSpec::List(v) => v.iter().collect(),
            CoeffSpec::Scalar(v) => vec![v],
        };
        let mut c = vec![];
        for v in vals {
            c.push(crate::exactnum::serde_rat::value_to_rational(v).map_err(|e| IfsError::Malformed(e.to_string()))?);
        }
        Ok(FieldElement::from_coeffs(field, c))
    }
}

impl IfsSpec {
    pub fn build_field(&self) -> Result<Arc<NumberField>, IfsError> {
        let rational = self.field.as_deref() == Some("rational") || self.min_poly.is_none();
        if rational {
            return Ok(NumberField::rational());
        }
        let p = self.min_poly.as_ref().unwrap();
        let (a, b) = self
            .root_hint
            .as_ref()
            .ok_or_else(|| IfsError::Malformed("root_hint missing".into()))?;
        let a = parse_rational(a).map_err(|e| IfsError::Malformed(e.to_string()))?;
        let b = parse_rational(b).map_err(|e| IfsError::Malformed(e.to_string()))?;
        NumberField::new(p, (&a, &b)).map_err(IfsError::FieldConstructionFailure)
    }
}

/// An IFS {f_1, …, f_m} with positive ratios, maps sorted by image left endpoint.
#[derive(Clone)]
pub struct Ifs {
    pub field: Arc<NumberField>,
    pub maps: Vec<AffineMap>,
    pub labels: Vec<String>,
    pub hull: Interval,
}

impl fmt::Debug for Ifs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ifs").field("maps", &self.maps).field("labels", &self.labels).field("hull", &self.hull).finish()
    }
}

pub fn load_ifs(spec: &IfsSpec) -> Result<Ifs, IfsError> {
    let field = spec.build_field()?;
    let mut maps = vec![];
    let mut labels = vec![];
    for (i, m) in spec.maps.iter().enumerate() {
        maps.push(AffineMap::new(m.ratio.to_element(&field)?, m.offset.to_element(&field)?));
        labels.push(m.label.clone().unwrap_or_else(|| (i + 1).to_string()));
    }
    Ifs::new(field, maps, labels)
}

pub fn load_ifs_json(text: &str) -> Result<Ifs, IfsError> {
    let spec: IfsSpec = serde_json::from_str(text).map_err(|e| IfsError::Malformed(e.to_string()))?;
    load_ifs(&spec)
}

impl Ifs {
    pub fn new(field: Arc<NumberField>, maps: Vec<AffineMap>, labels: Vec<String>) -> Result<Ifs, IfsError> {
        if maps.len() < 2 {
            return Err(IfsError::EmptySpec);
        }
        let one = FieldElement::one(&field);
        for (i, m) in maps.iter().enumerate() {
            if m.ratio.sign()? <= 0 {
                return Err(IfsError::NotSupported(i));
            }
            if m.ratio.cmp_exact(&one)? != Ordering::Less {
                return Err(IfsError::NotContraction(i));
            }
        }
        let fps: Vec<FieldElement> = maps.iter().map(|m| m.fixed_point()).collect();
        let lo = fps.iter().min_by(|a, b| ord(a, b)).unwrap().clone();
        let hi = fps.iter().max_by(|a, b| ord(a, b)).unwrap().clone();
        let hull = Interval::new(lo, hi);
        let mut idx: Vec<usize> = (0..maps.len()).collect();
        let images: Vec<Interval> = maps.iter().map(|m| m.image(&hull)).collect();
        idx.sort_by(|&a, &b| ord(&images[a].lo, &images[b].lo).then_with(|| ord(&images[a].hi, &images[b].hi)));
        let maps = idx.iter().map(|&i| maps[i].clone()).collect();
        let labels = idx.iter().map(|&i| labels[i].clone()).collect();
        Ok(Ifs { field, maps, labels, hull })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn image(&self, k: usize) -> Interval {
        self.maps[k].image(&self.hull)
    }

    pub fn word_map(&self, w: &[usize]) -> AffineMap {
        let mut m = AffineMap::identity(&self.field);
        for &k in w {
            m = m.compose(&self.maps[k]);
        }
        m
    }

    pub fn word_label(&self, w: &[usize]) -> String {
        w.iter().map(|&k| self.labels[k].as_str()).collect::<Vec<_>>().join("")
    }

    /// The 2m endpoints of the first-level images.
    pub fn endpoints(&self) -> Vec<FieldElement> {
        let mut v = vec![];
        for k in 0..self.len() {
            let iv = self.image(k);
            v.push(iv.lo);
            v.push(iv.hi);
        }
        v
    }

    /// Indices of maps whose image f_k(hull) contains x.
    pub fn maps_containing(&self, x: &FieldElement) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.image(k).contains(x)).collect()
    }

    /// Pairs (i, j), i < j, whose images meet.
    pub fn intersecting_pairs(&self) -> Vec<(usize, usize, Interval)> {
        let mut out = vec![];
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if let Some(iv) = self.image(i).intersect(&self.image(j)) {
                    out.push((i, j, iv));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactOverlapCertificate {
    pub pair: (usize, usize),
    pub intersection: Interval,
    /// Word pairs (w, v) with f_w = f_v, w starting with `pair.0`, v with `pair.1`.
    pub decompositions: Vec<(Vec<usize>, Vec<usize>)>,
}

impl ExactOverlapCertificate {
    /// Each decomposition extended by one more letter on both sides.
    pub fn refined(&self, m: usize) -> ExactOverlapCertificate {
        let mut d = vec![];
        for (w, v) in &self.decompositions {
            for k in 0..m {
                let mut w2 = w.clone();
                w2.push(k);
                let mut v2 = v.clone();
                v2.push(k);
                d.push((w2, v2));
            }
        }
        ExactOverlapCertificate { pair: self.pair, intersection: self.intersection.clone(), decompositions: d }
    }
}

#[derive(Clone, Debug, Default)]
pub struct OverlapReport {
    pub certificates: Vec<ExactOverlapCertificate>,
    /// Pairs whose images meet in a single point.
    pub point_contacts: Vec<(usize, usize, FieldElement)>,
}

impl OverlapReport {
    /// The certified intersections f_i(hull) ∩ f_j(hull).
    pub fn regions(&self) -> Vec<Interval> {
        self.certificates.iter().map(|c| c.intersection.clone()).collect()
    }
}

pub fn detect_exact_overlaps(ifs: &Ifs, depth: usize) -> Result<OverlapReport, IfsError> {
    let mut rep = OverlapReport::default();
    for (i, j, iv) in ifs.intersecting_pairs() {
        if iv.is_point() {
            rep.point_contacts.push((i, j, iv.lo.clone()));
            continue;
        }
        let dec = certify_pair(ifs, i, j, &iv, depth)?;
        rep.certificates.push(ExactOverlapCertificate { pair: (i, j), intersection: iv, decompositions: dec });
    }
    Ok(rep)
}

struct Cyl {
    word: Vec<usize>,
    map: AffineMap,
    image: Interval,
    expanded: bool,
}

fn certify_pair(ifs: &Ifs, i: usize, j: usize, target: &Interval, depth: usize) -> Result<Vec<(Vec<usize>, Vec<usize>)>, IfsError> {
    let start = |k: usize| {
        let map = ifs.maps[k].clone();
        let image = map.image(&ifs.hull);
        vec![Cyl { word: vec![k], map, image, expanded: false }]
    };
    let mut side = [start(i), start(j)];
    loop {
        // inside cylinders keyed by their map
        let mut keyed: [HashMap<AffineMap, usize>; 2] = [HashMap::new(), HashMap::new()];
        for s in 0..2 {
            for (n, c) in side[s].iter().enumerate() {
                if target.contains_interval(&c.image) {
                    keyed[s].entry(c.map.clone()).or_insert(n);
                }
            }
        }
        let mut matched: Vec<(usize, usize)> = keyed[0]
            .iter()
            .filter_map(|(m, &a)| keyed[1].get(m).map(|&b| (a, b)))
            .collect();
        matched.sort_by(|x, y| ord(&side[0][x.0].image.lo, &side[0][y.0].image.lo).then(side[0][x.0].word.cmp(&side[0][y.0].word)));
        let ivs: Vec<Interval> = matched.iter().map(|&(a, _)| side[0][a].image.clone()).collect();
        if tiles(target, &ivs) {
            return Ok(matched
                .into_iter()
                .map(|(a, b)| (side[0][a].word.clone(), side[1][b].word.clone()))
                .collect());
        }
        let matched_maps: HashSet<AffineMap> = matched.iter().map(|&(a, _)| side[0][a].map.clone()).collect();
        let mut expanded = false;
        for s in 0..2 {
            let mut next = vec![];
            for mut c in side[s].drain(..) {
                if c.expanded || matched_maps.contains(&c.map) || c.word.len() >= depth {
                    next.push(c);
                    continue;
                }
                expanded = true;
                for k in 0..ifs.len() {
                    let map = c.map.compose(&ifs.maps[k]);
                    let image = map.image(&ifs.hull);
                    if image.overlaps(target) {
                        let mut word = c.word.clone();
                        word.push(k);
                        next.push(Cyl { word, map, image, expanded: false });
                    }
                }
                // an inside cylinder may still be matched by a deeper word on the other side
                if target.contains_interval(&c.image) {
                    c.expanded = true;
                    next.push(c);
                }
            }
            if next.len() > WORD_GUARD {
                return Err(IfsError::ExplosionGuard(WORD_GUARD));
            }
            side[s] = next;
        }
        if !expanded {
            return Err(IfsError::UnresolvedOverlap(i, j, depth));
        }
    }
}

/// Whether the union of `ivs` (sorted by left endpoint) is exactly `target`.
fn tiles(target: &Interval, ivs: &[Interval]) -> bool {
    let Some(first) = ivs.first() else { return false };
    if first.lo != target.lo {
        return false;
    }
    let mut reach = first.hi.clone();
    for iv in &ivs[1..] {
        if ord(&iv.lo, &reach) == Ordering::Greater {
            return false;
        }
        if ord(&iv.hi, &reach) == Ordering::Greater {
            reach = iv.hi.clone();
        }
    }
    reach == target.hi
}

/// One lazy expanding step: the smallest index k whose image contains the
/// partition interval adjacent to x (the one to the right of x, or to the
/// left when x is the last point or the right interval is not admissible).
pub fn lazy_step(ifs: &Ifs, points: &[FieldElement], x: &FieldElement) -> Result<(usize, FieldElement), IfsError> {
    let pos = points.iter().position(|p| p == x);
    let mut candidates = vec![];
    match pos {
        Some(p) => {
            if p + 1 < points.len() {
                candidates.push(Interval::new(x.clone(), points[p + 1].clone()));
            }
            if p > 0 {
                candidates.push(Interval::new(points[p - 1].clone(), x.clone()));
            }
        }
        None => {
            let p = points.iter().position(|q| ord(q, x) == Ordering::Greater);
            if let Some(p) = p.filter(|&p| p > 0) {
                candidates.push(Interval::new(points[p - 1].clone(), points[p].clone()));
            }
        }
    }
    for iv in &candidates {
        if let Some(k) = (0..ifs.len()).find(|&k| ifs.image(k).contains_interval(iv)) {
            return Ok((k, ifs.maps[k].apply_inverse(x)));
        }
    }
    // fall back to the point itself
    if let Some(&k) = ifs.maps_containing(x).first() {
        return Ok((k, ifs.maps[k].apply_inverse(x)));
    }
    Err(IfsError::NoAdmissibleMap(x.to_string()))
}

#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub start: FieldElement,
    pub visited: Vec<FieldElement>,
    pub periodic: bool,
    pub steps_to_cycle: usize,
}

/// Closure of {x} under every admissible expanding map T_k (x ∈ f_k(hull)).
pub fn orbit_closure(ifs: &Ifs, x: &FieldElement, max_points: usize) -> Result<(Vec<FieldElement>, usize), IfsError> {
    let mut seen: HashSet<FieldElement> = HashSet::new();
    let mut order = vec![];
    let mut queue = VecDeque::new();
    seen.insert(x.clone());
    order.push(x.clone());
    queue.push_back((x.clone(), 0usize));
    let mut depth = 0;
    while let Some((p, d)) = queue.pop_front() {
        depth = depth.max(d);
        for k in ifs.maps_containing(&p) {
            let y = ifs.maps[k].apply_inverse(&p);
            if seen.insert(y.clone()) {
                if seen.len() > max_points {
                    return Err(IfsError::OrbitNotPeriodic(x.to_string(), max_points));
                }
                order.push(y.clone());
                queue.push_back((y, d + 1));
            }
        }
    }
    Ok((order, depth))
}

/// Breakpoints b_1 < … < b_{s+1}: every orbit of the 2m endpoints together
/// with the endpoints themselves and the hull.
pub fn endpoint_orbits(ifs: &Ifs, max_steps: usize) -> Result<(Vec<FieldElement>, Vec<OrbitRecord>), IfsError> {
    let mut all: Vec<FieldElement> = vec![ifs.hull.lo.clone(), ifs.hull.hi.clone()];
    let mut records = vec![];
    let mut starts = ifs.endpoints();
    sort_dedup(&mut starts);
    for e in starts {
        let (visited, depth) = orbit_closure(ifs, &e, max_steps)?;
        all.extend(visited.iter().cloned());
        all.push(e.clone());
        records.push(OrbitRecord { start: e, visited, periodic: true, steps_to_cycle: depth });
    }
    sort_dedup(&mut all);
    Ok((all, records))
}

/// Set form used in tests.
pub fn as_set(v: &[FieldElement]) -> BTreeSet<String> {
    v.iter().map(|x| x.to_string()).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exactnum::{rat, Rational};

    pub fn rational_ifs(maps: &[(Rational, Rational)]) -> Ifs {
        let f = NumberField::rational();
        let ms = maps
            .iter()
            .map(|(r, a)| AffineMap::new(FieldElement::from_rational(&f, r.clone()), FieldElement::from_rational(&f, a.clone())))
            .collect();
        let labels = (1..=maps.len()).map(|i| i.to_string()).collect();
        Ifs::new(f, ms, labels).unwrap()
    }

    fn ex27() -> Ifs {
        rational_ifs(&[(rat(1, 3), rat(0, 1)), (rat(1, 9), rat(8, 27)), (rat(1, 3), rat(2, 3))])
    }

    fn q(n: i64, d: i64, f: &Arc<NumberField>) -> FieldElement {
        FieldElement::from_rational(f, rat(n, d))
    }

    #[test]
    fn hull_of_example() {
        let ifs = ex27();
        assert_eq!(ifs.hull, Interval::new(q(0, 1, &ifs.field), q(1, 1, &ifs.field)));
        assert_eq!(ifs.image(0).hi, q(1, 3, &ifs.field));
    }

    #[test]
    fn single_map_rejected() {
        let f = NumberField::rational();
        let m = AffineMap::new(q(1, 2, &f), q(0, 1, &f));
        assert_eq!(Ifs::new(f, vec![m], vec!["1".into()]).unwrap_err(), IfsError::EmptySpec);
    }

    #[test]
    fn non_contraction_and_negative_rejected() {
        let f = NumberField::rational();
        let a = AffineMap::new(q(1, 1, &f), q(0, 1, &f));
        let b = AffineMap::new(q(1, 2, &f), q(0, 1, &f));
        assert_eq!(Ifs::new(f.clone(), vec![b.clone(), a], vec!["1".into(), "2".into()]).unwrap_err(), IfsError::NotContraction(1));
        let c = AffineMap::new(q(-1, 2, &f), q(1, 1, &f));
        assert_eq!(Ifs::new(f, vec![b, c], vec!["1".into(), "2".into()]).unwrap_err(), IfsError::NotSupported(1));
    }

    #[test]
    fn overlap_certificate_example() {
        let ifs = ex27();
        let rep = detect_exact_overlaps(&ifs, 4).unwrap();
        assert_eq!(rep.certificates.len(), 1);
        let c = &rep.certificates[0];
        assert_eq!(c.pair, (0, 1));
        let words: Vec<(String, String)> = c.decompositions.iter().map(|(w, v)| (ifs.word_label(w), ifs.word_label(v))).collect();
        assert_eq!(words, vec![("133".to_string(), "21".to_string())]);
        let r = c.refined(3);
        let words: Vec<(String, String)> = r.decompositions.iter().map(|(w, v)| (ifs.word_label(w), ifs.word_label(v))).collect();
        assert_eq!(words[0], ("1331".to_string(), "211".to_string()));
        assert_eq!(words[2], ("1333".to_string(), "213".to_string()));
        for (w, v) in &r.decompositions {
            assert_eq!(ifs.word_map(w), ifs.word_map(v));
        }
    }

    #[test]
    fn cantor_has_no_overlaps() {
        let ifs = rational_ifs(&[(rat(1, 3), rat(0, 1)), (rat(1, 3), rat(2, 3))]);
        let rep = detect_exact_overlaps(&ifs, 5).unwrap();
        assert!(rep.certificates.is_empty() && rep.point_contacts.is_empty());
        let (b, _) = endpoint_orbits(&ifs, 100).unwrap();
        assert_eq!(as_set(&b), ["0", "1", "1/3", "2/3"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn generic_overlap_unresolved() {
        let ifs = rational_ifs(&[(rat(2, 3), rat(0, 1)), (rat(2, 3), rat(1, 3))]);
        assert!(matches!(detect_exact_overlaps(&ifs, 3), Err(IfsError::UnresolvedOverlap(0, 1, 3))));
    }

    #[test]
    fn lazy_steps_of_example() {
        let ifs = ex27();
        let (pts, _) = endpoint_orbits(&ifs, 100).unwrap();
        let f = &ifs.field;
        assert_eq!(lazy_step(&ifs, &pts, &q(8, 27, f)).unwrap(), (0, q(8, 9, f)));
        assert_eq!(lazy_step(&ifs, &pts, &q(1, 3, f)).unwrap(), (1, q(1, 3, f)));
        assert_eq!(lazy_step(&ifs, &pts, &q(0, 1, f)).unwrap(), (0, q(0, 1, f)));
    }

    #[test]
    fn breakpoints_of_example() {
        let ifs = ex27();
        let (pts, recs) = endpoint_orbits(&ifs, 100).unwrap();
        let want: BTreeSet<String> = ["0", "8/27", "1/3", "11/27", "2/3", "8/9", "1"].iter().map(|s| s.to_string()).collect();
        assert_eq!(as_set(&pts), want);
        let r = recs.iter().find(|r| r.start == q(8, 27, &ifs.field)).unwrap();
        let want: BTreeSet<String> = ["0", "8/27", "2/3", "8/9"].iter().map(|s| s.to_string()).collect();
        assert_eq!(as_set(&r.visited), want);
        let r = recs.iter().find(|r| r.start == q(1, 3, &ifs.field)).unwrap();
        assert!(as_set(&r.visited).is_subset(&["0", "1/3", "1"].iter().map(|s| s.to_string()).collect()));
    }

    #[test]
    fn inverse_round_trip() {
        let ifs = ex27();
        for m in &ifs.maps {
            for k in 0..20 {
                let x = q(k * 7 - 30, 13, &ifs.field);
                assert_eq!(m.apply_inverse(&m.apply(&x)), x);
                assert_eq!(m.inverse().inverse(), *m);
            }
        }
    }

    #[test]
    fn json_spec() {
        let text = r#"{"field":"rational","maps":[{"ratio":"1/3","offset":"0"},{"ratio":["1/9"],"offset":["8/27"]},{"ratio":"1/3","offset":"2/3"}]}"#;
        let ifs = load_ifs_json(text).unwrap();
        assert_eq!(ifs.len(), 3);
        let text = r#"{"min_poly":[-1,-4,1],"root_hint":["4","5"],"maps":[{"ratio":["-4","1"],"offset":"0"},{"ratio":["-4","1"],"offset":["-4","1"]}]}"#;
        let ifs = load_ifs_json(text).unwrap();
        assert_eq!(ifs.field.degree(), 2);
    }
}
