//! β-expansions with digits {0, 1}: greedy and quasi-greedy expansions of 1,
//! the finite-type classification of the univoque shift, and dim U_β.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::dimension::{shift_dimension, DimError, SpectralResult};
use crate::exactnum::{rint, FieldElement, NumError, NumberField, Poly, Rational};
use crate::ifs_core::{ord, sort_dedup, AffineMap, Ifs, IfsError, Interval};
use crate::markov::{adjacency, build_partition, prune_switch, AdjacencyMatrix, MapChoice, MarkovError, MarkovPartition, SwitchPruned};
use crate::words::Word;

pub const DEFAULT_BOUND: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BetaError {
    #[error("β must lie strictly between 1 and 2")]
    OutOfRange,
    #[error("β does not exceed the golden mean; U_β = {{0, 1/(β-1)}}")]
    BetaTooSmall,
    #[error("point outside [0, 1/(β-1)]")]
    OutOfDomain,
    #[error("greedy orbit not eventually periodic within {0} steps")]
    OrbitNotEventuallyPeriodic(usize),
    #[error("quasi-greedy expansion of 1 unresolved within {0} steps")]
    QuasiGreedyUnresolved(usize),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Dim(#[from] DimError),
}

/// T_0(x) = βx, T_1(x) = βx − 1 on [0, 1/(β−1)], viewed as the IFS
/// {x/β, (x+1)/β}.
#[derive(Clone, Debug)]
pub struct BetaSystem {
    pub field: Arc<NumberField>,
    pub beta: FieldElement,
    pub ifs: Ifs,
    pub switch: Interval,
    pub domain: Interval,
}

impl BetaSystem {
    /// β is the root of `min_poly` in (1, 2).
    pub fn new(min_poly: &Poly) -> Result<Self, BetaError> {
        Self::with_hint(min_poly, (&rint(1), &rint(2)))
    }

    pub fn with_hint(min_poly: &Poly, hint: (&Rational, &Rational)) -> Result<Self, BetaError> {
        let field = NumberField::new(min_poly, hint)?;
        let beta = FieldElement::generator(&field);
        let one = FieldElement::one(&field);
        let two = FieldElement::from_int(&field, 2);
        if ord(&beta, &one) != Ordering::Greater || ord(&beta, &two) != Ordering::Less {
            return Err(BetaError::OutOfRange);
        }
        let inv = beta.inverse()?;
        let zero = FieldElement::zero(&field);
        let maps = vec![AffineMap::new(inv.clone(), zero.clone()), AffineMap::new(inv.clone(), inv.clone())];
        let ifs = Ifs::new(field.clone(), maps, vec!["0".into(), "1".into()])?;
        let top = (&beta - &one).inverse()?;
        let switch = Interval::new(inv.clone(), &inv * &top);
        let domain = Interval::new(zero, top);
        Ok(BetaSystem { field, beta, ifs, switch, domain })
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta.to_f64()
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::one(&self.field)
    }

    /// 1/(β−1).
    pub fn top(&self) -> FieldElement {
        self.domain.hi.clone()
    }

    /// Reflection 1̄ = 1/(β−1) − 1 = (2−β)/(β−1).
    pub fn one_bar(&self) -> FieldElement {
        &self.top() - &self.one()
    }

    /// β > golden mean, decided exactly by β² − β − 1 > 0.
    pub fn above_golden(&self) -> bool {
        let b = &self.beta;
        (&(&(b * b) - b) - &self.one()).sign() == Ok(1)
    }

    /// One greedy step: digit 1 iff x ≥ 1/β.
    pub fn greedy_map(&self, x: &FieldElement) -> (u8, FieldElement) {
        let bx = &self.beta * x;
        if ord(x, &self.switch.lo) != Ordering::Less {
            (1, &bx - &self.one())
        } else {
            (0, bx)
        }
    }

    /// Σ d_k β^{-k} for an eventually periodic word.
    pub fn word_value(&self, w: &Word) -> FieldElement {
        let inv = self.beta.inverse().expect("β ≠ 0");
        let mut acc = FieldElement::zero(&self.field);
        let mut p = inv.clone();
        for &d in &w.pre {
            if d != 0 {
                acc = &acc + &p.scale(&rint(d as i64));
            }
            p = &p * &inv;
        }
        // p = β^{-(|u|+1)}
        let mut per = FieldElement::zero(&self.field);
        let mut q = FieldElement::one(&self.field);
        for &d in &w.period {
            if d != 0 {
                per = &per + &q.scale(&rint(d as i64));
            }
            q = &q * &inv;
        }
        // q = β^{-|v|}
        let denom = &self.one() - &q;
        &acc + &(&p * &per.try_div(&denom).expect("nonzero"))
    }
}

/// Greedy orbit x, G(x), … with exact cycle detection.
#[derive(Clone, Debug)]
pub struct GreedyOrbit {
    pub digits: Vec<u8>,
    /// values[i] = G^i(x); one more entry than `digits`.
    pub values: Vec<FieldElement>,
    /// (first index of the cycle, cycle length) when the orbit repeats.
    pub cycle: Option<(usize, usize)>,
}

impl GreedyOrbit {
    /// Finite expansion: the orbit reaches 0.
    pub fn is_finite(&self) -> bool {
        self.values.last().is_some_and(|v| v.is_zero()) && self.cycle.is_some_and(|(s, l)| l == 1 && self.values[s].is_zero())
    }

    pub fn word(&self) -> Option<Word> {
        let (s, l) = self.cycle?;
        Some(Word::new(self.digits[..s].to_vec(), self.digits[s..s + l].to_vec()))
    }
}

pub fn greedy_orbit(sys: &BetaSystem, x: &FieldElement, bound: usize) -> Result<GreedyOrbit, BetaError> {
    if !sys.domain.contains(x) {
        return Err(BetaError::OutOfDomain);
    }
    let mut seen: HashMap<FieldElement, usize> = HashMap::new();
    let mut digits = vec![];
    let mut values = vec![x.clone()];
    seen.insert(x.clone(), 0);
    for _ in 0..bound {
        let (d, y) = sys.greedy_map(values.last().unwrap());
        digits.push(d);
        if let Some(&i) = seen.get(&y) {
            values.push(y);
            let len = values.len() - 1 - i;
            return Ok(GreedyOrbit { digits, values, cycle: Some((i, len)) });
        }
        seen.insert(y.clone(), values.len());
        values.push(y);
    }
    Ok(GreedyOrbit { digits, values, cycle: None })
}

/// First n greedy digits of x with the orbit values.
pub fn greedy_expansion(x: &FieldElement, sys: &BetaSystem, n: usize) -> Result<(Vec<u8>, Vec<FieldElement>), BetaError> {
    if !sys.domain.contains(x) {
        return Err(BetaError::OutOfDomain);
    }
    let mut digits = vec![];
    let mut values = vec![x.clone()];
    for _ in 0..n {
        let (d, y) = sys.greedy_map(values.last().unwrap());
        digits.push(d);
        values.push(y);
    }
    Ok((digits, values))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyOutcome {
    /// a_1 … a_n 0^∞ with a_n = 1.
    Finite(Vec<u8>),
    EventuallyPeriodic(Word),
    Unresolved(usize),
}

#[derive(Clone, Debug)]
pub struct ExpansionOfOne {
    pub greedy: GreedyOutcome,
    pub greedy_orbit: GreedyOrbit,
    pub quasi_greedy: Option<Word>,
    /// Q^i(1) for i = 0, 1, …: the full orbit when resolved, else the greedy prefix.
    pub orbit_values: Vec<FieldElement>,
}

pub fn quasi_greedy_one(sys: &BetaSystem, bound: usize) -> Result<ExpansionOfOne, BetaError> {
    let orbit = greedy_orbit(sys, &sys.one(), bound)?;
    let Some(w) = orbit.word() else {
        return Ok(ExpansionOfOne {
            greedy: GreedyOutcome::Unresolved(bound),
            orbit_values: orbit.values.clone(),
            greedy_orbit: orbit,
            quasi_greedy: None,
        });
    };
    if w.ends_in_zeros() {
        let mut a = w.pre.clone();
        let n = a.len();
        let greedy = GreedyOutcome::Finite(a.clone());
        a[n - 1] = 0;
        let eta = Word::periodic(a);
        let len = eta.pre.len() + eta.period.len();
        let values = (0..len).map(|i| sys.word_value(&eta.shift(i))).collect();
        return Ok(ExpansionOfOne { greedy, greedy_orbit: orbit, quasi_greedy: Some(eta), orbit_values: values });
    }
    let (s, l) = orbit.cycle.unwrap();
    let values = orbit.values[..s + l].to_vec();
    Ok(ExpansionOfOne { greedy: GreedyOutcome::EventuallyPeriodic(w.clone()), greedy_orbit: orbit, quasi_greedy: Some(w), orbit_values: values })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "step", rename_all = "snake_case")]
pub enum SftClassification {
    SftInteriorHit(usize),
    SftRightEndpointHit(usize),
    NotSftLeftEndpointHit(usize),
    NotSftNeverHits,
    Unresolved(usize),
}

impl SftClassification {
    pub fn label(&self) -> &'static str {
        match self {
            SftClassification::SftInteriorHit(_) => "sft_interior_hit",
            SftClassification::SftRightEndpointHit(_) => "sft_right_endpoint",
            SftClassification::NotSftLeftEndpointHit(_) => "not_sft_left_endpoint",
            SftClassification::NotSftNeverHits => "not_sft_never_hits",
            SftClassification::Unresolved(_) => "unresolved",
        }
    }

    pub fn is_sft(&self) -> Option<bool> {
        match self {
            SftClassification::SftInteriorHit(_) | SftClassification::SftRightEndpointHit(_) => Some(true),
            SftClassification::NotSftLeftEndpointHit(_) | SftClassification::NotSftNeverHits => Some(false),
            SftClassification::Unresolved(_) => None,
        }
    }
}

fn first_hit(sys: &BetaSystem, values: &[FieldElement]) -> Option<SftClassification> {
    for (k, v) in values.iter().enumerate().skip(1) {
        if !sys.switch.contains(v) {
            continue;
        }
        return Some(if *v == sys.switch.lo {
            SftClassification::NotSftLeftEndpointHit(k)
        } else if *v == sys.switch.hi {
            SftClassification::SftRightEndpointHit(k)
        } else {
            SftClassification::SftInteriorHit(k)
        });
    }
    None
}

/// Classification by the first point of the quasi-greedy orbit of 1 in the
/// closed switch region.
pub fn classify_sft(sys: &BetaSystem, bound: usize) -> Result<SftClassification, BetaError> {
    if !sys.above_golden() {
        return Err(BetaError::BetaTooSmall);
    }
    let e = quasi_greedy_one(sys, bound)?;
    Ok(classify_expansion(sys, &e, bound))
}

fn classify_expansion(sys: &BetaSystem, e: &ExpansionOfOne, bound: usize) -> SftClassification {
    if let Some(c) = first_hit(sys, &e.orbit_values) {
        return c;
    }
    match e.greedy {
        GreedyOutcome::Unresolved(_) => SftClassification::Unresolved(bound),
        _ => SftClassification::NotSftNeverHits,
    }
}

/// Uniqueness test for the coding `w` of its value: at every position k,
/// a_k = 0 forces σ^k w < η and a_k = 1 forces the reflection of σ^k w < η.
pub fn is_unique_coding(w: &Word, sys: &BetaSystem, bound: usize) -> Result<bool, BetaError> {
    let e = quasi_greedy_one(sys, bound)?;
    let eta = e.quasi_greedy.ok_or(BetaError::QuasiGreedyUnresolved(bound))?;
    Ok(unique_against(w, &eta))
}

pub fn unique_against(w: &Word, eta: &Word) -> bool {
    let n = w.pre.len() + w.period.len();
    for k in 1..=n {
        let tail = w.shift(k);
        let t = if w.digit(k - 1) == 0 { tail } else { tail.reflect() };
        if t.lex_cmp(eta) != Ordering::Less {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct BetaDimension {
    pub classification: SftClassification,
    pub expansion: ExpansionOfOne,
    pub points: Vec<FieldElement>,
    pub partition: MarkovPartition,
    pub s: AdjacencyMatrix,
    pub s_prime: SwitchPruned,
    /// S and S′ restricted to blocks inside [0, 1].
    pub s_unit: AdjacencyMatrix,
    pub s_prime_unit: AdjacencyMatrix,
    pub result: SpectralResult,
    /// Dimension from the full-domain S′, a symmetry cross-check.
    pub full_dimension: f64,
    pub notes: Vec<String>,
}

/// dim U_β = log ρ(S′)/log β from the Markov partition generated by the
/// greedy orbits of 1 and 1̄.
pub fn univoque_dimension(sys: &BetaSystem, bound: usize) -> Result<BetaDimension, BetaError> {
    if !sys.above_golden() {
        return Err(BetaError::BetaTooSmall);
    }
    let expansion = quasi_greedy_one(sys, bound)?;
    let classification = classify_expansion(sys, &expansion, bound);
    let mut notes = vec![];
    if matches!(expansion.greedy, GreedyOutcome::Unresolved(_)) {
        return Err(BetaError::OrbitNotEventuallyPeriodic(bound));
    }
    match classification {
        SftClassification::SftRightEndpointHit(_) => {
            notes.push("right endpoint hit: the orbit partition of the excluded-hit case is used for the first hit at 1/(β(β-1))".into());
            if !matches!(expansion.greedy, GreedyOutcome::Finite(_)) {
                notes.push("warning: right endpoint hit with infinite greedy expansion of 1".into());
            }
        }
        SftClassification::SftInteriorHit(_) => {
            notes.push("interior hit: dimension from the interval-system Markov partition with the switch blocks removed".into());
        }
        _ => {}
    }
    let bar = greedy_orbit(sys, &sys.one_bar(), bound)?;
    if bar.cycle.is_none() {
        return Err(BetaError::OrbitNotEventuallyPeriodic(bound));
    }
    let mut points = expansion.greedy_orbit.values.clone();
    points.extend(bar.values.iter().cloned());
    points.extend([
        FieldElement::zero(&sys.field),
        sys.switch.lo.clone(),
        sys.switch.hi.clone(),
        sys.one(),
        sys.top(),
    ]);
    sort_dedup(&mut points);
    let partition = build_partition(&sys.ifs, &points, std::slice::from_ref(&sys.switch), MapChoice::Greedy)?;
    let s = adjacency(&partition);
    let s_prime = prune_switch(&partition.switch_blocks, &s)?;
    let one = sys.one();
    let unit: Vec<usize> = (0..partition.len()).filter(|&i| ord(&partition.blocks[i].hi, &one) != Ordering::Greater).collect();
    let s_unit = s.principal(&unit);
    let unit_prime: Vec<usize> = unit.iter().copied().filter(|i| !partition.switch_blocks.contains(i)).collect();
    let s_prime_unit = s.principal(&unit_prime);
    let b = sys.beta_f64();
    let mut result = shift_dimension(&s_prime_unit, b)?;
    let full = shift_dimension(&s_prime.principal, b)?;
    if (full.dimension - result.dimension).abs() > 1e-9 {
        notes.push(format!("full-domain S′ gives {} against {} on [0,1]", full.dimension, result.dimension));
    }
    if let Some(p) = &result.char_poly {
        result.exact_form = Some(format!("log r / log β, r = largest root of {}, β = root of {}", p, sys.field.min_poly()));
    }
    // the endpoints of the switch region stay coded after deletion
    let left = (0..partition.len()).find(|&i| partition.blocks[i].hi == sys.switch.lo);
    let right = (0..partition.len()).find(|&i| partition.blocks[i].lo == sys.switch.hi);
    for b in [left, right].into_iter().flatten() {
        if !s_prime.core_index.contains(&b) {
            notes.push(format!("block {} next to the switch region lost its outgoing paths", partition.names[b]));
        }
    }
    Ok(BetaDimension {
        classification,
        expansion,
        points,
        partition,
        s,
        s_prime,
        s_unit,
        s_prime_unit,
        result,
        full_dimension: full.dimension,
        notes,
    })
}

/// Pairs (x_k, y_k) where x_k follows the quasi-greedy digits of 1 and y_k
/// follows the reflected digits from 1̄, for k = 0..=n.
pub fn reflection_pairs(sys: &BetaSystem, n: usize, bound: usize) -> Result<Vec<(FieldElement, FieldElement)>, BetaError> {
    let e = quasi_greedy_one(sys, bound)?;
    let w = e.quasi_greedy.ok_or(BetaError::QuasiGreedyUnresolved(bound))?;
    let one = sys.one();
    let mut x = one.clone();
    let mut y = sys.one_bar();
    let mut out = vec![(x.clone(), y.clone())];
    for k in 0..n {
        let d = FieldElement::from_int(&sys.field, w.digit(k) as i64);
        x = &(&sys.beta * &x) - &d;
        y = &(&(&sys.beta * &y) - &one) + &d;
        out.push((x.clone(), y.clone()));
    }
    Ok(out)
}

/// Multinacci polynomial x^n − x^{n−1} − … − 1.
pub fn multinacci(n: usize) -> Poly {
    let mut c = vec![rint(-1); n];
    c.push(rint(1));
    Poly::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trib() -> BetaSystem {
        BetaSystem::new(&multinacci(3)).unwrap()
    }

    #[test]
    fn tribonacci_expansion() {
        let sys = trib();
        let e = quasi_greedy_one(&sys, 100).unwrap();
        assert_eq!(e.greedy, GreedyOutcome::Finite(vec![1, 1, 1]));
        assert_eq!(e.quasi_greedy.as_ref().unwrap().to_string(), "(110)");
        let b = &sys.beta;
        assert_eq!(e.greedy_orbit.values[1], b - &sys.one());
        assert_eq!(e.greedy_orbit.values[2], b.inverse().unwrap());
        assert!(e.greedy_orbit.values[3].is_zero());
        assert_eq!(classify_sft(&sys, 100).unwrap(), SftClassification::NotSftLeftEndpointHit(2));
    }

    #[test]
    fn golden_mean_rejected() {
        let sys = BetaSystem::new(&multinacci(2)).unwrap();
        let e = quasi_greedy_one(&sys, 100).unwrap();
        assert_eq!(e.greedy, GreedyOutcome::Finite(vec![1, 1]));
        assert_eq!(e.quasi_greedy.unwrap().to_string(), "(10)");
        assert_eq!(classify_sft(&sys, 100).unwrap_err(), BetaError::BetaTooSmall);
    }

    #[test]
    fn zero_is_unique() {
        let sys = trib();
        assert!(is_unique_coding(&Word::parse("(0)").unwrap(), &sys, 100).unwrap());
    }

    #[test]
    fn word_values() {
        let sys = trib();
        assert_eq!(sys.word_value(&Word::parse("(110)").unwrap()), sys.one());
        assert_eq!(sys.word_value(&Word::parse("(1)").unwrap()), sys.top());
        let x = sys.word_value(&Word::parse("01(10)").unwrap());
        let (d, _) = greedy_expansion(&x, &sys, 6).unwrap();
        assert_eq!(d[..2], [0, 1]);
    }

    #[test]
    fn out_of_domain() {
        let sys = trib();
        let x = FieldElement::from_int(&sys.field, 5);
        assert_eq!(greedy_expansion(&x, &sys, 3).unwrap_err(), BetaError::OutOfDomain);
    }
}
