use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{format_rational, rat_to_f64, rint, NumError, Rational};

/// Univariate polynomial with rational coefficients, ascending order.
/// The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| rint(v)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    /// The monomial x.
    pub fn x() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        self.scale(&(Rational::one() / l))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }

    /// Interval enclosure of p([lo, hi]) by Horner on intervals.
    pub fn eval_interval(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let mut a = Rational::zero();
        let mut b = Rational::zero();
        for c in self.coeffs.iter().rev() {
            let prods = [&a * lo, &a * hi, &b * lo, &b * hi];
            let mut mn = prods[0].clone();
            let mut mx = prods[0].clone();
            for p in &prods[1..] {
                if *p < mn {
                    mn = p.clone();
                }
                if *p > mx {
                    mx = p.clone();
                }
            }
            a = mn + c;
            b = mx + c;
        }
        (a, b)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rint(k as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut r = self.coeffs.clone();
        let nq = self.coeffs.len().saturating_sub(dd);
        let mut q = vec![Rational::zero(); nq];
        let lead = d.lead();
        while r.len() > dd {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, t) with s·self + t·other = g, g monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = Rational::one() / r0.lead();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(&self.derivative()).degree() == Some(0),
        }
    }

    /// p / gcd(p, p'), monic.
    pub fn squarefree_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// x^n p(1/x), n = deg p.
    pub fn reverse(&self) -> Poly {
        let mut c = self.coeffs.clone();
        c.reverse();
        Poly::new(c)
    }

    /// p(q(x)).
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &Poly::constant(c.clone());
        }
        acc
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Smallest integer-coefficient multiple with positive leading coefficient
    /// and content 1.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for v in &ints {
            g = g.gcd(v);
        }
        if self.lead().is_negative() {
            g = -g;
        }
        for v in ints.iter_mut() {
            *v = &*v / &g;
        }
        ints
    }

    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone()];
        if self.degree().unwrap_or(0) == 0 {
            return seq;
        }
        seq.push(self.derivative());
        loop {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(-r);
        }
        seq
    }

    /// Number of distinct real roots in the open interval (lo, hi).
    pub fn sturm_count(&self, lo: &Rational, hi: &Rational) -> Result<usize, NumError> {
        if self.eval(lo).is_zero() || self.eval(hi).is_zero() {
            return Err(NumError::EndpointIsRoot);
        }
        Ok(Sturm::new(self).count(lo, hi))
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        let s = Sturm::new(self);
        let neg: Vec<i8> = s.seq.iter().map(sign_at_neg_inf).collect();
        let pos: Vec<i8> = s.seq.iter().map(|p| sign_rat(&p.lead())).collect();
        sign_changes(&neg).saturating_sub(sign_changes(&pos))
    }

    /// Strict bound B with every real root in (-B, B).
    pub fn cauchy_bound(&self) -> Rational {
        let l = self.lead().abs();
        let mut m = Rational::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let v = c.abs() / &l;
            if v > m {
                m = v;
            }
        }
        m + rint(1)
    }

    /// Greatest real root isolated to width below `tol`.
    pub fn largest_real_root(&self, tol: &Rational) -> Result<IsolatedRoot, NumError> {
        if self.degree().unwrap_or(0) == 0 {
            return Err(NumError::NoRealRoot);
        }
        let sq = self.squarefree_part();
        let st = Sturm::new(&sq);
        let b = sq.cauchy_bound();
        let mut lo = -b.clone();
        let mut hi = b;
        if st.count(&lo, &hi) == 0 {
            return Err(NumError::NoRealRoot);
        }
        // (lo, hi) contains the largest root and nothing lies at or above hi
        while st.count(&lo, &hi) > 1 {
            let mid = split_point(&sq, &lo, &hi);
            if st.count(&mid, &hi) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut r = IsolatedRoot::from_parts(sq, lo, hi);
        r.refine(tol);
        Ok(r)
    }

    /// All distinct real roots in increasing order, each isolated to `tol`.
    pub fn real_roots(&self, tol: &Rational) -> Vec<IsolatedRoot> {
        if self.degree().unwrap_or(0) == 0 {
            return vec![];
        }
        let sq = self.squarefree_part();
        let st = Sturm::new(&sq);
        let b = sq.cauchy_bound();
        let mut out = vec![];
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            let c = st.count(&lo, &hi);
            if c == 0 {
                continue;
            }
            if c == 1 {
                let mut r = IsolatedRoot::from_parts(sq.clone(), lo, hi);
                r.refine(tol);
                out.push(r);
                continue;
            }
            let mid = split_point(&sq, &lo, &hi);
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        out
    }

    /// Human readable form in x, e.g. `x^3 - 2x - 2`.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let coef = format_rational(&a);
            match k {
                0 => s.push_str(&coef),
                _ => {
                    if !a.is_one() {
                        s.push_str(&coef);
                    }
                    s.push_str(var);
                    if k > 1 {
                        s.push_str(&format!("^{k}"));
                    }
                }
            }
        }
        s
    }
}

/// A rational split point strictly inside (lo, hi) that is not a root.
fn split_point(p: &Poly, lo: &Rational, hi: &Rational) -> Rational {
    let w = hi - lo;
    let mut k = 2i64;
    loop {
        let mid = lo + &w / rint(k);
        if !p.eval(&mid).is_zero() {
            return mid;
        }
        k += 1;
    }
}

struct Sturm {
    seq: Vec<Poly>,
}

impl Sturm {
    fn new(p: &Poly) -> Self {
        Sturm { seq: p.sturm_sequence() }
    }

    fn variations(&self, x: &Rational) -> usize {
        let s: Vec<i8> = self.seq.iter().map(|p| sign_rat(&p.eval(x))).collect();
        sign_changes(&s)
    }

    /// Count of distinct roots in (lo, hi]; equals the open count when hi is not a root.
    fn count(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }
}

fn sign_rat(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

fn sign_at_neg_inf(p: &Poly) -> i8 {
    let s = sign_rat(&p.lead());
    if p.degree().unwrap_or(0) % 2 == 1 {
        -s
    } else {
        s
    }
}

fn sign_changes(s: &[i8]) -> usize {
    let nz: Vec<i8> = s.iter().copied().filter(|&v| v != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            if c.denom().is_one() {
                match i64::try_from(c.numer()) {
                    Ok(v) => seq.serialize_element(&v)?,
                    Err(_) => seq.serialize_element(&c.numer().to_string())?,
                }
            } else {
                seq.serialize_element(&format_rational(c))?;
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v: Vec<serde_json::Value> = Vec::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(super::serde_rat::value_to_rational)
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(Poly::new(coeffs))
    }
}

/// A real root of `poly` isolated in the open interval (lo, hi), or equal to
/// `lo` when `lo == hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsolatedRoot {
    pub poly: Poly,
    pub lo: Rational,
    pub hi: Rational,
    pub value: f64,
}

impl IsolatedRoot {
    /// `poly` must be squarefree with exactly one root in (lo, hi).
    pub fn from_parts(poly: Poly, lo: Rational, hi: Rational) -> Self {
        let value = rat_to_f64(&((&lo + &hi) / rint(2)));
        IsolatedRoot { poly, lo, hi, value }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Bisect by sign until the width is below `tol`.
    pub fn refine(&mut self, tol: &Rational) {
        if self.lo == self.hi {
            return;
        }
        let mut slo = sign_rat(&self.poly.eval(&self.lo));
        while self.width() >= *tol {
            let mid = (&self.lo + &self.hi) / rint(2);
            let sm = sign_rat(&self.poly.eval(&mid));
            if sm == 0 {
                self.lo = mid.clone();
                self.hi = mid;
                break;
            }
            if sm == slo {
                self.lo = mid;
                slo = sm;
            } else {
                self.hi = mid;
            }
        }
        self.value = rat_to_f64(&((&self.lo + &self.hi) / rint(2)));
    }

    /// Sign of q at this root, decided exactly.
    pub fn sign_of(&self, q: &Poly) -> i8 {
        if q.is_zero() {
            return 0;
        }
        let g = q.gcd(&self.poly);
        if g.degree().unwrap_or(0) > 0 {
            let on_root = if self.lo == self.hi {
                g.eval(&self.lo).is_zero()
            } else {
                Sturm::new(&g).count(&self.lo, &self.hi) == 1
            };
            if on_root {
                return 0;
            }
        }
        let mut r = self.clone();
        loop {
            let (a, b) = q.eval_interval(&r.lo, &r.hi);
            if a.is_positive() {
                return 1;
            }
            if b.is_negative() {
                return -1;
            }
            let w = r.width() / rint(2);
            r.refine(&w);
        }
    }
}
