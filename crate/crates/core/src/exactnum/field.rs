use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{IsolatedRoot, Poly};
use super::{format_rational, rat_to_f64, rint, NumError, Rational};

/// Sign refinement steps tried before the exact zero certificate.
const REFINE_CAP: usize = 256;

/// Q(β) for a real root β of an irreducible polynomial, with β pinned down by
/// a rational isolating interval.
#[derive(Clone, Debug)]
pub struct NumberField {
    min_poly: Poly,
    root: IsolatedRoot,
}

impl NumberField {
    /// Builds the field generated by the unique root of `min_poly` in the open
    /// interval `hint`.
    pub fn new(min_poly: &Poly, hint: (&Rational, &Rational)) -> Result<Arc<Self>, NumError> {
        let p = min_poly.monic();
        if p.degree().unwrap_or(0) == 0 {
            return Err(NumError::NoRootInHint);
        }
        if !p.is_squarefree() {
            return Err(NumError::NotSquarefree);
        }
        let (mut lo, mut hi) = (hint.0.clone(), hint.1.clone());
        if lo > hi {
            std::mem::swap(&mut lo, &mut hi);
        }
        // a root sitting on the hint boundary is accepted only if it is the only one
        let on_lo = p.eval(&lo).is_zero();
        let on_hi = p.eval(&hi).is_zero();
        if on_lo || on_hi {
            let inner = inner_count(&p, &lo, &hi);
            let total = inner + on_lo as usize + on_hi as usize;
            if total > 1 {
                return Err(NumError::MultipleRootsInHint(total));
            }
            let r = if on_lo { lo } else { hi };
            let root = IsolatedRoot::from_parts(p.clone(), r.clone(), r);
            return Ok(Arc::new(NumberField { min_poly: p, root }));
        }
        let n = p.sturm_count(&lo, &hi)?;
        match n {
            0 => return Err(NumError::NoRootInHint),
            1 => {}
            k => return Err(NumError::MultipleRootsInHint(k)),
        }
        let mut root = IsolatedRoot::from_parts(p.clone(), lo, hi);
        let tol = Rational::new(BigInt::one(), BigInt::one() << 64);
        root.refine(&tol);
        Ok(Arc::new(NumberField { min_poly: p, root }))
    }

    /// The degree-one field Q (generator 1).
    pub fn rational() -> Arc<Self> {
        let p = Poly::from_ints(&[-1, 1]);
        let root = IsolatedRoot::from_parts(p.clone(), rint(1), rint(1));
        Arc::new(NumberField { min_poly: p, root })
    }

    pub fn min_poly(&self) -> &Poly {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.min_poly.degree().unwrap_or(1)
    }

    pub fn is_rational(&self) -> bool {
        self.degree() == 1
    }

    /// Current isolating interval of the generator.
    pub fn generator_interval(&self) -> (&Rational, &Rational) {
        (&self.root.lo, &self.root.hi)
    }

    pub fn generator_f64(&self) -> f64 {
        self.root.value
    }

    pub fn same(&self, other: &NumberField) -> bool {
        std::ptr::eq(self, other) || (self.min_poly == other.min_poly && self.root.lo <= other.root.hi && other.root.lo <= self.root.hi)
    }

    fn reduce(&self, p: &Poly) -> Vec<Rational> {
        let r = p.rem(&self.min_poly);
        let mut c = r.coeffs().to_vec();
        c.resize(self.degree(), Rational::zero());
        c
    }
}

fn inner_count(p: &Poly, lo: &Rational, hi: &Rational) -> usize {
    let mut q = p.clone();
    for r in [lo, hi] {
        if q.eval(r).is_zero() {
            q = q.div_rem(&Poly::new(vec![-r.clone(), Rational::one()])).0;
        }
    }
    q.sturm_count(lo, hi).unwrap_or(0)
}

/// Element of a [`NumberField`], stored as a polynomial in β of degree below
/// the field degree.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coeffs: Vec<Rational>,
}

impl FieldElement {
    pub fn from_poly(field: &Arc<NumberField>, p: &Poly) -> Self {
        FieldElement { field: field.clone(), coeffs: field.reduce(p) }
    }

    pub fn from_coeffs(field: &Arc<NumberField>, c: Vec<Rational>) -> Self {
        Self::from_poly(field, &Poly::new(c))
    }

    pub fn from_rational(field: &Arc<NumberField>, r: Rational) -> Self {
        Self::from_poly(field, &Poly::constant(r))
    }

    pub fn from_int(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, rint(n))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_int(field, 1)
    }

    /// The generator β.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, &Poly::x())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn as_poly(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check(&self, o: &FieldElement) -> Result<(), NumError> {
        if self.field.same(&o.field) {
            Ok(())
        } else {
            Err(NumError::FieldMismatch)
        }
    }

    pub fn try_add(&self, o: &FieldElement) -> Result<FieldElement, NumError> {
        self.check(o)?;
        let c = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Ok(FieldElement { field: self.field.clone(), coeffs: c })
    }

    pub fn try_sub(&self, o: &FieldElement) -> Result<FieldElement, NumError> {
        self.check(o)?;
        let c = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        Ok(FieldElement { field: self.field.clone(), coeffs: c })
    }

    pub fn try_mul(&self, o: &FieldElement) -> Result<FieldElement, NumError> {
        self.check(o)?;
        if self.field.is_rational() {
            return Ok(FieldElement { field: self.field.clone(), coeffs: vec![&self.coeffs[0] * &o.coeffs[0]] });
        }
        let p = &self.as_poly() * &o.as_poly();
        Ok(FieldElement::from_poly(&self.field, &p))
    }

    pub fn scale(&self, r: &Rational) -> FieldElement {
        FieldElement { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn inverse(&self) -> Result<FieldElement, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        if self.field.is_rational() {
            return Ok(FieldElement { field: self.field.clone(), coeffs: vec![Rational::one() / &self.coeffs[0]] });
        }
        let (g, s, _) = self.as_poly().ext_gcd(&self.field.min_poly);
        if g.degree() != Some(0) {
            return Err(NumError::ReducibleMinPoly(g.to_string()));
        }
        Ok(FieldElement::from_poly(&self.field, &s))
    }

    pub fn try_div(&self, o: &FieldElement) -> Result<FieldElement, NumError> {
        self.try_mul(&o.inverse()?)
    }

    pub fn pow(&self, k: i64) -> Result<FieldElement, NumError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = FieldElement::one(&self.field);
        for _ in 0..k.unsigned_abs() {
            acc = acc.try_mul(&base)?;
        }
        Ok(acc)
    }

    /// Exact sign: -1, 0 or 1.
    pub fn sign(&self) -> Result<i8, NumError> {
        if self.is_zero() {
            return Ok(0);
        }
        if self.field.is_rational() {
            return Ok(if self.coeffs[0].is_positive() { 1 } else { -1 });
        }
        let p = self.as_poly();
        let mut r = self.field.root.clone();
        for _ in 0..REFINE_CAP {
            let (a, b) = p.eval_interval(&r.lo, &r.hi);
            if a.is_positive() {
                return Ok(1);
            }
            if b.is_negative() {
                return Ok(-1);
            }
            if r.lo == r.hi {
                break;
            }
            let w = r.width() / rint(2);
            r.refine(&w);
        }
        // certify: a nonzero element can only vanish at β through a common factor
        let s = r.sign_of(&p);
        if s == 0 {
            return Err(NumError::ReducibleMinPoly(p.gcd(&self.field.min_poly).to_string()));
        }
        Ok(s)
    }

    pub fn cmp_exact(&self, o: &FieldElement) -> Result<Ordering, NumError> {
        self.check(o)?;
        if self.coeffs == o.coeffs {
            return Ok(Ordering::Equal);
        }
        match self.try_sub(o)?.sign()? {
            1 => Ok(Ordering::Greater),
            -1 => Ok(Ordering::Less),
            _ => Ok(Ordering::Equal),
        }
    }

    pub fn abs(&self) -> Result<FieldElement, NumError> {
        Ok(if self.sign()? < 0 { -self.clone() } else { self.clone() })
    }

    pub fn to_f64(&self) -> f64 {
        if self.field.is_rational() {
            return rat_to_f64(&self.coeffs[0]);
        }
        let r = &self.field.root;
        let mid = (&r.lo + &r.hi) / rint(2);
        rat_to_f64(&self.as_poly().eval(&mid))
    }

    /// Power-basis coefficients as `"p/q"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rational).collect()
    }

    /// Readable form in terms of a named generator.
    pub fn display_in(&self, var: &str) -> String {
        self.as_poly().display_in(var)
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        self.coeffs == o.coeffs && self.field.same(&o.field)
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.coeffs.hash(h);
    }
}

impl PartialOrd for FieldElement {
    /// `None` for elements of different fields.
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.cmp_exact(o).ok()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            f.write_str(&format_rational(&r))
        } else {
            f.write_str(&self.display_in("b"))
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{:.12})", self, self.to_f64())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr for &FieldElement {
            type Output = FieldElement;
            /// Panics when the operands live in different fields.
            fn $m(self, o: &FieldElement) -> FieldElement {
                self.$f(o).expect("field mismatch")
            }
        }
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$f(&o).expect("field mismatch")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { field: self.field, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -self.clone()
    }
}
