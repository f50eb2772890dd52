use num_traits::{One, Zero};

use super::poly::Poly;
use super::{rint, NumError, Rational};

pub type RatMatrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

fn check_square(m: &RatMatrix) -> Result<usize, NumError> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(NumError::NotSquare);
    }
    Ok(n)
}

fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let mut c = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    c[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    c
}

/// det(xI − m), exact, by the Faddeev–LeVerrier recurrence.
pub fn char_poly(m: &RatMatrix) -> Result<Poly, NumError> {
    let n = check_square(m)?;
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let mut mk = identity(n);
    for k in 1..=n {
        let am = mat_mul(m, &mk);
        let tr: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        let ck = -tr / rint(k as i64);
        c[n - k] = ck.clone();
        mk = am;
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &ck;
        }
    }
    Ok(Poly::new(c))
}

/// Determinant by Gaussian elimination over Q.
pub fn det(m: &RatMatrix) -> Result<Rational, NumError> {
    let n = check_square(m)?;
    let mut a = m.clone();
    let mut d = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        let piv = a[col][col].clone();
        d *= &piv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &piv;
            for j in col..n {
                let v = &f * &a[col][j];
                a[r][j] -= v;
            }
        }
    }
    Ok(d)
}
