//! Hausdorff dimension of graph-directed constructions: exact Perron roots,
//! the pressure-type function Φ(t) and its root, SCC maximisation.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactnum::{
    char_poly, det, format_rational, identity, rat, rint, FieldElement, IsolatedRoot, NumError, Poly, RatMatrix, Rational,
};
use crate::markov::{scc_decompose, AdjacencyMatrix, SccReport, WeightedGraph};

pub const PHI_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 100_000;
const BRACKET_TOP: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimError {
    #[error("matrix has no positive entry")]
    ZeroMatrix,
    #[error("no component carries an infinite path; Φ(t) = 1 has no solution")]
    NoSolution,
    #[error("dimension of the subset exceeds that of the whole set ({0} > {1})")]
    Inconsistent(f64, f64),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureFlag {
    PositiveFinite,
    Unknown,
}

/// Polynomial in x = λ^{-k t} whose largest root r gives dim = log r / (k log λ⁻¹).
#[derive(Debug, Clone)]
pub struct PowerForm {
    pub poly: Poly,
    pub root: IsolatedRoot,
    /// λ^{-k} as an exact value (`"9"` for λ = 1/3, k = 2).
    pub base: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentDim {
    pub vertices: Vec<usize>,
    pub dimension: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub dimension: f64,
    /// Exact polynomial whose largest root is `perron`.
    pub char_poly: Option<Poly>,
    pub perron: Option<IsolatedRoot>,
    /// log(perron) is divided by log(1/λ) with λ the common ratio base.
    pub lambda: Option<FieldElement>,
    pub exact_form: Option<String>,
    pub power_form: Option<PowerForm>,
    pub measure: MeasureFlag,
    pub components: Vec<ComponentDim>,
    pub phi_residual: f64,
    /// Bisection value, kept as a cross-check of the exact path.
    pub bisection: f64,
    pub warnings: Vec<String>,
}

fn root_json(r: &IsolatedRoot) -> serde_json::Value {
    serde_json::json!({
        "interval": [format_rational(&r.lo), format_rational(&r.hi)],
        "float": r.value,
    })
}

impl Serialize for SpectralResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("dimension", &self.dimension)?;
        m.serialize_entry("char_poly", &self.char_poly)?;
        m.serialize_entry("char_poly_text", &self.char_poly.as_ref().map(|p| p.to_string()))?;
        m.serialize_entry("perron", &self.perron.as_ref().map(root_json))?;
        m.serialize_entry("exact_form", &self.exact_form)?;
        if let Some(pf) = &self.power_form {
            m.serialize_entry(
                "power_form",
                &serde_json::json!({
                    "poly": pf.poly,
                    "poly_text": pf.poly.to_string(),
                    "root": root_json(&pf.root),
                    "base": format_rational(&pf.base),
                }),
            )?;
        }
        m.serialize_entry("measure", &self.measure)?;
        m.serialize_entry("components", &self.components)?;
        m.serialize_entry("phi_residual", &self.phi_residual)?;
        m.serialize_entry("bisection", &self.bisection)?;
        m.serialize_entry("warnings", &self.warnings)?;
        m.end()
    }
}

fn default_tol() -> Rational {
    rat(1, 1_000_000_000_000)
}

/// Largest eigenvalue of a nonnegative matrix, exactly isolated.
pub fn perron_root(s: &AdjacencyMatrix) -> Result<(Poly, IsolatedRoot), DimError> {
    if s.edge_count() == 0 {
        return Err(DimError::ZeroMatrix);
    }
    let p = char_poly(&s.as_rational())?;
    let r = p.largest_real_root(&default_tol())?;
    Ok((p, r))
}

/// Perron root and right eigenvector of an irreducible nonnegative matrix by
/// power iteration on M + I with Collatz–Wielandt stopping.
pub fn perron_vector(m: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = m.len();
    if n == 0 {
        return (0.0, vec![]);
    }
    let mut x = vec![1.0; n];
    let mut rho = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let y: Vec<f64> = (0..n).map(|i| x[i] + (0..n).map(|j| m[i][j] * x[j]).sum::<f64>()).collect();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for i in 0..n {
            let q = y[i] / x[i];
            lo = lo.min(q);
            hi = hi.max(q);
        }
        let norm: f64 = y.iter().sum();
        x = y.iter().map(|v| v / norm).collect();
        rho = 0.5 * (lo + hi) - 1.0;
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    (rho, x)
}

pub fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

fn sub_matrix(m: &[Vec<f64>], keep: &[usize]) -> Vec<Vec<f64>> {
    keep.iter().map(|&u| keep.iter().map(|&v| m[u][v]).collect()).collect()
}

/// Spectral radius of a nonnegative matrix as the maximum over its
/// nontrivial strongly connected components.
pub fn spectral_radius(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let adj = AdjacencyMatrix {
        entries: m.iter().map(|r| r.iter().map(|&v| (v > 0.0) as u8).collect()).collect(),
        labels: Default::default(),
        names: (0..n).map(crate::markov::block_name).collect(),
    };
    let scc = scc_decompose(&adj);
    let mut best: f64 = 0.0;
    for (c, &nt) in scc.components.iter().zip(&scc.nontrivial) {
        if nt {
            best = best.max(perron_vector(&sub_matrix(m, c)).0);
        }
    }
    best
}

/// Φ(t): spectral radius of (w_uv^t).
pub fn phi(g: &WeightedGraph, t: f64) -> f64 {
    spectral_radius(&g.weight_matrix_f64(t))
}

fn solve_component(g: &WeightedGraph, warnings: &mut Vec<String>) -> f64 {
    let f = |t: f64| phi(g, t) - 1.0;
    let f0 = f(0.0);
    if f0.abs() <= 1e-14 {
        return 0.0;
    }
    if f(BRACKET_TOP) > 0.0 {
        warnings.push("Φ(1) > 1; dimension clamped to 1".into());
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, BRACKET_TOP);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    if t > 1.0 {
        warnings.push("solution above 1 clamped".into());
        return 1.0;
    }
    t
}

/// Exponent k with w = λ^k, for integer k in 1..=64.
fn power_of(w: &FieldElement, lambda: &FieldElement) -> Option<u32> {
    let lw = w.to_f64().ln();
    let ll = lambda.to_f64().ln();
    let k = (lw / ll).round();
    if !(1.0..=64.0).contains(&k) {
        return None;
    }
    let k = k as u32;
    (lambda.pow(k as i64).ok()? == *w).then_some(k)
}

/// Common base λ with every weight an integer power of λ; the largest such
/// candidate among weights and their quotients.
fn common_base(g: &WeightedGraph) -> Option<(FieldElement, Vec<u32>)> {
    let mut ws: Vec<FieldElement> = vec![];
    for (_, _, w) in &g.edges {
        if !ws.contains(w) {
            ws.push(w.clone());
        }
    }
    let one = FieldElement::one(ws.first()?.field());
    let mut cands = ws.clone();
    for a in &ws {
        for b in &ws {
            if let Ok(q) = a.try_div(b) {
                if q.cmp_exact(&one).ok()? == std::cmp::Ordering::Less && !cands.contains(&q) {
                    cands.push(q);
                }
            }
        }
    }
    cands.sort_by(|a, b| b.cmp_exact(a).unwrap());
    for lam in cands {
        if lam.sign().ok()? <= 0 {
            continue;
        }
        let ks: Option<Vec<u32>> = g.edges.iter().map(|(_, _, w)| power_of(w, &lam)).collect();
        if let Some(ks) = ks {
            return Some((lam, ks));
        }
    }
    None
}

/// Lagrange interpolation through (x_i, y_i).
fn interpolate(xs: &[Rational], ys: &[Rational]) -> Poly {
    let mut acc = Poly::zero();
    for i in 0..xs.len() {
        let mut term = Poly::constant(ys[i].clone());
        for j in 0..xs.len() {
            if i != j {
                let f = Poly::new(vec![-xs[j].clone(), rint(1)]).scale(&(rint(1) / (&xs[i] - &xs[j])));
                term = &term * &f;
            }
        }
        acc = &acc + &term;
    }
    acc
}

/// det(I − A(y)) for A(y)_uv = Σ y^{k_e}, exactly.
fn det_polynomial(size: usize, edges: &[(usize, usize, u32)]) -> Poly {
    let kmax = edges.iter().map(|e| e.2).max().unwrap_or(1) as usize;
    let deg = size * kmax;
    let xs: Vec<Rational> = (0..=deg as i64).map(rint).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|y| {
            let mut m: RatMatrix = identity(size);
            for &(u, v, k) in edges {
                m[u][v] -= num_traits::pow(y.clone(), k as usize);
            }
            det(&m).expect("square")
        })
        .collect();
    interpolate(&xs, &ys)
}

/// Exact data for equal-ratio systems: Q(z) with z = λ^{-t}.
fn exact_path(g: &WeightedGraph, lam: &FieldElement, ks: &[u32]) -> Result<Option<(Poly, IsolatedRoot, Option<PowerForm>)>, DimError> {
    let Some(lq) = lam.as_rational() else {
        // λ irrational: only the single-power case, where Q is the char poly of S
        if ks.iter().any(|&k| k != 1) {
            return Ok(None);
        }
        let s = g.adjacency();
        let (p, r) = perron_root(&s)?;
        return Ok(Some((p, r, None)));
    };
    let edges: Vec<(usize, usize, u32)> = g.edges.iter().zip(ks).map(|(e, &k)| (e.0, e.1, k)).collect();
    let p = det_polynomial(g.size, &edges);
    let q = p.reverse().monic();
    let r = q.largest_real_root(&default_tol())?;
    let kmax = *ks.iter().max().unwrap() as usize;
    let pf = if kmax > 1 {
        let n = q.degree().unwrap();
        let mut comp: RatMatrix = vec![vec![Rational::from_integer(0.into()); n]; n];
        for i in 1..n {
            comp[i][i - 1] = rint(1);
        }
        for i in 0..n {
            comp[i][n - 1] = -q.coeff(i);
        }
        let mut pw = identity(n);
        for _ in 0..kmax {
            pw = mat_mul(&pw, &comp);
        }
        let rp = char_poly(&pw)?;
        let rr = rp.largest_real_root(&default_tol())?;
        let base = num_traits::pow(rint(1) / lq.clone(), kmax);
        Some(PowerForm { poly: rp, root: rr, base })
    } else {
        None
    };
    Ok(Some((q, r, pf)))
}

fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

/// Solves Φ(t) = 1: maximum over nontrivial strongly connected components,
/// with an exact algebraic form when all weights are powers of one ratio.
pub fn solve_phi(g: &WeightedGraph) -> Result<SpectralResult, DimError> {
    let adj = g.adjacency();
    let scc: SccReport = scc_decompose(&adj);
    let mut warnings = vec![];
    let mut components = vec![];
    let mut best: Option<(f64, usize)> = None;
    for (ci, (c, &nt)) in scc.components.iter().zip(&scc.nontrivial).enumerate() {
        if !nt {
            continue;
        }
        let sub = g.restrict(c);
        let t = solve_component(&sub, &mut warnings);
        components.push(ComponentDim { vertices: c.clone(), dimension: t });
        if best.is_none_or(|(b, _)| t > b) {
            best = Some((t, ci));
        }
    }
    let Some((bis, ci)) = best else {
        return Err(DimError::NoSolution);
    };
    let measure = if scc.strongly_connected { MeasureFlag::PositiveFinite } else { MeasureFlag::Unknown };
    let dominant = g.restrict(&scc.components[ci]);
    let mut res = SpectralResult {
        dimension: bis,
        char_poly: None,
        perron: None,
        lambda: None,
        exact_form: None,
        power_form: None,
        measure,
        components,
        phi_residual: 0.0,
        bisection: bis,
        warnings,
    };
    if let Some((lam, ks)) = common_base(&dominant) {
        if let Some((q, r, pf)) = exact_path(&dominant, &lam, &ks)? {
            let d = r.value.ln() / (1.0 / lam.to_f64()).ln();
            if (d - bis).abs() > 1e-6 {
                res.warnings.push(format!("exact value {d} differs from bisection {bis}"));
            }
            res.dimension = d;
            res.exact_form = Some(match (&pf, lam.as_rational()) {
                (Some(pf), _) => format!("log r / log {}, r = largest root of {}", format_rational(&pf.base), pf.poly),
                (None, Some(l)) => format!("log r / log {}, r = largest root of {}", format_rational(&(rint(1) / l)), q),
                (None, None) => format!("log r / -log({}), r = largest root of {}", lam, q),
            });
            res.char_poly = Some(q);
            res.perron = Some(r);
            res.power_form = pf;
            res.lambda = Some(lam);
        }
    }
    res.phi_residual = (phi(g, res.dimension) - 1.0).abs();
    if res.dimension > 1.0 {
        res.warnings.push("dimension above 1 clamped".into());
        res.dimension = 1.0;
    }
    Ok(res)
}

/// Dimensions of the attractor graph and the univoque graph, with
/// dim U ≤ dim K checked.
pub fn dimension_report(k_graph: &WeightedGraph, u_graph: &WeightedGraph) -> Result<(SpectralResult, SpectralResult), DimError> {
    let k = solve_phi(k_graph)?;
    let u = match solve_phi(u_graph) {
        Ok(u) => u,
        Err(DimError::NoSolution) => zero_result(),
        Err(e) => return Err(e),
    };
    if u.dimension > k.dimension + 1e-9 {
        return Err(DimError::Inconsistent(u.dimension, k.dimension));
    }
    Ok((k, u))
}

/// Result for a set carrying no infinite path (at most countable).
pub fn zero_result() -> SpectralResult {
    SpectralResult {
        dimension: 0.0,
        char_poly: None,
        perron: None,
        lambda: None,
        exact_form: Some("countable set".into()),
        power_form: None,
        measure: MeasureFlag::Unknown,
        components: vec![],
        phi_residual: 0.0,
        bisection: 0.0,
        warnings: vec![],
    }
}

/// Dimension log(ρ)/log(base) of an unweighted shift, ρ the largest Perron
/// root among strongly connected components, with the exact char poly of
/// the dominant component.
pub fn shift_dimension(s: &AdjacencyMatrix, base: f64) -> Result<SpectralResult, DimError> {
    let scc = scc_decompose(s);
    let mut best: Option<(Poly, IsolatedRoot, usize)> = None;
    let mut components = vec![];
    for (ci, (c, &nt)) in scc.components.iter().zip(&scc.nontrivial).enumerate() {
        if !nt {
            continue;
        }
        let sub = s.principal(c);
        let (p, r) = perron_root(&sub)?;
        components.push(ComponentDim { vertices: c.clone(), dimension: r.value.ln() / base.ln() });
        if best.as_ref().is_none_or(|b| r.value > b.1.value) {
            best = Some((p, r, ci));
        }
    }
    let Some((p, r, _)) = best else {
        return Err(DimError::NoSolution);
    };
    // drop the zero eigenvalues
    let z = p.coeffs().iter().take_while(|c| num_traits::Zero::is_zero(*c)).count();
    let p = Poly::new(p.coeffs()[z..].to_vec());
    let d = r.value.ln() / base.ln();
    let measure = if scc.strongly_connected { MeasureFlag::PositiveFinite } else { MeasureFlag::Unknown };
    Ok(SpectralResult {
        dimension: d,
        exact_form: Some(format!("log r / log {base}, r = largest root of {p}")),
        char_poly: Some(p),
        perron: Some(r),
        lambda: None,
        power_form: None,
        measure,
        components,
        phi_residual: 0.0,
        bisection: d,
        warnings: vec![],
    })
}
