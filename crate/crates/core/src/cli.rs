//! Request/report layer behind the `fractal-sft` binary: JSON requests,
//! deterministic JSON reports, exit codes, an on-disk cache and sweeps.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::analysis::{analyze_ifs, AnalysisError, IfsAnalysis, IfsOptions};
use crate::beta_exp::{self, quasi_greedy_one, BetaError, BetaSystem, GreedyOutcome};
use crate::codings::{self, CodingError};
use crate::dimension::{DimError, SpectralResult};
use crate::exactnum::{format_rational, parse_rational, FieldElement, Poly, Rational};
use crate::ifs_core::{load_ifs, Ifs, IfsError, IfsSpec, Interval, DEFAULT_MAX_STEPS, DEFAULT_OVERLAP_DEPTH};
use crate::markov::{scc_decompose, weighted_graph, MarkovError, MarkovPartition};
use crate::open_map::{self, Hole, OpenMapError};
use crate::oracle::{self, GrowthEstimate, HoleKind, OracleError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Largest accepted gap between a spectral dimension and its oracle estimate.
pub const ORACLE_TOL: f64 = 0.05;
pub const DEFAULT_BETA_ORACLE_N: usize = 24;
pub const DEFAULT_HOLE_ORACLE_N: usize = 20;
pub const DEFAULT_BOX_LEVEL: usize = 8;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MALFORMED: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

pub const FIXTURE_OVERLAP_THIRDS: &str = include_str!("../fixtures/overlap_thirds.json");
pub const FIXTURE_Q_FAMILY_4: &str = include_str!("../fixtures/q_family_4.json");
pub const FIXTURE_UK_FAMILY: &str = include_str!("../fixtures/uk_family_lambda_1_10.json");

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default)]
    pub verify: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Request {
    IfsDim {
        spec: IfsSpec,
        #[serde(default)]
        options: Options,
    },
    UnivoqueDim {
        spec: IfsSpec,
        #[serde(default)]
        options: Options,
    },
    BetaClassify {
        poly: Poly,
        #[serde(default)]
        options: Options,
    },
    BetaDim {
        poly: Poly,
        #[serde(default)]
        options: Options,
    },
    HoleDim {
        a: String,
        b: String,
        #[serde(default)]
        options: Options,
    },
    CountCodings {
        spec: IfsSpec,
        /// Power-basis coefficients of the point.
        point: Vec<String>,
        #[serde(default)]
        options: Options,
    },
    UkFamily {
        lambda: String,
        #[serde(default)]
        options: Options,
    },
    Verify {
        #[serde(default)]
        options: Options,
    },
}

impl Request {
    pub fn options(&self) -> &Options {
        match self {
            Request::IfsDim { options, .. }
            | Request::UnivoqueDim { options, .. }
            | Request::BetaClassify { options, .. }
            | Request::BetaDim { options, .. }
            | Request::HoleDim { options, .. }
            | Request::CountCodings { options, .. }
            | Request::UkFamily { options, .. }
            | Request::Verify { options } => options,
        }
    }

    /// Canonical JSON text (sorted keys) used for cache keys.
    pub fn canonical(&self) -> String {
        let v = serde_json::to_value(self).expect("serializable");
        serde_json::to_string(&v).expect("serializable")
    }

    pub fn cache_key(&self) -> String {
        let mut h = Sha256::new();
        h.update(VERSION.as_bytes());
        h.update(b"\n");
        h.update(self.canonical().as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

enum Failure {
    Malformed(String),
    Hypothesis(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Malformed(_) => EXIT_MALFORMED,
            Failure::Hypothesis(_) => EXIT_HYPOTHESIS,
        }
    }
}

fn malformed(e: impl std::fmt::Display) -> Failure {
    Failure::Malformed(e.to_string())
}

fn hypothesis(e: impl std::fmt::Display) -> Failure {
    Failure::Hypothesis(e.to_string())
}

impl From<IfsError> for Failure {
    fn from(e: IfsError) -> Self {
        match e {
            IfsError::UnresolvedOverlap(..) | IfsError::NoAdmissibleMap(_) | IfsError::OrbitNotPeriodic(..) | IfsError::ExplosionGuard(_) => {
                hypothesis(e)
            }
            _ => malformed(e),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Ifs(i) => i.into(),
            e if e.is_hypothesis_failure() => hypothesis(e),
            e => malformed(e),
        }
    }
}

impl From<MarkovError> for Failure {
    fn from(e: MarkovError) -> Self {
        hypothesis(e)
    }
}

impl From<DimError> for Failure {
    fn from(e: DimError) -> Self {
        hypothesis(e)
    }
}

impl From<BetaError> for Failure {
    fn from(e: BetaError) -> Self {
        match e {
            BetaError::OutOfRange | BetaError::OutOfDomain | BetaError::Num(_) => malformed(e),
            BetaError::Ifs(i) => i.into(),
            _ => hypothesis(e),
        }
    }
}

impl From<OpenMapError> for Failure {
    fn from(e: OpenMapError) -> Self {
        match e {
            OpenMapError::MalformedWord(_) | OpenMapError::AllOnesPeriod | OpenMapError::InvalidHole | OpenMapError::InadmissiblePath(_) => {
                malformed(e)
            }
            _ => hypothesis(e),
        }
    }
}

impl From<CodingError> for Failure {
    fn from(e: CodingError) -> Self {
        match e {
            CodingError::Ifs(i) => i.into(),
            CodingError::Analysis(a) => a.into(),
            CodingError::Dim(d) => d.into(),
            CodingError::LambdaOutOfRange => hypothesis(e),
            _ => malformed(e),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Beta(b) => b.into(),
            e => hypothesis(e),
        }
    }
}

/// Result body plus the verify verdict when oracle checks ran.
struct Body {
    result: Value,
    verified: Option<bool>,
}

pub fn run(req: &Request) -> Outcome {
    let opts = req.options();
    let bounds = json!({
        "overlap_depth": opts.depth.unwrap_or(DEFAULT_OVERLAP_DEPTH),
        "max_steps": opts.bound.unwrap_or(DEFAULT_MAX_STEPS),
        "beta_bound": opts.bound.unwrap_or(beta_exp::DEFAULT_BOUND),
        "coding_depth": opts.depth.unwrap_or(codings::DEFAULT_DEPTH),
        "tol": opts.tol,
        "oracle_tol": ORACLE_TOL,
    });
    let body = dispatch(req);
    let mut report = json!({
        "request": req,
        "version": VERSION,
        "bounds": bounds,
    });
    let code = match body {
        Ok(b) => {
            report["result"] = b.result;
            match b.verified {
                Some(false) => {
                    report["status"] = json!("verify_failed");
                    EXIT_VERIFY
                }
                _ => {
                    report["status"] = json!("ok");
                    EXIT_OK
                }
            }
        }
        Err(f) => {
            let (status, msg) = match &f {
                Failure::Malformed(m) => ("malformed_input", m),
                Failure::Hypothesis(m) => ("hypothesis_failure", m),
            };
            report["status"] = json!(status);
            report["error"] = json!(msg);
            f.code()
        }
    };
    Outcome { code, report }
}

/// `run` with an on-disk cache keyed by the request hash.
pub fn run_cached(req: &Request, cache_dir: Option<&Path>) -> Outcome {
    let Some(dir) = cache_dir else { return run(req) };
    let path = dir.join(format!("{}.json", req.cache_key()));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(o) = serde_json::from_str::<Outcome>(&text) {
            return o;
        }
    }
    let o = run(req);
    if std::fs::create_dir_all(dir).is_ok() {
        let tmp = path.with_extension("tmp");
        if std::fs::write(&tmp, serde_json::to_string(&o).expect("serializable")).is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        }
    }
    o
}

/// Runs independent requests on `threads` workers; results keep input order.
pub fn run_sweep(reqs: &[Request], threads: usize, cache_dir: Option<&Path>) -> Vec<Outcome> {
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<Outcome>>> = Mutex::new(vec![None; reqs.len()]);
    std::thread::scope(|s| {
        for _ in 0..threads.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, AtomicOrdering::SeqCst);
                if i >= reqs.len() {
                    break;
                }
                let o = run_cached(&reqs[i], cache_dir);
                out.lock().unwrap()[i] = Some(o);
            });
        }
    });
    out.into_inner().unwrap().into_iter().map(|o| o.expect("every request ran")).collect()
}

/// Cache directory: `FRACTAL_SFT_CACHE` wins over the flag.
pub fn resolve_cache_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    match std::env::var_os("FRACTAL_SFT_CACHE") {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag,
    }
}

fn dispatch(req: &Request) -> Result<Body, Failure> {
    let opts = req.options();
    if let Some(t) = opts.tol {
        if !(t > 0.0 && t <= 1e-3) {
            return Err(malformed("tol must lie in (0, 1e-3]"));
        }
    }
    for v in [opts.depth, opts.bound].into_iter().flatten() {
        if v == 0 {
            return Err(malformed("bounds must be positive"));
        }
    }
    match req {
        Request::IfsDim { spec, options } => ifs_dim(spec, options, true),
        Request::UnivoqueDim { spec, options } => ifs_dim(spec, options, false),
        Request::BetaClassify { poly, options } => beta_classify(poly, options),
        Request::BetaDim { poly, options } => beta_dim(poly, options),
        Request::HoleDim { a, b, options } => hole_dim(a, b, options),
        Request::CountCodings { spec, point, options } => count_codings(spec, point, options),
        Request::UkFamily { lambda, options } => uk_family(lambda, options),
        Request::Verify { options } => verify(options),
    }
}

fn refine_tol(r: &mut SpectralResult, tol: Option<f64>) {
    let Some(t) = tol.and_then(Rational::from_float) else { return };
    if let Some(p) = r.perron.as_mut() {
        p.refine(&t);
    }
    if let Some(pf) = r.power_form.as_mut() {
        pf.root.refine(&t);
    }
}

fn interval_json(iv: &Interval) -> Value {
    let (a, b) = iv.to_f64();
    json!({"lo": iv.lo.to_string(), "hi": iv.hi.to_string(), "float": [a, b]})
}

fn elements(v: &[FieldElement]) -> Value {
    json!(v.iter().map(|x| json!({"exact": x.to_string(), "float": x.to_f64()})).collect::<Vec<_>>())
}

fn partition_json(p: &MarkovPartition, labels: &[String]) -> Value {
    let blocks: Vec<Value> = (0..p.len())
        .map(|j| {
            let t = p.chosen_transition(j);
            json!({
                "name": p.names[j],
                "interval": interval_json(&p.blocks[j]),
                "map": labels[t.map],
                "cover": t.cover.iter().map(|&i| p.names[i].clone()).collect::<Vec<_>>(),
                "admissible_maps": p.transitions[j].iter().map(|t| labels[t.map].clone()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "choice": p.choice,
        "blocks": blocks,
        "switch_blocks": p.switch_blocks.iter().map(|&i| p.names[i].clone()).collect::<Vec<_>>(),
        "pruned": p.pruned.iter().map(interval_json).collect::<Vec<_>>(),
        "warnings": p.warnings,
    })
}

fn ifs_json(ifs: &Ifs) -> Value {
    json!({
        "field": ifs.field.min_poly().to_string(),
        "generator": ifs.field.generator_f64(),
        "maps": ifs.maps.iter().zip(&ifs.labels).map(|(m, l)| json!({
            "label": l, "ratio": m.ratio.to_string(), "offset": m.offset.to_string(),
        })).collect::<Vec<_>>(),
        "hull": interval_json(&ifs.hull),
    })
}

fn oracle_check(name: &str, value: f64, est: &GrowthEstimate) -> (Value, bool) {
    let delta = (value - est.dimension).abs();
    let pass = delta < ORACLE_TOL;
    (json!({"check": name, "value": value, "estimate": est, "delta": delta, "pass": pass}), pass)
}

/// Oracle estimates for dim K and dim U of an analysed IFS.
pub fn ifs_oracle(ifs: &Ifs, a: &IfsAnalysis) -> Result<Vec<(&'static str, f64, GrowthEstimate)>, OracleError> {
    let k = weighted_graph(ifs, &a.s);
    let u = k.restrict(&a.s_prime.principal_index);
    let step = oracle::common_step(&k);
    let mut out = vec![
        ("dim_k_box_count", a.dim_k.dimension, oracle::box_count_ifs(ifs, DEFAULT_BOX_LEVEL)?),
        ("dim_k_moran", a.dim_k.dimension, oracle::moran_cover_count(&k, 200, step, 2_000_000)?),
    ];
    if a.dim_u.dimension > 0.0 {
        out.push(("dim_u_moran", a.dim_u.dimension, oracle::moran_cover_count(&u, 200, step, 2_000_000)?));
    }
    Ok(out)
}

fn checks_json(checks: Vec<(Value, bool)>) -> (Value, bool) {
    let pass = checks.iter().all(|c| c.1);
    (json!({"checks": checks.into_iter().map(|c| c.0).collect::<Vec<_>>(), "pass": pass}), pass)
}

fn ifs_dim(spec: &IfsSpec, o: &Options, with_k: bool) -> Result<Body, Failure> {
    let ifs = load_ifs(spec)?;
    let opts = IfsOptions { overlap_depth: o.depth.unwrap_or(DEFAULT_OVERLAP_DEPTH), max_steps: o.bound.unwrap_or(DEFAULT_MAX_STEPS) };
    let mut a = analyze_ifs(&ifs, &opts)?;
    refine_tol(&mut a.dim_k, o.tol);
    refine_tol(&mut a.dim_u, o.tol);
    let labels = &ifs.labels;
    let certs: Vec<Value> = a
        .overlaps
        .certificates
        .iter()
        .map(|c| {
            json!({
                "pair": [labels[c.pair.0].clone(), labels[c.pair.1].clone()],
                "intersection": interval_json(&c.intersection),
                "decompositions": c.decompositions.iter().map(|(u, v)| [ifs.word_label(u), ifs.word_label(v)]).collect::<Vec<_>>(),
            })
        })
        .collect();
    let contacts: Vec<Value> = a
        .overlaps
        .point_contacts
        .iter()
        .map(|(i, j, x)| json!({"pair": [labels[*i].clone(), labels[*j].clone()], "point": x.to_string()}))
        .collect();
    let mut result = json!({
        "ifs": ifs_json(&ifs),
        "overlaps": {"certificates": certs, "point_contacts": contacts},
        "breakpoints": elements(&a.breakpoints),
        "partition": partition_json(&a.partition, labels),
        "S": a.s,
        "S_prime": {
            "principal": a.s_prime.principal,
            "core": a.s_prime.core,
        },
        "scc": scc_decompose(&a.s_prime.principal),
        "osc": a.osc,
        "dim_u": a.dim_u,
    });
    if with_k {
        result["dim_k"] = serde_json::to_value(&a.dim_k).expect("serializable");
    }
    let mut verified = None;
    if o.verify {
        let mut checks = ifs_oracle(&ifs, &a)?;
        if !with_k {
            checks.retain(|c| c.0 == "dim_u_moran");
        }
        let (v, pass) = checks_json(checks.iter().map(|(n, d, e)| oracle_check(n, *d, e)).collect());
        result["oracle"] = v;
        verified = Some(pass);
    }
    Ok(Body { result, verified })
}

fn beta_system(poly: &Poly) -> Result<BetaSystem, Failure> {
    Ok(BetaSystem::new(poly)?)
}

fn expansion_json(sys: &BetaSystem, bound: usize) -> Result<Value, Failure> {
    let e = quasi_greedy_one(sys, bound)?;
    let greedy = match &e.greedy {
        GreedyOutcome::Finite(d) => json!({"finite": d.iter().map(|x| x.to_string()).collect::<String>()}),
        GreedyOutcome::EventuallyPeriodic(w) => json!({"eventually_periodic": w.to_string()}),
        GreedyOutcome::Unresolved(n) => json!({"unresolved": n}),
    };
    Ok(json!({
        "greedy": greedy,
        "quasi_greedy": e.quasi_greedy.as_ref().map(|w| w.to_string()),
        "orbit": elements(&e.orbit_values[..e.orbit_values.len().min(64)]),
    }))
}

fn beta_classify(poly: &Poly, o: &Options) -> Result<Body, Failure> {
    let sys = beta_system(poly)?;
    let bound = o.bound.unwrap_or(beta_exp::DEFAULT_BOUND);
    let c = beta_exp::classify_sft(&sys, bound)?;
    let step = match &c {
        beta_exp::SftClassification::SftInteriorHit(k)
        | beta_exp::SftClassification::SftRightEndpointHit(k)
        | beta_exp::SftClassification::NotSftLeftEndpointHit(k) => Some(*k),
        _ => None,
    };
    let result = json!({
        "beta": sys.beta_f64(),
        "min_poly": sys.field.min_poly().to_string(),
        "switch_region": interval_json(&sys.switch),
        "expansion_of_one": expansion_json(&sys, bound)?,
        "classification": c.label(),
        "step": step,
        "is_sft": c.is_sft(),
    });
    Ok(Body { result, verified: None })
}

fn beta_dim(poly: &Poly, o: &Options) -> Result<Body, Failure> {
    let sys = beta_system(poly)?;
    let bound = o.bound.unwrap_or(beta_exp::DEFAULT_BOUND);
    let mut d = beta_exp::univoque_dimension(&sys, bound)?;
    refine_tol(&mut d.result, o.tol);
    let p = &d.partition;
    let blocks: Vec<Value> = (0..p.len()).map(|j| json!({"name": p.names[j], "interval": interval_json(&p.blocks[j])})).collect();
    let mut result = json!({
        "beta": sys.beta_f64(),
        "min_poly": sys.field.min_poly().to_string(),
        "classification": d.classification.label(),
        "expansion_of_one": expansion_json(&sys, bound)?,
        "points": elements(&d.points),
        "blocks": blocks,
        "switch_blocks": p.switch_blocks.iter().map(|&i| p.names[i].clone()).collect::<Vec<_>>(),
        "S": d.s,
        "S_prime": {"principal": d.s_prime.principal, "core": d.s_prime.core},
        "S_unit": d.s_unit,
        "S_prime_unit": d.s_prime_unit,
        "dimension": d.result,
        "full_domain_dimension": d.full_dimension,
        "notes": d.notes,
    });
    let mut verified = None;
    if o.verify {
        let n = o.depth.unwrap_or(DEFAULT_BETA_ORACLE_N);
        let est = oracle::unique_word_count(&sys, n, bound)?;
        let (v, pass) = checks_json(vec![oracle_check("unique_word_count", d.result.dimension, &est)]);
        result["oracle"] = v;
        verified = Some(pass);
    }
    Ok(Body { result, verified })
}

/// A binary word `"pre(period)"` or a rational.
pub fn parse_hole_endpoint(s: &str) -> Result<Rational, OpenMapError> {
    if s.contains('(') {
        open_map::parse_binary(s)
    } else {
        parse_rational(s).map_err(|_| OpenMapError::MalformedWord(s.to_string()))
    }
}

fn hole_dim(a: &str, b: &str, o: &Options) -> Result<Body, Failure> {
    let hole = Hole::new(parse_hole_endpoint(a)?, parse_hole_endpoint(b)?)?;
    let h = open_map::hole_partition(&hole)?;
    let names = |idx: &[usize]| idx.iter().map(|&i| h.s.names[i].clone()).collect::<Vec<_>>();
    let blocks: Vec<Value> = (0..h.blocks())
        .map(|i| json!({"name": h.s.names[i], "lo": format_rational(&h.points[i]), "hi": format_rational(&h.points[i + 1])}))
        .collect();
    let dim = match open_map::survivor_dimension(&h) {
        Ok(mut r) => {
            refine_tol(&mut r, o.tol);
            serde_json::to_value(&r).expect("serializable")
        }
        Err(OpenMapError::EmptySurvivor) => json!({"dimension": 0.0, "note": "every block pruned; the survivor set is countable"}),
        Err(e) => return Err(e.into()),
    };
    let parry = if h.irreducible {
        json!(open_map::parry_measure(&h.core)?)
    } else {
        // the chain on the dominant component
        let best = h
            .sccs
            .components
            .iter()
            .zip(&h.sccs.nontrivial)
            .filter(|(_, &nt)| nt)
            .map(|(c, _)| (c, crate::dimension::spectral_radius(&h.core.principal(c).as_f64())))
            .max_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((c, _)) => json!({
                "irreducible": false,
                "component": c.iter().map(|&i| h.core.names[i].clone()).collect::<Vec<_>>(),
                "chain": open_map::parry_measure(&h.core.principal(c)).ok(),
            }),
            None => Value::Null,
        }
    };
    let mut result = json!({
        "hole": hole,
        "points": h.points.iter().map(format_rational).collect::<Vec<_>>(),
        "blocks": blocks,
        "hole_blocks": names(&h.hole_blocks),
        "S": h.s,
        "S_prime": h.s_prime,
        "core": h.core,
        "irreducible": h.irreducible,
        "scc": h.sccs,
        "cover_exact": h.check_cover_exactness(),
        "dimension": dim,
        "parry": parry,
        "warnings": hole.warnings,
    });
    let mut verified = None;
    if o.verify {
        let n = o.depth.unwrap_or(DEFAULT_HOLE_ORACLE_N);
        let d = result["dimension"]["dimension"].as_f64().unwrap_or(0.0);
        let half = oracle::survivor_cylinder_count(&hole, n, HoleKind::HalfOpen)?;
        let open = oracle::survivor_cylinder_count(&hole, n, HoleKind::Open)?;
        let (v, pass) = checks_json(vec![oracle_check("survivors_half_open", d, &half), oracle_check("survivors_open", d, &open)]);
        result["oracle"] = v;
        verified = Some(pass);
    }
    Ok(Body { result, verified })
}

fn parse_point(ifs: &Ifs, point: &[String]) -> Result<FieldElement, Failure> {
    let c = point.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>().map_err(malformed)?;
    Ok(FieldElement::from_coeffs(&ifs.field, c))
}

fn coding_json(ifs: &Ifs, r: &codings::MultiplicityReport) -> Value {
    json!({
        "point": r.point.to_string(),
        "verdict": r.verdict,
        "codings": r.codings.iter().map(|c| c.render(&ifs.labels)).collect::<Vec<_>>(),
    })
}

fn count_codings(spec: &IfsSpec, point: &[String], o: &Options) -> Result<Body, Failure> {
    let ifs = load_ifs(spec)?;
    let x = parse_point(&ifs, point)?;
    let depth = o.depth.unwrap_or(codings::DEFAULT_DEPTH);
    let t = codings::enumerate_codings(&ifs, &x, depth)?;
    let r = codings::classify_multiplicity(&t);
    let mut result = coding_json(&ifs, &r);
    result["graph"] = json!({"nodes": t.values.len(), "complete": t.complete(), "depth": depth});
    Ok(Body { result, verified: None })
}

fn uk_family(lambda: &str, o: &Options) -> Result<Body, Failure> {
    let l = parse_rational(lambda).map_err(malformed)?;
    let lam = FieldElement::from_rational(&crate::exactnum::NumberField::rational(), l);
    let depth = o.depth.unwrap_or(codings::DEFAULT_DEPTH);
    let mut r = codings::uk_family_report(&lam, depth)?;
    refine_tol(&mut r.dim_u1, o.tol);
    let mut result = json!({
        "lambda": lam.to_string(),
        "ifs": ifs_json(&r.ifs),
        "partition": partition_json(&r.analysis.partition, &r.ifs.labels),
        "S": r.analysis.s,
        "S_prime": r.analysis.s_prime.principal,
        "s_prime_char_poly": r.s_prime_char_poly.to_string(),
        "perron_is_2_plus_sqrt2": r.perron_is_2_plus_sqrt2,
        "dim_u1": r.dim_u1,
        "closed_form": r.closed_form,
        "closed_form_delta": (r.dim_u1.dimension - r.closed_form).abs(),
        "witnesses": r.witnesses.iter().map(|w| coding_json(&r.ifs, &w.report)).collect::<Vec<_>>(),
    });
    let mut verified = None;
    if o.verify {
        let checks = ifs_oracle(&r.ifs, &r.analysis)?;
        let (v, pass) = checks_json(checks.iter().map(|(n, d, e)| oracle_check(n, *d, e)).collect());
        result["oracle"] = v;
        verified = Some(pass);
    }
    Ok(Body { result, verified })
}

/// One spectral result of the built-in corpus with its oracle estimate.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusCheck {
    pub name: String,
    pub value: f64,
    pub estimate: f64,
    pub delta: f64,
    pub pass: bool,
}

fn check(name: &str, value: f64, est: &GrowthEstimate) -> CorpusCheck {
    let delta = (value - est.dimension).abs();
    CorpusCheck { name: name.into(), value, estimate: est.dimension, delta, pass: delta < ORACLE_TOL }
}

/// The corpus: three IFS fixtures, five β examples and three holes.
pub fn verify_corpus() -> Result<Vec<CorpusCheck>, String> {
    let mut out = vec![];
    for (name, text) in [("overlap_thirds", FIXTURE_OVERLAP_THIRDS), ("q_family_4", FIXTURE_Q_FAMILY_4), ("uk_family_1_10", FIXTURE_UK_FAMILY)] {
        let ifs = crate::ifs_core::load_ifs_json(text).map_err(|e| e.to_string())?;
        let a = analyze_ifs(&ifs, &IfsOptions::default()).map_err(|e| e.to_string())?;
        for (check_name, d, est) in ifs_oracle(&ifs, &a).map_err(|e| e.to_string())? {
            out.push(check(&format!("{name}/{check_name}"), d, &est));
        }
    }
    let betas = [
        ("tribonacci", beta_exp::multinacci(3)),
        ("pisot_quartic", Poly::from_ints(&[-1, 1, 0, -2, 1])),
        ("quartic_unique_one", Poly::from_ints(&[1, 0, -2, -1, 1])),
        ("tetranacci", beta_exp::multinacci(4)),
        ("pentanacci", beta_exp::multinacci(5)),
    ];
    for (name, p) in betas {
        let sys = BetaSystem::new(&p).map_err(|e| e.to_string())?;
        let d = beta_exp::univoque_dimension(&sys, beta_exp::DEFAULT_BOUND).map_err(|e| e.to_string())?;
        let est = oracle::unique_word_count(&sys, DEFAULT_BETA_ORACLE_N, beta_exp::DEFAULT_BOUND).map_err(|e| e.to_string())?;
        out.push(check(&format!("beta/{name}"), d.result.dimension, &est));
    }
    for (a, b) in [("1/31", "2/31"), ("10/31", "18/31"), ("1/4", "1/2")] {
        let hole = Hole::new(parse_rational(a).unwrap(), parse_rational(b).unwrap()).map_err(|e| e.to_string())?;
        let h = open_map::hole_partition(&hole).map_err(|e| e.to_string())?;
        let d = match open_map::survivor_dimension(&h) {
            Ok(r) => r.dimension,
            Err(OpenMapError::EmptySurvivor) => 0.0,
            Err(e) => return Err(e.to_string()),
        };
        let est = oracle::survivor_cylinder_count(&hole, DEFAULT_HOLE_ORACLE_N, HoleKind::HalfOpen).map_err(|e| e.to_string())?;
        out.push(check(&format!("hole/[{a},{b})"), d, &est));
    }
    Ok(out)
}

fn verify(_: &Options) -> Result<Body, Failure> {
    let checks = verify_corpus().map_err(hypothesis)?;
    let pass = checks.iter().all(|c| c.pass);
    Ok(Body { result: json!({"checks": checks, "pass": pass}), verified: Some(pass) })
}

/// Parses `--poly` CSV of ascending integer or rational coefficients.
pub fn parse_poly_csv(s: &str) -> Result<Poly, String> {
    let c = s.split(',').map(|t| parse_rational(t.trim()).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?;
    let p = Poly::new(c);
    if p.degree().unwrap_or(0) < 1 {
        return Err("polynomial must have positive degree".into());
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_roundtrip() {
        let r = Request::HoleDim { a: "(01010)".into(), b: "(10010)".into(), options: Options::default() };
        let text = r.canonical();
        let back: Request = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.cache_key(), r.cache_key());
    }

    #[test]
    fn exit_codes() {
        let r = run(&Request::HoleDim { a: "(1)".into(), b: "1/2".into(), options: Options::default() });
        assert_eq!(r.code, EXIT_MALFORMED);
        let r = run(&Request::BetaClassify { poly: Poly::from_ints(&[-1, -1, 1]), options: Options::default() });
        assert_eq!(r.code, EXIT_HYPOTHESIS);
        let r = run(&Request::BetaClassify { poly: beta_exp::multinacci(3), options: Options::default() });
        assert_eq!(r.code, EXIT_OK);
        assert_eq!(r.report["result"]["classification"], "not_sft_left_endpoint");
        let o = Options { tol: Some(0.5), ..Options::default() };
        assert_eq!(run(&Request::BetaClassify { poly: beta_exp::multinacci(3), options: o }).code, EXIT_MALFORMED);
    }
}
