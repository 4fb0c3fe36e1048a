//! Request parsing and execution for the `mackey` command.
//!
//! Every command produces a JSON value with `"schema": 1`. Keys are emitted
//! in sorted order and all representative choices are fixed, so identical
//! requests give byte-identical output.

use std::path::Path;
use std::sync::Arc;

use mackey::abelian::{int_json, FgAb};
use mackey::free_tambara::{extended_power_colimit, sym_power_level, t0_comparison, t1_comparison, FreeTambara};
use mackey::groups::{catalog_group, FiniteGroup, GroupError, CATALOG};
use mackey::gsets::{check_exponential_lemmas, gsets_up_to, GMap, GSet};
use mackey::mackey::{
    builtin_examples, burnside_mackey, check_mackey_axioms, fixedpoint_mackey, geometric_fixed_points, mackey_restriction,
    representable_mackey, MackeyFunctor, Report, ZModule,
};
use mackey::norm_power::{norm_engine, power_engine, triangle_norm, triangle_restriction, Counit, NormTambara};
use mackey::tambara::{
    burnside_tambara, check_tambara_axioms, monad_algebra_check, multiplicative_round_trip, multiplicative_structure,
    verify_multiplicative, UniversalAction,
};
use serde_json::{json, Value};
use thiserror::Error;

pub const SCHEMA: u64 = 1;

pub const SUITES: &[&str] = &["exponential-lemmas", "mackey-axioms", "tambara-axioms", "multiplicative", "monad", "grading", "oracle", "adjunction"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown group: {0}")]
    UnknownGroup(String),
    #[error("bound too small: {0}")]
    BoundTooSmall(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::UnknownGroup(_) => "UnknownGroup",
            CliError::BoundTooSmall(_) => "BoundTooSmall",
            CliError::Compute(_) => "ComputeError",
            CliError::Io(_) => "IoError",
        }
    }

    /// Exit code: 1 is reserved for failed checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::UnknownGroup(_) => 2,
            CliError::BoundTooSmall(_) => 3,
            CliError::Compute(_) | CliError::Io(_) => 4,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"schema": SCHEMA, "error": {"kind": self.kind(), "message": self.to_string()}})
    }
}

fn compute_err(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Catalog(String),
    Json(String),
}

impl GroupSpec {
    pub fn label(&self) -> String {
        match self {
            GroupSpec::Catalog(name) => name.clone(),
            GroupSpec::Json(_) => "custom".into(),
        }
    }

    pub fn load(&self) -> Result<Arc<FiniteGroup>, CliError> {
        match self {
            GroupSpec::Catalog(name) => catalog_group(name).map_err(|e| match e {
                GroupError::UnknownGroup(n) => CliError::UnknownGroup(n),
                other => CliError::Parse(other.to_string()),
            }),
            GroupSpec::Json(path) => {
                let text = std::fs::read_to_string(path)?;
                let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {}", path, e)))?;
                FiniteGroup::from_json(&v).map(Arc::new).map_err(|e| CliError::Parse(format!("{}: {}", path, e)))
            }
        }
    }
}

/// Subgroup class labels: `e` for the trivial class, `G` for the whole
/// group and `H<c>` for class index c otherwise.
pub fn class_label(group: &FiniteGroup, c: usize) -> String {
    if c == 0 {
        "e".into()
    } else if c + 1 == group.num_classes() {
        "G".into()
    } else {
        format!("H{}", c)
    }
}

pub fn parse_class(group: &FiniteGroup, s: &str) -> Result<usize, CliError> {
    let s = s.trim();
    let c = match s {
        "e" | "1" => Some(0),
        "G" => Some(group.num_classes() - 1),
        _ => s.strip_prefix('H').unwrap_or(s).parse::<usize>().ok(),
    };
    c.filter(|&c| c < group.num_classes()).ok_or_else(|| CliError::Parse(format!("subgroup class '{}'", s)))
}

/// A level `G/H`, or `pt` for G/G.
pub fn parse_level(group: &FiniteGroup, s: &str) -> Result<usize, CliError> {
    if s == "pt" {
        return Ok(group.num_classes() - 1);
    }
    let rest = s.strip_prefix("G/").ok_or_else(|| CliError::Parse(format!("level '{}' is not of the form G/H", s)))?;
    parse_class(group, rest)
}

/// A finite G-set: inline JSON, a path to a JSON file, or a sum of orbits
/// such as `G/e+2*G/G`. `0` is the empty set.
pub fn parse_gset(group: &Arc<FiniteGroup>, s: &str) -> Result<GSet, CliError> {
    let s = s.trim();
    if s.starts_with('{') || Path::new(s).is_file() {
        let text = if s.starts_with('{') { s.to_string() } else { std::fs::read_to_string(s)? };
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("G-set JSON: {}", e)))?;
        return GSet::from_json(group, &v).map_err(|e| CliError::Parse(e.to_string()));
    }
    if s == "0" {
        return Ok(GSet::empty(group));
    }
    let mut classes = Vec::new();
    for term in s.split('+') {
        let term = term.trim();
        let (k, orbit) = match term.split_once('*') {
            Some((k, o)) => (k.trim().parse::<usize>().map_err(|_| CliError::Parse(format!("multiplicity in '{}'", term)))?, o.trim()),
            None => (1, term),
        };
        let c = parse_level(group, orbit)?;
        classes.extend(std::iter::repeat(c).take(k));
    }
    Ok(GSet::from_orbit_classes(group, &classes))
}

/// `burnside`, `representable:<gset>`, `fixedpoint` or `fixedpoint:<gset>`
/// (the permutation module; `trivial` and `regular` are shorthands).
pub fn parse_mackey(group: &Arc<FiniteGroup>, s: &str) -> Result<Arc<MackeyFunctor>, CliError> {
    let (kind, arg) = match s.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (s, None),
    };
    let m = match (kind, arg) {
        ("burnside", None) => burnside_mackey(group),
        ("representable", Some(t)) => representable_mackey(&parse_gset(group, t)?),
        ("fixedpoint", None) | ("fixedpoint", Some("trivial")) => fixedpoint_mackey(&ZModule::trivial(group, 1)),
        ("fixedpoint", Some("regular")) => fixedpoint_mackey(&ZModule::permutation(&GSet::orbit(group, group.trivial_subgroup()))),
        ("fixedpoint", Some(t)) => fixedpoint_mackey(&ZModule::permutation(&parse_gset(group, t)?)),
        _ => return Err(CliError::Parse(format!("mackey functor '{}'", s))),
    };
    Ok(Arc::new(m))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Value,
    Sym(usize),
    Power(String),
    Norm(String),
}

impl Construction {
    pub fn label(&self) -> String {
        match self {
            Construction::Value => "value".into(),
            Construction::Sym(n) => format!("sym:{}", n),
            Construction::Power(t) => format!("power:{}", t),
            Construction::Norm(h) => format!("norm:{}", h),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ComputeRequest {
    pub group: GroupSpec,
    pub mackey: String,
    pub construction: Construction,
    pub phi: bool,
    pub level: Option<String>,
    pub verify: Option<String>,
}

fn level_json(group: &FiniteGroup, c: usize, value: &FgAb, generators: Vec<String>) -> Value {
    json!({
        "level": format!("G/{}", class_label(group, c)),
        "invariant_factors": value.invariant_factors().iter().map(int_json).collect::<Vec<_>>(),
        "free_rank": value.free_rank(),
        "description": value.describe(),
        "generators": generators,
    })
}

fn plain_generators(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("x{}", k)).collect()
}

/// The Mackey functor of the requested construction, for `--phi`.
fn construction_functor(group: &Arc<FiniteGroup>, m: &Arc<MackeyFunctor>, c: &Construction) -> Result<MackeyFunctor, CliError> {
    Ok(match c {
        Construction::Value => (**m).clone(),
        Construction::Sym(n) => mackey::free_tambara::sym_power_mackey(&Arc::new(FreeTambara::new(m)), *n),
        Construction::Power(t) => mackey::norm_power::power_mackey(&parse_gset(group, t)?, m),
        Construction::Norm(h) => {
            let sub = group.class_rep(parse_class(group, h)?);
            mackey::norm_power::norm_mackey(group, sub, &Arc::new(mackey_restriction(m, sub))).map_err(compute_err)?
        }
    })
}

pub fn compute(req: &ComputeRequest) -> Result<Value, CliError> {
    let group = req.group.load()?;
    let m = parse_mackey(&group, &req.mackey)?;
    let classes: Vec<usize> = match &req.level {
        Some(l) => vec![parse_level(&group, l)?],
        None => (0..group.num_classes()).collect(),
    };
    match req.verify.as_deref() {
        None => {}
        Some("oracle") if matches!(req.construction, Construction::Sym(_)) => {}
        Some(other) => return Err(CliError::Parse(format!("no oracle '{}' for {}", other, req.construction.label()))),
    }
    let mut levels = Vec::new();
    if req.phi {
        let f = construction_functor(&group, &m, &req.construction)?;
        for &c in &classes {
            let phi = geometric_fixed_points(&f, c);
            levels.push(level_json(&group, c, &phi.value, plain_generators(phi.value.num_gens())));
        }
    } else {
        for &c in &classes {
            let x = GSet::orbit(&group, group.class_rep(c));
            let xv = GMap::to_point(&x);
            let entry = match &req.construction {
                Construction::Value => {
                    let v = m.level(c);
                    level_json(&group, c, v, plain_generators(v.num_gens()))
                }
                Construction::Sym(n) => {
                    let lvl = sym_power_level(&m, &x, *n);
                    if req.verify.is_some() {
                        let other = extended_power_colimit(&m, &x, *n);
                        if other.invariant_factors() != lvl.value.invariant_factors() || other.free_rank() != lvl.value.free_rank() {
                            return Err(CliError::BoundTooSmall(format!(
                                "Sym_{} at G/{}: presentation gives {} but the colimit gives {}",
                                n,
                                class_label(&group, c),
                                lvl.value.describe(),
                                other.describe()
                            )));
                        }
                    }
                    let gens = lvl.gens.iter().map(|k| format!("{}:{}:{:?}", k.class, k.point, k.fiber)).collect();
                    level_json(&group, c, &lvl.value, gens)
                }
                Construction::Power(t) => {
                    let lvl = power_engine(&parse_gset(&group, t)?, &m).level(&x, &xv);
                    let gens = lvl.gens.iter().map(|k| format!("{}:{}:{:?}", k.class, k.point, k.labels)).collect();
                    level_json(&group, c, &lvl.value, gens)
                }
                Construction::Norm(h) => {
                    let sub = group.class_rep(parse_class(&group, h)?);
                    let res = Arc::new(mackey_restriction(&m, sub));
                    let lvl = norm_engine(&group, sub, &res).map_err(compute_err)?.level(&x, &xv);
                    let gens = lvl.gens.iter().map(|k| format!("{}:{}:{:?}", k.class, k.point, k.labels)).collect();
                    level_json(&group, c, &lvl.value, gens)
                }
            };
            levels.push(entry);
        }
    }
    let mut out = json!({
        "schema": SCHEMA,
        "group": req.group.label(),
        "mackey": req.mackey,
        "construction": req.construction.label(),
        "phi": req.phi,
        "levels": levels,
    });
    if let Construction::Sym(n) = req.construction {
        out["degree"] = json!(n);
    }
    if let Some(v) = &req.verify {
        out["verified"] = json!(v);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct VerifyRequest {
    pub suite: String,
    pub group: GroupSpec,
    pub mackey: Option<String>,
    pub bound: Option<usize>,
}

fn default_bound(suite: &str) -> usize {
    match suite {
        "exponential-lemmas" => 6,
        "multiplicative" | "monad" | "adjunction" | "mackey-axioms" | "tambara-axioms" => 3,
        _ => 2,
    }
}

fn grading_report(group: &Arc<FiniteGroup>, m: &Arc<MackeyFunctor>) -> Report {
    let mut rep = Report::new("grading");
    let ft = FreeTambara::new(m);
    for c in 0..group.num_classes() {
        let x = GSet::orbit(group, group.class_rep(c));
        let t0 = matches!(t0_comparison(&ft, &x).map(|h| h.is_isomorphism()), Ok(Ok(true)));
        rep.record("degree 0", t0, || format!("G/{}", class_label(group, c)));
        let t1 = matches!(t1_comparison(&ft, &x).map(|h| h.is_isomorphism()), Ok(Ok(true)));
        rep.record("degree 1", t1, || format!("G/{}", class_label(group, c)));
    }
    rep
}

fn oracle_report(group: &Arc<FiniteGroup>, m: &Arc<MackeyFunctor>, max_n: usize) -> Report {
    let mut rep = Report::new("oracle");
    for n in 0..=max_n {
        for c in 0..group.num_classes() {
            let x = GSet::orbit(group, group.class_rep(c));
            let a = sym_power_level(m, &x, n);
            let b = extended_power_colimit(m, &x, n);
            let ok = a.value.invariant_factors() == b.invariant_factors() && a.value.free_rank() == b.free_rank();
            rep.record("presentation = colimit", ok, || format!("n={} at G/{}: {} vs {}", n, class_label(group, c), a.value.describe(), b.describe()));
        }
    }
    rep
}

fn adjunction_report(group: &Arc<FiniteGroup>, bound: usize) -> Result<Report, CliError> {
    let mut rep = Report::new("adjunction");
    let bt = Arc::new(burnside_tambara(group));
    for c in 0..group.num_classes() {
        let sub = group.class_rep(c);
        let (h, _) = group.subgroup_group(sub);
        let counit = Counit::new(&bt, sub).map_err(compute_err)?;
        let nres = NormTambara::new(group, sub, &counit.res).map_err(compute_err)?;
        for x in gsets_up_to(&h, bound) {
            let ok = triangle_restriction(&counit, &nres, &x).unwrap_or(false);
            rep.record("Res(counit) after unit", ok, || format!("class {} at {:?}", class_label(group, c), x.orbit_type()));
        }
        let nr = NormTambara::new(group, sub, &Arc::new(burnside_tambara(&h))).map_err(compute_err)?;
        let counit_n = Counit::new(&nr.functor, sub).map_err(compute_err)?;
        for x in gsets_up_to(group, bound) {
            let ok = triangle_norm(&nr, &counit_n, &x).unwrap_or(false);
            rep.record("counit after N(unit)", ok, || format!("class {} at {:?}", class_label(group, c), x.orbit_type()));
        }
    }
    Ok(rep)
}

/// Runs a suite. Returns the JSON report and whether every check passed.
pub fn verify(req: &VerifyRequest) -> Result<(Value, bool), CliError> {
    let group = req.group.load()?;
    let bound = req.bound.unwrap_or_else(|| default_bound(&req.suite));
    if bound == 0 {
        return Err(CliError::BoundTooSmall("bound must be at least 1".into()));
    }
    let functors: Vec<(String, Arc<MackeyFunctor>)> = match &req.mackey {
        Some(s) => vec![(s.clone(), parse_mackey(&group, s)?)],
        None => builtin_examples(&group),
    };
    let mut reports = Vec::new();
    match req.suite.as_str() {
        "exponential-lemmas" => reports.push(check_exponential_lemmas(&group, bound)),
        "mackey-axioms" => {
            for (label, m) in &functors {
                let mut r = check_mackey_axioms(m, bound);
                r.suite = format!("mackey-axioms {}", label);
                reports.push(r);
            }
        }
        "tambara-axioms" => reports.push(check_tambara_axioms(&burnside_tambara(&group), bound)),
        "multiplicative" => {
            let bt = Arc::new(burnside_tambara(&group));
            let mu = Arc::new(multiplicative_structure(&bt));
            reports.push(verify_multiplicative(mu.as_ref(), bound));
            reports.push(multiplicative_round_trip(&bt, mu, bound));
        }
        "monad" => {
            let bt = Arc::new(burnside_tambara(&group));
            reports.push(monad_algebra_check(Arc::new(UniversalAction::of(&bt)), bound, 3));
        }
        "grading" => {
            for (label, m) in &functors {
                let mut r = grading_report(&group, m);
                r.suite = format!("grading {}", label);
                reports.push(r);
            }
        }
        "oracle" => {
            for (label, m) in &functors {
                let mut r = oracle_report(&group, m, bound);
                r.suite = format!("oracle {}", label);
                reports.push(r);
            }
        }
        "adjunction" => reports.push(adjunction_report(&group, bound)?),
        other => return Err(CliError::Parse(format!("unknown suite '{}' (expected one of {})", other, SUITES.join(", ")))),
    }
    if reports.iter().all(|r| r.checks.iter().all(|c| c.instances == 0)) {
        return Err(CliError::BoundTooSmall(format!("bound {} checks no instances", bound)));
    }
    let passed = reports.iter().all(|r| r.passed());
    let out = json!({
        "schema": SCHEMA,
        "suite": req.suite,
        "group": req.group.label(),
        "bound": bound,
        "passed": passed,
        "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
    });
    Ok((out, passed))
}

pub fn catalog() -> Value {
    let groups: Vec<Value> = CATALOG
        .iter()
        .map(|name| {
            let g = catalog_group(name).expect("catalog group");
            let classes: Vec<Value> = (0..g.num_classes())
                .map(|c| {
                    json!({
                        "label": class_label(&g, c),
                        "order": g.subgroup(g.class_rep(c)).order(),
                        "conjugates": g.class_size(c),
                    })
                })
                .collect();
            json!({
                "name": name,
                "order": g.order(),
                "subgroup_classes": classes.len(),
                "classes": classes,
                "examples": builtin_examples(&g).into_iter().map(|(l, _)| l).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"schema": SCHEMA, "groups": groups, "suites": SUITES})
}

pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value");
    s.push('\n');
    s
}
