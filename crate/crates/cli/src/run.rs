//! Executes directives and assembles their results as JSON values with an
//! aligned plain-text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use serde_json::{json, Value};

use diffsys::exact::{render_rational, BasisContext, FormalReal, Rational};
use diffsys::function::{LatticeFunction, LatticeRule, SymbolicFunction};
use diffsys::gallery::{self, BSetContext, EscapeConfig, GalleryReport, Verdict};
use diffsys::operator::DifferenceOperator;
use diffsys::solver::{
    deduce, default_degree_bound, min_sup_norm_on_window, solve_finite, solve_polynomial, solve_vanishing_on,
    verify_certificate, verify_norm_bound, verify_vanishing_certificate, Certificate, EquationSystem,
    SolutionScope, SolveOutcome, SupNormOutcome, SyzygyBudget, VanishSet, VanishingCertificate,
    VanishingOutcome, Window,
};

use crate::config::RunConfig;
use crate::dsl::{self, Directive, Job, NamedSystem, VanishSpec};

pub const SCHEMA: u64 = 1;

/// One executed directive.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: Value,
    pub text: String,
    /// No verdict could be delivered.
    pub inconclusive: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn push(&mut self, o: Outcome) {
        self.outcomes.push(o);
    }

    pub fn exit_code(&self) -> i32 {
        if self.outcomes.iter().any(|o| o.inconclusive) {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let results: Vec<Value> = self.outcomes.iter().map(|o| o.json.clone()).collect();
        let doc = json!({ "schema": SCHEMA, "results": results });
        serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n"
    }

    pub fn to_text(&self) -> String {
        self.outcomes.iter().map(|o| o.text.as_str()).collect()
    }
}

fn q(r: &Rational) -> Value {
    Value::String(render_rational(r))
}

fn budget(cfg: &RunConfig) -> SyzygyBudget {
    SyzygyBudget { max_pairs: cfg.max_pairs, max_degree: cfg.max_degree }
}

fn system_json(ctx: &BasisContext, sys: &NamedSystem) -> Value {
    let eqs: Vec<Value> = sys
        .equations
        .iter()
        .map(|(d, g)| json!({ "operator": d.render(ctx), "rhs": g.render(ctx) }))
        .collect();
    json!({ "basis": ctx.symbols(), "name": sys.name, "equations": eqs })
}

fn values_json(values: &BTreeMap<Vec<i64>, Rational>) -> Value {
    Value::Array(values.iter().map(|(k, v)| json!({ "k": k, "value": q(v) })).collect())
}

fn deduction_json(kind: &str, ctx: &BasisContext, sys: &NamedSystem, c: &Certificate) -> Value {
    let entries: Vec<Value> =
        c.entries().iter().map(|(a, j)| json!({ "multiplier": a.render(ctx), "equation": j })).collect();
    json!({
        "kind": kind,
        "system": system_json(ctx, sys),
        "entries": entries,
        "operator": c.operator().render(ctx),
        "rhs": c.rhs().render(ctx),
    })
}

fn window_json(ctx: &BasisContext, sys: &NamedSystem, window: Window, values: &BTreeMap<Vec<i64>, Rational>) -> Value {
    json!({
        "kind": "window-solution",
        "system": system_json(ctx, sys),
        "radius": window.radius,
        "values": values_json(values),
    })
}

fn deduction_text(out: &mut String, ctx: &BasisContext, c: &Certificate) {
    for (a, j) in c.entries() {
        let _ = writeln!(out, "  ({}) * eq{j}", a.render(ctx));
    }
    let _ = writeln!(out, "  operator: {}", c.operator().render(ctx));
    let _ = writeln!(out, "  rhs: {}", c.rhs().render(ctx));
}

fn error_outcome(head: Value, title: &str, msg: String) -> Outcome {
    let mut json = head;
    json["verdict"] = json!("error");
    json["message"] = json!(msg);
    Outcome { json, text: format!("{title}: error: {msg}\n"), inconclusive: true }
}

/// Runs one directive. `Err` is a usage problem, such as an unknown
/// gallery name.
pub fn run_job(ctx: &BasisContext, job: &Job, cfg: &RunConfig) -> Result<Outcome, String> {
    if let Directive::Gallery { name, params } = &job.directive {
        return run_gallery(name, params, cfg);
    }
    let sys = &job.system;
    let s = sys.system();
    let window = Window::new(cfg.window_radius);
    let keyword = job.directive.keyword();
    let title = format!("{keyword} {}", sys.name);
    let head = json!({ "directive": keyword, "system": sys.name });
    let r = match &job.directive {
        Directive::Solve => Ok(solve(ctx, sys, &s, window, cfg, head.clone(), &title)),
        Directive::MinSupNorm => min_supnorm(ctx, sys, &s, window, head.clone(), &title),
        Directive::PolySolve { degree } => poly_solve(ctx, sys, &s, degree.or(cfg.degree_bound), head.clone(), &title),
        Directive::Deduce { entries, bound } => run_deduce(ctx, sys, &s, entries, bound.as_ref(), head.clone(), &title),
        Directive::Vanish(spec) => vanish(ctx, sys, &s, spec, window, head.clone(), &title),
        Directive::Gallery { .. } => unreachable!("handled above"),
    };
    Ok(r.unwrap_or_else(|e| error_outcome(head, &title, e.to_string())))
}

fn solve(
    ctx: &BasisContext,
    sys: &NamedSystem,
    s: &EquationSystem,
    window: Window,
    cfg: &RunConfig,
    mut json: Value,
    title: &str,
) -> Outcome {
    let mut text = String::new();
    let mut inconclusive = false;
    match solve_finite(s, window, &budget(cfg)) {
        SolveOutcome::Solution { function, window, scope, values } => {
            let scope = match scope {
                SolutionScope::Global => "global",
                SolutionScope::Window => "window",
            };
            json["verdict"] = json!("solution");
            json["function"] = json!(function.render(ctx));
            json["scope"] = json!(scope);
            json["certificate"] = window_json(ctx, sys, window, &values);
            let _ = writeln!(text, "{title}: solution ({scope}, radius {})", window.radius);
            let _ = writeln!(text, "  f = {}", function.render(ctx));
        }
        SolveOutcome::Unsolvable(c) => {
            json["verdict"] = json!("unsolvable");
            json["certificate"] = deduction_json("zero-operator", ctx, sys, &c);
            let _ = writeln!(text, "{title}: unsolvable");
            deduction_text(&mut text, ctx, &c);
        }
        SolveOutcome::Inconclusive(msg) => {
            inconclusive = true;
            json["verdict"] = json!("inconclusive");
            json["message"] = json!(msg);
            let _ = writeln!(text, "{title}: inconclusive: {msg}");
        }
    }
    Outcome { json, text, inconclusive }
}

fn min_supnorm(
    ctx: &BasisContext,
    sys: &NamedSystem,
    s: &EquationSystem,
    window: Window,
    mut json: Value,
    title: &str,
) -> diffsys::Result<Outcome> {
    let mut text = String::new();
    match min_sup_norm_on_window(s, window)? {
        SupNormOutcome::Optimal { value, values } => {
            json["verdict"] = json!("optimal");
            json["value"] = q(&value);
            json["certificate"] = window_json(ctx, sys, window, &values);
            let _ = writeln!(text, "{title}: least window sup norm {} (radius {})", render_rational(&value), window.radius);
        }
        SupNormOutcome::Infeasible(c) => {
            json["verdict"] = json!("unsolvable");
            json["certificate"] = deduction_json("zero-operator", ctx, sys, &c);
            let _ = writeln!(text, "{title}: unsolvable on the window");
            deduction_text(&mut text, ctx, &c);
        }
    }
    Ok(Outcome { json, text, inconclusive: false })
}

fn poly_solve(
    ctx: &BasisContext,
    sys: &NamedSystem,
    s: &EquationSystem,
    degree: Option<usize>,
    mut json: Value,
    title: &str,
) -> diffsys::Result<Outcome> {
    let degree = match degree {
        Some(d) => d,
        None => default_degree_bound(s)?,
    };
    let mut text = String::new();
    json["degree_bound"] = json!(degree);
    match solve_polynomial(s, degree)? {
        Some(p) => {
            let f = SymbolicFunction::polynomial(p.coeffs().to_vec());
            json["verdict"] = json!("solution");
            json["function"] = json!(f.render(ctx));
            json["certificate"] = json!({
                "kind": "solution",
                "system": system_json(ctx, sys),
                "function": f.render(ctx),
            });
            let _ = writeln!(text, "{title}: solution\n  f = {}", f.render(ctx));
        }
        None => {
            json["verdict"] = json!("none");
            let _ = writeln!(text, "{title}: no polynomial solution of degree at most {degree}");
        }
    }
    Ok(Outcome { json, text, inconclusive: false })
}

fn run_deduce(
    ctx: &BasisContext,
    sys: &NamedSystem,
    s: &EquationSystem,
    entries: &[(DifferenceOperator, usize)],
    bound: Option<&Rational>,
    mut json: Value,
    title: &str,
) -> diffsys::Result<Outcome> {
    let c = deduce(s, entries)?;
    let mut text = String::new();
    json["operator_norm"] = q(&c.operator().norm());
    if let Ok(g0) = c.rhs_at_zero() {
        json["rhs_at_zero"] = q(&g0);
    }
    match bound {
        Some(b) => {
            let ok = verify_norm_bound(s, &c, b);
            let mut cert = deduction_json("norm-bound", ctx, sys, &c);
            cert["bound"] = q(b);
            json["verdict"] = json!(if ok { "excluded" } else { "not-excluded" });
            json["certificate"] = cert;
            let what = if ok { "rules out" } else { "does not rule out" };
            let _ = writeln!(text, "{title}: {what} solutions with sup norm at most {}", render_rational(b));
        }
        None if verify_certificate(s, &c) => {
            json["verdict"] = json!("unsolvable");
            json["certificate"] = deduction_json("zero-operator", ctx, sys, &c);
            let _ = writeln!(text, "{title}: unsolvable");
        }
        None => {
            json["verdict"] = json!("deduction");
            json["certificate"] = deduction_json("deduction", ctx, sys, &c);
            let _ = writeln!(text, "{title}: deduction");
        }
    }
    deduction_text(&mut text, ctx, &c);
    Ok(Outcome { json, text, inconclusive: false })
}

fn vanish_set(s: &EquationSystem, spec: &VanishSpec) -> VanishSet {
    match spec {
        VanishSpec::OffLattice => VanishSet::OffLattice(s.shift_lattice().clone()),
        VanishSpec::Cosets(cs) => VanishSet::Cosets(cs.clone()),
    }
}

fn vanish_json(ctx: &BasisContext, spec: &VanishSpec) -> Value {
    match spec {
        VanishSpec::OffLattice => json!("off"),
        VanishSpec::Cosets(cs) => Value::Array(
            cs.iter()
                .map(|(l, x)| json!({ "lattice": l.render(ctx), "offset": ctx.render(x) }))
                .collect(),
        ),
    }
}

fn vanish(
    ctx: &BasisContext,
    sys: &NamedSystem,
    s: &EquationSystem,
    spec: &VanishSpec,
    window: Window,
    mut json: Value,
    title: &str,
) -> diffsys::Result<Outcome> {
    let mut text = String::new();
    match solve_vanishing_on(s, &vanish_set(s, spec), window)? {
        VanishingOutcome::Solution { function, values } => {
            json["verdict"] = json!("solution");
            json["function"] = json!(function.render(ctx));
            json["certificate"] = window_json(ctx, sys, window, &values);
            let _ = writeln!(text, "{title}: solution (window, radius {})\n  f = {}", window.radius, function.render(ctx));
        }
        VanishingOutcome::Obstruction(c) => {
            let mut cert = deduction_json("vanishing", ctx, sys, &c.deduction);
            cert["vanish"] = vanish_json(ctx, spec);
            json["verdict"] = json!("obstructed");
            json["certificate"] = cert;
            let _ = writeln!(text, "{title}: no solution vanishes there");
            deduction_text(&mut text, ctx, &c.deduction);
        }
    }
    Ok(Outcome { json, text, inconclusive: false })
}

pub const GALLERY_NAMES: &[&str] =
    &["arbitrary", "bounded", "unbounded", "succ", "trig", "darboux", "polynomial", "bset"];

fn gallery_keys(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "arbitrary" | "unbounded" => &["n", "radius"],
        "bounded" => &["n", "radius"],
        "succ" => &["k"],
        "trig" => &["n", "samples", "seed"],
        "darboux" => &["k", "radius"],
        "polynomial" => &[],
        "bset" => &["k", "trials", "seed"],
        _ => return None,
    })
}

/// Runs a named construction. Unset parameters fall back to the per-gallery
/// defaults and, for sampling, to the run configuration.
pub fn run_gallery(name: &str, params: &[(String, u64)], cfg: &RunConfig) -> Result<Outcome, String> {
    let keys = gallery_keys(name)
        .ok_or_else(|| format!("unknown gallery `{name}` (known: {})", GALLERY_NAMES.join(", ")))?;
    let mut set: BTreeMap<&str, u64> = BTreeMap::new();
    for (k, v) in params {
        if !keys.contains(&k.as_str()) {
            return Err(format!("gallery `{name}` takes no parameter `{k}`"));
        }
        set.insert(k, *v);
    }
    let get = |k: &str, default: u64| set.get(k).copied().unwrap_or(default);
    let size = |k: &str, default: u64, lo: u64, hi: u64| -> Result<usize, String> {
        let v = get(k, default);
        if v < lo || v > hi {
            return Err(format!("{k} must lie in {lo}..={hi}"));
        }
        Ok(v as usize)
    };
    let radius = |default: u64| -> Result<Window, String> { Ok(Window::new(size("radius", default, 1, 64)? as u32)) };
    let report: diffsys::Result<GalleryReport> = match name {
        "arbitrary" => gallery::arbitrary_functions_report(size("n", 3, 2, 8)?, radius(4)?),
        "bounded" => gallery::bounded_norm_report(size("n", 3, 3, 6)?, radius(2)?),
        "unbounded" => gallery::unbounded_report(size("n", 4, 2, 6)?, radius(4)?),
        "succ" => gallery::periodicity_report(size("k", 5, 2, 8)?),
        "trig" => {
            let ec = EscapeConfig {
                n_max: size("n", 4, 1, 8)?,
                samples: size("samples", cfg.samples as u64, 1, u64::MAX)?,
                seed: get("seed", cfg.seed),
                ..EscapeConfig::default()
            };
            gallery::escape_report(&ec).map(|run| run.report)
        }
        "darboux" => gallery::darboux_report(size("k", 2, 1, 4)?, radius(3)?),
        "polynomial" => gallery::sc_polynomial_witness(),
        "bset" => {
            let k = size("k", 5, 1, 32)?;
            let trials = size("trials", cfg.trials as u64, 1, u64::MAX)?;
            gallery::b_set_shift_difference(&BSetContext::numbered(k), &FormalReal::basis(k), trials, get("seed", cfg.seed))
        }
        _ => unreachable!("checked above"),
    };
    let title = format!("gallery {name}");
    let head = json!({ "directive": "gallery", "name": name });
    Ok(match report {
        Ok(r) => {
            let verdict = if r.any_inconclusive() {
                Verdict::Inconclusive
            } else {
                Verdict::from_bool(r.all_pass())
            };
            let mut json = head;
            json["verdict"] = serde_json::to_value(verdict).expect("verdict serializes");
            json["report"] = serde_json::to_value(&r).expect("report serializes");
            Outcome { json, text: r.render_text(), inconclusive: verdict == Verdict::Inconclusive }
        }
        Err(e) => error_outcome(head, &title, e.to_string()),
    })
}

/// Checks a certificate object, or every certificate in a results document.
/// Each entry is `(kind, valid, reason)`.
pub fn certify(doc: &Value) -> Result<Vec<(String, bool, String)>, String> {
    let certs: Vec<&Value> = if doc.get("kind").is_some() {
        vec![doc]
    } else if let Some(rs) = doc.get("results").and_then(Value::as_array) {
        rs.iter().filter_map(|r| r.get("certificate")).collect()
    } else {
        return Err("expected a certificate object or a results document".into());
    };
    if certs.is_empty() {
        return Err("no certificates found".into());
    }
    certs.into_iter().map(check_one).collect()
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, String> {
    v.get(key).ok_or_else(|| format!("missing field `{key}`"))
}

fn text_field<'a>(v: &'a Value, key: &str) -> Result<&'a str, String> {
    field(v, key)?.as_str().ok_or_else(|| format!("field `{key}` is not a string"))
}

fn loaded(v: &Value) -> Result<(BasisContext, EquationSystem), String> {
    let sys = field(v, "system")?;
    let basis: Vec<String> = serde_json::from_value(field(sys, "basis")?.clone()).map_err(|e| e.to_string())?;
    let ctx = BasisContext::new(basis).map_err(|e| e.to_string())?;
    let mut eqs = Vec::new();
    for e in field(sys, "equations")?.as_array().ok_or("`equations` is not an array")? {
        let d = dsl::parse_operator(&ctx, text_field(e, "operator")?).map_err(|d| format!("operator: {d}"))?;
        let g = dsl::parse_function(&ctx, text_field(e, "rhs")?).map_err(|d| format!("rhs: {d}"))?;
        eqs.push((d, g));
    }
    Ok((ctx, EquationSystem::new(eqs)))
}

fn claimed_deduction(ctx: &BasisContext, v: &Value) -> Result<Certificate, String> {
    let mut entries = Vec::new();
    for e in field(v, "entries")?.as_array().ok_or("`entries` is not an array")? {
        let a = dsl::parse_operator(ctx, text_field(e, "multiplier")?).map_err(|d| format!("multiplier: {d}"))?;
        let j = field(e, "equation")?.as_u64().ok_or("`equation` is not an index")? as usize;
        entries.push((a, j));
    }
    let op = dsl::parse_operator(ctx, text_field(v, "operator")?).map_err(|d| format!("operator: {d}"))?;
    let rhs = dsl::parse_function(ctx, text_field(v, "rhs")?).map_err(|d| format!("rhs: {d}"))?;
    Ok(Certificate::from_parts(entries, op, rhs))
}

fn check_one(v: &Value) -> Result<(String, bool, String), String> {
    let kind = text_field(v, "kind")?.to_string();
    let (ctx, s) = loaded(v)?;
    let (ok, why) = match kind.as_str() {
        "zero-operator" => {
            let c = claimed_deduction(&ctx, v)?;
            (verify_certificate(&s, &c), "combined operator is zero and right-hand side is nonzero")
        }
        "norm-bound" => {
            let c = claimed_deduction(&ctx, v)?;
            let b = diffsys::exact::parse_rational(text_field(v, "bound")?).ok_or("`bound` is not a rational")?;
            (verify_norm_bound(&s, &c, &b), "|g(0)| exceeds bound times operator norm")
        }
        "vanishing" => {
            let c = claimed_deduction(&ctx, v)?;
            let vanish = match field(v, "vanish")? {
                Value::String(t) if t == "off" => VanishSet::OffLattice(s.shift_lattice().clone()),
                Value::Array(cs) => {
                    let mut out = Vec::new();
                    for c in cs {
                        let l = dsl::parse_lattice(&ctx, text_field(c, "lattice")?).map_err(|d| d.to_string())?;
                        let x = dsl::parse_shift(&ctx, text_field(c, "offset")?).map_err(|d| d.to_string())?;
                        out.push((l, x));
                    }
                    VanishSet::Cosets(out)
                }
                _ => return Err("`vanish` must be \"off\" or a list of cosets".into()),
            };
            let vc = VanishingCertificate { deduction: c, vanish };
            (verify_vanishing_certificate(&s, &vc), "operator supported where f vanishes, g(0) nonzero")
        }
        "solution" => {
            let f = dsl::parse_function(&ctx, text_field(v, "function")?).map_err(|d| format!("function: {d}"))?;
            (s.is_solved_by(&f).unwrap_or(false), "every equation holds exactly")
        }
        "window-solution" => {
            let radius = field(v, "radius")?.as_u64().ok_or("`radius` is not a count")? as u32;
            let rank = s.shift_lattice().rank();
            let mut entries = BTreeMap::new();
            for e in field(v, "values")?.as_array().ok_or("`values` is not an array")? {
                let k: Vec<i64> = serde_json::from_value(field(e, "k")?.clone()).map_err(|e| e.to_string())?;
                let val = diffsys::exact::parse_rational(text_field(e, "value")?).ok_or("value is not a rational")?;
                if k.len() != rank {
                    return Err(format!("point {k:?} does not have {rank} coordinates"));
                }
                entries.insert(k, val);
            }
            let window = Window::new(radius);
            let complete = window.points(rank).iter().all(|p| entries.contains_key(&p.0));
            let table = LatticeRule::Table { entries, default: Rational::zero() };
            let lf = LatticeFunction::new(s.shift_lattice().clone(), table, Rational::zero()).map_err(|e| e.to_string())?;
            let holds = s.holds_on_window(&SymbolicFunction::lattice_function(lf), window).unwrap_or(false);
            (complete && holds, "every in-window constraint holds at the listed values")
        }
        "deduction" => {
            let c = claimed_deduction(&ctx, v)?;
            let again = deduce(&s, c.entries()).map_err(|e| e.to_string())?;
            let same = again.operator() == c.operator()
                && diffsys::function::functions_equal(again.rhs(), c.rhs()).map(|z| z.is_zero()).unwrap_or(false);
            (same, "the combination recomputes")
        }
        other => return Err(format!("unknown certificate kind `{other}`")),
    };
    Ok((kind, ok, why.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_script;

    fn run_all(text: &str) -> Report {
        let script = parse_script(text).unwrap();
        let mut report = Report::default();
        for job in script.jobs() {
            report.push(run_job(&script.basis, &job, &RunConfig::default()).unwrap());
        }
        report
    }

    #[test]
    fn triangle_certificate_certifies() {
        let r = run_all("basis b1 b2; eq delta(b1) f = 1; eq delta(b2) f = 1; eq delta(-b1 - b2) f = 1; solve;");
        let doc: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(doc["results"][0]["verdict"], "unsolvable");
        assert_eq!(doc["results"][0]["certificate"]["rhs"], "3");
        let checked = certify(&doc).unwrap();
        assert_eq!(checked.len(), 1);
        assert!(checked[0].1);
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let r = run_all("basis b1 b2; eq delta(b1) f = 1; eq delta(b2) f = 1; eq delta(-b1 - b2) f = 1; solve;");
        let mut doc: Value = serde_json::from_str(&r.to_json()).unwrap();
        doc["results"][0]["certificate"]["rhs"] = json!("2");
        assert!(!certify(&doc).unwrap()[0].1);
    }

    #[test]
    fn window_solution_certifies() {
        let r = run_all("basis b1 b2; eq delta(b1) f = 1; eq delta(b2) f = 1; solve;");
        let doc: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(doc["results"][0]["verdict"], "solution");
        assert!(certify(&doc).unwrap()[0].1);
        let mut bad = doc.clone();
        bad["results"][0]["certificate"]["values"][0]["value"] = json!("7/2");
        assert!(!certify(&bad).unwrap()[0].1);
    }

    #[test]
    fn deduce_with_bound() {
        let r = run_all(
            "basis b1; eq delta(b1) f = 3; deduce with (T[0]) @ 0 bound 1; deduce with (T[0]) @ 0 bound 2;",
        );
        let doc: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(doc["results"][0]["verdict"], "excluded");
        assert_eq!(doc["results"][1]["verdict"], "not-excluded");
        let checked = certify(&doc).unwrap();
        assert_eq!(checked.iter().map(|c| c.1).collect::<Vec<_>>(), vec![true, false]);
    }

    #[test]
    fn poly_and_vanish() {
        let r = run_all("eq delta(1) f = poly(0, 2); poly_solve; vanish off;");
        let doc: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(doc["results"][0]["function"], "poly(0, -1, 1)");
        assert!(certify(&doc).unwrap().iter().all(|c| c.1));
    }

    #[test]
    fn unknown_gallery_is_a_usage_error() {
        assert!(run_gallery("nope", &[], &RunConfig::default()).is_err());
        assert!(run_gallery("succ", &[("n".into(), 3)], &RunConfig::default()).is_err());
    }

    #[test]
    fn json_is_deterministic() {
        let text = "basis b1 b2; eq delta(b1) f = chi(<b1> + 0); eq delta(b2) f = 1; solve; min_supnorm;";
        assert_eq!(run_all(text).to_json(), run_all(text).to_json());
    }
}
