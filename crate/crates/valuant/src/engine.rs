//! Query dispatch: one JSON report line per `[query]` entry.

use std::path::Path;

use serde_json::{json, Value as Json};

use valuant_core::invariants::{
    abstract_key_check, derivative_points, distances, epsilon_report, j_invariant, KeyCheck, PolyValuation,
};
use valuant_core::maclane::approximate;
use valuant_core::newton::lower_hull;
use valuant_core::random::Sampler;
use valuant_core::ramify::{count_ram, distinct_subgroup_minima, ideal_of_subgroup, valuation_basis_check, BasisCheck, Distinguished, Ideal};
use valuant_core::tower::{extension_invariants, Tower, Unibranched};
use valuant_core::{Elem, Poly, Rat, Value};

use crate::error::CliError;
use crate::expr::Origin;
use crate::model::load_model;
use crate::problem::{ProblemFile, Query};
use crate::report::{extension_json, fact_json, multiset_json, polygon_json, rat_json, value_json, values_json};
use crate::theorems::{element_assertions, ram_assertions, Assertion, CheckOptions, Status, Study};

/// Outcome of one query.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok,
    Fail,
    Error,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Ok => "ok",
            Outcome::Fail => "fail",
            Outcome::Error => "error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct QueryReport {
    pub line: usize,
    pub command: Json,
    pub result: Option<Json>,
    pub assertions: Vec<Assertion>,
    pub error: Option<(String, String)>,
}

impl QueryReport {
    pub fn outcome(&self) -> Outcome {
        if self.error.is_some() {
            Outcome::Error
        } else if self.assertions.iter().any(|a| a.status == Status::Fail) {
            Outcome::Fail
        } else {
            Outcome::Ok
        }
    }
}

/// A problem with its certified tower, ready for queries.
pub struct Session<'a> {
    pub problem: &'a ProblemFile,
    pub tower: Tower,
    pub opts: CheckOptions,
    /// Directory that relative model paths resolve against.
    pub dir: &'a Path,
}

impl<'a> Session<'a> {
    pub fn new(problem: &'a ProblemFile, dir: &'a Path, opts: CheckOptions) -> Session<'a> {
        let declared = problem.declare.unibranched == Some(true);
        let tower = problem.tower.clone().certify(declared, opts.max_iterations);
        Session { problem, tower, opts, dir }
    }

    pub fn unibranched(&self) -> &'static str {
        match self.tower.status() {
            Unibranched::Certified => "certified",
            Unibranched::Declared => "declared",
            Unibranched::Refuted(_) => "refuted",
            Unibranched::Unknown(_) => "unknown",
        }
    }

    /// Declared facts, echoed with their provenance.
    pub fn declared_json(&self) -> Json {
        Json::Array(
            self.problem
                .declare
                .listed()
                .into_iter()
                .map(|(k, v)| json!({"fact": k, "value": v, "provenance": "declared"}))
                .collect(),
        )
    }

    pub fn run_all(&self) -> Vec<QueryReport> {
        self.problem.queries.iter().map(|q| self.run(q)).collect()
    }

    pub fn run(&self, q: &Query) -> QueryReport {
        let command = Json::Object(q.args.iter().map(|(k, (v, _))| (k.clone(), Json::String(v.clone()))).collect());
        match self.dispatch(q) {
            Ok((result, assertions)) => QueryReport { line: q.line, command, result: Some(result), assertions, error: None },
            Err(e) => QueryReport {
                line: q.line,
                command,
                result: None,
                assertions: Vec::new(),
                error: Some((e.code().to_string(), e.to_string())),
            },
        }
    }

    fn arg<'q>(&self, q: &'q Query, key: &str) -> Result<(&'q str, Origin), CliError> {
        q.get(key).ok_or_else(|| CliError::query(format!("line {}: `{}` needs `{key}=`", q.line, q.cmd())))
    }

    fn element(&self, q: &Query) -> Result<Elem, CliError> {
        let (src, at) = self.arg(q, "element")?;
        self.problem.element(src, at)
    }

    /// `poly=` over the base, or the minimal polynomial of `element=`.
    fn poly(&self, q: &Query) -> Result<Poly, CliError> {
        match q.get("poly") {
            Some((src, at)) => self.problem.base_poly(src, at),
            None => Ok(self.tower.min_poly(&self.element(q)?)?),
        }
    }

    fn valuation_arg(&self, q: &Query) -> Result<PolyValuation, CliError> {
        let (src, at) = self.arg(q, "mu")?;
        parse_valuation(src, at, self.problem)
    }

    fn usize_arg(&self, q: &Query, key: &str, default: usize) -> Result<usize, CliError> {
        match q.get(key) {
            None => Ok(default),
            Some((s, at)) => s.parse().map_err(|_| CliError::Parse {
                line: at.line,
                column: at.column,
                message: format!("`{key}` must be a non-negative integer"),
            }),
        }
    }

    fn dispatch(&self, q: &Query) -> Result<(Json, Vec<Assertion>), CliError> {
        let tw = &self.tower;
        let k = tw.base().field();
        let none = Vec::new();
        Ok(match q.cmd() {
            "val" => (json!({"value": value_json(&tw.valuation(&self.element(q)?)?)}), none),
            "minpoly" => {
                let m = tw.min_poly(&self.element(q)?)?;
                (json!({"minpoly": k.poly_to_string(&m, "X"), "degree": m.degree()}), none)
            }
            "distances" => {
                let p = distances(tw, &self.element(q)?)?;
                let result = json!({
                    "degree": p.degree,
                    "multiset": multiset_json(&p.multiset),
                    "s_set": values_json(&p.s_set),
                    "s_count": p.s_set.len(),
                    "omega": value_json(&p.omega),
                    "value_of_a": value_json(&p.value_of_a),
                });
                (result, none)
            }
            "j" => {
                let a = self.element(q)?;
                let f = match q.get("poly") {
                    Some((src, at)) => self.problem.base_poly(src, at)?,
                    None => tw.min_poly(&a)?,
                };
                let gamma = match q.get("gamma") {
                    Some((s, at)) => parse_gamma(s, at)?,
                    None => distances(tw, &a)?.omega,
                };
                let j = j_invariant(tw, &f, &a, &gamma)?;
                (json!({"gamma": value_json(&gamma), "j": j}), none)
            }
            "epsilon" => {
                let f = self.poly(q)?;
                let r = epsilon_report(tw, &self.valuation_arg(q)?, &f)?;
                let per_s: Vec<Json> = r
                    .per_s
                    .iter()
                    .map(|(s, v, quot)| json!({"s": s, "value": value_json(v), "drop": quot.as_ref().map(rat_json)}))
                    .collect();
                let result = json!({
                    "epsilon": rat_json(&r.epsilon),
                    "argmax": r.argmax,
                    "b": r.b,
                    "mu_f": rat_json(&r.mu_f),
                    "per_s": per_s,
                    "root_contact": r.root_contact.as_ref().map(value_json),
                    "cross_check": r.cross_check(),
                });
                (result, none)
            }
            "polygon" => {
                let f = self.poly(q)?;
                let points: Vec<(usize, Value)> = match q.get("mu") {
                    Some(_) => derivative_points(tw, &self.valuation_arg(q)?, &f)?,
                    None => f.coeffs().iter().enumerate().map(|(i, c)| (i, tw.base().value(c))).collect(),
                };
                (json!({"polygon": polygon_json(&lower_hull(&points)?)}), none)
            }
            "approximate" => {
                let f = self.poly(q)?;
                let r = approximate(tw.base(), &f, self.opts.max_iterations)?;
                let exts: Vec<Json> = r.extensions.iter().map(|e| extension_json(tw.base(), e)).collect();
                (json!({"extension_count": exts.len(), "extensions": exts}), none)
            }
            "invariants" => {
                let a = self.element(q)?;
                let inv = extension_invariants(tw, &a, &self.problem.declare.invariants(), self.opts.max_iterations)?;
                let result = json!({
                    "degree": inv.degree,
                    "e": fact_json(&inv.e),
                    "f": fact_json(&inv.f),
                    "defect": fact_json(&inv.defect),
                    "depth": fact_json(&inv.depth),
                    "tame_degree": fact_json(&inv.tame_degree),
                });
                (result, none)
            }
            "basis" => {
                let a = self.element(q)?;
                let trials = self.usize_arg(q, "trials", self.opts.basis_trials)?;
                let how = match q.get("distinguished").map(|x| x.0) {
                    Some("declared") => Distinguished::Declared,
                    Some("certify") => Distinguished::Certify,
                    None if self.problem.declare.distinguished_at_zero == Some(true) => Distinguished::Declared,
                    None => Distinguished::Certify,
                    Some(other) => return Err(CliError::query(format!("unknown distinguished mode `{other}`"))),
                };
                let mut sampler = Sampler::new(self.opts.seed);
                let result = match valuation_basis_check(tw, &a, how, trials, &mut sampler)? {
                    BasisCheck::Holds { trials } => json!({"outcome": "holds", "trials": trials}),
                    BasisCheck::Witness { coeffs, value, minimum } => json!({
                        "outcome": "witness",
                        "coefficients": coeffs.iter().map(|c| tw.base().elem_to_string(c)).collect::<Vec<_>>(),
                        "value": value_json(&value),
                        "minimum": value_json(&minimum),
                    }),
                };
                (result, none)
            }
            "key" => {
                let f = self.poly(q)?;
                let trials = self.usize_arg(q, "trials", self.opts.basis_trials)?;
                let mut sampler = Sampler::new(self.opts.seed);
                let result = match abstract_key_check(tw, &f, &self.valuation_arg(q)?, trials, &mut sampler)? {
                    KeyCheck::Certified { checked } => json!({"outcome": "certified", "checked": checked}),
                    KeyCheck::Refuted { witness } => {
                        json!({"outcome": "refuted", "witness": k.poly_to_string(&witness, "X")})
                    }
                };
                (result, none)
            }
            "ram" => {
                let (path, _) = self.arg(q, "model")?;
                let model = load_model(&self.dir.join(path))?;
                let profile = match q.get("element") {
                    Some(_) => Some(distances(tw, &self.element(q)?)?),
                    None => None,
                };
                let count = count_ram(&model)?;
                let mut ideals = Vec::new();
                for h in model.subgroups() {
                    let members: Vec<&str> =
                        (0..model.order()).filter(|i| h & (1 << i) != 0).map(|i| model.elements[i].as_str()).collect();
                    let ideal = match ideal_of_subgroup(&model, h)? {
                        None => continue,
                        Some(Ideal::Unit) => json!("unit"),
                        Some(Ideal::Cut(c)) => json!({"endpoint": rat_json(&c.endpoint), "closed": c.closed}),
                    };
                    ideals.push(json!({"subgroup": members, "ideal": ideal}));
                }
                let result = json!({
                    "order": model.order(),
                    "count_ram": count,
                    "distinct_minima": distinct_subgroup_minima(&model),
                    "s_count": profile.as_ref().map(|p| p.s_set.len()),
                    "ideals": ideals,
                });
                (result, ram_assertions(&model, profile.as_ref())?)
            }
            "verify" => {
                let a = self.element(q)?;
                let st = Study::new(tw, &a, &self.problem.declare, self.opts.max_iterations)?;
                let assertions = element_assertions(tw, &st, &self.problem.declare, &self.opts)?;
                (st.to_json(), assertions)
            }
            "" => return Err(CliError::query(format!("line {}: query without `cmd=`", q.line))),
            other => return Err(CliError::query(format!("line {}: unknown command `{other}`", q.line))),
        })
    }
}

/// `inf`, an integer or `n/d`.
pub fn parse_gamma(s: &str, at: Origin) -> Result<Value, CliError> {
    let s = s.trim();
    if s == "inf" {
        return Ok(Value::Infinity);
    }
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    compact.parse::<Rat>().map(Value::Finite).map_err(|_| CliError::Parse {
        line: at.line,
        column: at.column,
        message: format!("`{s}` is not a value"),
    })
}

/// `gauss(γ)`, `pair(expr, γ)` or `point(expr)`.
pub fn parse_valuation(src: &str, at: Origin, problem: &ProblemFile) -> Result<PolyValuation, CliError> {
    let s = src.trim();
    let err = |m: &str| CliError::Parse { line: at.line, column: at.column, message: m.to_string() };
    let (head, rest) = s.split_once('(').ok_or_else(|| err("expected gauss(..), pair(..) or point(..)"))?;
    let inner = rest.strip_suffix(')').ok_or_else(|| err("missing closing parenthesis"))?;
    let inner_at = Origin { line: at.line, column: at.column + head.len() + 1 };
    match head.trim() {
        "gauss" => Ok(PolyValuation::Gauss(parse_gamma(inner, inner_at)?)),
        "point" => Ok(PolyValuation::Point(problem.element(inner, inner_at)?)),
        "pair" => {
            let comma = top_level_comma(inner).ok_or_else(|| err("pair needs an element and a value"))?;
            let gamma_at = Origin { line: at.line, column: inner_at.column + comma + 1 };
            Ok(PolyValuation::Pair(problem.element(&inner[..comma], inner_at)?, parse_gamma(&inner[comma + 1..], gamma_at)?))
        }
        other => Err(err(&format!("unknown valuation `{other}`"))),
    }
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    let mut found = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => found = Some(i),
            _ => {}
        }
    }
    found
}

impl QueryReport {
    /// The report line; `extra` entries (fixture name, sidecar verdict) are merged in.
    pub fn to_json(&self, session_declared: &Json, unibranched: &str, extra: Vec<(String, Json)>) -> Json {
        let mut o = serde_json::Map::new();
        o.insert("line".into(), json!(self.line));
        o.insert("command".into(), self.command.clone());
        o.insert("result".into(), self.result.clone().unwrap_or(Json::Null));
        o.insert("assertions".into(), Json::Array(self.assertions.iter().map(Assertion::to_json).collect()));
        o.insert("declared".into(), session_declared.clone());
        o.insert("unibranched".into(), json!(unibranched));
        o.insert(
            "error".into(),
            self.error.as_ref().map_or(Json::Null, |(c, m)| json!({"code": c, "message": m})),
        );
        o.insert("status".into(), json!(self.outcome().as_str()));
        for (k, v) in extra {
            o.insert(k, v);
        }
        Json::Object(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::parse_problem;

    fn opts() -> CheckOptions {
        CheckOptions { seed: 0, max_iterations: 64, basis_trials: 20 }
    }

    #[test]
    fn valuations_and_gammas() {
        let p = parse_problem("[base]\nkind=t-adic\nchar=3\n[tower]\ns: X^2 - t\n").unwrap();
        let at = Origin { line: 1, column: 1 };
        assert_eq!(parse_gamma("-1/3", at).unwrap(), Value::frac(-1, 3));
        assert_eq!(parse_gamma("inf", at).unwrap(), Value::Infinity);
        assert!(parse_gamma("x", at).is_err());
        assert!(matches!(parse_valuation("pair(s + t*(1+s), 1/2)", at, &p).unwrap(), PolyValuation::Pair(_, g) if g == Value::frac(1, 2)));
        assert!(matches!(parse_valuation("gauss(0)", at, &p).unwrap(), PolyValuation::Gauss(_)));
        assert!(parse_valuation("pair(s)", at, &p).is_err());
    }

    #[test]
    fn queries_on_sqrt_t() {
        let text = "[base]\nkind=t-adic\nchar=3\n[tower]\ns: X^2 - t\n[query]\ncmd=distances element=s\ncmd=verify element=s\ncmd=frobnicate\ncmd=val element=q\n";
        let p = parse_problem(text).unwrap();
        let dir = Path::new(".");
        let s = Session::new(&p, dir, opts());
        let r = s.run_all();
        assert_eq!(r[0].result.as_ref().unwrap()["s_set"], json!([[1, 2]]));
        assert_eq!(r[1].outcome(), Outcome::Ok);
        let tags: Vec<(&str, Status)> = r[1].assertions.iter().map(|a| (a.tag, a.status)).collect();
        assert!(tags.contains(&("tame-count-equals-depth", Status::Pass)));
        assert!(tags.contains(&("tame-pure-omega-at-base", Status::Pass)));
        assert_eq!(r[2].error.as_ref().unwrap().0, "cli.query");
        assert_eq!(r[3].error.as_ref().unwrap().0, "cli.undefined_symbol");
    }
}
