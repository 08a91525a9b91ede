//! Acceptance suite: one PASS/FAIL line per criterion, then a single assertion
//! that every criterion passed. Expected values are closed-form and exact.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use valuant::expr::Origin;
use valuant::model::load_model;
use valuant::problem::{parse_problem, ProblemFile};
use valuant::theorems::{derivative_polygon, CheckOptions, Status, Study};
use valuant_core::algebra::{Elem, Field, Poly};
use valuant_core::invariants::{distances, epsilon_report, j_invariant, PolyValuation};
use valuant_core::maclane::{approximate, chain_eval};
use valuant_core::random::Sampler;
use valuant_core::ramify::{count_ram, distinct_subgroup_minima, valuation_basis_check, BasisCheck, Distinguished};
use valuant_core::tower::{BaseField, Tower};
use valuant_core::Value;

const OPTS: CheckOptions = CheckOptions { seed: 0, max_iterations: 64, basis_trials: 200 };

type Outcome = Result<String, String>;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

struct Fixture {
    problem: ProblemFile,
    tower: Tower,
}

impl Fixture {
    fn load(name: &str) -> Fixture {
        let text = std::fs::read_to_string(corpus().join(format!("{name}.problem"))).expect("fixture exists");
        let problem = parse_problem(&text).expect("fixture parses");
        let declared = problem.declare.unibranched == Some(true);
        let tower = problem.tower.clone().certify(declared, OPTS.max_iterations);
        Fixture { problem, tower }
    }

    fn elem(&self, src: &str) -> Elem {
        self.problem.element(src, Origin::default()).expect("element parses")
    }

    fn study(&self, src: &str) -> Study {
        Study::new(&self.tower, &self.elem(src), &self.problem.declare, OPTS.max_iterations).expect("study")
    }
}

fn check(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, format!("took {:.2} s, limit {} s", took.as_secs_f64(), limit.as_secs()))
}

fn vp(mut n: u64, p: u64) -> usize {
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

fn values(v: &[Value]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

const KUMMER: [&str; 6] =
    ["kummer_square_f3", "kummer_square_f5", "kummer_square_f7", "kummer_cube_f2", "kummer_cube_f5", "kummer_cube_f7"];
const ARTIN_SCHREIER: [&str; 4] = ["artin_schreier_f2", "artin_schreier_f3", "artin_schreier_f5", "artin_schreier_f7"];

/// Every element the corpus studies: `(fixture, element)`.
fn corpus_elements() -> Vec<(&'static str, &'static str)> {
    let mut out: Vec<(&str, &str)> = KUMMER.iter().chain(&ARTIN_SCHREIER).map(|f| (*f, "a")).collect();
    out.extend([
        ("padic_ramified_sqrt3", "a"),
        ("padic_unramified_sqrt2", "a"),
        ("double_artin_schreier", "beta"),
        ("double_artin_schreier", "beta - alpha"),
        ("double_artin_schreier", "beta - alpha^2"),
        ("imperfect_residue_strict", "a"),
        ("imperfect_residue_sharp", "theta + alpha"),
    ]);
    out
}

fn double_artin_schreier_distances() -> Outcome {
    let start = Instant::now();
    let fx = Fixture::load("double_artin_schreier");
    let beta = distances(&fx.tower, &fx.elem("beta")).map_err(|e| e.to_string())?;
    check(beta.multiset.entries == vec![(Value::zero(), 8)], "beta: multiset is not {0 x 8}")?;
    check(beta.s_set.len() == 1 && beta.omega == Value::zero(), "beta: S is not {0}")?;
    let gamma = distances(&fx.tower, &fx.elem("beta - alpha^2")).map_err(|e| e.to_string())?;
    check(gamma.s_set == vec![Value::zero(), Value::frac(-1, 3)], format!("gamma: S = {{{}}}", values(&gamma.s_set)))?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("beta: S = {{0}} x 8, #S = 1; gamma: S = {{{}}}, #S = 2", values(&gamma.s_set)))
}

fn imperfect_residue_strict() -> Outcome {
    let start = Instant::now();
    let fx = Fixture::load("imperfect_residue_strict");
    let v_theta = fx.tower.valuation(&fx.elem("theta")).map_err(|e| e.to_string())?;
    let a = fx.elem("a");
    let v_a = fx.tower.valuation(&a).map_err(|e| e.to_string())?;
    check(v_theta == Value::zero(), format!("v(theta) = {v_theta}"))?;
    check(v_a == Value::frac(-1, 3), format!("v(a) = {v_a}"))?;
    let p = distances(&fx.tower, &a).map_err(|e| e.to_string())?;
    check(p.degree == 9, format!("deg = {}", p.degree))?;
    check(p.s_set == vec![Value::zero()], format!("S = {{{}}}", values(&p.s_set)))?;
    let bound = vp(p.degree as u64, 3);
    check(p.s_set.len() < bound && bound == 2, format!("#S = {} against v_3(deg) = {bound}", p.s_set.len()))?;
    within(start, Duration::from_secs(10))?;
    Ok("v(theta) = 0, v(a) = -1/3, deg = 9, S = {0}, #S = 1 < 2 = v_3(deg)".into())
}

fn imperfect_residue_sharp() -> Outcome {
    let start = Instant::now();
    let fx = Fixture::load("imperfect_residue_sharp");
    let st = fx.study("theta + alpha");
    let s = &st.profile.s_set;
    check(*s == vec![Value::int(1), Value::zero()], format!("S = {{{}}}", values(s)))?;
    let tame = st.tame_degree().ok_or("tame degree unknown")?;
    check(tame == 3, format!("[L:K] = {tame}"))?;
    let best = st.best_constant.value().ok_or("max v(a - K) unknown")?;
    let bound = vp(st.degree() as u64 / tame, 3) + usize::from(s.contains(&best));
    check(st.s_count() == bound && bound == 2, format!("#S = {} against bound {bound}", st.s_count()))?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("S = {{1, 0}}, #S = 2 = v_3(9/{tame}) + 1"))
}

fn single_distance_iff_full_j() -> Outcome {
    let mut seen = Vec::new();
    for (name, src) in corpus_elements() {
        let fx = Fixture::load(name);
        let a = fx.elem(src);
        let p = distances(&fx.tower, &a).map_err(|e| e.to_string())?;
        let j = j_invariant(&fx.tower, &p.minpoly, &a, &p.omega).map_err(|e| e.to_string())?;
        check(
            (p.s_set.len() == 1) == (j == p.degree),
            format!("{name} {src}: #S = {}, j = {j}, deg = {}", p.s_set.len(), p.degree),
        )?;
        seen.push(format!("{}:{j}/{}", p.s_set.len(), p.degree));
    }
    Ok(format!("{} elements (#S:j/deg) {}", seen.len(), seen.join(" ")))
}

fn tame_kummer() -> Outcome {
    for name in KUMMER {
        let start = Instant::now();
        let fx = Fixture::load(name);
        let st = fx.study("a");
        check(st.is_tame() == Some(true), format!("{name}: not tame"))?;
        check(st.s_count() == 1 && st.depth() == Some(1), format!("{name}: #S = {}, depth {:?}", st.s_count(), st.depth()))?;
        let best = st.branch.as_ref().and_then(|b| b.best_linear.clone()).ok_or(format!("{name}: no best constant"))?;
        check(best.1 == st.profile.omega, format!("{name}: max v(a - K) = {} but omega = {}", best.1, st.profile.omega))?;
        within(start, Duration::from_secs(1)).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} fixtures: #S = depth = 1, omega attained at a base element", KUMMER.len()))
}

fn prime_degree_single_distance() -> Outcome {
    let names: Vec<&str> = ARTIN_SCHREIER.iter().chain(&KUMMER).copied().collect();
    for name in &names {
        let fx = Fixture::load(name);
        let p = distances(&fx.tower, &fx.elem("a")).map_err(|e| e.to_string())?;
        check(p.s_set.len() == 1, format!("{name}: #S = {}", p.s_set.len()))?;
    }
    Ok(format!("{} prime-degree fixtures with #S = 1", names.len()))
}

fn pure_bound() -> Outcome {
    let mut lines = Vec::new();
    let mut strict = None;
    let mut sharp = None;
    for (name, src) in corpus_elements() {
        let fx = Fixture::load(name);
        let st = fx.study(src);
        let pure = st.depth() == Some(1) || fx.problem.declare.pure == Some(true);
        let (Some(tame), Some(best)) = (st.tame_degree(), st.best_constant.value()) else { continue };
        if !pure || tame == st.degree() as u64 {
            continue;
        }
        let p = fx.tower.base().residue_char() as u64;
        let wild = vp(st.degree() as u64 / tame, p);
        let in_s = st.profile.s_set.contains(&best);
        check(st.s_count() <= wild + usize::from(in_s), format!("{name} {src}: #S = {} > bound", st.s_count()))?;
        check(in_s || st.s_count() <= wild, format!("{name} {src}: +1 used without max v(a - K) in S"))?;
        let bound = wild + usize::from(in_s);
        match name {
            "imperfect_residue_strict" => strict = Some(st.s_count() < bound),
            "imperfect_residue_sharp" => sharp = Some(st.s_count() == bound),
            _ => {}
        }
        lines.push(format!("{name}[{src}] {}<={bound}", st.s_count()));
    }
    check(sharp == Some(true), "sharp fixture does not attain the bound")?;
    check(strict == Some(true), "strict fixture is not strict")?;
    Ok(lines.join(" "))
}

fn maclane_suite() -> Outcome {
    let start = Instant::now();
    let mut sampler = Sampler::new(OPTS.seed);
    let mut checked = 0;
    let mut cases: Vec<(Fixture, &str, (u64, u64, usize))> =
        ["kummer_square_f3", "kummer_square_f5", "kummer_square_f7"].iter().map(|n| (Fixture::load(n), "a", (2, 1, 1))).collect();
    cases.push((Fixture::load("double_artin_schreier"), "beta", (9, 1, 2)));
    cases.push((Fixture::load("double_artin_schreier"), "beta - alpha", (9, 1, 1)));
    for (fx, src, want) in &cases {
        let a = fx.elem(src);
        let q = fx.tower.min_poly(&a).map_err(|e| e.to_string())?;
        let base = fx.tower.base();
        let res = approximate(base, &q, OPTS.max_iterations).map_err(|e| e.to_string())?;
        let [ext] = res.extensions.as_slice() else {
            return Err(format!("{src}: {} extensions", res.extensions.len()));
        };
        let got = (ext.e, ext.f, ext.depth);
        check(got == *want, format!("{src}: (e, f, depth) = {got:?}"))?;
        let n = q.degree().unwrap();
        for _ in 0..30 {
            let d = sampler.below(n);
            let f = sampler.base_poly(base, d, 3);
            let via_chain = chain_eval(base, &ext.chain, &f);
            let direct = fx.tower.valuation(&fx.tower.evaluate(&f, &a)).map_err(|e| e.to_string())?;
            check(via_chain == direct, format!("{src}: chain {via_chain} against value {direct}"))?;
            checked += 1;
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("X^2 - t -> (2,1,1), Q_beta -> (9,1,2), Q_(beta-alpha) -> depth 1; {checked} chain values agree"))
}

fn derivative_suite() -> Outcome {
    let base = BaseField::t_adic(&Field::prime(3).unwrap(), "t").unwrap();
    let plain = Tower::new(base.clone(), Vec::new()).map_err(|e| e.to_string())?;
    let mut sampler = Sampler::new(OPTS.seed);
    for i in 0..100 {
        let degree = 1 + sampler.below(8);
        let f: Poly = sampler.base_poly(&base, degree, 3);
        let a = derivative_polygon(&plain, &f).map_err(|e| e.to_string())?;
        check(a.status == Status::Pass, format!("polynomial {i}: {}", a.detail))?;
    }
    let mut pairs = 0;
    for (name, src) in corpus_elements() {
        let fx = Fixture::load(name);
        if !fx.tower.base().residue_is_finite() {
            continue;
        }
        let st = fx.study(src);
        if st.branch.is_none() {
            continue;
        }
        let q = &st.profile.minpoly;
        for gamma in &st.profile.s_set {
            let mu = PolyValuation::Pair(st.element.clone(), gamma.clone());
            let r = epsilon_report(&fx.tower, &mu, q).map_err(|e| e.to_string())?;
            let j = st.j(gamma);
            check(r.argmax.contains(&j), format!("{name} {src} at {gamma}: j = {j}, I = {:?}", r.argmax))?;
            pairs += 1;
        }
    }
    Ok(format!("100 polynomials: epsilon = -first slope, max I = first length; j in I on {pairs} pairs"))
}

fn ramification_suite() -> Outcome {
    let start = Instant::now();
    let dir = corpus();
    let model = |f: &str| load_model(&dir.join(f)).map_err(|e| e.to_string());
    let fx = Fixture::load("double_artin_schreier");
    let s = distances(&fx.tower, &fx.elem("beta - alpha")).map_err(|e| e.to_string())?.s_set.len();
    let elementary = count_ram(&model("elementary_9.json")?).map_err(|e| e.to_string())?;
    check(elementary == 1 && s == 1, format!("(Z/3)^2: #Ram = {elementary}, #S = {s}"))?;
    let cyclic = count_ram(&model("cyclic_two_value.json")?).map_err(|e| e.to_string())?;
    check(cyclic == 2, format!("Z/9 two values: #Ram = {cyclic}"))?;
    for f in ["defect_principal.json", "defect_elementary.json"] {
        let m = model(f)?;
        let (r, minima) = (count_ram(&m).map_err(|e| e.to_string())?, distinct_subgroup_minima(&m));
        check(r == minima && r == 2, format!("{f}: #Ram = {r}, minima = {minima}"))?;
    }
    within(start, Duration::from_secs(1))?;
    Ok("(Z/3)^2: 1 = #S; Z/9: 2; principal cuts: #Ram = #minima = 2".into())
}

fn valuation_basis_suite() -> Outcome {
    let mut done = Vec::new();
    for (name, src) in corpus_elements() {
        let fx = Fixture::load(name);
        let st = fx.study(src);
        let how = if fx.problem.declare.distinguished_at_zero == Some(true) {
            Distinguished::Declared
        } else if st.branch.as_ref().is_some_and(|b| b.depth == 1) {
            Distinguished::Certify
        } else {
            continue;
        };
        let mut sampler = Sampler::new(OPTS.seed);
        match valuation_basis_check(&fx.tower, &st.element, how, 200, &mut sampler) {
            Ok(BasisCheck::Holds { trials: 200 }) => done.push(format!("{name}[{src}]")),
            other => return Err(format!("{name} {src}: {other:?}")),
        }
    }
    check(done.len() >= 10, format!("only {} distinguished fixtures", done.len()))?;
    Ok(format!("200 trials hold on {} elements", done.len()))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_valuant"))
            .args(["verify", "--seed", "0", "--json-only"])
            .arg(corpus())
            .output()
            .map_err(|e| e.to_string())
    };
    let (first, second) = (run()?, run()?);
    check(first.status.success(), format!("exit status {:?}", first.status.code()))?;
    check(first.stdout == second.stdout, "reports differ between runs")?;
    Ok(format!("{} identical bytes", first.stdout.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("double Artin-Schreier distances", double_artin_schreier_distances),
        ("imperfect residue, strict bound", imperfect_residue_strict),
        ("imperfect residue, sharp bound", imperfect_residue_sharp),
        ("single distance iff full j", single_distance_iff_full_j),
        ("tame Kummer", tame_kummer),
        ("prime degree", prime_degree_single_distance),
        ("pure bound", pure_bound),
        ("MacLane", maclane_suite),
        ("derivatives", derivative_suite),
        ("ramification", ramification_suite),
        ("valuation basis", valuation_basis_suite),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({secs:.2} s) {detail}", i + 1),
            Err(why) => {
                println!("criterion {} {name}: FAIL ({secs:.2} s) {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
