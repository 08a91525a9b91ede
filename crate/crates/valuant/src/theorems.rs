//! Theorem assertions checked on each element and each group model.
//!
//! Every assertion carries a role tag and comes out as pass, fail or n-a
//! (with the reason it does not apply).

use serde_json::{json, Value as Json};

use valuant_core::algebra::prime_to_part;
use valuant_core::invariants::{
    derivative_points, distances, epsilon_report, j_invariant, root_contacts, DistanceProfile, PolyValuation,
};
use valuant_core::maclane::{approximate, Extension};
use valuant_core::newton::{lower_hull, RootValuations};
use valuant_core::random::Sampler;
use valuant_core::ramify::{
    count_ram, distinct_subgroup_minima, ideals_monotone, valuation_basis_check, BasisCheck, CutDescriptor,
    Distinguished, GroupModel, RamifyError, Regime,
};
use valuant_core::tower::{extension_invariants, ExtensionInvariants, Fact, Tower};
use valuant_core::{Elem, Value};

use crate::error::CliError;
use crate::problem::Declarations;
use crate::report::{fact_json, value_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotApplicable => "n-a",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub tag: &'static str,
    pub status: Status,
    pub detail: String,
}

impl Assertion {
    fn check(tag: &'static str, ok: bool, detail: String) -> Assertion {
        Assertion { tag, status: if ok { Status::Pass } else { Status::Fail }, detail }
    }

    fn na(tag: &'static str, why: &str) -> Assertion {
        Assertion { tag, status: Status::NotApplicable, detail: why.to_string() }
    }

    pub fn to_json(&self) -> Json {
        json!({"tag": self.tag, "status": self.status.as_str(), "detail": self.detail})
    }
}

/// Element assertions, in report order.
pub const ELEMENT_TAGS: &[&str] = &[
    "distance-count-bounds",
    "distance-floor",
    "single-distance-iff-full-j",
    "tame-count-equals-depth",
    "tame-pure-omega-at-base",
    "prime-degree-single-distance",
    "pure-bound",
    "defectless-bound",
    "krasner",
    "j-in-argmax",
    "optimizing-roots",
    "derivative-polygon",
    "j-chain",
    "p-power-j",
    "ostrowski",
    "declared-depth",
    "valuation-basis",
];

/// Group-model assertions, in report order.
pub const RAM_TAGS: &[&str] =
    &["ram-count-equals-distance-count", "defect-count-equals-minima", "ideal-monotone", "power-distance-monotone"];

/// Knobs shared by the randomized assertions.
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub seed: u64,
    pub max_iterations: usize,
    pub basis_trials: usize,
}

/// Everything the element assertions consume, computed once.
#[derive(Clone, Debug)]
pub struct Study {
    pub element: Elem,
    pub profile: DistanceProfile,
    /// `{v(a − z)}` over all roots `z` of `Q`, the root `a` included.
    pub contacts: RootValuations,
    pub invariants: ExtensionInvariants,
    /// The single defectless MacLane branch, when the residue field allows it.
    pub branch: Option<Extension>,
    /// `max v(a − K)`.
    pub best_constant: Fact<Value>,
}

impl Study {
    pub fn new(tower: &Tower, a: &Elem, declare: &Declarations, max_iterations: usize) -> Result<Study, CliError> {
        let profile = distances(tower, a)?;
        let contacts = root_contacts(tower, &profile.minpoly, a)?;
        let invariants = extension_invariants(tower, a, &declare.invariants(), max_iterations)?;
        let branch = if tower.base().residue_is_finite() {
            let (_, res) = tower.maclane(a, max_iterations)?;
            match res.extensions.as_slice() {
                [ext] if ext.is_defectless() => Some(ext.clone()),
                _ => None,
            }
        } else {
            None
        };
        let best_constant = match branch.as_ref().and_then(|b| b.best_linear.as_ref()) {
            Some((_, v)) => Fact::Computed(v.clone()),
            None if declare.distinguished_at_zero == Some(true) => Fact::Declared(profile.value_of_a.clone()),
            None => Fact::Unknown,
        };
        Ok(Study { element: a.clone(), profile, contacts, invariants, branch, best_constant })
    }

    pub fn degree(&self) -> usize {
        self.profile.degree
    }

    pub fn s_count(&self) -> usize {
        self.profile.s_set.len()
    }

    pub fn j(&self, gamma: &Value) -> usize {
        self.contacts.count_at_least(gamma)
    }

    pub fn depth(&self) -> Option<usize> {
        self.invariants.depth.value()
    }

    pub fn tame_degree(&self) -> Option<u64> {
        self.invariants.tame_degree.value()
    }

    pub fn is_tame(&self) -> Option<bool> {
        self.tame_degree().map(|t| t == self.degree() as u64)
    }

    pub fn to_json(&self) -> Json {
        let p = &self.profile;
        json!({
            "degree": p.degree,
            "s_set": p.s_set.iter().map(value_json).collect::<Vec<_>>(),
            "s_count": p.s_set.len(),
            "omega": value_json(&p.omega),
            "value_of_a": value_json(&p.value_of_a),
            "j_omega": self.j(&p.omega),
            "e": fact_json(&self.invariants.e),
            "f": fact_json(&self.invariants.f),
            "defect": fact_json(&self.invariants.defect),
            "depth": fact_json(&self.invariants.depth),
            "tame_degree": fact_json(&self.invariants.tame_degree),
            "best_constant": match &self.best_constant {
                Fact::Computed(v) => json!({"value": value_json(v), "provenance": "computed"}),
                Fact::Declared(v) => json!({"value": value_json(v), "provenance": "declared"}),
                Fact::Unknown => json!({"value": null, "provenance": "unknown"}),
            },
        })
    }
}

fn show(v: &Value) -> String {
    match v {
        Value::Finite(r) => r.to_string(),
        Value::Infinity => "inf".into(),
    }
}

fn vp(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while p > 1 && n > 0 && n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn provenance<T>(f: &Fact<T>) -> &'static str {
    match f {
        Fact::Computed(_) => "computed",
        Fact::Declared(_) => "declared",
        Fact::Unknown => "unknown",
    }
}

/// Runs every element assertion.
pub fn element_assertions(
    tower: &Tower,
    st: &Study,
    declare: &Declarations,
    opts: &CheckOptions,
) -> Result<Vec<Assertion>, CliError> {
    let p = tower.base().residue_char().max(1) as u64;
    let n = st.degree();
    let s = &st.profile.s_set;
    let q = &st.profile.minpoly;
    let a = &st.element;
    let best = st.best_constant.value();
    let mut out = Vec::new();

    let total = st.profile.multiset.total();
    out.push(Assertion::check(
        "distance-count-bounds",
        total == n - 1 && !s.is_empty() && s.len() < n,
        format!("deg = {n}, conjugates = {total}, #S = {}", s.len()),
    ));

    // v(a − c) never exceeds the smallest distance
    let min_s = s.last().expect("nonempty").clone();
    let mut sampler = Sampler::new(opts.seed);
    let mut worst = tower.valuation(a)?;
    for _ in 0..8 {
        let c = sampler.base_element(tower.base(), 2);
        worst = worst.max(tower.valuation(&tower.top().sub(a, &tower.embed_base(&c)))?);
    }
    let floor_ok = worst <= min_s && best.as_ref().is_none_or(|b| *b <= min_s);
    out.push(Assertion::check(
        "distance-floor",
        floor_ok,
        format!(
            "sampled max v(a - c) = {}, max v(a - K) = {} ({}), min S = {}",
            show(&worst),
            best.as_ref().map_or("?".into(), show),
            provenance(&st.best_constant),
            show(&min_s)
        ),
    ));

    let j_omega = j_invariant(tower, q, a, &st.profile.omega)?;
    out.push(Assertion::check(
        "single-distance-iff-full-j",
        (s.len() == 1) == (j_omega == n),
        format!("#S = {}, j(Q, a, omega) = {j_omega}, deg Q = {n}", s.len()),
    ));

    out.push(match (st.is_tame(), st.depth()) {
        (Some(true), Some(d)) => {
            Assertion::check("tame-count-equals-depth", s.len() == d, format!("#S = {}, depth = {d}", s.len()))
        }
        (Some(false), _) => Assertion::na("tame-count-equals-depth", "not tame"),
        _ => Assertion::na("tame-count-equals-depth", "tameness or depth unknown"),
    });

    out.push(match (st.is_tame(), st.depth(), &best) {
        (Some(true), Some(1), Some(b)) => Assertion::check(
            "tame-pure-omega-at-base",
            *b == st.profile.omega,
            format!("omega = {}, max v(a - K) = {}", show(&st.profile.omega), show(b)),
        ),
        (Some(true), Some(1), None) => Assertion::na("tame-pure-omega-at-base", "max v(a - K) unknown"),
        _ => Assertion::na("tame-pure-omega-at-base", "not a tame depth-one element"),
    });

    out.push(if is_prime(n) {
        Assertion::check("prime-degree-single-distance", s.len() == 1, format!("deg = {n}, #S = {}", s.len()))
    } else {
        Assertion::na("prime-degree-single-distance", "degree is not prime")
    });

    out.push(match (st.depth(), st.tame_degree(), &best) {
        (Some(1), Some(t), Some(b)) if t != n as u64 => {
            let wild = vp(n as u64 / t, p);
            let attained = s.contains(b);
            let bound = wild as usize + usize::from(attained);
            let how = if s.len() == bound { "equality" } else { "strict" };
            Assertion::check(
                "pure-bound",
                s.len() <= bound,
                format!(
                    "#S = {}, bound = v_p({n}/{t}) + {} = {bound} ({how}), max v(a - K) = {} {} S",
                    s.len(),
                    usize::from(attained),
                    show(b),
                    if attained { "in" } else { "not in" }
                ),
            )
        }
        (Some(1), Some(t), _) if t == n as u64 => Assertion::na("pure-bound", "tame"),
        (Some(1), _, _) => Assertion::na("pure-bound", "tame degree or max v(a - K) unknown"),
        (Some(_), _, _) => Assertion::na("pure-bound", "depth is not one"),
        (None, _, _) => Assertion::na("pure-bound", "depth unknown"),
    });

    out.push(match (&st.branch, st.is_tame()) {
        (Some(ext), Some(false)) => {
            let (bound, detail) = defectless_bound(tower, ext, n, st.tame_degree().unwrap(), p, opts.max_iterations)?;
            Assertion::check("defectless-bound", s.len() <= bound, format!("#S = {}, {detail}", s.len()))
        }
        (Some(_), _) => Assertion::na("defectless-bound", "tame"),
        (None, _) => Assertion::na("defectless-bound", "no computed defectless branch"),
    });

    out.push(krasner(tower, st)?);

    let defectless = st.invariants.defect.value() == Some(1);
    let mut in_argmax = Vec::new();
    let mut contact_ok = Vec::new();
    for gamma in s {
        let mu = PolyValuation::Pair(a.clone(), gamma.clone());
        let r = epsilon_report(tower, &mu, q)?;
        let j = st.j(gamma);
        in_argmax.push((gamma.clone(), j, r.argmax.contains(&j), r.argmax.clone()));
        contact_ok.push((gamma.clone(), r.epsilon.clone(), r.cross_check()));
    }
    out.push(if defectless {
        Assertion::check(
            "j-in-argmax",
            in_argmax.iter().all(|x| x.2),
            in_argmax
                .iter()
                .map(|(g, j, _, i)| format!("gamma = {}: j = {j}, I = {i:?}", show(g)))
                .collect::<Vec<_>>()
                .join("; "),
        )
    } else {
        Assertion::na("j-in-argmax", "defect not known to be trivial")
    });
    out.push(Assertion::check(
        "optimizing-roots",
        contact_ok.iter().all(|c| c.2 == Some(true)),
        contact_ok
            .iter()
            .map(|(g, e, c)| {
                let verdict = match c {
                    Some(true) => "agrees",
                    Some(false) => "differs",
                    None => "unavailable",
                };
                format!("gamma = {}: epsilon = {e}, root contact {verdict}", show(g))
            })
            .collect::<Vec<_>>()
            .join("; "),
    ));

    out.push(derivative_polygon(tower, q)?);

    let above: Vec<(Value, usize)> = match &best {
        Some(b) => s.iter().filter(|g| *g > b).map(|g| (g.clone(), st.j(g))).collect(),
        None => Vec::new(),
    };
    let show_j = |v: &[(Value, usize)]| {
        if v.is_empty() {
            return "no distance above max v(a - K)".to_string();
        }
        v.iter().map(|(g, j)| format!("j({}) = {j}", show(g))).collect::<Vec<_>>().join(", ")
    };
    out.push(match (st.depth(), &best) {
        (Some(1), Some(_)) => {
            let chain_ok = above.windows(2).all(|w| w[1].1 % w[0].1 == 0) && above.iter().all(|(_, j)| n % j == 0);
            Assertion::check("j-chain", chain_ok, format!("{} over deg {n}", show_j(&above)))
        }
        (Some(1), None) => Assertion::na("j-chain", "max v(a - K) unknown"),
        _ => Assertion::na("j-chain", "not known to be pure"),
    });
    out.push(match (st.depth(), st.tame_degree(), &best) {
        (Some(1), Some(t), Some(_)) if t != n as u64 => {
            let wild = n as u64 / t;
            let ok = n as u64 % t == 0 && above.iter().all(|(_, j)| wild % *j as u64 == 0);
            Assertion::check("p-power-j", ok, format!("{} dividing deg/tame = {wild}", show_j(&above)))
        }
        (Some(1), Some(t), Some(_)) if t == n as u64 => Assertion::na("p-power-j", "tame"),
        (Some(1), _, _) => Assertion::na("p-power-j", "tame degree or max v(a - K) unknown"),
        _ => Assertion::na("p-power-j", "not known to be pure"),
    });

    let inv = &st.invariants;
    out.push(match (inv.e.value(), inv.f.value(), inv.defect.value()) {
        (Some(e), Some(f), Some(d)) => Assertion::check(
            "ostrowski",
            e * f * d == n as u64,
            format!("e = {e} ({}), f = {f} ({}), defect = {d}, deg = {n}", provenance(&inv.e), provenance(&inv.f)),
        ),
        _ => Assertion::na("ostrowski", "e, f or defect unknown"),
    });

    let declared_depth = declare.invariants().depth;
    out.push(match (declared_depth, &st.branch) {
        (Some(d), Some(ext)) => Assertion::check(
            "declared-depth",
            d == ext.depth,
            format!("declared {d}, computed {}", ext.depth),
        ),
        (Some(_), None) => Assertion::na("declared-depth", "depth cannot be computed here"),
        (None, _) => Assertion::na("declared-depth", "nothing declared"),
    });

    out.push(basis_assertion(tower, st, declare, opts)?);
    Ok(out)
}

/// `b = a + π^m` with `v(π^m) > ω` generates the same field.
fn krasner(tower: &Tower, st: &Study) -> Result<Assertion, CliError> {
    let Some(omega) = st.profile.omega.finite() else {
        return Ok(Assertion::na("krasner", "omega is infinite"));
    };
    let m = omega.floor().to_integer() + 1;
    let m = i64::try_from(m).map_err(|_| CliError::query("omega out of range"))?;
    let base = tower.base();
    let shift = base.uniformizer_pow(m);
    let b = tower.top().add(&st.element, &tower.embed_base(&shift));
    let db = tower.min_poly(&b)?.degree().expect("nonzero");
    Ok(Assertion::check(
        "krasner",
        db == st.degree() && base.value(&shift) > st.profile.omega,
        format!("v(b - a) = {}, deg b = {db}", show(&base.value(&shift))),
    ))
}

/// `ε = −(first slope)` and `max I = (first length)` for `μ = gauss(0)`.
pub fn derivative_polygon(tower: &Tower, f: &valuant_core::Poly) -> Result<Assertion, CliError> {
    let mu = PolyValuation::Gauss(Value::zero());
    let r = epsilon_report(tower, &mu, f)?;
    let poly = lower_hull(&derivative_points(tower, &mu, f)?)?;
    let first = &poly.sides[0];
    let max_i = *r.argmax.last().expect("nonempty");
    let ok = first.start == 0 && r.epsilon == -first.slope.clone() && max_i == first.length;
    Ok(Assertion::check(
        "derivative-polygon",
        ok,
        format!("epsilon = {}, first slope = {}, max I = {max_i}, first length = {}", r.epsilon, first.slope, first.length),
    ))
}

/// `Σ_{i<ε} v_p(deg a_i / tame_i) + n − ε + 1` over the chain of last keys at each degree.
fn defectless_bound(
    tower: &Tower,
    ext: &Extension,
    degree: usize,
    tame: u64,
    p: u64,
    max_iterations: usize,
) -> Result<(usize, String), CliError> {
    let base = tower.base();
    // (degree, tame degree) of a = a_0, a_1, …, a_n with decreasing degrees
    let mut chain: Vec<(usize, u64)> = vec![(degree, tame)];
    let mut keys: Vec<&valuant_core::Poly> = ext.chain.steps.iter().map(|s| &s.0).collect();
    keys.reverse();
    let mut last = degree;
    for phi in keys {
        let d = phi.degree().expect("nonzero");
        if d >= last {
            continue;
        }
        last = d;
        let t = if d == 1 {
            1
        } else {
            let res = approximate(base, phi, max_iterations)?;
            let e = &res.extensions[0];
            prime_to_part(e.e, p) * e.f
        };
        chain.push((d, t));
    }
    if last > 1 {
        chain.push((1, 1));
    }
    let n = chain.len() - 1;
    let eps = chain.iter().position(|(d, t)| *d as u64 == *t).expect("a_n lies in K");
    let wild: u32 = chain[..eps].iter().map(|(d, t)| vp(*d as u64 / t, p)).sum();
    let bound = wild as usize + n - eps + 1;
    let degs: Vec<String> = chain.iter().map(|(d, t)| format!("{d}/{t}")).collect();
    Ok((bound, format!("bound = {bound} from chain deg/tame [{}], first tame index {eps}, depth {n}", degs.join(", "))))
}

fn basis_assertion(tower: &Tower, st: &Study, declare: &Declarations, opts: &CheckOptions) -> Result<Assertion, CliError> {
    const TAG: &str = "valuation-basis";
    let how = if declare.distinguished_at_zero == Some(true) {
        Distinguished::Declared
    } else if st.branch.as_ref().is_some_and(|b| b.depth == 1) {
        Distinguished::Certify
    } else {
        return Ok(Assertion::na(TAG, "(a, 0) not known to be distinguished"));
    };
    let mut sampler = Sampler::new(opts.seed);
    match valuation_basis_check(tower, &st.element, how, opts.basis_trials, &mut sampler) {
        Ok(BasisCheck::Holds { trials }) => Ok(Assertion::check(
            TAG,
            true,
            format!("{trials} trials, (a, 0) {}", if how == Distinguished::Declared { "declared" } else { "certified" }),
        )),
        Ok(BasisCheck::Witness { value, minimum, .. }) => Ok(Assertion::check(
            TAG,
            false,
            format!("witness: value {} against minimum {}", show(&value), show(&minimum)),
        )),
        Err(RamifyError::NotDistinguishedPair(why)) => Ok(Assertion::na(TAG, &why)),
        Err(e) => Err(e.into()),
    }
}

/// Assertions on a group model, optionally tied to the distances of an element.
pub fn ram_assertions(model: &GroupModel, profile: Option<&DistanceProfile>) -> Result<Vec<Assertion>, CliError> {
    let count = count_ram(model)?;
    let minima = distinct_subgroup_minima(model);
    let mut out = Vec::new();
    let e = model.identity().expect("validated");
    let mut ds: Vec<Value> = (0..model.order()).filter(|&i| i != e).map(|i| model.distance[i].clone()).collect();
    ds.sort_by(|a, b| b.cmp(a));
    let mut model_multiset: Vec<(Value, usize)> = Vec::new();
    for d in ds {
        match model_multiset.last_mut() {
            Some((v, k)) if *v == d => *k += 1,
            _ => model_multiset.push((d, 1)),
        }
    }
    out.push(match &model.regime {
        Regime::Defectless => {
            let s_model = model_multiset.len();
            match profile {
                Some(p) => {
                    let same = p.multiset.entries == model_multiset && p.value_of_a == model.value_of_a;
                    Assertion::check(
                        "ram-count-equals-distance-count",
                        same && count == p.s_set.len(),
                        format!(
                            "#Ram = {count}, #S = {}, model distances {} the element",
                            p.s_set.len(),
                            if same { "match" } else { "differ from" }
                        ),
                    )
                }
                None => Assertion::check(
                    "ram-count-equals-distance-count",
                    count == s_model,
                    format!("#Ram = {count}, distinct distances = {s_model}"),
                ),
            }
        }
        Regime::Defect(_) => Assertion::na("ram-count-equals-distance-count", "defect regime"),
    });
    out.push(match &model.regime {
        Regime::Defect(CutDescriptor::Principal(d)) => Assertion::check(
            "defect-count-equals-minima",
            count == minima,
            format!("#Ram = {count}, distinct subgroup minima = {minima}, cut endpoint {d}"),
        ),
        _ => Assertion::na("defect-count-equals-minima", "not a principal-cut defect model"),
    });
    out.push(Assertion::check("ideal-monotone", ideals_monotone(model)?, format!("{} subgroups", model.subgroups().len())));
    out.push(Assertion::check("power-distance-monotone", model.powers_monotone(), "distance of g^k at least that of g".to_string()));
    Ok(out)
}
