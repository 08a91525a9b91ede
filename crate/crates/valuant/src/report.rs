//! JSON encodings. Numbers are exact: rationals as `[num, den]`, infinity as `"inf"`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value as Json};

use valuant_core::maclane::{AugmentedChain, Extension};
use valuant_core::newton::{NewtonPolygon, RootValuations};
use valuant_core::tower::{BaseField, Fact};
use valuant_core::{Rat, Value};

fn int_json(n: &BigInt) -> Json {
    match n.to_i64() {
        Some(i) => Json::from(i),
        // too large for a JSON integer on most readers
        None => Json::String(n.to_string()),
    }
}

pub fn rat_json(r: &Rat) -> Json {
    Json::Array(vec![int_json(r.numer()), int_json(r.denom())])
}

pub fn value_json(v: &Value) -> Json {
    match v {
        Value::Finite(r) => rat_json(r),
        Value::Infinity => Json::String("inf".into()),
    }
}

pub fn values_json(vs: &[Value]) -> Json {
    Json::Array(vs.iter().map(value_json).collect())
}

pub fn multiset_json(m: &RootValuations) -> Json {
    Json::Array(
        m.entries
            .iter()
            .map(|(v, k)| json!({"value": value_json(v), "multiplicity": k}))
            .collect(),
    )
}

pub fn polygon_json(p: &NewtonPolygon) -> Json {
    Json::Array(p.sides.iter().map(|s| json!({"slope": rat_json(&s.slope), "length": s.length})).collect())
}

pub fn fact_json<T: Clone + Into<Json>>(f: &Fact<T>) -> Json {
    match f {
        Fact::Computed(x) => json!({"value": x.clone().into(), "provenance": "computed"}),
        Fact::Declared(x) => json!({"value": x.clone().into(), "provenance": "declared"}),
        Fact::Unknown => json!({"value": null, "provenance": "unknown"}),
    }
}

pub fn chain_json(base: &BaseField, chain: &AugmentedChain) -> Json {
    let k = base.field();
    let mut out = vec![json!({"gauss": value_json(&chain.base_gamma)})];
    for (phi, v) in &chain.steps {
        out.push(json!({"key": k.poly_to_string(phi, "X"), "value": value_json(v)}));
    }
    Json::Array(out)
}

pub fn extension_json(base: &BaseField, ext: &Extension) -> Json {
    let best = ext.best_linear.as_ref().map(|(c, v)| json!({"center": base.elem_to_string(c), "value": value_json(v)}));
    json!({
        "degree": ext.degree,
        "e": ext.e,
        "f": ext.f,
        "depth": ext.depth,
        "defectless": ext.is_defectless(),
        "chain": chain_json(base, &ext.chain),
        "best_linear": best,
    })
}

/// An object from `(key, value)` pairs; keys come out sorted.
pub fn object<I: IntoIterator<Item = (String, Json)>>(pairs: I) -> Json {
    Json::Object(pairs.into_iter().collect::<Map<String, Json>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use valuant_core::algebra::rat;

    #[test]
    fn exact_encodings() {
        assert_eq!(value_json(&Value::frac(-1, 3)), json!([-1, 3]));
        assert_eq!(value_json(&Value::Infinity), json!("inf"));
        let big = Rat::new(BigInt::from(10).pow(30), BigInt::from(7));
        assert_eq!(rat_json(&big), json!(["1000000000000000000000000000000", 7]));
        assert_eq!(rat_json(&rat(4, 2)), json!([2, 1]));
    }

    #[test]
    fn facts_carry_provenance() {
        assert_eq!(fact_json(&Fact::Declared(3u64)), json!({"value": 3, "provenance": "declared"}));
        assert_eq!(fact_json::<u64>(&Fact::Unknown)["provenance"], json!("unknown"));
    }
}
