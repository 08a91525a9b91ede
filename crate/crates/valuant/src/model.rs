//! Group models from JSON.
//!
//! Either a full table
//! `{"elements": [..], "table": [[..]], "distance": [..], "value_of_a": v, "regime": r, "pure": b}`
//! or the cyclic shorthand `{"cyclic": n, "distance_by_gcd": {"1": v, ..}, ..}`.
//! Values are `[num, den]`, an integer, or `"inf"`; the regime is `"defectless"`,
//! `{"principal": v}` or `{"attained": v}`.

use std::path::Path;

use num_bigint::BigInt;
use serde_json::Value as Json;

use valuant_core::ramify::{cyclic_model, CutDescriptor, GroupModel, Regime};
use valuant_core::{Rat, Value};

use crate::error::CliError;

fn bad(path: &str, message: impl Into<String>) -> CliError {
    CliError::Json { path: path.to_string(), message: message.into() }
}

fn big(j: &Json) -> Option<BigInt> {
    match j {
        Json::Number(n) => n.as_i64().map(BigInt::from),
        Json::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub fn parse_value(j: &Json) -> Option<Value> {
    match j {
        Json::String(s) if s == "inf" => Some(Value::Infinity),
        Json::Number(_) => big(j).map(|n| Value::Finite(Rat::from_integer(n))),
        Json::Array(a) if a.len() == 2 => {
            let (n, d) = (big(&a[0])?, big(&a[1])?);
            (d != BigInt::from(0)).then(|| Value::Finite(Rat::new(n, d)))
        }
        _ => None,
    }
}

fn finite(j: &Json) -> Option<Rat> {
    parse_value(j)?.finite().cloned()
}

fn regime(j: Option<&Json>, path: &str) -> Result<Regime, CliError> {
    match j {
        None => Ok(Regime::Defectless),
        Some(Json::String(s)) if s == "defectless" => Ok(Regime::Defectless),
        Some(Json::Object(o)) if o.len() == 1 => {
            let (k, v) = o.iter().next().expect("one entry");
            let r = finite(v).ok_or_else(|| bad(path, "regime endpoint must be a finite value"))?;
            match k.as_str() {
                "principal" => Ok(Regime::Defect(CutDescriptor::Principal(r))),
                "attained" => Ok(Regime::Defect(CutDescriptor::Attained(r))),
                _ => Err(bad(path, format!("unknown regime `{k}`"))),
            }
        }
        Some(_) => Err(bad(path, "regime must be \"defectless\", {\"principal\": v} or {\"attained\": v}")),
    }
}

pub fn parse_model(text: &str, path: &str) -> Result<GroupModel, CliError> {
    let j: Json = serde_json::from_str(text).map_err(|e| bad(path, e.to_string()))?;
    let o = j.as_object().ok_or_else(|| bad(path, "expected an object"))?;
    let value_of_a = o
        .get("value_of_a")
        .and_then(parse_value)
        .ok_or_else(|| bad(path, "`value_of_a` missing or malformed"))?;
    let regime = regime(o.get("regime"), path)?;
    let pure = o.get("pure").and_then(Json::as_bool).unwrap_or(false);
    if let Some(n) = o.get("cyclic") {
        let n = n.as_u64().filter(|&n| (1..=128).contains(&n)).ok_or_else(|| bad(path, "`cyclic` must be in 1..=128"))?
            as usize;
        let table = o
            .get("distance_by_gcd")
            .and_then(Json::as_object)
            .ok_or_else(|| bad(path, "`distance_by_gcd` missing"))?;
        let mut by_gcd = Vec::new();
        for (k, v) in table {
            let g: usize = k.parse().map_err(|_| bad(path, format!("bad divisor `{k}`")))?;
            let v = parse_value(v).ok_or_else(|| bad(path, format!("bad value for divisor {g}")))?;
            by_gcd.push((g, v));
        }
        for d in (1..n).filter(|d| n % d == 0) {
            if !by_gcd.iter().any(|(g, _)| *g == d) {
                return Err(bad(path, format!("no distance for divisor {d}")));
            }
        }
        let dist = |g: usize| by_gcd.iter().find(|(h, _)| *h == g).map(|x| x.1.clone()).unwrap_or(Value::Infinity);
        let mut model = cyclic_model(n, dist, value_of_a, regime);
        model.pure = pure;
        return Ok(model);
    }
    let elements: Vec<String> = o
        .get("elements")
        .and_then(Json::as_array)
        .ok_or_else(|| bad(path, "`elements` missing"))?
        .iter()
        .map(|e| e.as_str().map(str::to_string).ok_or_else(|| bad(path, "element names must be strings")))
        .collect::<Result<_, _>>()?;
    let table: Vec<Vec<usize>> = o
        .get("table")
        .and_then(Json::as_array)
        .ok_or_else(|| bad(path, "`table` missing"))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| bad(path, "table rows must be arrays"))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| bad(path, "table entries must be indices")))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let distance: Vec<Value> = o
        .get("distance")
        .and_then(Json::as_array)
        .ok_or_else(|| bad(path, "`distance` missing"))?
        .iter()
        .map(|v| parse_value(v).ok_or_else(|| bad(path, "malformed distance")))
        .collect::<Result<_, _>>()?;
    let model = GroupModel { elements, table, distance, value_of_a, regime, pure };
    model.validate()?;
    Ok(model)
}

pub fn load_model(path: &Path) -> Result<GroupModel, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    parse_model(&text, &shown)
}
