//! JSON documents for algebras, states, polytopes, representations,
//! observables and spectral measures. Rationals are written as `"p/q"`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::algebra::{validate_effect_algebra, AlgebraError, EffectAlgebra, Elem, RawTable};
use crate::error::{Error, FormatError};
use crate::observables::{make_observable, Observable};
use crate::rational::{fmt_q, parse_q, Q};
use crate::representation::{EffectTribe, FuzzyFn, PointSet, Representation};
use crate::spectral::{CoordinateBounds, SpectralMeasure};
use crate::states::{Constraint, State, StatePolytope};

#[derive(Serialize, Deserialize)]
struct AlgebraDoc {
    elements: Vec<String>,
    zero: String,
    one: String,
    sum: Vec<[String; 3]>,
}

fn lookup(labels: &[String], l: &str) -> Result<usize, FormatError> {
    labels
        .iter()
        .position(|x| x == l)
        .ok_or_else(|| FormatError::UnknownLabel(l.to_string()))
}

fn elem(m: &EffectAlgebra, l: &str) -> Result<Elem, FormatError> {
    m.elem(l)
        .ok_or_else(|| FormatError::UnknownLabel(l.to_string()))
}

pub fn algebra_to_json(m: &EffectAlgebra) -> Value {
    let l = |e: Elem| m.label(e).to_string();
    let doc = AlgebraDoc {
        elements: m.labels().to_vec(),
        zero: l(m.zero()),
        one: l(m.one()),
        sum: m
            .defined_sums()
            .map(|(a, b, c)| [l(a), l(b), l(c)])
            .collect(),
    };
    serde_json::to_value(doc).expect("serializable")
}

/// Parses and validates an algebra document with at most `max_size`
/// elements.
pub fn algebra_from_json(text: &str, max_size: usize) -> Result<EffectAlgebra, Error> {
    let doc: AlgebraDoc = serde_json::from_str(text).map_err(FormatError::from)?;
    if doc.elements.len() > max_size {
        return Err(AlgebraError::SizeLimitExceeded {
            size: doc.elements.len(),
            limit: max_size,
        }
        .into());
    }
    let ls = &doc.elements;
    let raw = RawTable {
        labels: ls.clone(),
        zero: lookup(ls, &doc.zero)?,
        one: lookup(ls, &doc.one)?,
        sums: doc
            .sum
            .iter()
            .map(|[a, b, c]| Ok([lookup(ls, a)?, lookup(ls, b)?, lookup(ls, c)?]))
            .collect::<Result<_, FormatError>>()?,
    };
    Ok(validate_effect_algebra(&raw)?)
}

fn qs(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(fmt_q(x))).collect())
}

fn parse_qs(v: &[String]) -> Result<Vec<Q>, FormatError> {
    v.iter().map(|s| parse_q(s)).collect()
}

pub fn state_to_json(m: &EffectAlgebra, s: &State) -> Value {
    let values: Map<String, Value> = m
        .elements()
        .map(|e| (m.label(e).to_string(), Value::String(fmt_q(s.value(e)))))
        .collect();
    json!({ "values": values })
}

#[derive(Deserialize)]
struct StateDoc {
    values: std::collections::HashMap<String, String>,
}

/// Every element must be given a value; extra labels are an error.
pub fn state_from_json(m: &EffectAlgebra, text: &str) -> Result<State, FormatError> {
    let doc: StateDoc = serde_json::from_str(text)?;
    if let Some(l) = doc.values.keys().find(|l| m.elem(l).is_none()) {
        return Err(FormatError::UnknownLabel(l.clone()));
    }
    let values = m
        .elements()
        .map(|e| {
            let s = doc
                .values
                .get(m.label(e))
                .ok_or_else(|| FormatError::Invalid(format!("no value for {}", m.label(e))))?;
            parse_q(s)
        })
        .collect::<Result<_, _>>()?;
    Ok(State { values })
}

pub fn polytope_to_json(m: &EffectAlgebra, p: &StatePolytope) -> Value {
    let l = |e: Elem| Value::String(m.label(e).to_string());
    let constraints: Vec<Value> = p
        .constraints
        .iter()
        .map(|c| match *c {
            Constraint::Normalization => json!({ "kind": "normalization", "element": l(m.one()) }),
            Constraint::Additivity { a, b, sum } => {
                json!({ "kind": "additivity", "a": l(a), "b": l(b), "sum": l(sum) })
            }
            Constraint::Bounds { e } => json!({ "kind": "bounds", "element": l(e) }),
        })
        .collect();
    json!({
        "dimension": p.dimension,
        "constraints": constraints,
        "vertices": p.vertices.iter().map(|v| state_to_json(m, v)).collect::<Vec<_>>(),
    })
}

#[derive(Serialize, Deserialize)]
struct RepresentationDoc {
    carrier: Vec<String>,
    omega0: Vec<String>,
    ideal: Vec<Vec<String>>,
    functions: Vec<Vec<String>>,
    h: Vec<String>,
    target: Value,
}

fn point_set(carrier: &[String], names: &[String]) -> Result<PointSet, FormatError> {
    names
        .iter()
        .map(|n| lookup(carrier, n))
        .collect::<Result<Vec<_>, _>>()
        .map(PointSet::from_points)
}

fn names(carrier: &[String], a: PointSet) -> Vec<String> {
    a.points().map(|i| carrier[i].clone()).collect()
}

pub fn representation_to_json(rep: &Representation) -> Value {
    let carrier = rep.tribe().carrier();
    let m = rep.target();
    json!({
        "carrier": carrier,
        "omega0": names(carrier, rep.omega0()),
        "ideal": rep.ideal().iter().map(|&a| names(carrier, a)).collect::<Vec<_>>(),
        "functions": rep.tribe().functions().iter().map(|f| qs(&f.0)).collect::<Vec<_>>(),
        "h": rep.h().iter().map(|&e| m.label(e)).collect::<Vec<_>>(),
        "target": algebra_to_json(m),
    })
}

pub fn representation_from_json(text: &str, max_size: usize) -> Result<Representation, Error> {
    let doc: RepresentationDoc = serde_json::from_str(text).map_err(FormatError::from)?;
    let target = algebra_from_json(&doc.target.to_string(), max_size)?;
    let functions = doc
        .functions
        .iter()
        .map(|f| parse_qs(f).map(FuzzyFn))
        .collect::<Result<Vec<_>, _>>()?;
    let omega0 = point_set(&doc.carrier, &doc.omega0)?;
    let ideal = doc
        .ideal
        .iter()
        .map(|a| point_set(&doc.carrier, a))
        .collect::<Result<Vec<_>, _>>()?;
    let h = doc
        .h
        .iter()
        .map(|l| elem(&target, l))
        .collect::<Result<Vec<_>, _>>()?;
    let tribe = EffectTribe::new(doc.carrier, functions)?;
    Ok(Representation::new(tribe, target, h, omega0, ideal)?)
}

#[derive(Serialize, Deserialize)]
struct ObservableDoc {
    support: Vec<String>,
    values: Vec<String>,
}

pub fn observable_to_json(m: &EffectAlgebra, x: &Observable) -> Value {
    json!({
        "support": qs(&x.support),
        "values": x.values.iter().map(|&e| m.label(e)).collect::<Vec<_>>(),
    })
}

pub fn observable_from_json(m: &EffectAlgebra, text: &str) -> Result<Observable, Error> {
    let doc: ObservableDoc = serde_json::from_str(text).map_err(FormatError::from)?;
    let support = parse_qs(&doc.support)?;
    let values = doc
        .values
        .iter()
        .map(|l| elem(m, l))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(make_observable(m, support, values)?)
}

pub fn spectral_to_json(m: &EffectAlgebra, mu: &SpectralMeasure) -> Value {
    let masses: Map<String, Value> = mu
        .support
        .iter()
        .zip(&mu.masses)
        .map(|(t, &e)| (fmt_q(t), Value::String(m.label(e).to_string())))
        .collect();
    json!({
        "element": m.label(mu.element),
        "support": qs(&mu.support),
        "masses": masses,
    })
}

pub fn bounds_to_json(m: &EffectAlgebra, b: &CoordinateBounds) -> Value {
    let per: Map<String, Value> = m
        .elements()
        .map(|e| {
            let i = e.index();
            (
                m.label(e).to_string(),
                json!([fmt_q(&b.lower[i]), fmt_q(&b.upper[i])]),
            )
        })
        .collect();
    json!({ "unique": b.is_singleton(), "bounds": per })
}
