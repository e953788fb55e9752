//! JSON encoding of expressions, towers and semi-Fourier sequences.
//!
//! Rationals are written as strings (`"3"`, `"-1/2"`) so that arbitrarily
//! large values survive a round trip. Expressions use one-key objects:
//! `{"var": true}`, `{"const": "p/q"}`, `{"sum": [..]}`, `{"product": [..]}`,
//! `{"inv": ..}`, `{"exp": ..}`, `{"int": ..}`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::expr::{Expr, TKind};
use crate::poly::DensePoly;
use crate::sequence::{HMultiplier, SfPair, SfSequence};
use crate::tower::{Tower, TowerElem, TowerError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Shape(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error("invalid JSON syntax: {0}")]
    Syntax(String),
}

fn shape(msg: impl Into<String>) -> JsonError {
    JsonError::Shape(msg.into())
}

fn rational_from(v: &Value) -> Result<Rational, JsonError> {
    let s = v
        .as_str()
        .ok_or_else(|| shape("rational must be a string"))?;
    s.parse::<Rational>()
        .map_err(|_| shape(format!("bad rational {s:?}")))
}

fn kind_from(s: &str) -> Option<TKind> {
    match s {
        "inv" => Some(TKind::Inv),
        "exp" => Some(TKind::Exp),
        "int" => Some(TKind::Int),
        _ => None,
    }
}

pub fn expr_to_json(e: &Expr) -> Value {
    match e {
        Expr::Var => json!({"var": true}),
        Expr::Const(c) => json!({"const": c.to_string()}),
        Expr::Sum(cs) => json!({"sum": cs.iter().map(expr_to_json).collect::<Vec<_>>()}),
        Expr::Product(cs) => json!({"product": cs.iter().map(expr_to_json).collect::<Vec<_>>()}),
        Expr::Inv(a) | Expr::Exp(a) | Expr::Int(a) => {
            let (kind, _) = e.as_t().unwrap();
            let mut m = Map::new();
            m.insert(kind.name().into(), expr_to_json(a));
            Value::Object(m)
        }
    }
}

/// Decode an expression; the result is normalized.
pub fn expr_from_json(v: &Value) -> Result<Expr, JsonError> {
    let obj = v
        .as_object()
        .filter(|o| o.len() == 1)
        .ok_or_else(|| shape("expression must be a one-key object"))?;
    let (key, val) = obj.iter().next().unwrap();
    let list = |val: &Value| -> Result<Vec<Expr>, JsonError> {
        val.as_array()
            .ok_or_else(|| shape(format!("{key} expects an array")))?
            .iter()
            .map(expr_from_json)
            .collect()
    };
    Ok(match key.as_str() {
        "var" => Expr::x(),
        "const" => Expr::Const(rational_from(val)?),
        "sum" => Expr::sum(list(val)?),
        "product" => Expr::product(list(val)?),
        k => match kind_from(k) {
            Some(TKind::Inv) => Expr::inv(expr_from_json(val)?),
            Some(TKind::Exp) => Expr::exp(expr_from_json(val)?),
            Some(TKind::Int) => Expr::int(expr_from_json(val)?),
            None => return Err(shape(format!("unknown expression key {k:?}"))),
        },
    })
}

pub fn elem_to_json(a: &TowerElem<Rational>, tower: &Tower<Rational>) -> Value {
    match a {
        TowerElem::Poly(p) => json!({
            "level": 0,
            "coeffs": p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        }),
        TowerElem::Ext {
            level,
            unit,
            coeffs,
        } => {
            let mut m = Map::new();
            m.insert("level".into(), json!(level));
            if tower.kind(*level) == TKind::Exp {
                m.insert("u".into(), json!(unit));
            }
            m.insert(
                "coeffs".into(),
                Value::Array(coeffs.iter().map(|c| elem_to_json(c, tower)).collect()),
            );
            Value::Object(m)
        }
    }
}

/// Decode an element and check that it is canonical in `tower`.
pub fn elem_from_json(
    v: &Value,
    tower: &Tower<Rational>,
) -> Result<TowerElem<Rational>, JsonError> {
    let e = elem_from_json_raw(v)?;
    tower.check(&e)?;
    Ok(e)
}

fn elem_from_json_raw(v: &Value) -> Result<TowerElem<Rational>, JsonError> {
    let level = v
        .get("level")
        .and_then(Value::as_u64)
        .ok_or_else(|| shape("element needs an integer \"level\""))? as usize;
    let coeffs = v
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| shape("element needs a \"coeffs\" array"))?;
    if level == 0 {
        let cs = coeffs
            .iter()
            .map(rational_from)
            .collect::<Result<Vec<_>, _>>()?;
        let p = DensePoly::from_coeffs(cs.clone());
        if p.coeffs().len() != cs.len() {
            return Err(shape("level-0 coefficients end in zero"));
        }
        return Ok(TowerElem::Poly(p));
    }
    let unit = match v.get("u") {
        None => 0,
        Some(u) => u
            .as_i64()
            .ok_or_else(|| shape("\"u\" must be an integer"))?,
    };
    let coeffs = coeffs
        .iter()
        .map(elem_from_json_raw)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TowerElem::Ext {
        level,
        unit,
        coeffs,
    })
}

pub fn tower_to_json(tower: &Tower<Rational>) -> Value {
    Value::Array(
        tower
            .generators()
            .iter()
            .enumerate()
            .map(|(i, g)| {
                json!({
                    "index": i + 1,
                    "kind": g.kind.name(),
                    "arg": elem_to_json(&g.arg, tower),
                    "origin": expr_to_json(&g.origin),
                })
            })
            .collect(),
    )
}

pub fn tower_from_json(v: &Value) -> Result<Tower<Rational>, JsonError> {
    let gens = v
        .as_array()
        .ok_or_else(|| shape("tower must be an array"))?;
    let mut tower = Tower::new();
    for (i, g) in gens.iter().enumerate() {
        if g.get("index").and_then(Value::as_u64) != Some(i as u64 + 1) {
            return Err(shape(format!("generator {} has a wrong index", i + 1)));
        }
        let kind = g
            .get("kind")
            .and_then(Value::as_str)
            .and_then(kind_from)
            .ok_or_else(|| shape("generator kind must be inv, exp or int"))?;
        let arg = elem_from_json(
            g.get("arg")
                .ok_or_else(|| shape("generator needs \"arg\""))?,
            &tower,
        )?;
        let origin = expr_from_json(
            g.get("origin")
                .ok_or_else(|| shape("generator needs \"origin\""))?,
        )?;
        tower.push(kind, arg, origin)?;
    }
    Ok(tower)
}

pub fn h_to_json(h: &HMultiplier) -> Value {
    Value::Array(
        h.iter()
            .map(|(gen, exp)| json!({"gen": gen, "exp": exp}))
            .collect(),
    )
}

pub fn h_from_json(v: &Value) -> Result<HMultiplier, JsonError> {
    let items = v
        .as_array()
        .ok_or_else(|| shape("multiplier must be an array"))?;
    let pairs = items
        .iter()
        .map(|it| {
            let gen = it.get("gen").and_then(Value::as_u64);
            let exp = it.get("exp").and_then(Value::as_i64);
            match (gen, exp) {
                (Some(g), Some(e)) => Ok((g as usize, e)),
                _ => Err(shape("multiplier entries need integer \"gen\" and \"exp\"")),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HMultiplier::from_pairs(pairs))
}

pub fn sequence_to_json(seq: &SfSequence<Rational>) -> Value {
    json!({
        "input": seq.source.as_ref().map(expr_to_json).unwrap_or(Value::Null),
        "element": elem_to_json(&seq.input, &seq.tower),
        "tower": tower_to_json(&seq.tower),
        "sequence": seq
            .pairs
            .iter()
            .map(|p| json!({"g": elem_to_json(&p.g, &seq.tower), "h": h_to_json(&p.h)}))
            .collect::<Vec<_>>(),
    })
}

pub fn sequence_from_json(v: &Value) -> Result<SfSequence<Rational>, JsonError> {
    let tower = tower_from_json(v.get("tower").ok_or_else(|| shape("missing \"tower\""))?)?;
    let source = match v.get("input") {
        None | Some(Value::Null) => None,
        Some(e) => Some(expr_from_json(e)?),
    };
    let input = elem_from_json(
        v.get("element")
            .ok_or_else(|| shape("missing \"element\""))?,
        &tower,
    )?;
    let rows = v
        .get("sequence")
        .and_then(Value::as_array)
        .ok_or_else(|| shape("missing \"sequence\" array"))?;
    let pairs = rows
        .iter()
        .map(|r| {
            let g = elem_from_json(r.get("g").ok_or_else(|| shape("row needs \"g\""))?, &tower)?;
            let h = h_from_json(r.get("h").ok_or_else(|| shape("row needs \"h\""))?)?;
            if !tower.h_is_legal(&h) {
                return Err(shape("multiplier uses an illegal generator power"));
            }
            Ok(SfPair { g, h })
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    if pairs.is_empty() {
        return Err(shape("empty sequence"));
    }
    Ok(SfSequence {
        tower,
        input,
        source,
        pairs,
    })
}

/// Parse JSON text into a sequence.
pub fn sequence_from_str(s: &str) -> Result<SfSequence<Rational>, JsonError> {
    let v: Value = serde_json::from_str(s).map_err(|e| JsonError::Syntax(e.to_string()))?;
    sequence_from_json(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::sequence::eisf;

    #[test]
    fn expression_round_trip() {
        let e = parse("2*int(-exp(-1/2*int(-2*x*inv(4-x^2)))) - 1/2*x").unwrap();
        assert_eq!(expr_from_json(&expr_to_json(&e)).unwrap(), e);
        assert_eq!(expr_to_json(&Expr::x()), json!({"var": true}));
    }

    #[test]
    fn sequence_round_trip() {
        let seq = eisf(&parse("exp(x*int(exp(-x^2))) - int(exp(-x^2)) - 3").unwrap()).unwrap();
        let text = sequence_to_json(&seq).to_string();
        assert_eq!(sequence_from_str(&text).unwrap(), seq);
    }

    #[test]
    fn rejects_non_canonical_elements() {
        let tower = Tower::<Rational>::new();
        let v = json!({"level": 0, "coeffs": ["1", "0"]});
        assert!(elem_from_json(&v, &tower).is_err());
        let v = json!({"level": 1, "coeffs": [{"level": 0, "coeffs": ["1"]}]});
        assert!(elem_from_json(&v, &tower).is_err());
        assert!(expr_from_json(&json!({"log": {"var": true}})).is_err());
    }
}
