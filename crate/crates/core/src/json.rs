//! JSON encodings shared by the command line tool and the browser demo.

use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use crate::affine_weyl::{AffineOrbitRep, Twisting};
use crate::kac_characters::KacCharacter;
use crate::linalg::IntMatrix;
use crate::qseries::QSeries;
use crate::root_data::Weight;
use crate::theta_torus::SeriesMatrix;
use crate::weighted::WeightedQSeries;
use crate::Int;

pub fn int(c: &Int) -> Value {
    Value::Number(Number::from_str(&c.to_string()).expect("integer literal"))
}

pub fn weight(w: &Weight) -> Value {
    json!(w.0)
}

pub fn qseries(s: &QSeries) -> Value {
    json!({
        "min_exp": s.min_exp(),
        "coeffs": s.coeffs().iter().map(int).collect::<Vec<_>>(),
        "trunc_order": s.trunc_order(),
    })
}

pub fn weighted(s: &WeightedQSeries) -> Value {
    json!({
        "trunc_order": s.trunc_order(),
        "terms": s
            .terms()
            .map(|(n, w, c)| json!({"q": n, "weight": weight(w), "coeff": int(c)}))
            .collect::<Vec<_>>(),
    })
}

pub fn orbit(o: &AffineOrbitRep) -> Value {
    json!({"rep": weight(&o.rep), "stabilizer_order": o.stabilizer_order, "regular": o.regular})
}

pub fn orbits(tw: &Twisting, reps: &[AffineOrbitRep], negative: Option<&[AffineOrbitRep]>) -> Value {
    let mut m = Map::new();
    m.insert("group".into(), json!(tw.label()));
    m.insert("level".into(), json!(tw.level()));
    if tw.level().is_none() {
        m.insert("form".into(), json!(tw.signed_form().rows()));
    }
    m.insert("orbits".into(), Value::Array(reps.iter().map(orbit).collect()));
    if let Some(neg) = negative {
        m.insert("negative_basis".into(), Value::Array(neg.iter().map(orbit).collect()));
    }
    Value::Object(m)
}

pub fn character(group: &str, c: &KacCharacter) -> Value {
    let layers: Vec<Value> = c
        .ch
        .layers()
        .map(|(n, layer)| {
            json!({
                "q": n,
                "weights": layer
                    .iter()
                    .map(|(w, m)| json!({"weight": weight(w), "mult": int(m)}))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "group": group,
        "level": c.level,
        "highest_weight": weight(&c.lambda),
        "order": c.trunc_order,
        "layers": layers,
    })
}

pub fn series_matrix(m: &SeriesMatrix) -> Value {
    json!({
        "entries": m.entries.iter().map(|r| r.iter().map(qseries).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "det": qseries(&m.det),
        "det_is_unit": m.det_is_unit(),
    })
}

pub fn pair(group: &str, k: i64, order: i64, pairs: &[(AffineOrbitRep, AffineOrbitRep)], m: &SeriesMatrix) -> Value {
    json!({
        "group": group,
        "level": k,
        "order": order,
        "bijection": pairs
            .iter()
            .map(|(a, b)| json!({"positive": orbit(a), "negative": orbit(b)}))
            .collect::<Vec<_>>(),
        "pairing": series_matrix(m),
    })
}

pub fn theta(tw: &Twisting, order: i64, basis: &[WeightedQSeries], invariant: &[bool], pairing: &SeriesMatrix) -> Value {
    json!({
        "form": tw.signed_form().rows(),
        "order": order,
        "basis": basis
            .iter()
            .zip(invariant)
            .map(|(s, ok)| json!({"series": weighted(s), "invariant": ok}))
            .collect::<Vec<_>>(),
        "pairing": series_matrix(pairing),
    })
}

/// Parses `[[a, b], [c, d]]` (a bare `n` or `[n]` is read as `[[n]]`).
pub fn parse_matrix(s: &str) -> Result<IntMatrix, String> {
    let v: Value = serde_json::from_str(s.trim()).map_err(|e| format!("invalid matrix {s:?}: {e}"))?;
    let as_int = |x: &Value| x.as_i64().ok_or_else(|| format!("non-integer entry {x} in {s:?}"));
    let rows: Vec<Vec<i64>> = match &v {
        Value::Number(_) => vec![vec![as_int(&v)?]],
        Value::Array(items) if items.iter().all(Value::is_number) => vec![items.iter().map(as_int).collect::<Result<_, _>>()?],
        Value::Array(items) => items
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| format!("row {r} of {s:?} is not an array"))?
                    .iter()
                    .map(as_int)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?,
        _ => return Err(format!("invalid matrix {s:?}")),
    };
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(format!("matrix {s:?} is not square"));
    }
    Ok(IntMatrix::new(rows))
}

/// Parses `[1, 0]` or `1,0`.
pub fn parse_weight(s: &str) -> Result<Weight, String> {
    let t = s.trim();
    let inner = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')).unwrap_or(t);
    inner
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| format!("invalid weight {s:?}")))
        .collect::<Result<Vec<_>, _>>()
        .map(Weight)
}
