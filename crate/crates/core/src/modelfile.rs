//! JSON model files.
//!
//! ```text
//! {
//!   "name": "so(3)",
//!   "coefficient_ring": "Q",
//!   "fiber_rank": 3, "anchor_rank": 0, "transverse_count": 0,
//!   "metric": [[1,0,0],[0,1,0],[0,0,1]],
//!   "anchor": [],
//!   "structure": [{"indices": [1,2,3], "value": "1"}],
//!   "genexact": {"dimL": 3, "structure_constants": [...], "three_form": [...]}
//! }
//! ```
//!
//! Indices are 1-based. `structure_constants` entries `[I,J,K]` give `f_IJ^K`
//! with `I < J`; `structure` and `three_form` indices are strictly increasing.

use std::path::Path;

use num_traits::ToPrimitive;
use serde_json::{Map, Value};

use crate::error::{CourantError, Result};
use crate::genexact::{from_three_form, DForm, LieAlgebroidModel};
use crate::linalg::{parse_rational, CoefficientRing, Rational, UniPoly};
use crate::model::CourantModel;

fn schema(path: &str, message: impl Into<String>) -> CourantError {
    CourantError::Schema { path: path.to_string(), message: message.into() }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(&join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn as_rational(v: &Value, path: &str) -> Result<Rational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                Err(schema(path, format!("non-integer number {n}; write rationals as strings like \"1/2\"")))
            }
        }
        Value::String(s) => parse_rational(s).map_err(|e| schema(path, e.to_string())),
        _ => Err(schema(path, "expected a rational number")),
    }
}

fn as_poly(v: &Value, path: &str) -> Result<UniPoly> {
    match v {
        Value::String(s) => s.parse::<UniPoly>().map_err(|e| schema(path, e.to_string())),
        _ => as_rational(v, path).map(UniPoly::constant),
    }
}

fn matrix(v: &Value, rows: usize, cols: usize, path: &str) -> Result<Vec<Vec<Rational>>> {
    let arr = as_array(v, path)?;
    if arr.len() != rows {
        return Err(schema(path, format!("expected {rows} rows, found {}", arr.len())));
    }
    arr.iter()
        .enumerate()
        .map(|(i, row)| {
            let p = format!("{path}[{i}]");
            let row = as_array(row, &p)?;
            if row.len() != cols {
                return Err(schema(&p, format!("expected {cols} entries, found {}", row.len())));
            }
            row.iter().enumerate().map(|(j, x)| as_rational(x, &format!("{p}[{j}]"))).collect()
        })
        .collect()
}

/// Entries `{indices, value}` with 1-based indices, returned 0-based.
fn entries(v: &Value, arity: usize, bound: usize, increasing: bool, path: &str) -> Result<Vec<(Vec<usize>, UniPoly)>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(n, e)| {
            let p = format!("{path}[{n}]");
            let obj = e.as_object().ok_or_else(|| schema(&p, "expected an object with indices and value"))?;
            let ip = join(&p, "indices");
            let idx = as_array(field(obj, "indices", &p)?, &ip)?
                .iter()
                .map(|x| as_usize(x, &ip))
                .collect::<Result<Vec<_>>>()?;
            if idx.len() != arity {
                return Err(schema(&ip, format!("expected {arity} indices")));
            }
            if idx.iter().any(|&i| i == 0 || i > bound) {
                return Err(schema(&ip, format!("indices must lie in 1..={bound}")));
            }
            let strict = if increasing { idx.windows(2).all(|w| w[0] < w[1]) } else { idx[0] < idx[1] };
            if !strict {
                return Err(CourantError::Antisymmetry(format!("{ip} = {idx:?} must be strictly increasing")));
            }
            let value = as_poly(field(obj, "value", &p)?, &join(&p, "value"))?;
            Ok((idx.into_iter().map(|i| i - 1).collect(), value))
        })
        .collect()
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<CourantModel> {
    let root: Value = serde_json::from_str(text).map_err(|e| CourantError::Parse(e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| schema("", "expected a JSON object"))?;
    let name = field(obj, "name", "")?.as_str().ok_or_else(|| schema("name", "expected a string"))?.to_string();
    let ring = match field(obj, "coefficient_ring", "")?.as_str() {
        Some("Q") => CoefficientRing::Rationals,
        Some("Q[t]") => CoefficientRing::Polynomials,
        _ => return Err(schema("coefficient_ring", "expected \"Q\" or \"Q[t]\"")),
    };
    let r = as_usize(field(obj, "fiber_rank", "")?, "fiber_rank")?;
    let l = as_usize(field(obj, "anchor_rank", "")?, "anchor_rank")?;
    let m = as_usize(field(obj, "transverse_count", "")?, "transverse_count")?;
    if m > 1 {
        return Err(schema("transverse_count", "only 0 or 1 transverse directions are supported"));
    }
    let metric = matrix(field(obj, "metric", "")?, r, r, "metric")?;
    let anchor = matrix(field(obj, "anchor", "")?, l, r, "anchor")?;
    let structure: Vec<([usize; 3], UniPoly)> = entries(field(obj, "structure", "")?, 3, r, true, "structure")?
        .into_iter()
        .map(|(i, v)| ([i[0], i[1], i[2]], v))
        .collect();
    let model = CourantModel::new(name.clone(), ring, metric, anchor, m == 1, structure)?;
    match obj.get("genexact") {
        None | Some(Value::Null) => Ok(model),
        Some(g) => {
            let built = parse_genexact(g, m == 1)?.renamed(&name);
            consistent(&model, &built)?;
            Ok(built)
        }
    }
}

fn parse_genexact(v: &Value, transverse: bool) -> Result<CourantModel> {
    let path = "genexact";
    let obj = v.as_object().ok_or_else(|| schema(path, "expected an object"))?;
    let dim = as_usize(field(obj, "dimL", path)?, "genexact.dimL")?;
    let fp = "genexact.structure_constants";
    let f = entries(field(obj, "structure_constants", path)?, 3, dim, false, fp)?
        .into_iter()
        .map(|(i, v)| {
            let c = v.constant_value().ok_or_else(|| schema(fp, "structure constants must be rational"))?;
            Ok((i[0], i[1], i[2], c))
        })
        .collect::<Result<Vec<_>>>()?;
    let algebroid = LieAlgebroidModel::new(dim, transverse, f)?;
    let c = DForm::from_components(dim, 3, entries(field(obj, "three_form", path)?, 3, dim, true, "genexact.three_form")?)?;
    from_three_form(&algebroid, &c)
}

fn consistent(declared: &CourantModel, built: &CourantModel) -> Result<()> {
    let mismatch = |what: &str| schema("genexact", format!("{what} disagrees with the generalized exact data"));
    if declared.ring() != built.ring() {
        return Err(mismatch("coefficient_ring"));
    }
    if declared.metric() != built.metric() {
        return Err(mismatch("metric"));
    }
    if declared.anchor() != built.anchor() {
        return Err(mismatch("anchor"));
    }
    if declared.structure_entries() != built.structure_entries() {
        return Err(mismatch("structure"));
    }
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<CourantModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CourantError::Io(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

fn rational_json(x: &Rational) -> Value {
    match x.is_integer().then(|| x.to_integer().to_i64()).flatten() {
        Some(i) => Value::from(i),
        None => Value::from(x.to_string()),
    }
}

fn matrix_json(m: &[Vec<Rational>]) -> String {
    if m.is_empty() {
        return "[]".into();
    }
    let rows: Vec<String> = m
        .iter()
        .map(|row| Value::Array(row.iter().map(rational_json).collect()).to_string().replace(',', ", "))
        .collect();
    format!("[\n    {}\n  ]", rows.join(",\n    "))
}

fn entry_json(indices: &[usize], value: String) -> String {
    let idx: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
    format!("{{ \"indices\": [{}], \"value\": {} }}", idx.join(", "), Value::from(value))
}

fn entries_json(entries: Vec<String>, indent: &str) -> String {
    if entries.is_empty() {
        return "[]".into();
    }
    format!("[\n{indent}  {}\n{indent}]", entries.join(&format!(",\n{indent}  ")))
}

/// Serializes a model in the file format (deterministic, one matrix row or
/// tensor entry per line).
pub fn model_to_json(model: &CourantModel) -> String {
    let mut fields = vec![
        format!("\"name\": {}", Value::from(model.name())),
        format!("\"coefficient_ring\": \"{}\"", model.ring().name()),
        format!("\"fiber_rank\": {}", model.fiber_rank()),
        format!("\"anchor_rank\": {}", model.anchor_rank()),
        format!("\"transverse_count\": {}", model.transverse_count()),
        format!("\"metric\": {}", matrix_json(model.metric())),
        format!("\"anchor\": {}", matrix_json(model.anchor())),
        format!(
            "\"structure\": {}",
            entries_json(model.structure_entries().iter().map(|(k, v)| entry_json(k, v.to_string())).collect(), "  ")
        ),
    ];
    if let Some(g) = model.genexact() {
        let d = &g.algebroid;
        let f = d.structure_entries().iter().map(|(i, j, k, v)| entry_json(&[*i, *j, *k], v.to_string())).collect();
        let c = g.three_form.components().iter().map(|(k, v)| entry_json(k, v.to_string())).collect();
        fields.push(format!(
            "\"genexact\": {{\n    \"dimL\": {},\n    \"structure_constants\": {},\n    \"three_form\": {}\n  }}",
            d.dim(),
            entries_json(f, "    "),
            entries_json(c, "    ")
        ));
    }
    format!("{{\n  {}\n}}\n", fields.join(",\n  "))
}
