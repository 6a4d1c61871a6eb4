//! JSON forms of matrices, root data, p-morphisms, central-product specs
//! and classification triples.
//!
//! Integers whose magnitude exceeds 2^53 are written as decimal strings;
//! on input both numbers and decimal strings are accepted everywhere.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rdk_core::central::CentralProductSpec;
use rdk_core::classify::ClassTriple;
use rdk_core::morphism::PMorphism;
use rdk_core::rootdata::RootDatum;
use rdk_core::zlattice::{FinAbPresentation, IntMatrix, IntVec};
use serde_json::{json, Map, Value};
use std::fmt;

const SAFE: i64 = 1 << 53;

/// A schema violation at a JSON path such as `$.roots[2][0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for SchemaError {}

pub type Decoded<T> = Result<T, SchemaError>;

fn err<T>(path: &str, message: impl Into<String>) -> Decoded<T> {
    Err(SchemaError {
        path: path.to_string(),
        message: message.into(),
    })
}

fn object<'a>(v: &'a Value, path: &str) -> Decoded<&'a Map<String, Value>> {
    v.as_object()
        .map_or_else(|| err(path, "expected an object"), Ok)
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Decoded<(&'a Value, String)> {
    let p = format!("{path}.{key}");
    match m.get(key) {
        Some(v) => Ok((v, p)),
        None => err(&p, "missing field"),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Decoded<&'a Vec<Value>> {
    v.as_array()
        .map_or_else(|| err(path, "expected an array"), Ok)
}

pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if v.abs() <= SAFE => json!(v),
        _ => Value::String(x.to_string()),
    }
}

pub fn int_from_json(v: &Value, path: &str) -> Decoded<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                err(path, "expected an integer")
            }
        }
        Value::String(s) => s
            .trim()
            .parse()
            .map_or_else(|_| err(path, format!("{s:?} is not a decimal integer")), Ok),
        _ => err(path, "expected an integer"),
    }
}

pub fn usize_from_json(v: &Value, path: &str) -> Decoded<usize> {
    let x = int_from_json(v, path)?;
    if x.is_negative() {
        return err(path, "expected a non-negative integer");
    }
    x.to_usize()
        .map_or_else(|| err(path, "integer too large"), Ok)
}

pub fn vec_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

pub fn vec_from_json(v: &Value, path: &str) -> Decoded<IntVec> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| int_from_json(x, &format!("{path}[{i}]")))
        .collect()
}

fn vecs_from_json(v: &Value, path: &str, len: usize) -> Decoded<Vec<IntVec>> {
    let mut out = vec![];
    for (i, x) in array(v, path)?.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let row = vec_from_json(x, &p)?;
        if row.len() != len {
            return err(&p, format!("expected {len} entries, found {}", row.len()));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn matrix_to_json(m: &IntMatrix) -> Value {
    let data: Vec<Value> = (0..m.rows()).map(|i| vec_to_json(&m.row(i))).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "data": data })
}

pub fn matrix_from_json(v: &Value, path: &str) -> Decoded<IntMatrix> {
    let m = object(v, path)?;
    let (rows, rp) = field(m, "rows", path)?;
    let (cols, cp) = field(m, "cols", path)?;
    let (rows, cols) = (usize_from_json(rows, &rp)?, usize_from_json(cols, &cp)?);
    let (data, dp) = field(m, "data", path)?;
    let data = vecs_from_json(data, &dp, cols)?;
    if data.len() != rows {
        return err(&dp, format!("expected {rows} rows, found {}", data.len()));
    }
    Ok(IntMatrix::from_rows(&data, cols))
}

pub fn datum_to_json(r: &RootDatum) -> Value {
    let mut v = json!({
        "rank": r.rank,
        "roots": r.roots.iter().map(|a| vec_to_json(a)).collect::<Vec<_>>(),
        "coroots": r.coroots.iter().map(|a| vec_to_json(a)).collect::<Vec<_>>(),
    });
    if let Some(name) = &r.name {
        v["name"] = json!(name);
    }
    v
}

/// A datum, or any object carrying one under `"datum"` (the output of the
/// constructions), so commands compose through pipes.
pub fn datum_from_json(v: &Value, path: &str) -> Decoded<RootDatum> {
    let m = object(v, path)?;
    if !m.contains_key("rank") {
        if let Some(inner) = m.get("datum") {
            return datum_from_json(inner, &format!("{path}.datum"));
        }
    }
    let (rank, p) = field(m, "rank", path)?;
    let rank = usize_from_json(rank, &p)?;
    let (roots, p) = field(m, "roots", path)?;
    let roots = vecs_from_json(roots, &p, rank)?;
    let (coroots, p) = field(m, "coroots", path)?;
    let coroots = vecs_from_json(coroots, &p, rank)?;
    if coroots.len() != roots.len() {
        return err(
            &p,
            format!("{} coroots for {} roots", coroots.len(), roots.len()),
        );
    }
    let r = RootDatum::new(rank, roots, coroots);
    match m.get("name") {
        None | Some(Value::Null) => Ok(r),
        Some(Value::String(s)) => Ok(r.with_name(s.clone())),
        Some(_) => err(&format!("{path}.name"), "expected a string"),
    }
}

pub fn morphism_to_json(m: &PMorphism) -> Value {
    json!({
        "f": matrix_to_json(&m.f),
        "p": m.p,
        "q": vec_to_json(&m.q),
        "tau": m.tau,
    })
}

pub fn morphism_from_json(v: &Value, path: &str) -> Decoded<PMorphism> {
    let m = object(v, path)?;
    let (f, p) = field(m, "f", path)?;
    let f = matrix_from_json(f, &p)?;
    let (pv, p) = field(m, "p", path)?;
    let prime = int_from_json(pv, &p)?
        .to_u64()
        .map_or_else(|| err(&p, "expected a small non-negative integer"), Ok)?;
    let (q, p) = field(m, "q", path)?;
    let q = vec_from_json(q, &p)?;
    let (tau, p) = field(m, "tau", path)?;
    let tau: Vec<usize> = array(tau, &p)?
        .iter()
        .enumerate()
        .map(|(i, x)| usize_from_json(x, &format!("{p}[{i}]")))
        .collect::<Decoded<_>>()?;
    if q.len() != tau.len() {
        return err(
            &p,
            format!("{} entries in tau but {} in q", tau.len(), q.len()),
        );
    }
    Ok(PMorphism {
        f,
        p: prime,
        q,
        tau,
    })
}

/// `{"r1", "r2", "a": [d₁, …], "h1", "h2"}` with `A = ⊕ Z/dᵢ`.
pub fn spec_to_json(s: &CentralProductSpec) -> Value {
    json!({
        "r1": datum_to_json(&s.r1),
        "r2": datum_to_json(&s.r2),
        "a": vec_to_json(&s.a.invariant_factors),
        "h1": matrix_to_json(&s.h1),
        "h2": matrix_to_json(&s.h2),
    })
}

pub fn spec_from_json(v: &Value, path: &str) -> Decoded<CentralProductSpec> {
    let m = object(v, path)?;
    let (r1, p) = field(m, "r1", path)?;
    let r1 = datum_from_json(r1, &p)?;
    let (r2, p) = field(m, "r2", path)?;
    let r2 = datum_from_json(r2, &p)?;
    let (a, p) = field(m, "a", path)?;
    let a = FinAbPresentation::standard(vec_from_json(a, &p)?);
    let (h1, p) = field(m, "h1", path)?;
    let h1 = matrix_from_json(h1, &p)?;
    let (h2, p) = field(m, "h2", path)?;
    let h2 = matrix_from_json(h2, &p)?;
    Ok(CentralProductSpec { r1, r2, a, h1, h2 })
}

/// `{"semisimple", "torus_rank", "k"}` with `K` given by generator columns.
pub fn triple_to_json(t: &ClassTriple) -> Value {
    json!({
        "semisimple": datum_to_json(&t.semisimple),
        "torus_rank": t.torus_rank,
        "k": matrix_to_json(&t.k),
    })
}

/// The triple itself is validated by the caller.
pub fn triple_from_json(v: &Value, path: &str) -> Decoded<ClassTriple> {
    let m = object(v, path)?;
    let (s, p) = field(m, "semisimple", path)?;
    let semisimple = datum_from_json(s, &p)?;
    let (r, p) = field(m, "torus_rank", path)?;
    let torus_rank = usize_from_json(r, &p)?;
    let (k, p) = field(m, "k", path)?;
    let k = matrix_from_json(k, &p)?;
    Ok(ClassTriple {
        semisimple,
        torus_rank,
        k,
    })
}

pub fn parse(text: &str) -> Decoded<Value> {
    serde_json::from_str(text).map_err(|e| SchemaError {
        path: "$".into(),
        message: format!("malformed JSON: {e}"),
    })
}
