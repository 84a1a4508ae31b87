//! JSON codecs for posets, dimension vectors, block matrices and derived
//! posets. Encoders emit canonical values: object keys sorted (serde_json's
//! default map is ordered) and zero dimension entries or empty blocks
//! omitted.

use std::collections::BTreeMap;
use std::sync::Arc;

use posetrep::derivation::{DerivedPoset, MarkedPair};
use posetrep::field::{format_rational, parse_rational};
use posetrep::tits::CriticalDimension;
use posetrep::{
    CriticalEmbedding, DimensionVector, ExactMatrix, Field, FieldSpec, Fp, MatrixRep, Poset,
    Rationals,
};
use serde_json::{json, Map, Value};

use crate::CliError;

/// Key of the added point `0` in dimension JSON.
pub const ZERO_KEY: &str = "0";

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Core(posetrep::Error::Invalid(msg.into()))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object()
        .ok_or_else(|| invalid(format!("{what} must be a JSON object")))
}

fn field_of<'a>(v: &'a Map<String, Value>, key: &str) -> Result<&'a Value, CliError> {
    v.get(key)
        .ok_or_else(|| invalid(format!("missing key `{key}`")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize, CliError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| invalid(format!("{what} must be a non-negative integer")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str, CliError> {
    v.as_str()
        .ok_or_else(|| invalid(format!("{what} must be a string")))
}

pub fn encode_poset(p: &Poset) -> Value {
    let relations: Vec<Value> = p
        .covers()
        .iter()
        .map(|&(a, b)| json!([p.label(a), p.label(b)]))
        .collect();
    json!({ "elements": p.labels(), "relations": relations })
}

pub fn decode_poset(v: &Value) -> Result<Poset, CliError> {
    let obj = object(v, "poset")?;
    let elements = field_of(obj, "elements")?
        .as_array()
        .ok_or_else(|| invalid("`elements` must be an array"))?
        .iter()
        .map(|e| as_str(e, "element label").map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    let mut relations = Vec::new();
    if let Some(rels) = obj.get("relations") {
        for r in rels
            .as_array()
            .ok_or_else(|| invalid("`relations` must be an array"))?
        {
            match r.as_array().map(Vec::as_slice) {
                Some([a, b]) => relations.push((
                    as_str(a, "relation end")?.to_string(),
                    as_str(b, "relation end")?.to_string(),
                )),
                _ => return Err(invalid("each relation must be a pair [a, b]")),
            }
        }
    }
    Ok(Poset::new(&elements, &relations)?)
}

pub fn encode_dimension(p: &Poset, d: &DimensionVector) -> Value {
    let mut m = Map::new();
    if d.d0 > 0 {
        m.insert(ZERO_KEY.into(), json!(d.d0));
    }
    for (i, &x) in d.values.iter().enumerate() {
        if x > 0 {
            m.insert(p.label(i).to_string(), json!(x));
        }
    }
    Value::Object(m)
}

pub fn decode_dimension(p: &Poset, v: &Value) -> Result<DimensionVector, CliError> {
    let mut d = DimensionVector::zero(p.len());
    for (k, x) in object(v, "dimension vector")? {
        let x = as_usize(x, &format!("entry `{k}`"))?;
        if k == ZERO_KEY {
            d.d0 = x;
        } else {
            d.values[p.index_of(k)?] = x;
        }
    }
    Ok(d)
}

/// Fields whose elements have a JSON form.
pub trait JsonField: Field {
    fn encode_field(&self) -> Value;
    fn encode_elem(&self, e: &Self::Elem) -> Value;
    fn decode_elem(&self, v: &Value) -> Result<Self::Elem, CliError>;
}

impl JsonField for Fp {
    fn encode_field(&self) -> Value {
        json!({ "p": self.p() })
    }

    fn encode_elem(&self, e: &u32) -> Value {
        json!(e)
    }

    fn decode_elem(&self, v: &Value) -> Result<u32, CliError> {
        let x = v
            .as_i64()
            .ok_or_else(|| invalid(format!("matrix entry {v} is not an integer")))?;
        Ok(x.rem_euclid(self.p() as i64) as u32)
    }
}

impl JsonField for Rationals {
    fn encode_field(&self) -> Value {
        json!("Q")
    }

    fn encode_elem(&self, e: &num::BigRational) -> Value {
        json!(format_rational(e))
    }

    fn decode_elem(&self, v: &Value) -> Result<num::BigRational, CliError> {
        match v {
            Value::String(s) => Ok(parse_rational(s)?),
            Value::Number(n) if n.is_i64() => Ok(self.from_i64(n.as_i64().unwrap_or_default())),
            _ => Err(invalid(format!("matrix entry {v} is not a rational"))),
        }
    }
}

pub fn encode_field_spec(spec: FieldSpec) -> Value {
    match spec {
        FieldSpec::Prime(p) => json!({ "p": p }),
        FieldSpec::Rationals => json!("Q"),
    }
}

pub fn decode_field_spec(v: &Value) -> Result<FieldSpec, CliError> {
    match v {
        Value::String(s) => parse_field_flag(s),
        Value::Object(o) => {
            let p = field_of(o, "p")?
                .as_u64()
                .ok_or_else(|| invalid("field `p` must be an integer"))?;
            Ok(FieldSpec::prime(p)?)
        }
        _ => Err(invalid("`field` must be \"Q\" or {\"p\": prime}")),
    }
}

/// Parses the `--field` flag: a prime or `Q`.
pub fn parse_field_flag(s: &str) -> Result<FieldSpec, CliError> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("q") {
        return Ok(FieldSpec::Rationals);
    }
    let p: u64 = s
        .parse()
        .map_err(|_| invalid(format!("field must be a prime or Q, got `{s}`")))?;
    Ok(FieldSpec::prime(p)?)
}

pub fn encode_matrix<F: JsonField>(m: &ExactMatrix<F>) -> Value {
    let f = m.field();
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|e| f.encode_elem(e)).collect()))
            .collect(),
    )
}

fn decode_matrix<F: JsonField>(
    f: &F,
    v: &Value,
    rows: usize,
    what: &str,
) -> Result<ExactMatrix<F>, CliError> {
    let arr = v
        .as_array()
        .ok_or_else(|| invalid(format!("block `{what}` must be an array of rows")))?;
    if arr.is_empty() {
        return Ok(ExactMatrix::zeros(f, rows, 0));
    }
    if arr.len() != rows {
        return Err(invalid(format!(
            "block `{what}` has {} rows, expected {rows}",
            arr.len()
        )));
    }
    let mut data = Vec::new();
    let mut cols = None;
    for r in arr {
        let r = r
            .as_array()
            .ok_or_else(|| invalid(format!("block `{what}` must be an array of rows")))?;
        if *cols.get_or_insert(r.len()) != r.len() {
            return Err(invalid(format!(
                "block `{what}` has rows of different lengths"
            )));
        }
        for e in r {
            data.push(f.decode_elem(e)?);
        }
    }
    Ok(ExactMatrix::new(f.clone(), rows, cols.unwrap_or(0), data)?)
}

/// Block matrix JSON. Blocks without columns are omitted; when there are no
/// rows the column counts go in a separate `widths` object.
pub fn encode_rep<F: JsonField>(u: &MatrixRep<F>) -> Value {
    let p = u.poset();
    let mut out = Map::new();
    out.insert("field".into(), u.field().encode_field());
    out.insert("d0".into(), json!(u.d0()));
    if u.d0() == 0 {
        let widths: Map<String, Value> = (0..p.len())
            .filter(|&a| u.block(a).cols() > 0)
            .map(|a| (p.label(a).to_string(), json!(u.block(a).cols())))
            .collect();
        out.insert("widths".into(), Value::Object(widths));
    } else {
        let blocks: Map<String, Value> = (0..p.len())
            .filter(|&a| u.block(a).cols() > 0)
            .map(|a| (p.label(a).to_string(), encode_matrix(u.block(a))))
            .collect();
        out.insert("blocks".into(), Value::Object(blocks));
    }
    Value::Object(out)
}

pub fn decode_rep_over<F: JsonField>(
    poset: &Arc<Poset>,
    f: &F,
    v: &Value,
) -> Result<MatrixRep<F>, CliError> {
    let obj = object(v, "representation")?;
    let d0 = as_usize(field_of(obj, "d0")?, "`d0`")?;
    let mut blocks: Vec<ExactMatrix<F>> = (0..poset.len())
        .map(|_| ExactMatrix::zeros(f, d0, 0))
        .collect();
    if let Some(b) = obj.get("blocks") {
        for (label, m) in object(b, "`blocks`")? {
            blocks[poset.index_of(label)?] = decode_matrix(f, m, d0, label)?;
        }
    }
    if let Some(w) = obj.get("widths") {
        for (label, x) in object(w, "`widths`")? {
            let a = poset.index_of(label)?;
            let x = as_usize(x, &format!("width of `{label}`"))?;
            if d0 > 0 && blocks[a].cols() != x {
                return Err(invalid(format!(
                    "width of `{label}` disagrees with its block"
                )));
            }
            blocks[a] = ExactMatrix::zeros(f, d0, x);
        }
    }
    Ok(MatrixRep::new(poset.clone(), f.clone(), d0, blocks)?)
}

/// A block matrix over a field chosen at run time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyRep {
    Prime(MatrixRep<Fp>),
    Rational(MatrixRep<Rationals>),
}

impl AnyRep {
    pub fn to_json(&self) -> Value {
        match self {
            AnyRep::Prime(u) => encode_rep(u),
            AnyRep::Rational(u) => encode_rep(u),
        }
    }
}

pub fn decode_rep(poset: &Arc<Poset>, v: &Value) -> Result<AnyRep, CliError> {
    let spec = decode_field_spec(field_of(object(v, "representation")?, "field")?)?;
    Ok(match spec {
        FieldSpec::Prime(p) => AnyRep::Prime(decode_rep_over(poset, &Fp::new(p as u64)?, v)?),
        FieldSpec::Rationals => AnyRep::Rational(decode_rep_over(poset, &Rationals, v)?),
    })
}

/// Derived poset JSON: the base poset, the pivot, the marked pairs
/// `[p', p'']` in the order that fixes the labels of `S^a`, and the result.
pub fn encode_derived(ctx: &DerivedPoset) -> Value {
    let base = ctx.base();
    let pairs: Vec<Value> = ctx
        .pairs()
        .iter()
        .map(|p| json!([base.label(p.first), base.label(p.second)]))
        .collect();
    json!({
        "base": encode_poset(base),
        "pivot": base.label(ctx.pivot()),
        "pairs": pairs,
        "result": encode_poset(ctx.result()),
    })
}

pub fn decode_derived(v: &Value) -> Result<DerivedPoset, CliError> {
    let obj = object(v, "derived poset")?;
    let base = Arc::new(decode_poset(field_of(obj, "base")?)?);
    let pivot = base.index_of(as_str(field_of(obj, "pivot")?, "`pivot`")?)?;
    let mut pairs = Vec::new();
    for p in field_of(obj, "pairs")?
        .as_array()
        .ok_or_else(|| invalid("`pairs` must be an array"))?
    {
        match p.as_array().map(Vec::as_slice) {
            Some([a, b]) => pairs.push(MarkedPair {
                first: base.index_of(as_str(a, "pair member")?)?,
                second: base.index_of(as_str(b, "pair member")?)?,
            }),
            _ => return Err(invalid("each pair must be [p', p'']")),
        }
    }
    let ctx = DerivedPoset::from_parts(base, pivot, pairs)?;
    if let Some(r) = obj.get("result") {
        if *r != encode_poset(ctx.result()) {
            return Err(invalid(
                "`result` does not match the poset derived from `base`, `pivot` and `pairs`",
            ));
        }
    }
    Ok(ctx)
}

pub fn encode_witness(w: &(CriticalDimension, CriticalEmbedding), host: &Poset) -> Value {
    let (c, e) = w;
    let pattern = c.kind.poset();
    let embedding: Map<String, Value> = e
        .image
        .iter()
        .enumerate()
        .map(|(i, &h)| (pattern.label(i).to_string(), json!(host.label(h))))
        .collect();
    json!({
        "kind": c.kind.name(),
        "dimension": encode_dimension(&pattern, &c.as_dimension()),
        "embedding": embedding,
    })
}

pub fn encode_counts(m: &BTreeMap<u32, usize>) -> Value {
    Value::Object(m.iter().map(|(p, n)| (p.to_string(), json!(n))).collect())
}

/// Parses `"2,3,5"`.
pub fn parse_primes(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|t| match parse_field_flag(t)? {
            FieldSpec::Prime(p) => Ok(p),
            FieldSpec::Rationals => Err(invalid("enumeration needs prime fields")),
        })
        .collect()
}
