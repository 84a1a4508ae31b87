use std::sync::Arc;

use posetrep::classifier::{
    brute_force_indecomposables, construct_indecomposable_traced, count_iso_classes,
    verify_main_theorem, ClassificationReport, DEFAULT_BRUTE_BUDGET,
};
use posetrep::critical::{critical_subsets, is_representation_finite};
use posetrep::derivation::{derive_poset, DerivedPoset, PairReading};
use posetrep::rep::{decompose, rho};
use posetrep::tits::{
    dominated_critical, finite_type_scan, is_root, tits_value, DEFAULT_SCAN_BUDGET,
};
use posetrep::{DimensionVector, FieldSpec, Fp, MatrixRep, Poset, Rationals};
use serde_json::{json, Map, Value};

use crate::codec::{
    decode_derived, decode_dimension, decode_poset, decode_rep, encode_counts, encode_derived,
    encode_dimension, encode_rep, encode_witness, parse_field_flag, parse_primes, AnyRep,
    JsonField,
};
use crate::{read_json, resolve_budget, CliError, Command, Outcome, Reading};

fn poset_and_dim(
    poset: &std::path::Path,
    dim: &std::path::Path,
) -> Result<(Arc<Poset>, DimensionVector), CliError> {
    let p = Arc::new(decode_poset(&read_json(poset)?)?);
    let d = decode_dimension(&p, &read_json(dim)?)?;
    Ok((p, d))
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::CheckFiniteType {
            poset,
            dim,
            scan,
            budget,
        } => {
            let (p, d) = poset_and_dim(poset, dim)?;
            let witness = dominated_critical(&p, &d)?;
            let mut out = Map::new();
            out.insert("finite_type".into(), json!(witness.is_none()));
            out.insert("q_value".into(), json!(tits_value(&p, &d)?));
            out.insert("is_root".into(), json!(is_root(&p, &d)?));
            if let Some(w) = &witness {
                out.insert("witness".into(), encode_witness(w, &p));
            }
            if *scan {
                let b = resolve_budget(*budget, DEFAULT_SCAN_BUDGET)?;
                out.insert(
                    "weakly_positive".into(),
                    json!(finite_type_scan(&p, &d, b)?),
                );
            }
            Ok(Outcome::ok(Value::Object(out)))
        }
        Command::Tits { poset, dim } => {
            let (p, d) = poset_and_dim(poset, dim)?;
            Ok(Outcome::ok(json!({ "value": tits_value(&p, &d)? })))
        }
        Command::Criticals { poset } => {
            let p = decode_poset(&read_json(poset)?)?;
            let embeddings: Vec<Value> = critical_subsets(&p)
                .iter()
                .map(|e| {
                    let labels: Vec<&str> = e.image_set().iter().map(|&i| p.label(i)).collect();
                    json!({ "kind": e.kind.name(), "elements": labels })
                })
                .collect();
            Ok(Outcome::ok(json!({
                "representation_finite": is_representation_finite(&p),
                "critical_subsets": embeddings,
            })))
        }
        Command::Derive { poset, pivot } => {
            let p = Arc::new(decode_poset(&read_json(poset)?)?);
            let a = p.index_of(pivot)?;
            Ok(Outcome::ok(encode_derived(&derive_poset(p, a)?)))
        }
        Command::Integrate { derived, rep } => {
            let ctx = decode_derived(&read_json(derived)?)?;
            let v = decode_rep(ctx.result(), &read_json(rep)?)?;
            Ok(Outcome::ok(match v {
                AnyRep::Prime(v) => encode_rep(&ctx.integrate(&v)?),
                AnyRep::Rational(v) => encode_rep(&ctx.integrate(&v)?),
            }))
        }
        Command::Differentiate {
            derived,
            rep,
            reading,
        } => {
            let ctx = decode_derived(&read_json(derived)?)?;
            let u = decode_rep(ctx.base(), &read_json(rep)?)?;
            let reading = match reading {
                Reading::Sum => PairReading::Sum,
                Reading::Intersection => PairReading::Intersection,
            };
            Ok(Outcome::ok(match u {
                AnyRep::Prime(u) => differentiate(&ctx, &u, reading)?,
                AnyRep::Rational(u) => differentiate(&ctx, &u, reading)?,
            }))
        }
        Command::Construct {
            poset,
            dim,
            field,
            budget,
        } => {
            let (p, d) = poset_and_dim(poset, dim)?;
            let b = resolve_budget(*budget, DEFAULT_BRUTE_BUDGET)?;
            Ok(Outcome::ok(match parse_field_flag(field)? {
                FieldSpec::Prime(q) => construct(&p, &d, &Fp::new(q as u64)?, b)?,
                FieldSpec::Rationals => construct(&p, &d, &Rationals, b)?,
            }))
        }
        Command::BruteCount {
            poset,
            dim,
            field,
            budget,
        } => {
            let (p, d) = poset_and_dim(poset, dim)?;
            let f = prime_field(field)?;
            let b = resolve_budget(*budget, DEFAULT_BRUTE_BUDGET)?;
            let classes = count_iso_classes(&p, &d, &f, b)?;
            let indecomposables: Vec<Value> = brute_force_indecomposables(&p, &d, &f, b)?
                .iter()
                .map(encode_rep)
                .collect();
            Ok(Outcome::ok(json!({
                "iso_classes": classes,
                "indecomposable_count": indecomposables.len(),
                "indecomposables": indecomposables,
            })))
        }
        Command::Decompose { poset, rep } => {
            let p = Arc::new(decode_poset(&read_json(poset)?)?);
            Ok(Outcome::ok(match decode_rep(&p, &read_json(rep)?)? {
                AnyRep::Prime(u) => decomposition(&u)?,
                AnyRep::Rational(u) => decomposition(&u)?,
            }))
        }
        Command::Verify {
            poset,
            max_total,
            fields,
            budget,
        } => {
            let p = Arc::new(decode_poset(&read_json(poset)?)?);
            let primes = parse_primes(fields)?;
            let b = resolve_budget(*budget, DEFAULT_BRUTE_BUDGET)?;
            let reports = verify_main_theorem(&p, *max_total, &primes, b)?;
            let failed = reports.iter().any(|r| !r.passed());
            Ok(Outcome {
                json: Value::Array(reports.iter().map(|r| encode_report(&p, r)).collect()),
                code: if failed { 1 } else { 0 },
            })
        }
    }
}

fn prime_field(flag: &str) -> Result<Fp, CliError> {
    match parse_field_flag(flag)? {
        FieldSpec::Prime(p) => Ok(Fp::new(p as u64)?),
        FieldSpec::Rationals => Err(CliError::Usage("enumeration needs a prime field".into())),
    }
}

fn differentiate<F: JsonField>(
    ctx: &DerivedPoset,
    u: &MatrixRep<F>,
    reading: PairReading,
) -> Result<Value, CliError> {
    Ok(encode_rep(&ctx.differentiate(&rho(u), reading)?.lift()))
}

fn construct<F: JsonField>(
    p: &Arc<Poset>,
    d: &DimensionVector,
    f: &F,
    budget: u128,
) -> Result<Value, CliError> {
    let c = construct_indecomposable_traced(p, d, f, budget)?;
    let mut out = Map::new();
    out.insert("used_fallback".into(), json!(c.used_fallback));
    if let Some(u) = &c.element {
        out.insert("indecomposable".into(), encode_rep(u));
    }
    Ok(Value::Object(out))
}

fn decomposition<F: JsonField>(u: &MatrixRep<F>) -> Result<Value, CliError> {
    let dec = decompose(u)?;
    let p = u.poset();
    let trivial: Map<String, Value> = dec
        .trivial
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(a, &m)| (p.label(a).to_string(), json!(m)))
        .collect();
    let summands: Vec<Value> = dec.summands.iter().map(encode_rep).collect();
    Ok(json!({ "summands": summands, "trivial": trivial }))
}

pub fn encode_report(p: &Poset, r: &ClassificationReport) -> Value {
    let mut out = Map::new();
    out.insert("dimension".into(), encode_dimension(p, &r.dimension));
    out.insert("q_value".into(), json!(r.q_value));
    out.insert("finite_type".into(), json!(r.finite_type));
    out.insert("is_root".into(), json!(r.is_root));
    out.insert(
        "iso_class_counts".into(),
        encode_counts(&r.iso_class_counts),
    );
    out.insert(
        "indecomposable_counts".into(),
        encode_counts(&r.indecomposable_counts),
    );
    out.insert("failures".into(), json!(r.failures));
    out.insert("skipped".into(), json!(r.skipped));
    out.insert("passed".into(), json!(r.passed()));
    if let Some(w) = r.weakly_positive {
        out.insert("weakly_positive".into(), json!(w));
    }
    if let Some(w) = &r.witness {
        out.insert("witness".into(), encode_witness(w, p));
    }
    if let Some(u) = &r.indecomposable {
        out.insert("indecomposable".into(), encode_rep(u));
    }
    if let Some(e) = r.end_dim {
        out.insert("end_dim".into(), json!(e));
    }
    if let Some(s) = r.class_counts_stable {
        out.insert("class_counts_stable".into(), json!(s));
    }
    Value::Object(out)
}
