use num_bigint::BigInt;
use rdk_core::asai::{
    complete_embeddings, cyclic_block_embedding, smooth_covering, SteinbergTriple,
};
use rdk_core::catalog::{catalog_str, preset};
use rdk_core::central::{central_product, recover_components};
use rdk_core::classify::{
    classify_products, diagram_isomorphisms, isomorphic, triple_of, ClassTriple,
};
use rdk_core::embed::{
    classify_embedding, optimal_embedding, smooth_regular_embedding, steinberg_obstruction_check,
    LiftOutcome,
};
use rdk_core::morphism::{
    dualize, is_p_frobenius, is_p_steinberg, FrobeniusVerdict, PMorphism, SteinbergVerdict,
};
use rdk_core::rootdata::RootDatum;
use rdk_core::zlattice::{int, IntMatrix};
use serde_json::{json, Value};

use crate::app::*;
use crate::codec::*;

const ASAI_SCOPE: &str =
    "root-data level only: group-level isotypies and inner adjustments are not represented";

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn compact(m: &IntMatrix) -> String {
    matrix_to_json(m)["data"].to_string()
}

fn group_label(factors: &[BigInt]) -> String {
    if factors.is_empty() {
        return "trivial".into();
    }
    let free = factors.iter().filter(|d| d == &&int(0)).count();
    let mut parts: Vec<String> = factors
        .iter()
        .filter(|d| d != &&int(0))
        .map(|d| format!("Z/{d}"))
        .collect();
    match free {
        0 => {}
        1 => parts.insert(0, "Z".into()),
        n => parts.insert(0, format!("Z^{n}")),
    }
    parts.join(" + ")
}

fn load_datum(io: &mut Inputs, path: Option<&str>) -> Outcome<RootDatum> {
    let v = io.load(path)?;
    let r = datum_from_json(&v, "$")?;
    r.check()?;
    Ok(r)
}

fn load_morphism(io: &mut Inputs, path: Option<&str>) -> Outcome<PMorphism> {
    let v = io.load(path)?;
    Ok(morphism_from_json(&v, "$")?)
}

/// `q = p^a` with `a ≥ 1`.
fn prime_of(q: u64) -> Option<u64> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut x = q;
    while x.is_multiple_of(p) {
        x /= p;
    }
    (x == 1).then_some(p)
}

fn key_values(body: &str) -> Outcome<Vec<(String, u64)>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| input(format!("expected key=value in {kv:?}")))?;
            let v = v
                .trim()
                .parse()
                .map_err(|_| input(format!("{v:?} is not a non-negative integer")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// `split:q=N` is `q·I`; `twisted:q=N[,index=I]` is `q` times the `I`-th
/// non-trivial diagram automorphism; anything else is a p-morphism file.
fn frobenius(io: &mut Inputs, arg: &str, r: &RootDatum) -> Outcome<PMorphism> {
    let (kind, body) = match arg.split_once(':') {
        Some((k, b)) if k == "split" || k == "twisted" => (k, b),
        _ => return load_morphism(io, Some(arg)),
    };
    let kv = key_values(body)?;
    let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
    let q = get("q").ok_or_else(|| input(format!("{arg:?} needs q=N")))?;
    let p = prime_of(q).ok_or_else(|| input(format!("q = {q} is not a prime power")))?;
    if kind == "split" {
        return Ok(PMorphism::scalar(r, p, &int(q as i64)));
    }
    let autos: Vec<IntMatrix> = diagram_isomorphisms(r, r)
        .into_iter()
        .filter(|g| !g.is_identity())
        .collect();
    let index = get("index").unwrap_or(0) as usize;
    let g = autos.get(index).ok_or_else(|| {
        input(format!(
            "{} non-trivial diagram automorphisms, index {index} requested",
            autos.len()
        ))
    })?;
    Ok(PMorphism::infer(&g.scale(&int(q as i64)), p, r, r, true)?)
}

pub fn dispatch(cli: &Cli, io: &mut Inputs) -> Outcome<Report> {
    match &cli.command {
        Command::Validate { file } => validate(io, file.as_deref()),
        Command::Catalog { label, selector } => {
            let r = match selector {
                Some(s) => catalog_str(label, s)?,
                None => preset(label)?.ok_or_else(|| {
                    input(format!(
                        "{label:?} needs a lattice selector (sc, ad or weights)"
                    ))
                })?,
            };
            Ok(Report::data(datum_to_json(&r)))
        }
        Command::Dual { file } => Ok(Report::data(datum_to_json(
            &load_datum(io, file.as_deref())?.dual(),
        ))),
        Command::Cproduct { file } => {
            let spec = spec_from_json(&io.load(file.as_deref())?, "$")?;
            let cp = central_product(&spec)?;
            Ok(Report::data(json!({
                "datum": datum_to_json(&cp.datum),
                "p1": morphism_to_json(&cp.p1),
                "p2": morphism_to_json(&cp.p2),
                "fibre_basis": matrix_to_json(&cp.embed),
                "index": cp.index().map(|i| int_to_json(&i)),
            })))
        }
        Command::Recover { file } => {
            let r = load_datum(io, file.as_deref())?;
            let c = recover_components(&r);
            Ok(Report::data(json!({
                "derived": datum_to_json(&c.derived),
                "derived_map": matrix_to_json(&c.derived_map),
                "radical": datum_to_json(&c.radical),
                "radical_map": matrix_to_json(&c.radical_map),
                "a": vec_to_json(&c.a.invariant_factors),
                "k": matrix_to_json(&c.k),
                "triple": triple_to_json(&triple_of(&r)),
            })))
        }
        Command::Classify { file } => classify(cli, io, file.as_deref()),
        Command::Isomorphic { a, b } => {
            let (r1, r2) = (load_datum(io, Some(a))?, load_datum(io, Some(b))?);
            Ok(match isomorphic(&r1, &r2)? {
                Some(m) => Report::verdict(
                    json!({ "isomorphic": true, "map": matrix_to_json(&m) }),
                    format!("isomorphic via {}", compact(&m)),
                    false,
                ),
                None => Report::verdict(
                    json!({ "isomorphic": false }),
                    "not isomorphic".into(),
                    true,
                ),
            })
        }
        Command::Morphism(m) => morphism(cli, io, m),
        Command::Embed(e) => embed(cli, io, e),
        Command::Asai(a) => asai(cli, io, a),
    }
}

fn validate(io: &mut Inputs, file: Option<&str>) -> Outcome<Report> {
    let r = datum_from_json(&io.load(file)?, "$")?;
    let name = r.name.clone().unwrap_or_else(|| "datum".into());
    Ok(match r.validate() {
        Ok(()) => {
            let c = r.centre_invariants(0);
            Report::verdict(
                json!({ "valid": true, "rank": r.rank, "roots": r.num_roots(),
                        "torsion": vec_to_json(&c.torsion), "free_rank": c.free_rank }),
                format!(
                    "valid: {name}, rank {}, {} roots, X/ZΦ = {}",
                    r.rank,
                    r.num_roots(),
                    group_label(&[vec![int(0); c.free_rank], c.torsion.clone()].concat())
                ),
                false,
            )
        }
        Err(v) => Report::verdict(
            json!({ "valid": false, "reason": v.to_string() }),
            format!("invalid: {v}"),
            true,
        ),
    })
}

fn classify(cli: &Cli, io: &mut Inputs, file: Option<&str>) -> Outcome<Report> {
    let v = io.load(file)?;
    let t = if v.get("semisimple").is_some() {
        triple_from_json(&v, "$")?
    } else {
        let r = datum_from_json(&v, "$")?;
        r.check()?;
        triple_of(&r)
    };
    let t = ClassTriple::new(t.semisimple, t.torus_rank, t.k)?;
    let c = classify_products(&t, cli.budget)?;
    let classes: Vec<Value> = c
        .classes
        .iter()
        .enumerate()
        .map(|(i, x)| {
            json!({ "label": format!("class {}", i + 1), "psi": matrix_to_json(&x.psi),
                    "coset_size": x.coset_size, "datum": datum_to_json(&x.datum) })
        })
        .collect();
    let value = json!({
        "triple": triple_to_json(&t),
        "a": vec_to_json(&c.a.invariant_factors),
        "aut_order": c.aut_order,
        "semisimple_tame": c.semisimple_tame.elements.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "torus_tame": c.torus_tame.elements.iter().map(matrix_to_json).collect::<Vec<_>>(),
        "classes": classes,
    });
    let mut text = format!(
        "A = {}, |Aut(A)| = {}, |Aut_(R,h)| = {}, |Aut_(T,f)| = {}\n{} class{}",
        group_label(&c.a.invariant_factors),
        c.aut_order,
        c.semisimple_tame.order(),
        c.torus_tame.order(),
        c.classes.len(),
        if c.classes.len() == 1 { "" } else { "es" }
    );
    for (i, x) in c.classes.iter().enumerate() {
        text.push_str(&format!(
            "\n  class {}: psi = {}, double coset size {}",
            i + 1,
            compact(&x.psi),
            x.coset_size
        ));
    }
    Ok(Report::verdict(value, text, false))
}

fn steinberg_report(v: &SteinbergVerdict) -> (Value, String, bool) {
    match v {
        SteinbergVerdict::Steinberg(w) => (
            json!({ "steinberg": true, "n": w.n, "m": w.m }),
            format!("p-Steinberg: f^{} = p^{}", w.n, w.m),
            false,
        ),
        SteinbergVerdict::NotSteinberg(c) => (
            json!({ "steinberg": false, "reason": c.to_string() }),
            format!("not p-Steinberg: {c}"),
            true,
        ),
    }
}

fn morphism(cli: &Cli, io: &mut Inputs, cmd: &MorphismCommand) -> Outcome<Report> {
    match cmd {
        MorphismCommand::Validate { file, ends } => {
            let m = load_morphism(io, file.as_deref())?;
            let src = load_datum(io, Some(&ends.source))?;
            let tgt = match &ends.target {
                Some(t) => load_datum(io, Some(t))?,
                None => src.clone(),
            };
            Ok(match m.validate(&src, &tgt) {
                Ok(()) => Report::verdict(
                    json!({ "valid": true, "isogeny": m.is_p_isogeny() }),
                    format!(
                        "valid p-morphism{}",
                        if m.is_p_isogeny() { " (p-isogeny)" } else { "" }
                    ),
                    false,
                ),
                Err(v) => Report::verdict(
                    json!({ "valid": false, "reason": v.to_string() }),
                    format!("invalid: {v}"),
                    true,
                ),
            })
        }
        MorphismCommand::Steinberg { file } => {
            let m = load_morphism(io, file.as_deref())?;
            let (value, text, negative) = steinberg_report(&is_p_steinberg(&m, cli.max_order)?);
            Ok(Report::verdict(value, text, negative))
        }
        MorphismCommand::Frobenius { file } => {
            let m = load_morphism(io, file.as_deref())?;
            Ok(match is_p_frobenius(&m, cli.max_order)? {
                FrobeniusVerdict::Frobenius(w) => Report::verdict(
                    json!({ "frobenius": true, "a": w.a, "order": w.order,
                            "finite_order_part": matrix_to_json(&w.finite_order_part) }),
                    format!("p-Frobenius: f = p^{}·g with g of order {}", w.a, w.order),
                    false,
                ),
                FrobeniusVerdict::NotFrobenius(c) => Report::verdict(
                    json!({ "frobenius": false, "reason": c.to_string() }),
                    format!("not p-Frobenius: {c}"),
                    true,
                ),
            })
        }
        MorphismCommand::Dualize { file } => {
            let m = load_morphism(io, file.as_deref())?;
            Ok(Report::data(morphism_to_json(&dualize(&m)?)))
        }
    }
}

fn embed(cli: &Cli, io: &mut Inputs, cmd: &EmbedCommand) -> Outcome<Report> {
    match cmd {
        EmbedCommand::Smooth {
            file,
            frobenius: fa,
        } => {
            let r = load_datum(io, file.as_deref())?;
            let f = fa.as_deref().map(|a| frobenius(io, a, &r)).transpose()?;
            let e = smooth_regular_embedding(&r, f.as_ref(), cli.force_construction)?;
            Ok(Report::data(json!({
                "datum": datum_to_json(&e.datum),
                "p1": morphism_to_json(&e.p1),
                "psi": e.psi.as_ref().map(morphism_to_json),
                "construction": format!("{:?}", e.construction).to_lowercase(),
                "fibre_basis": e.product.as_ref().map(|p| matrix_to_json(&p.embed)),
            })))
        }
        EmbedCommand::Optimal {
            file,
            frobenius: fa,
        } => {
            let r = load_datum(io, file.as_deref())?;
            let f = frobenius(io, fa, &r)?;
            let o = optimal_embedding(&r, &f)?;
            Ok(Report::data(json!({
                "datum": datum_to_json(&o.datum),
                "p1": morphism_to_json(&o.p1),
                "psi": morphism_to_json(&o.psi),
                "tau_lift": matrix_to_json(&o.tau_lift),
                "torus_rank": o.torus_rank,
                "q": int_to_json(&o.q),
            })))
        }
        EmbedCommand::Check {
            file,
            ends,
            p,
            frobenius: fa,
        } => {
            let m = load_morphism(io, file.as_deref())?;
            let src = load_datum(io, Some(&ends.source))?;
            let tgt = match &ends.target {
                Some(t) => load_datum(io, Some(t))?,
                None => src.clone(),
            };
            let f = fa.as_deref().map(|a| frobenius(io, a, &tgt)).transpose()?;
            let rep = classify_embedding(&m, &src, &tgt, *p, f.as_ref())?;
            let lift = rep.frobenius_lift.as_ref().map(|l| {
                json!({ "phi2": morphism_to_json(&l.phi2), "n": l.witness.n, "m": l.witness.m })
            });
            let value = json!({
                "kind": rep.kind.label(),
                "torsion": vec_to_json(&rep.torsion),
                "p_part": vec_to_json(&rep.p_part),
                "p_prime_part": vec_to_json(&rep.p_prime_part),
                "free_rank": rep.free_rank,
                "frobenius_lift": lift,
            });
            let mut text = format!(
                "{} embedding; Tor(X′/ZΦ′) = {} (p-part {}, p′-part {}), free rank {}",
                rep.kind.label(),
                group_label(&rep.torsion),
                group_label(&rep.p_part),
                group_label(&rep.p_prime_part),
                rep.free_rank
            );
            if f.is_some() {
                text.push_str(match &rep.frobenius_lift {
                    Some(_) => "\ncompatible Steinberg lift found",
                    None => "\nno compatible Steinberg lift of the standard shapes",
                });
            }
            Ok(Report::verdict(value, text, false))
        }
        EmbedCommand::Suzuki { r, s_max } => {
            let o = steinberg_obstruction_check(*r, 0..=*s_max)?;
            let candidates: Vec<Value> = o
                .candidates
                .iter()
                .map(|c| {
                    let outcome = match &c.outcome {
                        LiftOutcome::NotIntegral => "not integral".to_string(),
                        LiftOutcome::NotSteinberg(why) => format!("not Steinberg: {why}"),
                        LiftOutcome::Steinberg(w) => format!("Steinberg: f^{} = 2^{}", w.n, w.m),
                    };
                    json!({ "s": c.s, "outcome": outcome, "e2_exponent": c.e2_exponent, "e3_exponent": c.e3_exponent })
                })
                .collect();
            let mut text = format!("F^{} = 2^{} on C2 sc", o.f_witness.n, o.f_witness.m);
            for c in &candidates {
                text.push_str(&format!(
                    "\n  s = {}: {}; psi² scales e2 by 2^{}, e3 by 2^{}",
                    c["s"],
                    c["outcome"].as_str().unwrap_or_default(),
                    c["e2_exponent"],
                    c["e3_exponent"]
                ));
            }
            text.push_str(if o.holds() {
                "\nobstruction holds"
            } else {
                "\nobstruction fails"
            });
            let value = json!({ "f_n": o.f_witness.n, "f_m": o.f_witness.m, "holds": o.holds(), "candidates": candidates });
            Ok(Report::verdict(value, text, !o.holds()))
        }
    }
}

/// `{"datum", "p1"[, "psi"]}` as written by `embed smooth` and `embed optimal`.
fn load_embedding(
    io: &mut Inputs,
    path: &str,
) -> Outcome<(RootDatum, PMorphism, Option<PMorphism>)> {
    let v = io.load(Some(path))?;
    let r = datum_from_json(&v, "$")?;
    r.check()?;
    let p1 = v
        .get("p1")
        .ok_or_else(|| Failure::from(schema("$.p1", "missing field")))?;
    let p1 = morphism_from_json(p1, "$.p1")?;
    let psi = match v.get("psi") {
        None | Some(Value::Null) => None,
        Some(x) => Some(morphism_from_json(x, "$.psi")?),
    };
    Ok((r, p1, psi))
}

fn schema(path: &str, message: &str) -> SchemaError {
    SchemaError {
        path: path.into(),
        message: message.into(),
    }
}

fn asai(cli: &Cli, io: &mut Inputs, cmd: &AsaiCommand) -> Outcome<Report> {
    let report = |value: Value, holds: bool, what: &str| {
        let text = format!(
            "{what}: certificate {}\n{}\n{ASAI_SCOPE}",
            if holds { "holds" } else { "FAILS" },
            value
        );
        let mut value = value;
        value["scope"] = json!(ASAI_SCOPE);
        Report::verdict(value, text, !holds)
    };
    match cmd {
        AsaiCommand::Complete {
            base,
            first,
            second,
            frobenius: fa,
        } => {
            let r = load_datum(io, Some(base))?;
            let (r1, s1, f1) = load_embedding(io, first)?;
            let (r2, s2, f2) = load_embedding(io, second)?;
            let f = fa.as_deref().map(|a| frobenius(io, a, &r)).transpose()?;
            let triple = match (&f, &f1, &f2) {
                (Some(f), Some(f1), Some(f2)) => Some(SteinbergTriple { f, f1, f2 }),
                (Some(_), _, _) => {
                    return Err(input("--frobenius needs \"psi\" in both embedding files"))
                }
                _ => None,
            };
            let c = complete_embeddings(&r, (&s1, &r1), (&s2, &r2), triple)?;
            let cert = &c.certificate;
            let value = json!({
                "datum": datum_to_json(&c.datum),
                "pi1": morphism_to_json(&c.pi1),
                "pi2": morphism_to_json(&c.pi2),
                "projection": morphism_to_json(&c.projection),
                "psi": c.psi.as_ref().map(morphism_to_json),
                "certificate": {
                    "square_commutes": cert.square_commutes,
                    "torsion_free": cert.torsion_free,
                    "pi_surjective": cert.pi_surjective,
                    "steinberg_commutes": cert.steinberg_commutes,
                },
            });
            Ok(report(value, cert.holds(), "completion"))
        }
        AsaiCommand::Cover {
            file,
            frobenius: fa,
        } => {
            let r = load_datum(io, file.as_deref())?;
            let f = fa.as_deref().map(|a| frobenius(io, a, &r)).transpose()?;
            let c = smooth_covering(&r, f.as_ref(), cli.force_construction)?;
            let cert = &c.certificate;
            let value = json!({
                "datum": datum_to_json(&c.datum),
                "map": morphism_to_json(&c.map),
                "f_tilde": c.f_tilde.as_ref().map(morphism_to_json),
                "certificate": {
                    "kernel_is_torus": cert.kernel_is_torus,
                    "derived_simply_connected": cert.derived_simply_connected,
                    "torsion_transfer": cert.torsion_transfer,
                    "steinberg_transport": cert.steinberg_transport,
                },
            });
            Ok(report(value, cert.holds(), "smooth covering"))
        }
        AsaiCommand::Cyclic {
            blocks,
            frobenius: fa,
        } => {
            if blocks.is_empty() {
                return Err(input("at least one block file is needed"));
            }
            let data: Vec<RootDatum> = blocks
                .iter()
                .map(|b| load_datum(io, Some(b)))
                .collect::<Outcome<_>>()?;
            let f = load_morphism(io, Some(fa))?;
            let c = cyclic_block_embedding(&data, &f)?;
            let cert = &c.certificate;
            let value = json!({
                "datum": datum_to_json(&c.datum),
                "h": morphism_to_json(&c.h),
                "psi": morphism_to_json(&c.psi),
                "psi_n_block1": matrix_to_json(&c.psi_n_block1),
                "certificate": {
                    "commutes": cert.commutes,
                    "stabilises_block1": cert.stabilises_block1,
                    "block1_commutes": cert.block1_commutes,
                    "steinberg": cert.steinberg,
                },
            });
            Ok(report(value, cert.holds(), "cyclic blocks"))
        }
    }
}
