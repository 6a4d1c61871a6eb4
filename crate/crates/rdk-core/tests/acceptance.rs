mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rdk_core::asai::*;
use rdk_core::catalog::{catalog_str, csp4, gl, intermediate_lattices, subgroups, CartanType};
use rdk_core::central::{central_product, decompose_as_central_product, recover_components};
use rdk_core::classify::*;
use rdk_core::embed::*;
use rdk_core::morphism::*;
use rdk_core::rootdata::RootDatum;
use rdk_core::zlattice::{
    int, ivec, quotient_invariants, quotient_presentation, same_lattice, solve_matrix,
    FinAbPresentation, IntMatrix,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

fn is_smooth(r: &RootDatum) -> bool {
    quotient_invariants(&r.root_matrix(), r.rank).0.is_empty()
}

fn catalog_rank6() -> Vec<RootDatum> {
    let mut labels = vec![];
    for n in 1..=6 {
        labels.push(format!("A{n}"));
        if n >= 2 {
            labels.push(format!("B{n}"));
        }
        if n >= 3 {
            labels.push(format!("C{n}"));
        }
        if n >= 4 {
            labels.push(format!("D{n}"));
        }
    }
    labels.extend(["G2", "F4", "E6"].map(String::from));
    let mut out: Vec<RootDatum> = labels
        .iter()
        .flat_map(|l| intermediate_lattices(&CartanType::parse(l).unwrap()))
        .collect();
    out.extend((1..=5).map(gl));
    out
}

fn sp4_example() -> Outcome {
    let c2 = ok(catalog_str("C2", "sc"), "catalog")?;
    let f = PMorphism::scalar(&c2, 2, &int(2));
    let e = ok(
        smooth_regular_embedding(&c2, Some(&f), false),
        "smooth embedding",
    )?;
    ensure!(e.datum.rank == 4, "rank {}", e.datum.rank);
    let target = csp4().direct_sum(&RootDatum::torus(1));
    ensure!(
        ok(isomorphic(&e.datum, &target), "isomorphism")?.is_some(),
        "not isomorphic to CSp4 + T1"
    );
    let cp = e.product.as_ref().ok_or("no product")?;
    let basis = sp4_reference_basis();
    ensure!(
        same_lattice(&basis, &cp.embed),
        "fibre lattice differs from the reference basis"
    );
    let change = solve_matrix(&basis, &cp.embed).ok_or("no change of basis")?;
    let in_e = ok(e.datum.transform(&change), "transform")?;
    let a1 = in_e
        .root_index(&ivec(&[1, -1, 0, 0]))
        .ok_or("e1 - e2 is not a root")?;
    let a2 = in_e
        .root_index(&ivec(&[0, 2, -1, 0]))
        .ok_or("2e2 - e3 is not a root")?;
    ensure!(
        in_e.coroots[a1] == ivec(&[1, -1, 0, 0]),
        "coroot of e1 - e2: {:?}",
        in_e.coroots[a1]
    );
    ensure!(
        in_e.coroots[a2] == ivec(&[0, 1, 0, 0]),
        "coroot of 2e2 - e3: {:?}",
        in_e.coroots[a2]
    );
    let psi = e.psi.ok_or("no lift of F")?;
    ensure!(
        is_p_steinberg(&psi, None).unwrap().witness().is_some(),
        "lift is not Steinberg"
    );
    Ok("rank 4, CSp4 + T1, simple roots e1-e2, 2e2-e3".into())
}

fn smoothness_law() -> Outcome {
    let data = catalog_rank6();
    let bad: Vec<String> = data
        .par_iter()
        .filter_map(|r| {
            let e = match smooth_regular_embedding(r, None, false) {
                Ok(e) => e,
                Err(err) => return Some(format!("{:?}: {err}", r.name)),
            };
            let good =
                is_smooth(&e.datum) && e.p1.is_surjective() && e.p1.validate(&e.datum, r).is_ok();
            (!good).then(|| format!("{:?}", r.name))
        })
        .collect();
    ensure!(bad.is_empty(), "failed for {bad:?}");
    Ok(format!("{} data", data.len()))
}

fn semisimple_types_rank4() -> Vec<&'static str> {
    vec![
        "A1",
        "A2",
        "B2",
        "G2",
        "A1xA1",
        "A3",
        "B3",
        "C3",
        "A1xA2",
        "A1xB2",
        "A1xG2",
        "A1xA1xA1",
        "A4",
        "B4",
        "C4",
        "D4",
        "F4",
        "A1xA3",
        "A1xB3",
        "A1xC3",
        "A2xA2",
        "A2xB2",
        "A2xG2",
        "B2xB2",
        "B2xG2",
        "G2xG2",
        "A1xA1xA2",
        "A1xA1xB2",
        "A1xA1xG2",
        "A1xA1xA1xA1",
    ]
}

/// Every `(R, r, K)` with `|X/K| ≤ 12`, semisimple rank ≤ 4 and `s ≤ r ≤ 2`.
fn small_triples() -> Vec<ClassTriple> {
    let mut out = vec![];
    for label in semisimple_types_rank4() {
        for x in intermediate_lattices(&CartanType::parse(label).unwrap()) {
            let roots = x.root_matrix();
            let a = quotient_presentation(&roots, x.rank);
            let order = a.order().unwrap();
            for h in subgroups(&a) {
                if order.clone() / int(h.len() as i64) > int(12) {
                    continue;
                }
                let lifts: Vec<_> = h
                    .iter()
                    .map(|e| a.preimage(&a.projection, e).unwrap())
                    .collect();
                let k = roots.hstack(&IntMatrix::from_cols(&lifts, x.rank));
                for r in 0..=2 {
                    if let Ok(t) = ClassTriple::new(x.clone(), r, k.clone()) {
                        out.push(t);
                    }
                }
            }
        }
    }
    out
}

fn classification() -> Outcome {
    let pinned = |label: &str| -> Result<usize, String> {
        let sc = ok(catalog_str(label, "sc"), "catalog")?;
        let t = ok(ClassTriple::new(sc.clone(), 1, sc.root_matrix()), "triple")?;
        Ok(ok(classify_products(&t, DEFAULT_BUDGET), "classify")?
            .classes
            .len())
    };
    ensure!(pinned("A1")? == 1, "A1: {} classes", pinned("A1")?);
    ensure!(pinned("A4")? == 2, "A4: {} classes", pinned("A4")?);
    let triples = small_triples();
    let bad: Vec<String> = triples
        .par_iter()
        .filter_map(|t| {
            let fast = classify_products(t, DEFAULT_BUDGET).map(|c| c.classes.len());
            let slow = brute_force_class_count(t, DEFAULT_BUDGET);
            match (fast, slow) {
                (Ok(a), Ok(b)) if a == b => None,
                (a, b) => Some(format!(
                    "{:?} r={} K={:?}: {a:?} vs {b:?}",
                    t.semisimple.name, t.torus_rank, t.k
                )),
            }
        })
        .collect();
    ensure!(
        bad.is_empty(),
        "{} mismatches, first: {}",
        bad.len(),
        bad[0]
    );
    Ok(format!("{} triples agree; A1 -> 1, A4 -> 2", triples.len()))
}

fn verified_lift(a: &FinAbPresentation, f: &IntMatrix, psi: &IntMatrix, v: &TameVerdict) -> bool {
    match v {
        TameVerdict::Tame(m) => {
            m.det().magnitude() == &num_bigint::BigUint::from(1u8)
                && a.maps_equal(&f.mul(m), &psi.mul(f))
        }
        TameVerdict::NotTame => false,
    }
}

fn tameness() -> Outcome {
    for n in 2..=30i64 {
        let a = FinAbPresentation::standard(vec![int(n)]);
        let aut = ok(aut_finite_abelian(&a, DEFAULT_BUDGET), "aut")?;
        let f = standard_surjection(&a, 1).unwrap();
        let (tame, verdicts) = ok(tame_torus(&a, &f, &aut), "tame")?;
        let mut ks: Vec<i64> = tame
            .elements
            .iter()
            .map(|m| i64::try_from(m.get(0, 0)).unwrap())
            .collect();
        ks.sort();
        let mut expected = vec![1, n - 1];
        expected.dedup();
        ensure!(ks == expected, "Z/{n} at rank 1: {ks:?}");
        for (psi, v) in aut.elements.iter().zip(&verdicts) {
            ensure!(
                !v.is_tame() || verified_lift(&a, &f, psi, v),
                "Z/{n}: unverified lift"
            );
        }
        for r in 2..=3 {
            let f = standard_surjection(&a, r).unwrap();
            let (tame, verdicts) = ok(tame_torus(&a, &f, &aut), "tame")?;
            ensure!(
                tame.order() == aut.order(),
                "Z/{n} at rank {r}: {} of {}",
                tame.order(),
                aut.order()
            );
            for (psi, v) in aut.elements.iter().zip(&verdicts) {
                ensure!(
                    verified_lift(&a, &f, psi, v),
                    "Z/{n} at rank {r}: unverified lift"
                );
            }
        }
    }
    for factors in [[4, 2], [6, 2]] {
        let a = FinAbPresentation::standard(factors.iter().map(|&d| int(d)).collect());
        let aut = ok(aut_finite_abelian(&a, DEFAULT_BUDGET), "aut")?;
        let f = standard_surjection(&a, 3).unwrap();
        let (_, verdicts) = ok(tame_torus(&a, &f, &aut), "tame")?;
        for (psi, v) in aut.elements.iter().zip(&verdicts) {
            ensure!(
                verified_lift(&a, &f, psi, v),
                "{factors:?}: no verified lift for {psi:?}"
            );
        }
    }
    Ok("cyclic n <= 30 at ranks 1..3; (4,2) and (6,2) at rank 3".into())
}

fn suzuki() -> Outcome {
    let c2 = ok(catalog_str("C2", "sc"), "catalog")?;
    for r in 1..=3u32 {
        let f = ok(
            PMorphism::infer(&suzuki_matrix(r), 2, &c2, &c2, true),
            "suzuki map",
        )?;
        let w = is_p_steinberg(&f, None).unwrap();
        let expected = SteinbergWitness {
            n: 2,
            m: 2 * r as u64 + 1,
        };
        ensure!(w.witness() == Some(&expected), "r={r}: {w:?}");
        let o = ok(steinberg_obstruction_check(r, 0..=10), "obstruction")?;
        ensure!(o.holds(), "r={r}: obstruction fails");
        for c in &o.candidates {
            ensure!(
                !matches!(c.outcome, LiftOutcome::Steinberg(_)),
                "r={r}, s={}: lift is Steinberg",
                c.s
            );
            ensure!(
                c.e2_exponent % 2 == 1 && c.e3_exponent % 2 == 0,
                "r={r}, s={}: parity",
                c.s
            );
        }
    }
    Ok("witness (2, 2r+1) for r = 1..3; no Steinberg lift for s = 0..10".into())
}

fn duality_and_recovery() -> Outcome {
    let data = catalog_rank6();
    for r in &data {
        ensure!(&r.dual().dual() == r, "{:?}: double dual differs", r.name);
        let autos = if r.is_semisimple() {
            diagram_isomorphisms(r, r)
        } else {
            vec![IntMatrix::identity(r.rank)]
        };
        for g in autos.iter().take(3) {
            let f = ok(PMorphism::infer(&g.scale(&int(4)), 2, r, r, true), "F")?;
            let d = ok(dualize(&f), "dualize")?;
            ensure!(
                d.is_p_isogeny() == f.is_p_isogeny(),
                "{:?}: isogeny verdict",
                r.name
            );
            ensure!(
                is_p_steinberg(&d, None).unwrap() == is_p_steinberg(&f, None).unwrap(),
                "{:?}: Steinberg verdict",
                r.name
            );
        }
    }
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let (i1, i2, k) = (
            rng.gen_range(0..100),
            rng.gen_range(0..100),
            rng.gen_range(0..6),
        );
        let c1: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
        let c2: Vec<i64> = (0..3).map(|_| rng.gen_range(-3..=3)).collect();
        let spec = common::random_spec(i1, i2, k, &c1, &c2);
        let r = ok(central_product(&spec), "product")?.datum;
        let comp = recover_components(&r);
        let d = ok(decompose_as_central_product(&r), "decompose")?;
        let rebuilt = ok(central_product(d.spec()), "rebuild")?.datum;
        ensure!(
            ok(isomorphic(&rebuilt, &r), "iso")?.is_some(),
            "round trip not isomorphic for {:?}",
            r.name
        );
        let (der, _) = r.derived_datum();
        ensure!(
            ok(isomorphic(&comp.derived, &der), "iso")?.is_some(),
            "derived part differs"
        );
        ensure!(
            comp.radical.rank + comp.derived.rank == r.rank,
            "ranks do not add up"
        );
    }
    Ok(format!(
        "{} catalog data; 100 random central products",
        data.len()
    ))
}

fn asai() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..24 {
        let label = ["A1", "A2", "C2"][rng.gen_range(0..3)];
        let r = ok(
            catalog_str(label, if rng.gen_bool(0.5) { "sc" } else { "ad" }),
            "catalog",
        )?;
        let embs = {
            let e = ok(smooth_regular_embedding(&r, None, true), "smooth")?;
            let o = ok(
                optimal_embedding(&r, &PMorphism::scalar(&r, 2, &int(2))),
                "optimal",
            )?;
            [(e.p1, e.datum), (o.p1, o.datum)]
        };
        let (s1, r1) = &embs[rng.gen_range(0..2)];
        let (s2, r2) = &embs[rng.gen_range(0..2)];
        let (f, f1, f2) = (
            PMorphism::scalar(&r, 3, &int(3)),
            PMorphism::scalar(r1, 3, &int(3)),
            PMorphism::scalar(r2, 3, &int(3)),
        );
        let c = ok(
            complete_embeddings(
                &r,
                (s1, r1),
                (s2, r2),
                Some(SteinbergTriple {
                    f: &f,
                    f1: &f1,
                    f2: &f2,
                }),
            ),
            "complete",
        )?;
        ensure!(
            c.certificate.holds(),
            "{label}: completion certificate {:?}",
            c.certificate
        );
        ensure!(c.certificate.square_commutes, "{label}: square");
        for (pi, ri) in [(&c.pi1, r1), (&c.pi2, r2)] {
            let report = ok(classify_embedding(pi, &c.datum, ri, 3, None), "classify")?;
            ensure!(
                report.kind == EmbeddingKind::Smooth,
                "{label}: {:?}",
                report.kind
            );
        }
    }
    let pgl2 = ok(catalog_str("A1", "ad"), "catalog")?;
    let cov = ok(smooth_covering(&pgl2, None, false), "covering")?;
    ensure!(
        cov.certificate.holds(),
        "covering certificate {:?}",
        cov.certificate
    );
    for n in 2..=3usize {
        let b = ok(catalog_str("A2", "sc"), "catalog")?;
        let k = b.rank;
        let mut m = IntMatrix::zeros(n * k, n * k);
        for i in 0..n {
            for t in 0..k {
                m.set(i * k + t, ((i + 1) % n) * k + t, int(2));
            }
        }
        let blocks = vec![b.clone(); n];
        let r = blocks[1..]
            .iter()
            .fold(b.clone(), |acc, x| acc.direct_sum(x));
        let f = ok(PMorphism::infer(&m, 2, &r, &r, true), "F")?;
        let c = ok(cyclic_block_embedding(&blocks, &f), "cyclic")?;
        ensure!(c.certificate.holds(), "n={n}: {:?}", c.certificate);
    }
    Ok("24 completions, PGL2 covering, cyclic n = 2, 3".into())
}

fn sl3_sl5() -> Outcome {
    let r = ok(catalog_str("A2xA4", "sc"), "catalog")?;
    let t = ok(ClassTriple::new(r.clone(), 1, r.root_matrix()), "triple")?;
    let a = t.quotient();
    ensure!(
        a.invariant_factors == vec![int(15)],
        "A = {:?}",
        a.invariant_factors
    );
    let psi4 = IntMatrix::from_i64(&[&[4]]);
    // the flip of A4 alone induces ψ₄
    let flip = tame_semisimple(&r, &r.root_matrix()).unwrap();
    ensure!(
        flip.contains(&psi4),
        "ψ4 is not induced by a diagram automorphism"
    );
    let f = standard_surjection(&a, 1).unwrap();
    let v = ok(tame_torus_verdict(&a, &f, &psi4), "verdict")?;
    ensure!(v == TameVerdict::NotTame, "ψ4 lifts: {v:?}");
    Ok("ψ4 on Z/15 is not tame at torus rank 1".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("Sp4 worked example", sp4_example),
        ("smoothness law", smoothness_law),
        ("classification vs brute force", classification),
        ("tameness closed forms and lifts", tameness),
        ("Suzuki obstruction", suzuki),
        ("duality and recovery", duality_and_recovery),
        ("Asai constructions", asai),
        ("SL3 x SL5 negative control", sl3_sl5),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
