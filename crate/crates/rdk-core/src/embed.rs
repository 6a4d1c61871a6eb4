//! Derived, regular and smooth regular embeddings of root data, with lifts of
//! Steinberg and Frobenius endomorphisms.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::central::{central_product, CentralProductResult, CentralProductSpec};
use crate::classify::{induced_map, lift_through, standard_surjection};
use crate::error::{Error, Result};
use crate::morphism::{
    is_p_frobenius, is_p_steinberg, steinberg_of_matrix, suzuki_matrix, FrobeniusVerdict,
    NotSteinberg, PMorphism, SteinbergVerdict, SteinbergWitness,
};
use crate::rootdata::RootDatum;
use crate::zlattice::{
    int, quotient_invariants, quotient_presentation, solve_matrix, torsion_presentation,
    FinAbPresentation, IntMatrix, IntVec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EmbeddingKind {
    NotDerived,
    Derived,
    PRegular,
    Smooth,
}

impl EmbeddingKind {
    pub fn label(self) -> &'static str {
        match self {
            EmbeddingKind::NotDerived => "not-derived",
            EmbeddingKind::Derived => "derived",
            EmbeddingKind::PRegular => "p-regular",
            EmbeddingKind::Smooth => "smooth",
        }
    }
}

/// `φ₂` on the source with `f∘φ₂ = φ₁∘f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibleLift {
    pub phi2: PMorphism,
    pub witness: SteinbergWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub kind: EmbeddingKind,
    pub torsion: IntVec,
    pub p_part: IntVec,
    pub p_prime_part: IntVec,
    pub free_rank: usize,
    pub frobenius_lift: Option<CompatibleLift>,
}

/// `φ` restricted to the sublattice with basis `embed`, if it preserves it.
pub fn restrict(embed: &IntMatrix, phi: &IntMatrix) -> Option<IntMatrix> {
    solve_matrix(embed, &phi.mul(embed))
}

/// Strict root bijection with `q = 1` and `f` onto the target lattice.
pub fn is_derived_embedding(f: &PMorphism, source: &RootDatum, target: &RootDatum) -> bool {
    f.validate(source, target).is_ok() && f.q.iter().all(|q| q.is_one()) && f.is_surjective()
}

/// Kind of `f: R′ → R` (surjective on lattices) and, when `phi1` is given,
/// a compatible `p`-Steinberg endomorphism of `R′` if one of the standard
/// shapes `(φ₁, q·τ̃)` or `(φ₁, p^k)` on `R ⊕_A R′_rad` exists.
pub fn classify_embedding(
    f: &PMorphism,
    source: &RootDatum,
    target: &RootDatum,
    p: u64,
    phi1: Option<&PMorphism>,
) -> Result<EmbeddingReport> {
    let c = source.centre_invariants(p);
    let kind = if !is_derived_embedding(f, source, target) {
        EmbeddingKind::NotDerived
    } else if c.torsion.is_empty() {
        EmbeddingKind::Smooth
    } else if p != 0 && c.p_prime_part.is_empty() {
        EmbeddingKind::PRegular
    } else {
        EmbeddingKind::Derived
    };
    let frobenius_lift = match phi1 {
        Some(phi1) if kind != EmbeddingKind::NotDerived => {
            compatible_lift(f, source, target, phi1)?
        }
        _ => None,
    };
    Ok(EmbeddingReport {
        kind,
        torsion: c.torsion,
        p_part: c.p_part,
        p_prime_part: c.p_prime_part,
        free_rank: c.free_rank,
        frobenius_lift,
    })
}

fn compatible_lift(
    f: &PMorphism,
    source: &RootDatum,
    target: &RootDatum,
    phi1: &PMorphism,
) -> Result<Option<CompatibleLift>> {
    let p = phi1.p;
    let SteinbergVerdict::Steinberg(w1) = is_p_steinberg(phi1, None)? else {
        return Err(Error::InvalidMorphism(
            "the endomorphism to lift is not p-Steinberg".into(),
        ));
    };
    let d = crate::central::derived_embedding_structure(f, source, target)?;
    let spec = d.spec();
    let t = spec.r2.rank;
    let mut torus_parts = vec![];
    if let Ok(FrobeniusVerdict::Frobenius(fw)) = is_p_frobenius(phi1, None) {
        let q = int(p as i64).pow(fw.a as u32);
        let z = induced_map(&spec.a, &spec.h1, &spec.a, &spec.h1, &fw.finite_order_part);
        if let Some(m) = lift_through(&spec.h2, &spec.a, &spec.h2, &spec.a, &z)? {
            torus_parts.push(m.scale(&q));
        }
    }
    let kmax = w1.m.div_ceil(w1.n.max(1)) * target.rank.max(1) as u64 + 1;
    for k in 0..=kmax {
        torus_parts.push(IntMatrix::scalar(t, &int(p as i64).pow(k as u32)));
    }
    let iso_inv = d
        .iso
        .unimodular_inverse()
        .expect("structure map is unimodular");
    for m in torus_parts {
        let big = phi1.f.block_diag(&m);
        let Some(r) = restrict(&d.product.embed, &big) else {
            continue;
        };
        let phi2 = iso_inv.mul(&r).mul(&d.iso);
        if f.f.mul(&phi2) != phi1.f.mul(&f.f) {
            continue;
        }
        let Ok(m2) = PMorphism::infer(&phi2, p, source, source, true) else {
            continue;
        };
        if let SteinbergVerdict::Steinberg(witness) = is_p_steinberg(&m2, None)? {
            return Ok(Some(CompatibleLift { phi2: m2, witness }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// `X/ZΦ` already torsion free; `R` returned with the identity.
    Unchanged,
    /// Central product over the torsion subgroup of `X/ZΦ`.
    TorsionPart,
    /// Central product over all of `X/ZΦ`.
    Literal,
}

#[derive(Clone, Debug)]
pub struct SmoothEmbedding {
    pub datum: RootDatum,
    pub p1: PMorphism,
    pub psi: Option<PMorphism>,
    pub construction: Construction,
    /// The product and its fibre basis; absent for [`Construction::Unchanged`].
    pub product: Option<CentralProductResult>,
}

fn steinberg_endomorphism(r: &RootDatum, f: &PMorphism) -> Result<SteinbergWitness> {
    f.validate(r, r)
        .map_err(|v| Error::InvalidMorphism(v.to_string()))?;
    match is_p_steinberg(f, None)? {
        SteinbergVerdict::Steinberg(w) => Ok(w),
        SteinbergVerdict::NotSteinberg(c) => Err(Error::InvalidMorphism(format!(
            "not a p-Steinberg endomorphism: {c}"
        ))),
    }
}

fn lift_endomorphism(
    cp: &CentralProductResult,
    big: &IntMatrix,
    f: &PMorphism,
) -> Result<PMorphism> {
    let m = restrict(&cp.embed, big).ok_or_else(|| {
        Error::InvalidMorphism("the lifted map does not preserve the fibre lattice".into())
    })?;
    if cp.p1.f.mul(&m) != f.f.mul(&cp.p1.f) {
        return Err(Error::InvalidMorphism(
            "lift does not commute with the projection".into(),
        ));
    }
    let psi = PMorphism::infer(&m, f.p, &cp.datum, &cp.datum, true)?;
    match is_p_steinberg(&psi, None)? {
        SteinbergVerdict::Steinberg(_) => Ok(psi),
        SteinbergVerdict::NotSteinberg(c) => Err(Error::InvalidMorphism(format!(
            "lift is not p-Steinberg: {c}"
        ))),
    }
}

/// `R′ = R ⊕_{(A,h,h)} R°` with `R°` the torus on `X`, and `p₁: R′ → R`.
/// With `frobenius`, also `ψ = (F, F)` restricted to `X′`.
pub fn smooth_regular_embedding(
    r: &RootDatum,
    frobenius: Option<&PMorphism>,
    force_construction: bool,
) -> Result<SmoothEmbedding> {
    r.check()?;
    if let Some(f) = frobenius {
        steinberg_endomorphism(r, f)?;
    }
    let n = r.rank;
    let (torsion, free) = quotient_invariants(&r.root_matrix(), n);
    if torsion.is_empty() && !force_construction {
        return Ok(SmoothEmbedding {
            datum: r.clone(),
            p1: PMorphism::identity(r),
            psi: frobenius.cloned(),
            construction: Construction::Unchanged,
            product: None,
        });
    }
    let literal = force_construction || (frobenius.is_some() && free > 0);
    let (a, construction) = if literal || free == 0 {
        (
            quotient_presentation(&r.root_matrix(), n),
            Construction::Literal,
        )
    } else {
        (
            torsion_presentation(&r.root_matrix(), n),
            Construction::TorsionPart,
        )
    };
    let spec = CentralProductSpec {
        r1: r.clone(),
        r2: r.torus_part(),
        h1: a.projection.clone(),
        h2: a.projection.clone(),
        a,
    };
    let cp = central_product(&spec)?;
    let psi = match frobenius {
        Some(f) => Some(lift_endomorphism(&cp, &f.f.block_diag(&f.f), f)?),
        None => None,
    };
    Ok(SmoothEmbedding {
        datum: cp.datum.clone(),
        p1: cp.p1.clone(),
        psi,
        construction,
        product: Some(cp),
    })
}

/// The basis `e₁ = (ω₁,ω₁)`, `e₂ = (ω₂−ω₁,ω₁)`, `e₃ = (0,2ω₁)`, `e₄ = (0,ω₂)`
/// of the fibre lattice for `C2` simply connected, in `X ⊕ X`.
pub fn sp4_reference_basis() -> IntMatrix {
    IntMatrix::from_i64(&[&[1, -1, 0, 0], &[0, 1, 0, 0], &[1, 1, 2, 0], &[0, 0, 0, 1]])
}

#[derive(Clone, Debug)]
pub struct OptimalEmbedding {
    pub datum: RootDatum,
    pub p1: PMorphism,
    pub psi: PMorphism,
    /// Lift of the finite-order part to the torus.
    pub tau_lift: IntMatrix,
    pub torus_rank: usize,
    pub q: BigInt,
}

/// Simple roots form a connected diagram.
pub fn is_irreducible(r: &RootDatum) -> bool {
    let s = r.simple_roots();
    if s.is_empty() {
        return false;
    }
    let c = r.cartan_matrix_for(&s);
    let mut seen = vec![false; s.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for (j, mark) in seen.iter_mut().enumerate() {
            if !*mark && !c.get(i, j).is_zero() {
                *mark = true;
                stack.push(j);
            }
        }
    }
    seen.iter().all(|&b| b)
}

fn finite_order(m: &IntMatrix) -> bool {
    let bound = crate::morphism::order_bound(m.rows());
    let mut h = m.clone();
    for _ in 0..bound {
        if h.is_identity() {
            return true;
        }
        h = h.mul(m);
    }
    false
}

/// A finite-order unimodular `M` with `f∘M = ζ∘f`: the exact lift if it has
/// finite order, otherwise a search over matrices with entries in `[-2, 2]`.
pub fn finite_order_lift(
    f: &IntMatrix,
    a: &FinAbPresentation,
    zeta: &IntMatrix,
) -> Result<Option<IntMatrix>> {
    let Some(m) = lift_through(f, a, f, a, zeta)? else {
        return Ok(None);
    };
    if finite_order(&m) {
        return Ok(Some(m));
    }
    let t = f.cols();
    if t > 3 {
        return Ok(None);
    }
    let target = zeta.mul(f);
    let mut entries = vec![-2i64; t * t];
    loop {
        let cand = IntMatrix::from_vec(t, t, entries.iter().map(|&x| int(x)).collect());
        if cand.det().magnitude().is_one()
            && a.maps_equal(&f.mul(&cand), &target)
            && finite_order(&cand)
        {
            return Ok(Some(cand));
        }
        let mut i = 0;
        while i < entries.len() {
            entries[i] += 1;
            if entries[i] <= 2 {
                break;
            }
            entries[i] = -2;
            i += 1;
        }
        if i == entries.len() {
            return Ok(None);
        }
    }
}

/// For `R` simple and `F = q·τ` Frobenius, `R ⊕_{(A,h,f)} T` with `rk T = s`
/// and `ψ = q·(τ ⊕ τ̃)`.
pub fn optimal_embedding(r: &RootDatum, frobenius: &PMorphism) -> Result<OptimalEmbedding> {
    r.check()?;
    if !r.is_semisimple() || !is_irreducible(r) {
        return Err(Error::Input(
            "optimal embeddings are built for simple root data".into(),
        ));
    }
    frobenius
        .validate(r, r)
        .map_err(|v| Error::InvalidMorphism(v.to_string()))?;
    let w = match is_p_frobenius(frobenius, None)? {
        FrobeniusVerdict::Frobenius(w) => w,
        FrobeniusVerdict::NotFrobenius(c) => {
            return Err(Error::Refused(format!(
                "F is not a Frobenius endomorphism ({c}); Steinberg endomorphisms such as the Suzuki map on C2 \
                 admit no smooth regular embedding with a rank-s torus"
            )))
        }
    };
    let q = int(frobenius.p as i64).pow(w.a as u32);
    let tau = &w.finite_order_part;
    let a = quotient_presentation(&r.root_matrix(), r.rank);
    let s = a.num_factors();
    if s == 0 {
        return Ok(OptimalEmbedding {
            datum: r.clone(),
            p1: PMorphism::identity(r),
            psi: frobenius.clone(),
            tau_lift: IntMatrix::zeros(0, 0),
            torus_rank: 0,
            q,
        });
    }
    let f = standard_surjection(&a, s)?;
    let zeta = induced_map(&a, &a.projection, &a, &a.projection, tau);
    let tau_lift = finite_order_lift(&f, &a, &zeta)?.ok_or_else(|| {
        Error::Refused(
            "the induced automorphism of X/ZΦ has no finite-order lift to the torus".into(),
        )
    })?;
    let spec = CentralProductSpec {
        r1: r.clone(),
        r2: RootDatum::torus(s),
        h1: a.projection.clone(),
        h2: f,
        a,
    };
    let cp = central_product(&spec)?;
    let psi = lift_endomorphism(&cp, &tau.block_diag(&tau_lift).scale(&q), frobenius)?;
    if is_p_frobenius(&psi, None)?.witness().is_none() {
        return Err(Error::InvalidMorphism("lift is not p-Frobenius".into()));
    }
    Ok(OptimalEmbedding {
        datum: cp.datum,
        p1: cp.p1,
        psi,
        tau_lift,
        torus_rank: s,
        q,
    })
}

/// Outcome for one candidate `ψ_s(x, y) = (F x, 2^s y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    /// `ψ_s` does not map `X′` into itself.
    NotIntegral,
    NotSteinberg(NotSteinberg),
    Steinberg(SteinbergWitness),
}

#[derive(Clone, Debug)]
pub struct SuzukiCandidate {
    pub s: u32,
    pub outcome: LiftOutcome,
    /// `ψ_s²(e₂) = 2^{e2} e₂`.
    pub e2_exponent: u32,
    /// `ψ_s²(e₃) = 2^{e3} e₃`.
    pub e3_exponent: u32,
}

#[derive(Clone, Debug)]
pub struct SuzukiObstruction {
    pub r: u32,
    pub f_witness: SteinbergWitness,
    pub candidates: Vec<SuzukiCandidate>,
}

impl SuzukiObstruction {
    /// No candidate is Steinberg, and the parity of the two exponents differs.
    pub fn holds(&self) -> bool {
        self.candidates.iter().all(|c| {
            !matches!(c.outcome, LiftOutcome::Steinberg(_))
                && c.e2_exponent % 2 == 1
                && c.e3_exponent % 2 == 0
        })
    }
}

/// `e₁ = (ω₁, ξ)`, `e₂ = (ω₂, 0)`, `e₃ = (0, 2ξ)` in `X ⊕ T`.
pub fn suzuki_reference_basis() -> IntMatrix {
    IntMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[1, 0, 2]])
}

fn two_power_eigen(m: &IntMatrix, v: &[BigInt]) -> Option<u32> {
    let img = m.mul_vec(v);
    let k = v.iter().position(|x| !x.is_zero())?;
    let c = &img[k] / &v[k];
    if crate::zlattice::vscale(&c, v) != img {
        return None;
    }
    crate::morphism::p_power_exponent(&c, 2).map(|e| e as u32)
}

/// The rank-one-torus obstruction for the Suzuki map `F` with parameter
/// `r`: every candidate lift `ψ_s`, `s ∈ s_range`, fails to be 2-Steinberg.
pub fn steinberg_obstruction_check(
    r: u32,
    s_range: std::ops::RangeInclusive<u32>,
) -> Result<SuzukiObstruction> {
    if r == 0 {
        return Err(Error::Input("the Suzuki map needs r > 0".into()));
    }
    let c2 = crate::catalog::catalog_str("C2", "sc")?;
    let f = suzuki_matrix(r);
    let fm = PMorphism::infer(&f, 2, &c2, &c2, true)?;
    let f_witness = steinberg_endomorphism(&c2, &fm)?;
    let a = quotient_presentation(&c2.root_matrix(), 2);
    let spec = CentralProductSpec {
        r1: c2.clone(),
        r2: RootDatum::torus(1),
        h1: a.projection.clone(),
        h2: standard_surjection(&a, 1)?,
        a,
    };
    let cp = central_product(&spec)?;
    let e = suzuki_reference_basis();
    if !crate::zlattice::same_lattice(&e, &cp.embed) {
        return Err(Error::InvalidDatum(
            "fibre lattice differs from the expected basis".into(),
        ));
    }
    let mut candidates = vec![];
    for s in s_range {
        let big = f.block_diag(&IntMatrix::scalar(1, &int(2).pow(s)));
        let sq = big.mul(&big);
        let e2_exponent = two_power_eigen(&sq, &e.col(1)).expect("e2 is an eigenvector");
        let e3_exponent = two_power_eigen(&sq, &e.col(2)).expect("e3 is an eigenvector");
        let outcome = match restrict(&e, &big) {
            None => LiftOutcome::NotIntegral,
            Some(m) => match steinberg_of_matrix(&m, 2, None)? {
                SteinbergVerdict::Steinberg(w) => LiftOutcome::Steinberg(w),
                SteinbergVerdict::NotSteinberg(c) => LiftOutcome::NotSteinberg(c),
            },
        };
        candidates.push(SuzukiCandidate {
            s,
            outcome,
            e2_exponent,
            e3_exponent,
        });
    }
    Ok(SuzukiObstruction {
        r,
        f_witness,
        candidates,
    })
}

/// The Frobenius counterpart `F = 2·I` on `C2`: the lift `(F, 2)` exists.
pub fn split_control_lift() -> Result<PMorphism> {
    let c2 = crate::catalog::catalog_str("C2", "sc")?;
    let f = PMorphism::scalar(&c2, 2, &int(2));
    Ok(optimal_embedding(&c2, &f)?.psi)
}
