//! Central products `R₁ ⊕_{(A,h₁,h₂)} R₂` and the decomposition of a root
//! datum as a central product of its derived datum and its radical.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::morphism::PMorphism;
use crate::rootdata::{is_isomorphism, RootDatum};
use crate::zlattice::{
    annihilator, fiber_product, lattice_basis, lattice_sum, quotient_presentation, right_inverse,
    saturation, solve_matrix, FinAbPresentation, IntMatrix,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralProductSpec {
    pub r1: RootDatum,
    pub r2: RootDatum,
    pub a: FinAbPresentation,
    /// `X₁ → A`, one column per basis vector of `X₁`.
    pub h1: IntMatrix,
    pub h2: IntMatrix,
}

impl CentralProductSpec {
    /// Checks both data, surjectivity of `h₁, h₂` and `Φᵢ ⊆ Ker hᵢ`. Root
    /// indices in errors run over `Φ₁` followed by `Φ₂`.
    pub fn validate(&self) -> Result<()> {
        self.r1.check()?;
        self.r2.check()?;
        let s = self.a.num_factors();
        if self.h1.rows() != s || self.h1.cols() != self.r1.rank {
            return Err(Error::Dimension(format!(
                "h1 must be {}x{}",
                s, self.r1.rank
            )));
        }
        if self.h2.rows() != s || self.h2.cols() != self.r2.rank {
            return Err(Error::Dimension(format!(
                "h2 must be {}x{}",
                s, self.r2.rank
            )));
        }
        if !self.a.is_surjective(&self.h1) {
            return Err(Error::NotSurjective("h1".into()));
        }
        if !self.a.is_surjective(&self.h2) {
            return Err(Error::NotSurjective("h2".into()));
        }
        let roots = self
            .r1
            .roots
            .iter()
            .map(|r| (&self.h1, r))
            .chain(self.r2.roots.iter().map(|r| (&self.h2, r)));
        for (i, (h, r)) in roots.enumerate() {
            if self.a.reduce(&h.mul_vec(r)).iter().any(|x| !x.is_zero()) {
                return Err(Error::RootNotInKernel { index: i });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralProductResult {
    pub datum: RootDatum,
    pub p1: PMorphism,
    pub p2: PMorphism,
    /// Basis of `B` inside `X₁ ⊕ X₂` (columns).
    pub embed: IntMatrix,
    pub spec: CentralProductSpec,
}

impl CentralProductResult {
    /// `[X₁ ⊕ X₂ : B]`.
    pub fn index(&self) -> Option<num_bigint::BigInt> {
        crate::zlattice::index(&self.embed)
    }
}

pub fn central_product(spec: &CentralProductSpec) -> Result<CentralProductResult> {
    spec.validate()?;
    let fp = fiber_product(&spec.h1, &spec.h2, &spec.a)?;
    let sum = spec.r1.direct_sum(&spec.r2);
    let (datum, basis) = sum.induced_datum(&fp.basis)?;
    let n1 = spec.r1.rank;
    let k1 = spec.r1.num_roots();
    let k2 = spec.r2.num_roots();
    let p1 = PMorphism {
        f: basis.row_range(0, n1),
        p: 0,
        q: vec![1.into(); k1],
        tau: (0..k1).collect(),
    };
    let p2 = PMorphism {
        f: basis.row_range(n1, basis.rows()),
        p: 0,
        q: vec![1.into(); k2],
        tau: (k1..k1 + k2).collect(),
    };
    let name = match (&spec.r1.name, &spec.r2.name) {
        (Some(a), Some(b)) => Some(format!("{a} *[{}] {b}", spec.a.label())),
        _ => None,
    };
    let datum = RootDatum { name, ..datum };
    datum.check()?;
    for (m, r) in [(&p1, &spec.r1), (&p2, &spec.r2)] {
        m.validate_homomorphism(&datum, r)
            .map_err(|v| Error::InvalidMorphism(v.to_string()))?;
    }
    Ok(CentralProductResult {
        datum,
        p1,
        p2,
        embed: basis,
        spec: spec.clone(),
    })
}

/// Direct sum as a central product over the trivial group.
pub fn trivial_spec(r1: &RootDatum, r2: &RootDatum) -> CentralProductSpec {
    CentralProductSpec {
        r1: r1.clone(),
        r2: r2.clone(),
        a: FinAbPresentation::trivial(0),
        h1: IntMatrix::zeros(0, r1.rank),
        h2: IntMatrix::zeros(0, r2.rank),
    }
}

/// A root datum presented as a central product, with the isomorphism
/// `φ: X → B` (in coordinates of the canonical basis of `B`).
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub iso: IntMatrix,
    pub product: CentralProductResult,
}

impl Decomposition {
    pub fn spec(&self) -> &CentralProductSpec {
        &self.product.spec
    }
}

fn surjection_onto(a: &FinAbPresentation, q: &IntMatrix, pi: &IntMatrix) -> Result<IntMatrix> {
    let sigma = right_inverse(pi)?;
    Ok(a.reduce_map(&q.mul(&sigma)))
}

/// The isomorphism `R ≅ R_der ⊕_{(A,h₁,h₂)} R_rad` with
/// `A = X/(Φ^⊤ ⊕ Φ̌^⊥)`.
pub fn decompose_as_central_product(r: &RootDatum) -> Result<Decomposition> {
    let (der, pi_der) = r.derived_datum();
    let (rad, pi_rad) = r.radical();
    let n = r.rank;
    let kernel = lattice_sum(
        &saturation(&r.root_matrix(), n),
        &annihilator(&r.coroot_matrix(), n),
    );
    let a = quotient_presentation(&kernel, n);
    let h1 = surjection_onto(&a, &a.projection, &pi_der)?;
    let h2 = surjection_onto(&a, &a.projection, &pi_rad)?;
    let spec = CentralProductSpec {
        r1: der,
        r2: rad,
        a,
        h1,
        h2,
    };
    finish(r, spec, &pi_der.vstack(&pi_rad))
}

fn finish(r: &RootDatum, spec: CentralProductSpec, phi: &IntMatrix) -> Result<Decomposition> {
    let product = central_product(&spec)?;
    let iso = solve_matrix(&product.embed, phi).ok_or_else(|| {
        Error::InvalidDatum("structure map does not land in the fibre lattice".into())
    })?;
    if !is_isomorphism(&iso, r, &product.datum) {
        return Err(Error::InvalidDatum(
            "structure map is not an isomorphism of root data".into(),
        ));
    }
    Ok(Decomposition { iso, product })
}

/// For a derived embedding `f: R₂ → R₁` (so `f: X₂ ↠ X₁`), the isomorphism
/// `R₂ ≅ R₁ ⊕_{(A,h₁,h₂)} (R₂)_rad` with `A = X₁/f(Φ₂^⊤)` and `f = p₁∘φ`.
pub fn derived_embedding_structure(
    f: &PMorphism,
    r2: &RootDatum,
    r1: &RootDatum,
) -> Result<Decomposition> {
    f.validate(r2, r1)
        .map_err(|v| Error::InvalidMorphism(v.to_string()))?;
    if !f.is_surjective() {
        return Err(Error::InvalidMorphism(
            "a derived embedding must be surjective on lattices".into(),
        ));
    }
    let (rad, pi_rad) = r2.radical();
    let img = f.f.mul(&saturation(&r2.root_matrix(), r2.rank));
    let a = quotient_presentation(&img, r1.rank);
    let h1 = a.projection.clone();
    let h2 = surjection_onto(&a, &a.projection.mul(&f.f), &pi_rad)?;
    let spec = CentralProductSpec {
        r1: r1.clone(),
        r2: rad,
        a,
        h1,
        h2,
    };
    let d = finish(r2, spec, &f.f.vstack(&pi_rad))?;
    if d.product.p1.f.mul(&d.iso) != f.f {
        return Err(Error::InvalidDatum(
            "f does not factor through the first projection".into(),
        ));
    }
    Ok(d)
}

/// `(R_der, R_rad, A)` together with `K = π_der(Φ^⊤)` in derived coordinates.
#[derive(Clone, Debug)]
pub struct Components {
    pub derived: RootDatum,
    pub derived_map: IntMatrix,
    pub radical: RootDatum,
    pub radical_map: IntMatrix,
    pub a: FinAbPresentation,
    pub k: IntMatrix,
}

pub fn recover_components(r: &RootDatum) -> Components {
    let (derived, derived_map) = r.derived_datum();
    let (radical, radical_map) = r.radical();
    let n = r.rank;
    let kernel = lattice_sum(
        &saturation(&r.root_matrix(), n),
        &annihilator(&r.coroot_matrix(), n),
    );
    let a = quotient_presentation(&kernel, n);
    let k = lattice_basis(&derived_map.mul(&saturation(&r.root_matrix(), n)));
    Components {
        derived,
        derived_map,
        radical,
        radical_map,
        a,
        k,
    }
}

/// Conditions (a)–(c) of the structure of a p-morphism between central
/// products of semisimple data with tori.
#[derive(Clone, Debug)]
pub struct ProductMorphismParts {
    pub zeta1: PMorphism,
    pub zeta2: PMorphism,
    /// `A₁ → A₂`
    pub zeta3: IntMatrix,
    pub kernel_preserved: bool,
}

/// Split `ζ: R₁′ → R₂′` (so `ζ: B₁ → B₂`) into `ζ₁ ⊕ ζ₂` and `ζ₃` on `A`.
pub fn decompose_over_central_product(
    zeta: &PMorphism,
    source: &CentralProductResult,
    target: &CentralProductResult,
) -> Result<ProductMorphismParts> {
    let bad = |s: &str| Error::InvalidMorphism(s.to_string());
    zeta.validate(&source.datum, &target.datum)
        .map_err(|v| Error::InvalidMorphism(v.to_string()))?;
    let (s1, s2) = (&source.spec, &target.spec);
    let sig1 = right_inverse(&source.p1.f)?;
    let sig2 = right_inverse(&source.p2.f)?;
    let z1 = target.p1.f.mul(&zeta.f).mul(&sig1);
    let z2 = target.p2.f.mul(&zeta.f).mul(&sig2);
    // (a)
    if target.embed.mul(&zeta.f) != z1.block_diag(&z2).mul(&source.embed) {
        return Err(bad("ζ is not the restriction of ζ₁ ⊕ ζ₂"));
    }
    let mut cols = vec![];
    for j in 0..s1.a.num_factors() {
        let mut e = vec![num_bigint::BigInt::zero(); s1.a.num_factors()];
        e[j] = 1.into();
        let x =
            s1.a.preimage(&s1.h1, &e)
                .ok_or_else(|| bad("h₁ is not onto"))?;
        cols.push(s2.a.reduce(&s2.h1.mul(&z1).mul_vec(&x)));
    }
    let z3 = IntMatrix::from_cols(&cols, s2.a.num_factors());
    // (b) and (c)
    if !s2.a.maps_equal(&z3.mul(&s1.h1), &s2.h1.mul(&z1)) {
        return Err(bad("ζ₃∘h₁ ≠ h₂∘ζ₁"));
    }
    if !s2.a.maps_equal(&z3.mul(&s1.h2), &s2.h2.mul(&z2)) {
        return Err(bad("ζ₃∘f₁ ≠ f₂∘ζ₂"));
    }
    let ker = s1.a.kernel_of(&s1.h1);
    let kernel_preserved = s2.a.reduce_map(&s2.h1.mul(&z1).mul(&ker)).is_zero();
    let zeta1 = PMorphism::infer(&z1, zeta.p, &s1.r1, &s2.r1, true)?;
    let zeta2 = PMorphism::infer(&z2, zeta.p, &s1.r2, &s2.r2, true)?;
    Ok(ProductMorphismParts {
        zeta1,
        zeta2,
        zeta3: z3,
        kernel_preserved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_str, gl};
    use crate::zlattice::{int, ivec};

    fn a1() -> RootDatum {
        catalog_str("A1", "sc").unwrap()
    }

    fn z2_spec(r1: &RootDatum, torus_rank: usize) -> CentralProductSpec {
        let a = FinAbPresentation::standard(ivec(&[2]));
        let mut h2 = IntMatrix::zeros(1, torus_rank);
        h2.set(0, 0, int(1));
        CentralProductSpec {
            r1: r1.clone(),
            r2: RootDatum::torus(torus_rank),
            h1: centre_projection(r1),
            h2,
            a,
        }
    }

    fn centre_projection(r: &RootDatum) -> IntMatrix {
        quotient_presentation(&r.root_matrix(), r.rank).projection
    }

    #[test]
    fn trivial_a_gives_direct_sum() {
        let cp = central_product(&trivial_spec(&a1(), &RootDatum::torus(1))).unwrap();
        assert!(cp.embed.is_identity());
        assert_eq!(cp.datum.roots, a1().direct_sum(&RootDatum::torus(1)).roots);
    }

    #[test]
    fn a1_with_torus_has_index_two() {
        let cp = central_product(&z2_spec(&a1(), 1)).unwrap();
        assert_eq!(cp.index(), Some(int(2)));
        assert!(cp.datum.centre_invariants(0).torsion.is_empty());
        assert!(cp.p1.is_surjective() && cp.p2.is_surjective());
    }

    #[test]
    fn root_outside_kernel_rejected() {
        let mut s = z2_spec(&a1(), 1);
        s.h1 = IntMatrix::from_i64(&[&[1]]);
        s.a = FinAbPresentation::standard(ivec(&[4]));
        s.h2 = IntMatrix::from_i64(&[&[1]]);
        assert!(matches!(
            central_product(&s),
            Err(Error::RootNotInKernel { index: 0 })
        ));
        let mut s = z2_spec(&a1(), 1);
        s.h2 = IntMatrix::from_i64(&[&[2]]);
        assert!(matches!(central_product(&s), Err(Error::NotSurjective(_))));
    }

    #[test]
    fn gl2_decomposition() {
        let d = decompose_as_central_product(&gl(2)).unwrap();
        assert_eq!(d.spec().a.invariant_factors, ivec(&[2]));
        assert_eq!(d.spec().r1.rank, 1);
        assert_eq!(d.spec().r2.rank, 1);
        // φ composed with p₁ is the derived projection
        assert_eq!(d.product.p1.f.mul(&d.iso), gl(2).derived_datum().1);
    }

    #[test]
    fn semisimple_decomposition_is_trivial() {
        let r = catalog_str("B2", "sc").unwrap();
        let d = decompose_as_central_product(&r).unwrap();
        assert!(d.spec().a.is_trivial());
        assert_eq!(d.spec().r2.rank, 0);
    }

    #[test]
    fn recover_gl3() {
        let c = recover_components(&gl(3));
        assert_eq!(c.a.invariant_factors, ivec(&[3]));
        assert_eq!(c.radical.rank, 1);
        assert_eq!(c.derived.centre_invariants(0).torsion, ivec(&[3]));
        assert_eq!(crate::zlattice::index(&c.k), Some(int(3)));
    }

    #[test]
    fn derived_embedding_of_identity() {
        let r = catalog_str("A2", "sc").unwrap();
        let d = derived_embedding_structure(&PMorphism::identity(&r), &r, &r).unwrap();
        assert!(d.spec().a.is_trivial());
        let g = gl(2);
        let (der, pi) = g.derived_datum();
        let f = PMorphism::infer(&pi, 0, &g, &der, true).unwrap();
        let d = derived_embedding_structure(&f, &g, &der).unwrap();
        assert_eq!(d.spec().a.invariant_factors, ivec(&[2]));
    }

    #[test]
    fn identity_splits_into_identities() {
        let cp = central_product(&z2_spec(&a1(), 1)).unwrap();
        let parts =
            decompose_over_central_product(&PMorphism::identity(&cp.datum), &cp, &cp).unwrap();
        assert!(parts.zeta1.f.is_identity());
        assert!(parts.zeta2.f.is_identity());
        assert!(parts.zeta3.is_identity());
        assert!(parts.kernel_preserved);
    }
}
