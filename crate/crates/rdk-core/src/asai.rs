//! Completion of two derived embeddings, smooth coverings through duality,
//! and smooth embeddings for cyclically permuted blocks. Each construction
//! returns the identities it was checked against.

use crate::central::{central_product, CentralProductResult, CentralProductSpec};
use crate::embed::{is_derived_embedding, restrict, smooth_regular_embedding, SmoothEmbedding};
use crate::error::{Error, Result};
use crate::morphism::{dualize, is_p_steinberg, PMorphism, SteinbergVerdict};
use crate::rootdata::RootDatum;
use crate::zlattice::{
    kernel, quotient_invariants, quotient_presentation, same_lattice, saturation, solve, vadd,
    vsub, IntMatrix, IntVec,
};

/// Steinberg endomorphisms `F` of `R` and `Fᵢ` of `Rᵢ` with `σᵢ∘Fᵢ = F∘σᵢ`.
#[derive(Clone, Copy, Debug)]
pub struct SteinbergTriple<'a> {
    pub f: &'a PMorphism,
    pub f1: &'a PMorphism,
    pub f2: &'a PMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionCertificate {
    /// `σ₁∘π₁ = σ₂∘π₂ = p`.
    pub square_commutes: bool,
    pub torsion_free: bool,
    pub pi_surjective: [bool; 2],
    /// `p∘ψ = F∘p` and `πᵢ∘ψ = Fᵢ∘πᵢ`.
    pub steinberg_commutes: Option<bool>,
}

impl CompletionCertificate {
    pub fn holds(&self) -> bool {
        self.square_commutes
            && self.torsion_free
            && self.pi_surjective.iter().all(|&b| b)
            && self.steinberg_commutes != Some(false)
    }
}

#[derive(Clone, Debug)]
pub struct Completion {
    pub datum: RootDatum,
    pub product: CentralProductResult,
    /// Basis of `S ⊆ X₁ ⊕ X₂` as columns.
    pub s_basis: IntMatrix,
    pub projection: PMorphism,
    pub pi1: PMorphism,
    pub pi2: PMorphism,
    pub psi: Option<PMorphism>,
    pub certificate: CompletionCertificate,
}

/// `πᵢ: X′ → Xᵢ` sending `(x, (s₁, s₂))` to `sᵢ + m` with `σᵢ(m) = x − σᵢ(sᵢ)`,
/// `m` taken in `ZΦᵢ` along the root bijection.
fn completion_map(
    full: &IntMatrix,
    offset: usize,
    s: &PMorphism,
    ri: &RootDatum,
    r: &RootDatum,
) -> Result<IntMatrix> {
    let n = r.rank;
    let phi = r.root_matrix();
    let lifted: Vec<IntVec> = s.tau.iter().map(|&b| ri.roots[b].clone()).collect();
    let lifted = IntMatrix::from_cols(&lifted, ri.rank);
    let mut cols = Vec::with_capacity(full.cols());
    for b in full.col_vecs() {
        let x = &b[..n];
        let si = &b[offset..offset + ri.rank];
        let d = vsub(x, &s.f.mul_vec(si));
        let c = solve(&phi, &d)
            .ok_or_else(|| Error::InvalidDatum("fibre element is off by a non-root".into()))?;
        cols.push(vadd(si, &lifted.mul_vec(&c)));
    }
    Ok(IntMatrix::from_cols(&cols, ri.rank))
}

fn commuting_square(s: &PMorphism, fi: &PMorphism, f: &PMorphism) -> bool {
    s.f.mul(&fi.f) == f.f.mul(&s.f)
}

pub fn complete_embeddings(
    r: &RootDatum,
    s1: (&PMorphism, &RootDatum),
    s2: (&PMorphism, &RootDatum),
    steinberg: Option<SteinbergTriple<'_>>,
) -> Result<Completion> {
    r.check()?;
    for (i, (s, ri)) in [s1, s2].into_iter().enumerate() {
        ri.check()?;
        if !is_derived_embedding(s, ri, r) {
            return Err(Error::InvalidMorphism(format!(
                "map {} is not a derived embedding",
                i + 1
            )));
        }
    }
    let ((s1, r1), (s2, r2)) = (s1, s2);
    if let Some(st) = steinberg {
        for (s, fi, ri) in [(s1, st.f1, r1), (s2, st.f2, r2)] {
            fi.validate(ri, ri)
                .map_err(|v| Error::InvalidMorphism(v.to_string()))?;
            if !commuting_square(s, fi, st.f) {
                return Err(Error::InvalidMorphism(
                    "Steinberg data are not compatible with the embeddings".into(),
                ));
            }
        }
    }
    let (n, n1, n2) = (r.rank, r1.rank, r2.rank);
    let s_basis = kernel(&s1.f.hstack(&s2.f.neg()));
    let t = s_basis.cols();
    let a = quotient_presentation(&r.root_matrix(), n);
    let f = a.reduce_map(&a.projection.mul(&s1.f).mul(&s_basis.row_range(0, n1)));
    let spec = CentralProductSpec {
        r1: r.clone(),
        r2: RootDatum::torus(t),
        h1: a.projection.clone(),
        h2: f,
        a,
    };
    let product = central_product(&spec)?;
    let j = IntMatrix::identity(n).block_diag(&s_basis);
    let full = j.mul(&product.embed);
    let datum = product.datum.clone();
    let projection = product.p1.clone();
    let pi1 = PMorphism::infer(&completion_map(&full, n, s1, r1, r)?, 0, &datum, r1, true)?;
    let pi2 = PMorphism::infer(
        &completion_map(&full, n + n1, s2, r2, r)?,
        0,
        &datum,
        r2,
        true,
    )?;
    let square_commutes = s1.f.mul(&pi1.f) == projection.f && s2.f.mul(&pi2.f) == projection.f;
    let (psi, steinberg_commutes) = match steinberg {
        None => (None, None),
        Some(st) => {
            let big = st.f.f.block_diag(&st.f1.f).block_diag(&st.f2.f);
            let m = restrict(&full, &big).ok_or_else(|| {
                Error::InvalidMorphism("ψ does not preserve the completed lattice".into())
            })?;
            let psi = PMorphism::infer(&m, st.f.p, &datum, &datum, true)?;
            let ok = commuting_square(&projection, &psi, st.f)
                && commuting_square(&pi1, &psi, st.f1)
                && commuting_square(&pi2, &psi, st.f2);
            (Some(psi), Some(ok))
        }
    };
    debug_assert_eq!(full.rows(), n + n1 + n2);
    let certificate = CompletionCertificate {
        square_commutes,
        torsion_free: datum.centre_invariants(0).torsion.is_empty(),
        pi_surjective: [pi1.is_surjective(), pi2.is_surjective()],
        steinberg_commutes,
    };
    Ok(Completion {
        datum,
        product,
        s_basis,
        projection,
        pi1,
        pi2,
        psi,
        certificate,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringCertificate {
    /// `f̌` injective with torsion-free cokernel: the kernel of the covering is a torus.
    pub kernel_is_torus: bool,
    /// `Φ̌̃^⊤ = ZΦ̌̃` in `Ỹ`.
    pub derived_simply_connected: bool,
    /// `Tor(X̃/ZΦ̃) ≅ Tor(X/ZΦ)`.
    pub torsion_transfer: bool,
    /// `f̌∘F = F̃∘f̌` and the double dual of `F` is `F`.
    pub steinberg_transport: Option<bool>,
}

impl CoveringCertificate {
    pub fn holds(&self) -> bool {
        self.kernel_is_torus
            && self.derived_simply_connected
            && self.torsion_transfer
            && self.steinberg_transport != Some(false)
    }
}

#[derive(Clone, Debug)]
pub struct Covering {
    /// Dual of the smooth embedding of the dual.
    pub datum: RootDatum,
    /// `f̌: R → R̃`.
    pub map: PMorphism,
    pub f_tilde: Option<PMorphism>,
    pub embedding: SmoothEmbedding,
    pub certificate: CoveringCertificate,
}

pub fn smooth_covering(
    r: &RootDatum,
    frobenius: Option<&PMorphism>,
    force_construction: bool,
) -> Result<Covering> {
    r.check()?;
    let dual_f = frobenius.map(dualize).transpose()?;
    let embedding = smooth_regular_embedding(&r.dual(), dual_f.as_ref(), force_construction)?;
    let datum = embedding.datum.dual();
    let map = dualize(&embedding.p1)?;
    let f_tilde = embedding.psi.as_ref().map(dualize).transpose()?;
    let fc = &map.f;
    let (tors, _) = quotient_invariants(fc, fc.rows());
    let kernel_is_torus = fc.rank() == r.rank && tors.is_empty();
    let coroots = datum.coroot_matrix();
    let derived_simply_connected = same_lattice(&saturation(&coroots, datum.rank), &coroots);
    let torsion_transfer = datum.centre_invariants(0).torsion == r.centre_invariants(0).torsion;
    let steinberg_transport = match (frobenius, &f_tilde) {
        (Some(f), Some(ft)) => Some(fc.mul(&f.f) == ft.f.mul(fc) && dualize(&dualize(f)?)? == *f),
        _ => None,
    };
    Ok(Covering {
        datum,
        map,
        f_tilde,
        embedding,
        certificate: CoveringCertificate {
            kernel_is_torus,
            derived_simply_connected,
            torsion_transfer,
            steinberg_transport,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicCertificate {
    /// `h∘ψ = F∘h`.
    pub commutes: bool,
    /// `ψⁿ` maps `X′₁` into itself.
    pub stabilises_block1: bool,
    /// `h₁∘ψⁿ|₁ = Fⁿ|₁∘h₁`.
    pub block1_commutes: bool,
    pub steinberg: Option<bool>,
}

impl CyclicCertificate {
    pub fn holds(&self) -> bool {
        self.commutes
            && self.stabilises_block1
            && self.block1_commutes
            && self.steinberg != Some(false)
    }
}

#[derive(Clone, Debug)]
pub struct CyclicEmbedding {
    pub datum: RootDatum,
    pub blocks: Vec<SmoothEmbedding>,
    pub h: PMorphism,
    pub psi: PMorphism,
    /// `ψⁿ` restricted to the first block.
    pub psi_n_block1: IntMatrix,
    pub certificate: CyclicCertificate,
}

fn offsets(ranks: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for r in ranks {
        out.push(out.last().unwrap() + r);
    }
    out
}

fn block(m: &IntMatrix, rows: (usize, usize), cols: (usize, usize)) -> IntMatrix {
    m.row_range(rows.0, rows.1).col_range(cols.0, cols.1)
}

/// `F` on `R₁ ⊕ … ⊕ Rₙ` sending block `i+1` onto block `i` (cyclically).
pub fn cyclic_block_embedding(blocks: &[RootDatum], f: &PMorphism) -> Result<CyclicEmbedding> {
    let n = blocks.len();
    if n == 0 {
        return Err(Error::Input("at least one block is needed".into()));
    }
    let r = blocks[1..]
        .iter()
        .fold(blocks[0].clone(), |acc, b| acc.direct_sum(b));
    f.validate(&r, &r)
        .map_err(|v| Error::InvalidMorphism(v.to_string()))?;
    let ranks: Vec<usize> = blocks.iter().map(|b| b.rank).collect();
    let off = offsets(&ranks);
    for i in 0..n {
        for j in 0..n {
            let b = block(&f.f, (off[i], off[i + 1]), (off[j], off[j + 1]));
            let nonzero = j == (i + 1) % n;
            if nonzero && (ranks[i] != ranks[j] || b.det().sign() == num_bigint::Sign::NoSign) {
                return Err(Error::InvalidMorphism(format!(
                    "F does not map block {} onto block {}",
                    j + 1,
                    i + 1
                )));
            }
            if !nonzero && !b.is_zero() {
                return Err(Error::InvalidMorphism(
                    "F is not a cyclic block permutation".into(),
                ));
            }
        }
    }
    let embs: Vec<SmoothEmbedding> = blocks
        .iter()
        .map(|b| smooth_regular_embedding(b, None, true))
        .collect::<Result<_>>()?;
    let new_ranks: Vec<usize> = embs.iter().map(|e| e.datum.rank).collect();
    let noff = offsets(&new_ranks);
    let total = noff[n];
    let mut psi = IntMatrix::zeros(total, total);
    for i in 0..n {
        let j = (i + 1) % n;
        let fij = block(&f.f, (off[i], off[i + 1]), (off[j], off[j + 1]));
        let (ei, ej) = (
            &embs[i].product.as_ref().unwrap().embed,
            &embs[j].product.as_ref().unwrap().embed,
        );
        let b = solve_matrix_checked(ei, &fij.block_diag(&fij).mul(ej))?;
        for a in 0..b.rows() {
            for c in 0..b.cols() {
                psi.set(noff[i] + a, noff[j] + c, b.get(a, c).clone());
            }
        }
    }
    let datum = embs[1..]
        .iter()
        .fold(embs[0].datum.clone(), |acc, e| acc.direct_sum(&e.datum));
    let hmat = embs[1..]
        .iter()
        .fold(embs[0].p1.f.clone(), |acc, e| acc.block_diag(&e.p1.f));
    let h = PMorphism::infer(&hmat, 0, &datum, &r, true)?;
    let psi = PMorphism::infer(&psi, f.p, &datum, &datum, true)?;
    let commutes = h.f.mul(&psi.f) == f.f.mul(&h.f);
    let psin = psi.f.pow(n as u64);
    let stabilises_block1 = block(&psin, (noff[1], total), (0, noff[1])).is_zero();
    let psi_n_block1 = block(&psin, (0, noff[1]), (0, noff[1]));
    let fn1 = block(&f.f.pow(n as u64), (0, off[1]), (0, off[1]));
    let block1_commutes = embs[0].p1.f.mul(&psi_n_block1) == fn1.mul(&embs[0].p1.f);
    let steinberg = if f.p == 0 {
        None
    } else {
        let f_st = matches!(is_p_steinberg(f, None)?, SteinbergVerdict::Steinberg(_));
        let psi_st = matches!(is_p_steinberg(&psi, None)?, SteinbergVerdict::Steinberg(_));
        Some(!f_st || psi_st)
    };
    Ok(CyclicEmbedding {
        datum,
        blocks: embs,
        h,
        psi,
        psi_n_block1,
        certificate: CyclicCertificate {
            commutes,
            stabilises_block1,
            block1_commutes,
            steinberg,
        },
    })
}

fn solve_matrix_checked(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    crate::zlattice::solve_matrix(a, b).ok_or_else(|| {
        Error::InvalidMorphism("F does not preserve the block fibre lattices".into())
    })
}
