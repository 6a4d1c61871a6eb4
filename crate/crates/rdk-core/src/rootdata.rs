//! Root data `(X, Φ, X̌, Φ̌)` with `X = Z^n` and `X̌` its dual under the dot
//! product. The root/coroot bijection is positional.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::zlattice::{
    self, dot, free_quotient_map, is_zero_vec, lattice_basis, quotient_invariants, saturation,
    solve, vscale, vsub, IntMatrix, IntVec,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootDatum {
    pub rank: usize,
    pub roots: Vec<IntVec>,
    pub coroots: Vec<IntVec>,
    pub name: Option<String>,
}

/// First axiom failure found by [`RootDatum::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    CountMismatch {
        roots: usize,
        coroots: usize,
    },
    WrongLength {
        index: usize,
        coroot: bool,
        len: usize,
    },
    Pairing {
        index: usize,
        value: BigInt,
    },
    ReflectionNotRoot {
        reflect: usize,
        root: usize,
    },
    ReflectionNotCoroot {
        reflect: usize,
        coroot: usize,
    },
    CorootMismatch {
        reflect: usize,
        root: usize,
        image: usize,
    },
    NotReduced {
        root: usize,
        multiple: usize,
    },
    Duplicate {
        first: usize,
        second: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CountMismatch { roots, coroots } => {
                write!(f, "{roots} roots but {coroots} coroots")
            }
            Violation::WrongLength { index, coroot, len } => {
                let what = if *coroot { "coroot" } else { "root" };
                write!(f, "{what} {index} has length {len}, not the rank")
            }
            Violation::Pairing { index, value } => {
                write!(f, "<alpha_{index}, alpha_{index}^v> = {value}, expected 2")
            }
            Violation::ReflectionNotRoot { reflect, root } => {
                write!(f, "s_{reflect}(alpha_{root}) is not a root")
            }
            Violation::ReflectionNotCoroot { reflect, coroot } => {
                write!(f, "s_{reflect}^v(alpha_{coroot}^v) is not a coroot")
            }
            Violation::CorootMismatch { reflect, root, image } => write!(
                f,
                "s_{reflect}(alpha_{root}) = alpha_{image} but the reflected coroot is not alpha_{image}^v"
            ),
            Violation::NotReduced { root, multiple } => {
                write!(f, "alpha_{multiple} is a multiple of alpha_{root} other than +-1")
            }
            Violation::Duplicate { first, second } => write!(f, "roots {first} and {second} coincide"),
        }
    }
}

/// Torsion of `X/ZΦ` split at a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentreInvariants {
    pub torsion: IntVec,
    pub p_part: IntVec,
    pub p_prime_part: IntVec,
    pub free_rank: usize,
}

impl CentreInvariants {
    pub fn connected_centre(&self) -> bool {
        self.p_prime_part.is_empty()
    }

    pub fn smooth_centre(&self) -> bool {
        self.torsion.is_empty()
    }
}

fn split_prime(d: &BigInt, p: u64) -> (BigInt, BigInt) {
    if p == 0 {
        return (BigInt::one(), d.clone());
    }
    let p = BigInt::from(p);
    let mut pp = BigInt::one();
    let mut rest = d.clone();
    while rest.is_multiple_of(&p) {
        rest /= &p;
        pp *= &p;
    }
    (pp, rest)
}

/// Sort a list of cyclic orders into invariant-factor form (descending, no 1s).
pub fn normalize_factors(cyclic: &[BigInt]) -> IntVec {
    let diag = IntMatrix::diagonal(cyclic);
    zlattice::quotient_invariants(&diag, cyclic.len()).0
}

impl RootDatum {
    pub fn new(rank: usize, roots: Vec<IntVec>, coroots: Vec<IntVec>) -> Self {
        RootDatum {
            rank,
            roots,
            coroots,
            name: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn torus(rank: usize) -> Self {
        RootDatum::new(rank, vec![], vec![]).with_name(format!("T{rank}"))
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn is_torus(&self) -> bool {
        self.roots.is_empty()
    }

    /// Roots as the columns of an `n × |Φ|` matrix.
    pub fn root_matrix(&self) -> IntMatrix {
        IntMatrix::from_cols(&self.roots, self.rank)
    }

    pub fn coroot_matrix(&self) -> IntMatrix {
        IntMatrix::from_cols(&self.coroots, self.rank)
    }

    pub fn root_rank(&self) -> usize {
        self.root_matrix().rank()
    }

    pub fn is_semisimple(&self) -> bool {
        self.root_rank() == self.rank
    }

    /// `<α_i, α̌_j>`
    pub fn pairing(&self, i: usize, j: usize) -> BigInt {
        dot(&self.roots[i], &self.coroots[j])
    }

    pub fn root_index(&self, v: &[BigInt]) -> Option<usize> {
        self.roots.iter().position(|r| r.as_slice() == v)
    }

    pub fn coroot_index(&self, v: &[BigInt]) -> Option<usize> {
        self.coroots.iter().position(|r| r.as_slice() == v)
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let n = self.rank;
        if self.roots.len() != self.coroots.len() {
            return Err(Violation::CountMismatch {
                roots: self.roots.len(),
                coroots: self.coroots.len(),
            });
        }
        for (i, r) in self.roots.iter().enumerate() {
            if r.len() != n {
                return Err(Violation::WrongLength {
                    index: i,
                    coroot: false,
                    len: r.len(),
                });
            }
        }
        for (i, r) in self.coroots.iter().enumerate() {
            if r.len() != n {
                return Err(Violation::WrongLength {
                    index: i,
                    coroot: true,
                    len: r.len(),
                });
            }
        }
        for i in 0..self.roots.len() {
            let v = self.pairing(i, i);
            if v != BigInt::from(2) {
                return Err(Violation::Pairing { index: i, value: v });
            }
        }
        let mut by_root: HashMap<&IntVec, usize> = HashMap::new();
        for (i, r) in self.roots.iter().enumerate() {
            if let Some(&j) = by_root.get(r) {
                return Err(Violation::Duplicate {
                    first: j,
                    second: i,
                });
            }
            by_root.insert(r, i);
        }
        let by_coroot: HashMap<&IntVec, usize> = self
            .coroots
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        for i in 0..self.roots.len() {
            for j in 0..self.roots.len() {
                let img = vsub(&self.roots[j], &vscale(&self.pairing(j, i), &self.roots[i]));
                let Some(&k) = by_root.get(&img) else {
                    return Err(Violation::ReflectionNotRoot {
                        reflect: i,
                        root: j,
                    });
                };
                let cimg = vsub(
                    &self.coroots[j],
                    &vscale(&self.pairing(i, j), &self.coroots[i]),
                );
                if !by_coroot.contains_key(&cimg) {
                    return Err(Violation::ReflectionNotCoroot {
                        reflect: i,
                        coroot: j,
                    });
                }
                if self.coroots[k] != cimg {
                    return Err(Violation::CorootMismatch {
                        reflect: i,
                        root: j,
                        image: k,
                    });
                }
            }
        }
        for i in 0..self.roots.len() {
            for j in 0..self.roots.len() {
                if i == j {
                    continue;
                }
                if let Some(c) = proportion(&self.roots[i], &self.roots[j]) {
                    if c != (1, 1) && c != (-1, 1) {
                        return Err(Violation::NotReduced {
                            root: i,
                            multiple: j,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check(&self) -> Result<()> {
        self.validate()
            .map_err(|v| Error::InvalidDatum(v.to_string()))
    }

    pub fn dual(&self) -> RootDatum {
        RootDatum {
            rank: self.rank,
            roots: self.coroots.clone(),
            coroots: self.roots.clone(),
            name: self.name.as_ref().map(|n| dual_name(n)),
        }
    }

    pub fn direct_sum(&self, other: &RootDatum) -> RootDatum {
        let (n1, n2) = (self.rank, other.rank);
        let pad = |v: &IntVec, left: bool| -> IntVec {
            let mut out = vec![BigInt::zero(); n1 + n2];
            let off = if left { 0 } else { n1 };
            for (k, x) in v.iter().enumerate() {
                out[off + k] = x.clone();
            }
            out
        };
        let mut roots: Vec<IntVec> = self.roots.iter().map(|r| pad(r, true)).collect();
        roots.extend(other.roots.iter().map(|r| pad(r, false)));
        let mut coroots: Vec<IntVec> = self.coroots.iter().map(|r| pad(r, true)).collect();
        coroots.extend(other.coroots.iter().map(|r| pad(r, false)));
        let name = match (&self.name, &other.name) {
            (Some(a), Some(b)) => Some(format!("{a} + {b}")),
            _ => None,
        };
        RootDatum {
            rank: n1 + n2,
            roots,
            coroots,
            name,
        }
    }

    pub fn torus_part(&self) -> RootDatum {
        RootDatum::torus(self.rank)
    }

    /// The datum on a sublattice `A ⊇ ZΦ`, in coordinates of the canonical
    /// basis of `A`, together with that basis (the inclusion `A → X`).
    pub fn induced_datum(&self, a_gens: &IntMatrix) -> Result<(RootDatum, IntMatrix)> {
        if a_gens.rows() != self.rank {
            return Err(Error::Dimension(format!(
                "sublattice lives in Z^{} but the datum has rank {}",
                a_gens.rows(),
                self.rank
            )));
        }
        let b = lattice_basis(a_gens);
        let mut roots = Vec::with_capacity(self.roots.len());
        for (i, r) in self.roots.iter().enumerate() {
            roots.push(solve(&b, r).ok_or(Error::RootNotInLattice { index: i })?);
        }
        let bt = b.transpose();
        let coroots = self.coroots.iter().map(|c| bt.mul_vec(c)).collect();
        Ok((
            RootDatum {
                rank: b.cols(),
                roots,
                coroots,
                name: None,
            },
            b,
        ))
    }

    /// The datum co-induced by `B ⊇ ZΦ̌` in `X̌`, with the map `X → X/B^⊥`
    /// (given by `Bᵀ` in the canonical basis of `B`).
    pub fn coinduced_datum(&self, b_gens: &IntMatrix) -> Result<(RootDatum, IntMatrix)> {
        let (d, b) = self.dual().induced_datum(b_gens)?;
        Ok((d.dual(), b.transpose()))
    }

    /// `(X/Φ̌^⊥, Φ, Φ̌^⊤, Φ̌)` and the projection `X → X/Φ̌^⊥`.
    pub fn derived_datum(&self) -> (RootDatum, IntMatrix) {
        let sat = saturation(&self.coroot_matrix(), self.rank);
        let (d, proj) = self
            .coinduced_datum(&sat)
            .expect("coroots lie in their saturation");
        let name = self.name.as_ref().map(|n| format!("der({n})"));
        (RootDatum { name, ..d }, proj)
    }

    /// The torus `X/Φ^⊤` and the projection onto it.
    pub fn radical(&self) -> (RootDatum, IntMatrix) {
        let proj = free_quotient_map(&self.root_matrix(), self.rank);
        (RootDatum::torus(proj.rows()), proj)
    }

    pub fn centre_invariants(&self, p: u64) -> CentreInvariants {
        let (torsion, free_rank) = quotient_invariants(&self.root_matrix(), self.rank);
        let mut pp = vec![];
        let mut pq = vec![];
        for d in &torsion {
            let (a, b) = split_prime(d, p);
            pp.push(a);
            pq.push(b);
        }
        CentreInvariants {
            torsion,
            p_part: normalize_factors(&pp),
            p_prime_part: normalize_factors(&pq),
            free_rank,
        }
    }

    /// Image of the datum under a unimodular change of coordinates `g` of `X`.
    pub fn transform(&self, g: &IntMatrix) -> Result<RootDatum> {
        let ginv = g
            .unimodular_inverse()
            .ok_or_else(|| Error::Input("change of basis is not unimodular".into()))?;
        let git = ginv.transpose();
        Ok(RootDatum {
            rank: self.rank,
            roots: self.roots.iter().map(|r| g.mul_vec(r)).collect(),
            coroots: self.coroots.iter().map(|c| git.mul_vec(c)).collect(),
            name: self.name.clone(),
        })
    }

    /// A functional that is nonzero on every root.
    pub fn generic_functional(&self) -> IntVec {
        let bound = self
            .roots
            .iter()
            .flat_map(|r| r.iter().map(|x| x.abs()))
            .max()
            .unwrap_or_else(BigInt::zero);
        let m = bound * 2 + 1;
        let mut out = Vec::with_capacity(self.rank);
        let mut c = BigInt::one();
        for _ in 0..self.rank {
            out.push(c.clone());
            c *= &m;
        }
        out
    }

    /// Indices of positive roots and of the simple roots for the given functional.
    pub fn base_for(&self, functional: &[BigInt]) -> (Vec<usize>, Vec<usize>) {
        let positive: Vec<usize> = (0..self.roots.len())
            .filter(|&i| dot(&self.roots[i], functional).is_positive())
            .collect();
        let sums: std::collections::HashSet<IntVec> = positive
            .iter()
            .flat_map(|&i| positive.iter().map(move |&j| (i, j)))
            .map(|(i, j)| zlattice::vadd(&self.roots[i], &self.roots[j]))
            .collect();
        let mut simple: Vec<usize> = positive
            .iter()
            .copied()
            .filter(|&i| !sums.contains(&self.roots[i]))
            .collect();
        simple.sort_by_key(|&i| dot(&self.roots[i], functional));
        (positive, simple)
    }

    pub fn simple_roots(&self) -> Vec<usize> {
        self.base_for(&self.generic_functional()).1
    }

    pub fn cartan_matrix_for(&self, simple: &[usize]) -> IntMatrix {
        let k = simple.len();
        let mut m = IntMatrix::zeros(k, k);
        for (a, &i) in simple.iter().enumerate() {
            for (b, &j) in simple.iter().enumerate() {
                m.set(a, b, self.pairing(i, j));
            }
        }
        m
    }

    pub fn based(&self) -> BasedRootDatum {
        BasedRootDatum {
            datum: self.clone(),
            simple_indices: self.simple_roots(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedRootDatum {
    pub datum: RootDatum,
    pub simple_indices: Vec<usize>,
}

impl BasedRootDatum {
    /// Every root is a nonnegative or nonpositive combination of the base.
    pub fn is_base(&self) -> bool {
        let b = self.datum.root_matrix().select_cols(&self.simple_indices);
        self.datum.roots.iter().all(|r| match solve(&b, r) {
            Some(c) => c.iter().all(|x| !x.is_negative()) || c.iter().all(|x| !x.is_positive()),
            None => false,
        })
    }
}

fn dual_name(n: &str) -> String {
    if let Some(s) = n.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
        s.to_string()
    } else {
        format!("dual({n})")
    }
}

/// If `b = (num/den)·a` with `a, b` nonzero, return `(num, den)` reduced.
fn proportion(a: &[BigInt], b: &[BigInt]) -> Option<(i64, i64)> {
    let k = a.iter().position(|x| !x.is_zero())?;
    let (p, q) = (&b[k], &a[k]);
    if a.iter().zip(b).any(|(x, y)| y * q != x * p) || is_zero_vec(b) {
        return None;
    }
    let g = p.gcd(q);
    let (mut n, mut d) = (p / &g, q / &g);
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    Some((
        i64::try_from(&n).unwrap_or(i64::MAX),
        i64::try_from(&d).unwrap_or(i64::MAX),
    ))
}

/// Permutation `π` with `g(α_i) = β_{π(i)}` and `gᵀ(β̌_{π(i)}) = α̌_i`, if `g`
/// is an isomorphism of root data `r1 → r2`.
pub fn root_permutation(g: &IntMatrix, r1: &RootDatum, r2: &RootDatum) -> Option<Vec<usize>> {
    if r1.rank != r2.rank
        || r1.num_roots() != r2.num_roots()
        || g.rows() != r1.rank
        || g.cols() != r1.rank
    {
        return None;
    }
    if !g.det().abs().is_one() {
        return None;
    }
    let index: HashMap<&IntVec, usize> = r2.roots.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let gt = g.transpose();
    let mut perm = Vec::with_capacity(r1.num_roots());
    for (i, r) in r1.roots.iter().enumerate() {
        let j = *index.get(&g.mul_vec(r))?;
        if gt.mul_vec(&r2.coroots[j]) != r1.coroots[i] {
            return None;
        }
        perm.push(j);
    }
    Some(perm)
}

pub fn is_isomorphism(g: &IntMatrix, r1: &RootDatum, r2: &RootDatum) -> bool {
    root_permutation(g, r1, r2).is_some()
}
