//! p-morphisms `(f, q, τ): R′ → R` with `f: X′ → X` running along the arrow on
//! character lattices and `τ: Φ → Φ′` running backwards on roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::{Error, Result};
use crate::rootdata::RootDatum;
use crate::zlattice::{int, vscale, IntMatrix, IntVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMorphism {
    /// `target.rank × source.rank`
    pub f: IntMatrix,
    pub p: u64,
    /// `q[a]` for each root `a` of the target.
    pub q: Vec<BigInt>,
    /// `tau[a]` is the source root matched with target root `a`.
    pub tau: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    Shape(String),
    NotPrime(u64),
    TauNotBijective,
    BadQ { root: usize, q: BigInt },
    RootCondition { root: usize },
    CorootCondition { root: usize },
    UnmatchedRootNotKilled { source_root: usize },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::Shape(s) => write!(f, "shape mismatch: {s}"),
            MorphismViolation::NotPrime(p) => write!(f, "p = {p} is neither 0 nor a prime"),
            MorphismViolation::TauNotBijective => write!(f, "tau is not a bijection of roots"),
            MorphismViolation::BadQ { root, q } => write!(f, "q({root}) = {q} is not a power of p"),
            MorphismViolation::RootCondition { root } => {
                write!(f, "f(tau(alpha_{root})) != q(alpha_{root}) alpha_{root}")
            }
            MorphismViolation::CorootCondition { root } => {
                write!(
                    f,
                    "f^T(alpha_{root}^v) != q(alpha_{root}) tau(alpha_{root})^v"
                )
            }
            MorphismViolation::UnmatchedRootNotKilled { source_root } => {
                write!(
                    f,
                    "source root {source_root} is unmatched but not sent to 0"
                )
            }
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// `Some(k)` if `q = p^k` (with `p = 0` only `q = 1` qualifies).
pub fn p_power_exponent(q: &BigInt, p: u64) -> Option<u64> {
    if q.is_one() {
        return Some(0);
    }
    if p < 2 || !q.is_positive() {
        return None;
    }
    let p = BigInt::from(p);
    let mut x = q.clone();
    let mut k = 0;
    while x.is_multiple_of(&p) {
        x /= &p;
        k += 1;
    }
    x.is_one().then_some(k)
}

/// `c` with `v = c·w` exactly, for nonzero `w`.
fn ratio(v: &[BigInt], w: &[BigInt]) -> Option<BigInt> {
    let k = w.iter().position(|x| !x.is_zero())?;
    let (c, r) = v[k].div_rem(&w[k]);
    if !r.is_zero() {
        return None;
    }
    (vscale(&c, w) == v).then_some(c)
}

impl PMorphism {
    pub fn identity(r: &RootDatum) -> Self {
        PMorphism {
            f: IntMatrix::identity(r.rank),
            p: 0,
            q: vec![BigInt::one(); r.num_roots()],
            tau: (0..r.num_roots()).collect(),
        }
    }

    /// `f = q·I`, `τ = id`; `q` must be a power of `p`.
    pub fn scalar(r: &RootDatum, p: u64, q: &BigInt) -> Self {
        PMorphism {
            f: IntMatrix::scalar(r.rank, q),
            p,
            q: vec![q.clone(); r.num_roots()],
            tau: (0..r.num_roots()).collect(),
        }
    }

    /// Recover `q` and `τ` from `f`. With `strict = false`, source roots
    /// outside the image of `τ` must be sent to zero.
    pub fn infer(
        f: &IntMatrix,
        p: u64,
        source: &RootDatum,
        target: &RootDatum,
        strict: bool,
    ) -> Result<Self> {
        if f.rows() != target.rank || f.cols() != source.rank {
            return Err(Error::InvalidMorphism(format!(
                "f is {}x{} but the data have ranks {} -> {}",
                f.rows(),
                f.cols(),
                source.rank,
                target.rank
            )));
        }
        let ft = f.transpose();
        let images: Vec<IntVec> = source.roots.iter().map(|b| f.mul_vec(b)).collect();
        let mut q = Vec::with_capacity(target.num_roots());
        let mut tau = Vec::with_capacity(target.num_roots());
        for (a, alpha) in target.roots.iter().enumerate() {
            let co = ft.mul_vec(&target.coroots[a]);
            let hit = images.iter().enumerate().find_map(|(b, img)| {
                let c = ratio(img, alpha)?;
                (c.is_positive() && vscale(&c, &source.coroots[b]) == co).then_some((b, c))
            });
            let (b, c) = hit.ok_or_else(|| {
                Error::InvalidMorphism(format!("no source root matches target root {a}"))
            })?;
            if p_power_exponent(&c, p).is_none() {
                return Err(Error::InvalidMorphism(format!(
                    "q({a}) = {c} is not a power of p = {p}"
                )));
            }
            tau.push(b);
            q.push(c);
        }
        let m = PMorphism {
            f: f.clone(),
            p,
            q,
            tau,
        };
        m.validate_with(source, target, strict)
            .map_err(|v| Error::InvalidMorphism(v.to_string()))?;
        Ok(m)
    }

    pub fn validate(
        &self,
        source: &RootDatum,
        target: &RootDatum,
    ) -> std::result::Result<(), MorphismViolation> {
        self.validate_with(source, target, true)
    }

    /// Homomorphism check allowing extra source roots that map to zero.
    pub fn validate_homomorphism(
        &self,
        source: &RootDatum,
        target: &RootDatum,
    ) -> std::result::Result<(), MorphismViolation> {
        self.validate_with(source, target, false)
    }

    pub fn validate_with(
        &self,
        source: &RootDatum,
        target: &RootDatum,
        strict: bool,
    ) -> std::result::Result<(), MorphismViolation> {
        if self.p != 0 && !is_prime(self.p) {
            return Err(MorphismViolation::NotPrime(self.p));
        }
        if self.f.rows() != target.rank || self.f.cols() != source.rank {
            return Err(MorphismViolation::Shape(format!(
                "f is {}x{}, expected {}x{}",
                self.f.rows(),
                self.f.cols(),
                target.rank,
                source.rank
            )));
        }
        if self.q.len() != target.num_roots() || self.tau.len() != target.num_roots() {
            return Err(MorphismViolation::Shape(
                "q and tau must have one entry per target root".into(),
            ));
        }
        let mut seen = vec![false; source.num_roots()];
        for &b in &self.tau {
            if b >= seen.len() || seen[b] {
                return Err(MorphismViolation::TauNotBijective);
            }
            seen[b] = true;
        }
        if strict && source.num_roots() != target.num_roots() {
            return Err(MorphismViolation::TauNotBijective);
        }
        let ft = self.f.transpose();
        for a in 0..target.num_roots() {
            let q = &self.q[a];
            if p_power_exponent(q, self.p).is_none() {
                return Err(MorphismViolation::BadQ {
                    root: a,
                    q: q.clone(),
                });
            }
            let b = self.tau[a];
            if self.f.mul_vec(&source.roots[b]) != vscale(q, &target.roots[a]) {
                return Err(MorphismViolation::RootCondition { root: a });
            }
            if ft.mul_vec(&target.coroots[a]) != vscale(q, &source.coroots[b]) {
                return Err(MorphismViolation::CorootCondition { root: a });
            }
        }
        for (b, hit) in seen.iter().enumerate() {
            if !hit && !self.f.mul_vec(&source.roots[b]).iter().all(|x| x.is_zero()) {
                return Err(MorphismViolation::UnmatchedRootNotKilled { source_root: b });
            }
        }
        Ok(())
    }

    pub fn is_endomorphism(&self) -> bool {
        self.f.is_square()
    }

    /// `f` and `fᵀ` both injective.
    pub fn is_p_isogeny(&self) -> bool {
        let r = self.f.rank();
        r == self.f.rows() && r == self.f.cols()
    }

    /// `f` onto `X`.
    pub fn is_surjective(&self) -> bool {
        crate::zlattice::right_inverse(&self.f).is_ok()
    }
}

/// `m2 ∘ m1` for `m1: R″ → R′` and `m2: R′ → R`.
pub fn compose(m2: &PMorphism, m1: &PMorphism) -> Result<PMorphism> {
    if m2.f.cols() != m1.f.rows() {
        return Err(Error::InvalidMorphism(
            "morphisms are not composable".into(),
        ));
    }
    let p = match (m1.p, m2.p) {
        (0, p) | (p, 0) => p,
        (a, b) if a == b => a,
        (a, b) => {
            return Err(Error::InvalidMorphism(format!(
                "cannot compose a {a}-morphism with a {b}-morphism"
            )))
        }
    };
    let mut q = Vec::with_capacity(m2.tau.len());
    let mut tau = Vec::with_capacity(m2.tau.len());
    for (a, &b) in m2.tau.iter().enumerate() {
        let c = *m1
            .tau
            .get(b)
            .ok_or_else(|| Error::InvalidMorphism("root maps are not composable".into()))?;
        tau.push(c);
        q.push(&m2.q[a] * &m1.q[b]);
    }
    Ok(PMorphism {
        f: m2.f.mul(&m1.f),
        p,
        q,
        tau,
    })
}

/// The transpose `f̌: X̌ → X̌′` as a p-morphism `dual(R) → dual(R′)`.
pub fn dualize(m: &PMorphism) -> Result<PMorphism> {
    let n = m.tau.len();
    let mut inv = vec![usize::MAX; n];
    for (a, &b) in m.tau.iter().enumerate() {
        if b >= n || inv[b] != usize::MAX {
            return Err(Error::InvalidMorphism("tau is not a bijection".into()));
        }
        inv[b] = a;
    }
    Ok(PMorphism {
        f: m.f.transpose(),
        p: m.p,
        q: inv.iter().map(|&a| m.q[a].clone()).collect(),
        tau: inv,
    })
}

/// `fⁿ = p^m·I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinbergWitness {
    pub n: u64,
    pub m: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotSteinberg {
    Singular,
    DeterminantNotPPower {
        det: BigInt,
    },
    /// `|det f| = 1`, so a scalar power could only be the identity.
    Unimodular,
    /// `|tr g^k| > rank` for `g = f^rank / p^e`: `g` has an eigenvalue off the unit circle.
    EigenvalueMagnitude {
        k: u64,
        trace_num: BigInt,
        trace_den: BigInt,
    },
    /// `g^k ≠ I` for every `k` up to the bound.
    InfiniteOrder {
        bound: u64,
    },
}

impl fmt::Display for NotSteinberg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotSteinberg::Singular => write!(f, "f is singular"),
            NotSteinberg::DeterminantNotPPower { det } => write!(f, "|det f| = {det} is not a power of p"),
            NotSteinberg::Unimodular => write!(f, "f is unimodular, so no power is a nontrivial p-power scalar"),
            NotSteinberg::EigenvalueMagnitude { k, trace_num, trace_den } => write!(
                f,
                "trace of (f^rank/p^e)^{k} is {trace_num}/{trace_den}, too large for a finite-order map"
            ),
            NotSteinberg::InfiniteOrder { bound } => {
                write!(f, "f^rank/p^e has no power equal to the identity up to exponent {bound}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SteinbergVerdict {
    Steinberg(SteinbergWitness),
    NotSteinberg(NotSteinberg),
}

impl SteinbergVerdict {
    pub fn witness(&self) -> Option<&SteinbergWitness> {
        match self {
            SteinbergVerdict::Steinberg(w) => Some(w),
            SteinbergVerdict::NotSteinberg(_) => None,
        }
    }
}

fn totient(mut n: u64) -> u64 {
    let mut out = n;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            while n.is_multiple_of(d) {
                n /= d;
            }
            out -= out / d;
        }
        d += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// `lcm{k : φ(k) ≤ r}`: every finite order in `GL_r(Q)` divides it.
pub fn order_bound(r: usize) -> u64 {
    let r = r.max(1) as u64;
    // φ(k) ≥ sqrt(k/2), so k ≤ 2r² covers every candidate
    (1..=2 * r * r + 2)
        .filter(|&k| totient(k) <= r)
        .fold(1, |acc, k| acc.lcm(&k))
}

/// Rational matrix `num / den` with `den > 0` and the fraction reduced.
#[derive(Clone, Debug)]
struct RatMatrix {
    num: IntMatrix,
    den: BigInt,
}

impl RatMatrix {
    fn new(num: IntMatrix, den: BigInt) -> Self {
        let g = num.data().iter().fold(den.clone(), |g, x| g.gcd(x));
        if g.is_one() || g.is_zero() {
            return RatMatrix { num, den };
        }
        RatMatrix {
            num: IntMatrix::from_vec(
                num.rows(),
                num.cols(),
                num.data().iter().map(|x| x / &g).collect(),
            ),
            den: den / g,
        }
    }

    fn mul(&self, other: &RatMatrix) -> Self {
        RatMatrix::new(self.num.mul(&other.num), &self.den * &other.den)
    }

    fn is_identity(&self) -> bool {
        self.den.is_one() && self.num.is_identity()
    }

    fn trace_num(&self) -> BigInt {
        (0..self.num.rows())
            .map(|i| self.num.get(i, i).clone())
            .sum()
    }
}

/// Order of `g` if it is at most `bound`, else the reason it cannot be finite.
fn finite_order(g: &RatMatrix, bound: u64) -> std::result::Result<u64, NotSteinberg> {
    let r = BigInt::from(g.num.rows());
    let mut h = g.clone();
    for k in 1..=bound {
        if h.is_identity() {
            return Ok(k);
        }
        let t = h.trace_num();
        if t.abs() > &r * &h.den {
            return Err(NotSteinberg::EigenvalueMagnitude {
                k,
                trace_num: t,
                trace_den: h.den.clone(),
            });
        }
        h = h.mul(g);
    }
    Err(NotSteinberg::InfiniteOrder { bound })
}

fn divisors(n: u64) -> Vec<u64> {
    let mut d: Vec<u64> = (1..)
        .take_while(|k| k * k <= n)
        .filter(|k| n.is_multiple_of(*k))
        .flat_map(|k| [k, n / k])
        .collect();
    d.sort_unstable();
    d.dedup();
    d
}

/// Decide whether some `fⁿ` equals `p^m·I` with `m ≥ 1`; returns the least `n`.
pub fn steinberg_of_matrix(
    f: &IntMatrix,
    p: u64,
    max_order: Option<u64>,
) -> Result<SteinbergVerdict> {
    if !is_prime(p) {
        return Err(Error::Input(format!(
            "Steinberg test needs a prime p, got {p}"
        )));
    }
    if !f.is_square() {
        return Err(Error::InvalidMorphism(
            "Steinberg test needs an endomorphism".into(),
        ));
    }
    let r = f.rows();
    if r == 0 {
        return Ok(SteinbergVerdict::Steinberg(SteinbergWitness { n: 1, m: 1 }));
    }
    let det = f.det().abs();
    if det.is_zero() {
        return Ok(SteinbergVerdict::NotSteinberg(NotSteinberg::Singular));
    }
    let Some(e) = p_power_exponent(&det, p) else {
        return Ok(SteinbergVerdict::NotSteinberg(
            NotSteinberg::DeterminantNotPPower { det },
        ));
    };
    if e == 0 {
        return Ok(SteinbergVerdict::NotSteinberg(NotSteinberg::Unimodular));
    }
    let pp = BigInt::from(p);
    let g = RatMatrix::new(f.pow(r as u64), pp.pow(e as u32));
    let bound = max_order.unwrap_or_else(|| order_bound(r));
    let o = match finite_order(&g, bound) {
        Ok(o) => o,
        Err(c) => return Ok(SteinbergVerdict::NotSteinberg(c)),
    };
    let ru = r as u64;
    for n in divisors(ru * o) {
        if (e * n) % ru != 0 {
            continue;
        }
        let m = e * n / ru;
        if f.pow(n) == IntMatrix::scalar(r, &pp.pow(m as u32)) {
            return Ok(SteinbergVerdict::Steinberg(SteinbergWitness { n, m }));
        }
    }
    unreachable!("f^(rank·order) is a p-power scalar by construction")
}

pub fn is_p_steinberg(m: &PMorphism, max_order: Option<u64>) -> Result<SteinbergVerdict> {
    if m.p == 0 {
        return Err(Error::Input("Steinberg endomorphisms need p > 0".into()));
    }
    steinberg_of_matrix(&m.f, m.p, max_order)
}

/// `f = p^a·φ₀` with `φ₀` of finite order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusWitness {
    pub a: u64,
    pub finite_order_part: IntMatrix,
    pub order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotFrobenius {
    Singular,
    DeterminantNotPPower {
        det: BigInt,
    },
    /// `|det f| = p^e` with `rank ∤ e` (or `e = 0`).
    ExponentNotMultiple {
        e: u64,
        rank: usize,
    },
    NotDivisible {
        a: u64,
    },
    InfiniteOrder {
        bound: u64,
    },
}

impl fmt::Display for NotFrobenius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotFrobenius::Singular => write!(f, "f is singular"),
            NotFrobenius::DeterminantNotPPower { det } => {
                write!(f, "|det f| = {det} is not a power of p")
            }
            NotFrobenius::ExponentNotMultiple { e, rank } => {
                write!(
                    f,
                    "|det f| = p^{e} and {e} is not a positive multiple of the rank {rank}"
                )
            }
            NotFrobenius::NotDivisible { a } => write!(f, "f is not divisible by p^{a}"),
            NotFrobenius::InfiniteOrder { bound } => {
                write!(
                    f,
                    "f/p^a has no power equal to the identity up to exponent {bound}"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrobeniusVerdict {
    Frobenius(FrobeniusWitness),
    NotFrobenius(NotFrobenius),
}

impl FrobeniusVerdict {
    pub fn witness(&self) -> Option<&FrobeniusWitness> {
        match self {
            FrobeniusVerdict::Frobenius(w) => Some(w),
            FrobeniusVerdict::NotFrobenius(_) => None,
        }
    }
}

pub fn frobenius_of_matrix(
    f: &IntMatrix,
    p: u64,
    max_order: Option<u64>,
) -> Result<FrobeniusVerdict> {
    if !is_prime(p) {
        return Err(Error::Input(format!(
            "Frobenius test needs a prime p, got {p}"
        )));
    }
    if !f.is_square() {
        return Err(Error::InvalidMorphism(
            "Frobenius test needs an endomorphism".into(),
        ));
    }
    let r = f.rows();
    if r == 0 {
        return Ok(FrobeniusVerdict::Frobenius(FrobeniusWitness {
            a: 1,
            finite_order_part: f.clone(),
            order: 1,
        }));
    }
    let det = f.det().abs();
    if det.is_zero() {
        return Ok(FrobeniusVerdict::NotFrobenius(NotFrobenius::Singular));
    }
    let Some(e) = p_power_exponent(&det, p) else {
        return Ok(FrobeniusVerdict::NotFrobenius(
            NotFrobenius::DeterminantNotPPower { det },
        ));
    };
    if e == 0 || e % r as u64 != 0 {
        return Ok(FrobeniusVerdict::NotFrobenius(
            NotFrobenius::ExponentNotMultiple { e, rank: r },
        ));
    }
    let a = e / r as u64;
    let q = BigInt::from(p).pow(a as u32);
    if f.data().iter().any(|x| !x.is_multiple_of(&q)) {
        return Ok(FrobeniusVerdict::NotFrobenius(NotFrobenius::NotDivisible {
            a,
        }));
    }
    let phi0 = IntMatrix::from_vec(r, r, f.data().iter().map(|x| x / &q).collect());
    let bound = max_order.unwrap_or_else(|| order_bound(r));
    let mut h = phi0.clone();
    for k in 1..=bound {
        if h.is_identity() {
            return Ok(FrobeniusVerdict::Frobenius(FrobeniusWitness {
                a,
                finite_order_part: phi0,
                order: k,
            }));
        }
        h = h.mul(&phi0);
    }
    Ok(FrobeniusVerdict::NotFrobenius(
        NotFrobenius::InfiniteOrder { bound },
    ))
}

pub fn is_p_frobenius(m: &PMorphism, max_order: Option<u64>) -> Result<FrobeniusVerdict> {
    if m.p == 0 {
        return Err(Error::Input("Frobenius endomorphisms need p > 0".into()));
    }
    frobenius_of_matrix(&m.f, m.p, max_order)
}

/// The Suzuki-type map on `C2` weights: `ω₁ ↦ 2^r ω₂`, `ω₂ ↦ 2^{r+1} ω₁`.
pub fn suzuki_matrix(r: u32) -> IntMatrix {
    let a = int(2).pow(r);
    let b = int(2).pow(r + 1);
    IntMatrix::from_vec(2, 2, vec![BigInt::zero(), b, a, BigInt::zero()])
}
