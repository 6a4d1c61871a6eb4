#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rdk_core::catalog::{catalog_str, gl, intermediate_lattices, CartanType};
use rdk_core::central::CentralProductSpec;
use rdk_core::rootdata::RootDatum;
use rdk_core::zlattice::{int, quotient_presentation, FinAbPresentation, IntMatrix};

/// Small data used as factors of random central products.
pub fn small_data() -> Vec<RootDatum> {
    let mut out = vec![];
    for (t, s) in [
        ("A1", "sc"),
        ("A1", "ad"),
        ("A2", "sc"),
        ("A2", "ad"),
        ("B2", "sc"),
        ("B2", "ad"),
        ("G2", "sc"),
    ] {
        out.push(catalog_str(t, s).unwrap());
    }
    out.push(gl(2));
    out.push(gl(3));
    out.push(RootDatum::torus(1));
    out.push(RootDatum::torus(2));
    out.push(
        catalog_str("A1", "sc")
            .unwrap()
            .direct_sum(&RootDatum::torus(1)),
    );
    out.push(catalog_str("A1xA1", "sc").unwrap());
    out
}

/// Every intermediate lattice of every type with rank at most `max_rank`.
pub fn catalog_up_to(max_rank: usize) -> Vec<RootDatum> {
    let mut labels = vec![];
    for n in 1..=max_rank {
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
    for l in ["G2", "F4", "E6"] {
        if CartanType::parse(l).unwrap().rank() <= max_rank {
            labels.push(l.to_string());
        }
    }
    let mut out = vec![];
    for l in labels {
        out.extend(intermediate_lattices(&CartanType::parse(&l).unwrap()));
    }
    out
}

fn cyclic_quotient_possible(q: &FinAbPresentation, d: i64) -> bool {
    d == 1
        || q.invariant_factors
            .iter()
            .any(|x| x.is_zero() || (x % d).is_zero())
}

/// A generator of `X/ZΦ` through which a surjection onto `Z/d` can factor.
fn fallback_row(q: &FinAbPresentation, d: i64) -> Vec<BigInt> {
    let mut row = vec![BigInt::zero(); q.num_factors()];
    if let Some(i) = q
        .invariant_factors
        .iter()
        .position(|x| x.is_zero() || (x % d).is_zero())
    {
        row[i] = BigInt::one();
    }
    row
}

fn surjection(r: &RootDatum, a: &FinAbPresentation, d: i64, coeffs: &[i64]) -> IntMatrix {
    let q = quotient_presentation(&r.root_matrix(), r.rank);
    let s = q.num_factors();
    // a factor Z/d_i maps to Z/d only through multiples of d / gcd(d, d_i)
    let mut row: Vec<BigInt> = (0..s)
        .map(|i| {
            let di = &q.invariant_factors[i];
            let step = if di.is_zero() {
                int(1)
            } else {
                int(d) / int(d).gcd(di)
            };
            step * int(coeffs.get(i).copied().unwrap_or(1))
        })
        .collect();
    let mut h = a.reduce_map(&IntMatrix::from_rows(&[row.clone()], s).mul(&q.projection));
    if !a.is_surjective(&h) {
        row = fallback_row(&q, d);
        h = a.reduce_map(&IntMatrix::from_rows(&[row], s).mul(&q.projection));
    }
    h
}

/// A valid spec `R₁ ⊕_{(Z/d, h₁, h₂)} R₂` built from indices and coefficients.
pub fn random_spec(i1: usize, i2: usize, k: usize, c1: &[i64], c2: &[i64]) -> CentralProductSpec {
    let data = small_data();
    let r1 = data[i1 % data.len()].clone();
    let r2 = data[i2 % data.len()].clone();
    let q1 = quotient_presentation(&r1.root_matrix(), r1.rank);
    let q2 = quotient_presentation(&r2.root_matrix(), r2.rank);
    let ds: Vec<i64> = (1..=6)
        .filter(|&d| cyclic_quotient_possible(&q1, d) && cyclic_quotient_possible(&q2, d))
        .collect();
    let d = ds[k % ds.len()];
    if d == 1 {
        return rdk_core::central::trivial_spec(&r1, &r2);
    }
    let a = FinAbPresentation::standard(vec![int(d)]);
    let h1 = surjection(&r1, &a, d, c1);
    let h2 = surjection(&r2, &a, d, c2);
    CentralProductSpec { r1, r2, a, h1, h2 }
}

/// A unimodular matrix from a sequence of elementary operations.
pub fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut g = IntMatrix::identity(n);
    if n < 2 {
        return if ops.len() % 2 == 1 && n == 1 {
            g.neg()
        } else {
            g
        };
    }
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        for col in 0..n {
            let v = g.get(i, col) + int(c) * g.get(j, col);
            g.set(i, col, v);
        }
    }
    g
}
