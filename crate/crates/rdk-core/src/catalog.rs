//! Root data of the classical and exceptional types in weight coordinates,
//! their intermediate lattices, and a few named groups.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::rootdata::RootDatum;
use crate::zlattice::{
    ivec, quotient_presentation, solve, vadd, vneg, vscale, vsub, FinAbPresentation, IntMatrix,
    IntVec,
};

/// A simple component: family letter and rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SimpleType {
    pub family: char,
    pub rank: usize,
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

/// A product of simple types, e.g. `A1xB2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CartanType {
    pub components: Vec<SimpleType>,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl CartanType {
    pub fn parse(label: &str) -> Result<Self> {
        let mut components = vec![];
        for part in label.split(['x', 'X', '*']) {
            let part = part.trim();
            let mut chars = part.chars();
            let family = chars
                .next()
                .ok_or_else(|| Error::Input(format!("empty component in type label {label:?}")))?
                .to_ascii_uppercase();
            let rank: usize = chars
                .as_str()
                .trim_start_matches('_')
                .parse()
                .map_err(|_| Error::Input(format!("bad rank in type component {part:?}")))?;
            let ok = match family {
                'A' => rank >= 1,
                'B' | 'C' => rank >= 2,
                'D' => rank >= 3,
                'E' => (6..=8).contains(&rank),
                'F' => rank == 4,
                'G' => rank == 2,
                _ => false,
            };
            if !ok {
                return Err(Error::Input(format!("unknown Cartan type {family}{rank}")));
            }
            components.push(SimpleType { family, rank });
        }
        Ok(CartanType { components })
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    pub fn cartan_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(0, 0);
        for c in &self.components {
            m = m.block_diag(&simple_cartan(*c));
        }
        m
    }
}

/// `a[i][j] = <α_i, α̌_j>` in Bourbaki numbering.
fn simple_cartan(t: SimpleType) -> IntMatrix {
    let n = t.rank;
    let mut norm = vec![2i64; n];
    let mut edges: Vec<(usize, usize, i64)> = vec![];
    match t.family {
        'A' => edges.extend((0..n.saturating_sub(1)).map(|i| (i, i + 1, -1))),
        'B' => {
            edges.extend((0..n - 1).map(|i| (i, i + 1, -1)));
            norm[n - 1] = 1;
        }
        'C' => {
            edges.extend((0..n - 2).map(|i| (i, i + 1, -1)));
            edges.push((n - 2, n - 1, -2));
            norm[n - 1] = 4;
        }
        'D' => {
            edges.extend((0..n - 2).map(|i| (i, i + 1, -1)));
            edges.push((n - 3, n - 1, -1));
        }
        'E' => {
            for (a, b) in [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)] {
                if a <= n && b <= n {
                    edges.push((a - 1, b - 1, -1));
                }
            }
        }
        'F' => {
            norm = vec![4, 4, 2, 2];
            edges = vec![(0, 1, -2), (1, 2, -2), (2, 3, -1)];
        }
        'G' => {
            norm = vec![2, 6];
            edges = vec![(0, 1, -3)];
        }
        _ => unreachable!("validated family"),
    }
    let mut gram = vec![vec![0i64; n]; n];
    for i in 0..n {
        gram[i][i] = norm[i];
    }
    for (a, b, v) in edges {
        gram[a][b] = v;
        gram[b][a] = v;
    }
    let mut m = IntMatrix::zeros(n, n);
    for (i, row) in gram.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            m.set(i, j, BigInt::from(2 * g / gram[j][j]));
        }
    }
    m
}

/// Which lattice between `ZΦ` and the weight lattice `Ω` to realize.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeSelector {
    SimplyConnected,
    Adjoint,
    /// `X = ZΦ + Σ Z·g` for weights `g` given in fundamental-weight coordinates.
    Generated(Vec<IntVec>),
}

impl LatticeSelector {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sc" => Ok(LatticeSelector::SimplyConnected),
            "ad" => Ok(LatticeSelector::Adjoint),
            other => {
                // "[1,0,1];[0,1,0]" style generator list
                let mut gens = vec![];
                for g in other.split(';').filter(|g| !g.trim().is_empty()) {
                    let body = g.trim().trim_start_matches('[').trim_end_matches(']');
                    let v: std::result::Result<Vec<BigInt>, _> = body
                        .split(',')
                        .map(|x| x.trim().parse::<BigInt>())
                        .collect();
                    gens.push(v.map_err(|_| Error::Input(format!("bad lattice selector {s:?}")))?);
                }
                if gens.is_empty() {
                    return Err(Error::Input(format!("bad lattice selector {s:?}")));
                }
                Ok(LatticeSelector::Generated(gens))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanSpec {
    pub cartan_type: CartanType,
    pub selector: LatticeSelector,
}

/// The simply connected datum: `X = Ω` with basis the fundamental weights.
pub fn simply_connected(t: &CartanType) -> RootDatum {
    let a = t.cartan_matrix();
    let n = a.rows();
    let mut seen: HashMap<IntVec, IntVec> = HashMap::new();
    let mut queue = VecDeque::new();
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::from(1);
        for (r, c) in [(a.row(i), e.clone()), (vneg(&a.row(i)), vneg(&e))] {
            if !seen.contains_key(&r) {
                seen.insert(r.clone(), c.clone());
                queue.push_back(r);
            }
        }
    }
    while let Some(r) = queue.pop_front() {
        let c = seen[&r].clone();
        for j in 0..n {
            let aj = a.row(j);
            let mut ej = vec![BigInt::zero(); n];
            ej[j] = BigInt::from(1);
            let r2 = vsub(&r, &vscale(&r[j], &aj));
            let pair = crate::zlattice::dot(&aj, &c);
            let c2 = vsub(&c, &vscale(&pair, &ej));
            if !seen.contains_key(&r2) {
                seen.insert(r2.clone(), c2);
                queue.push_back(r2);
            }
        }
    }
    // positive roots ordered by height, simple roots first; then negatives
    let at = a.transpose();
    let mut pos: Vec<(IntVec, IntVec, IntVec)> = seen
        .iter()
        .filter_map(|(r, c)| {
            let coeffs = solve(&at, r).expect("roots lie in the root lattice");
            coeffs
                .iter()
                .all(|x| !x.is_negative())
                .then(|| (coeffs, r.clone(), c.clone()))
        })
        .collect();
    pos.sort_by(|x, y| {
        let hx: BigInt = x.0.iter().sum();
        let hy: BigInt = y.0.iter().sum();
        hx.cmp(&hy).then_with(|| y.0.cmp(&x.0))
    });
    let mut roots: Vec<IntVec> = pos.iter().map(|p| p.1.clone()).collect();
    let mut coroots: Vec<IntVec> = pos.iter().map(|p| p.2.clone()).collect();
    roots.extend(pos.iter().map(|p| vneg(&p.1)));
    coroots.extend(pos.iter().map(|p| vneg(&p.2)));
    RootDatum::new(n, roots, coroots).with_name(format!("{t} sc"))
}

/// `Ω/ZΦ` with its projection from weight coordinates.
pub fn fundamental_group(t: &CartanType) -> FinAbPresentation {
    let a = t.cartan_matrix();
    quotient_presentation(&a.transpose(), a.rows())
}

pub fn catalog(spec: &CartanSpec) -> Result<RootDatum> {
    let sc = simply_connected(&spec.cartan_type);
    let n = sc.rank;
    let roots = spec.cartan_type.cartan_matrix().transpose();
    let (gens, label) = match &spec.selector {
        LatticeSelector::SimplyConnected => return Ok(sc),
        LatticeSelector::Adjoint => (roots, "ad".to_string()),
        LatticeSelector::Generated(g) => {
            if g.iter().any(|v| v.len() != n) {
                return Err(Error::Input(format!(
                    "lattice generators must have length {n}"
                )));
            }
            let strs: Vec<String> = g
                .iter()
                .map(|v| {
                    format!(
                        "[{}]",
                        v.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect();
            (roots.hstack(&IntMatrix::from_cols(g, n)), strs.join(";"))
        }
    };
    let (d, _) = sc.induced_datum(&gens)?;
    Ok(d.with_name(format!("{} {label}", spec.cartan_type)))
}

pub fn catalog_str(type_label: &str, selector: &str) -> Result<RootDatum> {
    if let Some(r) = preset(type_label)? {
        return Ok(r);
    }
    catalog(&CartanSpec {
        cartan_type: CartanType::parse(type_label)?,
        selector: LatticeSelector::parse(selector)?,
    })
}

/// Subgroups of a finite abelian group, each as a sorted element set.
pub fn subgroups(a: &FinAbPresentation) -> Vec<Vec<IntVec>> {
    let elems = a.elements();
    let zero = vec![BigInt::zero(); a.num_factors()];
    let close = |gens: &BTreeSet<IntVec>| -> BTreeSet<IntVec> {
        let mut set: BTreeSet<IntVec> = BTreeSet::new();
        set.insert(zero.clone());
        let mut frontier = vec![zero.clone()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = a.reduce(&vadd(&x, g));
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    };
    let mut found: HashSet<BTreeSet<IntVec>> = HashSet::new();
    let start = close(&BTreeSet::new());
    found.insert(start.clone());
    let mut queue = vec![start];
    while let Some(h) = queue.pop() {
        for e in &elems {
            if h.contains(e) {
                continue;
            }
            let mut gens = h.clone();
            gens.insert(e.clone());
            let h2 = close(&gens);
            if found.insert(h2.clone()) {
                queue.push(h2);
            }
        }
    }
    let mut out: Vec<Vec<IntVec>> = found.into_iter().map(|s| s.into_iter().collect()).collect();
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

/// Every lattice `ZΦ ⊆ X ⊆ Ω` for the type, one datum per subgroup of `Ω/ZΦ`.
pub fn intermediate_lattices(t: &CartanType) -> Vec<RootDatum> {
    let sc = simply_connected(t);
    let fg = fundamental_group(t);
    let roots = t.cartan_matrix().transpose();
    subgroups(&fg)
        .into_iter()
        .map(|h| {
            let lifts: Vec<IntVec> = h
                .iter()
                .map(|x| fg.preimage(&fg.projection, x).expect("projection is onto"))
                .collect();
            let gens = roots.hstack(&IntMatrix::from_cols(&lifts, sc.rank));
            let (d, _) = sc.induced_datum(&gens).expect("contains the root lattice");
            let label = if h.len() == 1 {
                "ad".to_string()
            } else if Some(BigInt::from(h.len())) == fg.order() {
                "sc".to_string()
            } else {
                format!("index {}", h.len())
            };
            d.with_name(format!("{t} {label}"))
        })
        .collect()
}

pub fn gl(n: usize) -> RootDatum {
    let mut roots = vec![];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut v = vec![BigInt::zero(); n];
                v[i] = BigInt::from(1);
                v[j] = BigInt::from(-1);
                roots.push(v);
            }
        }
    }
    RootDatum::new(n, roots.clone(), roots).with_name(format!("GL{n}"))
}

pub fn csp4() -> RootDatum {
    let short = [[1, -1, 0], [1, 1, -1]];
    let short_co = [[1, -1, 0], [1, 1, 0]];
    let long = [[0, 2, -1], [2, 0, -1]];
    let long_co = [[0, 1, 0], [1, 0, 0]];
    let mut roots = vec![];
    let mut coroots = vec![];
    for (r, c) in short.iter().zip(&short_co).chain(long.iter().zip(&long_co)) {
        roots.push(ivec(r));
        coroots.push(ivec(c));
        roots.push(vneg(&ivec(r)));
        coroots.push(vneg(&ivec(c)));
    }
    RootDatum::new(3, roots, coroots).with_name("CSp4")
}

/// Named groups: `GLn`, `SLn`, `PGLn`, `Sp4`, `CSp4`.
pub fn preset(name: &str) -> Result<Option<RootDatum>> {
    let upper = name.to_ascii_uppercase();
    let num =
        |prefix: &str| -> Option<usize> { upper.strip_prefix(prefix).and_then(|s| s.parse().ok()) };
    if upper == "CSP4" {
        return Ok(Some(csp4()));
    }
    if upper == "SP4" {
        return Ok(Some(
            simply_connected(&CartanType::parse("C2")?).with_name("Sp4"),
        ));
    }
    if let Some(n) = num("GL") {
        if n == 0 {
            return Err(Error::Input("GL0 is not a group".into()));
        }
        return Ok(Some(gl(n)));
    }
    for (prefix, sel) in [
        ("PGL", LatticeSelector::Adjoint),
        ("SL", LatticeSelector::SimplyConnected),
    ] {
        if let Some(n) = num(prefix) {
            if n < 2 {
                return Err(Error::Input(format!("{name} has no roots")));
            }
            let t = CartanType::parse(&format!("A{}", n - 1))?;
            let d = catalog(&CartanSpec {
                cartan_type: t,
                selector: sel,
            })?;
            return Ok(Some(d.with_name(format!("{prefix}{n}"))));
        }
    }
    Ok(None)
}
