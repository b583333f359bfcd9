//! The Bruhat-Tits tree of `SL_2(Q_p)` on rational data, and the connecting map
//! `delta: H_2(SL_2(Q)) -> H_1(Gamma_0(p)) -> F_p^*` of the amalgam decomposition.

use crate::arith::{is_prime, Rational, ResidueUnit};
use crate::bar::BarChain;
use crate::error::{precondition, Error, Result};
use crate::matrix::{membership, Mat2, Matrix2, Subgroup};
use num::bigint::BigInt;
use num::{Integer, One};
use std::collections::{BTreeMap, HashMap};

/// Sign of `delta`, fixed once so that `[D(p)|D(u)] - [D(u)|D(p)]` maps to `u^2`.
pub const DELTA_SIGN: i64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

/// Homothety class of a `Z_(p)`-lattice in `Q^2`, stored through the unique basis
/// `[[1, 0], [c, p^b]]` with `c` a rational with `p`-power denominator and `0 <= c < p^b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeClass {
    prime: u64,
    exponent: i64,
    offset: Rational,
}

fn pq(p: u64) -> Rational {
    Rational::from_int(p as i64)
}

impl LatticeClass {
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn parity(&self) -> Parity {
        if self.exponent.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn basis(&self) -> Matrix2 {
        Matrix2::new(
            Rational::one(),
            Rational::zero(),
            self.offset.clone(),
            pq(self.prime).pow(self.exponent),
        )
    }

    pub fn standard(p: u64, parity: Parity) -> Self {
        LatticeClass {
            prime: p,
            exponent: (parity == Parity::Odd) as i64,
            offset: Rational::zero(),
        }
    }

    /// The `p + 1` neighbours, from the index-`p` sublattices of the standard basis.
    pub fn neighbours(&self) -> Vec<LatticeClass> {
        let b = self.basis();
        let p = self.prime;
        let mut out: Vec<LatticeClass> = (0..p)
            .map(|k| Matrix2::from_ints(1, 0, k as i64, p as i64))
            .chain(std::iter::once(Matrix2::from_ints(p as i64, 0, 0, 1)))
            .map(|s| canonical(&b.mul(&s), p).expect("invertible"))
            .collect();
        out.sort();
        out
    }
}

/// Reduces `c` modulo `p^b Z_(p)` to the representative `p^k r` with `k = v_p(c)` and
/// `0 <= r < p^{b-k}`.
fn reduce_offset(c: &Rational, p: u64, b: i64) -> Rational {
    let Some(k) = c.valuation(p) else {
        return Rational::zero();
    };
    if k >= b {
        return Rational::zero();
    }
    let unit = c * &pq(p).pow(-k);
    let modulus = num::pow(BigInt::from(p), (b - k) as usize);
    let n = unit.numer().mod_floor(&modulus);
    let d = unit.denom().mod_floor(&modulus);
    let g = d.extended_gcd(&modulus);
    debug_assert!(g.gcd.is_one());
    let r = (n * g.x).mod_floor(&modulus);
    Rational::from_bigint(r) * pq(p).pow(k)
}

/// Canonical representative of the homothety class of the lattice spanned by the
/// columns of `m`.
pub fn canonical(m: &Matrix2, p: u64) -> Result<LatticeClass> {
    if m.det().is_zero() {
        return precondition("lattice basis must be invertible");
    }
    let mut m = m.clone();
    let va = m.a.valuation(p);
    let vb = m.b.valuation(p);
    let swap = match (va, vb) {
        (None, _) => true,
        (Some(x), Some(y)) => y < x,
        _ => false,
    };
    if swap {
        m = m.swap_columns();
    }
    // Clear the top-right entry with a p-integral multiple of the first column.
    let t = &m.b / &m.a;
    m.d = &m.d - &(&t * &m.c);
    let (a, ux) = m.a.split_p(p).unwrap();
    let (bexp, _) = m.d.split_p(p).unwrap();
    let c_raw = &m.c / &ux;
    let b = bexp - a;
    let c = &c_raw * &pq(p).pow(-a);
    Ok(LatticeClass {
        prime: p,
        exponent: b,
        offset: reduce_offset(&c, p, b),
    })
}

/// Class of `g L_0` (even) or `g L_0'` with `L_0' = Z_(p) + p Z_(p)` (odd).
pub fn vertex_of(g: &Matrix2, parity: Parity, p: u64) -> LatticeClass {
    let m = match parity {
        Parity::Even => g.clone(),
        Parity::Odd => g.mul(&Matrix2::diagonal(Rational::one(), pq(p))),
    };
    canonical(&m, p).expect("invertible matrix")
}

/// Smith form over `Z_(p)`: `m = u diag(p^e1, p^e2) v` with `u, v` in `GL_2(Z_(p))`
/// and `e1 <= e2`.
pub fn local_smith(m: &Matrix2, p: u64) -> (Matrix2, i64, i64, Matrix2) {
    let mut d = m.clone();
    let mut left = Matrix2::identity();
    let mut right = Matrix2::identity();
    let pos = [0usize, 1, 2, 3]
        .into_iter()
        .filter_map(|i| d.entries()[i].valuation(p).map(|v| (v, i)))
        .min()
        .map(|(_, i)| i)
        .expect("nonzero matrix");
    let swap = Matrix2::from_ints(0, 1, 1, 0);
    if pos >= 2 {
        d = d.swap_rows();
        left = swap.mul(&left);
    }
    if pos % 2 == 1 {
        d = d.swap_columns();
        right = right.mul(&swap);
    }
    let r = &d.c / &d.a;
    let row_op = Matrix2::new(Rational::one(), Rational::zero(), -r, Rational::one());
    d = row_op.mul(&d);
    left = row_op.mul(&left);
    let s = &d.b / &d.a;
    let col_op = Matrix2::new(Rational::one(), -s, Rational::zero(), Rational::one());
    d = d.mul(&col_op);
    right = right.mul(&col_op);
    let (e1, u1) = d.a.split_p(p).unwrap();
    let (e2, u2) = d.d.split_p(p).unwrap();
    let scale = Matrix2::diagonal(u1.recip(), u2.recip());
    left = scale.mul(&left);
    (
        left.inverse().unwrap(),
        e1,
        e2,
        right.inverse().unwrap(),
    )
}

pub fn distance(v1: &LatticeClass, v2: &LatticeClass) -> u64 {
    assert_eq!(v1.prime, v2.prime, "vertices of different trees");
    let m = v1.basis().inverse().unwrap().mul(&v2.basis());
    let e1 = m.min_valuation(v1.prime).unwrap();
    let vdet = m.det().valuation(v1.prime).unwrap();
    (vdet - 2 * e1) as u64
}

/// Vertices on the geodesic from `v1` to `v2`, both ends included.
pub fn geodesic_vertices(v1: &LatticeClass, v2: &LatticeClass) -> Vec<LatticeClass> {
    let p = v1.prime;
    let b1 = v1.basis();
    let m = b1.inverse().unwrap().mul(&v2.basis());
    let (u, e1, e2, _) = local_smith(&m, p);
    let f = b1.mul(&u);
    (0..=e2 - e1)
        .map(|k| {
            let step = Matrix2::diagonal(Rational::one(), pq(p).pow(k));
            canonical(&f.mul(&step), p).unwrap()
        })
        .collect()
}

/// An edge of the tree, always stored from its even end to its odd end.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedEdge {
    pub head: LatticeClass,
    pub tail: LatticeClass,
}

impl OrientedEdge {
    pub fn new(x: LatticeClass, y: LatticeClass) -> Result<Self> {
        if distance(&x, &y) != 1 {
            return precondition("edge endpoints must be adjacent");
        }
        Ok(if x.parity() == Parity::Even {
            OrientedEdge { head: x, tail: y }
        } else {
            OrientedEdge { head: y, tail: x }
        })
    }

    pub fn standard(p: u64) -> Self {
        OrientedEdge {
            head: LatticeClass::standard(p, Parity::Even),
            tail: LatticeClass::standard(p, Parity::Odd),
        }
    }
}

pub fn geodesic(v1: &LatticeClass, v2: &LatticeClass) -> Vec<OrientedEdge> {
    geodesic_vertices(v1, v2)
        .windows(2)
        .map(|w| OrientedEdge::new(w[0].clone(), w[1].clone()).unwrap())
        .collect()
}

/// The edge `g * (standard edge)`.
pub fn edge_of(g: &Matrix2, p: u64) -> OrientedEdge {
    OrientedEdge {
        head: vertex_of(g, Parity::Even, p),
        tail: vertex_of(g, Parity::Odd, p),
    }
}

pub type VertexChain = BTreeMap<LatticeClass, i64>;
pub type EdgeChain = BTreeMap<OrientedEdge, i64>;

fn add_to<K: Ord>(map: &mut BTreeMap<K, i64>, k: K, n: i64) {
    let e = map.entry(k).or_insert(0);
    *e += n;
}

fn prune<K: Ord>(map: BTreeMap<K, i64>) -> BTreeMap<K, i64> {
    map.into_iter().filter(|(_, n)| *n != 0).collect()
}

/// `edge -> head + tail`.
pub fn alpha(y: &EdgeChain) -> VertexChain {
    let mut out = BTreeMap::new();
    for (e, &n) in y {
        add_to(&mut out, e.head.clone(), n);
        add_to(&mut out, e.tail.clone(), n);
    }
    prune(out)
}

/// The unique edge chain `y` with `alpha(y) = m`. Exists exactly when the odd and even
/// parts of `m` have the same total weight.
pub fn alpha_preimage(m: &VertexChain, basepoint: Option<&LatticeClass>) -> Result<EdgeChain> {
    let aug: i64 = m
        .iter()
        .map(|(v, &n)| if v.parity() == Parity::Odd { n } else { -n })
        .sum();
    if aug != 0 {
        return precondition(format!("vertex chain has augmentation {aug}, not in the image of alpha"));
    }
    let Some(base) = basepoint.or_else(|| m.keys().next()) else {
        return Ok(BTreeMap::new());
    };
    let mut y = BTreeMap::new();
    for (v, &n) in m {
        let coef = if v.parity() == Parity::Odd { n } else { -n };
        let path = geodesic_vertices(base, v);
        for w in path.windows(2) {
            let sign = if w[0].parity() == Parity::Even { 1 } else { -1 };
            let e = OrientedEdge::new(w[0].clone(), w[1].clone())?;
            add_to(&mut y, e, sign * coef);
        }
    }
    Ok(prune(y))
}

/// A fixed `g` in `SL_2(Q)` carrying the standard edge to `e`; the identity on the
/// standard edge.
pub fn coset_section(e: &OrientedEdge) -> Mat2 {
    let p = e.head.prime;
    let bh = e.head.basis();
    let bt = e.tail.basis();
    let s0 = bh.inverse().unwrap().mul(&bt);
    let j = -s0.min_valuation(p).unwrap();
    let s = s0.scale(&pq(p).pow(j));
    debug_assert_eq!(s.det().valuation(p), Some(1));
    let (u, _, _, _) = local_smith(&s, p);
    let b = bh.mul(&u);
    let vb = b.det().valuation(p).unwrap();
    debug_assert!(vb % 2 == 0);
    let b = b.scale(&pq(p).pow(-vb / 2));
    let unit = b.det();
    let g = b.mul(&Matrix2::diagonal(Rational::one(), unit.recip()));
    Mat2::from_matrix(g).expect("determinant corrected to 1")
}

/// `delta(z)` at `p`, as an element of `F_p^*`.
pub fn delta(z: &BarChain<Mat2>, p: u64) -> Result<ResidueUnit> {
    if !is_prime(p) {
        return precondition(format!("{p} is not prime"));
    }
    if z.degree() != 2 {
        return precondition(format!("expected a 2-chain, got degree {}", z.degree()));
    }
    z.require_cycle()?;
    let odd = LatticeClass::standard(p, Parity::Odd);
    let mut per_g: BTreeMap<Mat2, VertexChain> = BTreeMap::new();
    for (t, n) in z.terms() {
        let (g2, g1) = (&t[0], &t[1]);
        add_to(
            per_g.entry(g2.clone()).or_default(),
            vertex_of(g1.as_matrix(), Parity::Odd, p),
            n,
        );
        add_to(per_g.entry(g2.mul(g1)).or_default(), odd.clone(), -n);
        add_to(per_g.entry(g1.clone()).or_default(), odd.clone(), n);
    }
    let mut sections: HashMap<OrientedEdge, Mat2> = HashMap::new();
    let mut section = |e: &OrientedEdge| -> Mat2 {
        sections
            .entry(e.clone())
            .or_insert_with(|| coset_section(e))
            .clone()
    };
    let mut value = ResidueUnit::one(p);
    for (g, m) in per_g {
        if g.is_identity() {
            continue;
        }
        let m = prune(m);
        if m.is_empty() {
            continue;
        }
        let y = alpha_preimage(&m, None)?;
        for (e, n) in y {
            let gh = g.mul(&section(&e));
            let s2 = section(&edge_of(gh.as_matrix(), p));
            let gamma = s2.inverse().mul(&gh);
            if !membership(&gamma, &Subgroup::Gamma0(p)) {
                return Err(Error::Unsound(format!("{gamma} is not in Gamma_0({p})")));
            }
            let rho = ResidueUnit::of(gamma.a(), p).expect("upper-left entry is a p-unit");
            value = value.mul(&rho.pow(n));
        }
    }
    Ok(value.pow(DELTA_SIGN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::diag;
    use std::collections::{HashSet, VecDeque};

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn bfs_distance(a: &LatticeClass, b: &LatticeClass, limit: usize) -> Option<usize> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([(a.clone(), 0)]);
        seen.insert(a.clone());
        while let Some((v, d)) = queue.pop_front() {
            if &v == b {
                return Some(d);
            }
            if d == limit {
                continue;
            }
            for n in v.neighbours() {
                if seen.insert(n.clone()) {
                    queue.push_back((n, d + 1));
                }
            }
        }
        None
    }

    #[test]
    fn standard_vertices() {
        let p = 3;
        let even = vertex_of(&Matrix2::identity(), Parity::Even, p);
        assert_eq!(even, LatticeClass::standard(p, Parity::Even));
        let gamma = Matrix2::from_ints(2, 7, 5, 18);
        assert_eq!(vertex_of(&gamma, Parity::Even, p), even);
        let dp = diag(&r("3")).unwrap();
        assert_ne!(vertex_of(dp.as_matrix(), Parity::Even, p), even);
        assert_eq!(distance(&even, &vertex_of(dp.as_matrix(), Parity::Even, p)), 2);
    }

    #[test]
    fn distances_match_bfs() {
        let p = 2;
        let base = LatticeClass::standard(p, Parity::Even);
        // diag(p, 1) spans an index-p sublattice, so its class is a neighbour.
        let mp = Matrix2::diagonal(r("2"), r("1"));
        let v = vertex_of(&mp, Parity::Even, p);
        assert_eq!(distance(&base, &v), 1);
        assert_eq!(bfs_distance(&base, &v, 3), Some(1));
        let odd = LatticeClass::standard(p, Parity::Odd);
        assert_eq!(distance(&base, &odd), 1);
        for m in [
            Matrix2::new(r("1/2"), r("3"), r("5/4"), r("7")),
            Matrix2::new(r("4"), r("1/8"), r("3"), r("1")),
            Matrix2::new(r("1"), r("0"), r("3/2"), r("8")),
        ] {
            let v = vertex_of(&m, Parity::Even, p);
            let d = distance(&base, &v) as usize;
            assert_eq!(bfs_distance(&base, &v, d + 1), Some(d), "{m:?}");
            let path = geodesic_vertices(&base, &v);
            assert_eq!(path.len(), d + 1);
            for w in path.windows(2) {
                assert_eq!(distance(&w[0], &w[1]), 1);
            }
        }
    }

    #[test]
    fn standard_edge_section_is_identity() {
        assert!(coset_section(&OrientedEdge::standard(5)).is_identity());
    }

    #[test]
    fn alpha_preimage_of_standard_edge() {
        let e = OrientedEdge::standard(3);
        let m: VertexChain = [(e.head.clone(), 1), (e.tail.clone(), 1)].into_iter().collect();
        let y = alpha_preimage(&m, None).unwrap();
        assert_eq!(y, [(e, 1)].into_iter().collect());
        let bad: VertexChain = [(LatticeClass::standard(3, Parity::Odd), 1)].into_iter().collect();
        assert!(alpha_preimage(&bad, None).is_err());
    }

    #[test]
    fn delta_of_diagonal_commutator() {
        for p in [3u64, 5, 7] {
            let x = diag(&pq(p)).unwrap();
            let u = r("2");
            let d = diag(&u).unwrap();
            let z = BarChain::from_terms(2, [(1, vec![x.clone(), d.clone()]), (-1, vec![d, x])]).unwrap();
            assert_eq!(delta(&z, p).unwrap().value, 4 % p);
        }
    }

    #[test]
    fn delta_of_big_f_is_the_tame_symbol() {
        use crate::bar::big_f;
        use crate::symbol::tame_symbol;
        let cases = [("2", "3", "2"), ("2", "3", "5"), ("-1", "-1", "3"), ("5", "7", "2"), ("3/5", "-7", "7/2"), ("9", "10", "3")];
        for (a, b, l) in cases {
            let z = big_f(&r(a), &r(b), &r(l)).unwrap();
            for p in [3u64, 5, 7] {
                let d = delta(&z, p).unwrap();
                assert_eq!(d, tame_symbol(&r(a), &r(b), p).unwrap(), "a={a} b={b} lambda={l} p={p}");
            }
        }
    }

    #[test]
    fn delta_kills_boundaries() {
        let g = |a: i64, b: i64, c: i64, d: i64| Mat2::from_ints(a, b, c, d).unwrap();
        let t = BarChain::generator(vec![diag(&r("3")).unwrap(), g(1, 2, 0, 1), g(2, 1, 3, 2)]);
        let z = t.boundary().unwrap();
        for p in [2u64, 3, 5] {
            assert!(delta(&z, p).unwrap().is_one());
        }
    }
}
