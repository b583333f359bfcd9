//! Chains in the normalized bar complex of a group, their boundaries, and the
//! explicit 2-chains built from `SL_2(Q)` elements.

use crate::arith::Rational;
use crate::error::{precondition, Error, Result};
use crate::matrix::{diag, e12, g_mat, h_mat, h_tilde, r_mat, weyl, Mat2};
use serde::{Deserialize, Serialize};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Debug;

pub trait Group: Clone + Ord + Debug {
    fn identity() -> Self;
    fn op(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
}

impl Group for Mat2 {
    fn identity() -> Self {
        Mat2::identity()
    }
    fn op(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn inverse(&self) -> Self {
        Mat2::inverse(self)
    }
}

/// A formal integer combination of bar tuples `[g_n | ... | g_1]`, written left to
/// right, so index 0 holds `g_n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BarChain<G: Group> {
    degree: usize,
    terms: BTreeMap<Vec<G>, i64>,
}

impl<G: Group> BarChain<G> {
    pub fn zero(degree: usize) -> Self {
        BarChain {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn generator(tuple: Vec<G>) -> Self {
        let mut c = BarChain::zero(tuple.len());
        c.add_term(1, tuple);
        c
    }

    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (i64, Vec<G>)>) -> Result<Self> {
        let mut c = BarChain::zero(degree);
        for (n, t) in terms {
            if t.len() != degree {
                return precondition(format!(
                    "tuple of length {} in a degree {degree} chain",
                    t.len()
                ));
            }
            c.add_term(n, t);
        }
        Ok(c)
    }

    fn add_term(&mut self, n: i64, t: Vec<G>) {
        if n == 0 {
            return;
        }
        match self.terms.entry(t) {
            Entry::Vacant(v) => {
                v.insert(n);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += n;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct tuples with nonzero coefficient.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<G>, i64)> {
        self.terms.iter().map(|(k, v)| (k, *v))
    }

    pub fn coefficient(&self, tuple: &[G]) -> i64 {
        self.terms.get(tuple).copied().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, 1)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, -1)
    }

    fn combine(&self, o: &Self, sign: i64) -> Self {
        assert_eq!(self.degree, o.degree, "adding chains of different degree");
        let mut out = self.clone();
        for (t, n) in &o.terms {
            out.add_term(sign * n, t.clone());
        }
        out
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return BarChain::zero(self.degree);
        }
        BarChain {
            degree: self.degree,
            terms: self.terms.iter().map(|(t, n)| (t.clone(), n * k)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    /// Boundary in the normalized complex with trivial coefficients. Tuples containing
    /// the identity vanish, which is what makes `d_1 = 0`.
    pub fn boundary(&self) -> Result<Self> {
        let n = self.degree;
        if n == 0 {
            return precondition("boundary of a degree 0 chain");
        }
        let mut out = BarChain::zero(n - 1);
        let id = G::identity();
        for (t, &c) in &self.terms {
            // [g_n|...|g_2] g_1 with g_1 acting trivially.
            out.add_normalized(c, t[..n - 1].to_vec(), &id);
            for k in 0..n - 1 {
                let sign = if (n - 1 - k).is_multiple_of(2) { 1 } else { -1 };
                let mut merged = Vec::with_capacity(n - 1);
                merged.extend_from_slice(&t[..k]);
                merged.push(t[k].op(&t[k + 1]));
                merged.extend_from_slice(&t[k + 2..]);
                out.add_normalized(sign * c, merged, &id);
            }
            let sign = if n.is_multiple_of(2) { 1 } else { -1 };
            out.add_normalized(sign * c, t[1..].to_vec(), &id);
        }
        Ok(out)
    }

    fn add_normalized(&mut self, c: i64, t: Vec<G>, id: &G) {
        if !t.iter().any(|g| g == id) {
            self.add_term(c, t);
        }
    }

    pub fn is_cycle(&self) -> bool {
        self.degree == 0 || self.boundary().map(|b| b.is_zero()).unwrap_or(false)
    }

    pub fn require_cycle(&self) -> Result<()> {
        let b = self.boundary()?;
        if b.is_zero() {
            Ok(())
        } else {
            Err(Error::NotACycle {
                degree: self.degree,
                terms: b.len(),
            })
        }
    }
}

/// Terms as produced by a formula, before like terms are merged.
pub type RawTerms = Vec<(i64, Vec<Mat2>)>;

pub fn collect(degree: usize, raw: RawTerms) -> BarChain<Mat2> {
    BarChain::from_terms(degree, raw).expect("constructors produce tuples of the right length")
}

// ---------------------------------------------------------------------------
// JSON.

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: i64,
    tuple: Vec<Mat2>,
}

#[derive(Serialize, Deserialize)]
struct ChainJson {
    degree: usize,
    terms: Vec<TermJson>,
}

impl Serialize for BarChain<Mat2> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut terms: Vec<(Vec<String>, TermJson)> = self
            .terms
            .iter()
            .map(|(t, &coeff)| {
                let key = t
                    .iter()
                    .flat_map(|g| g.entries().map(|e| e.to_string()))
                    .collect();
                (
                    key,
                    TermJson {
                        coeff,
                        tuple: t.clone(),
                    },
                )
            })
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        ChainJson {
            degree: self.degree,
            terms: terms.into_iter().map(|(_, t)| t).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BarChain<Mat2> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = ChainJson::deserialize(d)?;
        BarChain::from_terms(c.degree, c.terms.into_iter().map(|t| (t.coeff, t.tuple)))
            .map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Explicit chains.

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn pair(c: i64, g: Mat2, h: Mat2) -> (i64, Vec<Mat2>) {
    (c, vec![g, h])
}

fn scaled(raw: RawTerms, k: i64) -> RawTerms {
    raw.into_iter().map(|(c, t)| (c * k, t)).collect()
}

/// `Theta_a = [H_a|G_a] - [R_a|H_a] + [w^{-1}|w G_a]`, whose boundary is `[w^{-1}]`.
pub fn theta_raw(a: &Rational) -> Result<RawTerms> {
    let g = g_mat(a)?;
    let h = h_mat(a);
    let r = r_mat(a)?;
    let w = weyl();
    Ok(vec![
        pair(1, h.clone(), g.clone()),
        pair(-1, r, h),
        pair(1, w.inverse(), w.mul(&g)),
    ])
}

pub fn theta(a: &Rational) -> Result<BarChain<Mat2>> {
    Ok(collect(2, theta_raw(a)?))
}

/// `Theta~_a = [H~_a|G_a] - [D(a)|H~_a] + [w^{-1}|w G_a]`, for `a != 0, +-1`.
pub fn theta_tilde_raw(a: &Rational) -> Result<RawTerms> {
    let g = g_mat(a)?;
    let ht = h_tilde(a)?;
    let w = weyl();
    Ok(vec![
        pair(1, ht.clone(), g.clone()),
        pair(-1, diag(a)?, ht),
        pair(1, w.inverse(), w.mul(&g)),
    ])
}

pub fn theta_tilde(a: &Rational) -> Result<BarChain<Mat2>> {
    Ok(collect(2, theta_tilde_raw(a)?))
}

fn check_lambda(lambda: &Rational) -> Result<()> {
    if lambda.is_zero() || lambda.abs().is_one() {
        return precondition(format!("lambda = {lambda} must avoid 0 and +-1"));
    }
    Ok(())
}

/// `Psi_{x,lambda} = [E12(x)|E12(x')D(lambda)] - [D(lambda)|E12(x')] + [E12(x')|D(lambda)]`
/// with `x' = x/(lambda^2 - 1)`. Its boundary is `[E12(x)]`, which vanishes in the
/// normalized complex only for `x = 0`.
pub fn psi_raw(x: &Rational, lambda: &Rational) -> Result<RawTerms> {
    check_lambda(lambda)?;
    let xp = x / &(lambda.square() - q(1));
    let d = diag(lambda)?;
    let exp = e12(&xp);
    Ok(vec![
        pair(1, e12(x), exp.mul(&d)),
        pair(-1, d.clone(), exp.clone()),
        pair(1, exp, d),
    ])
}

pub fn psi(x: &Rational, lambda: &Rational) -> Result<BarChain<Mat2>> {
    Ok(collect(2, psi_raw(x, lambda)?))
}

/// Multi-parameter `Psi`: given `(lambda_i, b_i)` with `sum b_i (lambda_i^2 - 1) = 1`,
/// writes `E12(x)` as the product of the commutators `[D(lambda_i), E12(b_i x)]` and
/// returns a chain with boundary `[E12(x)]`.
pub fn psi_multi(x: &Rational, params: &[(Rational, Rational)]) -> Result<BarChain<Mat2>> {
    if params.is_empty() {
        return precondition("psi_multi needs at least one (lambda, b) pair");
    }
    let mut total = Rational::zero();
    for (l, b) in params {
        check_lambda(l)?;
        total += &(b * &(l.square() - q(1)));
    }
    if !total.is_one() {
        return precondition(format!("sum b_i (lambda_i^2 - 1) = {total}, expected 1"));
    }
    let mut raw = Vec::new();
    let mut prefix = Mat2::identity();
    for (i, (l, b)) in params.iter().enumerate() {
        let y = &(l.square() - q(1)) * &(b * x);
        raw.extend(psi_raw(&y, l)?);
        let c = e12(&y);
        if i > 0 {
            raw.push(pair(-1, prefix.clone(), c.clone()));
        }
        prefix = prefix.mul(&c);
    }
    Ok(collect(2, raw))
}

fn check_nonzero(x: &Rational, what: &str) -> Result<()> {
    if x.is_zero() {
        return precondition(format!("{what} must be nonzero"));
    }
    Ok(())
}

/// Raw terms of the cycle `F(a,b)_lambda`, whose image in `K_2(2, Q)` is `c(a, b)`.
pub fn big_f_raw(a: &Rational, b: &Rational, lambda: &Rational) -> Result<RawTerms> {
    check_nonzero(a, "a")?;
    check_nonzero(b, "b")?;
    check_lambda(lambda)?;
    let ab = a * b;
    let one = q(1);
    let ra = r_mat(a)?;
    let rb = r_mat(b)?;
    let rab = r_mat(&ab)?;
    let prod = ra.mul(&rb);
    let plus_inv = |t: &Rational| t + &t.recip();

    let mut raw = vec![
        pair(1, ra, rb),
        pair(1, prod.clone(), prod.inverse().mul(&rab)),
    ];
    raw.extend(theta_raw(a)?);
    raw.extend(theta_raw(b)?);
    raw.extend(scaled(theta_raw(&ab)?, -1));
    raw.extend(scaled(theta_raw(&one)?, -1));
    raw.extend(psi_raw(&plus_inv(&ab), lambda)?);
    raw.extend(scaled(psi_raw(&plus_inv(a), lambda)?, -1));
    raw.extend(scaled(psi_raw(&plus_inv(b), lambda)?, -1));
    raw.extend(psi_raw(&q(2), lambda)?);
    raw.extend(scaled(psi_raw(&q(-1), lambda)?, -1));
    // (R_a R_b)^{-1} R_ab = E12(last) enters the boundary of the pieces above with
    // a plus sign, so its Psi is subtracted.
    let last = &ab.recip() * &(a + &b.recip() - one);
    raw.extend(scaled(psi_raw(&last, lambda)?, -1));
    Ok(raw)
}

pub fn big_f(a: &Rational, b: &Rational, lambda: &Rational) -> Result<BarChain<Mat2>> {
    Ok(collect(2, big_f_raw(a, b, lambda)?))
}

/// Raw terms of `F~(a,b)_lambda`, built on the diagonal pair `[D(a)|D(b)]`; needs
/// `a, b, ab` away from `0, +-1`.
pub fn big_f_tilde_raw(a: &Rational, b: &Rational, lambda: &Rational) -> Result<RawTerms> {
    let ab = a * b;
    for (x, name) in [(a, "a"), (b, "b"), (&ab, "ab")] {
        if x.is_zero() || x.abs().is_one() {
            return precondition(format!("{name} = {x} must avoid 0 and +-1"));
        }
    }
    check_lambda(lambda)?;
    let plus_inv = |t: &Rational| t + &t.recip();
    let mut raw = vec![pair(1, diag(a)?, diag(b)?)];
    raw.extend(theta_tilde_raw(a)?);
    raw.extend(theta_tilde_raw(b)?);
    raw.extend(scaled(theta_tilde_raw(&ab)?, -1));
    raw.extend(scaled(theta_raw(&q(1))?, -1));
    raw.extend(psi_raw(&plus_inv(&ab), lambda)?);
    raw.extend(scaled(psi_raw(&plus_inv(a), lambda)?, -1));
    raw.extend(scaled(psi_raw(&plus_inv(b), lambda)?, -1));
    raw.extend(psi_raw(&q(2), lambda)?);
    raw.extend(scaled(psi_raw(&q(-1), lambda)?, -1));
    Ok(raw)
}

pub fn big_f_tilde(a: &Rational, b: &Rational, lambda: &Rational) -> Result<BarChain<Mat2>> {
    Ok(collect(2, big_f_tilde_raw(a, b, lambda)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn d2_of_a_pair() {
        let g = e12(&r("2"));
        let h = diag(&r("3")).unwrap();
        let c = BarChain::generator(vec![g.clone(), h.clone()]);
        let b = c.boundary().unwrap();
        assert_eq!(b.coefficient(std::slice::from_ref(&g)), 1);
        assert_eq!(b.coefficient(std::slice::from_ref(&h)), 1);
        assert_eq!(b.coefficient(&[g.mul(&h)]), -1);
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn d1_vanishes_and_identity_tuples_drop() {
        let c = BarChain::generator(vec![weyl()]);
        assert!(c.boundary().unwrap().is_zero());
        let c = BarChain::generator(vec![Mat2::identity(), weyl()]);
        assert!(c.boundary().unwrap().is_zero());
    }

    #[test]
    fn theta_boundaries() {
        for a in ["2", "-1", "1", "3/5"] {
            let a = r(a);
            let w_inv = BarChain::generator(vec![weyl().inverse()]);
            let wg = BarChain::generator(vec![weyl().mul(&g_mat(&a).unwrap())]);
            let expect = w_inv.add(&wg);
            let b = theta(&a).unwrap().boundary().unwrap();
            assert_eq!(b, expect.sub(&BarChain::generator(vec![r_mat(&a).unwrap()])));
            if !a.abs().is_one() {
                let b = theta_tilde(&a).unwrap().boundary().unwrap();
                assert_eq!(b, expect.sub(&BarChain::generator(vec![diag(&a).unwrap()])));
            }
        }
    }

    #[test]
    fn big_f_at_minus_one() {
        let l = r("3");
        let m1 = r("-1");
        let rm = r_mat(&m1).unwrap();
        let psi_l = |x: &str| psi(&r(x), &l).unwrap();
        let twice = theta(&m1)
            .unwrap()
            .sub(&theta(&r("1")).unwrap())
            .add(&psi_l("2"))
            .sub(&psi_l("-2"))
            .scale(2);
        let expect = BarChain::generator(vec![rm.clone(), rm])
            .add(&BarChain::generator(vec![e12(&r("2")), e12(&r("-3"))]))
            .sub(&psi_l("-3"))
            .sub(&psi_l("-1"))
            .add(&twice);
        assert_eq!(big_f(&m1, &m1, &l).unwrap(), expect);
        assert!(expect.is_cycle());
    }

    #[test]
    fn psi_boundary_is_e12() {
        let x = r("7/3");
        let b = psi(&x, &r("2")).unwrap().boundary().unwrap();
        assert_eq!(b, BarChain::generator(vec![e12(&x)]));
        assert!(psi(&Rational::zero(), &r("3")).unwrap().is_cycle());
        assert!(psi(&x, &r("-1")).is_err());
    }

    #[test]
    fn psi_multi_boundary() {
        let x = r("5/2");
        // 1 * (2^2 - 1) - 1 * (3^2 - 1) / 4 = 3 - 2 = 1
        let params = [(r("2"), r("1")), (r("3"), r("-1/4"))];
        let b = psi_multi(&x, &params).unwrap().boundary().unwrap();
        assert_eq!(b, BarChain::generator(vec![e12(&x)]));
        assert!(psi_multi(&x, &[(r("2"), r("1"))]).is_err());
        assert!(psi_multi(&x, &[]).is_err());
    }

    #[test]
    fn big_f_is_a_cycle() {
        assert!(big_f(&r("2"), &r("3"), &r("2")).unwrap().is_cycle());
        assert!(big_f(&r("-1"), &r("-1"), &r("3")).unwrap().is_cycle());
        assert!(big_f_tilde(&r("2"), &r("3"), &r("5")).unwrap().is_cycle());
        assert_eq!(big_f_raw(&r("2"), &r("3"), &r("2")).unwrap().len(), 32);
    }

    #[test]
    fn chain_json_round_trip() {
        let c = big_f(&r("2"), &r("3"), &r("2")).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: BarChain<Mat2> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
