//! 2x2 rational matrices, the determinant-one subgroup and the named elements used
//! throughout the crate.

use crate::arith::{Rational, SIntegerRing};
use crate::error::{Error, Result};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A general 2x2 matrix over the rationals, stored row by row.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Matrix2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Matrix2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Matrix2 { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Matrix2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Matrix2::from_ints(1, 0, 0, 1)
    }

    pub fn diagonal(x: Rational, y: Rational) -> Self {
        Matrix2::new(x, Rational::zero(), Rational::zero(), y)
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Matrix2) -> Matrix2 {
        Matrix2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn scale(&self, k: &Rational) -> Matrix2 {
        Matrix2 {
            a: &self.a * k,
            b: &self.b * k,
            c: &self.c * k,
            d: &self.d * k,
        }
    }

    pub fn inverse(&self) -> Option<Matrix2> {
        let det = self.det().checked_recip()?;
        Some(Matrix2 {
            a: &self.d * &det,
            b: -&self.b * &det,
            c: -&self.c * &det,
            d: &self.a * &det,
        })
    }

    pub fn entries(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Smallest `p`-adic valuation among the nonzero entries.
    pub fn min_valuation(&self, p: u64) -> Option<i64> {
        self.entries().iter().filter_map(|x| x.valuation(p)).min()
    }

    pub fn swap_columns(&self) -> Matrix2 {
        Matrix2::new(self.b.clone(), self.a.clone(), self.d.clone(), self.c.clone())
    }

    pub fn swap_rows(&self) -> Matrix2 {
        Matrix2::new(self.c.clone(), self.d.clone(), self.a.clone(), self.b.clone())
    }
}

/// An element of `SL_2(Q)`. The determinant is checked on construction.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2(Matrix2);

impl Mat2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        Mat2::from_matrix(Matrix2::new(a, b, c, d))
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Mat2::from_matrix(Matrix2::from_ints(a, b, c, d))
    }

    pub fn from_matrix(m: Matrix2) -> Result<Self> {
        let det = m.det();
        if det.is_one() {
            Ok(Mat2(m))
        } else {
            Err(Error::NotUnimodular(det.to_string()))
        }
    }

    pub(crate) fn unchecked(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        let m = Matrix2::new(a, b, c, d);
        debug_assert!(m.det().is_one(), "not in SL2: {m:?}");
        Mat2(m)
    }

    pub fn identity() -> Self {
        Mat2(Matrix2::identity())
    }

    pub fn is_identity(&self) -> bool {
        self.0 == Matrix2::identity()
    }

    pub fn a(&self) -> &Rational {
        &self.0.a
    }
    pub fn b(&self) -> &Rational {
        &self.0.b
    }
    pub fn c(&self) -> &Rational {
        &self.0.c
    }
    pub fn d(&self) -> &Rational {
        &self.0.d
    }

    pub fn as_matrix(&self) -> &Matrix2 {
        &self.0
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2(self.0.mul(&o.0))
    }

    pub fn inverse(&self) -> Mat2 {
        Mat2(Matrix2::new(
            self.0.d.clone(),
            -&self.0.b,
            -&self.0.c,
            self.0.a.clone(),
        ))
    }

    pub fn entries(&self) -> [&Rational; 4] {
        self.0.entries()
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.0.a, self.0.b, self.0.c, self.0.d)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = [[self.a(), self.b()], [self.c(), self.d()]];
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [[a, b], [c, dd]] = <[[Rational; 2]; 2]>::deserialize(d)?;
        Mat2::new(a, b, c, dd).map_err(de::Error::custom)
    }
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

fn nonzero(x: &Rational, what: &str) -> Result<()> {
    if x.is_zero() {
        Err(Error::Precondition(format!("{what} must be nonzero")))
    } else {
        Ok(())
    }
}

/// Upper unipotent `[[1, x], [0, 1]]`.
pub fn e12(x: &Rational) -> Mat2 {
    Mat2::unchecked(q(1), x.clone(), q(0), q(1))
}

/// Lower unipotent `[[1, 0], [x, 1]]`.
pub fn e21(x: &Rational) -> Mat2 {
    Mat2::unchecked(q(1), q(0), x.clone(), q(1))
}

/// `D(u) = diag(u, 1/u)`.
pub fn diag(u: &Rational) -> Result<Mat2> {
    nonzero(u, "diagonal entry")?;
    Ok(Mat2::unchecked(u.clone(), q(0), q(0), u.recip()))
}

/// `w = [[0, 1], [-1, 0]]`.
pub fn weyl() -> Mat2 {
    Mat2::unchecked(q(0), q(1), q(-1), q(0))
}

/// `G(a) = [[0, -1], [1, a + 1/a]]`.
pub fn g_mat(a: &Rational) -> Result<Mat2> {
    nonzero(a, "a")?;
    Ok(Mat2::unchecked(q(0), q(-1), q(1), a + &a.recip()))
}

/// `H(a) = E21(a)`.
pub fn h_mat(a: &Rational) -> Mat2 {
    e21(a)
}

/// `R(a) = [[a, -1], [0, 1/a]]`.
pub fn r_mat(a: &Rational) -> Result<Mat2> {
    nonzero(a, "a")?;
    Ok(Mat2::unchecked(a.clone(), q(-1), q(0), a.recip()))
}

/// `H~(a) = [[1/(1-a), a/(1-a)], [a/(1+a), 1/(1+a)]]`, defined for `a != +-1`.
pub fn h_tilde(a: &Rational) -> Result<Mat2> {
    let one = q(1);
    let minus = &one - a;
    let plus = &one + a;
    if minus.is_zero() || plus.is_zero() {
        return Err(Error::Precondition(format!("H~({a}) needs a != +-1")));
    }
    let (im, ip) = (minus.recip(), plus.recip());
    Ok(Mat2::unchecked(
        im.clone(),
        a * &im,
        a * &ip,
        ip,
    ))
}

/// Conjugation by `M(a) = diag(a, 1)`: returns `M(a)^{-1} X M(a)`.
pub fn star_action(a: &Rational, x: &Mat2) -> Result<Mat2> {
    nonzero(a, "a")?;
    Ok(Mat2::unchecked(
        x.a().clone(),
        x.b() / a,
        x.c() * a,
        x.d().clone(),
    ))
}

/// Subgroups of `SL_2(Q)` that come up when reading off invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// `SL_2(Z[1/m])`.
    SlZm(u64),
    /// `SL_2(Z_(p))`, the matrices with `p`-integral entries.
    SlLocal(u64),
    /// `Gamma_0(p)`: `p`-integral with lower-left entry divisible by `p`.
    Gamma0(u64),
    /// The vertex stabilizer of the odd standard lattice: `v(a), v(d) >= 0`,
    /// `v(c) >= 1`, `v(b) >= -1`.
    HTilde(u64),
}

fn val_at_least(x: &Rational, p: u64, k: i64) -> bool {
    x.valuation(p).is_none_or(|v| v >= k)
}

pub fn membership(x: &Mat2, set: &Subgroup) -> bool {
    match *set {
        Subgroup::SlZm(m) => match SIntegerRing::new(m) {
            Ok(ring) => x.entries().iter().all(|e| ring.contains(e)),
            Err(_) => false,
        },
        Subgroup::SlLocal(p) => x.entries().iter().all(|e| val_at_least(e, p, 0)),
        Subgroup::Gamma0(p) => {
            membership(x, &Subgroup::SlLocal(p)) && val_at_least(x.c(), p, 1)
        }
        Subgroup::HTilde(p) => {
            val_at_least(x.a(), p, 0)
                && val_at_least(x.d(), p, 0)
                && val_at_least(x.c(), p, 1)
                && val_at_least(x.b(), p, -1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn determinant_is_enforced() {
        assert!(Mat2::from_ints(1, 2, 3, 4).is_err());
        assert!(Mat2::from_ints(2, 3, 1, 2).is_ok());
    }

    #[test]
    fn named_elements() {
        let a = r("3/2");
        let g = g_mat(&a).unwrap();
        // w G(a) = E12(a + 1/a)
        assert_eq!(weyl().mul(&g), e12(&(&a + &a.recip())));
        assert!(h_tilde(&a).is_ok());
        assert!(h_tilde(&r("1")).is_err());
        assert!(h_tilde(&r("-1")).is_err());
        assert_eq!(weyl().mul(&weyl()), diag(&r("-1")).unwrap());
    }

    #[test]
    fn star_matches_conjugation() {
        let a = r("5/3");
        let x = Mat2::new(r("2"), r("7/3"), r("3/7"), r("1")).unwrap();
        let m = Matrix2::diagonal(a.clone(), Rational::one());
        let direct = m.inverse().unwrap().mul(x.as_matrix()).mul(&m);
        assert_eq!(star_action(&a, &x).unwrap().as_matrix(), &direct);
        assert_eq!(star_action(&a, &e12(&r("4"))).unwrap(), e12(&(r("4") / a.clone())));
    }

    #[test]
    fn subgroups() {
        let x = Mat2::new(r("1"), r("1/3"), r("3"), r("2")).unwrap();
        assert!(membership(&x, &Subgroup::HTilde(3)));
        assert!(!membership(&x, &Subgroup::Gamma0(3)));
        assert!(membership(&x, &Subgroup::SlZm(6)));
        assert!(!membership(&x, &Subgroup::SlZm(10)));
    }

    #[test]
    fn json_round_trip() {
        let x = Mat2::new(r("-7/2"), r("5"), r("-3"), r("4")).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"[["-7/2","5"],["-3","4"]]"#);
        let y: Mat2 = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        assert!(serde_json::from_str::<Mat2>(r#"[["1","1"],["1","1"]]"#).is_err());
    }
}
