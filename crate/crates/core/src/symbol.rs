//! Symbols `c(a, b)` in `K_2(2, Q)` seen through their complete invariant: the sign
//! component `sigma` (counting `c(-1,-1)`) and the tame symbols at every prime.

use crate::arith::{support_primes, Rational, ResidueUnit, SIntegerRing};
use crate::error::{precondition, Result};
use num::Integer;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Order of an element or a cyclic summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupOrder {
    Finite(u64),
    Infinite,
}

impl fmt::Display for GroupOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupOrder::Finite(n) => write!(f, "{n}"),
            GroupOrder::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for GroupOrder {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" => Ok(GroupOrder::Infinite),
            t => t.parse().map(GroupOrder::Finite).map_err(|_| crate::Error::Parse {
                what: "group order",
                input: s.to_string(),
            }),
        }
    }
}

impl Serialize for GroupOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupOrder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Image of an element of `K_2(2, Q)` in `Z x prod_p F_p^*`. Tame values equal to 1
/// are not stored, so equality of invariants is structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SymbolInvariant {
    pub sigma: i64,
    pub tame: BTreeMap<u64, u64>,
}

impl SymbolInvariant {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.sigma == 0 && self.tame.is_empty()
    }

    pub fn tame_at(&self, p: u64) -> u64 {
        self.tame.get(&p).copied().unwrap_or(1 % p)
    }

    fn set_tame(&mut self, r: ResidueUnit) {
        if r.is_one() {
            self.tame.remove(&r.prime);
        } else {
            self.tame.insert(r.prime, r.value);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.sigma += o.sigma;
        for (&p, &v) in &o.tame {
            let prod = ResidueUnit { prime: p, value: out.tame_at(p) }.mul(&ResidueUnit { prime: p, value: v });
            out.set_tame(prod);
        }
        out
    }

    pub fn scale(&self, n: i64) -> Self {
        let mut out = SymbolInvariant {
            sigma: self.sigma * n,
            tame: BTreeMap::new(),
        };
        for (&p, &v) in &self.tame {
            out.set_tame(ResidueUnit { prime: p, value: v }.pow(n));
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn order(&self) -> GroupOrder {
        if self.sigma != 0 {
            return GroupOrder::Infinite;
        }
        let n = self
            .tame
            .iter()
            .fold(1u64, |acc, (&p, &v)| acc.lcm(&ResidueUnit { prime: p, value: v }.order()));
        GroupOrder::Finite(n)
    }
}

impl fmt::Display for SymbolInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sigma={}", self.sigma)?;
        for (p, v) in &self.tame {
            write!(f, " tame_{p}={v}")?;
        }
        Ok(())
    }
}

fn require_nonzero(a: &Rational, b: &Rational) -> Result<()> {
    if a.is_zero() || b.is_zero() {
        return precondition("symbol entries must be nonzero");
    }
    Ok(())
}

/// Tame symbol of `(a, b)` at `p`: `(-1)^{v(a)v(b)} a^{-v(b)} b^{v(a)} mod p`.
pub fn tame_symbol(a: &Rational, b: &Rational, p: u64) -> Result<ResidueUnit> {
    require_nonzero(a, b)?;
    let (va, ua) = a.split_p(p).unwrap();
    let (vb, ub) = b.split_p(p).unwrap();
    let ra = ResidueUnit::of(&ua, p).unwrap();
    let rb = ResidueUnit::of(&ub, p).unwrap();
    let mut t = ra.pow(-vb).mul(&rb.pow(va));
    if (va * vb) % 2 != 0 {
        t = t.mul(&ResidueUnit::new(p, -1)?);
    }
    Ok(t)
}

pub fn invariant_of_symbol(a: &Rational, b: &Rational) -> Result<SymbolInvariant> {
    require_nonzero(a, b)?;
    let mut inv = SymbolInvariant {
        sigma: (a.is_negative() && b.is_negative()) as i64,
        tame: BTreeMap::new(),
    };
    let mut primes = support_primes(a)?;
    primes.extend(support_primes(b)?);
    primes.sort_unstable();
    primes.dedup();
    for p in primes {
        inv.set_tame(tame_symbol(a, b, p)?);
    }
    Ok(inv)
}

/// Invariant of `c(a, b)^{-1}` when `inverse` is set.
pub fn invariant_of_factor(a: &Rational, b: &Rational, inverse: bool) -> Result<SymbolInvariant> {
    let inv = invariant_of_symbol(a, b)?;
    Ok(if inverse { inv.neg() } else { inv })
}

/// Invariant of `a * c(u, v)` where `a` acts through conjugation by `diag(a, 1)`:
/// `a * c(u, v) = c(u, 1/a)^{-1} c(u, v/a)`.
pub fn star_on_symbol(a: &Rational, u: &Rational, v: &Rational) -> Result<SymbolInvariant> {
    require_nonzero(u, v)?;
    if a.is_zero() {
        return precondition("a must be nonzero");
    }
    let first = invariant_of_symbol(u, &a.recip())?;
    let second = invariant_of_symbol(u, &(v / a))?;
    Ok(second.sub(&first))
}

/// The defining relations of `K_2(2, F)`, each with its free variables.
#[derive(Clone, Debug)]
pub enum MatsumotoRelation {
    /// `c(u, 1) = c(1, u) = 1`.
    Trivial { u: Rational },
    /// `c(u, v) = c(v^{-1}, u)`.
    Inversion { u: Rational, v: Rational },
    /// `c(u, vw) c(v, w) = c(uv, w) c(u, v)`.
    Cocycle { u: Rational, v: Rational, w: Rational },
    /// `c(u, v) = c(u, -uv)`.
    Negation { u: Rational, v: Rational },
    /// `c(u, v) = c(u, (1-u)v)` for `u != 1`.
    Steinberg { u: Rational, v: Rational },
}

/// Invariant of (left side) minus (right side); zero when the relation holds.
pub fn matsumoto_residual(rel: &MatsumotoRelation) -> Result<SymbolInvariant> {
    let one = Rational::one();
    let i = invariant_of_symbol;
    Ok(match rel {
        MatsumotoRelation::Trivial { u } => i(u, &one)?.add(&i(&one, u)?),
        MatsumotoRelation::Inversion { u, v } => i(u, v)?.sub(&i(&v.recip(), u)?),
        MatsumotoRelation::Cocycle { u, v, w } => i(u, &(v * w))?
            .add(&i(v, w)?)
            .sub(&i(&(u * v), w)?)
            .sub(&i(u, v)?),
        MatsumotoRelation::Negation { u, v } => i(u, v)?.sub(&i(u, &-(u * v))?),
        MatsumotoRelation::Steinberg { u, v } => {
            if u.is_one() {
                return precondition("the Steinberg relation needs u != 1");
            }
            i(u, v)?.sub(&i(u, &((&one - u) * v))?)
        }
    })
}

/// Residuals of `c(u, v^2 w) = c(u, v^2) c(u, w)`, `c(u, v^2) = c(u, v) c(v, u)^{-1}`
/// and `c(u, v^2) = c(u^2, v)`.
pub fn square_identities(u: &Rational, v: &Rational, w: &Rational) -> Result<[SymbolInvariant; 3]> {
    let i = invariant_of_symbol;
    let v2 = v.square();
    Ok([
        i(u, &(&v2 * w))?.sub(&i(u, &v2)?).sub(&i(u, w)?),
        i(u, &v2)?.sub(&i(u, v)?.sub(&i(v, u)?)),
        i(u, &v2)?.sub(&i(&u.square(), v)?),
    ])
}

/// A factor `c(x, u)^exponent` with `v_p(x) = 1` and `v_p(u) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalGenerator {
    pub x: Rational,
    pub u: Rational,
    pub exponent: i64,
}

/// Writes `c(a, b)` in `K_2(2, Q)` as a product of symbols `c(x, u)` with `v_p(x) = 1`
/// and `v_p(u) = 0`, following the reduction on `v_p(a) + v_p(b)`.
pub fn decompose(a: &Rational, b: &Rational, p: u64) -> Result<Vec<LocalGenerator>> {
    require_nonzero(a, b)?;
    if !crate::arith::is_prime(p) {
        return precondition(format!("{p} is not prime"));
    }
    let mut out = Vec::new();
    decompose_into(a.clone(), b.clone(), 1, p, &mut out);
    Ok(out)
}

fn decompose_into(a: Rational, b: Rational, sign: i64, p: u64, out: &mut Vec<LocalGenerator>) {
    let pi = Rational::from_int(p as i64);
    let va = a.valuation(p).unwrap();
    let vb = b.valuation(p).unwrap();
    // c(a,b) = c(b^{-1},a) = c(a^{-1},b^{-1}) = c(b,a^{-1}) moves to v(a), v(b) >= 0.
    if va < 0 && vb >= 0 {
        return decompose_into(b, a.recip(), sign, p, out);
    }
    if va >= 0 && vb < 0 {
        return decompose_into(b.recip(), a, sign, p, out);
    }
    if va < 0 && vb < 0 {
        return decompose_into(a.recip(), b.recip(), sign, p, out);
    }
    let mut push = |x: Rational, u: Rational, e: i64| {
        out.push(LocalGenerator {
            x,
            u,
            exponent: sign * e,
        })
    };
    match (va, vb) {
        (1, 0) => push(a, b, 1),
        (0, 0) => {
            // From the cocycle relation with (pi, a, b): c(a,b) = c(pi,ab)^{-1} c(pi a,b) c(pi,a).
            push(pi.clone(), &a * &b, -1);
            push(&pi * &a, b, 1);
            push(pi, a, 1);
        }
        (0, _) => decompose_into(b, a.recip(), sign, p, out),
        (_, 0) => {
            // v(a) >= 2: with a = a' pi, c(a,b) = c(a', pi b) c(pi, b) c(a', pi)^{-1}.
            let a1 = &a / &pi;
            decompose_into(a1.clone(), &pi * &b, sign, p, out);
            out.push(LocalGenerator {
                x: pi.clone(),
                u: b,
                exponent: sign,
            });
            decompose_into(a1, pi, -sign, p, out);
        }
        _ if vb <= va => {
            // a = bc: c(bc, b) = c(-c, b).
            let c = &a / &b;
            decompose_into(-c, b, sign, p, out)
        }
        _ => {
            // b = ac: c(a, ac) = c(a, -c).
            let c = &b / &a;
            decompose_into(a, -c, sign, p, out)
        }
    }
}

pub fn invariant_of_generators(gens: &[LocalGenerator]) -> Result<SymbolInvariant> {
    gens.iter().try_fold(SymbolInvariant::zero(), |acc, g| {
        Ok(acc.add(&invariant_of_symbol(&g.x, &g.u)?.scale(g.exponent)))
    })
}

/// Whether the invariant lies in the image of `K_2(2, Z[1/m])`: every nontrivial tame
/// component sits at a prime of the ring.
pub fn is_in_ktilde(inv: &SymbolInvariant, ring: &SIntegerRing) -> bool {
    inv.tame.keys().all(|p| ring.contains_prime(*p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn tame_values() {
        // (p, u) with u a unit: tame = u mod p.
        assert_eq!(tame_symbol(&r("3"), &r("2"), 3).unwrap().value, 2);
        assert_eq!(tame_symbol(&r("2"), &r("3"), 3).unwrap().value, 2);
        assert_eq!(tame_symbol(&r("3"), &r("3"), 3).unwrap().value, 2);
        assert_eq!(tame_symbol(&r("2"), &r("7"), 7).unwrap().value, 4);
    }

    #[test]
    fn sigma_and_order() {
        let inv = invariant_of_symbol(&r("-1"), &r("-1")).unwrap();
        assert_eq!(inv.sigma, 1);
        assert!(inv.tame.is_empty());
        assert_eq!(inv.order(), GroupOrder::Infinite);
        let inv = invariant_of_symbol(&r("2"), &r("3")).unwrap();
        assert_eq!(inv.order(), GroupOrder::Finite(2));
        assert_eq!(inv.tame_at(3), 2);
        assert_eq!(inv.tame_at(2), 1);
    }

    #[test]
    fn relations_hold() {
        let (u, v, w) = (r("-6/5"), r("10/7"), r("-21/2"));
        for rel in [
            MatsumotoRelation::Trivial { u: u.clone() },
            MatsumotoRelation::Inversion { u: u.clone(), v: v.clone() },
            MatsumotoRelation::Cocycle { u: u.clone(), v: v.clone(), w: w.clone() },
            MatsumotoRelation::Negation { u: u.clone(), v: v.clone() },
            MatsumotoRelation::Steinberg { u: u.clone(), v: v.clone() },
        ] {
            assert!(matsumoto_residual(&rel).unwrap().is_zero(), "{rel:?}");
        }
        for res in square_identities(&u, &v, &w).unwrap() {
            assert!(res.is_zero());
        }
    }

    #[test]
    fn decompose_examples() {
        let g = decompose(&r("5"), &r("3"), 5).unwrap();
        assert_eq!(g, vec![LocalGenerator { x: r("5"), u: r("3"), exponent: 1 }]);
        for (a, b) in [("2", "3"), ("50", "1/5"), ("125", "25"), ("-7/25", "10"), ("4", "9")] {
            let (a, b) = (r(a), r(b));
            let g = decompose(&a, &b, 5).unwrap();
            for t in &g {
                assert_eq!(t.x.valuation(5), Some(1));
                assert_eq!(t.u.valuation(5), Some(0));
            }
            assert_eq!(invariant_of_generators(&g).unwrap(), invariant_of_symbol(&a, &b).unwrap());
        }
    }

    #[test]
    fn star_action_formula() {
        // a * c(u, v) has the invariant of c(u, v) twisted by a.
        let inv = star_on_symbol(&r("1"), &r("2"), &r("3")).unwrap();
        assert_eq!(inv, invariant_of_symbol(&r("2"), &r("3")).unwrap());
    }

    #[test]
    fn json_shape() {
        let inv = invariant_of_symbol(&r("-3"), &r("-5")).unwrap();
        let s = serde_json::to_string(&inv).unwrap();
        assert_eq!(s, r#"{"sigma":1,"tame":{"5":3}}"#);
    }
}
