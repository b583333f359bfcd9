//! Exact rationals, p-adic valuations, residues modulo primes and S-integer rings.

use crate::error::{Error, Result};
use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

/// An exact rational number in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn new(num: i64, den: i64) -> Result<Self> {
        Self::from_parts(BigInt::from(num), BigInt::from(den))
    }

    pub fn from_parts(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn checked_recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    /// Panics on zero; callers check invertibility first.
    pub fn recip(&self) -> Self {
        self.checked_recip().expect("reciprocal of zero")
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Rational(&self.0 / &other.0))
        }
    }

    pub fn square(&self) -> Self {
        Rational(&self.0 * &self.0)
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = Rational::one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        acc
    }

    /// `v_p(self)`, with `None` standing for `+infinity` at zero.
    pub fn valuation(&self, p: u64) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let p = BigInt::from(p);
        Some(int_valuation(self.numer(), &p) as i64 - int_valuation(self.denom(), &p) as i64)
    }

    /// Reduction modulo `p` of a `p`-adic unit; `None` when `v_p != 0`.
    pub fn residue(&self, p: u64) -> Option<u64> {
        if self.valuation(p) != Some(0) {
            return None;
        }
        let pb = BigInt::from(p);
        let n = self.numer().mod_floor(&pb).to_u64().unwrap();
        let d = self.denom().mod_floor(&pb).to_u64().unwrap();
        Some(mul_mod(n, inv_mod(d, p), p))
    }

    /// Splits off the `p`-part: returns `(v, u)` with `self = p^v * u` and `v_p(u) = 0`.
    pub fn split_p(&self, p: u64) -> Option<(i64, Rational)> {
        let v = self.valuation(p)?;
        let unit = self * &Rational::from_int(p as i64).pow(-v);
        Some((v, unit))
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> u64 {
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() || n.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "rational",
            input: s.to_string(),
        };
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n = BigInt::from_str(n).map_err(|_| bad())?;
        let d = BigInt::from_str(d).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Rational::from_parts(n, d)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_bigint(n)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational as \"num/den\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
                Ok(Rational::from_int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
                Ok(Rational::from_bigint(BigInt::from(v)))
            }
        }
        d.deserialize_any(V)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $assign_tr:ident, $assign_m:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, o: &Rational) -> Rational {
                Rational((&self.0).$m(&o.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, o: Rational) -> Rational {
                Rational(self.0.$m(o.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, o: &Rational) -> Rational {
                Rational(self.0.$m(&o.0))
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, o: Rational) -> Rational {
                Rational((&self.0).$m(o.0))
            }
        }
        impl $assign_tr<&Rational> for Rational {
            fn $assign_m(&mut self, o: &Rational) {
                self.0 = (&self.0).$m(&o.0);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

// Division panics on a zero divisor, like integer division.
impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, o: &Rational) -> Rational {
        assert!(!o.is_zero(), "division by zero");
        Rational(&self.0 / &o.0)
    }
}

impl Div<Rational> for Rational {
    type Output = Rational;
    fn div(self, o: Rational) -> Rational {
        &self / &o
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

// ---------------------------------------------------------------------------
// Modular arithmetic on u64.

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` (`gcd(a, m) = 1` required).
pub fn inv_mod(a: u64, m: u64) -> u64 {
    let g = (a as i128).extended_gcd(&(m as i128));
    assert!(g.gcd == 1, "{a} is not invertible modulo {m}");
    g.x.rem_euclid(m as i128) as u64
}

// ---------------------------------------------------------------------------
// Primality and factorization.

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn miller_rabin_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // These bases are deterministic for every 64-bit input.
    'base: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: u64) -> bool {
    miller_rabin_u64(n)
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return miller_rabin_u64(small);
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    let mut bases: Vec<BigUint> = SMALL_PRIMES.iter().map(|&p| BigUint::from(p)).collect();
    bases.extend([41u64, 43, 47, 53, 59, 61, 67, 71].iter().map(|&p| BigUint::from(p)));
    'base: for a in &bases {
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

fn pollard_brent_u64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
    let mut steps = 0u64;
    while d == 1 {
        x = f(x);
        y = f(f(y));
        d = x.abs_diff(y).gcd(&n);
        steps += 1;
        if steps > 1 << 22 {
            return None;
        }
    }
    (d != n).then_some(d)
}

fn pollard_big(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = (&x * &x + &c) % n;
            y = (&y * &y + &c) % n;
            y = (&y * &y + &c) % n;
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn factor_u64_into(n: u64, out: &mut BTreeMap<BigUint, u32>) {
    if n == 1 {
        return;
    }
    if miller_rabin_u64(n) {
        *out.entry(BigUint::from(n)).or_insert(0) += 1;
        return;
    }
    let mut c = 1;
    let d = loop {
        if let Some(d) = pollard_brent_u64(n, c) {
            break d;
        }
        c += 1;
    };
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

fn factor_big_into(n: BigUint, out: &mut BTreeMap<BigUint, u32>) {
    if n.is_one() {
        return;
    }
    if let Some(small) = n.to_u64() {
        factor_u64_into(small, out);
        return;
    }
    if is_probable_prime_big(&n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_big(&n);
    let rest = &n / &d;
    factor_big_into(d, out);
    factor_big_into(rest, out);
}

/// Prime factorization of a positive integer as `(prime, exponent)` pairs in increasing order.
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "factorize(0)");
    let mut n = n.clone();
    let mut out = BTreeMap::new();
    for p in 2u32..1000 {
        let pb = BigUint::from(p);
        while (&n % &pb).is_zero() {
            *out.entry(pb.clone()).or_insert(0) += 1;
            n /= &pb;
        }
    }
    factor_big_into(n, &mut out);
    out.into_iter().collect()
}

pub fn factorize_u64(n: u64) -> Vec<(u64, u32)> {
    factorize(&BigUint::from(n))
        .into_iter()
        .map(|(p, e)| (p.to_u64().unwrap(), e))
        .collect()
}

/// Primes dividing the numerator or denominator of `r`.
pub fn support_primes(r: &Rational) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for n in [r.numer(), r.denom()] {
        let n = n.magnitude();
        if n.is_zero() {
            continue;
        }
        for (p, _) in factorize(n) {
            let p = p.to_u64().ok_or_else(|| Error::FactorTooLarge(n.to_string()))?;
            out.push(p);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Residues.

/// A nonzero class in `F_p^*`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ResidueUnit {
    pub prime: u64,
    pub value: u64,
}

impl ResidueUnit {
    pub fn new(prime: u64, value: i64) -> Result<Self> {
        let v = value.rem_euclid(prime as i64) as u64;
        if v == 0 {
            return Err(Error::Precondition(format!("{value} is zero modulo {prime}")));
        }
        Ok(ResidueUnit { prime, value: v })
    }

    pub fn one(prime: u64) -> Self {
        ResidueUnit { prime, value: 1 % prime.max(2) }
    }

    pub fn of(r: &Rational, prime: u64) -> Option<Self> {
        r.residue(prime).map(|value| ResidueUnit { prime, value })
    }

    pub fn is_one(&self) -> bool {
        self.value == 1 || self.prime == 2
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.prime, o.prime);
        ResidueUnit {
            prime: self.prime,
            value: mul_mod(self.value, o.value, self.prime),
        }
    }

    pub fn inverse(&self) -> Self {
        ResidueUnit {
            prime: self.prime,
            value: inv_mod(self.value, self.prime),
        }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { *self };
        ResidueUnit {
            prime: self.prime,
            value: pow_mod(base.value, e.unsigned_abs(), self.prime),
        }
    }

    pub fn order(&self) -> u64 {
        order_mod(self.value, self.prime)
    }
}

/// Multiplicative order of `a` modulo the prime `p` (`a` coprime to `p`).
pub fn order_mod(a: u64, p: u64) -> u64 {
    let a = a % p;
    assert!(a != 0, "zero has no multiplicative order");
    let mut ord = p - 1;
    for (f, _) in factorize_u64(p - 1) {
        while ord.is_multiple_of(f) && pow_mod(a, ord / f, p) == 1 {
            ord /= f;
        }
    }
    ord
}

pub fn is_primitive_root(a: u64, p: u64) -> bool {
    !a.is_multiple_of(p) && order_mod(a, p) == p - 1
}

/// Order of `u` in `F_q^*`, or `None` if `u` is not a `q`-adic unit.
pub fn multiplicative_order(u: &Rational, q: u64) -> Option<u64> {
    u.residue(q).map(|r| order_mod(r, q))
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

// ---------------------------------------------------------------------------
// S-integers.

/// The ring `Z[1/m]`, remembered through the primes dividing `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SIntegerRing {
    pub m: u64,
    pub primes: Vec<u64>,
}

impl SIntegerRing {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::Precondition(format!("m must be at least 2, got {m}")));
        }
        let primes = factorize_u64(m).into_iter().map(|(p, _)| p).collect();
        Ok(SIntegerRing { m, primes })
    }

    pub fn from_primes(primes: &[u64]) -> Result<Self> {
        let mut ps = primes.to_vec();
        ps.sort_unstable();
        ps.dedup();
        if ps.is_empty() || ps.iter().any(|&p| !is_prime(p)) {
            return Err(Error::Precondition(format!("not a set of primes: {primes:?}")));
        }
        let m = ps.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p));
        let m = m.ok_or_else(|| Error::Precondition("product of primes overflows".into()))?;
        Ok(SIntegerRing { m, primes: ps })
    }

    fn strip(&self, n: &BigInt) -> BigInt {
        let mut n = n.abs();
        for &p in &self.primes {
            let pb = BigInt::from(p);
            while !n.is_zero() && n.is_multiple_of(&pb) {
                n /= &pb;
            }
        }
        n
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.strip(r.denom()).is_one()
    }

    pub fn is_unit(&self, r: &Rational) -> bool {
        !r.is_zero() && self.contains(r) && self.strip(r.numer()).is_one()
    }

    pub fn contains_prime(&self, p: u64) -> bool {
        self.primes.contains(&p)
    }
}

/// Searches for an S-unit `u` (with no `q` in it) that is a primitive root modulo `q`
/// and satisfies `q^{v_{q_j}(u)} = 1 mod q_j` for every other prime `q_j` of the ring.
///
/// Exponents are searched in `[0, bound]`; the smallest such unit wins. When only
/// primitive roots violating the second condition exist in range, the smallest of
/// them is multiplied by a power of the product of the other primes to repair it.
pub fn find_su_primitive_root(ring: &SIntegerRing, q: u64, bound: u32) -> Result<Option<BigInt>> {
    let search = UnitSearch::new(ring, q)?;
    // Only multiples of ord_{q_j}(q) are admissible at q_j.
    let admissible: Vec<Vec<u64>> = search
        .orders
        .iter()
        .map(|&o| (0..=bound as u64).filter(|e| e % o == 0).collect())
        .collect();
    if let Some((v, _)) = search.smallest_primitive(&admissible) {
        return Ok(Some(v));
    }

    let Some((_, exps)) = search.smallest_primitive(&search.all(bound)) else {
        return Ok(None);
    };
    let mi: u64 = search.others.iter().fold(1 % q, |acc, &p| mul_mod(acc, p, q));
    let period = search
        .orders
        .iter()
        .fold(order_mod(mi.max(1), q), |acc, &o| acc.lcm(&o));
    for k in 1..=period {
        let shifted: Vec<u64> = exps.iter().map(|e| e + k).collect();
        if shifted.iter().zip(&search.orders).all(|(e, o)| e % o == 0) && is_primitive_root(search.residue(&shifted), q) {
            return Ok(Some(search.value(&shifted)));
        }
    }
    Ok(None)
}

/// Smallest S-unit `+-u` built from the primes other than `q`, exponents in `[0, bound]`,
/// that is a primitive root modulo `q`; no condition at the other primes. Positive
/// units win ties. The sign matters when every positive candidate is a square mod `q`
/// (e.g. `q = 23` over `Z[1/138]`, where `-2` works).
pub fn find_s_unit_primitive_root(ring: &SIntegerRing, q: u64, bound: u32) -> Result<Option<BigInt>> {
    let search = UnitSearch::new(ring, q)?;
    let mut best: Option<BigInt> = None;
    for exps in cartesian(&search.all(bound)) {
        let r = search.residue(&exps);
        for (sign, res) in [(1i8, r), (-1, (q - r) % q)] {
            if !is_primitive_root(res, q) {
                continue;
            }
            let v = search.value(&exps) * BigInt::from(sign);
            let better = best
                .as_ref()
                .is_none_or(|b| (v.abs(), v.is_negative()) < (b.abs(), b.is_negative()));
            if better {
                best = Some(v);
            }
        }
    }
    Ok(best)
}

struct UnitSearch {
    q: u64,
    others: Vec<u64>,
    /// `ord_{q_j}(q)` for each other prime.
    orders: Vec<u64>,
}

impl UnitSearch {
    fn new(ring: &SIntegerRing, q: u64) -> Result<Self> {
        if !ring.contains_prime(q) || q == 2 {
            return Err(Error::Precondition(format!(
                "q = {q} must be an odd prime dividing {}",
                ring.m
            )));
        }
        let others: Vec<u64> = ring.primes.iter().copied().filter(|&p| p != q).collect();
        let orders = others.iter().map(|&qj| order_mod(q % qj, qj)).collect();
        Ok(UnitSearch { q, others, orders })
    }

    fn all(&self, bound: u32) -> Vec<Vec<u64>> {
        self.others.iter().map(|_| (0..=bound as u64).collect()).collect()
    }

    fn value(&self, exps: &[u64]) -> BigInt {
        self.others
            .iter()
            .zip(exps)
            .map(|(&p, &e)| num::pow(BigInt::from(p), e as usize))
            .product()
    }

    fn residue(&self, exps: &[u64]) -> u64 {
        let q = self.q;
        self.others
            .iter()
            .zip(exps)
            .fold(1 % q, |acc, (&p, &e)| mul_mod(acc, pow_mod(p, e, q), q))
    }

    fn smallest_primitive(&self, choices: &[Vec<u64>]) -> Option<(BigInt, Vec<u64>)> {
        let mut best: Option<(BigInt, Vec<u64>)> = None;
        for exps in cartesian(choices) {
            if is_primitive_root(self.residue(&exps), self.q) {
                let v = self.value(&exps);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, exps));
                }
            }
        }
        best
    }
}

fn cartesian(choices: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for &x in c {
                let mut v = prefix.clone();
                v.push(x);
                next.push(v);
            }
        }
        out = next;
    }
    out
}
