//! The structure of `H_2(SL_2(Z[1/m]))` for `6 | m`, certified generators and the
//! table of S-sets for which the Steinberg extension is known to be universal.

use crate::arith::{
    find_s_unit_primitive_root, find_su_primitive_root, is_primitive_root, pow_mod, Rational, SIntegerRing,
};
use crate::bar::{big_f, BarChain};
use crate::error::{precondition, Result};
use crate::matrix::Mat2;
use crate::steinberg::evaluate_cycle;
use crate::symbol::{invariant_of_symbol, is_in_ktilde, GroupOrder, SymbolInvariant};
use crate::tree::delta;
use num::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const DEFAULT_LAMBDA: i64 = 3;
pub const DEFAULT_SEARCH_BOUND: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub label: String,
    pub order: GroupOrder,
}

/// `Z + sum over odd p | m of F_p^*`, listed in increasing order of `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureDescriptor {
    pub m: u64,
    pub factors: Vec<Factor>,
}

impl StructureDescriptor {
    /// Product of the finite orders.
    pub fn torsion_order(&self) -> u64 {
        self.factors
            .iter()
            .filter_map(|f| match f.order {
                GroupOrder::Finite(n) => Some(n),
                GroupOrder::Infinite => None,
            })
            .product()
    }
}

impl fmt::Display for StructureDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.factors.iter().map(|x| x.label.as_str()).collect();
        f.write_str(&labels.join(" + "))
    }
}

fn ring_with_six(m: u64) -> Result<SIntegerRing> {
    if m == 0 || !m.is_multiple_of(6) {
        return precondition(format!(
            "m = {m} is not divisible by 6; the structure theorem needs 2 and 3 inverted"
        ));
    }
    SIntegerRing::new(m)
}

pub fn structure(m: u64) -> Result<StructureDescriptor> {
    let ring = ring_with_six(m)?;
    let mut factors = vec![Factor {
        label: "Z".into(),
        order: GroupOrder::Infinite,
    }];
    for &q in ring.primes.iter().filter(|&&q| q != 2) {
        factors.push(Factor {
            label: format!("Z/{}", q - 1),
            order: GroupOrder::Finite(q - 1),
        });
    }
    Ok(StructureDescriptor { m, factors })
}

/// Checks that `lambda` and `lambda^2 - 1` are units of `Z[1/m]`.
pub fn check_lambda_for(ring: &SIntegerRing, lambda: &Rational) -> Result<()> {
    let l2 = lambda.square() - Rational::one();
    if !ring.is_unit(lambda) {
        return precondition(format!("lambda = {lambda} is not a unit of Z[1/{}]", ring.m));
    }
    if !ring.is_unit(&l2) {
        return precondition(format!(
            "lambda^2 - 1 = {l2} is not a unit of Z[1/{}]",
            ring.m
        ));
    }
    Ok(())
}

/// A homology class `C(a,b)` with everything needed to re-check it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorCertificate {
    pub name: String,
    pub symbol: (Rational, Rational),
    pub lambda: Rational,
    pub cycle: BarChain<Mat2>,
    #[serde(with = "string_int")]
    pub sigma: i64,
    #[serde(with = "string_map")]
    pub tame: BTreeMap<u64, u64>,
    pub order: GroupOrder,
    pub certified: bool,
}

mod string_int {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &i64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<i64, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

mod string_map {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(v: &BTreeMap<u64, u64>, s: S) -> Result<S::Ok, S::Error> {
        // Numeric key order; serde_json writes the keys as strings.
        let m: BTreeMap<u64, String> = v.iter().map(|(k, x)| (*k, x.to_string())).collect();
        m.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<u64, u64>, D::Error> {
        let m = BTreeMap::<u64, String>::deserialize(d)?;
        m.into_iter()
            .map(|(k, v)| Ok((k, v.parse().map_err(serde::de::Error::custom)?)))
            .collect()
    }
}

/// What a certificate claims to generate: the free summand, or `F_q^*` for an odd `q | m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Free,
    Torsion(u64),
}

impl Role {
    pub fn of(symbol: &(Rational, Rational)) -> Option<Role> {
        let minus_one = Rational::from_int(-1);
        if symbol.0 == minus_one && symbol.1 == minus_one {
            return Some(Role::Free);
        }
        if !symbol.1.is_integer() {
            return None;
        }
        symbol.1.numer().to_u64().map(Role::Torsion)
    }

    pub fn expected_order(&self) -> GroupOrder {
        match self {
            Role::Free => GroupOrder::Infinite,
            Role::Torsion(q) => GroupOrder::Finite(q - 1),
        }
    }
}

/// Builds `C(a,b)_lambda`, records `delta` at every prime of `m`, and certifies it.
pub fn certificate(m: u64, a: &Rational, b: &Rational, lambda: &Rational) -> Result<GeneratorCertificate> {
    let ring = SIntegerRing::new(m)?;
    let cycle = big_f(a, b, lambda)?;
    let mut tame = BTreeMap::new();
    for &p in &ring.primes {
        tame.insert(p, delta(&cycle, p)?.value);
    }
    let inv = invariant_of_symbol(a, b)?;
    let mut cert = GeneratorCertificate {
        name: format!("C({a},{b})"),
        symbol: (a.clone(), b.clone()),
        lambda: lambda.clone(),
        cycle,
        sigma: inv.sigma,
        tame,
        order: inv.order(),
        certified: false,
    };
    cert.certified = certify(&cert, m).passed();
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificationReport {
    pub certificate: String,
    pub m: u64,
    pub checks: Vec<Check>,
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} for m = {}:", self.certificate, self.m)?;
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "  [{mark}] {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Recomputes everything a certificate claims. Never errors; problems show up as
/// failed checks.
pub fn certify(cert: &GeneratorCertificate, m: u64) -> CertificationReport {
    let mut rep = CertificationReport {
        certificate: cert.name.clone(),
        m,
        checks: Vec::new(),
    };
    let ring = match ring_with_six(m) {
        Ok(r) => r,
        Err(e) => {
            rep.push("ring", false, e.to_string());
            return rep;
        }
    };
    let Some(inv) = validity_checks(&mut rep, cert, &ring, "") else {
        return rep;
    };
    let (a, _) = &cert.symbol;
    match Role::of(&cert.symbol) {
        Some(Role::Free) => {
            rep.push("generates Z", inv.sigma.abs() == 1 && inv.tame.is_empty(), format!("{inv}"));
        }
        Some(Role::Torsion(q)) if q != 2 && ring.contains_prime(q) => {
            check_torsion_generator(&mut rep, &ring, a, q, &inv);
        }
        _ => rep.push(
            "role",
            false,
            format!("{} is neither C(-1,-1) nor C(u,q) with q an odd prime of m", cert.name),
        ),
    }
    rep
}

/// Everything that makes `cert` a correct description of some class: the cycle, its
/// `delta` values and the recorded invariants. Returns the invariant when it exists.
fn validity_checks(
    rep: &mut CertificationReport,
    cert: &GeneratorCertificate,
    ring: &SIntegerRing,
    prefix: &str,
) -> Option<SymbolInvariant> {
    let mut push = |name: &str, ok: bool, detail: String| rep.push(&format!("{prefix}{name}"), ok, detail);
    let (a, b) = &cert.symbol;

    let units = ring.is_unit(a) && ring.is_unit(b);
    push("symbol entries are units", units, format!("a = {a}, b = {b}"));
    match check_lambda_for(ring, &cert.lambda) {
        Ok(()) => push("lambda admissible", true, format!("lambda = {}", cert.lambda)),
        Err(e) => push("lambda admissible", false, e.to_string()),
    }

    let entries_ok = cert
        .cycle
        .terms()
        .all(|(t, _)| t.iter().all(|g| g.entries().iter().all(|x| ring.contains(x))));
    push("cycle lies over Z[1/m]", entries_ok, format!("{} terms", cert.cycle.len()));
    let is_cycle = cert.cycle.degree() == 2 && cert.cycle.is_cycle();
    push("is a cycle", is_cycle, format!("degree {}", cert.cycle.degree()));
    match big_f(a, b, &cert.lambda) {
        Ok(f) => push("cycle is F(a,b)_lambda", f == cert.cycle, "rebuilt and compared".into()),
        Err(e) => push("cycle is F(a,b)_lambda", false, e.to_string()),
    }

    let inv = match invariant_of_symbol(a, b) {
        Ok(inv) => inv,
        Err(e) => {
            push("invariant", false, e.to_string());
            return None;
        }
    };
    push(
        "sigma",
        inv.sigma == cert.sigma,
        format!("recorded {}, recomputed {}", cert.sigma, inv.sigma),
    );
    if is_cycle {
        for &p in &ring.primes {
            let expected = inv.tame_at(p);
            let recorded = cert.tame.get(&p).copied();
            match delta(&cert.cycle, p) {
                Ok(d) => push(
                    &format!("delta at {p}"),
                    d.value == expected && recorded == Some(d.value),
                    format!(
                        "delta {}, tame symbol {expected}, recorded {}",
                        d.value,
                        recorded.map_or("none".into(), |v| v.to_string())
                    ),
                ),
                Err(e) => push(&format!("delta at {p}"), false, e.to_string()),
            }
        }
    }
    let extra: Vec<u64> = cert.tame.keys().copied().filter(|p| !ring.contains_prime(*p)).collect();
    push("recorded primes", extra.is_empty(), format!("outside the ring: {extra:?}"));

    push(
        "in the image of K_2(2, Z[1/m])",
        is_in_ktilde(&inv, ring),
        format!("{inv}"),
    );
    let order = inv.order();
    push(
        "order",
        order == cert.order,
        format!("recorded {}, recomputed {order}", cert.order),
    );

    Some(inv)
}

fn check_torsion_generator(rep: &mut CertificationReport, ring: &SIntegerRing, u: &Rational, q: u64, inv: &SymbolInvariant) {
    let expected = GroupOrder::Finite(q - 1);
    rep.push(
        &format!("generates Z/{}", q - 1),
        inv.order() == expected && inv.sigma == 0,
        format!("order {}, expected {expected}", inv.order()),
    );
    let positive = u.is_integer() && !u.is_negative();
    let root = positive && u.residue(q).is_some_and(|r| is_primitive_root(r, q));
    rep.push(
        &format!("u is a primitive root mod {q}"),
        root,
        format!("u = {u}, residue {}", u.residue(q).map_or("none".into(), |r| r.to_string())),
    );
    for &qj in ring.primes.iter().filter(|&&qj| qj != 2 && qj != q) {
        let v = u.valuation(qj).unwrap_or(0);
        let ok = v >= 0 && pow_mod(q % qj, v as u64, qj) == 1;
        rep.push(
            &format!("{q}^v_{qj}(u) = 1 mod {qj}"),
            ok,
            format!("v_{qj}(u) = {v}"),
        );
    }
}

/// Outcome of `generators`: certificates in the order of the structure factors, and
/// the primes for which no unit satisfying both conditions was found.
///
/// For those primes a substitute `C(u, q)` with `u` only a primitive root mod `q` is
/// proposed. It does not certify on its own; `decomposition` records whether the whole
/// family still splits the group as `Z + sum F_q^*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorSet {
    pub m: u64,
    pub certificates: Vec<GeneratorCertificate>,
    pub not_found: Vec<u64>,
    pub substitutes: Vec<GeneratorCertificate>,
    pub decomposition: bool,
}

impl GeneratorSet {
    pub fn all_certified(&self) -> bool {
        self.not_found.is_empty() && self.certificates.iter().all(|c| c.certified)
    }
}

/// One certified generator per summand: `C(-1,-1)` and `C(u_q, q)` for each odd `q | m`.
/// The per-prime work runs on scoped threads and is merged in prime order.
pub fn generators(m: u64, lambda: Option<&Rational>) -> Result<GeneratorSet> {
    generators_with_bound(m, lambda, DEFAULT_SEARCH_BOUND)
}

pub fn generators_with_bound(m: u64, lambda: Option<&Rational>, bound: u32) -> Result<GeneratorSet> {
    let ring = ring_with_six(m)?;
    let lambda = lambda.cloned().unwrap_or_else(|| Rational::from_int(DEFAULT_LAMBDA));
    check_lambda_for(&ring, &lambda)?;
    let minus_one = Rational::from_int(-1);

    let odd: Vec<u64> = ring.primes.iter().copied().filter(|&q| q != 2).collect();
    let results: Vec<Result<Option<GeneratorCertificate>>> = std::thread::scope(|s| {
        let handles: Vec<_> = odd
            .iter()
            .map(|&q| {
                let (ring, lambda) = (&ring, &lambda);
                s.spawn(move || -> Result<Option<GeneratorCertificate>> {
                    let Some(u) = find_su_primitive_root(ring, q, bound)? else {
                        return Ok(None);
                    };
                    let u = Rational::from_bigint(u);
                    certificate(m, &u, &Rational::from_int(q as i64), lambda).map(Some)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("certificate worker panicked"))
            .collect()
    });

    let mut certificates = vec![certificate(m, &minus_one, &minus_one, &lambda)?];
    let mut not_found = Vec::new();
    for (q, r) in odd.into_iter().zip(results) {
        match r? {
            Some(c) => certificates.push(c),
            None => not_found.push(q),
        }
    }
    let mut substitutes = Vec::new();
    for &q in &not_found {
        if let Some(u) = find_s_unit_primitive_root(&ring, q, bound)? {
            substitutes.push(certificate(m, &Rational::from_bigint(u), &Rational::from_int(q as i64), &lambda)?);
        }
    }
    let family: Vec<GeneratorCertificate> = certificates.iter().chain(&substitutes).cloned().collect();
    let decomposition = certify_decomposition(&family, m).passed();
    Ok(GeneratorSet {
        m,
        certificates,
        not_found,
        substitutes,
        decomposition,
    })
}

/// Checks that the classes split `H_2` as `Z + sum F_q^*` with one cyclic summand per
/// class: every certificate is valid, exactly one class has `sigma = +-1` and the others
/// `sigma = 0`, the tame parts of the others generate `sum F_q^*`, and their orders
/// multiply to its order. A surjection from `sum Z/ord` onto a group of the same size is
/// an isomorphism, so no condition at the other primes is needed.
pub fn certify_decomposition(certs: &[GeneratorCertificate], m: u64) -> CertificationReport {
    let mut rep = CertificationReport {
        certificate: "decomposition".into(),
        m,
        checks: Vec::new(),
    };
    let ring = match ring_with_six(m) {
        Ok(r) => r,
        Err(e) => {
            rep.push("ring", false, e.to_string());
            return rep;
        }
    };
    let mut invs = Vec::new();
    for c in certs {
        match validity_checks(&mut rep, c, &ring, &format!("{}: ", c.name)) {
            Some(inv) => invs.push(inv),
            None => return rep,
        }
    }
    let free: Vec<&SymbolInvariant> = invs.iter().filter(|i| i.sigma != 0).collect();
    rep.push(
        "one free class",
        free.len() == 1 && free[0].sigma.abs() == 1,
        format!("sigma values {:?}", invs.iter().map(|i| i.sigma).collect::<Vec<_>>()),
    );
    let torsion: Vec<&SymbolInvariant> = invs.iter().filter(|i| i.sigma == 0).collect();
    let odd: Vec<u64> = ring.primes.iter().copied().filter(|&q| q != 2).collect();
    let target: u64 = odd.iter().map(|q| q - 1).product();
    let product: u64 = torsion
        .iter()
        .map(|i| match i.order() {
            GroupOrder::Finite(n) => n,
            GroupOrder::Infinite => 0,
        })
        .product();
    rep.push(
        "orders multiply to the torsion order",
        product == target,
        format!("{product} vs {target}"),
    );
    let (spans, detail) = tame_parts_generate(&torsion, &odd);
    rep.push("tame parts generate sum F_q^*", spans, detail);
    rep
}

/// Whether the tame vectors generate `prod_q F_q^*`. Writing each component as a
/// discrete logarithm, the quotient by the generated subgroup is trivial iff for every
/// prime `l` dividing some `q - 1` the log vectors together with the unit vectors at the
/// `q` with `l` not dividing `q - 1` span `F_l^k`.
fn tame_parts_generate(invs: &[&SymbolInvariant], odd: &[u64]) -> (bool, String) {
    let logs: Vec<Vec<u64>> = invs
        .iter()
        .map(|inv| odd.iter().map(|&q| discrete_log(inv.tame_at(q), q)).collect())
        .collect();
    let mut ells: Vec<u64> = odd
        .iter()
        .flat_map(|&q| crate::arith::factorize_u64(q - 1).into_iter().map(|(l, _)| l))
        .collect();
    ells.sort_unstable();
    ells.dedup();
    for &l in &ells {
        let mut rows: Vec<Vec<u64>> = logs.iter().map(|v| v.iter().map(|x| x % l).collect()).collect();
        for (i, &q) in odd.iter().enumerate() {
            if (q - 1) % l != 0 {
                let mut e = vec![0; odd.len()];
                e[i] = 1;
                rows.push(e);
            }
        }
        if rank_mod(rows, l) < odd.len() {
            return (false, format!("quotient has {l}-torsion"));
        }
    }
    (true, format!("checked at primes {ells:?}"))
}

/// `log_g(x)` in `F_q^*` for the smallest primitive root `g`.
fn discrete_log(x: u64, q: u64) -> u64 {
    let g = (2..q).find(|&g| is_primitive_root(g, q)).unwrap_or(1);
    let mut acc = 1 % q;
    for k in 0..q - 1 {
        if acc == x % q {
            return k;
        }
        acc = acc * g % q;
    }
    unreachable!("{x} is not a unit mod {q}")
}

fn rank_mod(mut rows: Vec<Vec<u64>>, l: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(l)) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = crate::arith::inv_mod(rows[rank][c], l);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % l;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c];
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] + l * l - f * rows[rank][k] % l) % l;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Independent second route: the value of the certificate's cycle through the
/// Steinberg engine must equal the invariant of the claimed symbol.
pub fn steinberg_cross_check(cert: &GeneratorCertificate, budget: usize) -> Result<bool> {
    let via_words = evaluate_cycle(&cert.cycle, budget)?;
    Ok(via_words == invariant_of_symbol(&cert.symbol.0, &cert.symbol.1)?)
}

/// Which S-sets a Morita table entry describes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeSet {
    /// `{2, 3, 5, ..., p_n}` for every `n`.
    FirstPrimes,
    Explicit(Vec<u64>),
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSet::FirstPrimes => f.write_str("{first n primes}"),
            PrimeSet::Explicit(ps) => {
                let s: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "{{{}}}", s.join(","))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoritaEntry {
    pub primes: PrimeSet,
    /// `K_2(2, Z_S)` is central in `St(2, Z_S)` and maps isomorphically onto `K~_2`.
    pub k2_isomorphism: bool,
    /// `H_2(SL_2(Z_S)) = K_2(2, Z_S)`, so `St(2, Z_S)` is the universal central extension.
    pub universal_central_extension: bool,
}

const EXCEPTIONAL_SETS: &[&[u64]] = &[
    &[2, 5],
    &[2, 3, 7],
    &[2, 3, 11],
    &[2, 3, 5, 11],
    &[2, 3, 13],
    &[2, 3, 7, 13],
    &[2, 3, 17],
    &[2, 3, 5, 19],
];

/// Morita's S-sets. The universal-extension flag needs the homology comparison, which
/// requires `2, 3 in S`; that drops `{2,5}`.
pub fn morita_table() -> Vec<MoritaEntry> {
    let mut out = vec![MoritaEntry {
        primes: PrimeSet::FirstPrimes,
        k2_isomorphism: true,
        universal_central_extension: true,
    }];
    for set in EXCEPTIONAL_SETS {
        out.push(MoritaEntry {
            primes: PrimeSet::Explicit(set.to_vec()),
            k2_isomorphism: true,
            universal_central_extension: set.contains(&2) && set.contains(&3),
        });
    }
    out
}

/// Looks up a set of primes (with `n >= 2` for the first-primes family).
pub fn morita_lookup(primes: &[u64]) -> Option<MoritaEntry> {
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    let table = morita_table();
    if let Some(e) = table.iter().find(|e| e.primes == PrimeSet::Explicit(ps.clone())) {
        return Some(e.clone());
    }
    let first: Vec<u64> = (2u64..).filter(|&n| crate::arith::is_prime(n)).take(ps.len()).collect();
    (ps.len() >= 2 && ps == first).then(|| table[0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn structure_examples() {
        assert_eq!(structure(6).unwrap().to_string(), "Z + Z/2");
        assert_eq!(structure(30).unwrap().to_string(), "Z + Z/2 + Z/4");
        assert_eq!(structure(42).unwrap().to_string(), "Z + Z/2 + Z/6");
        assert_eq!(structure(42).unwrap().torsion_order(), 12);
        assert!(matches!(structure(10), Err(Error::Precondition(_))));
        assert!(matches!(structure(0), Err(Error::Precondition(_))));
    }

    #[test]
    fn generators_of_six() {
        let g = generators(6, None).unwrap();
        let names: Vec<&str> = g.certificates.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["C(-1,-1)", "C(2,3)"]);
        assert!(g.all_certified());
        assert_eq!(g.certificates[1].tame.get(&3), Some(&2));
        for c in &g.certificates {
            let rep = certify(c, 6);
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn lambda_must_be_admissible() {
        assert!(generators(6, Some(&r("5"))).is_err());
        assert!(generators(30, Some(&r("7"))).is_err());
        assert!(generators(30, Some(&r("5"))).unwrap().all_certified());
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut c = generators(6, None).unwrap().certificates.remove(1);
        c.tame.insert(3, 1);
        assert!(!certify(&c, 6).passed());
    }

    #[test]
    fn two_is_not_a_generator_mod_seven() {
        let c = certificate(42, &r("2"), &r("7"), &r("3")).unwrap();
        assert!(!c.certified);
        assert_eq!(c.order, GroupOrder::Finite(3));
        let g = generators(42, None).unwrap();
        let last = g.certificates.last().unwrap();
        assert_eq!(last.name, "C(3,7)");
        assert!(last.certified);
        assert_eq!(last.order, GroupOrder::Finite(6));
    }

    #[test]
    fn morita() {
        assert!(morita_lookup(&[2, 3, 7]).unwrap().universal_central_extension);
        let e = morita_lookup(&[5, 2]).unwrap();
        assert!(e.k2_isomorphism && !e.universal_central_extension);
        assert!(morita_lookup(&[2, 3, 5, 7]).is_some());
        assert!(morita_lookup(&[2, 3, 19]).is_none());
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = generators(6, None).unwrap().certificates.remove(1);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"sigma\":\"0\""));
        assert!(s.contains("\"tame\":{\"2\":\"1\",\"3\":\"2\"}"));
        let back: GeneratorCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
