//! Acceptance run: one line per criterion, exit status 1 if any criterion fails.
//!
//! All checks are exact; the only tolerances are wall-clock limits.

use h2sl2::arith::Rational;
use h2sl2::bar::{big_f, big_f_raw, big_f_tilde, theta, theta_tilde, BarChain};
use h2sl2::matrix::diag;
use h2sl2::steinberg::{cocycle_f, evaluate_chain, evaluate_cycle, simplify, SymbolFactor, DEFAULT_BUDGET};
use h2sl2::structure::{certificate, certify, generators, structure};
use h2sl2::symbol::{
    decompose, invariant_of_generators, invariant_of_symbol, matsumoto_residual, square_identities, star_on_symbol,
    GroupOrder, MatsumotoRelation,
};
use h2sl2::tree::delta;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::process::ExitCode;
use std::time::{Duration, Instant};

const SEED: u64 = 0x5eed_2024;

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn random_rational(rng: &mut StdRng) -> Rational {
    loop {
        let n: i64 = rng.gen_range(-60..=60);
        let d: i64 = rng.gen_range(1..=30);
        if n != 0 {
            return Rational::new(n, d).unwrap();
        }
    }
}

fn random_lambda(rng: &mut StdRng) -> Rational {
    loop {
        let l = random_rational(rng);
        if !l.abs().is_one() {
            return l;
        }
    }
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

/// Runs `f`, failing it when it exceeds `limit`.
fn run(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = f();
    let dt = t.elapsed();
    let ok = out.ok && dt <= limit;
    let status = if ok { "PASS" } else { "FAIL" };
    let late = if dt > limit { format!(" (over the {limit:?} limit)") } else { String::new() };
    println!("criterion {id:>2} {status} [{:>8.3}s] {name}: {}{late}", dt.as_secs_f64(), out.detail);
    ok
}

fn cycle_property() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut f_ok = 0;
    let mut ft_ok = 0;
    for _ in 0..100 {
        let (a, b, l) = (random_rational(&mut rng), random_rational(&mut rng), random_lambda(&mut rng));
        f_ok += big_f(&a, &b, &l).unwrap().is_cycle() as usize;
    }
    let mut drawn = 0;
    while drawn < 100 {
        let (a, b, l) = (random_rational(&mut rng), random_rational(&mut rng), random_lambda(&mut rng));
        let ab = &a * &b;
        if a.abs().is_one() || b.abs().is_one() || ab.abs().is_one() {
            continue;
        }
        drawn += 1;
        ft_ok += big_f_tilde(&a, &b, &l).unwrap().is_cycle() as usize;
    }
    let mut fixed = Vec::new();
    for (a, b, l) in [("2", "3", "2"), ("-1", "-1", "3"), ("2", "3", "5")] {
        fixed.push(big_f(&q(a), &q(b), &q(l)).unwrap().is_cycle());
    }
    // F~ needs a, b, ab away from +-1, which excludes (-1,-1,3).
    for (a, b, l) in [("2", "3", "2"), ("2", "3", "5")] {
        fixed.push(big_f_tilde(&q(a), &q(b), &q(l)).unwrap().is_cycle());
    }
    let fixed_ok = fixed.iter().all(|&x| x);
    check(
        f_ok == 100 && ft_ok == 100 && fixed_ok,
        format!("F {f_ok}/100, F~ {ft_ok}/100, fixed instances {}", if fixed_ok { "all cycles" } else { "FAILED" }),
    )
}

fn term_budget() -> Outcome {
    let raw = big_f_raw(&q("2"), &q("3"), &q("2")).unwrap().len();
    let merged = big_f(&q("2"), &q("3"), &q("2")).unwrap().len();
    check(raw <= 32, format!("{raw} raw terms ({merged} after merging), limit 32"))
}

fn delta_ground_truth() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 3);
    let mut good = 0;
    let mut total = 0;
    for p in [3u64, 5, 7] {
        let x = diag(&Rational::from_int(p as i64)).unwrap();
        let mut done = 0;
        while done < 10 {
            let u = random_rational(&mut rng);
            if u.valuation(p) != Some(0) || u.abs().is_one() {
                continue;
            }
            done += 1;
            let d = diag(&u).unwrap();
            let z = BarChain::from_terms(2, [(1, vec![x.clone(), d.clone()]), (-1, vec![d, x.clone()])]).unwrap();
            let want = u.square().residue(p).unwrap();
            total += 1;
            good += (delta(&z, p).unwrap().value == want) as usize;
        }
    }
    check(good == total, format!("{good}/{total} commutators give u^2 mod p"))
}

fn tame_square() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 4);
    let mut good = 0;
    for _ in 0..50 {
        let (a, b, l) = (random_rational(&mut rng), random_rational(&mut rng), random_lambda(&mut rng));
        let z = big_f(&a, &b, &l).unwrap();
        let inv = invariant_of_symbol(&a, &b).unwrap();
        good += [3u64, 5, 7].iter().all(|&p| delta(&z, p).unwrap().value == inv.tame_at(p)) as usize;
    }
    let d = delta(&big_f(&q("2"), &q("3"), &q("2")).unwrap(), 3).unwrap();
    check(
        good == 50 && d.value == 2 && d.order() == 2,
        format!("{good}/50 random triples agree at 3, 5, 7; delta(F(2,3,2), 3) = {} of order {}", d.value, d.order()),
    )
}

fn structure_tables() -> Outcome {
    let tables: Vec<String> = [6, 30, 42].iter().map(|&m| structure(m).unwrap().to_string()).collect();
    let tables_ok = tables == ["Z + Z/2", "Z + Z/2 + Z/4", "Z + Z/2 + Z/6"];
    let names = |m: u64| -> (Vec<String>, bool) {
        let g = generators(m, None).unwrap();
        (g.certificates.iter().map(|c| c.name.clone()).collect(), g.all_certified())
    };
    let (n6, c6) = names(6);
    let (n30, c30) = names(30);
    let ok = tables_ok && c6 && c30 && n6 == ["C(-1,-1)", "C(2,3)"] && n30 == ["C(-1,-1)", "C(2,3)", "C(2,5)"];
    check(ok, format!("{}; m=6 {n6:?} certified {c6}; m=30 {n30:?} certified {c30}", tables.join(" | ")))
}

fn steinberg_identities() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let f = simplify(&cocycle_f(&diag(&q("2")).unwrap(), &diag(&q("3")).unwrap()), DEFAULT_BUDGET).unwrap();
    let f_ok = f == [SymbolFactor { u: q("2"), v: q("3"), exponent: 1 }];
    ok &= f_ok;
    notes.push(format!("f(D2,D3) -> c(2,3) {f_ok}"));
    for u in ["2", "3", "-1"] {
        let z = evaluate_chain(&theta(&q(u)).unwrap(), DEFAULT_BUDGET).unwrap();
        ok &= z.is_zero();
        notes.push(format!("Theta_{u} trivial {}", z.is_zero()));
    }
    let tt = evaluate_chain(&theta_tilde(&q("2")).unwrap(), DEFAULT_BUDGET).unwrap();
    ok &= tt.is_zero();
    notes.push(format!("Theta~_2 trivial {}", tt.is_zero()));
    let bf = evaluate_cycle(&big_f(&q("2"), &q("3"), &q("2")).unwrap(), DEFAULT_BUDGET).unwrap();
    let bf_ok = bf == invariant_of_symbol(&q("2"), &q("3")).unwrap();
    ok &= bf_ok;
    notes.push(format!("F(2,3,2) -> c(2,3) {bf_ok}"));
    let (da, db) = (diag(&q("2")).unwrap(), diag(&q("3")).unwrap());
    let comm = BarChain::from_terms(2, [(1, vec![da.clone(), db.clone()]), (-1, vec![db, da])]).unwrap();
    let cv = evaluate_cycle(&comm, DEFAULT_BUDGET).unwrap();
    let cv_ok = cv == invariant_of_symbol(&q("4"), &q("3")).unwrap();
    ok &= cv_ok;
    notes.push(format!("[D2|D3]-[D3|D2] -> c(4,3) {cv_ok}"));
    check(ok, notes.join(", "))
}

fn relation_suites() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 7);
    let mut bad = 0;
    for _ in 0..200 {
        let (u, v, w) = (random_rational(&mut rng), random_rational(&mut rng), random_rational(&mut rng));
        let mut rels = vec![
            MatsumotoRelation::Trivial { u: u.clone() },
            MatsumotoRelation::Inversion { u: u.clone(), v: v.clone() },
            MatsumotoRelation::Cocycle { u: u.clone(), v: v.clone(), w: w.clone() },
            MatsumotoRelation::Negation { u: u.clone(), v: v.clone() },
        ];
        let su = if u.is_one() { q("2") } else { u.clone() };
        rels.push(MatsumotoRelation::Steinberg { u: su, v: v.clone() });
        bad += rels.iter().filter(|r| !matsumoto_residual(r).unwrap().is_zero()).count();
        bad += square_identities(&u, &v, &w).unwrap().iter().filter(|r| !r.is_zero()).count();
        let a = random_rational(&mut rng);
        bad += (star_on_symbol(&a.square(), &u, &v).unwrap() != invariant_of_symbol(&u, &v).unwrap()) as usize;
    }
    check(bad == 0, format!("200 samples x 8 identities, {bad} nonzero residuals"))
}

fn decomposition_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 8);
    let primes = [2u64, 3, 5, 7, 11, 13];
    let mut good = 0;
    for _ in 0..100 {
        let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
        let p = primes[rng.gen_range(0..primes.len())];
        let gens = decompose(&a, &b, p).unwrap();
        let shaped = gens.iter().all(|g| g.x.valuation(p) == Some(1) && g.u.valuation(p) == Some(0));
        let sum = invariant_of_generators(&gens).unwrap() == invariant_of_symbol(&a, &b).unwrap();
        good += (shaped && sum) as usize;
    }
    check(good == 100, format!("{good}/100 decompositions generator-shaped with matching invariant"))
}

fn lambda_independence() -> Outcome {
    let mut evals = Vec::new();
    let mut deltas = Vec::new();
    for l in ["2", "3", "5", "7/2"] {
        let z = big_f(&q("2"), &q("3"), &q(l)).unwrap();
        evals.push(evaluate_cycle(&z, DEFAULT_BUDGET).unwrap());
        deltas.push([2u64, 3, 5, 7].map(|p| delta(&z, p).unwrap().value));
    }
    let ok = evals.windows(2).all(|w| w[0] == w[1]) && deltas.windows(2).all(|w| w[0] == w[1]);
    check(ok, format!("evaluate_cycle {} for all lambda, delta at 2,3,5,7 = {:?}", evals[0], deltas[0]))
}

fn discrepancy_regression() -> Outcome {
    let c27 = certificate(42, &q("2"), &q("7"), &q("3")).unwrap();
    let rep = certify(&c27, 42);
    let failed: Vec<String> = rep.failures().map(|c| c.name.clone()).collect();
    let g = generators(42, None).unwrap();
    let sub = g.certificates.iter().find(|c| c.symbol.1 == q("7"));
    let sub_ok = sub.is_some_and(|c| {
        c.certified && c.order == GroupOrder::Finite(6) && h2sl2::arith::order_mod(c.tame[&7], 7) == 6
    });
    check(
        !rep.passed() && sub_ok && g.all_certified(),
        format!(
            "C(2,7) rejected on {failed:?}; substitute {} certified {sub_ok}",
            sub.map_or("none".into(), |c| c.name.clone())
        ),
    )
}

fn main() -> ExitCode {
    let results = [
        run(1, "cycle property", Duration::from_secs(5), cycle_property),
        run(2, "term budget", Duration::from_secs(1), term_budget),
        run(3, "delta ground truth", Duration::from_secs(30), delta_ground_truth),
        run(4, "tame/delta square", Duration::from_secs(60), tame_square),
        run(5, "structure tables", Duration::from_secs(60), structure_tables),
        run(6, "Steinberg golden identities", Duration::from_secs(300), steinberg_identities),
        run(7, "relation suites", Duration::from_secs(10), relation_suites),
        run(8, "decomposition oracle", Duration::from_secs(30), decomposition_oracle),
        run(9, "lambda independence", Duration::from_secs(60), lambda_independence),
        run(10, "m = 42 discrepancy", Duration::from_secs(60), discrepancy_regression),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
