//! Words in the Steinberg group `St_2(Q)`, a library of phi-checked local rewrites,
//! the Bruhat section `s`, the cocycle `f_s`, and a simplifier that turns words
//! lying over the identity matrix into products of central symbols `c(u, v)`.

use crate::arith::Rational;
use crate::bar::BarChain;
use crate::error::{precondition, Error, Result};
use crate::matrix::{diag, e12, e21, Mat2};
use crate::symbol::{invariant_of_factor, SymbolInvariant};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Letter {
    X12(Rational),
    X21(Rational),
    W12(Rational),
    H12 { u: Rational, inverse: bool },
    Symbol { u: Rational, v: Rational, inverse: bool },
}

use Letter::*;

fn h(u: Rational) -> Letter {
    H12 { u, inverse: false }
}

fn h_inv(u: Rational) -> Letter {
    H12 { u, inverse: true }
}

fn sym(u: Rational, v: Rational, inverse: bool) -> Letter {
    Symbol { u, v, inverse }
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

impl Letter {
    pub fn inverse(&self) -> Letter {
        match self {
            X12(t) => X12(-t),
            X21(t) => X21(-t),
            W12(u) => W12(-u),
            H12 { u, inverse } => H12 { u: u.clone(), inverse: !inverse },
            Symbol { u, v, inverse } => sym(u.clone(), v.clone(), !inverse),
        }
    }

    pub fn is_symbol(&self) -> bool {
        matches!(self, Symbol { .. })
    }

    pub fn phi(&self) -> Mat2 {
        match self {
            X12(t) => e12(t),
            X21(t) => e21(t),
            W12(u) => Mat2::unchecked(q(0), u.clone(), -u.recip(), q(0)),
            H12 { u, inverse } => {
                let d = diag(u).expect("h12 payload is nonzero");
                if *inverse {
                    d.inverse()
                } else {
                    d
                }
            }
            Symbol { .. } => Mat2::identity(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = match self {
            W12(u) | H12 { u, .. } => u.is_zero(),
            Symbol { u, v, .. } => u.is_zero() || v.is_zero(),
            _ => false,
        };
        if bad {
            precondition(format!("{self} has a zero payload"))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = |inv: bool| if inv { "^-1" } else { "" };
        match self {
            X12(t) => write!(f, "x12({t})"),
            X21(t) => write!(f, "x21({t})"),
            W12(u) => write!(f, "w12({u})"),
            H12 { u, inverse } => write!(f, "h12({u}){}", suffix(*inverse)),
            Symbol { u, v, inverse } => write!(f, "c({u},{v}){}", suffix(*inverse)),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "Steinberg letter",
            input: s.to_string(),
        };
        let (body, inverse) = match s.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (s.strip_suffix("^1").unwrap_or(s), false),
        };
        let open = body.find('(').ok_or_else(bad)?;
        let name = &body[..open];
        let args = body[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let args: Vec<Rational> = args
            .split(',')
            .map(|a| a.parse())
            .collect::<Result<_>>()
            .map_err(|_| bad())?;
        let letter = match (name, args.as_slice()) {
            ("x12", [t]) => X12(t.clone()),
            ("x21", [t]) => X21(t.clone()),
            ("w12", [u]) => W12(u.clone()),
            ("h12", [u]) => h(u.clone()),
            ("h21", [u]) => h_inv(u.clone()),
            ("c", [u, v]) => sym(u.clone(), v.clone(), false),
            _ => return Err(bad()),
        };
        letter.validate()?;
        Ok(if inverse { letter.inverse() } else { letter })
    }
}

/// A word in the letters above, read left to right as a product.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(Letter::inverse).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(o.0.iter().cloned());
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace().map(Letter::from_str).collect::<Result<_>>().map(Word)
    }
}

pub fn phi(wd: &Word) -> Mat2 {
    phi_slice(&wd.0)
}

fn phi_slice(letters: &[Letter]) -> Mat2 {
    letters
        .iter()
        .fold(Mat2::identity(), |acc, l| acc.mul(&l.phi()))
}

/// The Bruhat section: `x12(ab) h12(a)` when `c = 0`, otherwise
/// `x12(a/c) w12(-1/c) x12(d/c)`. Letters that are trivially the identity
/// (`x12(0)`, `h12(1)`) are left out.
pub fn section_s(x: &Mat2) -> Word {
    let mut out = Vec::with_capacity(3);
    if x.c().is_zero() {
        let t = x.a() * x.b();
        if !t.is_zero() {
            out.push(X12(t));
        }
        if !x.a().is_one() {
            out.push(h(x.a().clone()));
        }
    } else {
        let ci = x.c().recip();
        let left = x.a() * &ci;
        let right = x.d() * &ci;
        if !left.is_zero() {
            out.push(X12(left));
        }
        out.push(W12(-&ci));
        if !right.is_zero() {
            out.push(X12(right));
        }
    }
    Word(out)
}

/// `f_s(X, Y) = s(X) s(Y) s(XY)^{-1}`.
pub fn cocycle_f(x: &Mat2, y: &Mat2) -> Word {
    section_s(x)
        .concat(&section_s(y))
        .concat(&section_s(&x.mul(y)).inverse())
}

// ---------------------------------------------------------------------------
// Rewrites.

/// Families of rewrite rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleId {
    /// Additivity of `x_ij`.
    R1,
    /// `w(u) x12(t) w(-u) = x21(-t/u^2)`.
    R2,
    /// Moving `x12` across `w`.
    R3,
    /// Moving `x21` across `w`.
    R4,
    /// Moving `x_ij` across `h`.
    R5,
    /// Inverse pairs.
    R6,
    /// `h`/`w` expansion and contraction, symbol extraction.
    R7,
    /// Symbols are central.
    R8,
    /// `w` and `x` letters as products of elementary letters.
    R9,
}

/// Individual rewrites. Each one replaces a window of the word starting at a position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rewrite {
    MergeX,
    DropZeroX,
    ConjugateByW,
    PassX12LeftThroughW,
    PassX12RightThroughW,
    PassX21LeftThroughW,
    PassX21RightThroughW,
    PassXLeftThroughH,
    PassXRightThroughH,
    ConjugateXByH,
    CancelPair,
    InsertPair(Letter),
    ContractH,
    ExpandH,
    SplitW,
    JoinW,
    /// `w(u) w(v) = h(u) h(-v)^{-1}`, i.e. inserting `w(-1) w(1)` and contracting twice.
    PairW,
    ExtractSymbol,
    InvertH,
    ExpandSymbol,
    DropTrivialSymbol,
    CommuteSymbolLeft,
    ExpandW,
    ContractW,
    ExpandX21,
    ExpandX12,
}

impl Rewrite {
    pub fn rule(&self) -> RuleId {
        use Rewrite::*;
        match self {
            MergeX | DropZeroX => RuleId::R1,
            ConjugateByW => RuleId::R2,
            PassX12LeftThroughW | PassX12RightThroughW => RuleId::R3,
            PassX21LeftThroughW | PassX21RightThroughW => RuleId::R4,
            PassXLeftThroughH | PassXRightThroughH | ConjugateXByH => RuleId::R5,
            CancelPair | InsertPair(_) => RuleId::R6,
            ContractH | ExpandH | SplitW | JoinW | PairW | ExtractSymbol | InvertH
            | ExpandSymbol | DropTrivialSymbol => RuleId::R7,
            CommuteSymbolLeft => RuleId::R8,
            ExpandW | ContractW | ExpandX21 | ExpandX12 => RuleId::R9,
        }
    }

    /// Pattern match at `pos`: the number of letters consumed and their replacement.
    fn matches(&self, w: &[Letter], pos: usize) -> Option<(usize, Vec<Letter>)> {
        use Rewrite::*;
        let at = |i: usize| w.get(pos + i);
        let one = q(1);
        let minus_one = q(-1);
        match self {
            MergeX => match (at(0)?, at(1)?) {
                (X12(s), X12(t)) => Some((2, vec![X12(s + t)])),
                (X21(s), X21(t)) => Some((2, vec![X21(s + t)])),
                _ => None,
            },
            DropZeroX => match at(0)? {
                X12(t) | X21(t) if t.is_zero() => Some((1, vec![])),
                _ => None,
            },
            ConjugateByW => match (at(0)?, at(1)?, at(2)?) {
                (W12(u), X12(t), W12(v)) if *v == -u => {
                    Some((3, vec![X21(-(t / &u.square()))]))
                }
                _ => None,
            },
            PassX12LeftThroughW => match (at(0)?, at(1)?) {
                (W12(u), X12(t)) => Some((2, vec![X21(-(t / &u.square())), W12(u.clone())])),
                _ => None,
            },
            PassX12RightThroughW => match (at(0)?, at(1)?) {
                (X12(t), W12(u)) => Some((2, vec![W12(u.clone()), X21(-(t / &u.square()))])),
                _ => None,
            },
            PassX21LeftThroughW => match (at(0)?, at(1)?) {
                (W12(u), X21(t)) => Some((2, vec![X12(-(&u.square() * t)), W12(u.clone())])),
                _ => None,
            },
            PassX21RightThroughW => match (at(0)?, at(1)?) {
                (X21(t), W12(u)) => Some((2, vec![W12(u.clone()), X12(-(&u.square() * t))])),
                _ => None,
            },
            PassXLeftThroughH => match (at(0)?, at(1)?) {
                (hl @ H12 { u, inverse }, x) => {
                    let x2 = conjugate_x_by_h(x, u, *inverse)?;
                    Some((2, vec![x2, hl.clone()]))
                }
                _ => None,
            },
            PassXRightThroughH => match (at(0)?, at(1)?) {
                (x, hl @ H12 { u, inverse }) => {
                    let x2 = conjugate_x_by_h(x, u, !inverse)?;
                    Some((2, vec![hl.clone(), x2]))
                }
                _ => None,
            },
            ConjugateXByH => match (at(0)?, at(1)?, at(2)?) {
                (H12 { u, inverse }, x, H12 { u: u2, inverse: i2 }) if u == u2 && inverse != i2 => {
                    Some((3, vec![conjugate_x_by_h(x, u, *inverse)?]))
                }
                _ => None,
            },
            CancelPair => {
                let (a, b) = (at(0)?, at(1)?);
                (b == &a.inverse()).then(|| (2, vec![]))
            }
            InsertPair(l) => (pos <= w.len()).then(|| (0, vec![l.clone(), l.inverse()])),
            ContractH => match (at(0)?, at(1)?) {
                (W12(u), W12(m)) if *m == minus_one => Some((2, vec![h(u.clone())])),
                (W12(o), W12(v)) if *o == one => Some((2, vec![h_inv(-v)])),
                _ => None,
            },
            ExpandH => match at(0)? {
                H12 { u, inverse: false } => Some((1, vec![W12(u.clone()), W12(minus_one)])),
                H12 { u, inverse: true } => Some((1, vec![W12(one), W12(-u)])),
                _ => None,
            },
            SplitW => match at(0)? {
                W12(u) => Some((1, vec![h(u.clone()), W12(one)])),
                _ => None,
            },
            JoinW => match (at(0)?, at(1)?) {
                (H12 { u, inverse: false }, W12(o)) if *o == one => Some((2, vec![W12(u.clone())])),
                _ => None,
            },
            PairW => match (at(0)?, at(1)?) {
                (W12(u), W12(v)) => Some((2, vec![h(u.clone()), h_inv(-v)])),
                _ => None,
            },
            ExtractSymbol => match (at(0)?, at(1)?) {
                (H12 { u, inverse: false }, H12 { u: v, inverse: false }) => {
                    Some((2, vec![sym(u.clone(), v.clone(), false), h(u * v)]))
                }
                _ => None,
            },
            InvertH => match at(0)? {
                H12 { u, inverse: true } => {
                    let ui = u.recip();
                    Some((1, vec![sym(u.clone(), ui.clone(), true), h(ui)]))
                }
                _ => None,
            },
            ExpandSymbol => match at(0)? {
                Symbol { u, v, inverse: false } => {
                    Some((1, vec![h(u.clone()), h(v.clone()), h_inv(u * v)]))
                }
                Symbol { u, v, inverse: true } => {
                    Some((1, vec![h(u * v), h_inv(v.clone()), h_inv(u.clone())]))
                }
                _ => None,
            },
            DropTrivialSymbol => match at(0)? {
                Symbol { u, v, .. } if u.is_one() || v.is_one() => Some((1, vec![])),
                _ => None,
            },
            CommuteSymbolLeft => match (at(0)?, at(1)?) {
                (l, s @ Symbol { .. }) => Some((2, vec![s.clone(), l.clone()])),
                _ => None,
            },
            ExpandW => match at(0)? {
                W12(u) => Some((1, vec![X12(u.clone()), X21(-u.recip()), X12(u.clone())])),
                _ => None,
            },
            ContractW => match (at(0)?, at(1)?, at(2)?) {
                (X12(a), X21(b), X12(c)) if !a.is_zero() && a == c && *b == -a.recip() => {
                    Some((3, vec![W12(a.clone())]))
                }
                _ => None,
            },
            ExpandX21 => match at(0)? {
                X21(t) if !t.is_zero() => {
                    let ti = t.recip();
                    Some((1, vec![X12(ti.clone()), W12(-&ti), X12(ti)]))
                }
                _ => None,
            },
            ExpandX12 => match at(0)? {
                X12(t) if !t.is_zero() => {
                    let ti = t.recip();
                    Some((1, vec![X21(ti.clone()), W12(t.clone()), X21(ti)]))
                }
                _ => None,
            },
        }
    }
}

/// `h(u)^{e} x h(u)^{-e}` for an elementary letter `x` (`e = -1` when `inverse`).
fn conjugate_x_by_h(x: &Letter, u: &Rational, inverse: bool) -> Option<Letter> {
    let u2 = if inverse { u.square().recip() } else { u.square() };
    match x {
        X12(t) => Some(X12(&u2 * t)),
        X21(t) => Some(X21(t / &u2)),
        _ => None,
    }
}

fn family(rule: RuleId) -> Vec<Rewrite> {
    use Rewrite::*;
    match rule {
        RuleId::R1 => vec![MergeX, DropZeroX],
        RuleId::R2 => vec![ConjugateByW],
        RuleId::R3 => vec![PassX12LeftThroughW, PassX12RightThroughW],
        RuleId::R4 => vec![PassX21LeftThroughW, PassX21RightThroughW],
        RuleId::R5 => vec![ConjugateXByH, PassXLeftThroughH, PassXRightThroughH],
        RuleId::R6 => vec![CancelPair],
        RuleId::R7 => vec![
            ContractH,
            JoinW,
            ExtractSymbol,
            InvertH,
            DropTrivialSymbol,
            PairW,
            ExpandH,
            ExpandSymbol,
            SplitW,
        ],
        RuleId::R8 => vec![CommuteSymbolLeft],
        RuleId::R9 => vec![ContractW, ExpandW, ExpandX21, ExpandX12],
    }
}

/// Applies one rewrite at `pos`, refusing if the pattern is absent or if the matrix
/// image of the rewritten window would change.
pub fn apply_rewrite(wd: &Word, rw: &Rewrite, pos: usize) -> Result<Word> {
    let mut letters = wd.0.clone();
    rewrite_in_place(&mut letters, rw, pos)?;
    Ok(Word(letters))
}

fn rewrite_in_place(letters: &mut Vec<Letter>, rw: &Rewrite, pos: usize) -> Result<()> {
    let (n, repl) = rw.matches(letters, pos).ok_or_else(|| Error::NotApplicable {
        rule: format!("{rw:?}"),
        position: pos,
    })?;
    if phi_slice(&letters[pos..pos + n]) != phi_slice(&repl) {
        return Err(Error::Unsound(format!("{rw:?}")));
    }
    letters.splice(pos..pos + n, repl);
    Ok(())
}

/// Applies the first rewrite of the family `rule` that matches at `pos`.
pub fn apply_rule(wd: &Word, rule: RuleId, pos: usize) -> Result<Word> {
    for rw in family(rule) {
        if rw.matches(&wd.0, pos).is_some() {
            return apply_rewrite(wd, &rw, pos);
        }
    }
    Err(Error::NotApplicable {
        rule: format!("{rule:?}"),
        position: pos,
    })
}

// ---------------------------------------------------------------------------
// Simplification.

/// A central factor `c(u, v)^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SymbolFactor {
    pub u: Rational,
    pub v: Rational,
    pub exponent: i64,
}

pub fn invariant_of_factors(factors: &[SymbolFactor]) -> Result<SymbolInvariant> {
    factors.iter().try_fold(SymbolInvariant::zero(), |acc, f| {
        Ok(acc.add(&invariant_of_factor(&f.u, &f.v, false)?.scale(f.exponent)))
    })
}

/// The word is kept as `[symbols][normal form][unprocessed letters]`. The normal form
/// is either `x12(b)? h12(u)?` or `x12(a)? w12(u) x12(b)?`; each incoming letter is
/// absorbed into it by a short, fixed sequence of checked rewrites, and every symbol
/// produced on the way is moved to the front (cancelling against an inverse if one is
/// already there).
struct Simplifier {
    word: Vec<Letter>,
    nsym: usize,
    nf_len: usize,
    steps: usize,
    budget: usize,
}

impl Simplifier {
    fn end(&self) -> usize {
        self.nsym + self.nf_len
    }

    fn nf(&self) -> &[Letter] {
        &self.word[self.nsym..self.end()]
    }

    fn nf_last(&self) -> Option<&Letter> {
        self.nf().last()
    }

    fn nf_has_w(&self) -> bool {
        self.nf().iter().any(|l| matches!(l, W12(_)))
    }

    fn apply(&mut self, rw: Rewrite, pos: usize) -> Result<()> {
        if self.steps >= self.budget {
            return Err(Error::Timeout { budget: self.budget });
        }
        self.steps += 1;
        rewrite_in_place(&mut self.word, &rw, pos)
    }

    /// Moves the symbol at `pos` into the symbol block. `in_nf` says whether it was
    /// counted as part of the normal form.
    fn settle_symbol(&mut self, pos: usize, in_nf: bool) -> Result<()> {
        if in_nf {
            self.nf_len -= 1;
        }
        if Rewrite::DropTrivialSymbol.matches(&self.word, pos).is_some() {
            return self.apply(Rewrite::DropTrivialSymbol, pos);
        }
        let mut p = pos;
        while p > self.nsym {
            self.apply(Rewrite::CommuteSymbolLeft, p - 1)?;
            p -= 1;
        }
        let target = self.word[p].inverse();
        if let Some(j) = self.word[..self.nsym].iter().rposition(|l| *l == target) {
            while p > j + 1 {
                self.apply(Rewrite::CommuteSymbolLeft, p - 1)?;
                p -= 1;
            }
            self.apply(Rewrite::CancelPair, j)?;
            self.nsym -= 1;
        } else {
            self.nsym += 1;
        }
        Ok(())
    }

    /// Merges the x-letters at `i` and `i + 1` of the normal form.
    fn merge_x(&mut self, i: usize) -> Result<()> {
        self.apply(Rewrite::MergeX, i)?;
        self.nf_len -= 1;
        if matches!(&self.word[i], X12(t) if t.is_zero()) {
            self.apply(Rewrite::DropZeroX, i)?;
            self.nf_len -= 1;
        }
        Ok(())
    }

    /// Removes an `h12(1)` sitting at `i`.
    fn drop_trivial_h(&mut self, i: usize) -> Result<()> {
        self.apply(Rewrite::ExpandH, i)?;
        self.apply(Rewrite::CancelPair, i)
    }

    fn step(&mut self) -> Result<()> {
        let q = self.end();
        let letter = self.word[q].clone();
        match letter {
            Symbol { .. } => self.settle_symbol(q, false),
            X21(t) => {
                if t.is_zero() {
                    self.apply(Rewrite::DropZeroX, q)
                } else {
                    self.apply(Rewrite::ExpandX21, q)
                }
            }
            H12 { u, inverse: true } => {
                if matches!(self.nf_last(), Some(H12 { u: v, inverse: false }) if *v == u) {
                    self.apply(Rewrite::CancelPair, q - 1)?;
                    self.nf_len -= 1;
                    Ok(())
                } else {
                    self.apply(Rewrite::InvertH, q)?;
                    self.settle_symbol(q, false)
                }
            }
            H12 { u, inverse: false } => {
                if u.is_one() {
                    return self.drop_trivial_h(q);
                }
                match self.nf_last() {
                    Some(H12 { .. }) => {
                        self.apply(Rewrite::ExtractSymbol, q - 1)?;
                        self.nf_len += 1;
                        self.settle_symbol(q - 1, true)?;
                        let last = self.end() - 1;
                        if matches!(&self.word[last], H12 { u, .. } if u.is_one()) {
                            self.drop_trivial_h(last)?;
                            self.nf_len -= 1;
                        }
                        Ok(())
                    }
                    _ if self.nf_has_w() => self.apply(Rewrite::ExpandH, q),
                    _ => {
                        self.nf_len += 1;
                        Ok(())
                    }
                }
            }
            X12(t) => {
                if t.is_zero() {
                    return self.apply(Rewrite::DropZeroX, q);
                }
                match self.nf_last() {
                    None | Some(W12(_)) => {
                        self.nf_len += 1;
                        Ok(())
                    }
                    Some(X12(_)) => {
                        self.nf_len += 1;
                        self.merge_x(q - 1)
                    }
                    Some(H12 { .. }) => {
                        self.apply(Rewrite::PassXLeftThroughH, q - 1)?;
                        self.nf_len += 1;
                        if self.nf_len == 3 {
                            self.merge_x(self.nsym)?;
                        }
                        Ok(())
                    }
                    Some(_) => unreachable!("symbols never sit in the normal form"),
                }
            }
            W12(v) => match self.nf_last() {
                None | Some(X12(_)) if !self.nf_has_w() => {
                    self.nf_len += 1;
                    Ok(())
                }
                Some(H12 { .. }) => {
                    if v.is_one() {
                        self.apply(Rewrite::JoinW, q - 1)
                    } else {
                        self.apply(Rewrite::SplitW, q)
                    }
                }
                Some(W12(_)) => {
                    // w(u) w(v) -> h(u) h(-v)^{-1}; h(u) stays, the other is processed next.
                    self.apply(Rewrite::PairW, q - 1)
                }
                Some(X12(_)) => {
                    // [.., w(u), x12(b)] w(v): expand x12(b) and move its x21 halves
                    // outward through the neighbouring w letters.
                    self.apply(Rewrite::ExpandX12, q - 1)?;
                    self.apply(Rewrite::PassX21LeftThroughW, q - 2)?;
                    if self.nf_len == 3 {
                        self.merge_x(self.nsym)?;
                    }
                    let e = self.end();
                    self.apply(Rewrite::PassX21RightThroughW, e + 1)
                }
                _ => unreachable!("symbols never sit in the normal form"),
            },
        }
    }
}

/// Rewrites a word lying over the identity matrix into a product of symbols.
pub fn simplify(wd: &Word, budget: usize) -> Result<Vec<SymbolFactor>> {
    for l in &wd.0 {
        l.validate()?;
    }
    if !phi(wd).is_identity() {
        return Err(Error::NotIdentity);
    }
    let mut s = Simplifier {
        word: wd.0.clone(),
        nsym: 0,
        nf_len: 0,
        steps: 0,
        budget,
    };
    while s.end() < s.word.len() {
        s.step()?;
    }
    if s.nf_len != 0 {
        return Err(Error::Unsound(format!(
            "normal form {:?} left over",
            s.nf().iter().map(|l| l.to_string()).collect::<Vec<_>>()
        )));
    }
    Ok(s.word
        .iter()
        .map(|l| match l {
            Symbol { u, v, inverse } => SymbolFactor {
                u: u.clone(),
                v: v.clone(),
                exponent: if *inverse { -1 } else { 1 },
            },
            _ => unreachable!("only symbols remain"),
        })
        .collect())
}

/// Value of a degree-2 cycle under `f_s`, as an invariant in `Z x prod F_p^*`.
pub fn evaluate_cycle(z: &BarChain<Mat2>, budget: usize) -> Result<SymbolInvariant> {
    if z.degree() != 2 {
        return precondition(format!("expected a 2-chain, got degree {}", z.degree()));
    }
    z.require_cycle()?;
    evaluate_chain(z, budget)
}

/// Same sum without the cycle check; the result then depends on the section.
pub fn evaluate_chain(z: &BarChain<Mat2>, budget: usize) -> Result<SymbolInvariant> {
    let mut total = SymbolInvariant::zero();
    for (t, n) in z.terms() {
        let factors = simplify(&cocycle_f(&t[0], &t[1]), budget)?;
        total = total.add(&invariant_of_factors(&factors)?.scale(n));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bar::{big_f, theta, theta_tilde};
    use crate::symbol::invariant_of_symbol;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn text_round_trip() {
        let s = "x12(3/2) w12(-1) h12(5) h12(5)^-1 c(2,3)^-1 x21(-7)";
        assert_eq!(w(s).to_string(), s);
        assert!("w12(0)".parse::<Word>().is_err());
        assert!("y(2)".parse::<Word>().is_err());
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&w("w12(3)")), Mat2::new(r("0"), r("3"), r("-1/3"), r("0")).unwrap());
        assert!(phi(&w("h12(2) h12(3) h12(6)^-1")).is_identity());
        assert!(phi(&Word::default()).is_identity());
    }

    #[test]
    fn section_examples() {
        assert_eq!(section_s(&e12(&r("5"))), w("x12(5)"));
        assert_eq!(section_s(&diag(&r("7")).unwrap()), w("h12(7)"));
        assert_eq!(section_s(&crate::matrix::weyl().inverse()), w("w12(-1)"));
    }

    #[test]
    fn rule_examples() {
        assert_eq!(apply_rule(&w("x12(2) x12(3)"), RuleId::R1, 0).unwrap(), w("x12(5)"));
        // h^{-1} x(a) h = x(a/u^2) as matrices.
        assert_eq!(
            apply_rule(&w("h12(2)^-1 x12(1) h12(2)"), RuleId::R5, 0).unwrap(),
            w("x12(1/4)")
        );
        assert_eq!(apply_rule(&w("h12(2) x12(1) h12(2)^-1"), RuleId::R5, 0).unwrap(), w("x12(4)"));
        assert_eq!(apply_rule(&w("h12(2) h12(3)"), RuleId::R7, 0).unwrap(), w("c(2,3) h12(6)"));
        assert!(apply_rule(&w("x12(2) w12(3)"), RuleId::R1, 0).is_err());
    }

    #[test]
    fn simplify_diagonal_cocycle() {
        let f = cocycle_f(&diag(&r("2")).unwrap(), &diag(&r("3")).unwrap());
        let out = simplify(&f, DEFAULT_BUDGET).unwrap();
        assert_eq!(out, vec![SymbolFactor { u: r("2"), v: r("3"), exponent: 1 }]);
    }

    #[test]
    fn simplify_rejects_nontrivial_words() {
        assert_eq!(simplify(&w("x12(1)"), 100), Err(Error::NotIdentity));
        let long = w("w12(2) w12(3) w12(5) w12(7) w12(-105/4)^-1");
        assert!(!phi(&long).is_identity() || simplify(&long, 1).is_err());
    }

    #[test]
    fn thetas_evaluate_to_zero() {
        for u in ["2", "3", "-1"] {
            let inv = evaluate_chain(&theta(&r(u)).unwrap(), DEFAULT_BUDGET).unwrap();
            assert!(inv.is_zero(), "u = {u}: {inv}");
        }
        let inv = evaluate_chain(&theta_tilde(&r("2")).unwrap(), DEFAULT_BUDGET).unwrap();
        assert!(inv.is_zero(), "{inv}");
    }

    #[test]
    fn big_f_evaluates_to_its_symbol() {
        let z = big_f(&r("2"), &r("3"), &r("2")).unwrap();
        let inv = evaluate_cycle(&z, DEFAULT_BUDGET).unwrap();
        assert_eq!(inv, invariant_of_symbol(&r("2"), &r("3")).unwrap());
    }
}
