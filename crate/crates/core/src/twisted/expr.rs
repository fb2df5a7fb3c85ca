//! Formal noncommutative expressions in named generators, and their
//! evaluation into an algebra.

use std::borrow::Cow;
use std::fmt;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::pbw::{Algebra, Element};
use crate::series::{BiPoly, Var};

/// A named coefficient. Level 0 is allowed here; what it means (a Kronecker
/// delta, 1, or 0) is up to the evaluator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    T { i: i8, j: i8, r: u32 },
    S { i: i8, j: i8, r: u32 },
    D { i: i8, j: i8, r: u32 },
    Dt { i: i8, j: i8, r: u32 },
    E { i: i8, r: u32 },
    F { i: i8, r: u32 },
    G { r: u32 },
    Gt { r: u32 },
}

impl Sym {
    pub fn level(&self) -> u32 {
        match *self {
            Sym::T { r, .. }
            | Sym::S { r, .. }
            | Sym::D { r, .. }
            | Sym::Dt { r, .. }
            | Sym::E { r, .. }
            | Sym::F { r, .. }
            | Sym::G { r }
            | Sym::Gt { r } => r,
        }
    }

    /// The same family and indices at another level.
    pub fn at(&self, r: u32) -> Sym {
        match *self {
            Sym::T { i, j, .. } => Sym::T { i, j, r },
            Sym::S { i, j, .. } => Sym::S { i, j, r },
            Sym::D { i, j, .. } => Sym::D { i, j, r },
            Sym::Dt { i, j, .. } => Sym::Dt { i, j, r },
            Sym::E { i, .. } => Sym::E { i, r },
            Sym::F { i, .. } => Sym::F { i, r },
            Sym::G { .. } => Sym::G { r },
            Sym::Gt { .. } => Sym::Gt { r },
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Sym::T { i, j, r } => write!(f, "T[{i},{j}]({r})"),
            Sym::S { i, j, r } => write!(f, "S[{i},{j}]({r})"),
            Sym::D { i, j, r } => write!(f, "D[{i},{j}]({r})"),
            Sym::Dt { i, j, r } => write!(f, "Dt[{i},{j}]({r})"),
            Sym::E { i, r } => write!(f, "E[{i}]({r})"),
            Sym::F { i, r } => write!(f, "F[{i}]({r})"),
            Sym::G { r } => write!(f, "G({r})"),
            Sym::Gt { r } => write!(f, "Gt({r})"),
        }
    }
}

pub type Word = Vec<Sym>;

/// A linear combination of words, kept in insertion order with like terms
/// combined and zero terms removed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expr {
    terms: IndexMap<Word, Rational>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn scalar(c: Rational) -> Self {
        let mut e = Expr::zero();
        e.add(c, vec![]);
        e
    }

    pub fn word(w: Word) -> Self {
        let mut e = Expr::zero();
        e.add(Rational::one(), w);
        e
    }

    pub fn sym(s: Sym) -> Self {
        Self::word(vec![s])
    }

    pub fn add(&mut self, c: Rational, w: Word) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_index_of(&w) {
            Some(idx) => {
                let v = &mut self.terms[idx];
                *v += &c;
                if v.is_zero() {
                    // Keeps the insertion order of the survivors.
                    self.terms.shift_remove_index(idx);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_int(&mut self, c: i64, w: Word) {
        self.add(Rational::from_int(c), w);
    }

    pub fn add_expr(&mut self, other: &Expr, c: &Rational) {
        for (w, v) in &other.terms {
            self.add(v * c, w.clone());
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        let mut e = self.clone();
        e.add_expr(other, &Rational::from_int(-1));
        e
    }

    /// Concatenation product.
    pub fn mul(&self, other: &Expr) -> Expr {
        let mut e = Expr::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                e.add(c1 * c2, w);
            }
        }
        e
    }

    /// `a b - b a` for single symbols.
    pub fn commutator(a: Sym, b: Sym) -> Expr {
        let mut e = Expr::zero();
        e.add_int(1, vec![a, b]);
        e.add_int(-1, vec![b, a]);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    /// Removes the most recently inserted term.
    pub fn drop_last(&mut self) -> bool {
        self.terms.pop().is_some()
    }

    pub fn map_syms(&self, f: impl Fn(Sym) -> Sym) -> Expr {
        let mut e = Expr::zero();
        for (w, c) in &self.terms {
            e.add(c.clone(), w.iter().map(|&s| f(s)).collect());
        }
        e
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for s in w {
                write!(f, "*{s}")?;
            }
        }
        Ok(())
    }
}

/// `lhs = rhs`, with the sides kept apart so a single term can be dropped
/// for negative controls.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Relation {
    pub fn new(lhs: Expr, rhs: Expr) -> Self {
        Relation { lhs, rhs }
    }

    pub fn residual(&self) -> Expr {
        self.lhs.sub(&self.rhs)
    }

    /// Drops the last right-hand term, or the last left-hand term when the
    /// right side is empty.
    pub fn mutated(&self) -> Relation {
        let mut r = self.clone();
        if !r.rhs.drop_last() {
            r.lhs.drop_last();
        }
        r
    }
}

/// The antiautomorphism `S_{i,j}^{(r)} -> S_{-j,-i}^{(r)}` on words in S.
pub fn tau(expr: &Expr) -> Result<Expr> {
    let mut out = Expr::zero();
    for (w, c) in expr.iter() {
        let mut nw = Vec::with_capacity(w.len());
        for s in w.iter().rev() {
            match *s {
                Sym::S { i, j, r } => nw.push(Sym::S { i: -j, j: -i, r }),
                other => {
                    return Err(Error::Unevaluable(format!(
                        "tau is defined on S-words only, got {other}"
                    )))
                }
            }
        }
        out.add(c.clone(), nw);
    }
    Ok(out)
}

/// Assigns an algebra element to each symbol.
pub trait SymEval: Sync {
    fn algebra(&self) -> &Algebra;

    fn eval(&self, s: &Sym) -> Result<Cow<'_, Element>>;
}

impl<T: SymEval + ?Sized> SymEval for &T {
    fn algebra(&self) -> &Algebra {
        (**self).algebra()
    }

    fn eval(&self, s: &Sym) -> Result<Cow<'_, Element>> {
        (**self).eval(s)
    }
}

/// Evaluates `expr`, factoring out common leading symbols so each distinct
/// prefix is multiplied once.
pub fn evaluate(expr: &Expr, ev: &dyn SymEval) -> Result<Element> {
    let mut items: Vec<(&[Sym], &Rational)> = expr.iter().map(|(w, c)| (w.as_slice(), c)).collect();
    items.sort_by(|a, b| a.0.cmp(b.0));
    eval_sorted(&items, ev)
}

fn eval_sorted(items: &[(&[Sym], &Rational)], ev: &dyn SymEval) -> Result<Element> {
    let mut acc = Element::zero();
    let mut i = 0;
    while i < items.len() && items[i].0.is_empty() {
        acc.add_assign(&Element::scalar(items[i].1.clone()));
        i += 1;
    }
    while i < items.len() {
        let head = items[i].0[0];
        let mut j = i;
        let mut tails = Vec::new();
        while j < items.len() && items[j].0[0] == head {
            tails.push((&items[j].0[1..], items[j].1));
            j += 1;
        }
        let h = ev.eval(&head)?;
        if !h.is_zero() {
            let rest = eval_sorted(&tails, ev)?;
            if !rest.is_zero() {
                acc.add_assign(&ev.algebra().multiply(&h, &rest));
            }
        }
        i = j;
    }
    Ok(acc)
}

/// `poly(u, v) * X_1(w_1) X_2(w_2) ...` with each `X_k` a symbol family in
/// one of the variables, unsubstituted.
#[derive(Clone, Debug)]
pub struct FormalTerm {
    pub poly: BiPoly,
    pub factors: Vec<(Sym, Var)>,
}

impl FormalTerm {
    pub fn new(poly: BiPoly, factors: Vec<(Sym, Var)>) -> Self {
        FormalTerm { poly, factors }
    }
}

/// The coefficient of `u^{-a} v^{-b}` of a sum of formal terms, as an
/// expression in symbol coefficients.
pub fn formal_cell(terms: &[FormalTerm], a: i64, b: i64) -> Expr {
    let mut out = Expr::zero();
    for t in terms {
        for (al, be, c) in t.poly.terms() {
            let (ka, kb) = (a + al as i64, b + be as i64);
            if ka < 0 || kb < 0 {
                continue;
            }
            for levels in distribute(&t.factors, ka as u32, kb as u32) {
                let w = t
                    .factors
                    .iter()
                    .zip(&levels)
                    .map(|((s, _), &l)| s.at(l))
                    .collect();
                out.add(c.clone(), w);
            }
        }
    }
    out
}

/// All level assignments whose U-levels sum to `a` and V-levels to `b`.
fn distribute(factors: &[(Sym, Var)], a: u32, b: u32) -> Vec<Vec<u32>> {
    fn go(f: &[(Sym, Var)], a: u32, b: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some(((_, var), rest)) = f.split_first() else {
            if a == 0 && b == 0 {
                out.push(cur.clone());
            }
            return;
        };
        let budget = if *var == Var::U { a } else { b };
        let last_of_kind = !rest.iter().any(|(_, v)| v == var);
        let range: Vec<u32> = if last_of_kind {
            vec![budget]
        } else {
            (0..=budget).collect()
        };
        for l in range {
            cur.push(l);
            let (na, nb) = if *var == Var::U {
                (a - l, b)
            } else {
                (a, b - l)
            };
            go(rest, na, nb, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(factors, a, b, &mut Vec::new(), &mut out);
    out
}

/// The formal two-variable relation
/// `(u^2 - v^2)[S_ij(u), S_kl(v)] = (u+v)(S_kj(u)S_il(v) - S_kj(v)S_il(u))
///   - (u-v)(S_{i,-k}(u)S_{-j,l}(v) - S_{k,-i}(v)S_{-l,j}(u))
///   + S_{k,-i}(u)S_{-j,l}(v) - S_{k,-i}(v)S_{-j,l}(u)`
///
/// in any symbol family with the same index pattern (S or D).
pub fn ss_formal(
    family: fn(i8, i8) -> Sym,
    i: i8,
    j: i8,
    k: i8,
    l: i8,
) -> (Vec<FormalTerm>, Vec<FormalTerm>) {
    use Var::{U, V};
    let u2v2 = BiPoly::linear(1, -1, 0).mul(&BiPoly::linear(1, 1, 0));
    let neg = |p: &BiPoly| p.scale(&Rational::from_int(-1));
    let upv = BiPoly::linear(1, 1, 0);
    let umv = BiPoly::linear(1, -1, 0);
    let one = BiPoly::one();
    let x = family;
    let lhs = vec![
        FormalTerm::new(u2v2.clone(), vec![(x(i, j), U), (x(k, l), V)]),
        FormalTerm::new(neg(&u2v2), vec![(x(k, l), V), (x(i, j), U)]),
    ];
    let rhs = vec![
        FormalTerm::new(upv.clone(), vec![(x(k, j), U), (x(i, l), V)]),
        FormalTerm::new(neg(&upv), vec![(x(k, j), V), (x(i, l), U)]),
        FormalTerm::new(neg(&umv), vec![(x(i, -k), U), (x(-j, l), V)]),
        FormalTerm::new(umv, vec![(x(k, -i), V), (x(-l, j), U)]),
        FormalTerm::new(one.clone(), vec![(x(k, -i), U), (x(-j, l), V)]),
        FormalTerm::new(neg(&one), vec![(x(k, -i), V), (x(-j, l), U)]),
    ];
    (lhs, rhs)
}

pub fn s_family(i: i8, j: i8) -> Sym {
    Sym::S { i, j, r: 0 }
}

pub fn d_family(i: i8, j: i8) -> Sym {
    Sym::D { i, j, r: 0 }
}

/// The coefficient relation of the formal S-relation at cell `(a, b)`.
pub fn ss_cell(i: i8, j: i8, k: i8, l: i8, a: i64, b: i64) -> Relation {
    let (lhs, rhs) = ss_formal(s_family, i, j, k, l);
    Relation::new(formal_cell(&lhs, a, b), formal_cell(&rhs, a, b))
}
