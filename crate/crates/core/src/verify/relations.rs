//! Coefficient relations among the Drinfeld generators, written out with the
//! summation over `a in {-1, 1}` expanded by hand.

use crate::exact::Rational;
use crate::twisted::{Expr, Relation, Sym, PM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelFamily {
    /// Level-zero constants.
    OD1,
    /// `D` and `Dt` are mutually inverse.
    OD2,
    GG,
    ODD,
    /// The symmetry of `D`, in two variants.
    ODs,
    FEs,
    EFs,
    DE,
    DF,
    GE,
    GF,
    EF,
    EE,
    FF,
}

impl RelFamily {
    pub const ALL: [RelFamily; 14] = [
        RelFamily::OD1,
        RelFamily::OD2,
        RelFamily::GG,
        RelFamily::ODD,
        RelFamily::ODs,
        RelFamily::FEs,
        RelFamily::EFs,
        RelFamily::DE,
        RelFamily::DF,
        RelFamily::GE,
        RelFamily::GF,
        RelFamily::EF,
        RelFamily::EE,
        RelFamily::FF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelFamily::OD1 => "oD1",
            RelFamily::OD2 => "oD2",
            RelFamily::GG => "GG",
            RelFamily::ODD => "oDD",
            RelFamily::ODs => "oDs",
            RelFamily::FEs => "FEs",
            RelFamily::EFs => "EFs",
            RelFamily::DE => "DEreln",
            RelFamily::DF => "DFreln",
            RelFamily::GE => "GEreln",
            RelFamily::GF => "GFreln",
            RelFamily::EF => "EFreln",
            RelFamily::EE => "EEreln",
            RelFamily::FF => "FFreln",
        }
    }
}

/// One relation instance: family, optional variant tag, printable key.
#[derive(Clone, Debug)]
pub struct RelInstance {
    pub family: RelFamily,
    pub variant: Option<&'static str>,
    pub key: String,
    pub relation: Relation,
}

fn d(i: i8, j: i8, r: u32) -> Sym {
    Sym::D { i, j, r }
}
fn dt(i: i8, j: i8, r: u32) -> Sym {
    Sym::Dt { i, j, r }
}
fn e(i: i8, r: u32) -> Sym {
    Sym::E { i, r }
}
fn f(i: i8, r: u32) -> Sym {
    Sym::F { i, r }
}
fn g(r: u32) -> Sym {
    Sym::G { r }
}

fn int(c: i64) -> Rational {
    Rational::from_int(c)
}

fn delta(a: i8, b: i8) -> bool {
    a == b
}

/// `(-2)^s (-1)^{r-s} binom(r, s)`.
fn coef(r: u32, s: u32) -> Rational {
    &(&int(-2).pow(s) * &Rational::sign_pow((r - s) as i64))
        * &Rational::binomial(r as i64, s as i64)
}

/// Replaces level-zero symbols by their values: `D^{(0)}`, `Dt^{(0)}` by
/// Kronecker deltas, `G^{(0)}`, `Gt^{(0)}` by 1, and drops words containing
/// `E^{(0)}` or `F^{(0)}`.
pub fn resolve_level_zero(expr: &Expr) -> Expr {
    let mut out = Expr::zero();
    'words: for (w, c) in expr.iter() {
        let mut nw = Vec::with_capacity(w.len());
        for s in w {
            match *s {
                Sym::D { i, j, r: 0 }
                | Sym::Dt { i, j, r: 0 }
                | Sym::S { i, j, r: 0 }
                | Sym::T { i, j, r: 0 } => {
                    if i != j {
                        continue 'words;
                    }
                }
                Sym::G { r: 0 } | Sym::Gt { r: 0 } => {}
                Sym::E { r: 0, .. } | Sym::F { r: 0, .. } => continue 'words,
                other => nw.push(other),
            }
        }
        out.add(c.clone(), nw);
    }
    out
}

fn resolved(lhs: Expr, rhs: Expr) -> Relation {
    Relation::new(resolve_level_zero(&lhs), resolve_level_zero(&rhs))
}

pub fn od2(i: i8, j: i8, n: u32, dt_first: bool) -> Relation {
    let mut lhs = Expr::zero();
    for r in 0..=n {
        for a in PM {
            let w = if dt_first {
                vec![dt(i, a, r), d(a, j, n - r)]
            } else {
                vec![d(i, a, r), dt(a, j, n - r)]
            };
            lhs.add_int(1, w);
        }
    }
    let rhs = if n == 0 && i == j {
        Expr::scalar(Rational::one())
    } else {
        Expr::zero()
    };
    resolved(lhs, rhs)
}

pub fn gg(m: u32, n: u32) -> Relation {
    Relation::new(Expr::commutator(g(m), g(n)), Expr::zero())
}

pub fn odd(i: i8, j: i8, k: i8, l: i8, m: u32, n: u32) -> Relation {
    let mut rhs = Expr::zero();
    for r in 0..m {
        rhs.add_int(1, vec![d(k, j, m - 1 - r), d(i, l, n + r)]);
        rhs.add_int(-1, vec![d(k, j, n + r), d(i, l, m - 1 - r)]);
    }
    for r in 0..m {
        let s = -Rational::sign_pow(r as i64);
        rhs.add(s.clone(), vec![d(i, -k, m - 1 - r), d(-j, l, n + r)]);
        rhs.add(-s, vec![d(k, -i, n + r), d(-l, j, m - 1 - r)]);
    }
    for r in 0..(m / 2) {
        rhs.add_int(1, vec![d(k, -i, m - 2 - 2 * r), d(-j, l, n + 2 * r)]);
        rhs.add_int(-1, vec![d(k, -i, n + 2 * r), d(-j, l, m - 2 - 2 * r)]);
    }
    resolved(Expr::commutator(d(i, j, m), d(k, l, n)), rhs)
}

/// The symmetry of `D` at level `n >= 1`. `printed` takes the constant
/// `(1 - (-1)^n)/2` on `D_{-j,-i}^{(n-1)}`; otherwise the form read off
/// from `S^T(-u) = S(u) + (S(u) - S(-u))/(2u)`:
/// `D_{i,j}^{(n)} = (-1)^n D_{-j,-i}^{(n)} - (1 + (-1)^n)/2 D_{i,j}^{(n-1)}`.
pub fn ods(i: i8, j: i8, n: u32, printed: bool) -> Relation {
    let sign = Rational::sign_pow(n as i64);
    let half = Rational::new(1, 2);
    let mut rhs = Expr::zero();
    rhs.add(sign.clone(), vec![d(-j, -i, n)]);
    if printed {
        rhs.add(half.clone(), vec![d(-j, -i, n - 1)]);
        rhs.add(-(&half * &sign), vec![d(-j, -i, n - 1)]);
    } else {
        rhs.add(-(&half * &(&Rational::one() + &sign)), vec![d(i, j, n - 1)]);
    }
    resolved(Expr::sym(d(i, j, n)), rhs)
}

/// `X_i^{(m)} = (-1)^m sum_r 2^{m-r} binom(m-1, m-r) Y_{-i}^{(r)}`; `e_to_f`
/// selects `X = E, Y = F`.
pub fn flip(i: i8, m: u32, e_to_f: bool) -> Relation {
    type Ctor = fn(i8, u32) -> Sym;
    let (x, y): (Ctor, Ctor) = if e_to_f { (e, f) } else { (f, e) };
    let mut rhs = Expr::zero();
    for r in 1..=m {
        let c = &(&Rational::sign_pow(m as i64) * &int(2).pow(m - r))
            * &Rational::binomial((m - 1) as i64, (m - r) as i64);
        rhs.add(c, vec![y(-i, r)]);
    }
    resolved(Expr::sym(x(i, m)), rhs)
}

pub fn de(i: i8, j: i8, k: i8, m: u32, n: u32) -> Relation {
    let mut rhs = Expr::zero();
    if delta(j, k) {
        for r in 0..m {
            for a in PM {
                rhs.add_int(1, vec![d(i, a, r), e(a, m + n - 1 - r)]);
            }
        }
    }
    if delta(i, -k) {
        for r in 0..m {
            for s in 0..=r {
                for a in PM {
                    rhs.add(-coef(r, s), vec![e(-a, n + r - s), d(a, j, m - 1 - r)]);
                }
            }
        }
    }
    resolved(Expr::commutator(d(i, j, m), e(k, n)), rhs)
}

pub fn df(i: i8, j: i8, k: i8, m: u32, n: u32) -> Relation {
    let mut rhs = Expr::zero();
    if delta(i, k) {
        for r in 0..m {
            for a in PM {
                rhs.add_int(-1, vec![f(a, m + n - 1 - r), d(a, j, r)]);
            }
        }
    }
    if delta(j, -k) {
        for r in 0..m {
            for s in 0..=r {
                for a in PM {
                    rhs.add(coef(r, s), vec![d(i, a, m - 1 - r), f(-a, n + r - s)]);
                }
            }
        }
    }
    resolved(Expr::commutator(d(i, j, m), f(k, n)), rhs)
}

pub fn ge(i: i8, m: u32, n: u32) -> Relation {
    let mut rhs = Expr::zero();
    for r in 0..m {
        rhs.add_int(-1, vec![g(r), e(i, m + n - 1 - r)]);
    }
    for r in 0..m {
        for s in 0..=r {
            rhs.add(coef(r, s), vec![e(i, n + r - s), g(m - 1 - r)]);
        }
    }
    resolved(Expr::commutator(g(m), e(i, n)), rhs)
}

pub fn gf(i: i8, m: u32, n: u32) -> Relation {
    let mut rhs = Expr::zero();
    for r in 0..m {
        rhs.add_int(1, vec![f(i, m + n - 1 - r), g(r)]);
    }
    for r in 0..m {
        for s in 0..=r {
            rhs.add(-coef(r, s), vec![g(m - 1 - r), f(i, n + r - s)]);
        }
    }
    resolved(Expr::commutator(g(m), f(i, n)), rhs)
}

pub fn ef(i: i8, j: i8, m: u32, n: u32) -> Relation {
    let mut rhs = Expr::zero();
    for r in 0..m + n {
        rhs.add_int(-1, vec![g(r), dt(i, j, n + m - 1 - r)]);
    }
    for r in 0..m {
        for s in 0..=r {
            let c = -coef(r, s);
            rhs.add(c.clone(), vec![e(i, m - r - 1), f(j, n + r - s)]);
            rhs.add(c, vec![f(-i, n + r - s), e(-j, m - r - 1)]);
        }
    }
    for r in 0..m {
        let c = coef(m - 1, r);
        for s in 0..=(m + n - 1 - r) {
            rhs.add(c.clone(), vec![f(-i, s), f(j, m + n - 1 - r - s)]);
        }
    }
    resolved(Expr::commutator(e(i, m), f(j, n)), rhs)
}

pub fn ee(i: i8, j: i8, m: u32, n: u32) -> Relation {
    let mut rhs = Expr::zero();
    for r in 0..n {
        rhs.add_int(1, vec![e(j, m + n - 1 - r), e(i, r)]);
    }
    for r in 0..m {
        rhs.add_int(-1, vec![e(j, m + n - 1 - r), e(i, r)]);
    }
    for r in 0..m {
        let c = -coef(m - 1, r);
        for s in 0..=(m + n - 1 - r) {
            rhs.add(c.clone(), vec![dt(j, -i, s), g(m + n - 1 - r - s)]);
        }
    }
    resolved(Expr::commutator(e(i, m), e(j, n)), rhs)
}

pub fn ff(i: i8, j: i8, m: u32, n: u32) -> Relation {
    let mut rhs = Expr::zero();
    for r in 0..m {
        rhs.add_int(1, vec![f(j, r), f(i, m + n - 1 - r)]);
    }
    for r in 0..n {
        rhs.add_int(-1, vec![f(j, r), f(i, m + n - 1 - r)]);
    }
    for r in 0..n {
        let c = -coef(n - 1, r);
        for s in 0..=(m + n - 1 - r) {
            rhs.add(c.clone(), vec![dt(-j, i, s), g(m + n - 1 - r - s)]);
        }
    }
    resolved(Expr::commutator(f(i, m), f(j, n)), rhs)
}

fn level_pairs(order: usize) -> impl Iterator<Item = (u32, u32)> {
    let n = order as u32;
    (1..n).flat_map(move |m| (1..=n - m).map(move |k| (m, k)))
}

fn inst(family: RelFamily, key: String, relation: Relation) -> RelInstance {
    RelInstance {
        family,
        variant: None,
        key,
        relation,
    }
}

/// Every instance of `family` whose levels fit in tables of `order`:
/// single-level relations up to `order`, commutator relations at
/// `m, n >= 1` with `m + n <= order`.
pub fn instances(family: RelFamily, order: usize) -> Vec<RelInstance> {
    let top = order as u32;
    let mut out = Vec::new();
    match family {
        RelFamily::OD1 => {
            for i in PM {
                for j in PM {
                    let dl = if i == j {
                        Expr::scalar(Rational::one())
                    } else {
                        Expr::zero()
                    };
                    out.push(inst(
                        family,
                        format!("D[{i},{j}]"),
                        Relation::new(Expr::sym(d(i, j, 0)), dl.clone()),
                    ));
                    out.push(inst(
                        family,
                        format!("Dt[{i},{j}]"),
                        Relation::new(Expr::sym(dt(i, j, 0)), dl),
                    ));
                }
            }
            out.push(inst(
                family,
                "G".into(),
                Relation::new(Expr::sym(g(0)), Expr::scalar(Rational::one())),
            ));
            for i in PM {
                out.push(inst(
                    family,
                    format!("E[{i}]"),
                    Relation::new(Expr::sym(e(i, 0)), Expr::zero()),
                ));
                out.push(inst(
                    family,
                    format!("F[{i}]"),
                    Relation::new(Expr::sym(f(i, 0)), Expr::zero()),
                ));
            }
        }
        RelFamily::OD2 => {
            for n in 0..=top {
                for i in PM {
                    for j in PM {
                        out.push(inst(
                            family,
                            format!("[i={i},j={j};n={n};D.Dt]"),
                            od2(i, j, n, false),
                        ));
                        out.push(inst(
                            family,
                            format!("[i={i},j={j};n={n};Dt.D]"),
                            od2(i, j, n, true),
                        ));
                    }
                }
            }
        }
        RelFamily::GG => {
            for (m, n) in level_pairs(order) {
                out.push(inst(family, format!("[m={m},n={n}]"), gg(m, n)));
            }
        }
        RelFamily::ODD => {
            for (m, n) in level_pairs(order) {
                for i in PM {
                    for j in PM {
                        for k in PM {
                            for l in PM {
                                out.push(inst(
                                    family,
                                    format!("[i={i},j={j},k={k},l={l};m={m},n={n}]"),
                                    odd(i, j, k, l, m, n),
                                ));
                            }
                        }
                    }
                }
            }
        }
        RelFamily::ODs => {
            for n in 1..=top {
                for i in PM {
                    for j in PM {
                        for (variant, printed) in [("printed", true), ("derived", false)] {
                            out.push(RelInstance {
                                family,
                                variant: Some(variant),
                                key: format!("[i={i},j={j};n={n}]"),
                                relation: ods(i, j, n, printed),
                            });
                        }
                    }
                }
            }
        }
        RelFamily::FEs | RelFamily::EFs => {
            for m in 1..=top {
                for i in PM {
                    out.push(inst(
                        family,
                        format!("[i={i};m={m}]"),
                        flip(i, m, family == RelFamily::EFs),
                    ));
                }
            }
        }
        RelFamily::DE | RelFamily::DF => {
            for (m, n) in level_pairs(order) {
                for i in PM {
                    for j in PM {
                        for k in PM {
                            let rel = if family == RelFamily::DE {
                                de(i, j, k, m, n)
                            } else {
                                df(i, j, k, m, n)
                            };
                            out.push(inst(
                                family,
                                format!("[i={i},j={j},k={k};m={m},n={n}]"),
                                rel,
                            ));
                        }
                    }
                }
            }
        }
        RelFamily::GE | RelFamily::GF => {
            for (m, n) in level_pairs(order) {
                for i in PM {
                    let rel = if family == RelFamily::GE {
                        ge(i, m, n)
                    } else {
                        gf(i, m, n)
                    };
                    out.push(inst(family, format!("[i={i};m={m},n={n}]"), rel));
                }
            }
        }
        RelFamily::EF | RelFamily::EE | RelFamily::FF => {
            for (m, n) in level_pairs(order) {
                for i in PM {
                    for j in PM {
                        let rel = match family {
                            RelFamily::EF => ef(i, j, m, n),
                            RelFamily::EE => ee(i, j, m, n),
                            _ => ff(i, j, m, n),
                        };
                        out.push(inst(family, format!("[i={i},j={j};m={m},n={n}]"), rel));
                    }
                }
            }
        }
    }
    out
}

/// The relations whose every symbol lies in the generating set of the
/// `k`-shifted subalgebra, at levels up to `order`.
pub fn shifted_instances(order: usize, k: u32) -> Vec<RelInstance> {
    let mut out: Vec<RelInstance> = instances(RelFamily::OD1, order)
        .into_iter()
        .filter(|r| r.key.starts_with('D') || r.key == "G")
        .collect();
    out.extend(instances(RelFamily::OD2, order));
    out.extend(instances(RelFamily::GG, order));
    out.extend(instances(RelFamily::ODD, order));
    let above = |r: &RelInstance| {
        r.relation
            .lhs
            .iter()
            .chain(r.relation.rhs.iter())
            .all(|(w, _)| {
                w.iter().all(|s| {
                    !matches!(s, Sym::E { r, .. } if *r <= k) && !matches!(s, Sym::F { .. })
                })
            })
    };
    for fam in [RelFamily::DE, RelFamily::GE, RelFamily::EE] {
        out.extend(instances(fam, order).into_iter().filter(above));
    }
    out
}
