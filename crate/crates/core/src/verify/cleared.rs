//! Two-variable series identities among the Drinfeld generating series,
//! multiplied through by all denominators.

use std::sync::Arc;

use super::{Check, VerifyParams};
use crate::error::Result;
use crate::exact::Rational;
use crate::series::{BiPoly, ClearedIdentity, ClearedTerm, ElementSeries, SeriesFactor};
use crate::twisted::expr::{d_family, ss_formal, FormalTerm};
use crate::twisted::{Sym, Tables, PM};

pub const CLEARED_ITEMS: [&str; 11] = [
    "item1", "item2", "item3", "item4", "item5", "item6", "item7", "item8", "item9", "item10",
    "item11",
];

pub(crate) fn formal_to_cleared(tables: &Tables, terms: &[FormalTerm]) -> Result<Vec<ClearedTerm>> {
    terms
        .iter()
        .map(|t| {
            let factors = t
                .factors
                .iter()
                .map(|(s, var)| {
                    Ok(SeriesFactor {
                        series: tables.series_of(s)?.clone(),
                        var: *var,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ClearedTerm::new(t.poly.clone(), factors))
        })
        .collect()
}

/// Residual size of a cleared identity; a mutation drops the last
/// right-hand term (or the last left-hand one if the right side is empty).
pub(crate) fn cleared_residual(
    tables: &Tables,
    id: &ClearedIdentity,
    mutated: bool,
) -> Result<usize> {
    let mut id = id.clone();
    if mutated && id.rhs.pop().is_none() {
        id.lhs.pop();
    }
    Ok(id.check(tables.order(), tables.algebra())?.residual_terms)
}

/// A sum of products of factor sums: `poly * prod_k (sum_l c_kl X_kl)`.
struct Builder {
    terms: Vec<ClearedTerm>,
}

type Sum = Vec<(i64, SeriesFactor)>;

impl Builder {
    fn new() -> Self {
        Builder { terms: Vec::new() }
    }

    fn push(&mut self, poly: BiPoly, parts: &[Sum]) {
        let mut acc: Vec<(i64, Vec<SeriesFactor>)> = vec![(1, Vec::new())];
        for part in parts {
            let mut next = Vec::new();
            for (c, fs) in &acc {
                for (c2, f) in part {
                    let mut fs = fs.clone();
                    fs.push(f.clone());
                    next.push((c * c2, fs));
                }
            }
            acc = next;
        }
        for (c, fs) in acc {
            self.terms
                .push(ClearedTerm::new(poly.scale(&Rational::from_int(c)), fs));
        }
    }

    fn done(self) -> Vec<ClearedTerm> {
        self.terms
    }
}

struct Series<'a>(&'a Tables);

impl Series<'_> {
    fn get(&self, s: Sym) -> Arc<ElementSeries> {
        self.0
            .series_of(&s)
            .expect("Drinfeld symbols are tabulated")
            .clone()
    }

    fn u(&self, s: Sym) -> SeriesFactor {
        SeriesFactor::u(&self.get(s))
    }

    fn v(&self, s: Sym) -> SeriesFactor {
        SeriesFactor::v(&self.get(s))
    }

    /// `X(sign * u + shift)` as a factor in `u`.
    fn sub(&self, s: Sym, sign: i8, shift: i64) -> SeriesFactor {
        SeriesFactor::u(&Arc::new(
            self.get(s)
                .substitute_linear(sign, &Rational::from_int(shift)),
        ))
    }
}

fn one(f: SeriesFactor) -> Sum {
    vec![(1, f)]
}

fn diff(a: SeriesFactor, b: SeriesFactor) -> Sum {
    vec![(1, a), (-1, b)]
}

fn lin(cu: i64, cv: i64, c0: i64) -> BiPoly {
    BiPoly::linear(cu, cv, c0)
}

fn neg(p: &BiPoly) -> BiPoly {
    p.scale(&Rational::from_int(-1))
}

fn d(i: i8, j: i8) -> Sym {
    Sym::D { i, j, r: 0 }
}
fn dt(i: i8, j: i8) -> Sym {
    Sym::Dt { i, j, r: 0 }
}
fn e(i: i8) -> Sym {
    Sym::E { i, r: 0 }
}
fn f(i: i8) -> Sym {
    Sym::F { i, r: 0 }
}
const G: Sym = Sym::G { r: 0 };

/// `P [X(u), Y(v)]` as left-hand terms.
fn commutator(b: &mut Builder, p: &BiPoly, x: SeriesFactor, y: SeriesFactor) {
    b.push(p.clone(), &[one(x.clone()), one(y.clone())]);
    b.push(neg(p), &[one(y), one(x)]);
}

/// `(u - v)(u + v + 2)`.
fn p_two() -> BiPoly {
    lin(1, -1, 0).mul(&lin(1, 1, 2))
}

/// `(u - v)(u - v - 1)(u + v + 2)(2v + 3)`.
fn p_four() -> BiPoly {
    BiPoly::product(&[lin(1, -1, 0), lin(1, -1, -1), lin(1, 1, 2), lin(0, 2, 3)])
}

fn item2(t: &Tables, i: i8, j: i8, k: i8) -> ClearedIdentity {
    let s = Series(t);
    let mut l = Builder::new();
    commutator(&mut l, &p_two(), s.u(d(i, j)), s.v(e(k)));
    let mut r = Builder::new();
    for a in PM {
        if j == k {
            r.push(
                lin(1, 1, 2),
                &[one(s.u(d(i, a))), diff(s.v(e(a)), s.u(e(a)))],
            );
        }
        if i == -k {
            r.push(
                lin(1, -1, 0),
                &[diff(s.u(f(a)), s.v(e(-a))), one(s.u(d(a, j)))],
            );
        }
    }
    ClearedIdentity {
        lhs: l.done(),
        rhs: r.done(),
    }
}

fn item3(t: &Tables, i: i8, j: i8, k: i8) -> ClearedIdentity {
    let s = Series(t);
    let mut l = Builder::new();
    commutator(&mut l, &p_two(), s.u(d(i, j)), s.v(f(k)));
    let mut r = Builder::new();
    for a in PM {
        if i == k {
            r.push(
                neg(&lin(1, 1, 2)),
                &[diff(s.v(f(a)), s.u(f(a))), one(s.u(d(a, j)))],
            );
        }
        if j == -k {
            r.push(
                neg(&lin(1, -1, 0)),
                &[one(s.u(d(i, a))), diff(s.u(e(a)), s.v(f(-a)))],
            );
        }
    }
    ClearedIdentity {
        lhs: l.done(),
        rhs: r.done(),
    }
}

fn item4(t: &Tables, i: i8) -> ClearedIdentity {
    let s = Series(t);
    let mut l = Builder::new();
    commutator(&mut l, &p_two(), s.u(G), s.v(e(i)));
    let mut r = Builder::new();
    r.push(lin(1, 1, 2), &[one(s.u(G)), diff(s.u(e(i)), s.v(e(i)))]);
    r.push(lin(1, -1, 0), &[diff(s.v(e(i)), s.u(f(-i))), one(s.u(G))]);
    ClearedIdentity {
        lhs: l.done(),
        rhs: r.done(),
    }
}

fn item5(t: &Tables, i: i8) -> ClearedIdentity {
    let s = Series(t);
    let mut l = Builder::new();
    commutator(&mut l, &p_two(), s.u(f(i)), s.v(G));
    let mut r = Builder::new();
    r.push(lin(1, 1, 2), &[diff(s.u(f(i)), s.v(f(i))), one(s.v(G))]);
    r.push(lin(1, -1, 0), &[one(s.v(G)), diff(s.u(f(i)), s.v(e(-i)))]);
    ClearedIdentity {
        lhs: l.done(),
        rhs: r.done(),
    }
}

fn item6(t: &Tables, i: i8, j: i8) -> ClearedIdentity {
    let s = Series(t);
    let mut l = Builder::new();
    commutator(&mut l, &p_two(), s.u(e(i)), s.v(f(j)));
    let mut r = Builder::new();
    r.push(lin(1, 1, 2), &[one(s.u(dt(i, j))), one(s.u(G))]);
    r.push(neg(&lin(1, 1, 2)), &[one(s.v(G)), one(s.v(dt(i, j)))]);
    r.push(
        lin(1, -1, 0),
        &[diff(s.u(e(i)), s.v(f(-i))), diff(s.u(e(-j)), s.v(f(j)))],
    );
    ClearedIdentity {
        lhs: l.done(),
        rhs: r.done(),
    }
}

/// Items 7 and 8 share their shape; `x` is `E` for item 7 and `F` for item 8,
/// where the roles of the indices and the overall sign change. As printed,
/// the `D~(u) G(u)` term carries the indices of the `D~(v) G(v)` term after
/// it; `corrected` gives it those of the term after that. The two agree
/// when `i = j`.
fn item78(t: &Tables, i: i8, j: i8, is_e: bool, corrected: bool) -> ClearedIdentity {
    let s = Series(t);
    let umv = lin(1, -1, 0);
    let umv1 = lin(1, -1, -1);
    let upv2 = lin(1, 1, 2);
    let v23 = lin(0, 2, 3);
    let mut l = Builder::new();
    let (sg, x, p, q, first) = if is_e {
        (1, e as fn(i8) -> Sym, dt(j, -i), dt(i, -j), (i, j))
    } else {
        (-1, f as fn(i8) -> Sym, dt(-i, j), dt(-j, i), (j, i))
    };
    commutator(&mut l, &p_four(), s.u(x(i)), s.v(x(j)));
    let sc = |b: BiPoly| b.scale(&Rational::from_int(sg));
    let mut r = Builder::new();
    r.push(
        sc(BiPoly::product(&[umv1.clone(), upv2.clone(), v23.clone()])),
        &[
            diff(s.u(x(first.0)), s.v(x(first.0))),
            diff(s.u(x(first.1)), s.v(x(first.1))),
        ],
    );
    r.push(
        sc(BiPoly::product(&[umv.clone(), umv1, v23.clone()])),
        &[one(s.u(if corrected { q } else { p })), one(s.u(G))],
    );
    r.push(
        sc(neg(&BiPoly::product(&[
            umv.clone(),
            umv.clone(),
            v23.clone(),
        ]))),
        &[one(s.v(p)), one(s.v(G))],
    );
    r.push(sc(umv.mul(&v23)), &[one(s.v(q)), one(s.v(G))]);
    r.push(
        sc(neg(&umv.mul(&upv2))),
        &[diff(s.v(q), s.v(p)), one(s.v(G))],
    );
    ClearedIdentity {
        lhs: l.done(),
        rhs: r.done(),
    }
}

/// `2u X(u) = 2u Y(-u) + Y(u) - Y(-u)`.
fn symmetry_cleared(t: &Tables, x: Sym, y: Sym) -> ClearedIdentity {
    let s = Series(t);
    let two_u = lin(2, 0, 0);
    let mut l = Builder::new();
    l.push(two_u.clone(), &[one(s.u(x))]);
    let mut r = Builder::new();
    r.push(two_u, &[one(s.sub(y, -1, 0))]);
    r.push(BiPoly::one(), &[diff(s.u(y), s.sub(y, -1, 0))]);
    ClearedIdentity {
        lhs: l.done(),
        rhs: r.done(),
    }
}

/// `S^T(-u) = S(u) + (S(u) - S(-u))/(2u)` entry `(i, j)`, for any family
/// of series with the S index pattern.
pub(crate) fn transpose_symmetry(
    t: &Tables,
    x: fn(i8, i8) -> Sym,
    i: i8,
    j: i8,
) -> ClearedIdentity {
    let s = Series(t);
    let two_u = lin(2, 0, 0);
    let mut l = Builder::new();
    l.push(two_u.clone(), &[one(s.sub(x(-j, -i), -1, 0))]);
    let mut r = Builder::new();
    r.push(two_u, &[one(s.u(x(i, j)))]);
    r.push(BiPoly::one(), &[diff(s.u(x(i, j)), s.sub(x(i, j), -1, 0))]);
    ClearedIdentity {
        lhs: l.done(),
        rhs: r.done(),
    }
}

/// `X(-u) = Y(u - 2)`.
fn argument_shift(t: &Tables, x: Sym, y: Sym) -> ClearedIdentity {
    let s = Series(t);
    let mut l = Builder::new();
    l.push(BiPoly::one(), &[one(s.sub(x, -1, 0))]);
    let mut r = Builder::new();
    r.push(BiPoly::one(), &[one(s.sub(y, 1, -2))]);
    ClearedIdentity {
        lhs: l.done(),
        rhs: r.done(),
    }
}

pub(crate) fn checks<'a>(tables: &'a Tables, _params: &VerifyParams) -> Vec<Check<'a>> {
    let mut out = Vec::new();
    let mut add =
        |family: &'static str, key: String, variant: Option<&'static str>, id: ClearedIdentity| {
            let c = Check::new(family, key, move |m| cleared_residual(tables, &id, m));
            out.push(match variant {
                Some(v) => c.variant(v),
                None => c,
            });
        };
    for i in PM {
        for j in PM {
            for k in PM {
                for l in PM {
                    let (lhs, rhs) = ss_formal(d_family, i, j, k, l);
                    let id = ClearedIdentity {
                        lhs: formal_to_cleared(tables, &lhs).expect("D series"),
                        rhs: formal_to_cleared(tables, &rhs).expect("D series"),
                    };
                    add("item1", format!("[i={i},j={j},k={k},l={l}]"), None, id);
                }
            }
        }
    }
    for i in PM {
        for j in PM {
            for k in PM {
                add(
                    "item2",
                    format!("[i={i},j={j},k={k}]"),
                    None,
                    item2(tables, i, j, k),
                );
                add(
                    "item3",
                    format!("[i={i},j={j},k={k}]"),
                    None,
                    item3(tables, i, j, k),
                );
            }
        }
    }
    for i in PM {
        add("item4", format!("[i={i}]"), None, item4(tables, i));
        add("item5", format!("[i={i}]"), None, item5(tables, i));
    }
    for i in PM {
        for j in PM {
            add("item6", format!("[i={i},j={j}]"), None, item6(tables, i, j));
            for (name, is_e) in [("item7", true), ("item8", false)] {
                for (variant, corrected) in [("printed", false), ("corrected", true)] {
                    add(
                        name,
                        format!("[i={i},j={j}]"),
                        Some(variant),
                        item78(tables, i, j, is_e, corrected),
                    );
                }
            }
        }
    }
    for i in PM {
        for j in PM {
            let key = format!("[i={i},j={j}]");
            add(
                "item9",
                key.clone(),
                Some("printed"),
                symmetry_cleared(tables, d(i, j), d(-j, -i)),
            );
            add(
                "item9",
                key,
                Some("derived"),
                transpose_symmetry(tables, d, i, j),
            );
        }
    }
    for i in PM {
        add(
            "item10",
            format!("[i={i}]"),
            None,
            argument_shift(tables, e(i), f(-i)),
        );
        add(
            "item11",
            format!("[i={i}]"),
            None,
            argument_shift(tables, f(i), e(-i)),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twisted::Tables;

    #[test]
    fn argument_shift_at_first_order_is_the_flip() {
        // At u^{-1}: -E_i^{(1)} = F_{-i}^{(1)}.
        let t = Tables::build(3).unwrap();
        let id = argument_shift(&t, e(1), f(-1));
        let w = id.window(t.order());
        assert_eq!((w.min_a, w.min_b), (0, 0));
        let lhs = ClearedIdentity::evaluate(&id.lhs, w, t.algebra());
        let want = t.coeff(&Sym::F { i: -1, r: 1 }).unwrap();
        assert_eq!(
            &lhs.get(1, 0).unwrap().neg(),
            t.coeff(&Sym::E { i: 1, r: 1 }).unwrap()
        );
        assert_eq!(
            &ClearedIdentity::evaluate(&id.rhs, w, t.algebra())
                .get(1, 0)
                .unwrap(),
            want
        );
    }

    #[test]
    fn builder_distributes_sums() {
        let t = Tables::build(2).unwrap();
        let s = Series(&t);
        let mut b = Builder::new();
        b.push(
            BiPoly::one(),
            &[diff(s.u(G), s.v(G)), diff(s.u(e(1)), s.v(e(1)))],
        );
        let terms = b.done();
        assert_eq!(terms.len(), 4);
        let signs: Vec<Rational> = terms
            .iter()
            .map(|t| t.poly.terms().next().unwrap().2.clone())
            .collect();
        assert_eq!(signs, [1, -1, -1, 1].map(Rational::from_int));
    }

    #[test]
    fn clearing_polynomials_have_the_expected_degrees() {
        assert_eq!(p_two().max_total(), 2);
        assert_eq!(p_four().max_total(), 4);
    }

    #[test]
    fn item7_index_typo_shows_only_off_diagonal() {
        let t = Tables::build(4).unwrap();
        let holds = |i, j, corrected| {
            let id = item78(&t, i, j, true, corrected);
            id.check(t.order(), t.algebra()).unwrap().failing_cells == 0
        };
        assert!(holds(1, 1, false) && holds(1, 1, true));
        assert!(!holds(-1, 1, false));
        assert!(holds(-1, 1, true));
    }
}
