//! Linear-algebra suites: PBW counts, independence and spans, closure and
//! properness of the shifted subalgebras, and the center.

use std::sync::Arc;

use rayon::prelude::*;

use super::{residual_len, Check, VerifyParams};
use crate::error::Result;
use crate::pbw::{Element, GeneratorId};
use crate::series::ElementSeries;
use crate::twisted::family::{weight, Expansion};
use crate::twisted::{
    admissible, center_series, expand_family_monomials, sdet_from_terms, BasisFamily, FamilyKind,
    SpanSolver, Sym, Tables, INDICES, PM, SDET_TERMS,
};

/// A family's monomials sorted into weight slices, with the span of each
/// filtration piece `weight <= w`.
struct Graded {
    /// `by_weight[w]`: monomials of weight exactly `w`.
    by_weight: Vec<Vec<Expansion>>,
    /// `independent[w]`: how many of `by_weight[w]` enlarged the span.
    independent: Vec<usize>,
    /// `spans[w]`: echelon form of everything of weight `<= w`.
    spans: Vec<SpanSolver>,
}

impl Graded {
    fn build(tables: &Tables, kind: FamilyKind, w: u32, coordinates: bool) -> Result<Self> {
        let family = BasisFamily::new(kind, w);
        let mut by_weight = vec![Vec::new(); w as usize + 1];
        for item in expand_family_monomials(tables, &family, w)? {
            by_weight[weight(&item.0) as usize].push(item);
        }
        let mut solver = if coordinates {
            SpanSolver::new()
        } else {
            SpanSolver::membership_only()
        };
        let mut independent = Vec::new();
        let mut spans = Vec::new();
        for slice in &by_weight {
            independent.push(
                slice
                    .iter()
                    .filter(|(m, e)| solver.insert(m.clone(), e))
                    .count(),
            );
            spans.push(solver.clone());
        }
        Ok(Graded {
            by_weight,
            independent,
            spans,
        })
    }

    fn span(&self, w: u32) -> &SpanSolver {
        &self.spans[(w as usize).min(self.spans.len() - 1)]
    }
}

/// An element of `Y_3` outside the twisted Yangian, used to perturb targets.
fn outsider(tables: &Tables) -> Element {
    tables
        .algebra()
        .gen_element(GeneratorId::T { i: -1, j: 0, r: 1 })
}

/// Generators per level of any PBW family: 3 at odd levels, 6 at even ones.
fn generators_at(r: u32) -> usize {
    INDICES
        .iter()
        .flat_map(|&i| INDICES.iter().map(move |&j| (i, j)))
        .filter(|&(i, j)| if r % 2 == 1 { i + j < 0 } else { i + j <= 0 })
        .count()
}

/// Multisets of generators of total weight `w`, counted by the product
/// formula `prod_r (1 - t^r)^{-g_r}`.
pub fn pbw_count_oracle(w: u32) -> usize {
    let w = w as usize;
    let mut dp = vec![0usize; w + 1];
    dp[0] = 1;
    for r in 1..=w {
        for _ in 0..generators_at(r as u32) {
            for n in r..=w {
                dp[n] += dp[n - r];
            }
        }
    }
    dp[w]
}

const PBW_KINDS: [FamilyKind; 3] = [
    FamilyKind::MnoS,
    FamilyKind::Drinfeld,
    FamilyKind::DrinfeldF,
];

pub(crate) fn pbw_checks<'a>(tables: &'a Tables, params: &VerifyParams) -> Result<Vec<Check<'a>>> {
    let wmax = params.pbw_weight;
    let graded: Vec<Arc<Graded>> = PBW_KINDS
        .par_iter()
        .map(|&k| Graded::build(tables, k, wmax, false).map(Arc::new))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (kind, g) in PBW_KINDS.iter().zip(&graded) {
        let name = kind.name();
        for w in 1..=wmax {
            let family = BasisFamily::new(*kind, wmax);
            let dim = pbw_count_oracle(w);
            out.push(Check::new(
                "count",
                format!("[{name},W={w},dim={dim}]"),
                move |m| {
                    let want = dim + usize::from(m);
                    Ok(family.count_of_weight(w).abs_diff(want))
                },
            ));
            let g = g.clone();
            out.push(Check::new(
                "independence",
                format!("[{name},W={w}]"),
                move |m| {
                    let slice = &g.by_weight[w as usize];
                    let mut independent = g.independent[w as usize];
                    let mut total = slice.len();
                    if m {
                        // Insert the last monomial of the slice a second time.
                        let mut s = g.span(w).clone();
                        if let Some((label, e)) = slice.last() {
                            total += 1;
                            independent += usize::from(s.insert(label.clone(), e));
                        }
                    }
                    Ok(total - independent)
                },
            ));
        }
    }
    for (a, ga) in PBW_KINDS.iter().zip(&graded) {
        for (b, gb) in PBW_KINDS.iter().zip(&graded) {
            if a == b {
                continue;
            }
            for w in 1..=wmax {
                let (ga, gb) = (ga.clone(), gb.clone());
                out.push(Check::new(
                    "span",
                    format!("[{}<{},W={w}]", b.name(), a.name()),
                    move |m| {
                        let span = ga.span(w);
                        let slice = &gb.by_weight[w as usize];
                        let mut missing = slice.iter().filter(|(_, e)| !span.contains(e)).count();
                        if m {
                            let mut e = slice[0].1.clone();
                            e.add_assign(&outsider(tables));
                            missing += usize::from(!span.contains(&e));
                        }
                        Ok(missing)
                    },
                ));
            }
        }
    }
    // Elements outside each generating set that the spanning claim covers.
    let mut members: Vec<(usize, Sym)> = Vec::new();
    for r in 1..=wmax {
        for i in INDICES {
            for j in INDICES {
                if !admissible(i, j, r) {
                    members.push((0, Sym::S { i, j, r }));
                }
            }
        }
        if r % 2 == 1 {
            members.push((1, Sym::G { r }));
        }
        for i in PM {
            members.push((1, Sym::F { i, r }));
            members.push((2, Sym::E { i, r }));
        }
    }
    for (idx, s) in members {
        let g = graded[idx].clone();
        let name = PBW_KINDS[idx].name();
        out.push(Check::new(
            "membership",
            format!("[{s} in {name}]"),
            move |m| {
                let mut e = tables.coeff(&s)?.clone();
                if m {
                    e.add_assign(&outsider(tables));
                }
                Ok(usize::from(!g.span(s.level()).contains(&e)))
            },
        ));
    }
    Ok(out)
}

fn shifted_spans(tables: &Tables, ks: &[u32], w: u32) -> Result<Vec<(u32, Arc<Graded>)>> {
    ks.par_iter()
        .map(|&k| {
            Ok((
                k,
                Arc::new(Graded::build(tables, FamilyKind::Shifted(k), w, false)?),
            ))
        })
        .collect()
}

pub(crate) fn shifted_checks<'a>(
    tables: &'a Tables,
    params: &VerifyParams,
) -> Result<Vec<Check<'a>>> {
    let wmax = params.shifted_weight;
    let mut out = Vec::new();
    for (k, g) in shifted_spans(tables, &params.ks, wmax)? {
        let gens = BasisFamily::new(FamilyKind::Shifted(k), wmax)
            .generators()
            .to_vec();
        for (n, &a) in gens.iter().enumerate() {
            for &b in &gens[n + 1..] {
                if a.level() + b.level() > wmax {
                    continue;
                }
                let g = g.clone();
                out.push(Check::new(
                    "closure",
                    format!("{{k={k}}}[{a},{b}]"),
                    move |m| {
                        let mut c = tables
                            .algebra()
                            .commutator(tables.coeff(&a)?, tables.coeff(&b)?);
                        if m {
                            c.add_assign(tables.coeff(&Sym::E { i: 1, r: 1 })?);
                        }
                        Ok(usize::from(!g.span(wmax).contains(&c)))
                    },
                ));
            }
        }
        for r in 1..=k {
            for i in PM {
                for w in 1..=wmax {
                    let g = g.clone();
                    out.push(Check::new(
                        "proper",
                        format!("{{k={k}}}[{},W={w}]", Sym::E { i, r }),
                        move |m| {
                            let e = tables.coeff(&Sym::E { i, r })?;
                            // Mutation puts the target itself among the generators.
                            let target = if m { Element::zero() } else { e.clone() };
                            Ok(usize::from(g.span(w).contains(&target)))
                        },
                    ));
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn center_checks<'a>(
    tables: &'a Tables,
    params: &VerifyParams,
) -> Result<Vec<Check<'a>>> {
    let n = params.order;
    let (c, sdet, sdet_mutated) = {
        let c = center_series(tables);
        let (s, sm) = rayon::join(
            || sdet_from_terms(tables, &SDET_TERMS),
            || sdet_from_terms(tables, &SDET_TERMS[..SDET_TERMS.len() - 1]),
        );
        (Arc::new(c), Arc::new(s), Arc::new(sm))
    };
    let mut out = Vec::new();
    for r in 0..=n {
        let (c, sdet, sm) = (c.clone(), sdet.clone(), sdet_mutated.clone());
        out.push(Check::new("sdet", format!("[r={r}]"), move |m| {
            let other: &ElementSeries = if m { &sm } else { &sdet };
            Ok(residual_len(c.coeff(r)?, other.coeff(r)?))
        }));
    }
    for r in 1..n {
        for s in 1..=(n - r) {
            for i in INDICES {
                for j in INDICES {
                    let c = c.clone();
                    out.push(Check::new(
                        "central",
                        format!("[C({r}),S({i},{j})({s})]"),
                        move |m| {
                            let alg = tables.algebra();
                            let cr = c.coeff(r)?;
                            let sij = tables.coeff(&Sym::S { i, j, r: s as u32 })?;
                            // Mutation compares the product instead of the bracket.
                            let lhs = if m {
                                alg.multiply(cr, sij)
                            } else {
                                alg.commutator(cr, sij)
                            };
                            Ok(lhs.len())
                        },
                    ));
                }
            }
        }
    }
    let top = params.pbw_weight.min(n as u32);
    for (k, g) in shifted_spans(tables, &params.ks, top)? {
        for r in 1..=top {
            let (c, g) = (c.clone(), g.clone());
            out.push(Check::new(
                "membership",
                format!("{{k={k}}}[C({r})]"),
                move |m| {
                    let mut e = c.coeff(r as usize)?.clone();
                    if m {
                        e.add_assign(tables.coeff(&Sym::E { i: 1, r: 1 })?);
                    }
                    Ok(usize::from(!g.span(r).contains(&e)))
                },
            ));
        }
    }
    Ok(out)
}
