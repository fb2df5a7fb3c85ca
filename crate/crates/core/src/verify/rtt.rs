//! Self-checks of the `Y_3` layer: the straightening rule against a direct
//! series expansion, the S-relations, the S-symmetry, the Gauss round trip
//! and compatibility of `tau` with the S-relations.

use std::collections::BTreeMap;

use super::cleared::{cleared_residual, formal_to_cleared, transpose_symmetry};
use super::{relation_residual, residual_len, Check, VerifyParams};
use crate::error::Result;
use crate::exact::Rational;
use crate::pbw::{GeneratorId, RttSpec};
use crate::series::ClearedIdentity;
use crate::twisted::expr::{s_family, ss_cell, ss_formal};
use crate::twisted::{evaluate, tau, Expr, Relation, Sym, Tables, INDICES};
use crate::verify::relations::resolve_level_zero;

/// Levels checked against the expansion oracle, independent of the tables.
pub const KERNEL_LEVELS: u32 = 6;

fn t(i: i8, j: i8, r: u32) -> Sym {
    Sym::T { i, j, r }
}

/// `[T_{i,j}^{(r)}, T_{k,l}^{(s)}]` as formal words, from
/// `(u - v)[T_ij(u), T_kl(v)] = T_kj(u) T_il(v) - T_kj(v) T_il(u)`.
///
/// The right side is expanded as a product of truncated series of
/// symbols. On the left, the coefficient of `u^{-p} v^{-q}` is
/// `c(p+1, q) - c(p, q+1)` with `c(0, .) = 0`, which determines every
/// `c(r, s)` from the right-hand coefficients alone.
pub fn commutator_by_expansion(i: i8, j: i8, k: i8, l: i8, r: u32, s: u32) -> Expr {
    let total = r + s;
    // Coefficients of u^{-p} v^{-q} of the right side, p + q < r + s.
    let mut rhs: BTreeMap<(u32, u32), Expr> = BTreeMap::new();
    for p in 0..total {
        for q in 0..total - p {
            let mut e = Expr::zero();
            e.add_int(1, vec![t(k, j, p), t(i, l, q)]);
            e.add_int(-1, vec![t(k, j, q), t(i, l, p)]);
            rhs.insert((p, q), e);
        }
    }
    let mut c: BTreeMap<(u32, u32), Expr> = BTreeMap::new();
    for n in 0..=total {
        c.insert((0, n), Expr::zero());
    }
    for a in 1..=r {
        for b in 0..=(total - a) {
            let mut e = c[&(a - 1, b + 1)].clone();
            e.add_expr(&rhs[&(a - 1, b)], &Rational::one());
            c.insert((a, b), e);
        }
    }
    resolve_level_zero(&c[&(r, s)])
}

fn kernel_rule(spec: &RttSpec, i: i8, j: i8, k: i8, l: i8, r: u32, s: u32) -> Expr {
    let mut e = Expr::zero();
    for (c, word) in spec.raw_commutator((i, j, r), (k, l, s)) {
        let w = word
            .into_iter()
            .map(|g| match g {
                GeneratorId::T { i, j, r } => t(i, j, r),
                GeneratorId::Lie(_) => unreachable!("RTT words use T generators"),
            })
            .collect();
        e.add(c, w);
    }
    e
}

fn kernel_residual(
    tables: &Tables,
    spec: &RttSpec,
    idx: (i8, i8, i8, i8),
    mutated: bool,
) -> Result<usize> {
    let (i, j, k, l) = idx;
    let alg = tables.algebra();
    let mut residual = 0;
    for r in 1..=KERNEL_LEVELS {
        for s in 1..=KERNEL_LEVELS {
            let mut oracle = commutator_by_expansion(i, j, k, l, r, s);
            if mutated && r == KERNEL_LEVELS && s == KERNEL_LEVELS {
                oracle.drop_last();
            }
            // Formal agreement of the rule with the expansion...
            residual += kernel_rule(spec, i, j, k, l, r, s).sub(&oracle).len();
            // ...and agreement of the normal-ordered commutator with it.
            let a = alg.gen_element(GeneratorId::T { i, j, r });
            let b = alg.gen_element(GeneratorId::T { i: k, j: l, r: s });
            residual += residual_len(&alg.commutator(&a, &b), &evaluate(&oracle, tables)?);
        }
    }
    Ok(residual)
}

/// Window used for the `tau` check, matching the cleared S-relation.
fn tau_cells(order: usize) -> Vec<(i64, i64)> {
    let top = order as i64 - 2;
    let mut out = Vec::new();
    for a in -2..=top + 2 {
        for b in -2..=top - a {
            out.push((a, b));
        }
    }
    out
}

fn tau_residual(tables: &Tables, idx: (i8, i8, i8, i8), mutated: bool) -> Result<usize> {
    let (i, j, k, l) = idx;
    let mut residual = 0;
    for (a, b) in tau_cells(tables.order()) {
        let rel = ss_cell(i, j, k, l, a, b);
        let rel = if mutated { rel.mutated() } else { rel };
        let image = Relation::new(tau(&rel.lhs)?, tau(&rel.rhs)?);
        residual += relation_residual(&image, tables, false)?;
    }
    Ok(residual)
}

fn gauss_residual(tables: &Tables, i: i8, j: i8, mutated: bool) -> Result<usize> {
    let mut re = tables.reassembled_s(i, j)?;
    let s = tables.s().series(i, j);
    if mutated {
        let mut coeffs = re.coeffs().to_vec();
        coeffs.pop();
        coeffs.push(crate::pbw::Element::zero());
        re = crate::series::ElementSeries::new(coeffs);
    }
    let mut n = 0;
    for r in 0..=tables.order() {
        n += residual_len(re.coeff(r)?, s.coeff(r)?);
    }
    Ok(n)
}

fn tuples() -> Vec<(i8, i8, i8, i8)> {
    let mut v = Vec::new();
    for i in INDICES {
        for j in INDICES {
            for k in INDICES {
                for l in INDICES {
                    v.push((i, j, k, l));
                }
            }
        }
    }
    v
}

pub(crate) fn checks<'a>(tables: &'a Tables, _params: &VerifyParams) -> Vec<Check<'a>> {
    let mut out = Vec::new();
    for idx in tuples() {
        let (i, j, k, l) = idx;
        let key = format!("[i={i},j={j},k={k},l={l}]");
        out.push(Check::new("kernel", key.clone(), move |m| {
            kernel_residual(tables, &RttSpec::new(3), idx, m)
        }));
        let (lhs, rhs) = ss_formal(s_family, i, j, k, l);
        let id = ClearedIdentity {
            lhs: formal_to_cleared(tables, &lhs).expect("S series"),
            rhs: formal_to_cleared(tables, &rhs).expect("S series"),
        };
        out.push(Check::new("SS", key.clone(), move |m| {
            cleared_residual(tables, &id, m)
        }));
        out.push(Check::new("tau", key, move |m| {
            tau_residual(tables, idx, m)
        }));
    }
    for i in INDICES {
        for j in INDICES {
            let key = format!("[i={i},j={j}]");
            let id = transpose_symmetry(tables, s_family, i, j);
            out.push(Check::new("symmetry", key.clone(), move |m| {
                cleared_residual(tables, &id, m)
            }));
            out.push(Check::new("gauss", key, move |m| {
                gauss_residual(tables, i, j, m)
            }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_expansion_is_the_gl3_bracket() {
        // [T_ij, T_kl] = delta_kj T_il - delta_il T_kj at levels (1, 1).
        let e = commutator_by_expansion(-1, 0, 0, 1, 1, 1);
        assert_eq!(e, Expr::sym(t(-1, 1, 1)));
        let mut want = Expr::zero();
        want.add_int(-1, vec![t(-1, 1, 1)]);
        assert_eq!(commutator_by_expansion(0, 1, -1, 0, 1, 1), want);
        // Formally [T^(1), T^(2)]; it vanishes only after normal ordering.
        let tables = Tables::build(1).unwrap();
        assert!(
            evaluate(&commutator_by_expansion(1, 1, 1, 1, 2, 2), &tables)
                .unwrap()
                .is_zero()
        );
    }

    #[test]
    fn expansion_matches_the_rule_on_a_sample() {
        let spec = RttSpec::new(3);
        for (r, s) in [(1, 3), (3, 1), (2, 4), (4, 4)] {
            let a = commutator_by_expansion(1, -1, 0, 1, r, s);
            assert_eq!(
                a.sub(&kernel_rule(&spec, 1, -1, 0, 1, r, s)),
                Expr::zero(),
                "({r},{s})"
            );
        }
    }

    #[test]
    fn tau_window_reaches_the_table_order() {
        let cells = tau_cells(4);
        assert!(cells.contains(&(-2, -2)));
        assert!(cells.contains(&(4, -2)));
        assert!(cells.iter().all(|&(a, b)| a + b <= 2));
    }
}
