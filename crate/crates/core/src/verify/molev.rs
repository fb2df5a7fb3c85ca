//! The embedding `f_{i,j} -> S_{i,j}^{(1)}` of `U(so_3)` and projections
//! `S(u) -> 1 + F/(u + c)` back onto it.
//!
//! `c = 0` is the projection `S^{(r)} -> delta_{r,1} f`. It respects the
//! S-relation only at low levels; the symmetry forces `c = 1/2`.

use std::borrow::Cow;
use std::sync::Arc;

use super::{relation_residual, residual_len, Check, VerifyParams};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::pbw::{
    mat_commutator, so3_coordinates, so3_matrix, so3_spec, Algebra, Element, Gen, Monomial,
    SO3_BASIS,
};
use crate::twisted::expr::ss_cell;
use crate::twisted::{Sym, SymEval, Tables, INDICES};

/// Cells of the S-relation checked under the projection; their levels stay at most 3.
pub const RHO_CELLS: std::ops::RangeInclusive<i64> = -2..=1;

fn coords(i: i8, j: i8) -> Vec<(Gen, Rational)> {
    so3_coordinates(&so3_matrix(i, j)).expect("f_{i,j} lies in so_3")
}

/// `sum_c coef_c S^{(1)}_{basis c}` in `Y_3`, optionally without its last term.
fn iota_image(tables: &Tables, coords: &[(Gen, Rational)], drop_last: bool) -> Result<Element> {
    let n = coords.len() - usize::from(drop_last && !coords.is_empty());
    let mut e = Element::zero();
    for (g, c) in &coords[..n] {
        let (i, j) = SO3_BASIS[*g as usize];
        e.add_scaled(tables.coeff(&Sym::S { i, j, r: 1 })?, c);
    }
    Ok(e)
}

/// Evaluates S-words in `U(so_3)` through `S^{(r)} -> (-c)^{r-1} f`.
pub struct RhoEval {
    alg: Arc<Algebra>,
    images: Vec<Element>,
    c: Rational,
}

impl RhoEval {
    pub fn new(c: Rational) -> Self {
        let mut images = Vec::new();
        for i in INDICES {
            for j in INDICES {
                let mut e = Element::zero();
                for (g, c) in coords(i, j) {
                    e.add_term(Monomial::from_slice(&[g]), 0, c);
                }
                images.push(e);
            }
        }
        RhoEval {
            alg: Arc::new(Algebra::new(so3_spec())),
            images,
            c,
        }
    }
}

impl SymEval for RhoEval {
    fn algebra(&self) -> &Algebra {
        &self.alg
    }

    fn eval(&self, s: &Sym) -> Result<Cow<'_, Element>> {
        match *s {
            Sym::S { i, j, r: 0 } => Ok(Cow::Owned(if i == j {
                Element::one()
            } else {
                Element::zero()
            })),
            Sym::S { i, j, r } => {
                let f = &self.images[((i + 1) * 3 + j + 1) as usize];
                Ok(match r {
                    1 => Cow::Borrowed(f),
                    _ => Cow::Owned(f.scale(&(-&self.c).pow(r - 1))),
                })
            }
            other => Err(Error::Unevaluable(format!(
                "the projection acts on S only, not {other}"
            ))),
        }
    }
}

pub(crate) fn checks<'a>(tables: &'a Tables, _params: &VerifyParams) -> Result<Vec<Check<'a>>> {
    if tables.order() < 3 {
        return Err(Error::WeightExceedsTables {
            requested: 3,
            available: tables.order(),
        });
    }
    let mut out = Vec::new();
    for &(i, j) in &SO3_BASIS {
        for &(k, l) in &SO3_BASIS {
            out.push(Check::new(
                "iota",
                format!("[f({i},{j}),f({k},{l})]"),
                move |m| {
                    let alg = tables.algebra();
                    let a = tables.coeff(&Sym::S { i, j, r: 1 })?;
                    let b = tables.coeff(&Sym::S { i: k, j: l, r: 1 })?;
                    let bracket = mat_commutator(&so3_matrix(i, j), &so3_matrix(k, l));
                    let c = so3_coordinates(&bracket)
                        .ok_or_else(|| Error::Shape("bracket left so_3".into()))?;
                    Ok(residual_len(
                        &alg.commutator(a, b),
                        &iota_image(tables, &c, m)?,
                    ))
                },
            ));
        }
    }
    for i in INDICES {
        for j in INDICES {
            out.push(Check::new(
                "iota-linear",
                format!("[f({i},{j})]"),
                move |m| {
                    Ok(residual_len(
                        tables.coeff(&Sym::S { i, j, r: 1 })?,
                        &iota_image(tables, &coords(i, j), m)?,
                    ))
                },
            ));
        }
    }
    for (variant, c) in [("printed", Rational::zero()), ("half", Rational::new(1, 2))] {
        let rho = Arc::new(RhoEval::new(c));
        for i in INDICES {
            for j in INDICES {
                for k in INDICES {
                    for l in INDICES {
                        let rho = rho.clone();
                        out.push(
                            Check::new("rho", format!("[i={i},j={j},k={k},l={l}]"), move |m| {
                                let mut n = 0;
                                for a in RHO_CELLS {
                                    for b in RHO_CELLS {
                                        n += relation_residual(
                                            &ss_cell(i, j, k, l, a, b),
                                            rho.as_ref(),
                                            m,
                                        )?;
                                    }
                                }
                                Ok(n)
                            })
                            .variant(variant),
                        );
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twisted::{evaluate, Expr};

    #[test]
    fn projection_kills_higher_levels() {
        let rho = RhoEval::new(Rational::zero());
        assert!(rho.eval(&Sym::S { i: 1, j: 0, r: 2 }).unwrap().is_zero());
        assert!(rho.eval(&Sym::S { i: 0, j: 0, r: 1 }).unwrap().is_zero());
        assert!(rho.eval(&Sym::G { r: 1 }).is_err());
    }

    #[test]
    fn projection_breaks_the_symmetry_at_level_two() {
        // S_{i,j}^{(2)} = S_{-j,-i}^{(2)} - S_{i,j}^{(1)} holds in the twisted
        // Yangian, but its image reads 0 = -f_{i,j}.
        let (i, j) = (-1, 0);
        let tables = Tables::build(2).unwrap();
        let mut rel = Expr::sym(Sym::S { i, j, r: 2 });
        rel.add_int(-1, vec![Sym::S { i: -j, j: -i, r: 2 }]);
        rel.add_int(1, vec![Sym::S { i, j, r: 1 }]);
        assert!(evaluate(&rel, &tables).unwrap().is_zero());
        assert!(!evaluate(&rel, &RhoEval::new(Rational::zero()))
            .unwrap()
            .is_zero());
        assert!(evaluate(&rel, &RhoEval::new(Rational::new(1, 2)))
            .unwrap()
            .is_zero());
    }
}
