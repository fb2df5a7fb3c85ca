//! Ordered monomials in a distinguished generating set and exact linear
//! algebra over Q on their `Y_3` expansions.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{admissible, Sym, Tables, INDICES, PM};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::pbw::{Element, Monomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// Admissible `S_{i,j}^{(r)}`.
    MnoS,
    /// `E_i^{(m)}`, admissible `D_{k,l}^{(r)}`, `G^{(t)}` for even `t`.
    Drinfeld,
    /// As [`FamilyKind::Drinfeld`] with `F` in place of `E`.
    DrinfeldF,
    /// Generators of the `k`-shifted subalgebra: every `D` and `G`, and
    /// `E^{(r)}` for `r > k`. Spans only; it is not a basis.
    Shifted(u32),
}

impl FamilyKind {
    pub fn name(&self) -> String {
        match self {
            FamilyKind::MnoS => "mno-s".into(),
            FamilyKind::Drinfeld => "drinfeld-e".into(),
            FamilyKind::DrinfeldF => "drinfeld-f".into(),
            FamilyKind::Shifted(k) => format!("shifted-{k}"),
        }
    }
}

/// A generating set up to a weight bound, in a fixed order. The weight of
/// each generator is its level.
#[derive(Clone, Debug)]
pub struct BasisFamily {
    kind: FamilyKind,
    generators: Vec<Sym>,
}

impl BasisFamily {
    pub fn new(kind: FamilyKind, max_weight: u32) -> Self {
        let mut gens = Vec::new();
        for r in 1..=max_weight {
            match kind {
                FamilyKind::MnoS => {
                    for i in INDICES {
                        for j in INDICES {
                            if admissible(i, j, r) {
                                gens.push(Sym::S { i, j, r });
                            }
                        }
                    }
                }
                FamilyKind::Drinfeld | FamilyKind::DrinfeldF => {
                    for i in PM {
                        gens.push(if kind == FamilyKind::Drinfeld {
                            Sym::E { i, r }
                        } else {
                            Sym::F { i, r }
                        });
                    }
                    for k in PM {
                        for l in PM {
                            if admissible(k, l, r) {
                                gens.push(Sym::D { i: k, j: l, r });
                            }
                        }
                    }
                    if r % 2 == 0 {
                        gens.push(Sym::G { r });
                    }
                }
                FamilyKind::Shifted(k) => {
                    for i in PM {
                        for j in PM {
                            gens.push(Sym::D { i, j, r });
                        }
                    }
                    gens.push(Sym::G { r });
                    if r > k {
                        for i in PM {
                            gens.push(Sym::E { i, r });
                        }
                    }
                }
            }
        }
        gens.sort_by_key(|s| (s.level(), *s));
        BasisFamily {
            kind,
            generators: gens,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn generators(&self) -> &[Sym] {
        &self.generators
    }

    /// Ordered monomials (weakly increasing in generator order) of total
    /// weight at most `w`, including the empty monomial.
    pub fn monomials(&self, w: u32) -> Vec<Vec<Sym>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.walk(0, w, &mut cur, &mut |m| out.push(m.to_vec()));
        out
    }

    /// Number of ordered monomials of weight exactly `w`.
    pub fn count_of_weight(&self, w: u32) -> usize {
        self.monomials(w).iter().filter(|m| weight(m) == w).count()
    }

    fn walk(&self, start: usize, budget: u32, cur: &mut Vec<Sym>, f: &mut dyn FnMut(&[Sym])) {
        f(cur);
        for idx in start..self.generators.len() {
            let g = self.generators[idx];
            if g.level() > budget {
                continue;
            }
            cur.push(g);
            self.walk(idx, budget - g.level(), cur, f);
            cur.pop();
        }
    }
}

pub fn weight(word: &[Sym]) -> u32 {
    word.iter().map(|s| s.level()).sum()
}

/// Every ordered monomial of weight at most `w` with its `Y_3` normal form.
/// A monomial in family generators with its normal form in `Y_3`.
pub type Expansion = (Vec<Sym>, Element);

pub fn expand_family_monomials(
    tables: &Tables,
    family: &BasisFamily,
    w: u32,
) -> Result<Vec<Expansion>> {
    if w as usize > tables.order() {
        return Err(Error::WeightExceedsTables {
            requested: w as usize,
            available: tables.order(),
        });
    }
    fn grow(
        tables: &Tables,
        gens: &[Sym],
        start: usize,
        budget: u32,
        word: &mut Vec<Sym>,
        value: &Element,
        out: &mut Vec<(Vec<Sym>, Element)>,
    ) -> Result<()> {
        for idx in start..gens.len() {
            let g = gens[idx];
            if g.level() > budget {
                continue;
            }
            let next = tables.algebra().multiply(value, tables.coeff(&g)?);
            word.push(g);
            out.push((word.clone(), next.clone()));
            grow(tables, gens, idx, budget - g.level(), word, &next, out)?;
            word.pop();
        }
        Ok(())
    }
    let gens = family.generators();
    let branches: Vec<Result<Vec<Expansion>>> = (0..gens.len())
        .into_par_iter()
        .map(|idx| {
            let g = gens[idx];
            let mut out = Vec::new();
            if g.level() > w {
                return Ok(out);
            }
            let value = tables.coeff(&g)?.clone();
            out.push((vec![g], value.clone()));
            grow(
                tables,
                gens,
                idx,
                w - g.level(),
                &mut vec![g],
                &value,
                &mut out,
            )?;
            Ok(out)
        })
        .collect();
    let mut all = vec![(Vec::new(), Element::one())];
    for b in branches {
        all.extend(b?);
    }
    Ok(all)
}

/// Coordinates of an element in a family's monomials.
#[derive(Clone, Debug, PartialEq)]
pub enum Coordinates {
    InSpan(Vec<(Vec<Sym>, Rational)>),
    NotInSpan,
}

impl Coordinates {
    pub fn in_span(&self) -> bool {
        matches!(self, Coordinates::InSpan(_))
    }
}

type Vector = BTreeMap<Monomial, Rational>;
type Combo = BTreeMap<usize, Rational>;

fn to_vector(e: &Element) -> Vector {
    assert!(
        e.x_degree().is_none_or(|d| d == 0),
        "span checks take x-free elements"
    );
    e.terms()
        .into_iter()
        .map(|(m, _, c)| (m.clone(), c.clone()))
        .collect()
}

fn axpy<K: Ord + Clone>(
    dst: &mut BTreeMap<K, Rational>,
    src: &BTreeMap<K, Rational>,
    c: &Rational,
) {
    for (k, v) in src {
        let e = dst.entry(k.clone()).or_default();
        *e += &(v * c);
        if e.is_zero() {
            dst.remove(k);
        }
    }
}

/// Incremental row echelon form over Q, pivoting on the largest monomial,
/// that remembers how each row combines the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct SpanSolver {
    labels: Vec<Vec<Sym>>,
    rows: Vec<(Vector, Combo)>,
    pivots: HashMap<Monomial, usize>,
    membership_only: bool,
}

impl SpanSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// A solver that skips the bookkeeping of combinations. Cheaper on large
    /// redundant families; `solve` then returns empty coordinates for members.
    pub fn membership_only() -> Self {
        SpanSolver {
            membership_only: true,
            ..Self::default()
        }
    }

    pub fn from_expansions(items: &[(Vec<Sym>, Element)]) -> (Self, usize) {
        let mut s = Self::new();
        let mut independent = 0;
        for (w, e) in items {
            if s.insert(w.clone(), e) {
                independent += 1;
            }
        }
        (s, independent)
    }

    fn reduce(&self, mut v: Vector, mut combo: Combo) -> (Vector, Combo) {
        while let Some((lead, c)) = v.last_key_value() {
            let Some(&row) = self.pivots.get(lead) else {
                break;
            };
            let (rv, rc) = &self.rows[row];
            let factor = -(c / rv.last_key_value().unwrap().1);
            if !self.membership_only {
                axpy(&mut combo, rc, &factor);
            }
            axpy(&mut v, rv, &factor);
        }
        (v, combo)
    }

    /// Adds a labelled vector; returns whether it was independent of those before.
    pub fn insert(&mut self, label: Vec<Sym>, e: &Element) -> bool {
        let idx = self.labels.len();
        self.labels.push(label);
        let mut combo = Combo::new();
        if !self.membership_only {
            combo.insert(idx, Rational::one());
        }
        let (v, combo) = self.reduce(to_vector(e), combo);
        match v.last_key_value() {
            None => false,
            Some((lead, _)) => {
                self.pivots.insert(lead.clone(), self.rows.len());
                self.rows.push((v, combo));
                true
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, target: &Element) -> bool {
        self.reduce(to_vector(target), Combo::new()).0.is_empty()
    }

    /// Expresses `target` through the inserted vectors, if possible.
    pub fn solve(&self, target: &Element) -> Coordinates {
        let (v, combo) = self.reduce(to_vector(target), Combo::new());
        if !v.is_empty() {
            return Coordinates::NotInSpan;
        }
        // target - sum(combo) = 0
        Coordinates::InSpan(
            combo
                .into_iter()
                .map(|(i, c)| (self.labels[i].clone(), -c))
                .collect(),
        )
    }
}

/// Coordinates of `target` in the family's monomials of weight at most `w`.
pub fn solve_coordinates(
    tables: &Tables,
    target: &Element,
    family: &BasisFamily,
    w: u32,
) -> Result<Coordinates> {
    let items = expand_family_monomials(tables, family, w)?;
    let (solver, _) = SpanSolver::from_expansions(&items);
    Ok(solver.solve(target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twisted::{evaluate, Expr};

    #[test]
    fn low_weight_counts() {
        for kind in [
            FamilyKind::MnoS,
            FamilyKind::Drinfeld,
            FamilyKind::DrinfeldF,
        ] {
            let f = BasisFamily::new(kind, 2);
            assert_eq!(f.count_of_weight(1), 3, "{kind:?}");
            assert_eq!(f.count_of_weight(2), 12, "{kind:?}");
        }
        let d = BasisFamily::new(FamilyKind::Drinfeld, 1);
        assert_eq!(
            d.generators(),
            &[
                Sym::D { i: -1, j: -1, r: 1 },
                Sym::E { i: -1, r: 1 },
                Sym::E { i: 1, r: 1 }
            ]
        );
        let s = BasisFamily::new(FamilyKind::MnoS, 1);
        assert_eq!(
            s.generators(),
            &[
                Sym::S { i: -1, j: -1, r: 1 },
                Sym::S { i: -1, j: 0, r: 1 },
                Sym::S { i: 0, j: -1, r: 1 }
            ]
        );
    }

    #[test]
    fn coordinates_reproduce_the_target() {
        let tables = Tables::build(2).unwrap();
        let drin = BasisFamily::new(FamilyKind::Drinfeld, 2);
        let f1 = tables.coeff(&Sym::F { i: 1, r: 1 }).unwrap().clone();
        let coords = solve_coordinates(&tables, &f1, &drin, 1).unwrap();
        assert_eq!(
            coords,
            Coordinates::InSpan(vec![(vec![Sym::E { i: -1, r: 1 }], Rational::from_int(-1))])
        );

        let mno = BasisFamily::new(FamilyKind::MnoS, 2);
        let s = tables.coeff(&Sym::S { i: -1, j: 0, r: 1 }).unwrap().clone();
        assert_eq!(
            solve_coordinates(&tables, &s, &mno, 1).unwrap(),
            Coordinates::InSpan(vec![(vec![Sym::S { i: -1, j: 0, r: 1 }], Rational::one())])
        );

        let target = tables.coeff(&Sym::G { r: 2 }).unwrap().clone();
        let Coordinates::InSpan(c) = solve_coordinates(&tables, &target, &mno, 2).unwrap() else {
            panic!("G(2) should lie in the weight-2 span");
        };
        let mut re = Expr::zero();
        for (w, v) in c {
            re.add(v, w);
        }
        assert_eq!(evaluate(&re, &tables).unwrap(), target);
    }

    #[test]
    fn yangian_generator_outside_twisted_span() {
        let tables = Tables::build(1).unwrap();
        let t = tables
            .algebra()
            .gen_element(crate::GeneratorId::T { i: -1, j: 0, r: 1 });
        let mno = BasisFamily::new(FamilyKind::MnoS, 1);
        assert_eq!(
            solve_coordinates(&tables, &t, &mno, 1).unwrap(),
            Coordinates::NotInSpan
        );
        assert!(matches!(
            solve_coordinates(&tables, &t, &mno, 2),
            Err(Error::WeightExceedsTables { .. })
        ));
    }
}
