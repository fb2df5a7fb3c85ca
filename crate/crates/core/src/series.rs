//! Truncated power series in `u^{-1}` with algebra-valued coefficients, small
//! matrices of them, and coefficientwise checks of two-variable identities
//! whose denominators have been cleared.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::pbw::{Algebra, Element};

/// `sum_{r=0}^{N} a^{(r)} u^{-r}`, known exactly up to its order `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementSeries {
    coeffs: Vec<Element>,
}

impl ElementSeries {
    /// A series whose order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Element>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least its constant term"
        );
        ElementSeries { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Element) -> Self {
        Self::new((0..=order).map(f).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_| Element::zero())
    }

    pub fn unit(order: usize) -> Self {
        Self::constant(Element::one(), order)
    }

    pub fn constant(c: Element, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The coefficient of `u^{-r}`; reading past the order is an error.
    pub fn coeff(&self, r: usize) -> Result<&Element> {
        self.coeffs.get(r).ok_or(Error::OutOfWindow {
            index: r,
            order: self.order(),
        })
    }

    pub fn coeffs(&self) -> &[Element] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::OutOfWindow {
                index: order,
                order: self.order(),
            });
        }
        Ok(Self::new(self.coeffs[..=order].to_vec()))
    }

    fn zip(&self, other: &Self, f: impl Fn(&Element, &Element) -> Element) -> Self {
        let n = self.order().min(other.order());
        Self::from_fn(n, |r| f(&self.coeffs[r], &other.coeffs[r]))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|e| e.scale(c)).collect())
    }

    /// Cauchy product, with `self`'s coefficients on the left.
    pub fn mul(&self, other: &Self, alg: &Algebra) -> Self {
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .into_par_iter()
            .map(|r| {
                let mut acc = Element::zero();
                for p in 0..=r {
                    let (a, b) = (&self.coeffs[p], &other.coeffs[r - p]);
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_assign(&alg.multiply(a, b));
                    }
                }
                acc
            })
            .collect();
        Self::new(coeffs)
    }

    fn check_unit(&self) -> Result<()> {
        if self.coeffs[0] != Element::one() {
            return Err(Error::NonUnitConstant);
        }
        Ok(())
    }

    /// Inverse by the recursion `b^{(m)} = -sum_{r=1}^m a^{(r)} b^{(m-r)}`.
    pub fn inverse(&self, alg: &Algebra) -> Result<Self> {
        self.check_unit()?;
        let mut inv = vec![Element::one()];
        for m in 1..=self.order() {
            let mut acc = Element::zero();
            for r in 1..=m {
                acc.sub_assign(&alg.multiply(&self.coeffs[r], &inv[m - r]));
            }
            inv.push(acc);
        }
        Ok(Self::new(inv))
    }

    /// Inverse by the mirrored recursion `b^{(m)} = -sum_{r=1}^m b^{(m-r)} a^{(r)}`.
    pub fn inverse_right(&self, alg: &Algebra) -> Result<Self> {
        self.check_unit()?;
        let mut inv = vec![Element::one()];
        for m in 1..=self.order() {
            let mut acc = Element::zero();
            for r in 1..=m {
                acc.sub_assign(&alg.multiply(&inv[m - r], &self.coeffs[r]));
            }
            inv.push(acc);
        }
        Ok(Self::new(inv))
    }

    /// The series `a(sign * u + shift)`, re-expanded in `u^{-1}`.
    ///
    /// Coefficient `m >= 1` is
    /// `sign^m * sum_{r=1}^m (-1)^{m-r} C(m-1, m-r) shift^{m-r} a^{(r)}`.
    pub fn substitute_linear(&self, sign: i8, shift: &Rational) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
        let weights = substitution_weights(self.order(), sign, shift);
        Self::from_fn(self.order(), |m| {
            if m == 0 {
                return self.coeffs[0].clone();
            }
            let mut acc = Element::zero();
            for (r, w) in weights[m].iter().enumerate() {
                acc.add_scaled(&self.coeffs[r], w);
            }
            acc
        })
    }
}

/// `weights[m][r]`: coefficient of `a^{(r)}` in coefficient `m` of `a(sign*u + shift)`.
pub fn substitution_weights(order: usize, sign: i8, shift: &Rational) -> Vec<Vec<Rational>> {
    (0..=order)
        .map(|m| {
            (0..=m)
                .map(|r| {
                    if m == 0 {
                        return Rational::one();
                    }
                    if r == 0 {
                        return Rational::zero();
                    }
                    let j = (m - r) as i64;
                    let s = Rational::sign_pow(j)
                        * Rational::binomial(m as i64 - 1, j)
                        * shift.pow(j as u32);
                    if sign < 0 && m % 2 == 1 {
                        -s
                    } else {
                        s
                    }
                })
                .collect()
        })
        .collect()
}

/// A rectangular matrix of series sharing one order.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ElementSeries>,
}

impl SeriesMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ElementSeries>) -> Result<Self> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let n = entries[0].order();
        let entries = entries
            .into_iter()
            .map(|e| e.truncate(n.min(e.order())))
            .collect::<Result<Vec<_>>>()?;
        if entries.iter().any(|e| e.order() != n) {
            return Err(Error::Shape("entries have different orders".into()));
        }
        Ok(SeriesMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(size: usize, order: usize) -> Self {
        let entries = (0..size * size)
            .map(|p| {
                if p / size == p % size {
                    ElementSeries::unit(order)
                } else {
                    ElementSeries::zero(order)
                }
            })
            .collect();
        SeriesMatrix {
            rows: size,
            cols: size,
            entries,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn order(&self) -> usize {
        self.entries[0].order()
    }

    pub fn get(&self, r: usize, c: usize) -> &ElementSeries {
        &self.entries[r * self.cols + c]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(
                "cannot add matrices of different shapes".into(),
            ));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Self::new(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(
                "cannot subtract matrices of different shapes".into(),
            ));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        Self::new(self.rows, self.cols, entries)
    }

    pub fn mul(&self, other: &Self, alg: &Algebra) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let n = self.order().min(other.order());
        let entries = (0..self.rows * other.cols)
            .into_par_iter()
            .map(|p| {
                let (r, c) = (p / other.cols, p % other.cols);
                let mut acc = ElementSeries::zero(n);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(r, k).mul(other.get(k, c), alg));
                }
                acc
            })
            .collect();
        Self::new(self.rows, other.cols, entries)
    }

    fn check_square_unit(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                let want = if r == c {
                    Element::one()
                } else {
                    Element::zero()
                };
                if self.get(r, c).coeffs[0] != want {
                    return Err(Error::NonUnitConstant);
                }
            }
        }
        Ok(())
    }

    /// Two-sided inverse computed as a series with matrix coefficients:
    /// `X^{(m)} = -sum_{r=1}^m M^{(r)} X^{(m-r)}`.
    pub fn inverse(&self, alg: &Algebra) -> Result<Self> {
        self.inverse_impl(alg, false)
    }

    /// The same inverse from the mirrored recursion `X^{(m)} = -sum X^{(m-r)} M^{(r)}`.
    pub fn inverse_right(&self, alg: &Algebra) -> Result<Self> {
        self.inverse_impl(alg, true)
    }

    fn inverse_impl(&self, alg: &Algebra, mirrored: bool) -> Result<Self> {
        self.check_square_unit()?;
        let (size, n) = (self.rows, self.order());
        // levels[m][r * size + c] = X^{(m)}_{r,c}
        let mut levels: Vec<Vec<Element>> = vec![(0..size * size)
            .map(|p| {
                if p / size == p % size {
                    Element::one()
                } else {
                    Element::zero()
                }
            })
            .collect()];
        for m in 1..=n {
            let next: Vec<Element> = (0..size * size)
                .into_par_iter()
                .map(|p| {
                    let (r, c) = (p / size, p % size);
                    let mut acc = Element::zero();
                    for l in 1..=m {
                        for k in 0..size {
                            let (a, b) = if mirrored {
                                (&levels[m - l][r * size + k], &self.get(k, c).coeffs[l])
                            } else {
                                (&self.get(r, k).coeffs[l], &levels[m - l][k * size + c])
                            };
                            if !a.is_zero() && !b.is_zero() {
                                acc.sub_assign(&alg.multiply(a, b));
                            }
                        }
                    }
                    acc
                })
                .collect();
            levels.push(next);
        }
        let entries = (0..size * size)
            .map(|p| ElementSeries::from_fn(n, |m| levels[m][p].clone()))
            .collect();
        Self::new(size, size, entries)
    }
}

/// Which formal variable a series factor is expanded in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

/// A polynomial `sum c u^a v^b` in two commuting variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BiPoly(BTreeMap<(u32, u32), Rational>);

impl BiPoly {
    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = BiPoly::default();
        p.add_term(0, 0, c);
        p
    }

    /// `cu * u + cv * v + c0`.
    pub fn linear(cu: i64, cv: i64, c0: i64) -> Self {
        let mut p = BiPoly::default();
        p.add_term(1, 0, cu.into());
        p.add_term(0, 1, cv.into());
        p.add_term(0, 0, c0.into());
        p
    }

    fn add_term(&mut self, a: u32, b: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry((a, b)).or_default();
        *e += &c;
        if e.is_zero() {
            self.0.remove(&(a, b));
        }
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let mut p = BiPoly::default();
        for ((a1, b1), c1) in &self.0 {
            for ((a2, b2), c2) in &other.0 {
                p.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        p
    }

    pub fn product(factors: &[BiPoly]) -> BiPoly {
        factors.iter().fold(BiPoly::one(), |acc, f| acc.mul(f))
    }

    pub fn scale(&self, c: &Rational) -> BiPoly {
        let mut p = BiPoly::default();
        for (&(a, b), v) in &self.0 {
            p.add_term(a, b, v * c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &Rational)> {
        self.0.iter().map(|(&(a, b), c)| (a, b, c))
    }

    pub fn max_u(&self) -> u32 {
        self.0.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn max_v(&self) -> u32 {
        self.0.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn max_total(&self) -> u32 {
        self.0.keys().map(|k| k.0 + k.1).max().unwrap_or(0)
    }

    fn mentions_v(&self) -> bool {
        self.0.keys().any(|k| k.1 > 0)
    }
}

/// A series factor: the series (already substituted if needed) and its variable.
#[derive(Clone, Debug)]
pub struct SeriesFactor {
    pub series: Arc<ElementSeries>,
    pub var: Var,
}

impl SeriesFactor {
    pub fn u(series: &Arc<ElementSeries>) -> Self {
        SeriesFactor {
            series: series.clone(),
            var: Var::U,
        }
    }

    pub fn v(series: &Arc<ElementSeries>) -> Self {
        SeriesFactor {
            series: series.clone(),
            var: Var::V,
        }
    }
}

/// `poly(u, v) * f_1 * f_2 * ...`, factors multiplied left to right.
#[derive(Clone, Debug)]
pub struct ClearedTerm {
    pub poly: BiPoly,
    pub factors: Vec<SeriesFactor>,
}

impl ClearedTerm {
    pub fn new(poly: BiPoly, factors: Vec<SeriesFactor>) -> Self {
        ClearedTerm { poly, factors }
    }

    /// Coefficients of `u^{-A} v^{-B}` of the factor product, for `A + B <= cap`.
    fn product_table(&self, cap: usize, alg: &Algebra) -> BTreeMap<(usize, usize), Element> {
        let mut table: BTreeMap<(usize, usize), Element> = BTreeMap::new();
        table.insert((0, 0), Element::one());
        for f in &self.factors {
            let mut next: BTreeMap<(usize, usize), Element> = BTreeMap::new();
            for (&(a, b), e) in &table {
                let room = cap - (a + b);
                for l in 0..=room.min(f.series.order()) {
                    let c = &f.series.coeffs[l];
                    if c.is_zero() {
                        continue;
                    }
                    let key = match f.var {
                        Var::U => (a + l, b),
                        Var::V => (a, b + l),
                    };
                    let prod = alg.multiply(e, c);
                    next.entry(key).or_default().add_assign(&prod);
                }
            }
            next.retain(|_, e| !e.is_zero());
            table = next;
        }
        table
    }

    fn min_factor_order(&self) -> usize {
        self.factors
            .iter()
            .map(|f| f.series.order())
            .min()
            .unwrap_or(usize::MAX)
    }
}

/// Coefficients `u^{-a} v^{-b}` of one side of an identity over its window.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoVarWindow {
    cells: BTreeMap<(i64, i64), Element>,
    window: Window,
}

/// The cells whose coefficients are determined by tables of a given order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub min_a: i64,
    pub min_b: i64,
    /// Upper bound on `a + b`.
    pub max_total: i64,
}

impl Window {
    pub fn contains(&self, a: i64, b: i64) -> bool {
        a >= self.min_a && b >= self.min_b && a + b <= self.max_total
    }

    pub fn cells(&self) -> Vec<(i64, i64)> {
        let mut v = Vec::new();
        for a in self.min_a..=self.max_total - self.min_b {
            for b in self.min_b..=self.max_total - a {
                v.push((a, b));
            }
        }
        v
    }
}

impl TwoVarWindow {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, a: i64, b: i64) -> Result<Element> {
        if !self.window.contains(a, b) {
            return Err(Error::OutOfWindow {
                index: (a.max(0) + b.max(0)) as usize,
                order: self.window.max_total.max(0) as usize,
            });
        }
        Ok(self.cells.get(&(a, b)).cloned().unwrap_or_default())
    }
}

/// A two-variable identity `sum lhs = sum rhs` after multiplying through by
/// every denominator.
#[derive(Clone, Debug, Default)]
pub struct ClearedIdentity {
    pub lhs: Vec<ClearedTerm>,
    pub rhs: Vec<ClearedTerm>,
}

/// Outcome of a coefficientwise comparison.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub cells_checked: usize,
    pub failing_cells: usize,
    /// Total monomial count of all nonzero residual cells.
    pub residual_terms: usize,
    pub first_failure: Option<((i64, i64), Element)>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failing_cells == 0
    }
}

impl ClearedIdentity {
    fn terms(&self) -> impl Iterator<Item = &ClearedTerm> {
        self.lhs.iter().chain(&self.rhs)
    }

    /// The largest window computable when every factor series is exact to
    /// `order`: cells `(a, b)` with `a + b + d <= order`, `d` the largest total
    /// degree of any polynomial factor.
    pub fn window(&self, order: usize) -> Window {
        let order = self
            .terms()
            .map(|t| t.min_factor_order())
            .fold(order, usize::min);
        let d = self.terms().map(|t| t.poly.max_total()).max().unwrap_or(0) as i64;
        let uses_v = self
            .terms()
            .any(|t| t.poly.mentions_v() || t.factors.iter().any(|f| f.var == Var::V));
        let min_a = -(self.terms().map(|t| t.poly.max_u()).max().unwrap_or(0) as i64);
        let min_b = -(self.terms().map(|t| t.poly.max_v()).max().unwrap_or(0) as i64);
        let max_total = order as i64 - d;
        if uses_v {
            Window {
                min_a,
                min_b,
                max_total,
            }
        } else {
            // One-variable identity: only b = 0 carries information.
            Window {
                min_a,
                min_b: 0,
                max_total,
            }
        }
    }

    /// Evaluates one side over `window`.
    pub fn evaluate(terms: &[ClearedTerm], window: Window, alg: &Algebra) -> TwoVarWindow {
        let cap = (window.max_total
            + terms.iter().map(|t| t.poly.max_total()).max().unwrap_or(0) as i64)
            .max(0) as usize;
        let tables: Vec<_> = terms
            .par_iter()
            .map(|t| t.product_table(cap, alg))
            .collect();
        let mut cells: BTreeMap<(i64, i64), Element> = BTreeMap::new();
        for (a, b) in window.cells() {
            let mut acc = Element::zero();
            for (t, table) in terms.iter().zip(&tables) {
                for (al, be, c) in t.poly.terms() {
                    let (ka, kb) = (a + al as i64, b + be as i64);
                    if ka < 0 || kb < 0 {
                        continue;
                    }
                    if let Some(e) = table.get(&(ka as usize, kb as usize)) {
                        acc.add_scaled(e, c);
                    }
                }
            }
            if !acc.is_zero() {
                cells.insert((a, b), acc);
            }
        }
        TwoVarWindow { cells, window }
    }

    /// Compares both sides on every cell of the window for tables of `order`.
    pub fn check(&self, order: usize, alg: &Algebra) -> Result<IdentityCheck> {
        let window = self.window(order);
        if window.max_total < window.min_a + window.min_b {
            return Err(Error::OutOfWindow { index: 0, order });
        }
        let (l, r) = rayon::join(
            || Self::evaluate(&self.lhs, window, alg),
            || Self::evaluate(&self.rhs, window, alg),
        );
        let mut out = IdentityCheck {
            cells_checked: 0,
            failing_cells: 0,
            residual_terms: 0,
            first_failure: None,
        };
        for (a, b) in window.cells() {
            out.cells_checked += 1;
            let diff = &l.get(a, b)? - &r.get(a, b)?;
            if !diff.is_zero() {
                out.failing_cells += 1;
                out.residual_terms += diff.len();
                if out.first_failure.is_none() {
                    out.first_failure = Some(((a, b), diff));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbw::{gl1_spec, Monomial, RttSpec};
    use crate::GeneratorId;

    fn y3() -> Algebra {
        Algebra::new(RttSpec::new(3))
    }

    fn t_series(alg: &Algebra, i: i8, j: i8, order: usize) -> ElementSeries {
        ElementSeries::from_fn(order, |r| {
            if r == 0 {
                if i == j {
                    Element::one()
                } else {
                    Element::zero()
                }
            } else {
                alg.gen_element(GeneratorId::T { i, j, r: r as u32 })
            }
        })
    }

    #[test]
    fn unit_is_neutral_and_products_follow_cauchy() {
        let alg = y3();
        let a = t_series(&alg, -1, 0, 4);
        let b = t_series(&alg, 1, 1, 4);
        assert_eq!(a.mul(&ElementSeries::unit(4), &alg), a);
        let ab = a.mul(&b, &alg);
        for r in 0..=4 {
            let mut direct = Element::zero();
            for p in 0..=r {
                direct.add_assign(&alg.multiply(a.coeff(p).unwrap(), b.coeff(r - p).unwrap()));
            }
            assert_eq!(ab.coeff(r).unwrap(), &direct);
        }
    }

    #[test]
    fn reading_past_the_window_is_an_error() {
        let alg = y3();
        let a = t_series(&alg, 0, 0, 3);
        assert!(matches!(
            a.coeff(4),
            Err(Error::OutOfWindow { index: 4, order: 3 })
        ));
        let short = t_series(&alg, 1, 0, 2);
        assert_eq!(a.mul(&short, &alg).order(), 2);
        assert!(a.truncate(5).is_err());
    }

    #[test]
    fn inverses_agree_from_both_sides() {
        let alg = y3();
        let a = t_series(&alg, 1, 1, 4);
        let left = a.inverse(&alg).unwrap();
        let right = a.inverse_right(&alg).unwrap();
        assert_eq!(left, right);
        assert_eq!(a.mul(&left, &alg), ElementSeries::unit(4));
        assert_eq!(left.mul(&a, &alg), ElementSeries::unit(4));
        assert_eq!(left.coeff(1).unwrap(), &a.coeff(1).unwrap().neg());
        assert_eq!(
            ElementSeries::unit(3).inverse(&alg).unwrap(),
            ElementSeries::unit(3)
        );
        assert!(matches!(
            t_series(&alg, 1, 0, 2).inverse(&alg),
            Err(Error::NonUnitConstant)
        ));
    }

    #[test]
    fn substitution_special_cases_and_round_trip() {
        let alg = y3();
        let a = t_series(&alg, 0, 1, 5);
        assert_eq!(a.substitute_linear(1, &Rational::zero()), a);
        let neg = a.substitute_linear(-1, &Rational::zero());
        for m in 0..=5 {
            let sign = Rational::sign_pow(m as i64);
            assert_eq!(neg.coeff(m).unwrap(), &a.coeff(m).unwrap().scale(&sign));
        }
        let back = a
            .substitute_linear(1, &Rational::from_int(2))
            .substitute_linear(1, &Rational::from_int(-2));
        assert_eq!(back, a);
    }

    #[test]
    fn substitution_is_multiplicative() {
        let alg = y3();
        let a = t_series(&alg, -1, 1, 4);
        let b = t_series(&alg, 1, -1, 4);
        for (sign, shift) in [(1, -1), (-1, 0), (-1, 2)] {
            let c = Rational::from_int(shift);
            let lhs = a.mul(&b, &alg).substitute_linear(sign, &c);
            let rhs = a
                .substitute_linear(sign, &c)
                .mul(&b.substitute_linear(sign, &c), &alg);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn substitution_matches_direct_expansion() {
        // a(u) = u^{-1}: a(u + c) = sum_j (-c)^j u^{-1-j}.
        let alg = Algebra::new(gl1_spec());
        let e = Element::one();
        let a = ElementSeries::from_fn(5, |r| if r == 1 { e.clone() } else { Element::zero() });
        let c = Rational::new(3, 2);
        let s = a.substitute_linear(1, &c);
        for m in 1..=5 {
            let want = (-&c).pow(m as u32 - 1);
            assert_eq!(s.coeff(m).unwrap().as_scalar().unwrap(), want);
        }
        let _ = alg;
    }

    #[test]
    fn matrix_inverse_and_associativity() {
        let alg = y3();
        let idx = [-1i8, 1];
        let entries = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| t_series(&alg, i, j, 3))
            .collect();
        let m = SeriesMatrix::new(2, 2, entries).unwrap();
        let inv = m.inverse(&alg).unwrap();
        assert_eq!(inv, m.inverse_right(&alg).unwrap());
        assert_eq!(m.mul(&inv, &alg).unwrap(), SeriesMatrix::identity(2, 3));
        assert_eq!(inv.mul(&m, &alg).unwrap(), SeriesMatrix::identity(2, 3));
        let id = SeriesMatrix::identity(2, 3);
        assert_eq!(id.mul(&id, &alg).unwrap(), id);

        let row = SeriesMatrix::new(
            1,
            2,
            vec![t_series(&alg, 0, -1, 3), t_series(&alg, 0, 1, 3)],
        )
        .unwrap();
        let col = SeriesMatrix::new(
            2,
            1,
            vec![t_series(&alg, -1, 0, 3), t_series(&alg, 1, 0, 3)],
        )
        .unwrap();
        let left = row.mul(&m, &alg).unwrap().mul(&col, &alg).unwrap();
        let right = row.mul(&m.mul(&col, &alg).unwrap(), &alg).unwrap();
        assert_eq!(left, right);
        assert!(row.mul(&row, &alg).is_err());
        assert!(row.inverse(&alg).is_err());
    }

    #[test]
    fn empty_identity_passes() {
        let alg = y3();
        let id = ClearedIdentity::default();
        let res = id.check(4, &alg).unwrap();
        assert!(res.passed());
    }

    #[test]
    fn rtt_relation_holds_after_clearing() {
        // (u - v)[T_ij(u), T_kl(v)] = T_kj(u)T_il(v) - T_kj(v)T_il(u)
        let alg = y3();
        let order = 5;
        let s = |i, j| Arc::new(t_series(&alg, i, j, order));
        for &(i, j, k, l) in &[(-1, 0, 0, 1), (1, 1, -1, -1), (0, 0, 0, 0), (1, -1, -1, 1)] {
            let (tij, tkl, tkj, til) = (s(i, j), s(k, l), s(k, j), s(i, l));
            let uv = BiPoly::linear(1, -1, 0);
            let id = ClearedIdentity {
                lhs: vec![
                    ClearedTerm::new(
                        uv.clone(),
                        vec![SeriesFactor::u(&tij), SeriesFactor::v(&tkl)],
                    ),
                    ClearedTerm::new(
                        uv.scale(&(-1).into()),
                        vec![SeriesFactor::v(&tkl), SeriesFactor::u(&tij)],
                    ),
                ],
                rhs: vec![
                    ClearedTerm::new(
                        BiPoly::one(),
                        vec![SeriesFactor::u(&tkj), SeriesFactor::v(&til)],
                    ),
                    ClearedTerm::new(
                        BiPoly::constant((-1).into()),
                        vec![SeriesFactor::v(&tkj), SeriesFactor::u(&til)],
                    ),
                ],
            };
            let res = id.check(order, &alg).unwrap();
            assert!(res.passed(), "{:?}", res.first_failure);
            assert!(res.cells_checked > 10);

            let mut broken = id.clone();
            broken.rhs.pop();
            assert!(!broken.check(order, &alg).unwrap().passed());
        }
    }

    #[test]
    fn window_respects_polynomial_degree() {
        let alg = y3();
        let a = Arc::new(t_series(&alg, 0, 0, 4));
        let id = ClearedIdentity {
            lhs: vec![ClearedTerm::new(
                BiPoly::linear(1, 0, 0).mul(&BiPoly::linear(0, 1, 0)),
                vec![SeriesFactor::u(&a)],
            )],
            rhs: vec![],
        };
        let w = id.window(4);
        assert_eq!(
            w,
            Window {
                min_a: -1,
                min_b: -1,
                max_total: 2
            }
        );
        let side = ClearedIdentity::evaluate(&id.lhs, w, &alg);
        assert!(side.get(3, 0).is_err());
        // u v a(u) has v^{+1}: cell (a, -1) carries a^{(a+1)}.
        assert_eq!(
            side.get(0, -1).unwrap(),
            alg.gen_element(GeneratorId::T { i: 0, j: 0, r: 1 })
        );
        assert_eq!(side.get(0, 0).unwrap(), Element::zero());
        let _ = Monomial::one();
    }
}
