//! Normal forms in filtered algebras presented by straightening rules.
//!
//! An [`AlgebraSpec`] lists generators (densely numbered by [`Gen`], whose
//! numeric order is the PBW order), their weights, and the commutator of any
//! out-of-order pair. The commutator must have strictly smaller weight than
//! the pair, which makes normal ordering terminate. [`Algebra`] wraps a spec
//! with the memo tables that make repeated multiplication affordable.

use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use rayon::prelude::*;
use rustc_hash::{FxBuildHasher, FxHashMap};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exact::{Rational, ScalarPoly};

/// Dense generator index. The numeric order is the algebra's PBW order.
pub type Gen = u16;

/// Symbolic name of a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorId {
    /// `T_{i,j}^{(r)}` of the Yangian, `r >= 1`.
    T { i: i8, j: i8, r: u32 },
    /// Basis element of a Lie algebra, by position in its basis.
    Lie(u16),
}

/// A word in the generators. Normal monomials are weakly increasing.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(SmallVec<[Gen; 8]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn from_slice(word: &[Gen]) -> Self {
        Monomial(SmallVec::from_slice(word))
    }

    pub fn gens(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_normal(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    fn appended(&self, g: Gen) -> Monomial {
        let mut v = self.0.clone();
        v.push(g);
        Monomial(v)
    }

    fn prefix(&self) -> Monomial {
        Monomial(SmallVec::from_slice(&self.0[..self.0.len() - 1]))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

type LinComb = FxHashMap<Monomial, Rational>;

fn add_into(map: &mut LinComb, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            let v = e.get_mut();
            *v += &c;
            if v.is_zero() {
                e.remove();
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

fn merge_scaled(dst: &mut LinComb, src: &LinComb, c: &Rational) {
    for (m, v) in src {
        add_into(dst, m.clone(), v * c);
    }
}

/// A finite combination of normal monomials with coefficients in Q[x].
///
/// Stored as one map per power of the central variable `x`: the element is
/// `sum_k x^k * parts[k]`. Trailing empty parts are trimmed, so equality is
/// literal structural equality.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Element {
    parts: Vec<LinComb>,
}

impl Element {
    pub fn zero() -> Self {
        Element { parts: Vec::new() }
    }

    pub fn one() -> Self {
        Self::scalar(Rational::one())
    }

    pub fn scalar(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn generator(g: Gen) -> Self {
        Self::term(Monomial::from_slice(&[g]), Rational::one())
    }

    /// `c * m`, where `m` must already be normal.
    pub fn term(m: Monomial, c: Rational) -> Self {
        debug_assert!(m.is_normal());
        let mut e = Element::zero();
        e.add_term(m, 0, c);
        e
    }

    /// `p(x) * self` for a scalar polynomial `p`.
    pub fn scale_poly(&self, p: &ScalarPoly) -> Element {
        let mut out = Element::zero();
        for (k, c) in p.terms() {
            for (xk, part) in self.parts.iter().enumerate() {
                let dst = out.part_mut(k + xk);
                merge_scaled(dst, part, c);
            }
        }
        out.trim();
        out
    }

    fn part_mut(&mut self, k: usize) -> &mut LinComb {
        if self.parts.len() <= k {
            self.parts.resize_with(k + 1, LinComb::default);
        }
        &mut self.parts[k]
    }

    fn trim(&mut self) {
        while self.parts.last().is_some_and(|p| p.is_empty()) {
            self.parts.pop();
        }
    }

    /// Adds `c * x^xpow * m`; `m` must be normal.
    pub fn add_term(&mut self, m: Monomial, xpow: usize, c: Rational) {
        add_into(self.part_mut(xpow), m, c);
        self.trim();
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of stored `(monomial, x-power)` terms.
    pub fn len(&self) -> usize {
        self.parts.iter().map(|p| p.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Highest power of `x` present.
    pub fn x_degree(&self) -> Option<usize> {
        self.parts.len().checked_sub(1)
    }

    /// Coefficient of a monomial, as a polynomial in `x`.
    pub fn coefficient(&self, m: &Monomial) -> ScalarPoly {
        ScalarPoly::from_coeffs(
            self.parts
                .iter()
                .map(|p| p.get(m).cloned().unwrap_or_default())
                .collect(),
        )
    }

    /// Terms in canonical order: by monomial, then by power of `x`.
    pub fn terms(&self) -> Vec<(&Monomial, usize, &Rational)> {
        let mut v: Vec<_> = self
            .parts
            .iter()
            .enumerate()
            .flat_map(|(k, p)| p.iter().map(move |(m, c)| (m, k, c)))
            .collect();
        v.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        v
    }

    /// The part multiplying `x^k`, as an x-free element.
    pub fn x_part(&self, k: usize) -> Element {
        match self.parts.get(k) {
            Some(p) if !p.is_empty() => Element {
                parts: vec![p.clone()],
            },
            _ => Element::zero(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            parts: self
                .parts
                .iter()
                .map(|p| p.iter().map(|(m, v)| (m.clone(), v * c)).collect())
                .collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Element, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (k, p) in other.parts.iter().enumerate() {
            merge_scaled(self.part_mut(k), p, c);
        }
        self.trim();
    }

    pub fn add_assign(&mut self, other: &Element) {
        self.add_scaled(other, &Rational::one());
    }

    pub fn sub_assign(&mut self, other: &Element) {
        self.add_scaled(other, &Rational::from_int(-1));
    }

    pub fn neg(&self) -> Element {
        self.scale(&Rational::from_int(-1))
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = (&'a Element, Rational)>) -> Element {
        let mut acc = Element::zero();
        for (e, c) in items {
            acc.add_scaled(e, &c);
        }
        acc
    }

    /// The scalar value if this element is `c * 1`.
    pub fn as_scalar(&self) -> Option<Rational> {
        match self.parts.as_slice() {
            [] => Some(Rational::zero()),
            [p] if p.len() == 1 => p.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }
}

impl std::ops::Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl std::ops::Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, k, c)) in terms.into_iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}{m:?}")?;
            if k > 0 {
                write!(f, "x^{k}")?;
            }
        }
        Ok(())
    }
}

/// A presented filtered algebra.
pub trait AlgebraSpec: Send + Sync {
    fn name(&self) -> String;

    fn weight(&self, g: Gen) -> u32;

    fn generator(&self, g: Gen) -> GeneratorId;

    fn index_of(&self, id: GeneratorId) -> Option<Gen>;

    fn label(&self, g: Gen) -> String;

    /// Inverse of [`AlgebraSpec::label`].
    fn parse_label(&self, s: &str) -> Option<Gen>;

    /// The commutator `[g, h]` for `g > h`, in normal form.
    ///
    /// Implementations may call back into `algebra` for products whose
    /// weight is strictly below `weight(g) + weight(h)`.
    fn straighten(&self, g: Gen, h: Gen, algebra: &Algebra) -> Element;
}

type ProductTable = DashMap<(Monomial, Gen), Arc<[(Monomial, Rational)]>, FxBuildHasher>;

/// A presented algebra together with its straightening memo tables.
///
/// Both tables are filled lazily and are safe to share across threads; all
/// entries are pure functions of their keys.
pub struct Algebra {
    spec: Box<dyn AlgebraSpec>,
    brackets: DashMap<(Gen, Gen), Arc<Element>, FxBuildHasher>,
    products: ProductTable,
}

/// Below this many right-factor monomials a product runs on one thread.
const PAR_THRESHOLD: usize = 24;

impl Algebra {
    pub fn new(spec: impl AlgebraSpec + 'static) -> Self {
        Algebra {
            spec: Box::new(spec),
            brackets: DashMap::with_hasher(FxBuildHasher),
            products: DashMap::with_hasher(FxBuildHasher),
        }
    }

    pub fn spec(&self) -> &dyn AlgebraSpec {
        &*self.spec
    }

    pub fn gen(&self, id: GeneratorId) -> Gen {
        self.spec
            .index_of(id)
            .unwrap_or_else(|| panic!("{id:?} is not a generator of {}", self.spec.name()))
    }

    pub fn gen_element(&self, id: GeneratorId) -> Element {
        Element::generator(self.gen(id))
    }

    pub fn monomial_weight(&self, m: &Monomial) -> u32 {
        m.gens().iter().map(|&g| self.spec.weight(g)).sum()
    }

    /// Largest monomial weight in `e`, or `None` for zero.
    pub fn weight_of(&self, e: &Element) -> Option<u32> {
        e.parts
            .iter()
            .flat_map(|p| p.keys())
            .map(|m| self.monomial_weight(m))
            .max()
    }

    /// Number of memoized `(monomial, generator)` products and generator brackets.
    pub fn cache_sizes(&self) -> (usize, usize) {
        (self.products.len(), self.brackets.len())
    }

    /// The memoized commutator `[g, h]` for `g > h`.
    pub fn bracket(&self, g: Gen, h: Gen) -> Arc<Element> {
        debug_assert!(g > h);
        if let Some(e) = self.brackets.get(&(g, h)) {
            return e.clone();
        }
        let e = Arc::new(self.spec.straighten(g, h, self));
        debug_assert!(
            self.weight_of(&e)
                .is_none_or(|w| w < self.spec.weight(g) + self.spec.weight(h)),
            "straightening rule does not lower weight"
        );
        self.brackets.insert((g, h), e.clone());
        e
    }

    /// Adds `c * (m * h)` to `out`, with `m` normal.
    fn times_gen_into(&self, m: &Monomial, h: Gen, c: &Rational, out: &mut LinComb) {
        match m.gens().last() {
            None => add_into(out, Monomial::from_slice(&[h]), c.clone()),
            Some(&g) if g <= h => add_into(out, m.appended(h), c.clone()),
            Some(_) => {
                let prod = self.mono_gen(m, h);
                for (t, v) in prod.iter() {
                    add_into(out, t.clone(), v * c);
                }
            }
        }
    }

    /// `m * h` for a normal `m` whose last generator is greater than `h`.
    fn mono_gen(&self, m: &Monomial, h: Gen) -> Arc<[(Monomial, Rational)]> {
        let key = (m.clone(), h);
        if let Some(v) = self.products.get(&key) {
            return v.clone();
        }
        let g = *m.gens().last().expect("nonempty monomial");
        let prefix = m.prefix();
        let one = Rational::one();
        let mut acc = LinComb::default();

        // prefix * g * h = (prefix * h) * g + prefix * [g, h]
        let mut ph = LinComb::default();
        self.times_gen_into(&prefix, h, &one, &mut ph);
        for (t, v) in &ph {
            self.times_gen_into(t, g, v, &mut acc);
        }
        let br = self.bracket(g, h);
        if let Some(part) = br.parts.first() {
            for (word, v) in part {
                let mut cur = LinComb::default();
                cur.insert(prefix.clone(), v.clone());
                for &x in word.gens() {
                    cur = self.lin_times_gen(&cur, x);
                }
                for (t, w) in cur {
                    add_into(&mut acc, t, w);
                }
            }
        }
        let v: Arc<[(Monomial, Rational)]> = acc.into_iter().collect();
        self.products.insert(key, v.clone());
        v
    }

    fn lin_times_gen(&self, a: &LinComb, h: Gen) -> LinComb {
        let mut out = LinComb::default();
        for (m, c) in a {
            self.times_gen_into(m, h, c, &mut out);
        }
        out
    }

    fn lin_mul(&self, a: &LinComb, b: &LinComb) -> LinComb {
        if a.is_empty() || b.is_empty() {
            return LinComb::default();
        }
        let mut entries: Vec<(&Monomial, &Rational)> = b.iter().collect();
        entries.sort_unstable_by(|x, y| x.0.cmp(y.0));
        let mut out = LinComb::default();
        self.trie_mul(a, &entries, 0, &mut out);
        out
    }

    /// Multiplies `cur` by every monomial in `entries` (which share their
    /// first `depth` generators), sharing common prefixes.
    fn trie_mul(
        &self,
        cur: &LinComb,
        entries: &[(&Monomial, &Rational)],
        depth: usize,
        out: &mut LinComb,
    ) {
        let mut start = 0;
        while start < entries.len() && entries[start].0.len() == depth {
            merge_scaled(out, cur, entries[start].1);
            start += 1;
        }
        let rest = &entries[start..];
        let mut groups: Vec<(Gen, &[(&Monomial, &Rational)])> = Vec::new();
        let mut i = 0;
        while i < rest.len() {
            let g = rest[i].0.gens()[depth];
            let mut j = i + 1;
            while j < rest.len() && rest[j].0.gens()[depth] == g {
                j += 1;
            }
            groups.push((g, &rest[i..j]));
            i = j;
        }
        if depth == 0 && rest.len() >= PAR_THRESHOLD && groups.len() > 1 {
            let partials: Vec<LinComb> = groups
                .par_iter()
                .map(|(g, grp)| {
                    let next = self.lin_times_gen(cur, *g);
                    let mut o = LinComb::default();
                    self.trie_mul(&next, grp, depth + 1, &mut o);
                    o
                })
                .collect();
            let one = Rational::one();
            for p in &partials {
                merge_scaled(out, p, &one);
            }
        } else {
            for (g, grp) in groups {
                let next = self.lin_times_gen(cur, g);
                self.trie_mul(&next, grp, depth + 1, out);
            }
        }
    }

    /// The product `a * b` in normal form. Coefficients in Q[x] are central.
    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        let mut out = Element::zero();
        for (xa, pa) in a.parts.iter().enumerate() {
            for (xb, pb) in b.parts.iter().enumerate() {
                let prod = self.lin_mul(pa, pb);
                let dst = out.part_mut(xa + xb);
                if dst.is_empty() {
                    *dst = prod;
                } else {
                    merge_scaled(dst, &prod, &Rational::one());
                }
            }
        }
        out.trim();
        out
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, a: &Element, b: &Element) -> Element {
        let mut ab = self.multiply(a, b);
        ab.sub_assign(&self.multiply(b, a));
        ab
    }

    pub fn product_of(&self, factors: &[&Element]) -> Element {
        let mut acc = Element::one();
        for f in factors {
            acc = self.multiply(&acc, f);
        }
        acc
    }

    /// Normal form of a raw linear combination of (possibly unordered) words.
    pub fn normal_form(&self, raw: &[(Rational, Vec<Gen>)]) -> Element {
        let mut acc = LinComb::default();
        for (c, word) in raw {
            let mut cur = LinComb::default();
            cur.insert(Monomial::one(), c.clone());
            for &g in word {
                cur = self.lin_times_gen(&cur, g);
            }
            merge_scaled(&mut acc, &cur, &Rational::one());
        }
        let mut e = Element { parts: vec![acc] };
        e.trim();
        e
    }

    /// Normal form by naive rewriting of adjacent inversions, without the
    /// product memo table. Used to witness confluence.
    pub fn rewrite_normal_form(
        &self,
        raw: &[(Rational, Vec<Gen>)],
        strategy: RewriteStrategy,
    ) -> Element {
        let mut pending: Vec<(Rational, Vec<Gen>)> = raw.to_vec();
        let mut done = LinComb::default();
        while let Some((c, w)) = pending.pop() {
            if c.is_zero() {
                continue;
            }
            let inversions = (0..w.len().saturating_sub(1)).filter(|&p| w[p] > w[p + 1]);
            let pos = match strategy {
                RewriteStrategy::Leftmost => inversions.min(),
                RewriteStrategy::Rightmost => inversions.max(),
            };
            let Some(p) = pos else {
                add_into(&mut done, Monomial::from_slice(&w), c);
                continue;
            };
            let (g, h) = (w[p], w[p + 1]);
            let mut swapped = w.clone();
            swapped.swap(p, p + 1);
            pending.push((c.clone(), swapped));
            let br = self.bracket(g, h);
            if let Some(part) = br.parts.first() {
                for (word, v) in part {
                    let mut nw = w[..p].to_vec();
                    nw.extend_from_slice(word.gens());
                    nw.extend_from_slice(&w[p + 2..]);
                    pending.push((&c * v, nw));
                }
            }
        }
        let mut e = Element { parts: vec![done] };
        e.trim();
        e
    }

    /// Canonical text form: terms in canonical order joined by ` + `, each
    /// `coef*gen*...*x^k`.
    pub fn format(&self, e: &Element) -> String {
        let terms = e.terms();
        if terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (m, k, c)) in terms.into_iter().enumerate() {
            if n > 0 {
                s.push_str(" + ");
            }
            s.push_str(&c.to_string());
            for &g in m.gens() {
                s.push('*');
                s.push_str(&self.spec.label(g));
            }
            match k {
                0 => {}
                1 => s.push_str("*x"),
                _ => s.push_str(&format!("*x^{k}")),
            }
        }
        s
    }

    /// Parses the canonical text form; words are normal-ordered on input.
    pub fn parse(&self, s: &str) -> Result<Element> {
        let s = s.trim();
        if s == "0" {
            return Ok(Element::zero());
        }
        let mut out = Element::zero();
        for term in s.split(" + ") {
            let mut toks = term.split('*');
            let c: Rational = toks
                .next()
                .ok_or_else(|| Error::Parse(format!("empty term in `{s}`")))?
                .parse()?;
            let mut word = Vec::new();
            let mut xpow = 0usize;
            for t in toks {
                if t == "x" {
                    xpow += 1;
                } else if let Some(k) = t.strip_prefix("x^") {
                    xpow += k
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad power `{t}`")))?;
                } else {
                    word.push(
                        self.spec
                            .parse_label(t)
                            .ok_or_else(|| Error::Parse(format!("unknown generator `{t}`")))?,
                    );
                }
            }
            let nf = self.normal_form(&[(c, word)]);
            let shifted = nf.scale_poly(&ScalarPoly::monomial(Rational::one(), xpow));
            out.add_assign(&shifted);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteStrategy {
    Leftmost,
    Rightmost,
}

/// Index set `{-k..k}` for odd `n`, without 0 for even `n`.
pub fn index_set(n: usize) -> Vec<i8> {
    let k = (n / 2) as i8;
    (-k..=k).filter(|&i| n % 2 == 1 || i != 0).collect()
}

/// The Yangian `Y_n` in its RTT presentation.
///
/// Generators `T_{i,j}^{(r)}` have weight `r` and are ordered
/// lexicographically by `(r, i, j)`.
pub struct RttSpec {
    n: usize,
    index: Vec<i8>,
    max_level: u32,
}

impl RttSpec {
    pub fn new(n: usize) -> Self {
        let max_level = (Gen::MAX as usize / (n * n)) as u32;
        RttSpec {
            n,
            index: index_set(n),
            max_level,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[i8] {
        &self.index
    }

    fn pos(&self, i: i8) -> Option<usize> {
        self.index.iter().position(|&x| x == i)
    }

    /// The commutator `[T_{i,j}^{(r)}, T_{k,l}^{(s)}]` as raw quadratic words
    /// (level-0 factors already replaced by Kronecker deltas):
    /// `sum_{a=1}^{min(r,s)} T_{k,j}^{(a-1)} T_{i,l}^{(r+s-a)} - T_{k,j}^{(r+s-a)} T_{i,l}^{(a-1)}`.
    pub fn raw_commutator(
        &self,
        (i, j, r): (i8, i8, u32),
        (k, l, s): (i8, i8, u32),
    ) -> Vec<(Rational, Vec<GeneratorId>)> {
        let mut out = Vec::new();
        let mut push = |c: i64, first: (i8, i8, u32), second: (i8, i8, u32)| {
            let mut coef = c;
            let mut word = Vec::new();
            for (p, q, lvl) in [first, second] {
                if lvl == 0 {
                    if p != q {
                        coef = 0;
                    }
                } else {
                    word.push(GeneratorId::T { i: p, j: q, r: lvl });
                }
            }
            if coef != 0 {
                out.push((Rational::from_int(coef), word));
            }
        };
        for a in 1..=r.min(s) {
            push(1, (k, j, a - 1), (i, l, r + s - a));
            push(-1, (k, j, r + s - a), (i, l, a - 1));
        }
        out
    }
}

impl AlgebraSpec for RttSpec {
    fn name(&self) -> String {
        format!("Y_{} (RTT)", self.n)
    }

    fn weight(&self, g: Gen) -> u32 {
        g as u32 / (self.n * self.n) as u32 + 1
    }

    fn generator(&self, g: Gen) -> GeneratorId {
        let nn = self.n * self.n;
        let g = g as usize;
        let r = (g / nn + 1) as u32;
        let rem = g % nn;
        GeneratorId::T {
            i: self.index[rem / self.n],
            j: self.index[rem % self.n],
            r,
        }
    }

    fn index_of(&self, id: GeneratorId) -> Option<Gen> {
        match id {
            GeneratorId::T { i, j, r } if r >= 1 && r <= self.max_level => {
                let (pi, pj) = (self.pos(i)?, self.pos(j)?);
                Some(((r as usize - 1) * self.n * self.n + pi * self.n + pj) as Gen)
            }
            _ => None,
        }
    }

    fn label(&self, g: Gen) -> String {
        match self.generator(g) {
            GeneratorId::T { i, j, r } => format!("T[{i},{j},{r}]"),
            GeneratorId::Lie(_) => unreachable!(),
        }
    }

    fn parse_label(&self, s: &str) -> Option<Gen> {
        let inner = s.strip_prefix("T[")?.strip_suffix(']')?;
        let mut it = inner.split(',');
        let i = it.next()?.parse().ok()?;
        let j = it.next()?.parse().ok()?;
        let r = it.next()?.parse().ok()?;
        if it.next().is_some() {
            return None;
        }
        self.index_of(GeneratorId::T { i, j, r })
    }

    fn straighten(&self, g: Gen, h: Gen, algebra: &Algebra) -> Element {
        let (GeneratorId::T { i, j, r }, GeneratorId::T { i: k, j: l, r: s }) =
            (self.generator(g), self.generator(h))
        else {
            unreachable!()
        };
        let raw: Vec<(Rational, Vec<Gen>)> = self
            .raw_commutator((i, j, r), (k, l, s))
            .into_iter()
            .map(|(c, w)| {
                (
                    c,
                    w.into_iter().map(|id| self.index_of(id).unwrap()).collect(),
                )
            })
            .collect();
        algebra.normal_form(&raw)
    }
}

/// A finite-dimensional Lie algebra with every basis element of weight 1.
///
/// `table[a][b]` lists `(c, coefficient)` with `[e_a, e_b] = sum coefficient * e_c`.
pub struct LieSpec {
    name: String,
    labels: Vec<String>,
    table: Vec<Vec<Vec<(Gen, Rational)>>>,
}

impl LieSpec {
    /// Validates antisymmetry and the Jacobi identity before accepting the table.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        table: Vec<Vec<Vec<(Gen, Rational)>>>,
    ) -> Result<Self> {
        let dim = labels.len();
        if table.len() != dim || table.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidLieTable("table is not dim x dim".into()));
        }
        let vec_of = |entries: &[(Gen, Rational)]| {
            let mut v = vec![Rational::zero(); dim];
            for (g, c) in entries {
                v[*g as usize] += c;
            }
            v
        };
        let bracket_vec = |x: &[Rational], y: &[Rational]| {
            let mut out = vec![Rational::zero(); dim];
            for a in 0..dim {
                for b in 0..dim {
                    let w = &x[a] * &y[b];
                    if w.is_zero() {
                        continue;
                    }
                    for (c, k) in &table[a][b] {
                        out[*c as usize] += &(&w * k);
                    }
                }
            }
            out
        };
        for a in 0..dim {
            if table[a][a].iter().any(|(_, c)| !c.is_zero())
                && vec_of(&table[a][a]).iter().any(|c| !c.is_zero())
            {
                return Err(Error::InvalidLieTable(format!("[{0},{0}] != 0", labels[a])));
            }
            for b in 0..dim {
                let ab = vec_of(&table[a][b]);
                let ba = vec_of(&table[b][a]);
                if ab.iter().zip(&ba).any(|(p, q)| !(p + q).is_zero()) {
                    return Err(Error::InvalidLieTable(format!(
                        "antisymmetry fails for ({}, {})",
                        labels[a], labels[b]
                    )));
                }
            }
        }
        let basis = |a: usize| {
            let mut v = vec![Rational::zero(); dim];
            v[a] = Rational::one();
            v
        };
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let (x, y, z) = (basis(a), basis(b), basis(c));
                    let t1 = bracket_vec(&x, &bracket_vec(&y, &z));
                    let t2 = bracket_vec(&y, &bracket_vec(&z, &x));
                    let t3 = bracket_vec(&z, &bracket_vec(&x, &y));
                    if (0..dim).any(|i| !(&(&t1[i] + &t2[i]) + &t3[i]).is_zero()) {
                        return Err(Error::InvalidLieTable(format!(
                            "Jacobi fails for ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(LieSpec {
            name: name.into(),
            labels,
            table,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn bracket_entries(&self, a: Gen, b: Gen) -> &[(Gen, Rational)] {
        &self.table[a as usize][b as usize]
    }
}

impl AlgebraSpec for LieSpec {
    fn name(&self) -> String {
        format!("U({})", self.name)
    }

    fn weight(&self, _g: Gen) -> u32 {
        1
    }

    fn generator(&self, g: Gen) -> GeneratorId {
        GeneratorId::Lie(g)
    }

    fn index_of(&self, id: GeneratorId) -> Option<Gen> {
        match id {
            GeneratorId::Lie(g) if (g as usize) < self.labels.len() => Some(g),
            _ => None,
        }
    }

    fn label(&self, g: Gen) -> String {
        self.labels[g as usize].clone()
    }

    fn parse_label(&self, s: &str) -> Option<Gen> {
        self.labels.iter().position(|l| l == s).map(|p| p as Gen)
    }

    fn straighten(&self, g: Gen, h: Gen, _algebra: &Algebra) -> Element {
        let mut e = Element::zero();
        for (c, k) in &self.table[g as usize][h as usize] {
            e.add_term(Monomial::from_slice(&[*c]), 0, k.clone());
        }
        e
    }
}

/// `U(gl_1)`: one central generator, so the enveloping algebra is `Q[e]`.
pub fn gl1_spec() -> LieSpec {
    LieSpec::new("gl_1", vec!["e[0,0]".into()], vec![vec![vec![]]]).expect("abelian table")
}

/// A 3x3 matrix with rows and columns indexed by `{-1, 0, 1}`.
pub type Mat3 = [[Rational; 3]; 3];

fn mat_unit(i: i8, j: i8) -> Mat3 {
    let mut m: Mat3 = Default::default();
    m[(i + 1) as usize][(j + 1) as usize] = Rational::one();
    m
}

/// The matrix `f_{i,j} = e_{i,j} - e_{-j,-i}` in `gl_3`.
pub fn so3_matrix(i: i8, j: i8) -> Mat3 {
    let mut m = mat_unit(i, j);
    let n = mat_unit(-j, -i);
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] -= &n[r][c];
        }
    }
    m
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut m: Mat3 = Default::default();
    for r in 0..3 {
        for c in 0..3 {
            for k in 0..3 {
                m[r][c] += &(&a[r][k] * &b[k][c]);
            }
        }
    }
    m
}

/// `ab - ba`.
pub fn mat_commutator(a: &Mat3, b: &Mat3) -> Mat3 {
    let (ab, ba) = (mat_mul(a, b), mat_mul(b, a));
    let mut comm: Mat3 = Default::default();
    for r in 0..3 {
        for c in 0..3 {
            comm[r][c] = &ab[r][c] - &ba[r][c];
        }
    }
    comm
}

/// The `so_3` basis `f_{-1,-1}, f_{-1,0}, f_{0,-1}` used throughout.
pub const SO3_BASIS: [(i8, i8); 3] = [(-1, -1), (-1, 0), (0, -1)];

/// Coordinates of an `so_3` matrix in [`SO3_BASIS`], or `None` if the matrix
/// is not in the span.
pub fn so3_coordinates(m: &Mat3) -> Option<Vec<(Gen, Rational)>> {
    let coords: Vec<Rational> = SO3_BASIS
        .iter()
        .map(|&(i, j)| m[(i + 1) as usize][(j + 1) as usize].clone())
        .collect();
    let mut rebuilt: Mat3 = Default::default();
    for (b, c) in coords.iter().enumerate() {
        let (i, j) = SO3_BASIS[b];
        let f = so3_matrix(i, j);
        for r in 0..3 {
            for col in 0..3 {
                rebuilt[r][col] += &(c * &f[r][col]);
            }
        }
    }
    if rebuilt != *m {
        return None;
    }
    Some(
        coords
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, c)| (b as Gen, c))
            .collect(),
    )
}

/// `U(so_3)` with structure constants computed from 3x3 matrix commutators.
pub fn so3_spec() -> LieSpec {
    let labels = SO3_BASIS
        .iter()
        .map(|(i, j)| format!("f[{i},{j}]"))
        .collect();
    let table = SO3_BASIS
        .iter()
        .map(|&(i, j)| {
            SO3_BASIS
                .iter()
                .map(|&(k, l)| {
                    let comm = mat_commutator(&so3_matrix(i, j), &so3_matrix(k, l));
                    so3_coordinates(&comm).expect("so_3 is closed under brackets")
                })
                .collect()
        })
        .collect();
    LieSpec::new("so_3", labels, table).expect("so_3 bracket table")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y3() -> Algebra {
        Algebra::new(RttSpec::new(3))
    }

    fn t(alg: &Algebra, i: i8, j: i8, r: u32) -> Gen {
        alg.gen(GeneratorId::T { i, j, r })
    }

    #[test]
    fn generator_order_is_lexicographic_in_level_then_indices() {
        let alg = y3();
        let spec = alg.spec();
        let mut last = None;
        for r in 1..=3 {
            for i in [-1, 0, 1] {
                for j in [-1, 0, 1] {
                    let g = t(&alg, i, j, r);
                    assert_eq!(spec.generator(g), GeneratorId::T { i, j, r });
                    assert_eq!(spec.weight(g), r);
                    assert!(last.is_none_or(|l| l < g));
                    last = Some(g);
                }
            }
        }
        assert!(spec.index_of(GeneratorId::T { i: 2, j: 0, r: 1 }).is_none());
        assert!(spec.index_of(GeneratorId::T { i: 0, j: 0, r: 0 }).is_none());
    }

    #[test]
    fn normal_words_are_unchanged() {
        let alg = y3();
        let g = t(&alg, -1, 0, 1);
        assert_eq!(
            alg.normal_form(&[(Rational::one(), vec![g])]),
            Element::generator(g)
        );
        let h = t(&alg, 1, 1, 2);
        let nf = alg.normal_form(&[(Rational::one(), vec![g, h])]);
        assert_eq!(
            nf,
            Element::term(Monomial::from_slice(&[g, h]), Rational::one())
        );
    }

    #[test]
    fn empty_word_is_the_unit() {
        let alg = y3();
        assert_eq!(
            alg.normal_form(&[(Rational::one(), vec![])]),
            Element::one()
        );
    }

    #[test]
    fn level_one_swap_is_the_gl3_bracket() {
        let alg = y3();
        let idx = [-1i8, 0, 1];
        for &i in &idx {
            for &j in &idx {
                for &k in &idx {
                    for &l in &idx {
                        let (a, b) = (t(&alg, i, j, 1), t(&alg, k, l, 1));
                        if a <= b {
                            continue;
                        }
                        let nf = alg.normal_form(&[(Rational::one(), vec![a, b])]);
                        let mut expected =
                            Element::term(Monomial::from_slice(&[b, a]), Rational::one());
                        if k == j {
                            expected.add_term(
                                Monomial::from_slice(&[t(&alg, i, l, 1)]),
                                0,
                                Rational::one(),
                            );
                        }
                        if i == l {
                            expected.add_term(
                                Monomial::from_slice(&[t(&alg, k, j, 1)]),
                                0,
                                Rational::from_int(-1),
                            );
                        }
                        assert_eq!(nf, expected, "swap ({i},{j}) ({k},{l})");
                    }
                }
            }
        }
    }

    #[test]
    fn self_commutator_vanishes_and_rule_lowers_weight() {
        let alg = y3();
        for r in 1..=3 {
            for s in 1..=3 {
                for &(i, j, k, l) in &[(-1, 0, 1, 1), (0, 0, 0, 0), (1, -1, -1, 1), (0, 1, 1, 0)] {
                    let (g, h) = (t(&alg, i, j, r), t(&alg, k, l, s));
                    if g == h {
                        let c = alg.commutator(&Element::generator(g), &Element::generator(h));
                        assert!(c.is_zero());
                        continue;
                    }
                    let (hi, lo) = if g > h { (g, h) } else { (h, g) };
                    let br = alg.bracket(hi, lo);
                    assert!(alg.weight_of(&br).is_none_or(|w| w < r + s));
                }
            }
        }
    }

    #[test]
    fn normal_form_is_idempotent() {
        let alg = y3();
        let word = vec![
            t(&alg, 1, 1, 2),
            t(&alg, 0, -1, 1),
            t(&alg, -1, 1, 1),
            t(&alg, 0, 0, 1),
        ];
        let nf = alg.normal_form(&[(Rational::one(), word)]);
        let raw: Vec<_> = nf
            .terms()
            .into_iter()
            .map(|(m, _, c)| (c.clone(), m.gens().to_vec()))
            .collect();
        assert_eq!(alg.normal_form(&raw), nf);
        assert!(nf.terms().iter().all(|(m, _, _)| m.is_normal()));
    }

    #[test]
    fn text_form_round_trips() {
        let alg = y3();
        let word = vec![t(&alg, 1, 0, 2), t(&alg, -1, 1, 1)];
        let e = alg
            .normal_form(&[(Rational::new(3, 2), word)])
            .scale_poly(&"1 + -2*x".parse().unwrap());
        let s = alg.format(&e);
        assert_eq!(alg.parse(&s).unwrap(), e);
        assert_eq!(alg.format(&alg.parse(&s).unwrap()), s);
        assert!(alg.parse("1*T[5,0,1]").is_err());
    }

    #[test]
    fn gl1_is_a_polynomial_ring() {
        let alg = Algebra::new(gl1_spec());
        let e = Element::generator(0);
        let p = alg.multiply(&alg.multiply(&e, &e), &e);
        assert_eq!(
            p,
            Element::term(Monomial::from_slice(&[0, 0, 0]), Rational::one())
        );
        assert!(alg.commutator(&p, &e).is_zero());
    }

    #[test]
    fn lie_tables_are_validated() {
        let bad = LieSpec::new(
            "bad",
            vec!["a".into(), "b".into()],
            vec![
                vec![vec![], vec![(0, Rational::one())]],
                vec![vec![(0, Rational::one())], vec![]],
            ],
        );
        assert!(matches!(bad, Err(Error::InvalidLieTable(_))));
        let so3 = so3_spec();
        for a in 0..3 {
            assert!(so3.bracket_entries(a, a).is_empty());
        }
    }

    mod invariants {
        use super::*;
        use proptest::prelude::*;
        use std::sync::OnceLock;

        fn shared() -> &'static Algebra {
            static ALG: OnceLock<Algebra> = OnceLock::new();
            ALG.get_or_init(y3)
        }

        /// A short sum of words in generators of level at most 2.
        fn arb_element() -> impl Strategy<Value = Element> {
            let word = prop::collection::vec((-1i8..=1, -1i8..=1, 1u32..=2), 0..3);
            prop::collection::vec((-3i64..=3, word), 1..3).prop_map(|terms| {
                let alg = shared();
                let raw: Vec<_> = terms
                    .into_iter()
                    .map(|(c, w)| {
                        let gens = w.into_iter().map(|(i, j, r)| t(alg, i, j, r)).collect();
                        (Rational::from_int(c), gens)
                    })
                    .collect();
                alg.normal_form(&raw)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn multiplication_is_associative(a in arb_element(), b in arb_element(), c in arb_element()) {
                let alg = shared();
                let left = alg.multiply(&alg.multiply(&a, &b), &c);
                let right = alg.multiply(&a, &alg.multiply(&b, &c));
                prop_assert_eq!(left, right);
            }

            #[test]
            fn jacobi_identity(a in arb_element(), b in arb_element(), c in arb_element()) {
                let alg = shared();
                let mut sum = alg.commutator(&a, &alg.commutator(&b, &c));
                sum.add_assign(&alg.commutator(&b, &alg.commutator(&c, &a)));
                sum.add_assign(&alg.commutator(&c, &alg.commutator(&a, &b)));
                prop_assert!(sum.is_zero());
            }

            #[test]
            fn products_are_normal_and_distribute(a in arb_element(), b in arb_element(), c in arb_element()) {
                let alg = shared();
                let mut bc = b.clone();
                bc.add_assign(&c);
                let lhs = alg.multiply(&a, &bc);
                prop_assert!(lhs.terms().iter().all(|(m, _, _)| m.is_normal()));
                let mut rhs = alg.multiply(&a, &b);
                rhs.add_assign(&alg.multiply(&a, &c));
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn text_round_trip(a in arb_element()) {
                let alg = shared();
                prop_assert_eq!(alg.parse(&alg.format(&a)).unwrap(), a);
            }
        }
    }
}
