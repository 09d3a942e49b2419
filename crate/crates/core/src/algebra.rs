//! The graded supercommutative algebra of an invariant coordinate model and
//! its degree -2 Poisson bracket.
//!
//! Generators are ordered: odd fiber coordinates (degree 1), then even
//! conjugates `p_I` (degree 2), then at most one transverse conjugate `π`
//! (degree 2). Coefficients are elements of Q[t].
//!
//! The bracket is
//!
//! ```text
//! {F,G} = F ∂⃖_a G^{ab} ∂⃗_b G + ∂F/∂p_I f_IJ^K p_K ∂G/∂p_J + ∂F/∂π ∂_t G − ∂_t F ∂G/∂π
//! ```
//!
//! so `{θ^a, θ^b} = G^{ab}`, `{π, f(t)} = f'(t)` and the momenta `p_I` form a
//! Lie–Poisson algebra with structure constants `f` (zero for abelian leaves).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{CourantError, Result};
use crate::linalg::{rational_inverse, sparse, CoefficientRing, ExactMatrix, Rational, SparseVec, UniPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    OddFiber,
    EvenConjugate,
    TransverseConjugate,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub kind: GeneratorKind,
}

impl Generator {
    pub fn parity(&self) -> u32 {
        self.degree % 2
    }
}

/// Exponent vector over the context's generators; odd entries are 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u8>);

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial(vec![0; len])
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u8 {
        self.0[i]
    }

    /// Indices of the odd generators present, increasing.
    pub fn odd_support(&self, odd: usize) -> impl Iterator<Item = usize> + '_ {
        (0..odd).filter(move |&i| self.0[i] != 0)
    }
}

/// Sign and exponent vector of `a * b` with odd generators moved into
/// normal order; `None` if an odd generator repeats.
fn mono_mul(a: &[u8], b: &[u8], odd: usize) -> Option<(bool, Vec<u8>)> {
    let mut neg = false;
    let mut above = 0u32;
    // walk odd indices from high to low, counting a's odd factors above each of b's
    for i in (0..odd).rev() {
        if b[i] != 0 {
            if a[i] != 0 {
                return None;
            }
            if above % 2 == 1 {
                neg = !neg;
            }
        }
        if a[i] != 0 {
            above += 1;
        }
    }
    Some((neg, a.iter().zip(b).map(|(x, y)| x + y).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedContext {
    ring: CoefficientRing,
    generators: Vec<Generator>,
    odd: usize,
    even: usize,
    transverse: usize,
    pairing: Vec<Vec<Rational>>,
    lie: Vec<Vec<Vec<(usize, Rational)>>>,
}

impl GradedContext {
    /// `pairing` is the bracket matrix `G^{ab} = {θ^a, θ^b}` on the odd
    /// generators; `lie[I][J]` lists `(K, f_IJ^K)`.
    pub fn new(
        ring: CoefficientRing,
        odd_names: Vec<String>,
        pairing: Vec<Vec<Rational>>,
        even_names: Vec<String>,
        lie: Vec<Vec<Vec<(usize, Rational)>>>,
        transverse: bool,
    ) -> Result<Self> {
        let r = odd_names.len();
        if pairing.len() != r || pairing.iter().any(|row| row.len() != r) {
            return Err(CourantError::DimensionMismatch("pairing must be square on the odd generators".into()));
        }
        for a in 0..r {
            for b in 0..a {
                if pairing[a][b] != pairing[b][a] {
                    return Err(CourantError::AsymmetricMetric);
                }
            }
        }
        if rational_inverse(&pairing).is_none() {
            return Err(CourantError::SingularMetric);
        }
        let l = even_names.len();
        let lie = if lie.is_empty() { vec![vec![Vec::new(); l]; l] } else { lie };
        if lie.len() != l || lie.iter().any(|row| row.len() != l) {
            return Err(CourantError::DimensionMismatch("structure constants must be l x l".into()));
        }
        let mut generators: Vec<Generator> = odd_names
            .into_iter()
            .map(|name| Generator { name, degree: 1, kind: GeneratorKind::OddFiber })
            .collect();
        generators.extend(
            even_names
                .into_iter()
                .map(|name| Generator { name, degree: 2, kind: GeneratorKind::EvenConjugate }),
        );
        if transverse {
            generators.push(Generator { name: "pi".into(), degree: 2, kind: GeneratorKind::TransverseConjugate });
        }
        Ok(GradedContext { ring, generators, odd: r, even: l, transverse: transverse as usize, pairing, lie })
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn odd_count(&self) -> usize {
        self.odd
    }

    pub fn even_count(&self) -> usize {
        self.even
    }

    pub fn has_transverse(&self) -> bool {
        self.transverse == 1
    }

    /// Index of the generator `π`, if present.
    pub fn transverse_index(&self) -> Option<usize> {
        self.has_transverse().then_some(self.odd + self.even)
    }

    pub fn pairing(&self) -> &[Vec<Rational>] {
        &self.pairing
    }

    pub fn lie_constants(&self) -> &[Vec<Vec<(usize, Rational)>>] {
        &self.lie
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn monomial_degree(&self, m: &Monomial) -> u32 {
        m.0.iter().zip(&self.generators).map(|(&e, g)| e as u32 * g.degree).sum()
    }

    pub fn render_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.generators[i].name.clone()),
                _ => parts.push(format!("{}^{}", self.generators[i].name, e)),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// A supercommutative polynomial in normal form.
#[derive(Clone)]
pub struct Element {
    ctx: Arc<GradedContext>,
    terms: BTreeMap<Monomial, UniPoly>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        same_context(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for Element {}

fn same_context(a: &Arc<GradedContext>, b: &Arc<GradedContext>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn insert(terms: &mut BTreeMap<Monomial, UniPoly>, m: Monomial, c: UniPoly) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl Element {
    pub fn zero(ctx: &Arc<GradedContext>) -> Self {
        Element { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<GradedContext>, c: UniPoly) -> Self {
        let mut e = Self::zero(ctx);
        insert(&mut e.terms, Monomial::one(ctx.len()), c);
        e
    }

    pub fn one(ctx: &Arc<GradedContext>) -> Self {
        Self::constant(ctx, UniPoly::one())
    }

    pub fn generator(ctx: &Arc<GradedContext>, i: usize) -> Self {
        let mut m = Monomial::one(ctx.len());
        m.0[i] = 1;
        Self::monomial(ctx, m, UniPoly::one())
    }

    pub fn monomial(ctx: &Arc<GradedContext>, m: Monomial, c: UniPoly) -> Self {
        let mut e = Self::zero(ctx);
        insert(&mut e.terms, m, c);
        e
    }

    /// Builds an element from `(monomial, coefficient)` pairs, summing
    /// repeated monomials.
    pub fn from_terms(ctx: &Arc<GradedContext>, terms: impl IntoIterator<Item = (Monomial, UniPoly)>) -> Self {
        let mut e = Self::zero(ctx);
        for (m, c) in terms {
            assert_eq!(m.0.len(), ctx.len(), "monomial length does not match the context");
            insert(&mut e.terms, m, c);
        }
        e
    }

    /// Ordered product of generators with a coefficient, e.g. `θ^3 θ^1`.
    pub fn product_of(ctx: &Arc<GradedContext>, gens: &[usize], c: UniPoly) -> Self {
        gens.iter().fold(Self::constant(ctx, c), |acc, &g| &acc * &Self::generator(ctx, g))
    }

    pub fn context(&self) -> &Arc<GradedContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, UniPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> UniPoly {
        self.terms.get(m).cloned().unwrap_or_else(UniPoly::zero)
    }

    /// Total degree if the element is nonzero and homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| self.ctx.monomial_degree(m));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous_of(&self, n: u32) -> bool {
        self.is_zero() || self.degree() == Some(n)
    }

    pub fn scale(&self, c: &UniPoly) -> Self {
        Element::from_terms(&self.ctx, self.terms.iter().map(|(m, x)| (m.clone(), x * c)))
    }

    pub fn map_coefficients(&self, f: impl Fn(&UniPoly) -> UniPoly) -> Self {
        Element::from_terms(&self.ctx, self.terms.iter().map(|(m, x)| (m.clone(), f(x))))
    }

    /// Derivative of every coefficient in `t`.
    pub fn t_derivative(&self) -> Self {
        self.map_coefficients(UniPoly::derivative)
    }

    /// Largest coefficient degree in `t`.
    pub fn t_degree(&self) -> usize {
        self.terms.values().filter_map(UniPoly::degree).max().unwrap_or(0)
    }

    fn check(&self, other: &Element) -> Result<()> {
        if same_context(&self.ctx, &other.ctx) {
            Ok(())
        } else {
            Err(CourantError::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            insert(&mut terms, m.clone(), c.clone());
        }
        Ok(Element { ctx: self.ctx.clone(), terms })
    }

    /// Supercommutative product with Koszul signs.
    pub fn multiply(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        let odd = self.ctx.odd;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((neg, m)) = mono_mul(&m1.0, &m2.0, odd) {
                    let c = c1 * c2;
                    insert(&mut terms, Monomial(m), if neg { -c } else { c });
                }
            }
        }
        Ok(Element { ctx: self.ctx.clone(), terms })
    }

    /// The degree -2 graded Poisson bracket.
    pub fn poisson_bracket(&self, other: &Element) -> Result<Element> {
        self.check(other)?;
        let ctx = &*self.ctx;
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                bracket_monomials(ctx, m1, c1, m2, c2, &mut terms);
            }
        }
        Ok(Element { ctx: self.ctx.clone(), terms })
    }

    /// Left derivative `∂⃗/∂θ^b`.
    pub fn left_derivative(&self, b: usize) -> Element {
        let terms = self.terms.iter().filter(|(m, _)| m.0[b] != 0).map(|(m, c)| {
            let before = (0..b).filter(|&i| m.0[i] != 0).count();
            let mut e = m.clone();
            e.0[b] = 0;
            (e, if before % 2 == 1 { -c } else { c.clone() })
        });
        Element::from_terms(&self.ctx, terms.collect::<Vec<_>>())
    }

    /// Part of the element whose monomials satisfy `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&Monomial) -> bool) -> Element {
        Element::from_terms(
            &self.ctx,
            self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())),
        )
    }
}

fn bracket_monomials(
    ctx: &GradedContext,
    m1: &Monomial,
    c1: &UniPoly,
    m2: &Monomial,
    c2: &UniPoly,
    out: &mut BTreeMap<Monomial, UniPoly>,
) {
    let odd = ctx.odd;
    let (a1, a2) = (&m1.0, &m2.0);
    // odd part: F ∂⃖_a G^{ab} ∂⃗_b G
    let ones1: Vec<usize> = (0..odd).filter(|&i| a1[i] != 0).collect();
    let ones2: Vec<usize> = (0..odd).filter(|&i| a2[i] != 0).collect();
    if !ones1.is_empty() && !ones2.is_empty() {
        let c12 = c1 * c2;
        for (ia, &a) in ones1.iter().enumerate() {
            let after = ones1.len() - ia - 1;
            let mut r1 = a1.clone();
            r1[a] = 0;
            for (ib, &b) in ones2.iter().enumerate() {
                let g = &ctx.pairing[a][b];
                if g.is_zero() {
                    continue;
                }
                let mut r2 = a2.clone();
                r2[b] = 0;
                if let Some((neg, m)) = mono_mul(&r1, &r2, odd) {
                    let flip = neg ^ (after % 2 == 1) ^ (ib % 2 == 1);
                    let c = c12.scale(g);
                    insert(out, Monomial(m), if flip { -c } else { c });
                }
            }
        }
    }
    // momenta: ∂F/∂p_I f_IJ^K p_K ∂G/∂p_J
    for i in 0..ctx.even {
        let e1 = a1[odd + i];
        if e1 == 0 {
            continue;
        }
        for j in 0..ctx.even {
            let e2 = a2[odd + j];
            if e2 == 0 || ctx.lie[i][j].is_empty() {
                continue;
            }
            let mut r1 = a1.clone();
            r1[odd + i] -= 1;
            let mut r2 = a2.clone();
            r2[odd + j] -= 1;
            if let Some((neg, m)) = mono_mul(&r1, &r2, odd) {
                let base = (c1 * c2).scale(&Rational::from_integer((e1 as i64 * e2 as i64).into()));
                for (k, f) in &ctx.lie[i][j] {
                    let mut mk = m.clone();
                    mk[odd + k] += 1;
                    let c = base.scale(f);
                    insert(out, Monomial(mk), if neg { -c } else { c });
                }
            }
        }
    }
    // transverse: ∂F/∂π ∂_t G − ∂_t F ∂G/∂π
    if let Some(pi) = ctx.transverse_index() {
        if a1[pi] != 0 {
            let dc2 = c2.derivative();
            if !dc2.is_zero() {
                let mut r1 = a1.clone();
                r1[pi] -= 1;
                if let Some((neg, m)) = mono_mul(&r1, a2, odd) {
                    let c = (c1 * &dc2).scale(&Rational::from_integer((a1[pi] as i64).into()));
                    insert(out, Monomial(m), if neg { -c } else { c });
                }
            }
        }
        if a2[pi] != 0 {
            let dc1 = c1.derivative();
            if !dc1.is_zero() {
                let mut r2 = a2.clone();
                r2[pi] -= 1;
                if let Some((neg, m)) = mono_mul(a1, &r2, odd) {
                    let c = (&dc1 * c2).scale(&Rational::from_integer((a2[pi] as i64).into()));
                    insert(out, Monomial(m), if neg { c } else { -c });
                }
            }
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mono = self.ctx.render_monomial(m);
            let (neg, body) = match (c.constant_value(), mono.as_str()) {
                (Some(v), "1") => (v < Rational::zero(), (if v < Rational::zero() { -v } else { v }).to_string()),
                (Some(v), _) if v.is_one() => (false, mono.clone()),
                (Some(v), _) if v == -Rational::one() => (true, mono.clone()),
                (Some(v), _) => {
                    let neg = v < Rational::zero();
                    let a = if neg { -v } else { v };
                    (neg, format!("{a}*{mono}"))
                }
                (None, "1") => (false, format!("({c})")),
                (None, _) => (false, format!("({c})*{mono}")),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            f.write_str(&body)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr for &Element {
            type Output = Element;
            fn $m(self, rhs: &Element) -> Element {
                let f: fn(&Element, &Element) -> Result<Element> = $body;
                f(self, rhs).expect("operands belong to different contexts")
            }
        }
        impl $tr for Element {
            type Output = Element;
            fn $m(self, rhs: Element) -> Element {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.try_add(b));
binop!(Sub, sub, |a, b| a.try_add(&-b));
binop!(Mul, mul, |a, b| a.multiply(b));

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_coefficients(|c| -c)
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

/// All normal-form monomials of total degree `n`, in descending
/// lexicographic order of exponent vectors.
pub fn degree_slice(ctx: &GradedContext, n: u32) -> Vec<Monomial> {
    fn go(ctx: &GradedContext, i: usize, left: u32, cur: &mut Vec<u8>, out: &mut Vec<Monomial>) {
        if i == ctx.len() {
            if left == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let d = ctx.generators[i].degree;
        let max = if i < ctx.odd { 1.min(left / d) } else { left / d };
        for e in (0..=max).rev() {
            cur.push(e as u8);
            go(ctx, i + 1, left - e * d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(ctx, 0, n, &mut Vec::with_capacity(ctx.len()), &mut out);
    out
}

/// A degree slice with a monomial-to-position index.
#[derive(Debug, Clone)]
pub struct SliceBasis {
    pub degree: u32,
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl SliceBasis {
    pub fn new(ctx: &GradedContext, n: u32) -> Self {
        Self::from_monomials(n, degree_slice(ctx, n))
    }

    pub fn from_monomials(degree: u32, monomials: Vec<Monomial>) -> Self {
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        SliceBasis { degree, monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Expands `e` in this basis.
    pub fn coordinates(&self, e: &Element) -> Result<SparseVec> {
        let mut v: SparseVec = Vec::with_capacity(e.terms.len());
        for (m, c) in &e.terms {
            let i = self.position(m).ok_or_else(|| {
                CourantError::InternalConsistency(format!(
                    "monomial {} is not in the degree-{} basis",
                    e.ctx.render_monomial(m),
                    self.degree
                ))
            })?;
            v.push((i, c.clone()));
        }
        v.sort_by_key(|(i, _)| *i);
        Ok(v)
    }

    pub fn element(&self, ctx: &Arc<GradedContext>, v: &SparseVec) -> Element {
        Element::from_terms(ctx, v.iter().map(|(i, c)| (self.monomials[*i].clone(), c.clone())))
    }

    pub fn basis_element(&self, ctx: &Arc<GradedContext>, i: usize) -> Element {
        Element::monomial(ctx, self.monomials[i].clone(), UniPoly::one())
    }
}

/// Sparse columns of an operator from `source` to `target`.
pub fn operator_columns(
    ctx: &Arc<GradedContext>,
    op: impl Fn(&Element) -> Element + Sync,
    source: &SliceBasis,
    target: &SliceBasis,
) -> Result<Vec<SparseVec>> {
    source.monomials.iter().map(|m| target.coordinates(&op(&Element::monomial(ctx, m.clone(), UniPoly::one())))).collect()
}

/// Matrix of a degree-homogeneous operator on the degree-`n` slice.
pub fn operator_matrix(
    ctx: &Arc<GradedContext>,
    op: impl Fn(&Element) -> Element + Sync,
    n: u32,
    shift: i32,
) -> Result<ExactMatrix> {
    let target_degree = n as i64 + shift as i64;
    let source = SliceBasis::new(ctx, n);
    let target = if target_degree < 0 {
        SliceBasis::from_monomials(0, Vec::new())
    } else {
        SliceBasis::new(ctx, target_degree as u32)
    };
    let cols = operator_columns(ctx, op, &source, &target)?;
    let dense: Vec<Vec<UniPoly>> = cols.iter().map(|c| sparse::to_dense(c, target.len())).collect();
    ExactMatrix::from_columns(ctx.ring(), target.len(), &dense)
}
