//! Sparse polynomials over exact rationals in a truncated graded ring.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::context::{BundleContext, MAX_BLOCKS};
use crate::error::{Error, Result};
use crate::modular;
use crate::par;
use crate::rational::Rat;

/// Exponent vector, one entry per variable of the owning context.
pub type Mono = SmallVec<[u8; 24]>;

/// Grade profile of a monomial: total grade and per-block grades.
#[derive(Clone, Copy, Debug, Default)]
pub struct Profile {
    pub total: u32,
    pub blocks: [u32; MAX_BLOCKS],
}

impl Profile {
    #[inline]
    fn plus(&self, o: &Profile) -> Profile {
        let mut blocks = self.blocks;
        for (b, x) in blocks.iter_mut().zip(o.blocks.iter()) {
            *b += x;
        }
        Profile { total: self.total + o.total, blocks }
    }
}

pub fn profile(ctx: &BundleContext, m: &[u8]) -> Profile {
    let mut p = Profile::default();
    for (e, v) in m.iter().zip(ctx.vars()) {
        if *e != 0 {
            let g = *e as u32 * v.grade;
            p.total += g;
            p.blocks[v.block] += g;
        }
    }
    p
}

#[derive(Clone)]
pub struct GradedPoly {
    ctx: Arc<BundleContext>,
    trunc: u32,
    terms: FxHashMap<Mono, Rat>,
}

impl GradedPoly {
    pub fn zero(ctx: &Arc<BundleContext>) -> GradedPoly {
        GradedPoly { ctx: ctx.clone(), trunc: ctx.trunc(), terms: FxHashMap::default() }
    }

    pub fn one(ctx: &Arc<BundleContext>) -> GradedPoly {
        Self::constant(ctx, Rat::ONE)
    }

    pub fn constant(ctx: &Arc<BundleContext>, c: Rat) -> GradedPoly {
        let mut p = Self::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(Self::unit_mono(ctx), c);
        }
        p
    }

    pub fn var(ctx: &Arc<BundleContext>, idx: usize) -> GradedPoly {
        let mut m = Self::unit_mono(ctx);
        m[idx] = 1;
        Self::from_terms(ctx, [(m, Rat::ONE)])
    }

    fn unit_mono(ctx: &BundleContext) -> Mono {
        SmallVec::from_elem(0, ctx.nvars())
    }

    /// Builds a polynomial, dropping zero coefficients and terms beyond the caps.
    pub fn from_terms(ctx: &Arc<BundleContext>, terms: impl IntoIterator<Item = (Mono, Rat)>) -> GradedPoly {
        let mut p = Self::zero(ctx);
        for (m, c) in terms {
            assert_eq!(m.len(), ctx.nvars(), "monomial length does not match context");
            let pr = profile(ctx, &m);
            if ctx.fits(pr.total, &pr.blocks) {
                p.add_term(m, &c);
            }
        }
        p
    }

    #[inline]
    fn add_term(&mut self, m: Mono, c: &Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    pub fn ctx(&self) -> &Arc<BundleContext> {
        &self.ctx
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[u8]) -> Rat {
        self.terms.get(m).cloned().unwrap_or(Rat::ZERO)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Self::unit_mono(&self.ctx))
    }

    pub fn grade(&self, m: &[u8]) -> u32 {
        profile(&self.ctx, m).total
    }

    /// Lowers the retained truncation degree.
    pub fn with_trunc(&self, trunc: u32) -> GradedPoly {
        let trunc = trunc.min(self.trunc);
        let terms =
            self.terms.iter().filter(|(m, _)| self.grade(m) <= trunc).map(|(m, c)| (m.clone(), c.clone())).collect();
        GradedPoly { ctx: self.ctx.clone(), trunc, terms }
    }

    /// Same terms with truncation `trunc`, for a polynomial known to be exact
    /// up to that degree (a homogeneous component, say).
    pub(crate) fn exact_to(&self, trunc: u32) -> GradedPoly {
        GradedPoly { trunc: trunc.min(self.ctx.trunc()), ..self.clone() }
    }

    fn check(&self, other: &GradedPoly) -> Result<()> {
        if self.ctx.same(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch(self.ctx.name().to_string(), other.ctx.name().to_string()))
        }
    }

    pub fn add(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let mut out = if trunc == big.trunc { big.clone() } else { big.with_trunc(trunc) };
        for (m, c) in small.terms.iter() {
            if small.trunc == trunc || self.grade(m) <= trunc {
                out.add_term(m.clone(), c);
            }
        }
        out.trunc = trunc;
        Ok(out)
    }

    pub fn neg(&self) -> GradedPoly {
        self.scale(&Rat::int(-1))
    }

    pub fn sub(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly { ctx: self.ctx.clone(), trunc: self.trunc, terms: FxHashMap::default() };
        }
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        GradedPoly { ctx: self.ctx.clone(), trunc: self.trunc, terms }
    }

    pub fn mul(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.check(other)?;
        let trunc = self.trunc.min(other.trunc);
        let ctx = &self.ctx;
        let prof = |p: &GradedPoly| -> Vec<(Mono, Rat, Profile)> {
            p.terms.iter().map(|(m, c)| (m.clone(), c.clone(), profile(ctx, m))).collect()
        };
        let (mut a, mut b) = (prof(self), prof(other));
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        b.sort_by_key(|t| t.2.total);
        let fits = |pr: &Profile| pr.total <= trunc && ctx.fits(pr.total, &pr.blocks);
        let work = |chunk: &[(Mono, Rat, Profile)]| -> FxHashMap<Mono, Rat> {
            let mut acc: FxHashMap<Mono, Rat> = FxHashMap::default();
            for (ma, ca, pa) in chunk {
                for (mb, cb, pb) in &b {
                    if pa.total + pb.total > trunc {
                        break;
                    }
                    let pr = pa.plus(pb);
                    if !fits(&pr) {
                        continue;
                    }
                    let mut m = ma.clone();
                    for (x, y) in m.iter_mut().zip(mb.iter()) {
                        *x += *y;
                    }
                    let c = ca * cb;
                    match acc.entry(m) {
                        std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += &c,
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(c);
                        }
                    }
                }
            }
            acc
        };
        let pairs = a.len().saturating_mul(b.len());
        let nchunks = if pairs < 20_000 { 1 } else { (par::threads() * 4).min(a.len()).max(1) };
        let mut terms = if nchunks == 1 {
            work(&a)
        } else {
            let size = a.len().div_ceil(nchunks);
            let chunks: Vec<&[(Mono, Rat, Profile)]> = a.chunks(size).collect();
            let parts = par::map(&chunks, |c| work(c));
            let mut it = parts.into_iter();
            let mut acc = it.next().unwrap_or_default();
            for part in it {
                for (m, c) in part {
                    match acc.entry(m) {
                        std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += &c,
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(c);
                        }
                    }
                }
            }
            acc
        };
        terms.retain(|_, c| !c.is_zero());
        Ok(GradedPoly { ctx: ctx.clone(), trunc, terms })
    }

    pub fn pow(&self, n: u32) -> GradedPoly {
        let mut result = GradedPoly { trunc: self.trunc, ..GradedPoly::one(&self.ctx) };
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same context");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same context");
            }
        }
        result
    }

    /// Sum of the terms of total grade exactly `d`.
    pub fn homogeneous_component(&self, d: u32) -> Result<GradedPoly> {
        if d > self.trunc {
            return Err(Error::DegreeOutOfRange { degree: d, trunc: self.trunc });
        }
        let terms =
            self.terms.iter().filter(|(m, _)| self.grade(m) == d).map(|(m, c)| (m.clone(), c.clone())).collect();
        Ok(GradedPoly { ctx: self.ctx.clone(), trunc: self.trunc, terms })
    }

    /// All homogeneous components, indexed by degree `0..=trunc`.
    pub fn components(&self) -> Vec<GradedPoly> {
        let mut out: Vec<GradedPoly> = (0..=self.trunc)
            .map(|_| GradedPoly { ctx: self.ctx.clone(), trunc: self.trunc, terms: FxHashMap::default() })
            .collect();
        for (m, c) in &self.terms {
            out[self.grade(m) as usize].terms.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn max_grade(&self) -> Option<u32> {
        self.terms.keys().map(|m| self.grade(m)).max()
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| self.grade(m) == d)
    }

    /// Returns `self` unchanged if every coefficient is an integer.
    pub fn assert_integral(self) -> Result<GradedPoly> {
        if let Some((m, c)) = self.sorted_terms().into_iter().find(|(_, c)| !c.is_integer()) {
            return Err(Error::NonIntegralCoefficient { monomial: self.mono_string(&m), value: c.to_string() });
        }
        Ok(self)
    }

    /// Whether every variable occurring belongs to the given block.
    pub fn only_block(&self, block: usize) -> bool {
        let vars = self.ctx.vars();
        self.terms.keys().all(|m| m.iter().zip(vars).all(|(e, v)| *e == 0 || v.block == block))
    }

    /// Simultaneous substitution of variables by polynomials of the same context.
    pub fn substitute(&self, bindings: &[(usize, GradedPoly)]) -> Result<GradedPoly> {
        let map: FxHashMap<usize, GradedPoly> = bindings.iter().cloned().collect();
        self.map_into(&self.ctx.clone(), &map)
    }

    /// Rewrites `self` into `target`: bound variables are replaced by their
    /// bindings (polynomials of `target`), every other variable is matched by
    /// symbol name and Chern index.
    pub fn map_into(&self, target: &Arc<BundleContext>, bindings: &FxHashMap<usize, GradedPoly>) -> Result<GradedPoly> {
        let vars = self.ctx.vars();
        for (&v, b) in bindings {
            b.check(&GradedPoly::zero(target))?;
            if !b.is_homogeneous_of(vars[v].grade) {
                return Err(Error::GradeViolation { var: vars[v].name(), grade: vars[v].grade });
            }
        }
        let mut name_map: Vec<Option<usize>> = Vec::with_capacity(vars.len());
        for (i, v) in vars.iter().enumerate() {
            name_map.push(if bindings.contains_key(&i) { None } else { target.var_index(&v.symbol, v.index) });
        }
        let trunc = self.trunc.min(target.trunc());
        // group terms by the bound part of their monomial
        let mut groups: FxHashMap<SmallVec<[u8; 24]>, FxHashMap<Mono, Rat>> = FxHashMap::default();
        for (m, c) in &self.terms {
            let mut bound: SmallVec<[u8; 24]> = SmallVec::from_elem(0, vars.len());
            let mut free = GradedPoly::unit_mono(target);
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if bindings.contains_key(&i) {
                    bound[i] = e;
                } else {
                    let j = name_map[i].ok_or_else(|| Error::MissingVariable(vars[i].name()))?;
                    free[j] += e;
                }
            }
            let g = groups.entry(bound).or_default();
            *g.entry(free).or_insert(Rat::ZERO) += c;
        }
        let mut powers: FxHashMap<(usize, u8), GradedPoly> = FxHashMap::default();
        let mut out = GradedPoly { trunc, ..GradedPoly::zero(target) };
        let mut keys: Vec<_> = groups.keys().cloned().collect();
        keys.sort();
        for key in keys {
            let coeffs = GradedPoly::from_terms(target, groups.remove(&key).unwrap()).with_trunc(trunc);
            let mut prod = coeffs;
            for (i, &e) in key.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers.entry((i, e)).or_insert_with(|| bindings[&i].with_trunc(trunc).pow(e as u32)).clone();
                prod = prod.mul(&pw)?;
                if prod.is_zero() {
                    break;
                }
            }
            out = out.add(&prod)?;
        }
        Ok(out)
    }

    /// Re-expresses the polynomial in another context with matching variables.
    pub fn transfer(&self, target: &Arc<BundleContext>) -> Result<GradedPoly> {
        self.map_into(target, &FxHashMap::default())
    }

    /// Like [`transfer`](Self::transfer), for a polynomial that is exact rather
    /// than a truncation: the result keeps the target's truncation degree.
    pub fn embed(&self, target: &Arc<BundleContext>) -> Result<GradedPoly> {
        let mut p = self.transfer(target)?;
        p.trunc = target.trunc();
        Ok(p)
    }

    /// Evaluates modulo `p` at the given variable residues.
    pub fn evaluate_mod(&self, values: &[u64], p: u64) -> Result<u64> {
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t =
                c.mod_prime(p).ok_or_else(|| Error::Numerical(format!("coefficient {c} not invertible mod {p}")))?;
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = modular::mul_mod(t, modular::pow_mod(values[i], e as u64, p), p);
                }
            }
            acc = modular::add_mod(acc, t, p);
        }
        Ok(acc)
    }

    /// Terms in canonical order: descending total grade, then descending
    /// lexicographic exponent vectors in context variable order.
    pub fn sorted_terms(&self) -> Vec<(Mono, Rat)> {
        let mut v: Vec<(Mono, Rat)> = self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        v.sort_by(|(a, _), (b, _)| canonical_cmp(&self.ctx, a, b));
        v
    }

    pub fn mono_string(&self, m: &[u8]) -> String {
        let vars = self.ctx.vars();
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { vars[i].name() } else { format!("{}^{}", vars[i].name(), e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

pub fn canonical_cmp(ctx: &BundleContext, a: &[u8], b: &[u8]) -> Ordering {
    let ga = profile(ctx, a).total;
    let gb = profile(ctx, b).total;
    gb.cmp(&ga).then_with(|| b.cmp(a))
}

impl PartialEq for GradedPoly {
    fn eq(&self, other: &GradedPoly) -> bool {
        self.ctx.same(&other.ctx) && self.terms == other.terms
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mono = self.mono_string(m);
            match (abs.is_one(), mono.as_str()) {
                (_, "1") => write!(f, "{abs}")?,
                (true, _) => write!(f, "{mono}")?,
                (false, _) => write!(f, "{abs}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedPoly[{}; trunc {}]({})", self.ctx.name(), self.trunc, self)
    }
}

/// A total Chern class: a series whose degree-0 term is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ChernSeries(GradedPoly);

impl ChernSeries {
    pub fn new(p: GradedPoly) -> Result<ChernSeries> {
        let c0 = p.constant_term();
        if !c0.is_one() {
            return Err(Error::NonUnit(c0.to_string()));
        }
        Ok(ChernSeries(p))
    }

    pub fn one(ctx: &Arc<BundleContext>) -> ChernSeries {
        ChernSeries(GradedPoly::one(ctx))
    }

    pub fn poly(&self) -> &GradedPoly {
        &self.0
    }

    pub fn into_poly(self) -> GradedPoly {
        self.0
    }

    pub fn component(&self, d: u32) -> GradedPoly {
        if d > self.0.trunc() {
            return GradedPoly { trunc: self.0.trunc(), ..GradedPoly::zero(self.0.ctx()) };
        }
        self.0.homogeneous_component(d).expect("in range")
    }

    pub fn mul(&self, other: &ChernSeries) -> Result<ChernSeries> {
        Ok(ChernSeries(self.0.mul(&other.0)?))
    }

    pub fn pow(&self, n: u32) -> ChernSeries {
        ChernSeries(self.0.pow(n))
    }

    pub fn with_trunc(&self, t: u32) -> ChernSeries {
        ChernSeries(self.0.with_trunc(t))
    }

    /// The formal inverse, degree by degree: `inv_d = -sum_{i=1..d} s_i inv_{d-i}`.
    pub fn invert(&self) -> ChernSeries {
        let comps = self.0.components();
        let trunc = self.0.trunc();
        let mut inv: Vec<GradedPoly> = Vec::with_capacity(comps.len());
        inv.push(GradedPoly { trunc, ..GradedPoly::one(self.0.ctx()) });
        for d in 1..=trunc as usize {
            let mut acc = GradedPoly { trunc, ..GradedPoly::zero(self.0.ctx()) };
            for i in 1..=d {
                if comps[i].is_zero() || inv[d - i].is_zero() {
                    continue;
                }
                acc = acc.add(&comps[i].mul(&inv[d - i]).expect("same context")).expect("same context");
            }
            inv.push(acc.neg());
        }
        let mut out = GradedPoly { trunc, ..GradedPoly::zero(self.0.ctx()) };
        for p in inv {
            out = out.add(&p).expect("same context");
        }
        ChernSeries(out)
    }
}

/// Formal inverse of a unit series given as a plain polynomial.
pub fn invert_unit(s: &GradedPoly) -> Result<GradedPoly> {
    Ok(ChernSeries::new(s.clone())?.invert().into_poly())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(trunc: u32) -> Arc<BundleContext> {
        BundleContext::builder("test", trunc).bundle("F", 3, "base").bundle("G", 2, "base").build()
    }

    fn f(c: &Arc<BundleContext>, i: u32) -> GradedPoly {
        c.chern_var("F", i).unwrap()
    }

    #[test]
    fn add_examples() {
        let c = ctx(4);
        let p = f(&c, 1).add(&f(&c, 2)).unwrap();
        assert_eq!(GradedPoly::zero(&c).add(&p).unwrap(), p);
        assert!(p.add(&p.neg()).unwrap().is_zero());
        assert_eq!(f(&c, 1).add(&f(&c, 1)).unwrap(), f(&c, 1).scale(&Rat::int(2)));
    }

    #[test]
    fn mul_examples() {
        let c = ctx(4);
        let p = f(&c, 1).add(&f(&c, 3)).unwrap();
        assert_eq!(GradedPoly::one(&c).mul(&p).unwrap(), p);
        let c1 = ctx(1);
        assert!(f(&c1, 1).mul(&f(&c1, 1)).unwrap().is_zero());
        let one = GradedPoly::one(&c);
        let a = one.add(&f(&c, 1)).unwrap();
        let b = one.sub(&f(&c, 1)).unwrap();
        let expect = one.sub(&f(&c, 1).mul(&f(&c, 1)).unwrap()).unwrap();
        assert_eq!(a.mul(&b).unwrap(), expect);
    }

    #[test]
    fn cross_context_is_an_error() {
        let a = ctx(3);
        let b = ctx(3);
        assert!(matches!(f(&a, 1).add(&f(&b, 1)), Err(Error::ContextMismatch(..))));
        assert!(f(&a, 1).mul(&f(&b, 1)).is_err());
    }

    #[test]
    fn invert_examples() {
        let c = BundleContext::builder("t", 3).bundle("E", 1, "base").build();
        let t = c.chern_var("E", 1).unwrap();
        let one = GradedPoly::one(&c);
        assert_eq!(invert_unit(&one).unwrap(), one);
        let inv = invert_unit(&one.add(&t).unwrap()).unwrap();
        let expect = GradedPoly::from_terms(
            &c,
            (0..=3u8).map(|k| (SmallVec::from_elem(k, 1), Rat::int(if k % 2 == 0 { 1 } else { -1 }))),
        );
        assert_eq!(inv, expect);
        assert!(matches!(invert_unit(&t), Err(Error::NonUnit(_))));
    }

    #[test]
    fn component_examples() {
        let c = ctx(4);
        let one = GradedPoly::one(&c);
        let p = one.add(&f(&c, 1)).unwrap().add(&f(&c, 2)).unwrap();
        assert_eq!(p.homogeneous_component(1).unwrap(), f(&c, 1));
        assert_eq!(p.homogeneous_component(0).unwrap(), one);
        let ratio = c.total_chern("G").unwrap().mul(&invert_unit(&c.total_chern("F").unwrap()).unwrap()).unwrap();
        let g1 = c.chern_var("G", 1).unwrap();
        assert_eq!(ratio.homogeneous_component(1).unwrap(), g1.sub(&f(&c, 1)).unwrap());
        assert!(matches!(p.homogeneous_component(5), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn substitute_examples() {
        let c = ctx(4);
        let g1 = c.chern_var("G", 1).unwrap();
        let fi = c.var_index("F", 1).unwrap();
        assert_eq!(f(&c, 1).substitute(&[(fi, g1.clone())]).unwrap(), g1);
        let sum = f(&c, 1).add(&g1).unwrap();
        let sq = f(&c, 1).mul(&f(&c, 1)).unwrap();
        assert_eq!(sq.substitute(&[(fi, sum.clone())]).unwrap(), sum.mul(&sum).unwrap());
        assert_eq!(sq.substitute(&[]).unwrap(), sq);
        // bindings must preserve grading
        assert!(matches!(sq.substitute(&[(fi, f(&c, 2))]), Err(Error::GradeViolation { .. })));
    }

    #[test]
    fn integrality() {
        let c = ctx(2);
        let p = f(&c, 1).scale(&Rat::int(2));
        assert_eq!(p.clone().assert_integral().unwrap(), p);
        assert!(matches!(f(&c, 1).scale(&Rat::new(3, 2)).assert_integral(), Err(Error::NonIntegralCoefficient { .. })));
        assert!(GradedPoly::zero(&c).assert_integral().unwrap().is_zero());
    }

    #[test]
    fn block_caps_drop_terms() {
        let c = BundleContext::builder("caps", 6)
            .block("base", Some(1))
            .bundle("F", 2, "base")
            .bundle("S", 2, "taut")
            .build();
        let f1 = c.chern_var("F", 1).unwrap();
        let s2 = c.chern_var("S", 2).unwrap();
        assert!(f1.mul(&f1).unwrap().is_zero());
        assert_eq!(f1.mul(&s2).unwrap().len(), 1);
        assert!(c.chern_var("F", 2).unwrap().is_zero());
    }

    fn arb_poly(c: Arc<BundleContext>) -> impl Strategy<Value = GradedPoly> {
        let n = c.nvars();
        prop::collection::vec((prop::collection::vec(0u8..3, n), -5i64..6), 0..6).prop_map(move |ts| {
            GradedPoly::from_terms(&c, ts.into_iter().map(|(m, k)| (SmallVec::from_vec(m), Rat::int(k))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn ring_laws(a in arb_poly(shared()), b in arb_poly(shared()), c in arb_poly(shared())) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
            let mut sum = GradedPoly::zero(a.ctx());
            for comp in a.components() {
                sum = sum.add(&comp).unwrap();
            }
            prop_assert_eq!(sum, a.clone());
        }

        #[test]
        fn inverse_is_two_sided(a in arb_poly(shared())) {
            let one = GradedPoly::one(a.ctx());
            let positive = a.sub(&GradedPoly::constant(a.ctx(), a.constant_term())).unwrap();
            let s = one.add(&positive).unwrap();
            let inv = invert_unit(&s).unwrap();
            prop_assert_eq!(s.mul(&inv).unwrap(), one.clone());
            prop_assert_eq!(inv.mul(&s).unwrap(), one);
        }

        #[test]
        fn grade_preserving_substitution_keeps_homogeneity(a in arb_poly(shared()), b in arb_poly(shared())) {
            let ctx = a.ctx().clone();
            let d = 3;
            let h = a.homogeneous_component(d).unwrap();
            let f1 = ctx.var_index("F", 1).unwrap();
            let f2 = ctx.var_index("F", 2).unwrap();
            let b1 = b.homogeneous_component(1).unwrap();
            let b2 = b.homogeneous_component(2).unwrap();
            let out = h.substitute(&[(f1, b1), (f2, b2)]).unwrap();
            prop_assert!(out.is_homogeneous_of(d));
        }
    }

    fn shared() -> Arc<BundleContext> {
        use std::sync::OnceLock;
        static CTX: OnceLock<Arc<BundleContext>> = OnceLock::new();
        CTX.get_or_init(|| ctx(5)).clone()
    }
}
