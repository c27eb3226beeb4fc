//! Gysin pushforward along Grassmann bundles `G(k, V) -> B`.
//!
//! A class is written in the Schur basis of the tautological subbundle `S`
//! (rank `k`, roots `x_1..x_k`) with coefficients pulled back from the base,
//! and each Schur class is pushed by
//!
//! ```text
//! rho_* s_lambda(S) = (-1)^{k q} det( h_{lambda_i - q - i + j}(V) )_{k x k}
//! ```
//!
//! where `q = n - k` and `h_i(V) = (-1)^i s_i(V)` with `s(V) = c(V)^{-1}`.
//! Partitions sticking out of the `k x q` box push to genuine polynomials in
//! the Segre classes of `V`; only `|lambda| < kq` pushes to zero.

use std::sync::Arc;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::cache::{PushCache, SegrePoly};
use crate::context::BundleContext;
use crate::error::{Error, Result};
use crate::par;
use crate::partition::Partition;
use crate::poly::{invert_unit, profile, GradedPoly, Mono};
use crate::rational::Rat;

/// One Grassmann bundle `G(k, V)` of rank-`k` subbundles of a rank-`n` bundle.
#[derive(Clone, Debug)]
pub struct GrassCtx {
    pub k: u32,
    pub n: u32,
    /// Symbol of the tautological subbundle in the source context.
    pub sub: String,
    /// Symbol of the tautological quotient, if the source context has one.
    pub quot: Option<String>,
    /// `c(V)` in the source context, used to eliminate `c(Q) = c(V)/c(S)`.
    pub ambient_src: Option<GradedPoly>,
    /// `c(V)` in the target context.
    pub ambient_dst: GradedPoly,
}

impl GrassCtx {
    pub fn new(k: u32, n: u32, sub: &str, ambient_dst: GradedPoly) -> Result<GrassCtx> {
        if k > n {
            return Err(Error::InvalidArgument(format!("G({k}, {n}) is empty")));
        }
        Ok(GrassCtx { k, n, sub: sub.to_string(), quot: None, ambient_src: None, ambient_dst })
    }

    pub fn with_quotient(mut self, quot: &str, ambient_src: GradedPoly) -> GrassCtx {
        self.quot = Some(quot.to_string());
        self.ambient_src = Some(ambient_src);
        self
    }

    pub fn fiber_dim(&self) -> u32 {
        self.k * (self.n - self.k)
    }
}

/// `rho_* s_lambda(S)` on `G(k, n)` as a polynomial in the abstract `h_i`.
pub fn push_schur_abstract(lambda: &Partition, k: u32, n: u32) -> SegrePoly {
    let q = n as i64 - k as i64;
    let k = k as usize;
    if lambda.len() > k {
        return Vec::new();
    }
    if (lambda.size() as i64) < k as i64 * q {
        return Vec::new();
    }
    let mut acc: FxHashMap<Vec<u16>, i64> = FxHashMap::default();
    let mut perm: Vec<usize> = (0..k).collect();
    let sign0 = if (k as i64 * q) % 2 == 0 { 1 } else { -1 };
    // iterate permutations in lexicographic order, tracking parity
    loop {
        let mut idx: Vec<u16> = Vec::with_capacity(k);
        let mut ok = true;
        for (i, &j) in perm.iter().enumerate() {
            let h = lambda.part(i) as i64 - q - i as i64 + j as i64;
            if h < 0 {
                ok = false;
                break;
            }
            if h > 0 {
                idx.push(h as u16);
            }
        }
        if ok {
            let inv = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
            idx.sort_unstable();
            *acc.entry(idx).or_insert(0) += if inv % 2 == 0 { sign0 } else { -sign0 };
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let mut out: SegrePoly = acc.into_iter().filter(|(_, c)| *c != 0).collect();
    out.sort();
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Expansion of `e_1^{a_1} ... e_k^{a_k}` in Schur functions of `k` variables.
pub struct SchurExpander {
    k: usize,
    memo: FxHashMap<SmallVec<[u8; 8]>, Arc<Vec<(Partition, Rat)>>>,
}

impl SchurExpander {
    pub fn new(k: usize) -> SchurExpander {
        SchurExpander { k, memo: FxHashMap::default() }
    }

    pub fn expand(&mut self, exps: &[u8]) -> Arc<Vec<(Partition, Rat)>> {
        let key: SmallVec<[u8; 8]> = exps.into();
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let out = match exps.iter().rposition(|&e| e > 0) {
            None => Arc::new(vec![(Partition::empty(), Rat::ONE)]),
            Some(i) => {
                let mut smaller = key.clone();
                smaller[i] -= 1;
                let base = self.expand(&smaller);
                let mut acc: FxHashMap<Partition, Rat> = FxHashMap::default();
                for (lam, c) in base.iter() {
                    for mu in lam.pieri_e(i as u32 + 1, self.k) {
                        *acc.entry(mu).or_insert(Rat::ZERO) += c;
                    }
                }
                let mut v: Vec<(Partition, Rat)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                v.sort_by(|a, b| a.0.cmp(&b.0));
                Arc::new(v)
            }
        };
        self.memo.insert(key, out.clone());
        out
    }
}

fn sub_vars(ctx: &BundleContext, sym: &str) -> Result<Vec<usize>> {
    Ok(ctx.symbol(sym).ok_or_else(|| Error::UnknownSymbol(sym.to_string()))?.vars.clone())
}

/// Writes `p` as `sum_lambda coeff_lambda s_lambda(S)` with coefficients free of `S`
/// (in the same context as `p`).
pub fn to_schur_basis(p: &GradedPoly, sub: &str) -> Result<Vec<(Partition, GradedPoly)>> {
    let ctx = p.ctx().clone();
    let svars = sub_vars(&ctx, sub)?;
    let mut ex = SchurExpander::new(svars.len());
    let mut acc: FxHashMap<Partition, FxHashMap<Mono, Rat>> = FxHashMap::default();
    for (m, c) in p.terms() {
        let sexp: Vec<u8> = svars.iter().map(|&v| m[v]).collect();
        let mut rest = m.clone();
        for &v in &svars {
            rest[v] = 0;
        }
        for (lam, k) in ex.expand(&sexp).iter() {
            *acc.entry(lam.clone()).or_default().entry(rest.clone()).or_insert(Rat::ZERO) += &(c * k);
        }
    }
    let mut out: Vec<(Partition, GradedPoly)> = acc
        .into_iter()
        .map(|(lam, terms)| (lam, GradedPoly::from_terms(&ctx, terms).with_trunc(p.trunc())))
        .filter(|(_, q)| !q.is_zero())
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Pushforward engine with an optional persistent table of Schur pushforwards.
#[derive(Default, Clone)]
pub struct Gysin {
    cache: Option<Arc<PushCache>>,
}

impl Gysin {
    pub fn new(cache: Option<Arc<PushCache>>) -> Gysin {
        Gysin { cache }
    }

    pub fn cache(&self) -> Option<&Arc<PushCache>> {
        self.cache.as_ref()
    }

    fn abstract_push(&self, lambda: &Partition, k: u32, n: u32) -> SegrePoly {
        if let Some(c) = &self.cache {
            if let Some(p) = c.get(k, n, lambda) {
                return p;
            }
            let p = push_schur_abstract(lambda, k, n);
            c.insert(k, n, lambda.clone(), p.clone());
            return p;
        }
        push_schur_abstract(lambda, k, n)
    }

    /// `rho_*` along one Grassmann bundle. Variables of `p` other than those of
    /// `S` (and `Q`) are matched into `target` by symbol name and index.
    pub fn grassmann(&self, p: &GradedPoly, g: &GrassCtx, target: &Arc<BundleContext>) -> Result<GradedPoly> {
        let src = p.ctx().clone();
        g.ambient_dst
            .ctx()
            .same(target)
            .then_some(())
            .ok_or_else(|| Error::ContextMismatch(g.ambient_dst.ctx().name().to_string(), target.name().to_string()))?;
        let p = match &g.quot {
            Some(qsym) => eliminate_quotient(p, &g.sub, qsym, g.ambient_src.as_ref())?,
            None => p.clone(),
        };
        let svars = sub_vars(&src, &g.sub)?;
        if svars.len() != g.k as usize {
            return Err(Error::InvalidArgument(format!("{} has rank {}, expected {}", g.sub, svars.len(), g.k)));
        }
        let fiber = g.fiber_dim();
        let trunc = p.trunc().saturating_sub(fiber).min(target.trunc());
        // source variable -> target variable, for everything that is not S
        let mut map: Vec<Option<usize>> = vec![None; src.nvars()];
        for (i, v) in src.vars().iter().enumerate() {
            if !svars.contains(&i) {
                map[i] = target.var_index(&v.symbol, v.index);
            }
        }
        let mut ex = SchurExpander::new(g.k as usize);
        let mut acc: FxHashMap<Partition, FxHashMap<Mono, Rat>> = FxHashMap::default();
        for (m, c) in p.terms() {
            let sexp: Vec<u8> = svars.iter().map(|&v| m[v]).collect();
            let sdeg: u32 = sexp.iter().enumerate().map(|(i, &e)| (i as u32 + 1) * e as u32).sum();
            if sdeg < fiber {
                continue;
            }
            let mut rest: Mono = SmallVec::from_elem(0, target.nvars());
            for (i, &e) in m.iter().enumerate() {
                if e == 0 || svars.contains(&i) {
                    continue;
                }
                let j = map[i].ok_or_else(|| Error::MissingVariable(src.vars()[i].name()))?;
                rest[j] += e;
            }
            let pr = profile(target, &rest);
            if pr.total + (sdeg - fiber) > trunc {
                continue;
            }
            for (lam, k) in ex.expand(&sexp).iter() {
                *acc.entry(lam.clone()).or_default().entry(rest.clone()).or_insert(Rat::ZERO) += &(c * k);
            }
        }
        let mut lambdas: Vec<(Partition, FxHashMap<Mono, Rat>)> = acc.into_iter().collect();
        lambdas.sort_by(|a, b| a.0.cmp(&b.0));
        // h_i(V) = (-1)^i [c(V)^{-1}]_i in the target
        let top = lambdas.iter().map(|(l, _)| l.size().saturating_sub(fiber)).max().unwrap_or(0).min(trunc);
        let segre = invert_unit(&g.ambient_dst.with_trunc(top))?;
        let h: Vec<GradedPoly> = (0..=top)
            .map(|i| {
                // homogeneous, so exact below `trunc` even though `segre` stops at `top`
                let s = segre.homogeneous_component(i).expect("in range").exact_to(trunc);
                if i % 2 == 1 {
                    s.neg()
                } else {
                    s
                }
            })
            .collect();
        let parts = par::map(&lambdas, |(lam, terms)| -> Result<GradedPoly> {
            let coeff =
                GradedPoly::from_terms(target, terms.iter().map(|(m, c)| (m.clone(), c.clone()))).with_trunc(trunc);
            if coeff.is_zero() {
                return Ok(coeff);
            }
            let abs = self.abstract_push(lam, g.k, g.n);
            let mut pushed = GradedPoly::zero(target).with_trunc(trunc);
            for (idx, c) in &abs {
                if idx.iter().map(|&i| i as u32).sum::<u32>() > trunc {
                    continue;
                }
                let mut t = GradedPoly::constant(target, Rat::int(*c)).with_trunc(trunc);
                for &i in idx {
                    t = t.mul(&h[i as usize])?;
                }
                pushed = pushed.add(&t)?;
            }
            coeff.mul(&pushed)
        });
        let mut out = GradedPoly::zero(target).with_trunc(trunc);
        for part in parts {
            out = out.add(&part?)?;
        }
        Ok(out)
    }

    /// Pushforward along `G(k1, V1) x_B G(k2, V2) -> B`, in two stages through
    /// `mid` (a context holding `S1` and the base symbols): `g2` first, then `g1`.
    pub fn product(
        &self,
        p: &GradedPoly,
        g1: &GrassCtx,
        g2: &GrassCtx,
        mid: &Arc<BundleContext>,
        target: &Arc<BundleContext>,
    ) -> Result<GradedPoly> {
        let stage = self.grassmann(p, g2, mid)?;
        self.grassmann(&stage, g1, target)
    }
}

/// Replaces `c_i(Q)` by `[c(V) c(S)^{-1}]_i`.
pub fn eliminate_quotient(p: &GradedPoly, sub: &str, quot: &str, ambient: Option<&GradedPoly>) -> Result<GradedPoly> {
    let ctx = p.ctx().clone();
    let Some(qsym) = ctx.symbol(quot) else {
        return Ok(p.clone());
    };
    let ambient = ambient.ok_or_else(|| Error::InvalidArgument("quotient elimination needs c(V)".into()))?;
    let cq = ambient.mul(&invert_unit(&ctx.total_chern(sub)?)?)?;
    let bindings: Vec<(usize, GradedPoly)> = qsym
        .vars
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, cq.homogeneous_component(i as u32 + 1).unwrap_or_else(|_| GradedPoly::zero(&ctx))))
        .collect();
    p.substitute(&bindings)
}

/// Convenience wrapper without a persistent cache.
pub fn gysin_grassmann(p: &GradedPoly, g: &GrassCtx, target: &Arc<BundleContext>) -> Result<GradedPoly> {
    Gysin::default().grassmann(p, g, target)
}

pub fn gysin_product(
    p: &GradedPoly,
    g1: &GrassCtx,
    g2: &GrassCtx,
    mid: &Arc<BundleContext>,
    target: &Arc<BundleContext>,
) -> Result<GradedPoly> {
    Gysin::default().product(p, g1, g2, mid, target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schur_expansion_small() {
        let mut ex = SchurExpander::new(2);
        let e1sq = ex.expand(&[2, 0]);
        assert_eq!(
            e1sq.iter().map(|(l, c)| (l.clone(), c.clone())).collect::<Vec<_>>(),
            vec![(Partition::new(vec![1, 1]), Rat::ONE), (Partition::new(vec![2]), Rat::ONE)]
        );
        let e2cubed = ex.expand(&[0, 3]);
        assert_eq!(e2cubed.as_slice(), &[(Partition::new(vec![3, 3]), Rat::ONE)]);
        let mut ex1 = SchurExpander::new(1);
        assert_eq!(ex1.expand(&[2]).as_slice(), &[(Partition::new(vec![2]), Rat::ONE)]);
    }

    #[test]
    fn abstract_push_point_class() {
        // top class of G(2,4) pushes to (+/-)1
        let p = push_schur_abstract(&Partition::new(vec![2, 2]), 2, 4);
        assert_eq!(p, vec![(vec![], 1)]);
        assert!(push_schur_abstract(&Partition::new(vec![2, 1]), 2, 4).is_empty());
        // k = 0 is the identity
        assert_eq!(push_schur_abstract(&Partition::empty(), 0, 3), vec![(vec![], 1)]);
    }
}
