//! The Quot-scheme integral evaluated symbolically: assemble the integrand on
//! `G(r1, V1) x G(r2, V2)` and push it forward through the Schur basis.

use std::sync::Arc;

use super::formula::{output_context, twist_data, WMode};
use super::types::Setup;
use crate::context::BundleContext;
use crate::determinantal::{delta_det, top_chern_from_series, top_chern_tensor};
use crate::error::{Error, Result};
use crate::gysin::{GrassCtx, Gysin};
use crate::kclass::{sym_power, twist_rewrite, KClass, KRing};
use crate::poly::{ChernSeries, GradedPoly};

pub(super) struct Contexts {
    pub quot: Arc<BundleContext>,
    pub mid: Arc<BundleContext>,
    pub out: Arc<BundleContext>,
}

fn with_base(mut b: crate::context::ContextBuilder, st: &Setup, mode: WMode) -> crate::context::ContextBuilder {
    b = b.block("base", Some(st.u)).bundle("F", st.quot.rank_f, "base").bundle("G", st.quot.rank_g, "base");
    if mode == WMode::General {
        b = b.bundle("W", 2, "base");
    }
    b
}

/// Base classes never exceed `u`; each tautological block stays within its
/// fiber dimension plus `u`, since anything beyond pushes forward to zero.
pub(super) fn contexts(st: &Setup, mode: WMode) -> Contexts {
    let q = &st.quot;
    let u = st.u;
    let quot = with_base(BundleContext::builder("quot", q.fiber_dim() + u), st, mode)
        .block("s1", Some(q.fiber1 + u))
        .bundle("S1", q.r1, "s1")
        .block("s2", Some(q.fiber2 + u))
        .bundle("S2", q.r2, "s2")
        .build();
    let mid = with_base(BundleContext::builder("quot/S2", q.fiber1 + u), st, mode)
        .block("s1", Some(q.fiber1 + u))
        .bundle("S1", q.r1, "s1")
        .build();
    let out = output_context(q.rank_f, q.rank_g, mode, u);
    Contexts { quot, mid, out }
}

/// Number of monomials in `count[k]` of grade `k` for variables of grades `1..=rank`.
fn grade_counts(rank: u32, max: u32) -> Vec<u128> {
    let mut c = vec![0u128; max as usize + 1];
    c[0] = 1;
    for g in 1..=rank.min(max) as usize {
        for k in g..=max as usize {
            c[k] += c[k - g];
        }
    }
    c
}

fn convolve(a: &[u128], b: &[u128], max: usize) -> Vec<u128> {
    let mut out = vec![0u128; max + 1];
    for (i, x) in a.iter().enumerate().take(max + 1) {
        for (j, y) in b.iter().enumerate().take(max + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Monomials of top degree the integrand can have under the block caps.
pub(super) fn estimate(st: &Setup, mode: WMode) -> u128 {
    let q = &st.quot;
    let u = st.u;
    let mut base = convolve(&grade_counts(q.rank_f, u), &grade_counts(q.rank_g, u), u as usize);
    if mode == WMode::General {
        base = convolve(&base, &grade_counts(2, u), u as usize);
    }
    let s1 = grade_counts(q.r1, q.fiber1 + u);
    let s2 = grade_counts(q.r2, q.fiber2 + u);
    let top = (q.fiber_dim() + u) as usize;
    let all = convolve(&convolve(&base, &s1, top), &s2, top);
    all[top]
}

fn series(ctx: &Arc<BundleContext>, sym: &str) -> Result<ChernSeries> {
    ChernSeries::new(ctx.total_chern(sym)?)
}

/// `n`-th power of a series, negative exponents through the inverse.
fn spow(s: &ChernSeries, n: i64) -> ChernSeries {
    if n >= 0 {
        s.pow(n as u32)
    } else {
        s.invert().pow(n.unsigned_abs() as u32)
    }
}

/// `(p_* S^vee(1))^vee = -L (R(-3))` with `R(-3)` rewritten in `S_d`, `S_{d-1}`.
fn beta<K: KRing>(st: &Setup, td: &crate::kclass::TwistData<K>, s_hi: &K, s_lo: &K) -> Result<K> {
    let (a, b) = twist_rewrite(-3, st.dec.d, td);
    let ps = td.l.k_zero().k_sub(&td.l.k_mul(&a.k_mul(s_hi).k_add(&b.k_mul(s_lo))));
    let want = st.quot.sigma_rank() as i64;
    if ps.k_rank() != want {
        return Err(Error::InvalidArgument(format!("(p_* S^vee(1))^vee has rank {}, expected {want}", ps.k_rank())));
    }
    Ok(ps)
}

/// `c_top(S_{d-1}^vee Q_d W) * Delta^{d+2s}_{rank G}(c(G)/beta_d) * alpha` on the quot context.
pub(super) fn integrand(st: &Setup, mode: WMode, alpha: &GradedPoly, ctx: &Arc<BundleContext>) -> Result<GradedPoly> {
    let q = &st.quot;
    let alpha = alpha.embed(ctx)?;
    let (quot_class, sigma) = match mode {
        WMode::Trivial => {
            let d = st.dec.d as u32;
            let cf = series(ctx, "F")?;
            let cs1 = series(ctx, "S1")?;
            let cs2 = series(ctx, "S2")?;
            let cq2 = cf.pow(d + 1).mul(&cs2.invert())?;
            let ctop = top_chern_from_series(q.r1 as usize, (q.n2 - q.r2) as i64, &cq2, &cs1)?;
            let td = crate::kclass::TwistData::<KClass>::trivial(ctx);
            let (a, b) = twist_rewrite(-3, st.dec.d, &td);
            // beta = -a S_d - b S_{d-1}, and c(beta)^{-1} = c(S_d)^a c(S_{d-1})^b
            let rank = -a.rank() * q.r2 as i64 - b.rank() * q.r1 as i64;
            if rank != q.sigma_rank() as i64 {
                return Err(Error::InvalidArgument(format!("beta has rank {rank}, expected {}", q.sigma_rank())));
            }
            let x = series(ctx, "G")?.mul(&spow(&cs2, a.rank()))?.mul(&spow(&cs1, b.rank()))?;
            let sigma = delta_det(q.sigma_rank() as usize, q.rank_g as i64, x.poly())?;
            (ctop.mul(&ctop)?, sigma)
        }
        WMode::General => {
            let td = twist_data(ctx, mode)?;
            let f = KClass::of_symbol(ctx, "F")?;
            let w = KClass::of_symbol(ctx, "W")?;
            let s1 = KClass::of_symbol(ctx, "S1")?;
            let s2 = KClass::of_symbol(ctx, "S2")?;
            let v2 = f.tensor(&sym_power(&td.w_dual, &td.l, st.dec.d as u32))?;
            let q2w = v2.sub(&s2)?.tensor(&w)?;
            let ctop = top_chern_tensor(&s1.dual(), &q2w)?;
            let ps = beta(st, &td, &s2, &s1)?;
            let g = td.l_dual.tensor(&KClass::of_symbol(ctx, "G")?)?;
            let x = g.chern().mul(&ps.chern().invert())?;
            let sigma = delta_det(q.sigma_rank() as usize, q.rank_g as i64, x.poly())?;
            (ctop, sigma)
        }
    };
    let p = quot_class.mul(&sigma)?.mul(&alpha)?;
    let top = q.fiber_dim() + st.u;
    if !p.is_zero() && !p.is_homogeneous_of(top) {
        return Err(Error::DegreeMismatch { expected: top, found: p.max_grade().unwrap_or(0) });
    }
    Ok(p)
}

/// `c(F (x) Sym^j W^vee)` in `ctx`.
fn ambient(ctx: &Arc<BundleContext>, mode: WMode, j: i64) -> Result<GradedPoly> {
    if j < 0 {
        return Ok(GradedPoly::one(ctx));
    }
    match mode {
        WMode::Trivial => Ok(series(ctx, "F")?.pow(j as u32 + 1).into_poly()),
        WMode::General => {
            let td = twist_data(ctx, mode)?;
            let v = KClass::of_symbol(ctx, "F")?.tensor(&sym_power(&td.w_dual, &td.l, j as u32))?;
            Ok(v.chern().into_poly())
        }
    }
}

pub(super) fn push(st: &Setup, mode: WMode, alpha: &GradedPoly, gysin: &Gysin) -> Result<GradedPoly> {
    let cx = contexts(st, mode);
    let q = &st.quot;
    let p = integrand(st, mode, alpha, &cx.quot)?;
    let d = st.dec.d;
    let g2 = GrassCtx::new(q.r2, q.n2, "S2", ambient(&cx.mid, mode, d)?)?;
    let g1 = GrassCtx::new(q.r1, q.n1, "S1", ambient(&cx.out, mode, d - 1)?)?;
    gysin.product(&p, &g1, &g2, &cx.mid, &cx.out)
}
