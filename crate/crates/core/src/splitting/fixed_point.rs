//! The Quot-scheme integral by torus localization modulo word primes.
//!
//! Split `F`, `G` and `W` into line bundles with random residues as weights.
//! The pushforward along `G(r1, V1) x G(r2, V2)` is then a finite sum over
//! pairs of coordinate subspaces, and the formula is recovered from enough
//! sample points by solving for its coefficients. A sample is only a number
//! modulo `p`; the recovered integer polynomial is checked on fresh points
//! modulo a second prime.
//!
//! `c_top(S_{d-1}^vee Q_d W)` vanishes at a fixed point unless `I2` contains,
//! for every root `t_i - a w_1 - b w_2` in `I1`, both roots obtained by
//! subtracting `w_1` or `w_2`, which leaves very few contributing pairs.

use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use super::formula::{output_context, WMode};
use super::types::Setup;
use super::ClassOptions;
use crate::cache::PointLog;
use crate::context::BundleContext;
use crate::error::{Error, Result};
use crate::kclass::{twist_rewrite, CharClass, KRing, TwistData};
use crate::modular::{
    add_mod, det_mod, from_i64, inv_mod, mul_mod, neg_mod, solve_mod, sub_mod, to_symmetric, P61, P62,
};
use crate::par;
use crate::poly::{GradedPoly, Mono};
use crate::rational::Rat;

const MAX_ATTEMPTS: u32 = 16;
const EXTRA_CHECKS: usize = 2;
const CROSS_CHECKS: usize = 2;

/// Contributing fixed points as index lists into the roots of `V1` and `V2`.
fn pairs(st: &Setup) -> Vec<(Vec<usize>, Vec<usize>)> {
    let q = &st.quot;
    let d = q.d as usize;
    let mut out = Vec::new();
    for i1 in (0..q.n1 as usize).combinations(q.r1 as usize) {
        // V1 root (i, a) has index i d + a; its partners in V2 are (i, a), (i, a+1)
        let mut z: Vec<usize> = i1
            .iter()
            .flat_map(|&x| {
                let (i, a) = (x / d, x % d);
                [i * (d + 1) + a, i * (d + 1) + a + 1]
            })
            .collect();
        z.sort_unstable();
        z.dedup();
        if z.len() > q.r2 as usize {
            continue;
        }
        let rest: Vec<usize> = (0..q.n2 as usize).filter(|y| z.binary_search(y).is_err()).collect();
        for extra in rest.into_iter().combinations(q.r2 as usize - z.len()) {
            let mut i2 = z.clone();
            i2.extend(extra);
            i2.sort_unstable();
            out.push((i1.clone(), i2));
        }
    }
    out
}

/// Monomials of grade exactly `u` in the formula variables; with `skip_w1`
/// the variable `w_1` is left out (it vanishes on the samples).
fn unknowns(ctx: &BundleContext, u: u32, skip_w1: bool) -> Vec<Mono> {
    let vars: Vec<(usize, u32)> = ctx
        .vars()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.grade <= u && !(skip_w1 && &*v.symbol == "W" && v.index == 1))
        .map(|(i, v)| (i, v.grade))
        .collect();
    let mut out = Vec::new();
    let mut cur: Mono = SmallVec::from_elem(0, ctx.nvars());
    fn rec(k: usize, left: u32, vars: &[(usize, u32)], cur: &mut Mono, out: &mut Vec<Mono>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if k == vars.len() {
            return;
        }
        let (v, g) = vars[k];
        let mut e = 0;
        loop {
            rec(k + 1, left - e * g, vars, cur, out);
            if (e + 1) * g > left {
                break;
            }
            e += 1;
            cur[v] += 1;
        }
        cur[v] = 0;
    }
    rec(0, u, &vars, &mut cur, &mut out);
    out
}

pub(super) fn estimate(st: &Setup, mode: WMode) -> u128 {
    let ctx = output_context(st.quot.rank_f, st.quot.rank_g, WMode::General, st.u);
    let n = unknowns(&ctx, st.u, mode == WMode::Trivial).len() + EXTRA_CHECKS + CROSS_CHECKS;
    pairs(st).len() as u128 * n as u128
}

/// Random weights of one sample.
struct Sample {
    t: Vec<u64>,
    gamma: Vec<u64>,
    w: [u64; 2],
}

impl Sample {
    fn draw(st: &Setup, mode: WMode, p: u64, seed: u64, idx: u64, attempt: u32) -> Sample {
        let mix = seed ^ p.rotate_left(17) ^ idx.wrapping_mul(0x9e3779b97f4a7c15) ^ ((attempt as u64) << 48);
        let mut rng = ChaCha8Rng::seed_from_u64(mix);
        let mut r = || rng.gen_range(1..p);
        let t = (0..st.quot.rank_f).map(|_| r()).collect();
        let gamma = (0..st.quot.rank_g).map(|_| r()).collect();
        let w1 = r();
        let w2 = match mode {
            WMode::Trivial => neg_mod(w1, p),
            WMode::General => r(),
        };
        Sample { t, gamma, w: [w1, w2] }
    }

    /// Values of the formula variables in context order.
    fn values(&self, ctx: &BundleContext, p: u64) -> Vec<u64> {
        let ef = elementary(&self.t, self.t.len(), p);
        let eg = elementary(&self.gamma, self.gamma.len(), p);
        let ew = elementary(&self.w, 2, p);
        ctx.vars()
            .iter()
            .map(|v| match &*v.symbol {
                "F" => ef[v.index as usize],
                "G" => eg[v.index as usize],
                _ => ew[v.index as usize],
            })
            .collect()
    }
}

/// `e_0, ..., e_k` of the roots.
fn elementary(roots: &[u64], k: usize, p: u64) -> Vec<u64> {
    let mut e = vec![0u64; k + 1];
    e[0] = 1;
    for &x in roots {
        for j in (1..=k).rev() {
            e[j] = add_mod(e[j], mul_mod(e[j - 1], x, p), p);
        }
    }
    e
}

/// Multiplies a truncated series by `(1 + rho z)^n`.
fn mul_linear(s: &mut [u64], rho: u64, n: i64, p: u64) {
    for _ in 0..n.unsigned_abs() {
        if n > 0 {
            for k in (1..s.len()).rev() {
                s[k] = add_mod(s[k], mul_mod(rho, s[k - 1], p), p);
            }
        } else {
            for k in 1..s.len() {
                s[k] = sub_mod(s[k], mul_mod(rho, s[k - 1], p), p);
            }
        }
    }
}

fn char_weight(w: &[u64; 2], a: i32, b: i32, p: u64) -> u64 {
    add_mod(mul_mod(from_i64(a as i64, p), w[0], p), mul_mod(from_i64(b as i64, p), w[1], p), p)
}

struct Integrand<'a> {
    st: &'a Setup,
    alpha: &'a GradedPoly,
    /// `R(-3) = A S_d + B S_{d-1}` in characters of `W`.
    a_coef: Vec<((i32, i32), i64)>,
    b_coef: Vec<((i32, i32), i64)>,
    pairs: &'a [(Vec<usize>, Vec<usize>)],
}

impl Integrand<'_> {
    /// The localization sum at one sample; `None` if the sample is degenerate.
    fn evaluate(&self, s: &Sample, p: u64) -> Option<u64> {
        let q = &self.st.quot;
        let d = q.d as i64;
        let om = s.w;
        // roots of F (x) Sym^j W^vee: t_i - a w_1 - (j - a) w_2
        let sym_roots = |j: i64| -> Vec<u64> {
            let mut v = Vec::new();
            if j < 0 {
                return v;
            }
            for &ti in &s.t {
                for a in 0..=j {
                    v.push(sub_mod(ti, char_weight(&om, a as i32, (j - a) as i32, p), p));
                }
            }
            v
        };
        let v1 = sym_roots(d - 1);
        let v2 = sym_roots(d);
        let len = (q.rank_g + q.sigma_rank()) as usize;
        let mut cg = vec![0u64; len];
        cg[0] = 1;
        let lshift = add_mod(om[0], om[1], p);
        for &g in &s.gamma {
            mul_linear(&mut cg, add_mod(g, lshift, p), 1, p);
        }
        let euler = |roots: &[u64], sub: &[usize]| -> u64 {
            let mut e = 1u64;
            for &i in sub {
                for (j, &r) in roots.iter().enumerate() {
                    if sub.binary_search(&j).is_err() {
                        e = mul_mod(e, sub_mod(r, roots[i], p), p);
                    }
                }
            }
            e
        };
        let actx = self.alpha.ctx();
        let mut total = 0u64;
        for (i1, i2) in self.pairs {
            let den = mul_mod(euler(&v1, i1), euler(&v2, i2), p);
            if den == 0 {
                return None;
            }
            let mut ctop = 1u64;
            for &x in i1 {
                for (j, &y) in v2.iter().enumerate() {
                    if i2.binary_search(&j).is_ok() {
                        continue;
                    }
                    let diff = sub_mod(y, v1[x], p);
                    ctop = mul_mod(ctop, mul_mod(add_mod(diff, om[0], p), add_mod(diff, om[1], p), p), p);
                }
            }
            if ctop == 0 {
                continue;
            }
            // c(G (x) L^vee) / c((p_* S^vee(1))^vee), with that bundle -L (A S_d + B S_{d-1})
            let mut ser = cg.clone();
            for (sub, roots, coef) in [(i2, &v2, &self.a_coef), (i1, &v1, &self.b_coef)] {
                for &k in sub.iter() {
                    for &((a, b), n) in coef.iter() {
                        mul_linear(&mut ser, add_mod(roots[k], char_weight(&om, a - 1, b - 1, p), p), n, p);
                    }
                }
            }
            let sa = q.sigma_rank() as usize;
            let sigma = if sa == 0 {
                1
            } else {
                let b = q.rank_g as i64;
                let m: Vec<Vec<u64>> = (0..sa)
                    .map(|i| {
                        (0..sa)
                            .map(|j| {
                                let k = b + j as i64 - i as i64;
                                if k < 0 || k as usize >= ser.len() {
                                    0
                                } else {
                                    ser[k as usize]
                                }
                            })
                            .collect()
                    })
                    .collect();
                det_mod(m, p)
            };
            if sigma == 0 {
                continue;
            }
            let r1: Vec<u64> = i1.iter().map(|&k| v1[k]).collect();
            let r2: Vec<u64> = i2.iter().map(|&k| v2[k]).collect();
            let e1 = elementary(&r1, r1.len(), p);
            let e2 = elementary(&r2, r2.len(), p);
            let ew = elementary(&om, 2, p);
            let vals: Vec<u64> = actx
                .vars()
                .iter()
                .map(|v| match &*v.symbol {
                    "S1" => e1[v.index as usize],
                    "S2" => e2[v.index as usize],
                    _ => ew[v.index as usize],
                })
                .collect();
            let alpha = self.alpha.evaluate_mod(&vals, p).ok()?;
            let term = mul_mod(mul_mod(alpha, sigma, p), mul_mod(ctop, inv_mod(den, p), p), p);
            total = add_mod(total, term, p);
        }
        Some(total)
    }
}

fn log_key(st: &Setup, mode: WMode, seed: u64) -> String {
    let e = st.e.entries().iter().map(|x| x.to_string()).join("_");
    format!("v1_e{e}_m{}_{mode}_s{seed}", st.dec.m)
}

/// Evaluations `(attempt, value)` at points `0..count` modulo `p`, resuming from the log.
fn sample_values(
    ig: &Integrand<'_>,
    mode: WMode,
    p: u64,
    count: usize,
    seed: u64,
    log: Option<&PointLog>,
) -> Result<Vec<(u32, u64)>> {
    let st = ig.st;
    let results = par::map_range(count, |idx| -> Result<(u32, u64)> {
        if let Some(hit) = log.and_then(|l| l.get(p, idx as u64)) {
            return Ok(hit);
        }
        for attempt in 0..MAX_ATTEMPTS {
            let s = Sample::draw(st, mode, p, seed, idx as u64, attempt);
            if let Some(v) = ig.evaluate(&s, p) {
                if let Some(l) = log {
                    l.record(p, idx as u64, attempt, v)?;
                }
                return Ok((attempt, v));
            }
        }
        Err(Error::Numerical(format!("no nondegenerate sample found for point {idx}")))
    });
    results.into_iter().collect()
}

fn mono_value(m: &Mono, vals: &[u64], p: u64) -> u64 {
    let mut acc = 1u64;
    for (i, &e) in m.iter().enumerate() {
        for _ in 0..e {
            acc = mul_mod(acc, vals[i], p);
        }
    }
    acc
}

pub(super) fn push(st: &Setup, mode: WMode, alpha: &GradedPoly, opts: &ClassOptions) -> Result<GradedPoly> {
    if alpha.ctx().symbol("W").is_none() {
        return Err(Error::InvalidArgument("the fixed-point engine needs alpha for general W".into()));
    }
    let q = &st.quot;
    let (a, b) = twist_rewrite(-3, st.dec.d, &TwistData::<CharClass>::characters());
    let rank = -(a.k_rank() * q.r2 as i64 + b.k_rank() * q.r1 as i64);
    if rank != q.sigma_rank() as i64 {
        return Err(Error::InvalidArgument(format!("beta has rank {rank}, expected {}", q.sigma_rank())));
    }
    let pairs = pairs(st);
    let ig = Integrand { st, alpha, a_coef: a.sorted(), b_coef: b.sorted(), pairs: &pairs };
    let gctx = output_context(q.rank_f, q.rank_g, WMode::General, st.u);
    let monos = unknowns(&gctx, st.u, mode == WMode::Trivial);
    let n = monos.len();
    let log = match opts.gysin.cache() {
        Some(c) => Some(PointLog::open(c.dir(), &log_key(st, mode, opts.seed))?),
        None => None,
    };

    let evals = sample_values(&ig, mode, P61, n + EXTRA_CHECKS, opts.seed, log.as_ref())?;
    let rows: Vec<Vec<u64>> = evals
        .iter()
        .enumerate()
        .map(|(idx, &(att, _))| {
            let vals = Sample::draw(st, mode, P61, opts.seed, idx as u64, att).values(&gctx, P61);
            monos.iter().map(|m| mono_value(m, &vals, P61)).collect()
        })
        .collect();
    let rhs: Vec<u64> = evals.iter().map(|&(_, v)| v).collect();
    let coeffs = solve_mod(rows[..n].to_vec(), rhs[..n].to_vec(), P61)
        .ok_or_else(|| Error::Numerical("sample points do not determine the formula".into()))?;
    for k in n..n + EXTRA_CHECKS {
        let got = rows[k].iter().zip(&coeffs).fold(0, |acc, (&x, &c)| add_mod(acc, mul_mod(x, c, P61), P61));
        if got != rhs[k] {
            return Err(Error::Numerical("interpolated formula disagrees with a check point".into()));
        }
    }
    let mut terms = Vec::new();
    for (m, &c) in monos.iter().zip(&coeffs) {
        let c = to_symmetric(c, P61);
        if c.unsigned_abs() > 1u128 << 55 {
            return Err(Error::Numerical(format!("coefficient {c} is too large to be trusted")));
        }
        if c != 0 {
            terms.push((m.clone(), Rat::int(c as i64)));
        }
    }
    let poly = GradedPoly::from_terms(&gctx, terms);
    let cross = sample_values(&ig, mode, P62, CROSS_CHECKS, opts.seed, log.as_ref())?;
    for (idx, &(att, v)) in cross.iter().enumerate() {
        let vals = Sample::draw(st, mode, P62, opts.seed, idx as u64, att).values(&gctx, P62);
        if poly.evaluate_mod(&vals, P62)? != v {
            return Err(Error::Numerical("integer lift fails modulo a second prime".into()));
        }
    }
    match mode {
        WMode::General => Ok(poly),
        WMode::Trivial => {
            let out: Arc<BundleContext> = output_context(q.rank_f, q.rank_g, WMode::Trivial, st.u);
            let kill: Vec<_> = (1..=2).map(|i| (gctx.var_index("W", i).unwrap(), GradedPoly::zero(&gctx))).collect();
            poly.substitute(&kill)?.transfer(&out)
        }
    }
}
