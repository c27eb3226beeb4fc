//! Degeneracy classes of splitting loci.
//!
//! [`general_class`] follows the inductive construction: the locus of type `e`
//! is the pushforward from a Quot scheme embedded in a product of two Grassmann
//! bundles of an integrand `[Quot] * sigma * alpha`, where `alpha` is the class
//! of a smaller splitting type computed recursively by [`z_class`].

mod fixed_point;
pub mod formula;
mod schur;
pub mod types;

use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

pub use formula::{
    closed_formula, closed_type, output_context, rewrite_formula_twist, AlgorithmPath, Formula, FormulaMeta, WMode,
};
pub use types::{
    balanced, choose_m, degree_audit, dual_decompose, expected_codim, leq, normalize_twist, poset, DecompositionData,
    Poset, QuotEmbeddingData, Setup, SplittingType,
};

use crate::context::BundleContext;
use crate::error::{Error, Result};
use crate::gysin::Gysin;
use crate::kclass::{twist_rewrite, KClass};
use crate::poly::GradedPoly;

/// Which pushforward engine evaluates the Quot-scheme integral.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Schur expansion when the integrand is small enough, fixed points otherwise.
    #[default]
    Auto,
    Schur,
    FixedPoint,
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Engine::Auto),
            "schur" => Ok(Engine::Schur),
            "fixed-point" => Ok(Engine::FixedPoint),
            _ => Err(Error::InvalidArgument(format!("unknown engine {s:?}"))),
        }
    }
}

/// Integrand size (in monomials) below which `Auto` picks the Schur engine.
pub const SCHUR_AUTO_LIMIT: u128 = 400_000;

#[derive(Clone, Default)]
pub struct ClassOptions {
    pub engine: Engine,
    /// Override of the twist; `None` takes the smallest valid one.
    pub m: Option<i64>,
    /// Upper bound on the engine's work estimate.
    pub budget: Option<u128>,
    pub gysin: Gysin,
    /// Seed for the sample points of the fixed-point engine.
    pub seed: u64,
}

/// Class of `e` by the Quot-scheme construction, with default options.
pub fn general_class(e: &SplittingType, mode: WMode) -> Result<Formula> {
    general_class_with(e, mode, &ClassOptions::default())
}

/// Work estimate of an engine: integrand monomials for Schur, fixed-point
/// evaluations for the localization engine.
pub fn estimate(st: &Setup, engine: Engine, mode: WMode) -> u128 {
    match engine {
        Engine::Schur => schur::estimate(st, mode),
        Engine::FixedPoint => fixed_point::estimate(st, mode),
        Engine::Auto => estimate(st, resolve(st, Engine::Auto, mode), mode),
    }
}

fn resolve(st: &Setup, engine: Engine, mode: WMode) -> Engine {
    match engine {
        Engine::Auto if schur::estimate(st, mode) <= SCHUR_AUTO_LIMIT => Engine::Schur,
        Engine::Auto => Engine::FixedPoint,
        e => e,
    }
}

pub fn general_class_with(e: &SplittingType, mode: WMode, opts: &ClassOptions) -> Result<Formula> {
    let (en, _) = normalize_twist(e);
    if en.is_balanced() {
        return Err(Error::Balanced(en.to_string()));
    }
    let st = Setup::new(&en, opts.m)?;
    let engine = resolve(&st, opts.engine, mode);
    if let Some(budget) = opts.budget {
        let est = estimate(&st, engine, mode);
        if est > budget {
            return Err(Error::BudgetExceeded { estimate: est, budget });
        }
    }
    let (poly, path) = match engine {
        Engine::FixedPoint => {
            // the torus action needs a nontrivial W; the trivial class is the w = 0 part
            let alpha = z_class(&st, WMode::General, opts)?;
            (fixed_point::push(&st, mode, &alpha, opts)?, AlgorithmPath::FixedPoint)
        }
        _ => {
            let alpha = z_class(&st, mode, opts)?;
            (schur::push(&st, mode, &alpha, &opts.gysin)?, AlgorithmPath::Schur)
        }
    };
    let poly = poly.assert_integral()?;
    if !poly.is_zero() && !poly.is_homogeneous_of(st.u) {
        return Err(Error::DegreeMismatch { expected: st.u, found: poly.max_grade().unwrap_or(0) });
    }
    Ok(Formula {
        poly,
        meta: FormulaMeta {
            splitting: en,
            m: st.dec.m,
            u: st.u,
            mode,
            path,
            rank_f: st.quot.rank_f,
            rank_g: st.quot.rank_g,
        },
    })
}

/// Class of any normalized, non-balanced type: the closed formula when the
/// type has the shape `(-m, *, ..., *)`, the general construction otherwise.
pub fn class_of(e: &SplittingType, mode: WMode, opts: &ClassOptions) -> Result<Formula> {
    let (en, _) = normalize_twist(e);
    if en.is_balanced() {
        return Err(Error::Balanced(en.to_string()));
    }
    match en.porteous_shape() {
        Some(m) if opts.m.is_none() || opts.m == Some(m) => closed_formula(en.rank(), en.degree(), m, mode),
        _ => general_class_with(&en, mode, opts),
    }
}

/// Context of `alpha`: Chern classes of `S_{d-1}`, `S_d` (and `W`), truncated
/// at the codimension of the smaller locus.
pub(crate) fn alpha_context(st: &Setup, mode: WMode) -> Arc<BundleContext> {
    let u = st.dec.a.expected_codim();
    let mut b = BundleContext::builder("alpha", u).bundle("S1", st.quot.r1, "s1").bundle("S2", st.quot.r2, "s2");
    if mode == WMode::General {
        b = b.bundle("W", 2, "base");
    }
    b.build()
}

/// `alpha` with `[Z_a] = iota^* alpha`: the class of `a` for the universal
/// subsheaf, with `c(p_* S(j))` rewritten in `c(S_{d-1})`, `c(S_d)`.
pub fn z_class(st: &Setup, mode: WMode, opts: &ClassOptions) -> Result<GradedPoly> {
    let ctx = alpha_context(st, mode);
    let a = &st.dec.a;
    if a.rank() == 1 || a.is_balanced() {
        return Ok(GradedPoly::one(&ctx));
    }
    let (an, t) = normalize_twist(a);
    let inner = ClassOptions { m: None, ..opts.clone() };
    let phi = class_of(&an, mode, &inner)?;
    let d = st.dec.d;
    let td = formula::twist_data(&ctx, mode)?;
    let s_hi = KClass::of_symbol(&ctx, "S2")?;
    let s_lo = KClass::of_symbol(&ctx, "S1")?;
    let src = phi.poly.ctx().clone();
    let mut bindings = FxHashMap::default();
    for (sym, j) in [("F", t + phi.meta.m), ("G", t + phi.meta.m - 1)] {
        let (ka, kb) = twist_rewrite(j, d, &td);
        let c = ka.tensor(&s_hi)?.add(&kb.tensor(&s_lo)?)?.dual().chern();
        let s = src.symbol(sym).ok_or_else(|| Error::UnknownSymbol(sym.into()))?;
        for (i, &v) in s.vars.iter().enumerate() {
            if (i as u32) < phi.meta.u {
                bindings.insert(v, c.component(i as u32 + 1));
            }
        }
    }
    phi.poly.map_into(&ctx, &bindings)?.assert_integral()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[i64]) -> SplittingType {
        SplittingType::new(v.to_vec()).unwrap()
    }

    #[test]
    fn alpha_of_the_flagship() {
        let st = Setup::new(&t(&[-2, 0, 2]), None).unwrap();
        let a = z_class(&st, WMode::Trivial, &ClassOptions::default()).unwrap();
        assert_eq!(a.to_string(), "-2*c1(S1) + c1(S2)");
    }

    #[test]
    fn alpha_base_cases() {
        for e in [[-1, 1], [-2, 2]] {
            let st = Setup::new(&t(&e), None).unwrap();
            assert_eq!(z_class(&st, WMode::General, &ClassOptions::default()).unwrap().to_string(), "1");
        }
        // a = (-1, 0) is balanced
        let st = Setup::new(&t(&[-1, 0, 1]), None).unwrap();
        assert_eq!(z_class(&st, WMode::Trivial, &ClassOptions::default()).unwrap().to_string(), "1");
    }

    #[test]
    fn general_w_alpha_reduces_to_trivial() {
        let st = Setup::new(&t(&[-2, 0, 2]), None).unwrap();
        let g = z_class(&st, WMode::General, &ClassOptions::default()).unwrap();
        let ctx = g.ctx().clone();
        let kill: Vec<_> = (1..=2).map(|i| (ctx.var_index("W", i).unwrap(), GradedPoly::zero(&ctx))).collect();
        assert_eq!(g.substitute(&kill).unwrap().to_string(), "-2*c1(S1) + c1(S2)");
    }
}
