//! Formulas in the variables `f_i`, `g_i`, `w_i`, the closed rank-wise formula
//! for types `(-m, *, ..., *)`, and rewriting between twists.

use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::types::{balanced, SplittingType};
use crate::context::BundleContext;
use crate::error::{Error, Result};
use crate::kclass::{twist_rewrite, KClass, TwistData};
use crate::poly::{ChernSeries, GradedPoly};

/// How the rank-2 bundle `W` with `P^1`-bundle `P(W)` is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WMode {
    Trivial,
    General,
}

impl fmt::Display for WMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WMode::Trivial => "trivial",
            WMode::General => "general",
        })
    }
}

impl std::str::FromStr for WMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(WMode::Trivial),
            "general" => Ok(WMode::General),
            _ => Err(Error::InvalidArgument(format!("unknown W mode {s:?}"))),
        }
    }
}

/// Which algorithm produced a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmPath {
    /// Porteous-type closed formula.
    Closed,
    /// Quot-scheme pushforward expanded in Schur classes.
    Schur,
    /// Quot-scheme pushforward by torus fixed points and interpolation.
    FixedPoint,
}

impl fmt::Display for AlgorithmPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgorithmPath::Closed => "closed",
            AlgorithmPath::Schur => "schur",
            AlgorithmPath::FixedPoint => "fixed-point",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaMeta {
    /// The normalized type the formula is written for.
    pub splitting: SplittingType,
    pub m: i64,
    pub u: u32,
    pub mode: WMode,
    pub path: AlgorithmPath,
    pub rank_f: u32,
    pub rank_g: u32,
}

/// A class in `f_i = c_i((pi_* E(m))^vee)`, `g_i = c_i((pi_* E(m-1))^vee)` and,
/// for general `W`, `w_i = c_i(W)`.
#[derive(Clone, Debug)]
pub struct Formula {
    pub poly: GradedPoly,
    pub meta: FormulaMeta,
}

impl Formula {
    /// Terms as (variable-name monomial, integer coefficient) in canonical order.
    pub fn named_terms(&self) -> Vec<(String, String)> {
        self.poly.sorted_terms().into_iter().map(|(m, c)| (self.poly.mono_string(&m), c.to_string())).collect()
    }

    /// The specialization `w_1 = w_2 = 0` of a general-`W` formula.
    pub fn restrict_to_trivial_w(&self) -> Result<Formula> {
        if self.meta.mode == WMode::Trivial {
            return Ok(self.clone());
        }
        let ctx = self.poly.ctx();
        let kill: Vec<_> = (1..=2).filter_map(|i| ctx.var_index("W", i)).map(|v| (v, GradedPoly::zero(ctx))).collect();
        let out = output_context(self.meta.rank_f, self.meta.rank_g, WMode::Trivial, self.meta.u);
        Ok(Formula {
            poly: self.poly.substitute(&kill)?.transfer(&out)?,
            meta: FormulaMeta { mode: WMode::Trivial, ..self.meta.clone() },
        })
    }

    /// Equality of the underlying polynomials, independent of context identity.
    pub fn same_class(&self, other: &Formula) -> bool {
        self.meta.m == other.meta.m && self.meta.mode == other.meta.mode && self.named_terms() == other.named_terms()
    }
}

/// Context of the output variables: `F` and `G` of the given ranks, plus `W`
/// in general mode, truncated at `u`.
pub fn output_context(rank_f: u32, rank_g: u32, mode: WMode, u: u32) -> Arc<BundleContext> {
    let mut b = BundleContext::builder("formula", u).bundle("F", rank_f, "base").bundle("G", rank_g, "base");
    if mode == WMode::General {
        b = b.bundle("W", 2, "base");
    }
    b.build()
}

pub(crate) fn twist_data(ctx: &Arc<BundleContext>, mode: WMode) -> Result<TwistData<KClass>> {
    match mode {
        WMode::Trivial => Ok(TwistData::trivial(ctx)),
        WMode::General => TwistData::symbolic(ctx),
    }
}

/// The type `(-m, balanced(r-1, l+m))` that the closed formula describes.
pub fn closed_type(r: usize, l: i64, m: i64) -> Result<SplittingType> {
    if r < 2 || m < 1 {
        return Err(Error::InvalidArgument(format!("closed formula needs r >= 2 and m >= 1 (r = {r}, m = {m})")));
    }
    let rest = balanced(r - 1, l + m);
    let mut v = vec![-m];
    v.extend_from_slice(rest.entries());
    let e = SplittingType::new(v)?;
    if e.porteous_shape() != Some(m) {
        return Err(Error::InvalidArgument(format!("{e} is not of the form (-m, *, ..., *) with m = {m}")));
    }
    Ok(e)
}

/// `[c(G (x) W^vee (x) L^vee) / c(F)]_{r(m-1)+l+1}` with `W^vee (x) L^vee = W`.
pub fn closed_formula(r: usize, l: i64, m: i64, mode: WMode) -> Result<Formula> {
    if !(0..r as i64).contains(&l) {
        return Err(Error::InvalidArgument(format!("degree {l} is not normalized for rank {r}")));
    }
    let e = closed_type(r, l, m)?;
    let u = e.expected_codim();
    let ri = r as i64;
    debug_assert_eq!(u as i64, ri * (m - 1) + l + 1);
    let rank_f = ((m + 1) * ri + l) as u32;
    let rank_g = (m * ri + l) as u32;
    let ctx = output_context(rank_f, rank_g, mode, u);
    let cf = ChernSeries::new(ctx.total_chern("F")?)?;
    let num = match mode {
        WMode::Trivial => ChernSeries::new(ctx.total_chern("G")?)?.pow(2),
        WMode::General => KClass::of_symbol(&ctx, "G")?.tensor(&KClass::of_symbol(&ctx, "W")?)?.chern(),
    };
    let poly = num.mul(&cf.invert())?.component(u).assert_integral()?;
    Ok(Formula { poly, meta: FormulaMeta { splitting: e, m, u, mode, path: AlgorithmPath::Closed, rank_f, rank_g } })
}

/// Re-expresses a formula in the variables of another twist `m'`, using
/// `R pi_* E(j) = A R pi_* E(m') + B R pi_* E(m'-1)` for `j = m, m-1`.
pub fn rewrite_formula_twist(phi: &Formula, m_target: i64) -> Result<Formula> {
    let meta = &phi.meta;
    if m_target == meta.m {
        return Ok(phi.clone());
    }
    let r = meta.splitting.rank() as i64;
    let l = meta.splitting.degree();
    let rank_f = (m_target + 1) * r + l;
    let rank_g = m_target * r + l;
    if rank_g < meta.u as i64 {
        return Err(Error::InvalidArgument(format!(
            "twist {m_target} is too small for a class of codimension {}",
            meta.u
        )));
    }
    let ctx = output_context(rank_f as u32, rank_g as u32, meta.mode, meta.u);
    let td = twist_data(&ctx, meta.mode)?;
    let push_hi = KClass::of_symbol(&ctx, "F")?.dual();
    let push_lo = KClass::of_symbol(&ctx, "G")?.dual();
    let class_of = |j: i64| -> Result<ChernSeries> {
        let (a, b) = twist_rewrite(j, m_target, &td);
        Ok(a.tensor(&push_hi)?.add(&b.tensor(&push_lo)?)?.dual().chern())
    };
    let src = phi.poly.ctx();
    let mut bindings = FxHashMap::default();
    for (sym, j) in [("F", meta.m), ("G", meta.m - 1)] {
        let c = class_of(j)?;
        let s = src.symbol(sym).ok_or_else(|| Error::UnknownSymbol(sym.into()))?;
        for (i, &v) in s.vars.iter().enumerate() {
            let deg = i as u32 + 1;
            if deg <= meta.u {
                bindings.insert(v, c.component(deg));
            }
        }
    }
    let poly = phi.poly.map_into(&ctx, &bindings)?.assert_integral()?;
    Ok(Formula {
        poly,
        meta: FormulaMeta { m: m_target, rank_f: rank_f as u32, rank_g: rank_g as u32, ..meta.clone() },
    })
}
