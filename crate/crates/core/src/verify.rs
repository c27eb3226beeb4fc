//! Self-checks run by `splitloci verify`: the Gysin engine against
//! independent oracles, the general construction against the closed formula,
//! a degree-bookkeeping sweep, and the published (-2,0,2) polynomial.

use std::fmt;
use std::time::{Duration, Instant};

use crate::document::parse_polynomial;
use crate::error::{Error, Result};
use crate::oracle::{schubert_duality, segre_check};
use crate::splitting::{
    closed_formula, degree_audit, general_class_with, output_context, poset, rewrite_formula_twist, ClassOptions,
    Formula, SplittingType, WMode,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Gysin,
    Equivalence,
    Sweep,
    Flagship,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gysin" => Ok(Suite::Gysin),
            "equivalence" => Ok(Suite::Equivalence),
            "sweep" => Ok(Suite::Sweep),
            "flagship" => Ok(Suite::Flagship),
            "all" => Ok(Suite::All),
            _ => Err(Error::InvalidArgument(format!("unknown suite {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub ok: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.ok { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}/{} ({:.1?})", self.suite, self.name, self.elapsed)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

fn timed(suite: &'static str, name: impl Into<String>, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let t = Instant::now();
    let (ok, detail) = f().unwrap_or_else(|e| (false, e.to_string()));
    Check { suite, name: name.into(), ok, detail, elapsed: t.elapsed() }
}

/// The (-2,0,2) class for trivial `W` as published, in the text notation.
pub const FLAGSHIP_TRIVIAL_W: &str =
    "4 f1^4 g1 - 8 f1^3 g1^2 + 4 f1^2 g1^3 - 3 f1^3 f2 - 6 f1^2 f2 g1 + 13 f1 f2 g1^2 \
    - 4 f2 g1^3 + 8 f1^2 g1 g2 - 8 f1 g1^2 g2 + 6 f1 f2^2 + 3 f1^2 f3 - 2 f2^2 g1 + 2 f1 f3 g1 - 5 f3 g1^2 \
    - 6 f1 f2 g2 - 2 f2 g1 g2 + 4 g1 g2^2 - 8 f1 g1 g3 + 8 g1^2 g3 - 6 f2 f3 - 3 f1 f4 + 2 f4 g1 + 6 f3 g2 \
    + 6 f2 g3 - 6 g2 g3 + 2 g1 g4 + 3 f5 - 6 g5";

fn shape_ok(f: &Formula) -> (bool, String) {
    let hom = f.poly.is_zero() || f.poly.is_homogeneous_of(f.meta.u);
    let int = f.poly.clone().assert_integral().is_ok();
    (hom && int, format!("{} terms, homogeneous {hom}, integral {int}", f.poly.len()))
}

fn gysin_suite(opts: &ClassOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for (k, n) in [(2, 4), (2, 5), (3, 6)] {
        out.push(timed("gysin", format!("G({k},{n}) duality"), || {
            let checks = schubert_duality(k, n, &opts.gysin)?;
            let bad: Vec<_> = checks.iter().filter(|c| !c.ok()).collect();
            Ok((bad.is_empty(), format!("{} pairs, {} wrong", checks.len(), bad.len())))
        }));
    }
    out.push(timed("gysin", "projective bundles vs Segre classes", || {
        let mut n_checks = 0;
        for n in 1..=6 {
            for i in 0..=6 {
                let (engine, oracle) = segre_check(n, i, &opts.gysin)?;
                if engine != oracle {
                    return Ok((false, format!("P(V) with rank {n}, exponent shift {i}")));
                }
                n_checks += 1;
            }
        }
        Ok((true, format!("{n_checks} pushforwards")))
    }));
    out
}

fn equivalence_suite(opts: &ClassOptions) -> Vec<Check> {
    let mut out = Vec::new();
    for v in [vec![-1, 1], vec![-2, 2], vec![-1, 0, 1]] {
        for mode in [WMode::Trivial, WMode::General] {
            let e = SplittingType::new(v.clone()).expect("sorted");
            out.push(timed("equivalence", format!("{e} {mode}"), || {
                let m = e.porteous_shape().expect("closed shape");
                let g = general_class_with(&e, mode, opts)?;
                let c = rewrite_formula_twist(&closed_formula(e.rank(), e.degree(), m, mode)?, g.meta.m)?;
                let (shape, detail) = shape_ok(&g);
                Ok((shape && g.same_class(&c), format!("via {}, {detail}", g.meta.path)))
            }));
        }
    }
    out
}

fn sweep_suite() -> Vec<Check> {
    vec![timed("sweep", "degree audit, rank <= 4, u <= 8", || {
        let mut n = 0;
        for r in 2..=4 {
            for l in 0..r as i64 {
                for (e, _) in poset(r, l, 8).nodes {
                    if e.is_balanced() {
                        continue;
                    }
                    let (integrand, fiber, u) = degree_audit(&e)?;
                    if integrand != fiber + u {
                        return Ok((false, format!("{e}: {integrand} != {fiber} + {u}")));
                    }
                    n += 1;
                }
            }
        }
        Ok((true, format!("{n} types")))
    })]
}

fn flagship_suite(opts: &ClassOptions) -> Vec<Check> {
    let e = SplittingType::new(vec![-2, 0, 2]).expect("sorted");
    let mut out = vec![timed("flagship", "degree audit (-2,0,2)", || {
        let a = degree_audit(&e)?;
        Ok((a == (129, 124, 5), format!("{a:?}")))
    })];
    out.push(timed("flagship", "(-2,0,2) trivial W against the published polynomial", || {
        let f = general_class_with(&e, WMode::Trivial, opts)?;
        let ctx = output_context(f.meta.rank_f, f.meta.rank_g, WMode::Trivial, f.meta.u);
        let expected = parse_polynomial(FLAGSHIP_TRIVIAL_W, &ctx)?;
        let got = f.poly.transfer(&ctx)?;
        let (shape, detail) = shape_ok(&f);
        Ok((shape && got.sub(&expected)?.is_zero() && expected.len() == 28, format!("via {}, {detail}", f.meta.path)))
    }));
    out
}

pub fn run(suite: Suite, opts: &ClassOptions) -> Vec<Check> {
    match suite {
        Suite::Gysin => gysin_suite(opts),
        Suite::Equivalence => equivalence_suite(opts),
        Suite::Sweep => sweep_suite(),
        Suite::Flagship => flagship_suite(opts),
        Suite::All => [Suite::Gysin, Suite::Equivalence, Suite::Sweep, Suite::Flagship]
            .into_iter()
            .flat_map(|s| run(s, opts))
            .collect(),
    }
}
