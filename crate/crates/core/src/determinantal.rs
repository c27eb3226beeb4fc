//! Determinantal classes and top Chern classes of tensor products.

use crate::error::{Error, Result};
use crate::kclass::KClass;
use crate::poly::{ChernSeries, GradedPoly};

/// Determinant of an `a x a` matrix given entrywise, by dynamic programming
/// over the set of columns already used (rows taken in order).
pub fn det<F>(a: usize, entry: F) -> Result<GradedPoly>
where
    F: Fn(usize, usize) -> GradedPoly,
{
    assert!((1..=20).contains(&a), "determinant size out of range");
    let cells: Vec<Vec<GradedPoly>> = (0..a).map(|i| (0..a).map(|j| entry(i, j)).collect()).collect();
    let ctx = cells[0][0].ctx().clone();
    let trunc = cells.iter().flatten().map(|c| c.trunc()).min().unwrap();
    let mut dp: Vec<Option<GradedPoly>> = vec![None; 1 << a];
    dp[0] = Some(GradedPoly::one(&ctx).with_trunc(trunc));
    for mask in 0usize..(1 << a) {
        let Some(cur) = dp[mask].take() else { continue };
        let i = mask.count_ones() as usize;
        if i == a {
            dp[mask] = Some(cur);
            continue;
        }
        if cur.is_zero() {
            continue;
        }
        for j in 0..a {
            if mask & (1 << j) != 0 || cells[i][j].is_zero() {
                continue;
            }
            let above = (mask >> (j + 1)).count_ones();
            let mut t = cur.mul(&cells[i][j])?;
            if above % 2 == 1 {
                t = t.neg();
            }
            let slot = &mut dp[mask | (1 << j)];
            *slot = Some(match slot.take() {
                Some(s) => s.add(&t)?,
                None => t,
            });
        }
    }
    Ok(dp[(1 << a) - 1].take().unwrap_or_else(|| GradedPoly::zero(&ctx).with_trunc(trunc)))
}

/// `Delta^a_b(x)`: the determinant of `(x_{b+j-i})_{i,j}`, negative-degree
/// components read as zero.
pub fn delta_det(a: usize, b: i64, x: &GradedPoly) -> Result<GradedPoly> {
    if a == 0 {
        return Ok(GradedPoly::one(x.ctx()).with_trunc(x.trunc()));
    }
    if b < 0 {
        return Err(Error::InvalidArgument(format!("Delta needs b >= 0, got {b}")));
    }
    let comps = x.components();
    let zero = GradedPoly::zero(x.ctx()).with_trunc(x.trunc());
    let get = |k: i64| -> GradedPoly {
        if k < 0 || k as usize >= comps.len() {
            zero.clone()
        } else {
            comps[k as usize].clone()
        }
    };
    // every entry that can reach the determinant has degree <= a*b
    if (a as i64) * b > x.trunc() as i64 {
        return Ok(zero);
    }
    det(a, |i, j| get(b + j as i64 - i as i64))
}

/// `c_{ab}(A (x) B) = Delta^a_b(c(B) / c(A^vee))` for honest bundles of ranks `a`, `b`.
pub fn top_chern_tensor(a: &KClass, b: &KClass) -> Result<GradedPoly> {
    if a.rank() < 0 || b.rank() < 0 {
        return Err(Error::InvalidArgument("top Chern class needs nonnegative ranks".into()));
    }
    let num = b.chern();
    let den = a.dual().chern();
    top_chern_from_series(a.rank() as usize, b.rank(), &num, &den)
}

/// Same as [`top_chern_tensor`] from total Chern classes `c(B)` and `c(A^vee)`.
pub fn top_chern_from_series(a: usize, b: i64, c_b: &ChernSeries, c_a_dual: &ChernSeries) -> Result<GradedPoly> {
    let x = c_b.mul(&c_a_dual.invert())?;
    delta_det(a, b, x.poly())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::BundleContext;
    use crate::kclass::chern_to_char;
    use crate::rational::Rat;
    use proptest::prelude::*;
    use rustc_hash::FxHashMap;
    use std::sync::Arc;

    #[test]
    fn small_determinants() {
        let ctx = BundleContext::builder("t", 6).bundle("X", 6, "b").build();
        let x = ctx.total_chern("X").unwrap();
        let xi = |i| ctx.chern_var("X", i).unwrap();
        assert_eq!(delta_det(1, 3, &x).unwrap(), xi(3));
        let d = delta_det(2, 1, &x).unwrap();
        assert_eq!(d, xi(1).mul(&xi(1)).unwrap().sub(&xi(2)).unwrap());
        let one = GradedPoly::one(&ctx);
        for a in 1..4 {
            for b in 1..3 {
                assert!(delta_det(a, b, &one).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn line_bundle_tensor() {
        let ctx = BundleContext::builder("t", 4).bundle("s", 1, "b").bundle("t", 1, "b").build();
        let s = ctx.chern_var("s", 1).unwrap();
        let t = ctx.chern_var("t", 1).unwrap();
        let c = top_chern_tensor(&KClass::line(&s).unwrap(), &KClass::line(&t).unwrap()).unwrap();
        assert_eq!(c, s.add(&t).unwrap());
    }

    /// Brute force: expand both bundles into formal roots and multiply out
    /// `prod_{i,j} (a_i + b_j)`, then pull back to Chern classes by matching
    /// against the elementary symmetric functions.
    fn root_oracle(alpha: u32, beta: u32) {
        let trunc = (alpha * beta).max(1);
        let mut rb = BundleContext::builder("roots", trunc);
        for i in 0..alpha {
            rb = rb.bundle(&format!("a{i}"), 1, "b");
        }
        for j in 0..beta {
            rb = rb.bundle(&format!("b{j}"), 1, "b");
        }
        let roots = rb.build();
        let ctx = BundleContext::builder("chern", trunc).bundle("A", alpha, "b").bundle("B", beta, "b").build();
        let av: Vec<GradedPoly> = (0..alpha).map(|i| roots.chern_var(&format!("a{i}"), 1).unwrap()).collect();
        let bv: Vec<GradedPoly> = (0..beta).map(|j| roots.chern_var(&format!("b{j}"), 1).unwrap()).collect();
        let mut prod = GradedPoly::one(&roots);
        for a in &av {
            for b in &bv {
                prod = prod.mul(&a.add(b).unwrap()).unwrap();
            }
        }
        let elem = |vs: &[GradedPoly], k: u32| -> GradedPoly {
            let one = GradedPoly::one(&roots);
            let mut total = one.clone();
            for v in vs {
                total = total.mul(&one.add(v).unwrap()).unwrap();
            }
            total.homogeneous_component(k).unwrap()
        };
        let mut bind: FxHashMap<usize, GradedPoly> = FxHashMap::default();
        for k in 1..=alpha {
            bind.insert(ctx.var_index("A", k).unwrap(), elem(&av, k));
        }
        for k in 1..=beta {
            bind.insert(ctx.var_index("B", k).unwrap(), elem(&bv, k));
        }
        let a = chern_to_char(alpha as i64, &ChernSeries::new(ctx.total_chern("A").unwrap()).unwrap()).unwrap();
        let b = chern_to_char(beta as i64, &ChernSeries::new(ctx.total_chern("B").unwrap()).unwrap()).unwrap();
        let c = top_chern_tensor(&a, &b).unwrap();
        let pulled = c.map_into(&roots, &bind).unwrap();
        assert_eq!(pulled, prod, "alpha={alpha} beta={beta}");
    }

    #[test]
    fn top_chern_matches_roots() {
        for alpha in 1..=3 {
            for beta in 1..=3 {
                root_oracle(alpha, beta);
            }
        }
    }

    fn shared() -> Arc<BundleContext> {
        use std::sync::OnceLock;
        static CTX: OnceLock<Arc<BundleContext>> = OnceLock::new();
        CTX.get_or_init(|| BundleContext::builder("dt", 8).bundle("X", 4, "b").build()).clone()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn determinant_is_multilinear(m in prop::collection::vec(-3i64..4, 27), k in -3i64..4) {
            let ctx = shared();
            let xi = |i: usize| ctx.chern_var("X", (i % 4) as u32 + 1).unwrap();
            let cell = |i: usize, j: usize, row: &[i64]| xi(i + j).scale(&Rat::int(row[3 * i + j]));
            let base = det(3, |i, j| cell(i, j, &m[..9])).unwrap();
            let other = det(3, |i, j| if i == 0 { cell(i, j, &m[9..18]) } else { cell(i, j, &m[..9]) }).unwrap();
            let combo = det(3, |i, j| if i == 0 {
                cell(i, j, &m[..9]).add(&cell(i, j, &m[9..18]).scale(&Rat::int(k))).unwrap()
            } else { cell(i, j, &m[..9]) }).unwrap();
            prop_assert_eq!(combo, base.add(&other.scale(&Rat::int(k))).unwrap());
            let dup = det(3, |i, j| { let i2 = if i == 2 { 0 } else { i }; xi(i2 + j).scale(&Rat::int(m[18 + 3 * i2 + j])) }).unwrap();
            prop_assert!(dup.is_zero());
        }
    }
}
