use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use splitloci::context::BundleContext;
use splitloci::gysin::{gysin_grassmann, gysin_product, to_schur_basis, GrassCtx, Gysin};
use splitloci::oracle::{schubert_duality, segre_check};
use splitloci::partition::Partition;
use splitloci::poly::GradedPoly;
use splitloci::Rat;

#[test]
fn projective_bundle_matches_segre_classes() {
    let g = Gysin::default();
    for n in 1..=6 {
        for i in 0..=6 {
            let (engine, oracle) = segre_check(n, i, &g).unwrap();
            assert_eq!(engine, oracle, "n={n} i={i}");
        }
    }
}

#[test]
fn schubert_duality_against_littlewood_richardson() {
    let g = Gysin::default();
    for (k, n) in [(2, 4), (2, 5), (3, 6), (1, 4), (2, 6), (3, 5)] {
        let checks = schubert_duality(k, n, &g).unwrap();
        assert!(!checks.is_empty());
        for c in &checks {
            assert!(c.ok(), "G({k},{n}) {} x {}: engine {} expected {}", c.lambda, c.mu, c.engine, c.expected);
        }
        // complementary pairs are exactly the ones that integrate to 1
        for c in &checks {
            let comp = c.lambda.complement(k as usize, n - k).unwrap();
            assert_eq!(c.expected, u64::from(comp == c.mu));
        }
    }
}

/// Exact localization: `int_{G(k,n)} f = sum_I f(x_I) / prod_{i in I, j not in I} (x_j - x_i)`
/// for numeric distinct roots `x` of the ambient bundle.
fn localize(k: usize, roots: &[i64], f: &dyn Fn(&[i64]) -> BigRational) -> BigRational {
    let n = roots.len();
    let mut total = BigRational::zero();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let sub: Vec<i64> = subset.iter().map(|&i| roots[i]).collect();
        let mut euler = BigRational::one();
        for &i in &subset {
            for j in 0..n {
                if !subset.contains(&j) {
                    euler *= BigRational::from_integer((roots[j] - roots[i]).into());
                }
            }
        }
        total += f(&sub) / euler;
        // next k-subset
        let mut i = k;
        loop {
            if i == 0 {
                return total;
            }
            i -= 1;
            if subset[i] < n - k + i {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
        if k == 0 {
            return total;
        }
    }
}

fn elementary(xs: &[i64]) -> Vec<BigRational> {
    let mut e = vec![BigRational::one()];
    for &x in xs {
        let mut next = e.clone();
        next.push(BigRational::zero());
        for i in 1..next.len() {
            next[i] =
                &e.get(i).cloned().unwrap_or_else(BigRational::zero) + &e[i - 1] * BigRational::from_integer(x.into());
        }
        e = next;
    }
    e
}

fn eval(p: &GradedPoly, values: &FxHashMap<usize, BigRational>) -> BigRational {
    let mut acc = BigRational::zero();
    for (m, c) in p.terms() {
        let mut t = c.to_big();
        for (i, &e) in m.iter().enumerate() {
            if e > 0 {
                t *= values[&i].pow(e as i32);
            }
        }
        acc += t;
    }
    acc
}

#[test]
fn random_integrands_match_localization() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (k, n) in [(1, 3), (2, 4), (2, 5), (3, 5)] {
        let fiber = k * (n - k);
        let top = fiber + 2;
        let src = BundleContext::builder("src", top).bundle("V", n, "base").bundle("S", k, "fiber").build();
        let base = BundleContext::builder("base", 2).bundle("V", n, "base").build();
        for _ in 0..4 {
            // random polynomial in c(S) and c(V) of degree <= fiber + 2
            let mut terms = Vec::new();
            for _ in 0..12 {
                let m: SmallVec<[u8; 24]> = (0..src.nvars()).map(|_| rng.gen_range(0..3u8)).collect();
                terms.push((m, Rat::int(rng.gen_range(-5..6))));
            }
            let p = GradedPoly::from_terms(&src, terms);
            let g = GrassCtx::new(k, n, "S", base.total_chern("V").unwrap()).unwrap();
            let pushed = gysin_grassmann(&p, &g, &base).unwrap();
            let mut roots: Vec<i64> = Vec::new();
            while roots.len() < n as usize {
                let r = rng.gen_range(-30..30);
                if !roots.contains(&r) {
                    roots.push(r);
                }
            }
            let ev = elementary(&roots);
            let base_vals: FxHashMap<usize, BigRational> =
                (1..=n).map(|i| (base.var_index("V", i).unwrap(), ev[i as usize].clone())).collect();
            let src_v: FxHashMap<usize, BigRational> =
                (1..=n).map(|i| (src.var_index("V", i).unwrap(), ev[i as usize].clone())).collect();
            let f = |sub: &[i64]| {
                let es = elementary(sub);
                let mut vals = src_v.clone();
                for i in 1..=k {
                    vals.insert(src.var_index("S", i).unwrap(), es[i as usize].clone());
                }
                eval(&p, &vals)
            };
            assert_eq!(localize(k as usize, &roots, &f), eval(&pushed, &base_vals), "G({k},{n})");
        }
    }
}

#[test]
fn projection_formula_and_degree_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (k, n) = (2u32, 5u32);
    let fiber = k * (n - k);
    let src = BundleContext::builder("src", fiber + 3)
        .bundle("V", n, "base")
        .bundle("B", 2, "base")
        .bundle("S", k, "fiber")
        .build();
    let base = BundleContext::builder("base", 3).bundle("V", n, "base").bundle("B", 2, "base").build();
    let g = GrassCtx::new(k, n, "S", base.total_chern("V").unwrap()).unwrap();
    for _ in 0..6 {
        let s1 = src.chern_var("S", 1).unwrap();
        let s2 = src.chern_var("S", 2).unwrap();
        let a = rng.gen_range(0..=fiber / 2);
        let b = fiber + 1 - 2 * a.min(fiber.div_ceil(2));
        let p = s2.pow(a).mul(&s1.pow(b)).unwrap();
        let pushed = gysin_grassmann(&p, &g, &base).unwrap();
        assert!(pushed.is_homogeneous_of(2 * a + b - fiber), "degree contract");
        let beta_src = src.chern_var("B", 1).unwrap().add(&src.chern_var("V", 1).unwrap()).unwrap();
        let beta = base.chern_var("B", 1).unwrap().add(&base.chern_var("V", 1).unwrap()).unwrap();
        let lhs = gysin_grassmann(&beta_src.mul(&p).unwrap(), &g, &base).unwrap();
        assert_eq!(lhs, beta.mul(&pushed).unwrap());
    }
    // below the fiber dimension everything vanishes
    let low = src.chern_var("S", 2).unwrap().pow(2);
    assert!(gysin_grassmann(&low, &g, &base).unwrap().is_zero());
}

#[test]
fn schur_basis_roundtrip() {
    // c1(S)^2 = s_2 + s_11 for k >= 2, and e_k^j = s_{(j^k)}
    let ctx = BundleContext::builder("t", 9).bundle("S", 3, "fiber").bundle("B", 1, "base").build();
    let s1 = ctx.chern_var("S", 1).unwrap();
    let basis = to_schur_basis(&s1.mul(&s1).unwrap(), "S").unwrap();
    let lams: Vec<Partition> = basis.iter().map(|(l, _)| l.clone()).collect();
    assert_eq!(lams, vec![Partition::new(vec![1, 1]), Partition::new(vec![2])]);
    let s3 = ctx.chern_var("S", 3).unwrap();
    for j in 1..=3 {
        let b = to_schur_basis(&s3.pow(j), "S").unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].0, Partition::new(vec![j; 3]));
    }
    // reconstruct via the dual Jacobi-Trudi determinant s_lambda = det(e_{lambda'_i - i + j})
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..8 {
        let terms: Vec<(SmallVec<[u8; 24]>, Rat)> = (0..5)
            .map(|_| ((0..ctx.nvars()).map(|_| rng.gen_range(0..3u8)).collect(), Rat::int(rng.gen_range(-4..5))))
            .collect();
        let p = GradedPoly::from_terms(&ctx, terms);
        let mut back = GradedPoly::zero(&ctx);
        for (lam, coeff) in to_schur_basis(&p, "S").unwrap() {
            let conj = lam.conjugate();
            let s = if conj.is_empty() {
                GradedPoly::one(&ctx)
            } else {
                splitloci::determinantal::det(conj.len(), |i, j| {
                    let idx = conj.part(i) as i64 - i as i64 + j as i64;
                    if idx < 0 {
                        GradedPoly::zero(&ctx)
                    } else {
                        ctx.chern_var("S", idx as u32).unwrap()
                    }
                })
                .unwrap()
            };
            back = back.add(&coeff.mul(&s).unwrap()).unwrap();
        }
        assert_eq!(back, p);
    }
}

fn two_factor() -> (Arc<BundleContext>, Arc<BundleContext>, Arc<BundleContext>, Arc<BundleContext>) {
    // G(1, V1) x G(2, V2) over a base carrying V1 (rank 3) and V2 (rank 4)
    let src = BundleContext::builder("src", 8)
        .bundle("V1", 3, "base")
        .bundle("V2", 4, "base")
        .bundle("S1", 1, "f1")
        .bundle("S2", 2, "f2")
        .build();
    let mid2 =
        BundleContext::builder("mid2", 8).bundle("V1", 3, "base").bundle("V2", 4, "base").bundle("S1", 1, "f1").build();
    let mid1 =
        BundleContext::builder("mid1", 8).bundle("V1", 3, "base").bundle("V2", 4, "base").bundle("S2", 2, "f2").build();
    let base = BundleContext::builder("base", 2).bundle("V1", 3, "base").bundle("V2", 4, "base").build();
    (src, mid2, mid1, base)
}

#[test]
fn product_pushforward_is_order_independent() {
    let (src, mid2, mid1, base) = two_factor();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..6 {
        let terms: Vec<(SmallVec<[u8; 24]>, Rat)> = (0..10)
            .map(|_| ((0..src.nvars()).map(|_| rng.gen_range(0..4u8)).collect(), Rat::int(rng.gen_range(-4..5))))
            .collect();
        let p = GradedPoly::from_terms(&src, terms);
        let g1_mid = GrassCtx::new(1, 3, "S1", mid1.total_chern("V1").unwrap()).unwrap();
        let g2_mid = GrassCtx::new(2, 4, "S2", mid2.total_chern("V2").unwrap()).unwrap();
        let g1 = GrassCtx::new(1, 3, "S1", base.total_chern("V1").unwrap()).unwrap();
        let g2 = GrassCtx::new(2, 4, "S2", base.total_chern("V2").unwrap()).unwrap();
        let a = gysin_product(&p, &g1, &g2_mid, &mid2, &base).unwrap();
        let b = gysin_product(&p, &g2, &g1_mid, &mid1, &base).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn product_point_classes() {
    // over a point: point class of G(1,3) times point class of G(2,4) -> 1
    let src = BundleContext::builder("src", 6).bundle("S1", 1, "f1").bundle("S2", 2, "f2").build();
    let mid = BundleContext::builder("mid", 6).bundle("S1", 1, "f1").build();
    let point = BundleContext::builder("point", 0).bundle("V", 1, "base").build();
    let pt1 = src.chern_var("S1", 1).unwrap().pow(2);
    let pt2 = src.chern_var("S2", 2).unwrap().pow(2);
    let g1 = GrassCtx::new(1, 3, "S1", GradedPoly::one(&point)).unwrap();
    let g2 = GrassCtx::new(2, 4, "S2", GradedPoly::one(&mid)).unwrap();
    let got = gysin_product(&pt1.mul(&pt2).unwrap(), &g1, &g2, &mid, &point).unwrap();
    assert_eq!(got, GradedPoly::one(&point));
    // total degree below the fiber dimension pushes to zero
    let low = gysin_product(&pt1, &g1, &g2, &mid, &point).unwrap();
    assert!(low.is_zero());
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let plain = schubert_duality(2, 5, &Gysin::default()).unwrap();
    for _ in 0..2 {
        let cache = Arc::new(splitloci::cache::PushCache::open(dir.path()).unwrap());
        let cached = schubert_duality(2, 5, &Gysin::new(Some(cache.clone()))).unwrap();
        cache.flush().unwrap();
        for (a, b) in plain.iter().zip(&cached) {
            assert_eq!(a.engine.to_string(), b.engine.to_string());
        }
    }
}

#[test]
fn pushforward_is_additive_across_degrees() {
    // a low-degree piece must not lower the truncation of the sum
    let (k, n) = (2u32, 5u32);
    let fiber = k * (n - k);
    let src = BundleContext::builder("src", fiber + 3).bundle("V", n, "base").bundle("S", k, "fiber").build();
    let base = BundleContext::builder("base", 3).bundle("V", n, "base").build();
    let g = GrassCtx::new(k, n, "S", base.total_chern("V").unwrap()).unwrap();
    let s1 = src.chern_var("S", 1).unwrap();
    let v1 = src.chern_var("V", 1).unwrap();
    let low = s1.pow(fiber + 1).mul(&v1).unwrap();
    let high = s1.pow(fiber + 3);
    let separately =
        gysin_grassmann(&low, &g, &base).unwrap().add(&gysin_grassmann(&high, &g, &base).unwrap()).unwrap();
    let together = gysin_grassmann(&low.add(&high).unwrap(), &g, &base).unwrap();
    assert_eq!(separately.trunc(), 3);
    assert_eq!(separately.to_string(), together.to_string());
    assert_eq!(separately.max_grade(), Some(3));
}
