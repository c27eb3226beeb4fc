//! Independent reference computations used to check the Gysin engine:
//! Littlewood–Richardson coefficients by tableau counting and the classical
//! projective-bundle Segre formula.

use std::sync::Arc;

use crate::context::BundleContext;
use crate::determinantal::det;
use crate::error::Result;
use crate::gysin::{GrassCtx, Gysin};
use crate::partition::Partition;
use crate::poly::{invert_unit, GradedPoly};
use crate::rational::Rat;

/// `c^nu_{lambda mu}`: the number of semistandard fillings of `nu / lambda`
/// with content `mu` whose reverse reading word is a lattice word.
pub fn lr_coefficient(nu: &Partition, lambda: &Partition, mu: &Partition) -> u64 {
    if !nu.contains(lambda) || nu.size() != lambda.size() + mu.size() {
        return 0;
    }
    let rows = nu.len();
    // cells of the skew shape in reading order: rows top to bottom, right to left
    let mut cells = Vec::new();
    for r in 0..rows {
        for c in (lambda.part(r)..nu.part(r)).rev() {
            cells.push((r, c as usize));
        }
    }
    let width = nu.part(0) as usize;
    let mut grid = vec![vec![0u32; width]; rows];
    let mut count = vec![0u32; mu.len() + 1];
    fn rec(
        pos: usize,
        cells: &[(usize, usize)],
        grid: &mut Vec<Vec<u32>>,
        count: &mut Vec<u32>,
        lambda: &Partition,
        mu: &Partition,
    ) -> u64 {
        if pos == cells.len() {
            return 1;
        }
        let (r, c) = cells[pos];
        let mut total = 0;
        for v in 1..=mu.len() as u32 {
            // content bound and lattice condition
            if count[v as usize] >= mu.part(v as usize - 1) {
                continue;
            }
            if v > 1 && count[v as usize] + 1 > count[v as usize - 1] {
                continue;
            }
            // rows weakly increase left to right: the cell to the right was filled earlier
            if c + 1 < grid[r].len() && grid[r][c + 1] != 0 && grid[r][c + 1] < v {
                continue;
            }
            // columns strictly increase downward
            if r > 0 && c >= lambda.part(r - 1) as usize {
                // cell above lies in the skew shape
                if grid[r - 1][c] >= v {
                    continue;
                }
            }
            grid[r][c] = v;
            count[v as usize] += 1;
            total += rec(pos + 1, cells, grid, count, lambda, mu);
            count[v as usize] -= 1;
            grid[r][c] = 0;
        }
        total
    }
    rec(0, &cells, &mut grid, &mut count, lambda, mu)
}

/// Schubert class `sigma_lambda = det(c_{lambda_i + j - i}(Q))`.
pub fn schubert_class(ctx: &Arc<BundleContext>, quot: &str, lambda: &Partition) -> Result<GradedPoly> {
    if lambda.is_empty() {
        return Ok(GradedPoly::one(ctx));
    }
    let a = lambda.len();
    det(a, |i, j| {
        let idx = lambda.part(i) as i64 + j as i64 - i as i64;
        if idx < 0 {
            GradedPoly::zero(ctx)
        } else {
            ctx.chern_var(quot, idx as u32).expect("registered")
        }
    })
}

/// One Schubert-duality comparison over a point.
#[derive(Debug, Clone)]
pub struct DualityCheck {
    pub k: u32,
    pub n: u32,
    pub lambda: Partition,
    pub mu: Partition,
    pub engine: GradedPoly,
    pub expected: u64,
}

impl DualityCheck {
    pub fn ok(&self) -> bool {
        self.engine == GradedPoly::constant(self.engine.ctx(), Rat::int(self.expected as i64))
    }
}

/// `int_{G(k,n)} sigma_lambda sigma_mu` for every pair of complementary total
/// degree, compared with `c^{(q^k)}_{lambda mu}`.
pub fn schubert_duality(k: u32, n: u32, gysin: &Gysin) -> Result<Vec<DualityCheck>> {
    let q = n - k;
    let dim = k * q;
    let src =
        BundleContext::builder(format!("G({k},{n})"), dim).bundle("S", k, "fiber").bundle("Q", q, "fiber").build();
    let point = BundleContext::builder("point", 0).bundle("V", n, "base").build();
    let g = GrassCtx::new(k, n, "S", GradedPoly::one(&point))?.with_quotient("Q", GradedPoly::one(&src));
    let boxed = Partition::new(vec![q; k as usize]);
    let mut out = Vec::new();
    for a in 0..=dim {
        for lambda in Partition::all_of_size(a, k as usize).into_iter().filter(|l| l.fits_box(k as usize, q)) {
            for mu in Partition::all_of_size(dim - a, k as usize).into_iter().filter(|l| l.fits_box(k as usize, q)) {
                let integrand = schubert_class(&src, "Q", &lambda)?.mul(&schubert_class(&src, "Q", &mu)?)?;
                let engine = gysin.grassmann(&integrand, &g, &point)?;
                let expected = lr_coefficient(&boxed, &lambda, &mu);
                out.push(DualityCheck { k, n, lambda: lambda.clone(), mu, engine, expected });
            }
        }
    }
    Ok(out)
}

/// On `P(V) = G(1, V)` with `zeta = -c_1(S)`: `rho_* zeta^{n-1+i}` against the
/// Segre class `[c(V)^{-1}]_i`. Returns (engine, oracle).
pub fn segre_check(n: u32, i: u32, gysin: &Gysin) -> Result<(GradedPoly, GradedPoly)> {
    let base = BundleContext::builder("base", i).bundle("V", n, "base").build();
    let src = BundleContext::builder("P(V)", n - 1 + i).bundle("V", n, "base").bundle("S", 1, "fiber").build();
    let zeta = src.chern_var("S", 1)?.neg();
    let integrand = zeta.pow(n - 1 + i);
    let g = GrassCtx::new(1, n, "S", base.total_chern("V")?)?;
    let engine = gysin.grassmann(&integrand, &g, &base)?;
    let oracle = invert_unit(&base.total_chern("V")?)?.homogeneous_component(i)?;
    Ok((engine, oracle))
}
