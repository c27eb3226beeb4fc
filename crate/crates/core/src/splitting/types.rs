//! Splitting types of bundles on P^1 and their combinatorics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nondecreasing tuple `(e_1, ..., e_r)` for `O(e_1) + ... + O(e_r)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SplittingType(Vec<i64>);

impl SplittingType {
    pub fn new(entries: Vec<i64>) -> Result<SplittingType> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("a splitting type needs at least one entry".into()));
        }
        if entries.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidArgument(format!("splitting type {entries:?} is not nondecreasing")));
        }
        Ok(SplittingType(entries))
    }

    /// Sorts the entries first; reports whether they had to be reordered.
    pub fn sorted(mut entries: Vec<i64>) -> Result<(SplittingType, bool)> {
        let was_sorted = entries.windows(2).all(|w| w[0] <= w[1]);
        entries.sort_unstable();
        Ok((Self::new(entries)?, !was_sorted))
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn shifted(&self, t: i64) -> SplittingType {
        SplittingType(self.0.iter().map(|e| e + t).collect())
    }

    pub fn is_balanced(&self) -> bool {
        self.0.last().unwrap() - self.0[0] <= 1
    }

    /// `u(e) = sum_{i<j} max(0, e_j - e_i - 1)`.
    pub fn expected_codim(&self) -> u32 {
        let mut u = 0i64;
        for i in 0..self.0.len() {
            for j in i + 1..self.0.len() {
                u += (self.0[j] - self.0[i] - 1).max(0);
            }
        }
        u as u32
    }

    /// Whether the type has the shape `(-m, *, ..., *)`: a single minimal
    /// entry followed by a balanced remainder.
    pub fn porteous_shape(&self) -> Option<i64> {
        if self.is_balanced() {
            return None;
        }
        let rest = SplittingType(self.0[1..].to_vec());
        (rest.is_balanced()).then_some(-self.0[0])
    }
}

pub fn expected_codim(e: &SplittingType) -> u32 {
    e.expected_codim()
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for SplittingType {
    type Err = Error;

    /// Parses `"-2,0,2"` or `"(-2,0,2)"`; entries must already be nondecreasing.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = s
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|e| Error::InvalidArgument(format!("bad entry {x:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        SplittingType::new(entries)
    }
}

/// Partial-sum order: `a <= b` when every partial sum of `a` is at most that of `b`.
pub fn leq(a: &SplittingType, b: &SplittingType) -> Result<bool> {
    if a.rank() != b.rank() || a.degree() != b.degree() {
        return Err(Error::InvalidArgument(format!("{a} and {b} differ in rank or degree")));
    }
    let (mut sa, mut sb) = (0, 0);
    for (x, y) in a.0.iter().zip(&b.0) {
        sa += x;
        sb += y;
        if sa > sb {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique type with entries in `{floor(l/r), ceil(l/r)}` summing to `l`.
pub fn balanced(r: usize, l: i64) -> SplittingType {
    assert!(r >= 1, "rank must be positive");
    let q = l.div_euclid(r as i64);
    let extra = l.rem_euclid(r as i64) as usize;
    SplittingType((0..r).map(|i| if i >= r - extra { q + 1 } else { q }).collect())
}

/// Shift so that `0 <= degree < rank`; returns the shifted type and the shift `t`.
pub fn normalize_twist(e: &SplittingType) -> (SplittingType, i64) {
    let t = -e.degree().div_euclid(e.rank() as i64);
    (e.shifted(t), t)
}

/// Smallest `m` with `e_1 + m >= 0` and `r m + l + 1 > u(e)`.
pub fn choose_m(e: &SplittingType) -> Result<i64> {
    if e.is_balanced() {
        return Err(Error::Balanced(e.to_string()));
    }
    let r = e.rank() as i64;
    let l = e.degree();
    let u = e.expected_codim() as i64;
    let mut m = (-e.entries()[0]).max(i64::MIN / 4);
    // r m + l + 1 > u  <=>  m > (u - l - 1) / r
    let bound = (u - l - 1).div_euclid(r) + 1;
    m = m.max(bound);
    Ok(m)
}

/// `O(e)^vee(-m) = O(-m_0)^i + O(a)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionData {
    pub m: i64,
    pub m0: i64,
    pub i: usize,
    pub a: SplittingType,
    pub d: i64,
    pub s: usize,
}

pub fn dual_decompose(e: &SplittingType, m: i64) -> Result<DecompositionData> {
    if e.is_balanced() {
        return Err(Error::Balanced(e.to_string()));
    }
    let mut dual: Vec<i64> = e.entries().iter().map(|x| -x - m).collect();
    dual.sort_unstable();
    let m0 = -dual[0];
    let i = dual.iter().filter(|&&x| x == -m0).count();
    let rest: Vec<i64> = dual[i..].to_vec();
    let a = SplittingType::new(rest)?;
    Ok(DecompositionData { m, m0, i, d: -a.degree(), s: a.rank(), a })
}

/// Ranks and dimensions of the embedding of the Quot scheme into
/// `G(r1, F (x) Sym^{d-1} W^vee) x G(r2, F (x) Sym^d W^vee)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotEmbeddingData {
    pub rank_f: u32,
    pub rank_g: u32,
    pub d: u32,
    pub s: u32,
    pub r1: u32,
    pub r2: u32,
    pub n1: u32,
    pub n2: u32,
    pub fiber1: u32,
    pub fiber2: u32,
}

impl QuotEmbeddingData {
    pub fn new(e: &SplittingType, dec: &DecompositionData) -> Result<QuotEmbeddingData> {
        let r = e.rank() as i64;
        let l = e.degree();
        let m = dec.m;
        let rank_f = (m + 1) * r + l;
        let rank_g = m * r + l;
        if dec.d < 0 || rank_g < 0 {
            return Err(Error::InvalidArgument(format!("degenerate embedding data for {e} at m = {m}")));
        }
        let (d, s) = (dec.d as u32, dec.s as u32);
        let r1 = d * (s - 1);
        let r2 = r1 + s;
        let n1 = rank_f as u32 * d;
        let n2 = rank_f as u32 * (d + 1);
        if r1 > n1 || r2 > n2 {
            return Err(Error::InvalidArgument(format!("subbundle ranks exceed ambient ranks for {e}")));
        }
        Ok(QuotEmbeddingData {
            rank_f: rank_f as u32,
            rank_g: rank_g as u32,
            d,
            s,
            r1,
            r2,
            n1,
            n2,
            fiber1: r1 * (n1 - r1),
            fiber2: r2 * (n2 - r2),
        })
    }

    pub fn fiber_dim(&self) -> u32 {
        self.fiber1 + self.fiber2
    }

    /// Rank of `(p_* S^vee(1))^vee`.
    pub fn sigma_rank(&self) -> u32 {
        self.d + 2 * self.s
    }
}

/// Everything the general algorithm derives from a splitting type before any
/// polynomial is expanded.
#[derive(Clone, Debug)]
pub struct Setup {
    pub e: SplittingType,
    pub u: u32,
    pub dec: DecompositionData,
    pub quot: QuotEmbeddingData,
}

impl Setup {
    pub fn new(e: &SplittingType, m: Option<i64>) -> Result<Setup> {
        let m = match m {
            Some(m) => m,
            None => choose_m(e)?,
        };
        let dec = dual_decompose(e, m)?;
        let quot = QuotEmbeddingData::new(e, &dec)?;
        Ok(Setup { e: e.clone(), u: e.expected_codim(), dec, quot })
    }
}

/// `(integrand degree, fiber dimension, u)` from rank bookkeeping alone.
pub fn degree_audit(e: &SplittingType) -> Result<(u32, u32, u32)> {
    let st = Setup::new(e, None)?;
    let q = &st.quot;
    let c_top = q.r1 * 2 * (q.n2 - q.r2);
    let sigma = q.sigma_rank() * q.rank_g;
    let alpha = st.dec.a.expected_codim();
    let integrand = c_top + sigma + alpha;
    let fiber = q.fiber_dim();
    if integrand != fiber + st.u {
        return Err(Error::DegreeMismatch { expected: fiber + st.u, found: integrand });
    }
    Ok((integrand, fiber, st.u))
}

/// Types of given rank and degree with `u <= max_codim`, with covering edges
/// `(upper, lower)` of the partial order, listed from the balanced type down.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Poset {
    pub nodes: Vec<(SplittingType, u32)>,
    pub edges: Vec<(usize, usize)>,
}

pub fn poset(r: usize, l: i64, max_codim: u32) -> Poset {
    let bal = balanced(r, l);
    let spread = max_codim as i64 + 1;
    let lo = bal.entries()[0] - spread;
    let mut nodes = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(r: usize, left: i64, min: i64, lo: i64, hi: i64, cur: &mut Vec<i64>, out: &mut Vec<SplittingType>) {
        if cur.len() == r {
            if left == 0 {
                out.push(SplittingType(cur.clone()));
            }
            return;
        }
        let rem = (r - cur.len()) as i64;
        for x in min.max(lo)..=hi {
            // the remaining entries are all >= x
            if x * rem > left {
                break;
            }
            cur.push(x);
            rec(r, left - x, x, lo, hi, cur, out);
            cur.pop();
        }
    }
    for first in lo..=bal.entries()[0] {
        let mut found = Vec::new();
        rec(r, l, first, first, first + spread, &mut cur, &mut found);
        for t in found {
            if t.entries()[0] == first && t.expected_codim() <= max_codim && !nodes.contains(&t) {
                nodes.push(t);
            }
        }
    }
    nodes.sort_by(|a, b| a.expected_codim().cmp(&b.expected_codim()).then_with(|| b.cmp(a)));
    let n = nodes.len();
    let lt = |a: usize, b: usize| a != b && leq(&nodes[a], &nodes[b]).unwrap();
    let mut edges = Vec::new();
    for hi in 0..n {
        for lo in 0..n {
            if lt(lo, hi) && !(0..n).any(|mid| lt(lo, mid) && lt(mid, hi)) {
                edges.push((hi, lo));
            }
        }
    }
    Poset {
        nodes: nodes
            .into_iter()
            .map(|t| {
                let u = t.expected_codim();
                (t, u)
            })
            .collect(),
        edges,
    }
}
