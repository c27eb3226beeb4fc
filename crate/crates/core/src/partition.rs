//! Integer partitions and the Pieri rule for elementary symmetric functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A weakly decreasing sequence of positive parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Sorts the parts and drops zeros.
    pub fn new(mut parts: Vec<u32>) -> Partition {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition(parts)
    }

    pub fn empty() -> Partition {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Part `i` (0-based), zero past the length.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn conjugate(&self) -> Partition {
        let w = self.part(0) as usize;
        Partition((0..w).map(|j| self.0.iter().filter(|&&p| p as usize > j).count() as u32).collect())
    }

    pub fn fits_box(&self, rows: usize, cols: u32) -> bool {
        self.len() <= rows && self.part(0) <= cols
    }

    /// Complement inside the `rows x cols` box.
    pub fn complement(&self, rows: usize, cols: u32) -> Option<Partition> {
        if !self.fits_box(rows, cols) {
            return None;
        }
        Some(Partition::new((0..rows).rev().map(|i| cols - self.part(i)).collect()))
    }

    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && (0..other.len()).all(|i| self.part(i) >= other.part(i))
    }

    /// All partitions of `n` with at most `rows` parts, in decreasing lex order.
    pub fn all_of_size(n: u32, rows: usize) -> Vec<Partition> {
        fn rec(n: u32, max: u32, rows: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            if rows == 0 {
                return;
            }
            for p in (1..=max.min(n)).rev() {
                cur.push(p);
                rec(n - p, p, rows - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, rows, &mut Vec::new(), &mut out);
        out
    }

    /// Pieri rule: the partitions `mu` with `s_self * e_j = sum s_mu`, that is,
    /// `mu / self` a vertical strip of size `j`, restricted to `max_rows` rows.
    pub fn pieri_e(&self, j: u32, max_rows: usize) -> Vec<Partition> {
        let rows = max_rows.min(self.len() + j as usize);
        let mut out = Vec::new();
        let mut cur: Vec<u32> = (0..rows).map(|i| self.part(i)).collect();
        fn rec(i: usize, left: u32, base: &Partition, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if left == 0 {
                out.push(Partition::new(cur.clone()));
                return;
            }
            if i == cur.len() || (cur.len() - i) < left as usize {
                return;
            }
            // add a box to row i when the result stays a partition
            if i == 0 || cur[i - 1] > base.part(i) {
                cur[i] += 1;
                rec(i + 1, left - 1, base, cur, out);
                cur[i] -= 1;
            }
            rec(i + 1, left, base, cur, out);
        }
        rec(0, j, self, &mut cur, &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Partition {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s.split(',').map(|p| p.trim().parse()).collect::<Result<Vec<u32>, _>>()?;
        Ok(Partition::new(parts))
    }
}
