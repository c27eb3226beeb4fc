//! Arithmetic modulo word-sized primes, used by the fixed-point pushforward engine.

/// The Mersenne prime 2^61 - 1.
pub const P61: u64 = (1u64 << 61) - 1;
/// 2^62 - 57, prime.
pub const P62: u64 = (1u64 << 62) - 57;
/// 2^63 - 25, prime.
pub const P63: u64 = (1u64 << 63) - 25;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    if p == P61 {
        let z = (a as u128) * (b as u128);
        let lo = (z as u64) & P61;
        let hi = (z >> 61) as u64;
        let mut s = lo + hi;
        while s >= P61 {
            s -= P61;
        }
        s
    } else {
        ((a as u128 * b as u128) % p as u128) as u64
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    if s >= p as u128 {
        (s - p as u128) as u64
    } else {
        s as u64
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

#[inline]
pub fn neg_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue (Fermat).
pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "inverse of zero mod {p}");
    pow_mod(a, p - 2, p)
}

/// Residue of a signed integer.
pub fn from_i64(x: i64, p: u64) -> u64 {
    let r = (x as i128).rem_euclid(p as i128);
    r as u64
}

/// Symmetric lift of a residue to `(-p/2, p/2]`.
pub fn to_symmetric(x: u64, p: u64) -> i128 {
    if x > p / 2 {
        x as i128 - p as i128
    } else {
        x as i128
    }
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = {
            let (mut r, mut b, mut e) = (1u64, a % n, d);
            while e > 0 {
                if e & 1 == 1 {
                    r = mulm(r, b);
                }
                b = mulm(b, b);
                e >>= 1;
            }
            r
        };
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Determinant of a square matrix modulo `p` by Gaussian elimination.
pub fn det_mod(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            m.swap(piv, col);
            det = neg_mod(det, p);
        }
        det = mul_mod(det, m[col][col], p);
        let inv = inv_mod(m[col][col], p);
        for r in col + 1..n {
            if m[r][col] == 0 {
                continue;
            }
            let f = mul_mod(m[r][col], inv, p);
            for c in col..n {
                let t = mul_mod(f, m[col][c], p);
                m[r][c] = sub_mod(m[r][c], t, p);
            }
        }
    }
    det
}

/// Solves `a x = b` modulo `p`; `None` when `a` is singular.
pub fn solve_mod(mut a: Vec<Vec<u64>>, mut b: Vec<u64>, p: u64) -> Option<Vec<u64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(piv, col);
        b.swap(piv, col);
        let inv = inv_mod(a[col][col], p);
        for c in col..n {
            a[col][c] = mul_mod(a[col][c], inv, p);
        }
        b[col] = mul_mod(b[col], inv, p);
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let f = a[r][col];
            for c in col..n {
                let t = mul_mod(f, a[col][c], p);
                a[r][c] = sub_mod(a[r][c], t, p);
            }
            let t = mul_mod(f, b[col], p);
            b[r] = sub_mod(b[r], t, p);
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_prime() {
        assert!(is_prime(P61));
        assert!(is_prime(P62));
        assert!(is_prime(P63));
        assert!(!is_prime(P61 - 2));
        assert!(!is_prime(561));
    }

    #[test]
    fn mersenne_reduction_matches_generic() {
        let xs = [0u64, 1, 2, P61 - 1, P61 / 3, 123456789123456789 % P61];
        for &a in &xs {
            for &b in &xs {
                assert_eq!(mul_mod(a, b, P61), ((a as u128 * b as u128) % P61 as u128) as u64);
            }
        }
    }

    #[test]
    fn inverse_and_solve() {
        let p = P62;
        let a = 987654321u64;
        assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
        let m = vec![vec![2, 1], vec![1, 3]];
        let x = solve_mod(m.clone(), vec![3, 5], p).unwrap();
        // 2x+y=3, x+3y=5 -> x = 4/5, y = 7/5
        let five_inv = inv_mod(5, p);
        assert_eq!(x, vec![mul_mod(4, five_inv, p), mul_mod(7, five_inv, p)]);
        assert_eq!(det_mod(m, p), 5);
    }
}
