//! Exact rational scalars and dense linear algebra over ℚ.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q`, `p` or a signed variant of either.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(t.parse().ok()?)),
    }
}

/// `p/q` with an explicit denominator, the form used in the JSON encodings.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &Rational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Reduces a rational into `[0, 1)`.
pub fn mod_one(q: &Rational) -> Rational {
    q - q.floor()
}

pub type Matrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let inner = b.len();
    let m = if inner == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m);
    for i in 0..n {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    let (r, c) = (a.len(), a[0].len());
    let mut out = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            out[j][i] = a[i][j].clone();
        }
    }
    out
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of the right kernel `{x : m x = 0}`.
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -w[row][f].clone();
            }
            v
        })
        .collect()
}

/// Solves `a x = b` for a (possibly non-square) system; `None` when inconsistent.
/// Free variables are set to zero.
pub fn solve(a: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = aug[row][cols].clone();
    }
    Some(x)
}

pub fn determinant(a: &Matrix) -> Rational {
    let n = a.len();
    let mut w = a.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !w[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            w.swap(p, c);
            det = -det;
        }
        det *= &w[c][c];
        let inv = w[c][c].recip();
        for i in c + 1..n {
            if w[i][c].is_zero() {
                continue;
            }
            let f = &w[i][c] * &inv;
            for j in c..n {
                let d = &f * &w[c][j];
                w[i][j] -= d;
            }
        }
    }
    det
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ker = nullspace(&a, 3);
        assert_eq!(ker.len(), 2);
        for v in ker {
            let s: Rational = v.iter().zip([1, 2, 3]).map(|(x, c)| x * rat(c)).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[0, 1, 0], &[-1, 0, 0], &[0, 0, 2]]);
        assert_eq!(determinant(&a), rat(2));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
        assert!(inverse(&m(&[&[1, 1], &[1, 1]])).is_none());
    }

    #[test]
    fn inconsistent_system() {
        let a = m(&[&[1, 1], &[1, 1]]);
        assert!(solve(&a, &[rat(1), rat(2)]).is_none());
        assert_eq!(solve(&a, &[rat(2), rat(2)]).unwrap(), vec![rat(2), rat(0)]);
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("-3/6").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational("+7").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_none());
        assert_eq!(format_rational(&rat(3)), "3/1");
        assert_eq!(mod_one(&frac(-1, 4)), frac(3, 4));
    }
}
