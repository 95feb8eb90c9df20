//! Small dense integer matrices: Smith-type diagonalization with unimodular
//! transforms, and lattice membership tests built on it.

use num::{Integer, Zero};

use crate::exact::Rational;

pub type IntMatrix = Vec<Vec<i64>>;

pub fn int_identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn int_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter().map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()).collect()
}

/// `U M V = D` with `U`, `V` unimodular and `D` diagonal (possibly rectangular).
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<i64> {
        let r = self.d.len().min(self.d.first().map_or(0, Vec::len));
        (0..r).map(|i| self.d[i][i]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| **x != 0).count()
    }
}

fn swap_rows(m: &mut IntMatrix, a: usize, b: usize) {
    m.swap(a, b);
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// row_i -= q row_j
fn sub_row(m: &mut IntMatrix, i: usize, j: usize, q: i64) {
    let rj = m[j].clone();
    for (x, y) in m[i].iter_mut().zip(rj) {
        *x -= q * y;
    }
}

/// col_i -= q col_j
fn sub_col(m: &mut IntMatrix, i: usize, j: usize, q: i64) {
    for row in m.iter_mut() {
        row[i] -= q * row[j];
    }
}

pub fn smith(m: &IntMatrix) -> SmithForm {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut d = m.clone();
    let mut u = int_identity(rows);
    let mut v = int_identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if d[i][j] != 0 && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return SmithForm { u, d, v };
            };
            swap_rows(&mut d, t, pi);
            swap_rows(&mut u, t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut v, t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                let q = Integer::div_floor(&d[i][t], &d[t][t]);
                if q != 0 {
                    sub_row(&mut d, i, t, q);
                    sub_row(&mut u, i, t, q);
                }
                clean &= d[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = Integer::div_floor(&d[t][j], &d[t][t]);
                if q != 0 {
                    sub_col(&mut d, j, t, q);
                    sub_col(&mut v, j, t, q);
                }
                clean &= d[t][j] == 0;
            }
            if clean {
                break;
            }
        }
    }
    SmithForm { u, d, v }
}

pub fn apply_int(m: &IntMatrix, x: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| Rational::from_integer((*a).into()) * b).sum()).collect()
}

/// Whether `x ∈ span_ℝ(columns) + ℤⁿ` for an `n × d` integer matrix given by columns.
pub fn in_span_plus_lattice(columns: &[Vec<i64>], n: usize, x: &[Rational]) -> bool {
    if columns.is_empty() {
        return x.iter().all(|c| c.is_integer());
    }
    let m: IntMatrix = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let s = smith(&m);
    let r = s.rank();
    let y = apply_int(&s.u, x);
    y[r..].iter().all(|c| c.is_integer())
}

/// Rank of an integer matrix given by columns.
pub fn column_rank(columns: &[Vec<i64>], n: usize) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let m: IntMatrix = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    smith(&m).rank()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    #[test]
    fn diagonalizes_with_unimodular_transforms() {
        let m: IntMatrix = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(&m);
        assert_eq!(int_mul(&int_mul(&s.u, &m), &s.v), s.d);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(s.d[i][j], 0);
                }
            }
        }
        let prod: i64 = s.diagonal().iter().product();
        assert_eq!(prod.abs(), 144);
    }

    #[test]
    fn span_membership() {
        let cols = vec![vec![1, 1, 0]];
        assert!(in_span_plus_lattice(&cols, 3, &[frac(1, 3), frac(1, 3), frac(0, 1)]));
        assert!(!in_span_plus_lattice(&cols, 3, &[frac(1, 3), frac(0, 1), frac(0, 1)]));
        assert!(in_span_plus_lattice(&[], 2, &[frac(2, 1), frac(-1, 1)]));
    }
}
