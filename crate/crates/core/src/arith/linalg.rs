//! Exact Gaussian elimination over `Q`.

use num_traits::{One, Zero};

use super::Rational;

pub type Matrix = Vec<Vec<Rational>>;

#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution {
    Unique(Vec<Rational>),
    Inconsistent,
    /// The system is consistent but has free variables.
    Underdetermined,
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Solves `a x = b` for possibly overdetermined `a`.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> LinearSolution {
    assert_eq!(a.len(), b.len());
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return LinearSolution::Inconsistent;
    }
    if pivots.len() < cols {
        return LinearSolution::Underdetermined;
    }
    LinearSolution::Unique(aug.iter().take(cols).map(|row| row[cols].clone()).collect())
}

/// Basis of `{x : a x = 0}` with `cols` unknowns.
pub fn nullspace(a: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut m: Matrix = a.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fcol| {
            let mut v = vec![Rational::zero(); cols];
            v[fcol] = Rational::one();
            for (row, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -m[row][fcol].clone();
            }
            v
        })
        .collect()
}

pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m: Matrix = a.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        det *= &m[col][col];
        let pivot_row = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= &factor * p;
            }
        }
    }
    det
}

pub fn inverse(a: &[Vec<Rational>]) -> Option<Matrix> {
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
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect()
    }

    #[test]
    fn solve_cases() {
        let a = m(&[&[1, 1], &[1, -1], &[2, 0]]);
        let b = vec![rat_int(3), rat_int(1), rat_int(4)];
        assert_eq!(solve(&a, &b), LinearSolution::Unique(vec![rat_int(2), rat_int(1)]));
        let b = vec![rat_int(3), rat_int(1), rat_int(5)];
        assert_eq!(solve(&a, &b), LinearSolution::Inconsistent);
        let a = m(&[&[1, 1]]);
        assert_eq!(solve(&a, &[rat_int(1)]), LinearSolution::Underdetermined);
    }

    #[test]
    fn nullspace_and_inverse() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let dot: Rational = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
        let a = m(&[&[2, 1], &[7, 4]]);
        assert_eq!(determinant(&a), rat_int(1));
        assert_eq!(inverse(&a).unwrap(), m(&[&[4, -1], &[-7, 2]]));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        assert!(determinant(&m(&[&[1, 2], &[2, 4]])).is_zero());
    }
}
