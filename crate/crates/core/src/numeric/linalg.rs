use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{Matrix, NumericError, RatMatrix, Rational, Scalar};

/// Reduced row-echelon form and pivot columns.
pub fn rref<T: Scalar>(m: &Matrix<T>) -> (Matrix<T>, Vec<usize>) {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.to_rows();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = if T::EXACT {
            (r..rows).find(|&i| !a[i][c].is_negligible())
        } else {
            (r..rows)
                .filter(|&i| !a[i][c].is_negligible())
                .max_by(|&i, &j| a[i][c].magnitude().total_cmp(&a[j][c].magnitude()))
        };
        let Some(p) = p else {
            continue;
        };
        a.swap(r, p);
        let inv = T::one() / a[r][c].clone();
        for j in c..cols {
            if !a[r][j].is_zero() {
                a[r][j] = a[r][j].clone() * inv.clone();
            }
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..cols {
                if !pivot_row[j].is_zero() {
                    row[j] = row[j].clone() - f.clone() * pivot_row[j].clone();
                }
            }
            row[c] = T::zero();
        }
        pivots.push(c);
        r += 1;
    }
    if !T::EXACT {
        for row in a.iter_mut() {
            for x in row.iter_mut() {
                if x.is_negligible() {
                    *x = T::zero();
                }
            }
        }
    }
    let out = Matrix::from_rows(a, cols).expect("rows keep their length");
    (out, pivots)
}

pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    if T::EXACT {
        rank_fraction_free(m)
    } else {
        rref(m).1.len()
    }
}

/// Rank by division-free elimination. Suited to exact types whose inverse is expensive.
pub fn rank_fraction_free<T: Scalar>(m: &Matrix<T>) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.to_rows();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_negligible()) else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        let pivot_row = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            if row[c].is_negligible() {
                continue;
            }
            let f = row[c].clone();
            for j in c..cols {
                row[j] = piv.clone() * row[j].clone() - f.clone() * pivot_row[j].clone();
            }
        }
        r += 1;
    }
    r
}

fn lcm_of_denominators(row: &[Rational]) -> BigInt {
    row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

fn integer_rows(m: &RatMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let l = lcm_of_denominators(row);
            row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
        })
        .collect()
}

fn remove_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Exact reduced row-echelon form over Q.
///
/// Rows are scaled to integers and eliminated fraction-free with content
/// removal after every update; the rational form is recovered at the end.
pub fn rat_rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = integer_rows(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        remove_content(&mut a[r]);
        let pivot_row = a[r].clone();
        let piv = pivot_row[c].clone();
        let eliminate = |i: usize, row: &mut Vec<BigInt>| {
            if i == r || row[c].is_zero() {
                return;
            }
            let g = piv.gcd(&row[c]);
            let s = &piv / &g;
            let t = &row[c] / &g;
            for j in 0..cols {
                if j == c {
                    row[j] = BigInt::zero();
                } else if !pivot_row[j].is_zero() {
                    row[j] = &s * &row[j] - &t * &pivot_row[j];
                } else if !row[j].is_zero() {
                    row[j] = &s * &row[j];
                }
            }
            remove_content(row);
        };
        if rows * cols > 4096 {
            a.par_iter_mut().enumerate().for_each(|(i, row)| eliminate(i, row));
        } else {
            a.iter_mut().enumerate().for_each(|(i, row)| eliminate(i, row));
        }
        pivots.push(c);
        r += 1;
    }
    let out = Matrix::from_fn(rows, cols, |i, j| {
        if i < pivots.len() {
            Rational::new(a[i][j].clone(), a[i][pivots[i]].clone())
        } else {
            Rational::zero()
        }
    });
    (out, pivots)
}

/// Rank over Q by Bareiss elimination on the denominator-cleared integer matrix.
pub fn rat_rank(m: &RatMatrix) -> usize {
    bareiss(integer_rows(m), m.cols()).0
}

/// Determinant of a square rational matrix.
pub fn rat_det(m: &RatMatrix) -> Result<Rational, NumericError> {
    if m.rows() != m.cols() {
        return Err(NumericError::DimensionMismatch(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 0 {
        return Ok(Rational::one());
    }
    let scale = (0..m.rows()).fold(BigInt::one(), |acc, i| acc * lcm_of_denominators(m.row(i)));
    let (rank, det) = bareiss(integer_rows(m), m.cols());
    if rank < m.rows() {
        return Ok(Rational::zero());
    }
    Ok(Rational::new(det, scale))
}

/// Returns (rank, signed last pivot). The second value is the determinant when the
/// matrix is square and nonsingular.
fn bareiss(mut a: Vec<Vec<BigInt>>, cols: usize) -> (usize, BigInt) {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(r, p);
            sign = -sign;
        }
        let pivot_row = a[r].clone();
        let piv = pivot_row[c].clone();
        let prev_ref = &prev;
        let update = |row: &mut Vec<BigInt>| {
            let f = row[c].clone();
            for j in (c + 1)..cols {
                row[j] = (&piv * &row[j] - &f * &pivot_row[j]) / prev_ref;
            }
            row[c] = BigInt::zero();
        };
        if rows * cols > 4096 {
            a[r + 1..].par_iter_mut().for_each(update);
        } else {
            a[r + 1..].iter_mut().for_each(update);
        }
        prev = piv;
        r += 1;
    }
    (r, sign * prev)
}

fn nullspace_from_rref<T: Scalar>(r: &Matrix<T>, pivots: &[usize]) -> Vec<Vec<T>> {
    let cols = r.cols();
    let mut is_pivot = vec![None; cols];
    for (i, &p) in pivots.iter().enumerate() {
        is_pivot[p] = Some(i);
    }
    (0..cols)
        .filter(|&j| is_pivot[j].is_none())
        .map(|j| {
            let mut v = vec![T::zero(); cols];
            v[j] = T::one();
            for (i, &p) in pivots.iter().enumerate() {
                let x = r.get(i, j);
                if !x.is_zero() {
                    v[p] = -x.clone();
                }
            }
            v
        })
        .collect()
}

/// Standard RREF-parametrised nullspace basis: one vector per free column.
pub fn nullspace<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let (r, pivots) = rref(m);
    nullspace_from_rref(&r, &pivots)
}

pub fn rat_nullspace(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let (r, pivots) = rat_rref(m);
    nullspace_from_rref(&r, &pivots)
}

/// One solution of `m x = b` (free variables set to zero), or `None` if inconsistent.
pub fn solve<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Result<Option<Vec<T>>, NumericError> {
    if b.len() != m.rows() {
        return Err(NumericError::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows()
        )));
    }
    let cols = m.cols();
    let aug = Matrix::from_fn(m.rows(), cols + 1, |i, j| {
        if j < cols {
            m.get(i, j).clone()
        } else {
            b[i].clone()
        }
    });
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&cols) {
        return Ok(None);
    }
    let mut x = vec![T::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r.get(i, cols).clone();
    }
    Ok(Some(x))
}

pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>, NumericError> {
    let n = m.rows();
    if n != m.cols() {
        return Err(NumericError::DimensionMismatch(format!("inverse of a {}x{} matrix", n, m.cols())));
    }
    let aug = m.hstack(&Matrix::identity(n))?;
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(NumericError::Singular);
    }
    Ok(Matrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
}

#[cfg(test)]
mod tests {
    use super::super::{rat, ratio, Matrix, RatMatrix};
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> RatMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(rat).collect()).collect(), cols)
            .unwrap()
    }

    #[test]
    fn rref_identity() {
        let id = RatMatrix::identity(3);
        assert_eq!(rat_rref(&id), (id.clone(), vec![0, 1, 2]));
    }

    #[test]
    fn rref_rank_one() {
        let (r, p) = rat_rref(&m(vec![vec![1, 2], vec![2, 4]]));
        assert_eq!(r, m(vec![vec![1, 2], vec![0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn rref_zero() {
        let z = RatMatrix::zeros(2, 3);
        assert_eq!(rat_rref(&z), (z.clone(), vec![]));
    }

    #[test]
    fn rref_matches_generic() {
        let a = Matrix::from_fn(4, 5, |i, j| ratio((i * 7 + j * 3) as i64 % 5 - 2, (j + 1) as i64));
        assert_eq!(rat_rref(&a), rref(&a));
    }

    #[test]
    fn nullspace_examples() {
        assert!(rat_nullspace(&RatMatrix::identity(3)).is_empty());
        assert_eq!(rat_nullspace(&m(vec![vec![1, 1]])), vec![vec![rat(-1), rat(1)]]);
        assert_eq!(
            rat_nullspace(&RatMatrix::zeros(1, 2)),
            vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]
        );
    }

    #[test]
    fn determinant() {
        assert_eq!(rat_det(&m(vec![vec![2, 1], vec![1, 3]])).unwrap(), rat(5));
        assert_eq!(rat_det(&m(vec![vec![0, 1], vec![1, 0]])).unwrap(), rat(-1));
        assert_eq!(rat_det(&m(vec![vec![1, 2], vec![2, 4]])).unwrap(), rat(0));
        let h = Matrix::from_fn(3, 3, |i, j| ratio(1, (i + j + 1) as i64));
        assert_eq!(rat_det(&h).unwrap(), ratio(1, 2160));
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(vec![vec![2, 1], vec![1, 3]]);
        let x = solve(&a, &[rat(3), rat(4)]).unwrap().unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RatMatrix::identity(2));
        assert_eq!(inverse(&m(vec![vec![1, 2], vec![2, 4]])), Err(NumericError::Singular));
        assert_eq!(solve(&m(vec![vec![1, 1], vec![1, 1]]), &[rat(0), rat(1)]).unwrap(), None);
    }

    #[test]
    fn float_rank() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-12]], 2).unwrap();
        assert_eq!(rank(&a), 1);
    }
}
