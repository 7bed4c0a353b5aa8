//! Hermite and Smith normal forms, integer kernels and integer system solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// Result of [`hnf`]: `transform * input = form`.
#[derive(Clone, Debug)]
pub struct Hermite {
    pub form: IntMatrix,
    pub transform: IntMatrix,
    /// Pivot column of each nonzero row, in row order.
    pub pivots: Vec<usize>,
}

impl Hermite {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Result of [`snf`]: `left * input * right = diag`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: IntMatrix,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl Smith {
    /// Diagonal entries `d_1 | d_2 | ...`, `min(rows, cols)` of them.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.diag.rows().min(self.diag.cols()))
            .map(|i| self.diag[(i, i)].clone())
            .collect()
    }
}

/// Row-style Hermite normal form.
///
/// The result is in row echelon form with positive pivots, and every entry
/// above a pivot lies in `[0, pivot)`.
pub fn hnf(a: &IntMatrix) -> Hermite {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let pick = (r..m)
                .filter(|&i| !h[(i, c)].is_zero())
                .min_by(|&x, &y| h[(x, c)].abs().cmp(&h[(y, c)].abs()).then(x.cmp(&y)));
            let Some(p) = pick else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = h[(i, c)].div_floor(&h[(r, c)]);
                let neg_q = -q;
                h.add_row_multiple(i, r, &neg_q);
                u.add_row_multiple(i, r, &neg_q);
                if !h[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                let neg_q = -q;
                h.add_row_multiple(i, r, &neg_q);
                u.add_row_multiple(i, r, &neg_q);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Hermite {
        form: h,
        transform: u,
        pivots,
    }
}

/// Smith normal form with unimodular transforms.
///
/// Pivot choice: smallest nonzero absolute value in the remaining block,
/// ties broken by lowest row, then lowest column.
pub fn snf(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for k in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in k..m {
                for j in k..n {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => d[(i, j)].abs() < d[(bi, bj)].abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(d, u, v);
            };
            d.swap_rows(k, pi);
            u.swap_rows(k, pi);
            d.swap_cols(k, pj);
            v.swap_cols(k, pj);

            let mut clean = true;
            for i in k + 1..m {
                if d[(i, k)].is_zero() {
                    continue;
                }
                let q = -d[(i, k)].div_floor(&d[(k, k)]);
                d.add_row_multiple(i, k, &q);
                u.add_row_multiple(i, k, &q);
                clean &= d[(i, k)].is_zero();
            }
            for j in k + 1..n {
                if d[(k, j)].is_zero() {
                    continue;
                }
                let q = -d[(k, j)].div_floor(&d[(k, k)]);
                d.add_col_multiple(j, k, &q);
                v.add_col_multiple(j, k, &q);
                clean &= d[(k, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (k + 1..m).find(|&i| {
                (k + 1..n).any(|j| !d[(i, j)].is_multiple_of(&d[(k, k)]))
            });
            match offender {
                Some(i) => {
                    let one = BigInt::from(1);
                    d.add_row_multiple(k, i, &one);
                    u.add_row_multiple(k, i, &one);
                }
                None => break,
            }
        }
        if d[(k, k)].is_negative() {
            d.negate_row(k);
            u.negate_row(k);
        }
    }
    finish(d, u, v)
}

fn finish(diag: IntMatrix, left: IntMatrix, right: IntMatrix) -> Smith {
    Smith { diag, left, right }
}

/// Z-basis of `{x : a * x = 0}`, returned as columns of an `a.cols() x k` matrix.
/// The lattice is saturated in `Z^cols`.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let h = hnf(&a.transpose());
    let rank = h.rank();
    let n = a.cols();
    let rows: Vec<usize> = (rank..n).collect();
    h.transform.select_rows(&rows).transpose()
}

/// Z-basis (as columns) of the lattice spanned by the columns of `gens`.
pub fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let h = hnf(&gens.transpose());
    let rows: Vec<usize> = (0..h.rank()).collect();
    h.form.select_rows(&rows).transpose()
}

/// Solves `a * x = b` over the integers by HNF back-substitution.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "right-hand side has wrong length");
    let h = hnf(&a.transpose());
    // a * transform^T = form^T, so b = form^T y and x = transform^T y.
    let mut residual = b.to_vec();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (s, &p) in h.pivots.iter().enumerate() {
        let pivot = &h.form[(s, p)];
        let (q, rem) = residual[p].div_rem(pivot);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (j, r) in residual.iter_mut().enumerate() {
                let e = &h.form[(s, j)];
                if !e.is_zero() {
                    *r -= &q * e;
                }
            }
        }
        y[s] = q;
    }
    if residual.iter().any(|r| !r.is_zero()) {
        return None;
    }
    Some(h.transform.transpose().mul_vec(&y))
}

/// Whether `b` lies in the column lattice of `a`.
pub fn in_lattice(a: &IntMatrix, b: &[BigInt]) -> bool {
    if b.iter().all(Zero::is_zero) {
        return true;
    }
    if a.cols() == 0 {
        return false;
    }
    solve_integer(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn is_hermite(h: &Hermite) -> bool {
        let f = &h.form;
        for (s, &p) in h.pivots.iter().enumerate() {
            if !f[(s, p)].is_positive() {
                return false;
            }
            if (0..p).any(|j| !f[(s, j)].is_zero()) {
                return false;
            }
            for above in 0..s {
                let e = &f[(above, p)];
                if e.is_negative() || e >= &f[(s, p)] {
                    return false;
                }
            }
        }
        (h.rank()..f.rows()).all(|i| f.row(i).iter().all(Zero::is_zero))
    }

    #[test]
    fn hnf_identity_and_zero() {
        let id = IntMatrix::identity(3);
        let h = hnf(&id);
        assert!(h.form.is_identity());
        assert!(h.transform.is_identity());

        let z = IntMatrix::zeros(2, 2);
        let h = hnf(&z);
        assert!(h.form.is_zero());
        assert!(h.transform.is_identity());
    }

    #[test]
    fn hnf_gcd_column() {
        let a = m(&[vec![4], vec![6]]);
        let h = hnf(&a);
        assert_eq!(h.form, m(&[vec![2], vec![0]]));
        assert_eq!(h.transform.mul(&a), h.form);
        assert!(h.transform.det().abs().is_one());
        assert!(is_hermite(&h));
    }

    #[test]
    fn snf_examples() {
        let s = snf(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
        let a = m(&[vec![2, 4], vec![6, 8]]);
        let s = snf(&a);
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(s.left.mul(&a).mul(&s.right), s.diag);

        let z = IntMatrix::zeros(2, 3);
        let s = snf(&z);
        assert!(s.diag.is_zero());
        assert!(s.left.is_identity() && s.right.is_identity());
    }

    #[test]
    fn kernel_of_sum_map() {
        let k = integer_kernel(&m(&[vec![1, 1]]));
        assert_eq!(k.cols(), 1);
        let v = k.col(0);
        assert_eq!(v[0], -v[1].clone());
        assert!(v[0].abs().is_one());
    }

    #[test]
    fn solve_and_membership() {
        let a = m(&[vec![2, 0], vec![0, 3]]);
        let b = vec![BigInt::from(4), BigInt::from(9)];
        let x = solve_integer(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        assert!(!in_lattice(&a, &[BigInt::from(1), BigInt::from(0)]));
        assert!(in_lattice(&IntMatrix::zeros(2, 0), &[BigInt::zero(), BigInt::zero()]));
    }
}
