//! Smith and Hermite normal forms over the integers.
//!
//! Everything here works on [`IntMatrix`] with `BigInt` entries, so no
//! intermediate value can overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// Result of a Smith decomposition `u * m * v = d`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Diagonal of `d`, length `min(rows, cols)`, non-negative, each entry
    /// dividing the next. Zeros come last.
    pub diagonal: Vec<BigInt>,
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|x| !x.is_zero()).count()
    }
}

fn min_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[(bi, bj)].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = min_nonzero(&a, t) else {
                break;
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -a[(i, t)].div_floor(&pivot);
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -a[(t, j)].div_floor(&pivot);
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }

            // Divisibility: pull any offending row into the pivot row and retry.
            let offending = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot))
            });
            match offending {
                Some(i) => {
                    let one = BigInt::from(1);
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }

    let diagonal = (0..rows.min(cols)).map(|t| a[(t, t)].clone()).collect();
    Smith { diagonal, d: a, u, v }
}

/// Invariant factors of the cokernel `Z^rows / im(m)`, with unit factors
/// dropped and free summands reported as `0`.
pub fn cokernel_factors(m: &IntMatrix) -> Vec<BigInt> {
    let smith = smith_normal_form(m);
    let mut out: Vec<BigInt> = smith
        .diagonal
        .iter()
        .filter(|d| **d != BigInt::from(1))
        .cloned()
        .collect();
    for _ in smith.diagonal.len()..m.rows() {
        out.push(BigInt::zero());
    }
    out
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `m`.
///
/// Pivots are positive and entries above a pivot lie in `[0, pivot)`. Zero
/// rows are dropped, so the output is a basis of the row lattice and is
/// uniquely determined by that lattice.
pub fn hermite_rows(m: &IntMatrix) -> IntMatrix {
    let mut a = m.clone();
    let rows = a.rows();
    let cols = a.cols();
    let mut pr = 0;
    let mut pivots = Vec::new();

    for col in 0..cols {
        if pr == rows {
            break;
        }
        loop {
            let best = (pr..rows)
                .filter(|&i| !a[(i, col)].is_zero())
                .min_by(|&x, &y| a[(x, col)].abs().cmp(&a[(y, col)].abs()));
            let Some(b) = best else { break };
            a.swap_rows(pr, b);
            let pivot = a[(pr, col)].clone();
            let mut done = true;
            for i in pr + 1..rows {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let q = -a[(i, col)].div_floor(&pivot);
                a.add_row_multiple(i, pr, &q);
                if !a[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[(pr, col)].is_zero() {
            continue;
        }
        if a[(pr, col)].is_negative() {
            a.negate_row(pr);
        }
        let pivot = a[(pr, col)].clone();
        for i in 0..pr {
            let q = -a[(i, col)].div_floor(&pivot);
            a.add_row_multiple(i, pr, &q);
        }
        pivots.push(col);
        pr += 1;
    }

    let kept: Vec<Vec<BigInt>> = (0..pr).map(|i| a.row(i).to_vec()).collect();
    IntMatrix::from_big_rows(kept, cols)
}

/// Integer kernel `{x : m x = 0}` as the rows of a Hermite-normal-form basis.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let cols = m.cols();
    let smith = smith_normal_form(m);
    let rank = smith.rank();
    let vt = smith.v.transpose();
    let rows: Vec<Vec<BigInt>> = (rank..cols).map(|j| vt.row(j).to_vec()).collect();
    hermite_rows(&IntMatrix::from_big_rows(rows, cols))
}
