use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Signature of a symmetric integer matrix, by congruence diagonalization
/// over the rationals.
pub fn signature(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| BigRational::from_integer(BigInt::from(*x)))
                .collect()
        })
        .collect();
    let mut pos = 0i64;
    let mut neg = 0i64;
    let mut active: Vec<usize> = (0..n).collect();

    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                // All remaining diagonal entries vanish; find an off-diagonal
                // entry and replace e_i by e_i + e_j, which makes a[i][i] = 2 a[i][j].
                let hit = active.iter().copied().find_map(|i| {
                    active
                        .iter()
                        .copied()
                        .find(|&j| j != i && !a[i][j].is_zero())
                        .map(|j| (i, j))
                });
                let Some((i, j)) = hit else { break };
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                i
            }
        };
        let d = a[p][p].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for &i in &active {
            if i == p || a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for k in 0..n {
                let v = &f * &a[p][k];
                a[i][k] -= v;
            }
            for k in 0..n {
                let v = &f * &a[k][p];
                a[k][i] -= v;
            }
        }
        active.retain(|&i| i != p);
    }
    pos - neg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_forms() {
        assert_eq!(signature(&[vec![-3]]), -1);
        assert_eq!(signature(&[vec![0]]), 0);
        assert_eq!(signature(&[vec![0, 1], vec![1, 0]]), 0);
        assert_eq!(signature(&[vec![2, 1], vec![1, 2]]), 2);
        assert_eq!(signature(&[]), 0);
        assert_eq!(signature(&[vec![-3, 0], vec![0, 0]]), -1);
    }
}
