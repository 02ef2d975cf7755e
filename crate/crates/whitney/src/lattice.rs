//! Integer-span membership and canonical residues via column Hermite
//! normal form, with exact solution recovery for certification.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Column-style Hermite form of an integer matrix, together with the
/// unimodular transform that produced it (`h = a * u`, columnwise).
pub struct Hnf {
    /// Columns of the reduced matrix; pivot rows strictly increase across
    /// the leading columns, and every pivot column is zero above its pivot.
    pub h: Vec<Vec<BigInt>>,
    /// Columns of the transform applied to the identity.
    pub u: Vec<Vec<BigInt>>,
    /// (row, column) of each pivot, in increasing row order.
    pub pivots: Vec<(usize, usize)>,
}

pub fn hermite_normal_form(columns: &[Vec<BigInt>]) -> Hnf {
    let n = columns.len();
    let m = columns.first().map_or(0, |c| c.len());
    let mut h: Vec<Vec<BigInt>> = columns.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut col = vec![BigInt::zero(); n];
            col[j] = BigInt::from(1);
            col
        })
        .collect();
    let mut pivots = Vec::new();
    let mut pivot_col = 0usize;
    for row in 0..m {
        if pivot_col == n {
            break;
        }
        loop {
            let mut nonzero: Vec<usize> = (pivot_col..n).filter(|&c| !h[c][row].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            // bring the minimal-magnitude entry to the pivot column
            nonzero.sort_by_key(|&c| h[c][row].abs());
            let c = nonzero[0];
            h.swap(pivot_col, c);
            u.swap(pivot_col, c);
            if nonzero.len() == 1 {
                break;
            }
            let pivot_val = h[pivot_col][row].clone();
            for c in pivot_col + 1..n {
                if h[c][row].is_zero() {
                    continue;
                }
                let q = div_round(&h[c][row], &pivot_val);
                if q.is_zero() {
                    continue;
                }
                for r in 0..m {
                    let delta = &q * &h[pivot_col][r];
                    h[c][r] -= delta;
                }
                for r in 0..n {
                    let delta = &q * &u[pivot_col][r];
                    u[c][r] -= delta;
                }
            }
        }
        if !h[pivot_col][row].is_zero() {
            if h[pivot_col][row].is_negative() {
                for x in h[pivot_col].iter_mut() {
                    *x = -&*x;
                }
                for x in u[pivot_col].iter_mut() {
                    *x = -&*x;
                }
            }
            pivots.push((row, pivot_col));
            pivot_col += 1;
        }
    }
    Hnf { h, u, pivots }
}

// rounded division keeps remainders small during elimination
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if &r.abs() * 2 > b.abs() {
        if r.is_negative() == b.is_negative() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Outcome of reducing a target vector modulo the column lattice.
pub struct LatticeReduction {
    /// Canonical residue: at each pivot row the entry lies in `[0, pivot)`.
    pub residue: Vec<BigInt>,
    /// True iff the target lies in the integer column span.
    pub member: bool,
    /// When `member`, integer coefficients on the original columns with
    /// `sum(x[j] * col_j) == target`.
    pub combination: Option<Vec<BigInt>>,
}

pub fn reduce_mod_lattice(target: &[BigInt], columns: &[Vec<BigInt>]) -> LatticeReduction {
    let m = target.len();
    if columns.is_empty() {
        return LatticeReduction {
            residue: target.to_vec(),
            member: target.iter().all(|x| x.is_zero()),
            combination: if target.iter().all(|x| x.is_zero()) {
                Some(vec![])
            } else {
                None
            },
        };
    }
    let hnf = hermite_normal_form(columns);
    let mut b = target.to_vec();
    let mut y = vec![BigInt::zero(); columns.len()];
    for &(row, col) in &hnf.pivots {
        let pivot = &hnf.h[col][row];
        let q = b[row].div_floor(pivot);
        if !q.is_zero() {
            for r in 0..m {
                let delta = &q * &hnf.h[col][r];
                b[r] -= delta;
            }
        }
        y[col] = q;
    }
    let member = b.iter().all(|x| x.is_zero());
    let combination = if member {
        // x = u * y
        let mut x = vec![BigInt::zero(); columns.len()];
        for (col, coeff) in y.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for r in 0..columns.len() {
                let delta = coeff * &hnf.u[col][r];
                x[r] += delta;
            }
        }
        debug_assert!({
            let mut check = vec![BigInt::zero(); m];
            for (j, cval) in x.iter().enumerate() {
                for r in 0..m {
                    let delta = cval * &columns[j][r];
                    check[r] += delta;
                }
            }
            check.iter().zip(target).all(|(a, b)| a == b)
        });
        Some(x)
    } else {
        None
    };
    LatticeReduction { residue: b, member, combination }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn zero_target_is_member() {
        let red = reduce_mod_lattice(&big(&[0, 0]), &[big(&[2, 1])]);
        assert!(red.member);
        let red = reduce_mod_lattice(&big(&[0, 0]), &[]);
        assert!(red.member);
    }

    #[test]
    fn generator_is_member() {
        let cols = vec![big(&[2, 1, 0]), big(&[0, 3, 1])];
        let red = reduce_mod_lattice(&big(&[2, 1, 0]), &cols);
        assert!(red.member);
        let x = red.combination.unwrap();
        assert_eq!(x, big(&[1, 0]));
    }

    #[test]
    fn combination_recovered() {
        let cols = vec![big(&[2, 1, 0]), big(&[0, 3, 1]), big(&[1, 1, 1])];
        // 3*c0 - 2*c1 + 5*c2
        let target = big(&[3 * 2 + 5, 3 - 6 + 5, -2 + 5]);
        let red = reduce_mod_lattice(&target, &cols);
        assert!(red.member);
        let x = red.combination.unwrap();
        let mut check = vec![BigInt::zero(); 3];
        for (j, xv) in x.iter().enumerate() {
            for r in 0..3 {
                let d = xv * &cols[j][r];
                check[r] += d;
            }
        }
        assert_eq!(check, target);
    }

    #[test]
    fn non_member_has_canonical_residue() {
        let cols = vec![big(&[2, 0]), big(&[0, 2])];
        let red = reduce_mod_lattice(&big(&[3, 5]), &cols);
        assert!(!red.member);
        assert_eq!(red.residue, big(&[1, 1]));
        // residue is constant on cosets
        let red2 = reduce_mod_lattice(&big(&[5, -3]), &cols);
        assert_eq!(red2.residue, big(&[1, 1]));
    }

    #[test]
    fn residue_zero_iff_member() {
        let cols = vec![big(&[6, 4]), big(&[4, 4])];
        // lattice contains (2,0) = c0 - c1 ... and (0,4); index 8
        let red = reduce_mod_lattice(&big(&[2, 0]), &cols);
        assert!(red.member);
        let red = reduce_mod_lattice(&big(&[1, 0]), &cols);
        assert!(!red.member);
    }
}
