//! Exact linear solves over the rationals.

use dashu_ratio::RBig;

/// Solution of `a·x = b` by Gauss–Jordan elimination, or `None` when the
/// system is inconsistent. When `a` is rank-deficient the free unknowns are
/// set to zero, which makes the returned solution canonical.
pub fn solve(mut a: Vec<Vec<RBig>>, mut b: Vec<RBig>) -> Option<Vec<RBig>> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = a.first().map_or(0, Vec::len);
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
        b.swap(r, p);
        let inv = RBig::ONE / &a[r][c];
        for v in a[r][c..].iter_mut() {
            *v = &*v * &inv;
        }
        b[r] = &b[r] * &inv;
        let (pivot_row, pivot_b) = (a[r].clone(), b[r].clone());
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for (v, pv) in a[i][c..].iter_mut().zip(&pivot_row[c..]) {
                if !pv.is_zero() {
                    *v = &*v - &f * pv;
                }
            }
            b[i] = &b[i] - &f * &pivot_b;
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![RBig::ZERO; cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(v: i64) -> RBig {
        RBig::from(v)
    }

    fn mat(v: &[&[i64]]) -> Vec<Vec<RBig>> {
        v.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    fn mul(a: &[Vec<RBig>], x: &[RBig]) -> Vec<RBig> {
        a.iter()
            .map(|r| r.iter().zip(x).fold(RBig::ZERO, |acc, (u, v)| acc + u * v))
            .collect()
    }

    #[test]
    fn small_systems() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let x = solve(a, vec![q(3), q(5)]).unwrap();
        assert_eq!(x, vec![RBig::from_parts(4.into(), 5u8.into()), RBig::from_parts(7.into(), 5u8.into())]);

        // Rank one, consistent: free unknown set to zero.
        let a = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(solve(a, vec![q(3), q(6)]).unwrap(), vec![q(3), q(0)]);

        let a = mat(&[&[1, 2], &[2, 4]]);
        assert!(solve(a, vec![q(3), q(7)]).is_none());

        let a = mat(&[&[0, 1], &[1, 0]]);
        assert_eq!(solve(a, vec![q(5), q(6)]).unwrap(), vec![q(6), q(5)]);
    }

    proptest! {
        #[test]
        fn solves_random_consistent_systems(
            entries in proptest::collection::vec(-9i64..10, 16),
            xs in proptest::collection::vec(-50i64..50, 4),
        ) {
            let a: Vec<Vec<RBig>> = entries.chunks(4).map(|r| r.iter().map(|&v| q(v)).collect()).collect();
            let x: Vec<RBig> = xs.iter().map(|&v| q(v)).collect();
            let b = mul(&a, &x);
            let sol = solve(a.clone(), b.clone()).expect("consistent by construction");
            prop_assert_eq!(mul(&a, &sol), b);
        }
    }
}
