//! Dense least squares by Householder QR, sized for forecast fits.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Relative size below which a diagonal entry of `R` counts as zero.
const RANK_TOL: f64 = 1e-12;

/// Minimizes `‖A x − b‖₂` for row-major `A` with `rows >= cols`.
pub(crate) fn least_squares(a: &[f64], b: &[f64], rows: usize, cols: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(b.len(), rows);
    if cols == 0 || rows < cols {
        return Err(Error::RankDeficient);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let at = |r: usize, c: usize| r * cols + c;

    let scale = (0..cols)
        .map(|c| libm::sqrt((0..rows).map(|r| a[at(r, c)] * a[at(r, c)]).sum::<f64>()))
        .fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::RankDeficient);
    }

    let mut v = alloc::vec![0.0; rows];
    for j in 0..cols {
        let norm = libm::sqrt((j..rows).map(|r| a[at(r, j)] * a[at(r, j)]).sum::<f64>());
        if norm <= RANK_TOL * scale {
            return Err(Error::RankDeficient);
        }
        let alpha = if a[at(j, j)] > 0.0 { -norm } else { norm };
        for r in j..rows {
            v[r] = a[at(r, j)];
        }
        v[j] -= alpha;
        let vv: f64 = (j..rows).map(|r| v[r] * v[r]).sum();
        for c in j..cols {
            let dot: f64 = (j..rows).map(|r| v[r] * a[at(r, c)]).sum();
            let f = 2.0 * dot / vv;
            for r in j..rows {
                a[at(r, c)] -= f * v[r];
            }
        }
        let dot: f64 = (j..rows).map(|r| v[r] * b[r]).sum();
        let f = 2.0 * dot / vv;
        for r in j..rows {
            b[r] -= f * v[r];
        }
    }

    let mut x = alloc::vec![0.0; cols];
    for j in (0..cols).rev() {
        let tail: f64 = (j + 1..cols).map(|c| a[at(j, c)] * x[c]).sum();
        x[j] = (b[j] - tail) / a[at(j, j)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_square_system() {
        // 2x + y = 5, x + 3y = 10 → x = 1, y = 3
        let x = least_squares(&[2.0, 1.0, 1.0, 3.0], &[5.0, 10.0], 2, 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn fits_overdetermined_line() {
        // y = 1 + 2t sampled exactly at t = 0..4
        let a: Vec<f64> = (0..5).flat_map(|t| [1.0, t as f64]).collect();
        let b: Vec<f64> = (0..5).map(|t| 1.0 + 2.0 * t as f64).collect();
        let x = least_squares(&a, &b, 5, 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn least_squares_of_noisy_constant_is_the_mean() {
        let a = [1.0; 4];
        let x = least_squares(&a, &[1.0, 2.0, 3.0, 6.0], 4, 1).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn detects_collinear_columns() {
        let a = [1.0, 2.0, 2.0, 4.0, 3.0, 6.0];
        assert_eq!(least_squares(&a, &[1.0, 2.0, 3.0], 3, 2), Err(Error::RankDeficient));
        assert_eq!(least_squares(&[0.0, 0.0], &[1.0, 1.0], 2, 1), Err(Error::RankDeficient));
    }
}
