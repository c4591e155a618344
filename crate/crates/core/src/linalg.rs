//! Dense solve for the small fixed-size systems of the implicit step.

use crate::scalar::Real;

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
///
/// Returns `None` if a pivot is exactly zero or non-finite.
pub fn solve<T: Real, const N: usize>(mut a: [[T; N]; N], mut b: [T; N]) -> Option<[T; N]> {
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if !(a[pivot][col].abs() > T::zero()) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            if factor == T::zero() {
                continue;
            }
            for k in col..N {
                let v = a[col][k];
                a[row][k] = a[row][k] - factor * v;
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = [T::zero(); N];
    for row in (0..N).rev() {
        let tail = (row + 1..N).fold(T::zero(), |acc, k| acc + a[row][k] * x[k]);
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// ‖a·x − b‖∞ / max(‖a‖∞‖x‖∞, ‖b‖∞).
pub fn relative_residual<T: Real, const N: usize>(a: &[[T; N]; N], x: &[T; N], b: &[T; N]) -> T {
    let mut worst = T::zero();
    let mut row_norm = T::zero();
    for (row, rhs) in a.iter().zip(b) {
        let ax = row.iter().zip(x).fold(T::zero(), |acc, (&r, &v)| acc + r * v);
        worst = worst.max((ax - *rhs).abs());
        row_norm = row_norm.max(row.iter().fold(T::zero(), |acc, r| acc + r.abs()));
    }
    let scale = (row_norm * crate::scalar::sup_norm(x)).max(crate::scalar::sup_norm(b));
    if scale > T::zero() {
        worst / scale
    } else {
        worst
    }
}
