//! Gauss–Jordan inversion of general complex matrices with partial pivoting.

use num_complex::Complex64 as C64;

use super::CMatrix;

/// Inverse of `m`, or `None` when a pivot vanishes.
pub fn invert(m: &CMatrix) -> Option<CMatrix> {
    let n = m.n;
    let mut a = m.data.clone();
    let mut inv = CMatrix::identity(n).data;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))?;
        if a[piv * n + col].norm() == 0.0 {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(piv * n + c, col * n + c);
                inv.swap(piv * n + c, col * n + c);
            }
        }
        let d = C64::new(1.0, 0.0) / a[col * n + col];
        for c in 0..n {
            a[col * n + c] *= d;
            inv[col * n + c] *= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for c in 0..n {
                let (ac, ic) = (a[col * n + c], inv[col * n + c]);
                a[r * n + c] -= f * ac;
                inv[r * n + c] -= f * ic;
            }
        }
    }
    Some(CMatrix { n, data: inv })
}
