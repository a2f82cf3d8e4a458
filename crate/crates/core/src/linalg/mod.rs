//! Dense linear algebra kernels used by the solvers.

pub mod bunch_kaufman;
pub mod lu;
pub mod symeig;
pub mod tridiag;

use num_complex::Complex64 as C64;

pub use bunch_kaufman::BunchKaufman;
pub use lu::invert;
pub use symeig::{symmetric_eigen, SymEigen};

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n).map(|i| dotu(self.row(i), x)).collect()
    }

    /// Adds `y += A x`.
    pub fn matvec_add(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += dotu(self.row(i), x);
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    /// Replaces the matrix by `(A + A^H)/2`.
    pub fn hermitize(&mut self) {
        let n = self.n;
        for i in 0..n {
            let d = self.data[i * n + i];
            self.data[i * n + i] = C64::new(d.re, 0.0);
            for j in i + 1..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i].conj());
                self.data[i * n + j] = v;
                self.data[j * n + i] = v.conj();
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest row ℓ¹ norm, an upper bound on the spectral norm of a Hermitian matrix.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// `Σ a_i b_i` without conjugation.
#[inline]
pub fn dotu(a: &[C64], b: &[C64]) -> C64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re - x.im * y.im;
        im += x.re * y.im + x.im * y.re;
    }
    C64::new(re, im)
}

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
#[inline]
pub fn dotc(a: &[C64], b: &[C64]) -> C64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    C64::new(re, im)
}

pub fn norm2(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha x`.
#[inline]
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [C64]) {
    x.iter_mut().for_each(|v| *v *= alpha);
}

/// Orthogonalizes `v` against `basis` twice (classical Gram–Schmidt with
/// reorthogonalization) and returns the remaining norm.
pub fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) -> f64 {
    for _ in 0..2 {
        for q in basis {
            let c = dotc(q, v);
            axpy(-c, q, v);
        }
    }
    norm2(v)
}

/// Rotates `v` so that its largest-modulus entry (first on ties) is real positive.
pub fn fix_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        let a = x.norm();
        if a > best_abs * (1.0 + 1e-9) {
            best = i;
            best_abs = a;
        }
    }
    if best_abs > 0.0 {
        let ph = v[best].conj() / best_abs;
        v.iter_mut().for_each(|x| *x *= ph);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_conventions() {
        let a = [C64::new(0.0, 1.0)];
        let b = [C64::new(0.0, 1.0)];
        assert_eq!(dotc(&a, &b), C64::new(1.0, 0.0));
        assert_eq!(dotu(&a, &b), C64::new(-1.0, 0.0));
    }

    #[test]
    fn phase_fix_makes_peak_real() {
        let mut v = vec![C64::new(0.1, 0.0), C64::new(0.0, -2.0)];
        fix_phase(&mut v);
        assert!((v[1] - C64::new(2.0, 0.0)).norm() < 1e-15);
    }
}
