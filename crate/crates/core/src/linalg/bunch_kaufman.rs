//! Hermitian indefinite factorization `PᵀAP = L D Lᴴ` with Bunch–Kaufman
//! partial pivoting (1×1 and 2×2 diagonal blocks).

use num_complex::Complex64 as C64;

use super::CMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Pivot {
    One(f64),
    /// `[[a, conj(b)], [b, c]]`
    Two { a: f64, b: C64, c: f64 },
}

#[derive(Clone, Debug)]
pub struct BunchKaufman {
    n: usize,
    /// Unit lower factor stored below the diagonal (row-major).
    l: Vec<C64>,
    /// Pivot blocks keyed by the starting row.
    pivots: Vec<(usize, Pivot)>,
    perm: Vec<usize>,
    negative: usize,
    zero: usize,
}

const ALPHA: f64 = 0.640_388_203_202_208_4; // (1 + √17)/8

impl BunchKaufman {
    /// Factors a Hermitian matrix; only the lower triangle is read.
    /// Pivots with modulus below `tiny` count as zero eigenvalues.
    pub fn factor(a: &CMatrix, tiny: f64) -> Self {
        let n = a.n;
        let mut w = a.data.clone();
        for i in 0..n {
            for j in i + 1..n {
                w[i * n + j] = w[j * n + i].conj();
            }
            w[i * n + i] = C64::new(w[i * n + i].re, 0.0);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut pivots = Vec::new();
        let mut negative = 0;
        let mut zero = 0;
        let idx = |i: usize, j: usize| i * n + j;

        let swap_sym = |w: &mut Vec<C64>, p: usize, q: usize, k: usize| {
            if p == q {
                return;
            }
            // Rows p and q of the finished L columns.
            for j in 0..k {
                w.swap(idx(p, j), idx(q, j));
            }
            // Trailing block: full symmetric permutation.
            for j in k..n {
                w.swap(idx(p, j), idx(q, j));
            }
            for i in k..n {
                w.swap(idx(i, p), idx(i, q));
            }
        };

        let mut k = 0;
        while k < n {
            let absakk = w[idx(k, k)].re.abs();
            let (mut imax, mut colmax) = (k, 0.0);
            for i in k + 1..n {
                let v = w[idx(i, k)].norm();
                if v > colmax {
                    colmax = v;
                    imax = i;
                }
            }
            let (kp, kstep);
            if absakk.max(colmax) <= tiny {
                kp = k;
                kstep = 1;
            } else if absakk >= ALPHA * colmax {
                kp = k;
                kstep = 1;
            } else {
                let mut rowmax = 0.0f64;
                for j in k..n {
                    if j != imax {
                        rowmax = rowmax.max(w[idx(imax, j)].norm());
                    }
                }
                if absakk >= ALPHA * colmax * (colmax / rowmax) {
                    kp = k;
                    kstep = 1;
                } else if w[idx(imax, imax)].re.abs() >= ALPHA * rowmax {
                    kp = imax;
                    kstep = 1;
                } else {
                    kp = imax;
                    kstep = 2;
                }
            }
            let kk = k + kstep - 1;
            if kp != kk {
                swap_sym(&mut w, kk, kp, k);
                perm.swap(kk, kp);
            }
            if kstep == 1 {
                let d = w[idx(k, k)].re;
                if d.abs() <= tiny {
                    zero += 1;
                    pivots.push((k, Pivot::One(0.0)));
                    for i in k + 1..n {
                        w[idx(i, k)] = C64::new(0.0, 0.0);
                    }
                } else {
                    if d < 0.0 {
                        negative += 1;
                    }
                    pivots.push((k, Pivot::One(d)));
                    let col: Vec<C64> = (k + 1..n).map(|i| w[idx(i, k)]).collect();
                    for (ii, i) in (k + 1..n).enumerate() {
                        let li = col[ii] / d;
                        for (jj, j) in (k + 1..n).enumerate() {
                            w[idx(i, j)] -= li * col[jj].conj();
                        }
                    }
                    for (ii, i) in (k + 1..n).enumerate() {
                        w[idx(i, k)] = col[ii] / d;
                    }
                }
                k += 1;
            } else {
                let a11 = w[idx(k, k)].re;
                let b = w[idx(k + 1, k)];
                let a22 = w[idx(k + 1, k + 1)].re;
                let det = a11 * a22 - b.norm_sqr();
                // Eigenvalues of the 2×2 block.
                let tr = a11 + a22;
                let disc = ((a11 - a22) * (a11 - a22) / 4.0 + b.norm_sqr()).sqrt();
                let (e1, e2) = (0.5 * tr - disc, 0.5 * tr + disc);
                for e in [e1, e2] {
                    if e.abs() <= tiny {
                        zero += 1;
                    } else if e < 0.0 {
                        negative += 1;
                    }
                }
                pivots.push((k, Pivot::Two { a: a11, b, c: a22 }));
                // D⁻¹ = [[a22, -conj(b)], [-b, a11]] / det
                let c1: Vec<C64> = (k + 2..n).map(|i| w[idx(i, k)]).collect();
                let c2: Vec<C64> = (k + 2..n).map(|i| w[idx(i, k + 1)]).collect();
                let m = c1.len();
                let mut l1 = vec![C64::new(0.0, 0.0); m];
                let mut l2 = vec![C64::new(0.0, 0.0); m];
                for r in 0..m {
                    // [l1 l2] = [c1 c2] D⁻¹
                    l1[r] = (c1[r] * a22 - c2[r] * b) / det;
                    l2[r] = (-c1[r] * b.conj() + c2[r] * a11) / det;
                }
                for (ii, i) in (k + 2..n).enumerate() {
                    for (jj, j) in (k + 2..n).enumerate() {
                        w[idx(i, j)] -= l1[ii] * c1[jj].conj() + l2[ii] * c2[jj].conj();
                    }
                    w[idx(i, k)] = l1[ii];
                    w[idx(i, k + 1)] = l2[ii];
                }
                w[idx(k + 1, k)] = C64::new(0.0, 0.0);
                k += 2;
            }
        }
        BunchKaufman { n, l: w, pivots, perm, negative, zero }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `(negative, zero, positive)` eigenvalue counts.
    pub fn inertia(&self) -> (usize, usize, usize) {
        (self.negative, self.zero, self.n - self.negative - self.zero)
    }

    pub fn is_singular(&self) -> bool {
        self.zero > 0
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        // L z = y
        for j in 0..n {
            let yj = y[j];
            if yj == C64::new(0.0, 0.0) {
                continue;
            }
            for i in j + 1..n {
                y[i] -= self.l[i * n + j] * yj;
            }
        }
        // D w = z
        for &(k, p) in &self.pivots {
            match p {
                Pivot::One(d) => {
                    y[k] = if d == 0.0 { C64::new(0.0, 0.0) } else { y[k] / d };
                }
                Pivot::Two { a, b: off, c } => {
                    let det = a * c - off.norm_sqr();
                    let (u, v) = (y[k], y[k + 1]);
                    y[k] = (u * c - v * off.conj()) / det;
                    y[k + 1] = (-u * off + v * a) / det;
                }
            }
        }
        // Lᴴ x = w
        for j in (0..n).rev() {
            let mut s = y[j];
            for i in j + 1..n {
                s -= self.l[i * n + j].conj() * y[i];
            }
            y[j] = s;
        }
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = y[i];
        }
    }

    /// Explicit Hermitian inverse.
    pub fn inverse(&self) -> CMatrix {
        let n = self.n;
        let mut inv = CMatrix::zeros(n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            col.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            self.solve_in_place(&mut col);
            for i in 0..n {
                inv.data[i * n + j] = col[i];
            }
        }
        inv.hermitize();
        inv
    }
}
