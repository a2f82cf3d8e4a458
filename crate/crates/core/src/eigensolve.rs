//! Dense and spectral-window Hermitian eigensolvers.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, symmetric_eigen, BunchKaufman, CMatrix};
use crate::operators::{BlockOperator, HermitianOperator, Storage};
use crate::{Error, Result};

pub const DEFAULT_DENSE_CAP: usize = 6000;

/// Eigenvalues closer than this fraction of the operator norm form one cluster.
pub const CLUSTER_RTOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct EigenPair {
    pub e: f64,
    pub vector: Vec<C64>,
    /// `‖Hψ − Eψ‖₂`
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SpectrumWindow {
    pub a: f64,
    pub b: f64,
    pub tol: f64,
    pub pairs: Vec<EigenPair>,
    /// Eigenvalues below `a` and below `b` from the factorization inertia.
    pub count_below_a: usize,
    pub count_below_b: usize,
}

impl SpectrumWindow {
    pub fn certified(&self) -> usize {
        self.count_below_b - self.count_below_a
    }

    pub fn energies(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.e).collect()
    }

    pub fn max_overlap(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.pairs.len() {
            for j in 0..i {
                m = m.max(linalg::dotc(&self.pairs[i].vector, &self.pairs[j].vector).norm());
            }
        }
        m
    }
}

fn residual(op: &HermitianOperator, e: f64, v: &[C64]) -> f64 {
    let hv = op.matvec(v);
    hv.iter().zip(v).map(|(h, x)| (h - e * x).norm_sqr()).sum::<f64>().sqrt()
}

/// All eigenpairs via the real doubling embedding `[[Re, −Im], [Im, Re]]`.
///
/// Every eigenvalue of the embedding appears twice. Within each cluster of
/// (numerically) equal eigenvalues the real vectors `(u, v)` are mapped to
/// `u + iv` and a pivoted complex Gram–Schmidt keeps half of them, which spans
/// the complex eigenspace.
pub fn eig_dense(op: &HermitianOperator) -> Result<Vec<EigenPair>> {
    eig_dense_capped(op, DEFAULT_DENSE_CAP)
}

pub fn eig_dense_capped(op: &HermitianOperator, cap: usize) -> Result<Vec<EigenPair>> {
    let n = op.dim();
    if n > cap {
        return Err(Error::DimensionCap { dim: n, cap });
    }
    let m = op.to_dense();
    let pairs = dense_pairs(&m)?;
    Ok(pairs
        .into_iter()
        .map(|(e, v)| {
            let r = residual(op, e, &v);
            EigenPair { e, vector: v, residual: r }
        })
        .collect())
}

/// Eigenpairs of a dense Hermitian matrix (vectors unit-norm, phase fixed).
pub fn dense_pairs(m: &CMatrix) -> Result<Vec<(f64, Vec<C64>)>> {
    let n = m.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let nn = 2 * n;
    let mut s = vec![0.0; nn * nn];
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            s[i * nn + j] = v.re;
            s[i * nn + n + j] = -v.im;
            s[(n + i) * nn + j] = v.im;
            s[(n + i) * nn + n + j] = v.re;
        }
    }
    let eig = symmetric_eigen(&s, nn).ok_or(Error::NoConvergence { index: 0 })?;
    let norm = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let gap = CLUSTER_RTOL * norm;
    let complex_of = |k: usize| -> Vec<C64> {
        (0..n).map(|i| C64::new(eig.vectors[i * nn + k], eig.vectors[(n + i) * nn + k])).collect()
    };
    let mut out: Vec<(f64, Vec<C64>)> = Vec::with_capacity(n);
    let mut start = 0;
    let mut prev: Vec<Vec<C64>> = Vec::new();
    while start < nn {
        let mut end = start + 1;
        while end < nn && eig.values[end] - eig.values[end - 1] <= gap {
            end += 1;
        }
        let size = end - start;
        let want = (size + 1) / 2;
        let mut cands: Vec<Vec<C64>> = (start..end).map(complex_of).collect();
        for c in cands.iter_mut() {
            linalg::orthogonalize(c, &prev);
        }
        let mut picked: Vec<Vec<C64>> = Vec::with_capacity(want);
        for _ in 0..want {
            let (best, bn) = cands
                .iter()
                .enumerate()
                .map(|(i, c)| (i, linalg::norm2(c)))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if bn < 1e-6 {
                break;
            }
            let mut q = cands.swap_remove(best);
            linalg::scale(1.0 / bn, &mut q);
            for c in cands.iter_mut() {
                let coef = linalg::dotc(&q, c);
                linalg::axpy(-coef, &q, c);
            }
            picked.push(q);
        }
        for q in &mut picked {
            let hq = m.matvec(q);
            let e = linalg::dotc(q, &hq).re;
            linalg::fix_phase(q);
            out.push((e, q.clone()));
        }
        prev = picked;
        start = end;
    }
    if out.len() != n {
        return Err(Error::NoConvergence { index: out.len() });
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Factorization of `H − σ` supporting inertia and solves.
pub enum ShiftedFactor {
    Dense(BunchKaufman),
    Block(BlockFactor),
}

enum PivotBlock {
    /// Diagonal pivot, stored as the reciprocal entries.
    Diag(Vec<f64>),
    /// Dense Hermitian inverse of the pivot block.
    Full(CMatrix),
}

/// Block LDLᴴ of a block-tridiagonal operator with scalar coupling `c`:
/// `D₀ = A₀ − σ`, `D_{j+1} = A_{j+1} − σ − c²·D_j⁻¹`.
pub struct BlockFactor {
    nk: usize,
    coupling: f64,
    inv: Vec<PivotBlock>,
    negative: usize,
    singular: bool,
}

impl BlockFactor {
    pub fn new(op: &BlockOperator, sigma: f64, tiny: f64) -> Self {
        let nk = op.nk();
        let c2 = op.coupling * op.coupling;
        let mut inv: Vec<PivotBlock> = Vec::with_capacity(op.basis.nx);
        let mut negative = 0;
        let mut singular = false;
        for j in 0..op.basis.nx {
            let prev = inv.last();
            let dense_needed = op.vblocks[j].is_some() || matches!(prev, Some(PivotBlock::Full(_)));
            if !dense_needed {
                let mut r = vec![0.0; nk];
                for (i, ri) in r.iter_mut().enumerate() {
                    let mut d = op.diag[j * nk + i] - sigma;
                    if let Some(PivotBlock::Diag(p)) = prev {
                        d -= c2 * p[i];
                    }
                    if d.abs() <= tiny {
                        singular = true;
                        *ri = 0.0;
                    } else {
                        if d < 0.0 {
                            negative += 1;
                        }
                        *ri = 1.0 / d;
                    }
                }
                inv.push(PivotBlock::Diag(r));
            } else {
                let mut d = op.diagonal_block(j);
                for i in 0..nk {
                    d.data[i * nk + i] -= sigma;
                }
                match prev {
                    Some(PivotBlock::Diag(p)) => {
                        for i in 0..nk {
                            d.data[i * nk + i] -= c2 * p[i];
                        }
                    }
                    Some(PivotBlock::Full(p)) => {
                        for (dv, pv) in d.data.iter_mut().zip(&p.data) {
                            *dv -= c2 * pv;
                        }
                    }
                    None => {}
                }
                d.hermitize();
                let f = BunchKaufman::factor(&d, tiny);
                let (neg, zero, _) = f.inertia();
                negative += neg;
                if zero > 0 {
                    singular = true;
                }
                inv.push(PivotBlock::Full(f.inverse()));
            }
        }
        BlockFactor { nk, coupling: op.coupling, inv, negative, singular }
    }

    fn apply_inv(&self, j: usize, x: &[C64]) -> Vec<C64> {
        match &self.inv[j] {
            PivotBlock::Diag(r) => x.iter().zip(r).map(|(v, d)| v * d).collect(),
            PivotBlock::Full(m) => m.matvec(x),
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let nk = self.nk;
        let nx = self.inv.len();
        let c = self.coupling;
        let mut y = b.to_vec();
        for j in 1..nx {
            let t = self.apply_inv(j - 1, &y[(j - 1) * nk..j * nk]);
            for i in 0..nk {
                y[j * nk + i] -= c * t[i];
            }
        }
        let mut x = vec![C64::new(0.0, 0.0); b.len()];
        for j in (0..nx).rev() {
            let mut w = y[j * nk..(j + 1) * nk].to_vec();
            if j + 1 < nx {
                for i in 0..nk {
                    w[i] -= c * x[(j + 1) * nk + i];
                }
            }
            let xj = self.apply_inv(j, &w);
            x[j * nk..(j + 1) * nk].copy_from_slice(&xj);
        }
        x
    }
}

impl ShiftedFactor {
    pub fn new(op: &HermitianOperator, sigma: f64) -> Self {
        let tiny = 1e-14 * op.norm_bound().max(1.0);
        match &op.storage {
            Storage::Block(b) => ShiftedFactor::Block(BlockFactor::new(b, sigma, tiny)),
            Storage::Dense(m) => {
                let mut d = m.clone();
                for i in 0..d.n {
                    d.data[i * d.n + i] -= sigma;
                }
                ShiftedFactor::Dense(BunchKaufman::factor(&d, tiny))
            }
        }
    }

    /// Number of eigenvalues strictly below the shift.
    pub fn negative_count(&self) -> usize {
        match self {
            ShiftedFactor::Dense(f) => f.inertia().0,
            ShiftedFactor::Block(f) => f.negative,
        }
    }

    pub fn is_singular(&self) -> bool {
        match self {
            ShiftedFactor::Dense(f) => f.is_singular(),
            ShiftedFactor::Block(f) => f.singular,
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        match self {
            ShiftedFactor::Dense(f) => {
                let mut x = b.to_vec();
                f.solve_in_place(&mut x);
                x
            }
            ShiftedFactor::Block(f) => f.solve(b),
        }
    }
}

/// Number of eigenvalues of `op` strictly below `x` (Sylvester inertia).
pub fn count_below(op: &HermitianOperator, x: f64) -> usize {
    let step = 1e-13 * op.norm_bound().max(1.0);
    let mut shift = x;
    for _ in 0..8 {
        let f = ShiftedFactor::new(op, shift);
        if !f.is_singular() {
            return f.negative_count();
        }
        shift -= step;
    }
    ShiftedFactor::new(op, shift).negative_count()
}

#[derive(Clone, Copy, Debug)]
pub struct WindowOptions {
    pub tol: f64,
    /// Largest number of eigenvalues handled by one shift before slicing.
    pub chunk: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for WindowOptions {
    fn default() -> Self {
        WindowOptions { tol: 1e-9, chunk: 48, max_restarts: 64, seed: 0x5eed }
    }
}

/// Eigenpairs with `a ≤ E < b`, certified complete by inertia counts.
pub fn eig_window(op: &HermitianOperator, a: f64, b: f64, tol: f64) -> Result<SpectrumWindow> {
    eig_window_with(op, a, b, WindowOptions { tol, ..Default::default() })
}

pub fn eig_window_with(op: &HermitianOperator, a: f64, b: f64, opts: WindowOptions) -> Result<SpectrumWindow> {
    if !(a < b) {
        return Err(Error::Precondition(format!("window [{a}, {b}] is empty")));
    }
    let ca = count_below(op, a);
    let cb = count_below(op, b);
    let mut vectors: Vec<Vec<C64>> = Vec::new();
    if cb > ca {
        slice(op, a, b, ca, cb, &opts, &mut vectors)?;
    }
    let pairs = rayleigh_ritz(op, &vectors, a, b)?;
    let bad = pairs.iter().find(|p| p.residual > opts.tol.max(1e-9 * op.norm_bound()));
    if let Some(p) = bad {
        return Err(Error::NoConvergence {
            index: pairs.iter().position(|q| q.e == p.e).unwrap_or(0),
        });
    }
    if pairs.len() != cb - ca {
        return Err(Error::MissedEigenvalues { a, b, certified: cb - ca, found: pairs.len() });
    }
    Ok(SpectrumWindow { a, b, tol: opts.tol, pairs, count_below_a: ca, count_below_b: cb })
}

fn slice(
    op: &HermitianOperator,
    a: f64,
    b: f64,
    ca: usize,
    cb: usize,
    opts: &WindowOptions,
    out: &mut Vec<Vec<C64>>,
) -> Result<()> {
    let need = cb - ca;
    if need == 0 {
        return Ok(());
    }
    if need > opts.chunk {
        let mid = 0.5 * (a + b);
        let cm = count_below(op, mid);
        slice(op, a, mid, ca, cm, opts, out)?;
        return slice(op, mid, b, cm, cb, opts, out);
    }
    let found = shift_invert(op, a, b, need, opts)?;
    out.extend(found);
    Ok(())
}

/// Shift-invert Lanczos with full reorthogonalization and deflated restarts.
fn shift_invert(
    op: &HermitianOperator,
    a: f64,
    b: f64,
    need: usize,
    opts: &WindowOptions,
) -> Result<Vec<Vec<C64>>> {
    let n = op.dim();
    let width = b - a;
    let mut sigma = 0.5 * (a + b);
    let mut fact = ShiftedFactor::new(op, sigma);
    let mut attempts = 0;
    while fact.is_singular() {
        attempts += 1;
        if attempts > 5 {
            return Err(Error::SingularShift { shift: sigma, attempts });
        }
        sigma += opts.tol.max(1e-7 * width) * attempts as f64 * 1.618;
        fact = ShiftedFactor::new(op, sigma);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ a.to_bits().rotate_left(17) ^ b.to_bits());
    let mut found: Vec<Vec<C64>> = Vec::new();
    let max_m = n.min((3 * need + 60).max(90));
    for _restart in 0..opts.max_restarts {
        if found.len() >= need {
            break;
        }
        let mut v: Vec<C64> =
            (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        if linalg::orthogonalize(&mut v, &found) < 1e-12 {
            break;
        }
        let nrm = linalg::norm2(&v);
        linalg::scale(1.0 / nrm, &mut v);
        let mut q: Vec<Vec<C64>> = vec![v];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let accepted: Vec<Vec<C64>>;
        loop {
            let k = q.len() - 1;
            let mut w = fact.solve(&q[k]);
            let ak = linalg::dotc(&q[k], &w).re;
            alpha.push(ak);
            linalg::orthogonalize(&mut w, &found);
            linalg::orthogonalize(&mut w, &q);
            let bk = linalg::norm2(&w);
            let m = alpha.len();
            let exhausted = bk <= 1e-13 * alpha.iter().fold(0.0f64, |s, x| s.max(x.abs())) || m + found.len() >= n;
            let check = exhausted || m == max_m || m % 10 == 0;
            if check {
                let mut t = vec![0.0; m * m];
                for i in 0..m {
                    t[i * m + i] = alpha[i];
                    if i + 1 < m {
                        t[i * m + i + 1] = beta[i];
                        t[(i + 1) * m + i] = beta[i];
                    }
                }
                let te = symmetric_eigen(&t, m).ok_or(Error::NoConvergence { index: m })?;
                let mut conv: Vec<usize> = Vec::new();
                let mut pending = 0;
                for r in 0..m {
                    let theta = te.values[r];
                    if theta == 0.0 {
                        continue;
                    }
                    let lam = sigma + 1.0 / theta;
                    if lam < a || lam >= b {
                        continue;
                    }
                    let est = bk * te.vectors[(m - 1) * m + r].abs();
                    if exhausted || est <= 1e-10 * theta.abs() {
                        conv.push(r);
                    } else {
                        pending += 1;
                    }
                }
                let enough = conv.len() + found.len() >= need;
                if exhausted || m == max_m || (pending == 0 && enough) {
                    accepted = conv
                        .iter()
                        .map(|&r| {
                            let mut y = vec![C64::new(0.0, 0.0); n];
                            for i in 0..m {
                                linalg::axpy(C64::new(te.vectors[i * m + r], 0.0), &q[i], &mut y);
                            }
                            y
                        })
                        .collect();
                    break;
                }
            }
            linalg::scale(1.0 / bk, &mut w);
            beta.push(bk);
            q.push(w);
        }
        let before = found.len();
        for mut y in accepted {
            let r = linalg::orthogonalize(&mut y, &found);
            if r > 1e-6 {
                linalg::scale(1.0 / r, &mut y);
                found.push(y);
            }
        }
        if found.len() == before && found.len() < need {
            // No progress with this start vector; the next restart draws a new one.
            continue;
        }
    }
    Ok(found)
}

/// Orthonormalizes the collected vectors, diagonalizes `H` on their span and
/// returns the pairs inside `[a, b)` in ascending order.
fn rayleigh_ritz(op: &HermitianOperator, vectors: &[Vec<C64>], a: f64, b: f64) -> Result<Vec<EigenPair>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        let r = linalg::orthogonalize(&mut w, &basis);
        if r > 1e-8 {
            linalg::scale(1.0 / r, &mut w);
            basis.push(w);
        }
    }
    let k = basis.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let hb: Vec<Vec<C64>> = basis.iter().map(|v| op.matvec(v)).collect();
    let small = CMatrix::from_fn(k, |i, j| linalg::dotc(&basis[i], &hb[j]));
    let mut small = small;
    small.hermitize();
    let sp = dense_pairs(&small)?;
    let n = op.dim();
    let mut out = Vec::new();
    for (e, c) in sp {
        if e < a || e >= b {
            continue;
        }
        let mut v = vec![C64::new(0.0, 0.0); n];
        for (i, ci) in c.iter().enumerate() {
            linalg::axpy(*ci, &basis[i], &mut v);
        }
        let nrm = linalg::norm2(&v);
        linalg::scale(1.0 / nrm, &mut v);
        linalg::fix_phase(&mut v);
        let res = residual(op, e, &v);
        out.push(EigenPair { e, vector: v, residual: res });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Label;

    fn dense_op(m: CMatrix) -> HermitianOperator {
        HermitianOperator { label: Label::Other, fingerprint: 0, storage: Storage::Dense(m) }
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b, c) = (1.0, -0.5, C64::new(0.3, 0.4));
        let mut m = CMatrix::zeros(2);
        m.set(0, 0, C64::new(a, 0.0));
        m.set(1, 1, C64::new(b, 0.0));
        m.set(0, 1, c);
        m.set(1, 0, c.conj());
        let p = eig_dense(&dense_op(m)).unwrap();
        let r = ((a - b) * (a - b) / 4.0 + c.norm_sqr()).sqrt();
        assert!((p[0].e - (0.5 * (a + b) - r)).abs() < 1e-14);
        assert!((p[1].e - (0.5 * (a + b) + r)).abs() < 1e-14);
    }

    #[test]
    fn degenerate_diagonal() {
        let mut m = CMatrix::zeros(4);
        for (i, d) in [1.0, 1.0, 2.0, 1.0].iter().enumerate() {
            m.set(i, i, C64::new(*d, 0.0));
        }
        let p = eig_dense(&dense_op(m)).unwrap();
        let e: Vec<f64> = p.iter().map(|x| x.e).collect();
        assert_eq!(e, vec![1.0, 1.0, 1.0, 2.0]);
        for i in 0..4 {
            for j in 0..i {
                assert!(linalg::dotc(&p[i].vector, &p[j].vector).norm() < 1e-12);
            }
        }
    }
}
