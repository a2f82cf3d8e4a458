//! Decoupling of the full resolvent into edge and bulk resolvents:
//! `(z − H_ω)·Σ_i J_i R_i(z) J̃_i = 1 − 𝒦(z)` with
//! `𝒦(z) = Σ_i ½[p_x², J_i] R_i(z) J̃_i`, `i ∈ {ℓ, b, r}`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::MixedBasis;
use crate::edge::SpectralBranch;
use crate::eigensolve::count_below;
use crate::linalg::{dotc, invert, norm2, CMatrix};
use crate::operators::{HermitianOperator, Label, Storage};
use crate::{Error, Result};

/// Width of each smooth transition.
pub const TRANSITION_WIDTH: f64 = 1.0;
/// Number of probe vectors for the identity residual.
pub const PROBES: usize = 32;

/// `6t⁵ − 15t⁴ + 10t³` clamped to `[0, 1]`.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

fn smoothstep_d1(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    30.0 * t * t * (1.0 - t) * (1.0 - t)
}

fn smoothstep_d2(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
}

/// Smooth and sharp partitions sampled on an x-grid, ordered `[ℓ, b, r]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionSet {
    pub l: f64,
    pub d: f64,
    pub xs: Vec<f64>,
    pub smooth: [Vec<f64>; 3],
    pub sharp: [Vec<f64>; 3],
    /// Largest sampled `|∂J_i|` and `|∂²J_i|`.
    pub max_d1: f64,
    pub max_d2: f64,
}

/// Value, first and second derivative of `J_i` at `x`.
fn profile(i: usize, x: f64, l: f64, d: f64) -> (f64, f64, f64) {
    let w = TRANSITION_WIDTH;
    match i {
        0 => {
            let t = (x - (-0.5 * l + 0.75 * d)) / w;
            (1.0 - smoothstep(t), -smoothstep_d1(t) / w, -smoothstep_d2(t) / (w * w))
        }
        1 => {
            let t = (x.abs() - (0.5 * l - 0.25 * d)) / w;
            let s = x.signum();
            (1.0 - smoothstep(t), -s * smoothstep_d1(t) / w, -smoothstep_d2(t) / (w * w))
        }
        _ => {
            let t = (x - (0.5 * l - 0.75 * d - w)) / w;
            (smoothstep(t), smoothstep_d1(t) / w, smoothstep_d2(t) / (w * w))
        }
    }
}

/// Partitions with layer width `d` on the grid `xs`. The sharp cut points sit
/// at `±(L/2 − D/2)`; the interior interval is closed.
pub fn build_partitions(l: f64, d: f64, xs: &[f64]) -> Result<PartitionSet> {
    if !(d > 0.0) || l < 4.0 * d {
        return Err(Error::PartitionOverlap(format!("L ≥ 4·D required (L = {l}, D = {d})")));
    }
    let cut = 0.5 * l - 0.5 * d;
    let mut smooth: [Vec<f64>; 3] = Default::default();
    let mut sharp: [Vec<f64>; 3] = Default::default();
    let (mut max_d1, mut max_d2) = (0.0f64, 0.0f64);
    for i in 0..3 {
        for &x in xs {
            let (v, d1, d2) = profile(i, x, l, d);
            smooth[i].push(v);
            max_d1 = max_d1.max(d1.abs());
            max_d2 = max_d2.max(d2.abs());
        }
    }
    for &x in xs {
        let (a, b, c) = if x < -cut {
            (1.0, 0.0, 0.0)
        } else if x <= cut {
            (0.0, 1.0, 0.0)
        } else {
            (0.0, 0.0, 1.0)
        };
        sharp[0].push(a);
        sharp[1].push(b);
        sharp[2].push(c);
    }
    Ok(PartitionSet { l, d, xs: xs.to_vec(), smooth, sharp, max_d1, max_d2 })
}

impl PartitionSet {
    /// `max_x |Σ J_i J̃_i − 1|` and `max_x |Σ J̃_i − 1|`.
    pub fn identity_errors(&self) -> (f64, f64) {
        let mut e1 = 0.0f64;
        let mut e2 = 0.0f64;
        for j in 0..self.xs.len() {
            let s1: f64 = (0..3).map(|i| self.smooth[i][j] * self.sharp[i][j]).sum();
            let s2: f64 = (0..3).map(|i| self.sharp[i][j]).sum();
            e1 = e1.max((s1 - 1.0).abs());
            e2 = e2.max((s2 - 1.0).abs());
        }
        (e1, e2)
    }

    /// Layer and width condition for `H_ω J_i = H_i J_i`: walls vanish on
    /// `supp J_b` and no bump of radius 1/4 reaches `supp J_ℓ ∪ supp J_r`.
    pub fn supports_respect_layer(&self, layer: f64) -> bool {
        self.d >= 4.0 * TRANSITION_WIDTH && layer >= 0.75 * self.d + TRANSITION_WIDTH + 0.25
    }
}

enum InvBlock {
    Diag(Vec<C64>),
    Dense(CMatrix),
}

impl InvBlock {
    fn apply(&self, x: &[C64], adjoint: bool) -> Vec<C64> {
        match self {
            InvBlock::Diag(d) => x.iter().zip(d).map(|(a, b)| a * if adjoint { b.conj() } else { *b }).collect(),
            InvBlock::Dense(m) => {
                if adjoint {
                    let n = m.n;
                    let mut y = vec![C64::new(0.0, 0.0); n];
                    for (i, xi) in x.iter().enumerate() {
                        for (c, yc) in y.iter_mut().enumerate() {
                            *yc += m.data[i * n + c].conj() * xi;
                        }
                    }
                    y
                } else {
                    m.matvec(x)
                }
            }
        }
    }
}

enum FactorKind {
    Block { nk: usize, coupling: f64, inv: Vec<InvBlock> },
    Dense(CMatrix),
}

/// `(z − H)⁻¹` for complex `z` by block LU of the block-tridiagonal matrix.
pub struct ResolventFactor {
    pub z: C64,
    kind: FactorKind,
}

impl ResolventFactor {
    pub fn new(op: &HermitianOperator, z: C64) -> Result<Self> {
        let singular = || Error::ResolventSingular { operator: label_name(op.label), z, distance: 0.0, floor: 0.0 };
        let kind = match &op.storage {
            Storage::Dense(m) => {
                let t = CMatrix::from_fn(m.n, |i, j| if i == j { z - m.get(i, j) } else { -m.get(i, j) });
                FactorKind::Dense(invert(&t).ok_or_else(singular)?)
            }
            Storage::Block(b) => {
                let nk = b.nk();
                let c = b.coupling;
                let c2 = c * c;
                let mut inv: Vec<InvBlock> = Vec::with_capacity(b.basis.nx);
                for j in 0..b.basis.nx {
                    let prev = inv.last();
                    let dense = b.vblocks[j].is_some() || matches!(prev, Some(InvBlock::Dense(_)));
                    if !dense {
                        let mut d = Vec::with_capacity(nk);
                        for a in 0..nk {
                            let mut v = z - b.diag[j * nk + a];
                            if let Some(InvBlock::Diag(p)) = prev {
                                v -= c2 * p[a];
                            }
                            if v.norm() == 0.0 {
                                return Err(singular());
                            }
                            d.push(1.0 / v);
                        }
                        inv.push(InvBlock::Diag(d));
                    } else {
                        let mut m = b.diagonal_block(j);
                        m.data.iter_mut().for_each(|v| *v = -*v);
                        for a in 0..nk {
                            m.data[a * nk + a] += z;
                        }
                        match prev {
                            Some(InvBlock::Diag(p)) => {
                                for a in 0..nk {
                                    m.data[a * nk + a] -= c2 * p[a];
                                }
                            }
                            Some(InvBlock::Dense(p)) => {
                                for (v, w) in m.data.iter_mut().zip(&p.data) {
                                    *v -= c2 * w;
                                }
                            }
                            None => {}
                        }
                        inv.push(InvBlock::Dense(invert(&m).ok_or_else(singular)?));
                    }
                }
                FactorKind::Block { nk, coupling: c, inv }
            }
        };
        Ok(ResolventFactor { z, kind })
    }

    fn apply(&self, rhs: &[C64], adjoint: bool) -> Vec<C64> {
        match &self.kind {
            FactorKind::Dense(m) => {
                if adjoint {
                    m.adjoint().matvec(rhs)
                } else {
                    m.matvec(rhs)
                }
            }
            FactorKind::Block { nk, coupling, inv } => {
                let nk = *nk;
                let nx = inv.len();
                let mut y: Vec<Vec<C64>> = Vec::with_capacity(nx);
                for j in 0..nx {
                    let mut bj = rhs[j * nk..(j + 1) * nk].to_vec();
                    if j > 0 {
                        let t = inv[j - 1].apply(&y[j - 1], adjoint);
                        for (b, v) in bj.iter_mut().zip(&t) {
                            *b += coupling * v;
                        }
                    }
                    y.push(bj);
                }
                let mut x = vec![C64::new(0.0, 0.0); rhs.len()];
                for j in (0..nx).rev() {
                    let mut r = y[j].clone();
                    if j + 1 < nx {
                        for (a, rv) in r.iter_mut().enumerate() {
                            *rv += coupling * x[(j + 1) * nk + a];
                        }
                    }
                    let xj = inv[j].apply(&r, adjoint);
                    x[j * nk..(j + 1) * nk].copy_from_slice(&xj);
                }
                x
            }
        }
    }

    /// `(z − H)⁻¹ b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        self.apply(b, false)
    }

    /// `(z̄ − H)⁻¹ b`.
    pub fn solve_adjoint(&self, b: &[C64]) -> Vec<C64> {
        self.apply(b, true)
    }
}

fn label_name(l: Label) -> &'static str {
    match l {
        Label::H0 => "H0",
        Label::Hb => "Hb",
        Label::Hl => "Hl",
        Label::Hr => "Hr",
        Label::Hfull => "H",
        Label::Vy => "vy",
        Label::Other => "operator",
    }
}

/// Fails when `dist(z, σ(op)) < floor`.
pub fn check_distance(op: &HermitianOperator, z: C64, floor: f64) -> Result<()> {
    if floor <= z.im.abs() {
        return Ok(());
    }
    let r = (floor * floor - z.im * z.im).sqrt();
    let inside = count_below(op, z.re + r).saturating_sub(count_below(op, z.re - r));
    if inside > 0 {
        // Locate the nearest eigenvalue by bisection on the inertia.
        let (mut lo, mut hi) = (0.0, r);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if count_below(op, z.re + mid) > count_below(op, z.re - mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let distance = (hi * hi + z.im * z.im).sqrt();
        return Err(Error::ResolventSingular { operator: label_name(op.label), z, distance, floor });
    }
    Ok(())
}

/// The three resolvents at one `z` together with the partitions.
pub struct Decoupling<'a> {
    pub parts: &'a PartitionSet,
    pub z: C64,
    nk: usize,
    hx: f64,
    factors: Vec<ResolventFactor>,
}

impl<'a> Decoupling<'a> {
    /// `ops = [H_ℓ, H_b, H_r]` on `basis`.
    pub fn new(
        z: C64,
        ops: [&HermitianOperator; 3],
        basis: &MixedBasis,
        parts: &'a PartitionSet,
        floor: f64,
    ) -> Result<Self> {
        if parts.xs.len() != basis.nx {
            return Err(Error::BasisMismatch("partitions sampled on a different grid".into()));
        }
        for op in ops {
            if op.fingerprint != basis.fingerprint() || op.as_block().is_none() {
                return Err(Error::BasisMismatch("operator not assembled on this basis".into()));
            }
            check_distance(op, z, floor)?;
        }
        let factors = ops.iter().map(|op| ResolventFactor::new(op, z)).collect::<Result<Vec<_>>>()?;
        Ok(Decoupling { parts, z, nk: basis.nk(), hx: basis.hx, factors })
    }

    fn mask(&self, w: &[f64], v: &[C64]) -> Vec<C64> {
        let nk = self.nk;
        v.iter().enumerate().map(|(p, c)| c * w[p / nk]).collect()
    }

    /// `½[p_x², J] u` with the three-point Laplacian.
    fn commutator(&self, jv: &[f64], u: &[C64]) -> Vec<C64> {
        let nk = self.nk;
        let nx = jv.len();
        let s = -0.5 / (self.hx * self.hx);
        let mut out = vec![C64::new(0.0, 0.0); u.len()];
        for j in 0..nx {
            let up = if j + 1 < nx { jv[j + 1] - jv[j] } else { 0.0 };
            let dn = if j > 0 { jv[j - 1] - jv[j] } else { 0.0 };
            if up == 0.0 && dn == 0.0 {
                continue;
            }
            for a in 0..nk {
                let mut v = C64::new(0.0, 0.0);
                if up != 0.0 {
                    v += up * u[(j + 1) * nk + a];
                }
                if dn != 0.0 {
                    v += dn * u[(j - 1) * nk + a];
                }
                out[j * nk + a] = s * v;
            }
        }
        out
    }

    /// `K_i v` for a single index.
    pub fn apply_ki(&self, i: usize, v: &[C64]) -> Vec<C64> {
        let w = self.mask(&self.parts.sharp[i], v);
        if w.iter().all(|c| c.norm() == 0.0) {
            return vec![C64::new(0.0, 0.0); v.len()];
        }
        self.commutator(&self.parts.smooth[i], &self.factors[i].solve(&w))
    }

    pub fn apply_k(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for i in 0..3 {
            for (o, t) in out.iter_mut().zip(self.apply_ki(i, v)) {
                *o += t;
            }
        }
        out
    }

    /// `𝒦^H v = −Σ_i J̃_i R_i(z)^H ½[p_x², J_i] v`.
    pub fn apply_k_adjoint(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for i in 0..3 {
            let c = self.commutator(&self.parts.smooth[i], v);
            let r = self.factors[i].solve_adjoint(&c);
            for (o, t) in out.iter_mut().zip(self.mask(&self.parts.sharp[i], &r)) {
                *o -= t;
            }
        }
        out
    }

    /// `Σ_i J_i R_i(z) J̃_i v`.
    pub fn apply_s(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for i in 0..3 {
            let w = self.mask(&self.parts.sharp[i], v);
            let r = self.mask(&self.parts.smooth[i], &self.factors[i].solve(&w));
            for (o, t) in out.iter_mut().zip(r) {
                *o += t;
            }
        }
        out
    }

    /// `‖𝒦(z)‖` by power iteration on `𝒦^H𝒦` to relative tolerance `tol`.
    pub fn k_norm(&self, tol: f64, max_iter: usize, seed: u64) -> (f64, usize) {
        let n = self.nk * self.parts.xs.len();
        let mut v = random_vector(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut lambda = 0.0;
        for it in 1..=max_iter {
            let nv = norm2(&v);
            if nv == 0.0 {
                return (0.0, it);
            }
            v.iter_mut().for_each(|c| *c /= nv);
            let w = self.apply_k_adjoint(&self.apply_k(&v));
            let next = dotc(&v, &w).re.max(0.0);
            let done = (next - lambda).abs() <= tol * next;
            lambda = next;
            v = w;
            if done || next == 0.0 {
                return (lambda.sqrt(), it);
            }
        }
        (lambda.sqrt(), max_iter)
    }
}

fn random_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// GMRES without restarts for `(1 − 𝒦)w = v`.
fn gmres(apply: impl Fn(&[C64]) -> Vec<C64>, b: &[C64], tol: f64, max_iter: usize) -> (Vec<C64>, f64) {
    let beta = norm2(b);
    let n = b.len();
    if beta == 0.0 {
        return (vec![C64::new(0.0, 0.0); n], 0.0);
    }
    let mut q: Vec<Vec<C64>> = vec![b.iter().map(|c| c / beta).collect()];
    let mut h: Vec<Vec<C64>> = Vec::new();
    let mut cs: Vec<(C64, C64)> = Vec::new();
    let mut g = vec![C64::new(beta, 0.0)];
    let mut k = 0;
    let mut rel = 1.0;
    while k < max_iter {
        let mut w = apply(&q[k]);
        let mut col = vec![C64::new(0.0, 0.0); k + 2];
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = dotc(qi, &w);
                col[i] += c;
                for (wv, qv) in w.iter_mut().zip(qi) {
                    *wv -= c * qv;
                }
            }
        }
        let hn = norm2(&w);
        col[k + 1] = C64::new(hn, 0.0);
        for (i, &(c, s)) in cs.iter().enumerate() {
            let (a, b2) = (col[i], col[i + 1]);
            col[i] = c.conj() * a + s.conj() * b2;
            col[i + 1] = -s * a + c * b2;
        }
        let (a, b2) = (col[k], col[k + 1]);
        let r = (a.norm_sqr() + b2.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 { (C64::new(1.0, 0.0), C64::new(0.0, 0.0)) } else { (a / r, b2 / r) };
        col[k] = C64::new(r, 0.0);
        col[k + 1] = C64::new(0.0, 0.0);
        cs.push((c, s));
        let gk = g[k];
        g[k] = c.conj() * gk;
        g.push(-s * gk);
        h.push(col);
        k += 1;
        rel = g[k].norm() / beta;
        if rel <= tol || hn == 0.0 {
            break;
        }
        q.push(w.iter().map(|c| c / hn).collect());
    }
    // Back substitution on the triangular Hessenberg factor.
    let mut y = vec![C64::new(0.0, 0.0); k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for (yi, qi) in y.iter().zip(&q) {
        for (xv, qv) in x.iter_mut().zip(qi) {
            *xv += yi * qv;
        }
    }
    (x, rel)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecouplingReport {
    pub z_re: f64,
    pub z_im: f64,
    pub k_norm: f64,
    pub power_iterations: usize,
    /// `‖(z − H_ω)S V − (1 − 𝒦)V‖_F / ‖V‖_F` over the probe block.
    pub residual: f64,
    /// Largest `‖R(z)v − S(1 − 𝒦)⁻¹v‖/‖R(z)v‖` over the reconstruction probes.
    pub reconstruction: f64,
    pub probes: usize,
}

pub struct VerifyOptions {
    pub floor: f64,
    pub probes: usize,
    pub reconstruction_probes: usize,
    pub seed: u64,
    pub norm_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { floor: 1e-4, probes: PROBES, reconstruction_probes: 2, seed: 0, norm_tol: 1e-6 }
    }
}

/// Checks the decoupling identity and the resolvent reconstruction at `z`.
pub fn verify_decoupling(
    z: C64,
    full: &HermitianOperator,
    ops: [&HermitianOperator; 3],
    basis: &MixedBasis,
    parts: &PartitionSet,
    opts: &VerifyOptions,
) -> Result<DecouplingReport> {
    if full.fingerprint != basis.fingerprint() {
        return Err(Error::BasisMismatch("full operator not assembled on this basis".into()));
    }
    check_distance(full, z, opts.floor)?;
    let dec = Decoupling::new(z, ops, basis, parts, opts.floor)?;
    let full_factor = ResolventFactor::new(full, z)?;
    let (k_norm, power_iterations) = dec.k_norm(opts.norm_tol, 2000, opts.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5EED);
    let n = full.dim();
    let (mut num, mut den) = (0.0, 0.0);
    let mut reconstruction = 0.0f64;
    for p in 0..opts.probes {
        let v = random_vector(n, &mut rng);
        let s = dec.apply_s(&v);
        let hs = full.matvec(&s);
        let kv = dec.apply_k(&v);
        for i in 0..n {
            let lhs = z * s[i] - hs[i];
            let rhs = v[i] - kv[i];
            num += (lhs - rhs).norm_sqr();
            den += v[i].norm_sqr();
        }
        if p < opts.reconstruction_probes {
            let exact = full_factor.solve(&v);
            let (w, _) = gmres(
                |x| {
                    let kx = dec.apply_k(x);
                    x.iter().zip(kx).map(|(a, b)| a - b).collect()
                },
                &v,
                1e-14,
                600,
            );
            let approx = dec.apply_s(&w);
            let err: f64 = exact.iter().zip(&approx).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            reconstruction = reconstruction.max(err / norm2(&exact));
        }
    }
    Ok(DecouplingReport {
        z_re: z.re,
        z_im: z.im,
        k_norm,
        power_iterations,
        residual: (num / den).sqrt(),
        reconstruction,
        probes: opts.probes,
    })
}

/// `points` values of `z` per gap between consecutive edge levels in the
/// window, each at imaginary part half the gap.
pub fn certified_z_grid(left: &SpectralBranch, right: &SpectralBranch, window: (f64, f64), points: usize) -> Vec<C64> {
    let (a, b) = window;
    let mut es: Vec<f64> = left.points.iter().chain(&right.points).map(|p| p.e).collect();
    es.sort_by(f64::total_cmp);
    let inside = |e: f64| e >= a && e <= b;
    let mut gaps: Vec<(f64, f64)> =
        es.windows(2).filter(|w| inside(w[0]) && inside(w[1])).map(|w| (w[0], w[1])).collect();
    if gaps.is_empty() {
        gaps = es.windows(2).filter(|w| inside(w[0]) || inside(w[1])).map(|w| (w[0], w[1])).collect();
    }
    let mut out = Vec::new();
    for (lo, hi) in gaps {
        let g = hi - lo;
        if g <= 0.0 {
            continue;
        }
        for m in 0..points {
            out.push(C64::new(lo + g * (m as f64 + 0.5) / points as f64, 0.5 * g));
        }
    }
    out
}
