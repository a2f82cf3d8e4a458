//! Hermitian operators on the mixed basis and their band projections.
//!
//! On a [`MixedBasis`] every operator here is block tridiagonal in the x-major
//! layout: the diagonal block at grid node `x_j` is
//! `diag(1/h² + ½(k - Bx_j)² + U(x_j)) + V̂(x_j)`, where `V̂(x_j)` is the dense
//! matrix of y-Fourier coefficients of the disorder, and neighbouring nodes couple
//! through `-1/(2h²)·I`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::basis::{BandBasis, MixedBasis};
use crate::linalg::CMatrix;
use crate::model::{DisorderRealization, ModelParams, Side, BUMP_RADIUS};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Label {
    H0,
    Hb,
    Hl,
    Hr,
    Hfull,
    Vy,
    Other,
}

/// Block-tridiagonal storage on a mixed basis.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    pub basis: MixedBasis,
    /// Real diagonal, one entry per basis index.
    pub diag: Vec<f64>,
    /// Coupling between nodes `j` and `j + 1` within a sector.
    pub coupling: f64,
    /// Dense Hermitian disorder block per grid node (row-major `nk × nk`).
    pub vblocks: Vec<Option<Vec<C64>>>,
}

#[derive(Clone, Debug)]
pub enum Storage {
    Block(BlockOperator),
    Dense(CMatrix),
}

#[derive(Clone, Debug)]
pub struct HermitianOperator {
    pub label: Label,
    pub fingerprint: u64,
    pub storage: Storage,
}

impl HermitianOperator {
    pub fn dim(&self) -> usize {
        match &self.storage {
            Storage::Block(b) => b.basis.dim(),
            Storage::Dense(m) => m.n,
        }
    }

    pub fn as_block(&self) -> Option<&BlockOperator> {
        match &self.storage {
            Storage::Block(b) => Some(b),
            Storage::Dense(_) => None,
        }
    }

    pub fn basis(&self) -> Option<&MixedBasis> {
        self.as_block().map(|b| &b.basis)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        match &self.storage {
            Storage::Dense(m) => m.matvec(x),
            Storage::Block(b) => b.matvec(x),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match &self.storage {
            Storage::Dense(m) => m.get(i, j),
            Storage::Block(b) => b.entry(i, j),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Block(b) => b.to_dense(),
        }
    }

    /// Exact check `A_ij == conj(A_ji)` over every stored entry.
    pub fn is_conj_symmetric(&self) -> bool {
        match &self.storage {
            Storage::Dense(m) => {
                (0..m.n).all(|i| (0..m.n).all(|j| m.get(i, j) == m.get(j, i).conj()))
            }
            Storage::Block(b) => {
                let nk = b.basis.nk();
                b.vblocks.iter().flatten().all(|blk| {
                    (0..nk).all(|a| (0..nk).all(|c| blk[a * nk + c] == blk[c * nk + a].conj()))
                })
            }
        }
    }

    /// Upper bound on the spectral norm (largest absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.inf_norm(),
            Storage::Block(b) => b.norm_bound(),
        }
    }

    /// Adds `c·I`.
    pub fn add_constant(&mut self, c: f64) {
        match &mut self.storage {
            Storage::Dense(m) => {
                for i in 0..m.n {
                    m.data[i * m.n + i] += c;
                }
            }
            Storage::Block(b) => b.diag.iter_mut().for_each(|d| *d += c),
        }
    }

    /// Dimension header (u64 LE) followed by the row-major upper triangle as
    /// `(re, im)` f64 LE pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.dim();
        w.write_all(&(n as u64).to_le_bytes())?;
        for i in 0..n {
            for j in i..n {
                let v = self.entry(i, j);
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

impl BlockOperator {
    pub fn nk(&self) -> usize {
        self.basis.nk()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let nk = self.nk();
        let nx = self.basis.nx;
        let c = self.coupling;
        let mut y = vec![C64::new(0.0, 0.0); x.len()];
        y.par_chunks_mut(nk).enumerate().for_each(|(j, yj)| {
            let xj = &x[j * nk..(j + 1) * nk];
            for i in 0..nk {
                yj[i] = self.diag[j * nk + i] * xj[i];
            }
            if c != 0.0 {
                if j > 0 {
                    for i in 0..nk {
                        yj[i] += c * x[(j - 1) * nk + i];
                    }
                }
                if j + 1 < nx {
                    for i in 0..nk {
                        yj[i] += c * x[(j + 1) * nk + i];
                    }
                }
            }
            if let Some(blk) = &self.vblocks[j] {
                for a in 0..nk {
                    yj[a] += crate::linalg::dotu(&blk[a * nk..(a + 1) * nk], xj);
                }
            }
        });
        y
    }

    pub fn entry(&self, p: usize, q: usize) -> C64 {
        let nk = self.nk();
        let (j1, a) = (p / nk, p % nk);
        let (j2, b) = (q / nk, q % nk);
        let mut v = C64::new(0.0, 0.0);
        if j1 == j2 {
            if a == b {
                v += self.diag[p];
            }
            if let Some(blk) = &self.vblocks[j1] {
                v += blk[a * nk + b];
            }
        } else if a == b && (j1 as i64 - j2 as i64).abs() == 1 {
            v += self.coupling;
        }
        v
    }

    /// Diagonal block at node `j` as a dense matrix.
    pub fn diagonal_block(&self, j: usize) -> CMatrix {
        let nk = self.nk();
        let mut m = match &self.vblocks[j] {
            Some(blk) => CMatrix { n: nk, data: blk.clone() },
            None => CMatrix::zeros(nk),
        };
        for i in 0..nk {
            m.data[i * nk + i] += self.diag[j * nk + i];
        }
        m
    }

    pub fn to_dense(&self) -> CMatrix {
        let n = self.basis.dim();
        let nk = self.nk();
        let mut m = CMatrix::zeros(n);
        for j in 0..self.basis.nx {
            let blk = self.diagonal_block(j);
            for a in 0..nk {
                for b in 0..nk {
                    m.set(j * nk + a, j * nk + b, blk.get(a, b));
                }
                if j + 1 < self.basis.nx {
                    m.set(j * nk + a, (j + 1) * nk + a, C64::new(self.coupling, 0.0));
                    m.set((j + 1) * nk + a, j * nk + a, C64::new(self.coupling, 0.0));
                }
            }
        }
        m
    }

    pub fn norm_bound(&self) -> f64 {
        let nk = self.nk();
        let mut best = 0.0f64;
        for j in 0..self.basis.nx {
            for a in 0..nk {
                let mut s = self.diag[j * nk + a].abs() + 2.0 * self.coupling.abs();
                if let Some(blk) = &self.vblocks[j] {
                    s += blk[a * nk..(a + 1) * nk].iter().map(|v| v.norm()).sum::<f64>();
                }
                best = best.max(s);
            }
        }
        best
    }

    /// The tridiagonal x-problem of one sector, ignoring disorder.
    pub fn sector_tridiag(&self, ik: usize) -> crate::linalg::tridiag::SymTridiag {
        let nk = self.nk();
        let nx = self.basis.nx;
        crate::linalg::tridiag::SymTridiag {
            diag: (0..nx).map(|j| self.diag[j * nk + ik]).collect(),
            off: vec![self.coupling; nx - 1],
        }
    }
}

/// Which non-kinetic terms enter an assembled Hamiltonian.
#[derive(Clone, Copy, Debug)]
pub struct Terms<'a> {
    pub disorder: Option<&'a DisorderRealization>,
    pub left_wall: bool,
    pub right_wall: bool,
}

fn kinetic_diag(basis: &MixedBasis, params: Option<&ModelParams>, terms: &Terms) -> Vec<f64> {
    let nk = basis.nk();
    let h2 = basis.hx * basis.hx;
    let ks = basis.ks();
    let mut diag = vec![0.0; basis.dim()];
    for j in 0..basis.nx {
        let x = basis.x(j);
        let mut u = 0.0;
        if let Some(p) = params {
            if terms.left_wall {
                u += p.wall(Side::Left).eval(x);
            }
            if terms.right_wall {
                u += p.wall(Side::Right).eval(x);
            }
        }
        for (i, &k) in ks.iter().enumerate() {
            let v = k - basis.b * x;
            diag[j * nk + i] = 1.0 / h2 + 0.5 * v * v + u;
        }
    }
    diag
}

/// Nodes and weights of 16-point Gauss–Legendre on `[-1, 1]` (positive half).
const GL16: [(f64, f64); 8] = [
    (0.095_012_509_837_637_44, 0.189_450_610_455_068_5),
    (0.281_603_550_779_258_9, 0.182_603_415_044_923_6),
    (0.458_016_777_657_227_4, 0.169_156_519_395_002_5),
    (0.617_876_244_402_643_7, 0.149_595_988_816_576_7),
    (0.755_404_408_355_003, 0.124_628_971_255_533_9),
    (0.865_631_202_387_831_7, 0.095_158_511_682_492_78),
    (0.944_575_023_073_232_6, 0.062_253_523_938_647_89),
    (0.989_400_934_991_649_9, 0.027_152_459_411_754_09),
];

/// `(1/L)∫ V0(1 - 16(u² + t²))³ cos(qt) dt` over the chord of the bump at offset `u`.
pub fn bump_fourier(v0: f64, l: f64, u: f64, q: f64) -> f64 {
    let r2 = BUMP_RADIUS * BUMP_RADIUS - u * u;
    if r2 <= 0.0 {
        return 0.0;
    }
    let r = r2.sqrt();
    let mut s = 0.0;
    for &(x, w) in &GL16 {
        let t = r * x;
        let g = 1.0 - 16.0 * (u * u + t * t);
        s += w * g * g * g * (q * t).cos();
    }
    // Even integrand: both halves contribute equally.
    2.0 * v0 * r * s / l
}

fn disorder_blocks(basis: &MixedBasis, real: &DisorderRealization) -> Vec<Option<Vec<C64>>> {
    let nk = basis.nk();
    let l = basis.l;
    (0..basis.nx)
        .into_par_iter()
        .map(|j| {
            let x = basis.x(j);
            let n = x.round();
            let ni = n as i64;
            let u = x - n;
            if ni < real.n_range.0 || ni > real.n_range.1 || u.abs() >= BUMP_RADIUS {
                return None;
            }
            // Column-resolved phase sums S(Δ) = Σ_m X_nm e^{-i q_Δ m}.
            let mut coef = vec![C64::new(0.0, 0.0); nk];
            for (d, c) in coef.iter_mut().enumerate() {
                let q = 2.0 * PI * d as f64 / l;
                let g = bump_fourier(real.bump.amplitude, l, u, q);
                let mut s = C64::new(0.0, 0.0);
                for m in real.m_range.0..=real.m_range.1 {
                    let xnm = real.coupling(ni, m);
                    s += xnm * C64::from_polar(1.0, -q * m as f64);
                }
                *c = s * g;
            }
            let mut blk = vec![C64::new(0.0, 0.0); nk * nk];
            for a in 0..nk {
                for b in 0..=a {
                    let v = coef[a - b];
                    blk[a * nk + b] = v;
                    blk[b * nk + a] = v.conj();
                }
                blk[a * nk + a] = C64::new(coef[0].re, 0.0);
            }
            Some(blk)
        })
        .collect()
}

fn check_resolution(basis: &MixedBasis) -> Result<()> {
    if BUMP_RADIUS < 2.0 * basis.hx {
        return Err(Error::UnresolvedBump { hx: basis.hx });
    }
    Ok(())
}

/// Assembles `½p_x² + ½(k - Bx)²` plus the selected terms.
pub fn assemble(
    basis: &MixedBasis,
    params: Option<&ModelParams>,
    terms: Terms,
    label: Label,
) -> Result<HermitianOperator> {
    if let Some(p) = params {
        if p.l != basis.l || p.b != basis.b {
            return Err(Error::BasisMismatch("parameters and basis disagree on L or B".into()));
        }
    }
    let diag = kinetic_diag(basis, params, &terms);
    let vblocks = match terms.disorder {
        Some(real) => {
            if real.l != basis.l {
                return Err(Error::BasisMismatch(format!(
                    "realization L = {} but basis L = {}",
                    real.l, basis.l
                )));
            }
            check_resolution(basis)?;
            disorder_blocks(basis, real)
        }
        None => vec![None; basis.nx],
    };
    Ok(HermitianOperator {
        label,
        fingerprint: basis.fingerprint(),
        storage: Storage::Block(BlockOperator {
            basis: basis.clone(),
            diag,
            coupling: -0.5 / (basis.hx * basis.hx),
            vblocks,
        }),
    })
}

pub fn assemble_h0(basis: &MixedBasis) -> HermitianOperator {
    let terms = Terms { disorder: None, left_wall: false, right_wall: false };
    assemble(basis, None, terms, Label::H0).expect("free assembly cannot fail")
}

pub fn assemble_edge(basis: &MixedBasis, params: &ModelParams, side: Side) -> Result<HermitianOperator> {
    let terms = Terms {
        disorder: None,
        left_wall: side == Side::Left,
        right_wall: side == Side::Right,
    };
    let label = match side {
        Side::Left => Label::Hl,
        Side::Right => Label::Hr,
    };
    assemble(basis, Some(params), terms, label)
}

pub fn assemble_bulk(basis: &MixedBasis, params: &ModelParams, real: &DisorderRealization) -> Result<HermitianOperator> {
    let terms = Terms { disorder: Some(real), left_wall: false, right_wall: false };
    assemble(basis, Some(params), terms, Label::Hb)
}

pub fn assemble_full(basis: &MixedBasis, params: &ModelParams, real: &DisorderRealization) -> Result<HermitianOperator> {
    let terms = Terms { disorder: Some(real), left_wall: true, right_wall: true };
    assemble(basis, Some(params), terms, Label::Hfull)
}

/// `v_y = p_y - Bx`: diagonal with entries `k - Bx_j`.
pub fn assemble_vy(basis: &MixedBasis) -> HermitianOperator {
    let nk = basis.nk();
    let ks = basis.ks();
    let mut diag = vec![0.0; basis.dim()];
    for j in 0..basis.nx {
        let x = basis.x(j);
        for (i, &k) in ks.iter().enumerate() {
            diag[j * nk + i] = k - basis.b * x;
        }
    }
    HermitianOperator {
        label: Label::Vy,
        fingerprint: basis.fingerprint(),
        storage: Storage::Block(BlockOperator {
            basis: basis.clone(),
            diag,
            coupling: 0.0,
            vblocks: vec![None; basis.nx],
        }),
    }
}

pub fn band_fingerprint(band: &BandBasis) -> u64 {
    let mut h = band.parent_fingerprint ^ 0x9E37_79B9_7F4A_7C15;
    for &n in &band.k_index {
        h = (h ^ n as u64).wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Compression `⟨φ_a| op |φ_b⟩` onto the band orbitals.
pub fn project_to_band(op: &HermitianOperator, band: &BandBasis) -> Result<HermitianOperator> {
    let blk = op
        .as_block()
        .ok_or_else(|| Error::BasisMismatch("band projection needs a mixed-basis operator".into()))?;
    if blk.basis.fingerprint() != band.parent_fingerprint {
        return Err(Error::BasisMismatch("band basis built on a different mixed basis".into()));
    }
    let nk = blk.nk();
    let nx = blk.basis.nx;
    let nb = band.len();
    let mut m = CMatrix::zeros(nb);
    for a in 0..nb {
        let (ia, pa) = (band.sectors[a], &band.orbitals[a]);
        let mut s = 0.0;
        for j in 0..nx {
            let mut t = blk.diag[j * nk + ia] * pa[j];
            if j > 0 {
                t += blk.coupling * pa[j - 1];
            }
            if j + 1 < nx {
                t += blk.coupling * pa[j + 1];
            }
            s += pa[j] * t;
        }
        m.data[a * nb + a] += s;
    }
    for (j, vb) in blk.vblocks.iter().enumerate() {
        let Some(vb) = vb else { continue };
        for a in 0..nb {
            let (ia, pa) = (band.sectors[a], band.orbitals[a][j]);
            if pa == 0.0 {
                continue;
            }
            for b in 0..nb {
                let ib = band.sectors[b];
                m.data[a * nb + b] += pa * band.orbitals[b][j] * vb[ia * nk + ib];
            }
        }
    }
    m.hermitize();
    Ok(HermitianOperator { label: op.label, fingerprint: band_fingerprint(band), storage: Storage::Dense(m) })
}
