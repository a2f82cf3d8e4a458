//! Mixed Fourier(y) × finite-difference(x) basis and the reduced lowest-band basis.

use std::f64::consts::PI;

use crate::model::ModelParams;
use crate::{Error, Result};

pub const DEFAULT_DIMENSION_CAP: usize = 40_000;

/// Basis vector `(j, i)` is `δ(x - x_j)·e^{i k_i y}/√L`; the wave function
/// vanishes outside the `Nx` grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedBasis {
    pub l: f64,
    pub b: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub hx: f64,
    pub resolution: usize,
    /// Integers `n` with `k = 2πn/L`, ascending.
    pub k_index: Vec<i64>,
}

impl MixedBasis {
    pub fn nk(&self) -> usize {
        self.k_index.len()
    }

    pub fn dim(&self) -> usize {
        self.nx * self.nk()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.hx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|j| self.x(j)).collect()
    }

    pub fn k(&self, i: usize) -> f64 {
        2.0 * PI * self.k_index[i] as f64 / self.l
    }

    pub fn ks(&self) -> Vec<f64> {
        (0..self.nk()).map(|i| self.k(i)).collect()
    }

    pub fn index(&self, j: usize, ik: usize) -> usize {
        j * self.nk() + ik
    }

    /// Position of the integer momentum label `n`, if present.
    pub fn sector_of(&self, n: i64) -> Option<usize> {
        self.k_index.binary_search(&n).ok()
    }

    /// Order-sensitive hash identifying the grid and momentum set.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            for byte in v.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.l.to_bits());
        eat(self.b.to_bits());
        eat(self.x_min.to_bits());
        eat(self.hx.to_bits());
        eat(self.nx as u64);
        for &n in &self.k_index {
            eat(n as u64);
        }
        h
    }

    /// Keeps only the sectors whose guiding centre `k/B` lies in `[lo, hi]`.
    pub fn restrict_centers(&self, lo: f64, hi: f64) -> MixedBasis {
        let mut out = self.clone();
        out.k_index.retain(|&n| {
            let c = 2.0 * PI * n as f64 / (self.l * self.b);
            c >= lo && c <= hi
        });
        out
    }
}

pub fn build_mixed_basis(params: &ModelParams, resolution: usize) -> Result<MixedBasis> {
    build_mixed_basis_capped(params, resolution, DEFAULT_DIMENSION_CAP)
}

pub fn build_mixed_basis_capped(
    params: &ModelParams,
    resolution: usize,
    cap: usize,
) -> Result<MixedBasis> {
    params.validate()?;
    if resolution < 8 {
        return Err(Error::InvalidParams(format!("resolution must be ≥ 8, got {resolution}")));
    }
    let ell = params.magnetic_length();
    let x_min = -0.5 * params.l - params.w;
    let x_max = 0.5 * params.l + params.w;
    let cells = resolution * ((x_max - x_min) / ell).ceil() as usize;
    let hx = (x_max - x_min) / cells as f64;
    let scale = params.b * params.l / (2.0 * PI);
    let n_lo = ((x_min - 3.0 * ell) * scale).ceil() as i64;
    let n_hi = ((x_max + 3.0 * ell) * scale).floor() as i64;
    let basis = MixedBasis {
        l: params.l,
        b: params.b,
        x_min,
        x_max,
        nx: cells + 1,
        hx,
        resolution,
        k_index: (n_lo..=n_hi).collect(),
    };
    if basis.dim() > cap {
        return Err(Error::DimensionCap { dim: basis.dim(), cap });
    }
    Ok(basis)
}

/// Sectors whose guiding centres stay three magnetic lengths away from the
/// Dirichlet walls; used for the bulk operator, which has no confinement.
pub fn bulk_basis(params: &ModelParams, mixed: &MixedBasis) -> MixedBasis {
    let ell = params.magnetic_length();
    mixed.restrict_centers(mixed.x_min + 3.0 * ell, mixed.x_max - 3.0 * ell)
}

/// Lowest-Landau orbitals `∝ exp(-B(x - k/B)²/2)` sampled on the grid, one per
/// retained momentum sector.
#[derive(Clone, Debug, PartialEq)]
pub struct BandBasis {
    /// Sector positions in the parent mixed basis.
    pub sectors: Vec<usize>,
    pub k_index: Vec<i64>,
    /// Orbital samples with unit discrete norm `Σ_j φ_j² = 1`.
    pub orbitals: Vec<Vec<f64>>,
    pub parent_fingerprint: u64,
}

impl BandBasis {
    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    /// Guiding centres of the orbitals.
    pub fn centers(&self, mixed: &MixedBasis) -> Vec<f64> {
        self.sectors.iter().map(|&i| mixed.k(i) / mixed.b).collect()
    }

    /// Embeds band coefficients into a mixed-basis vector.
    pub fn embed(&self, mixed: &MixedBasis, coeffs: &[crate::C64]) -> Vec<crate::C64> {
        let mut out = vec![crate::C64::new(0.0, 0.0); mixed.dim()];
        for (a, (&ik, phi)) in self.sectors.iter().zip(&self.orbitals).enumerate() {
            for (j, &p) in phi.iter().enumerate() {
                out[mixed.index(j, ik)] += coeffs[a] * p;
            }
        }
        out
    }
}

/// Orbitals with centres in `[-L/2 - 3ℓ, L/2 + 3ℓ]`, clipped to stay `3ℓ`
/// inside the Dirichlet walls.
pub fn build_band_basis(params: &ModelParams, mixed: &MixedBasis) -> BandBasis {
    let ell = params.magnetic_length();
    let lo = (-0.5 * params.l - 3.0 * ell).max(mixed.x_min + 3.0 * ell);
    let hi = (0.5 * params.l + 3.0 * ell).min(mixed.x_max - 3.0 * ell);
    let xs = mixed.xs();
    let mut sectors = Vec::new();
    let mut k_index = Vec::new();
    let mut orbitals = Vec::new();
    for ik in 0..mixed.nk() {
        let c = mixed.k(ik) / mixed.b;
        if c < lo || c > hi {
            continue;
        }
        let mut phi: Vec<f64> =
            xs.iter().map(|&x| (-0.5 * mixed.b * (x - c) * (x - c)).exp()).collect();
        let norm = phi.iter().map(|v| v * v).sum::<f64>().sqrt();
        phi.iter_mut().for_each(|v| *v /= norm);
        sectors.push(ik);
        k_index.push(mixed.k_index[ik]);
        orbitals.push(phi);
    }
    BandBasis { sectors, k_index, orbitals, parent_fingerprint: mixed.fingerprint() }
}
