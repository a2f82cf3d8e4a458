//! Fibered edge Hamiltonians `H_α(k) = ½p_x² + ½(k − Bx)² + U_α(x)` on the
//! x-grid of a mixed basis, their lowest spectral branch and its currents.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::MixedBasis;
use crate::linalg::tridiag::SymTridiag;
use crate::model::{ModelParams, Side};
use crate::{Error, Result};

/// Step in continuous `k` for the Feynman–Hellman derivative.
pub const FH_STEP: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct BranchPoint {
    pub n: i64,
    pub k: f64,
    pub e: f64,
    /// `Σ_j φ_j²(k − Bx_j)`.
    pub j_integral: f64,
    /// `(ε(k + δ) − ε(k − δ))/2δ`.
    pub j_derivative: f64,
    #[serde(skip)]
    pub vector: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralBranch {
    pub side: Side,
    pub band: u32,
    pub l: f64,
    pub window: (f64, f64),
    /// Sorted by `k`.
    pub points: Vec<BranchPoint>,
    /// Smallest `|J|` over points with energy in the window; `None` when there are none.
    pub j_epsilon: Option<f64>,
}

impl SpectralBranch {
    pub fn in_window(&self) -> impl Iterator<Item = &BranchPoint> + '_ {
        let (a, b) = self.window;
        self.points.iter().filter(move |p| p.e >= a && p.e <= b)
    }

    pub fn window_count(&self) -> usize {
        self.in_window().count()
    }

    /// Largest `|J_integral − J_derivative|` over the branch.
    pub fn fh_discrepancy(&self) -> f64 {
        self.points.iter().map(|p| (p.j_integral - p.j_derivative).abs()).fold(0.0, f64::max)
    }

    /// Strict monotonicity of `ε(k)` inside the window, increasing on the
    /// right and decreasing on the left.
    pub fn is_monotone_in_window(&self) -> bool {
        let es: Vec<f64> = self.in_window().map(|p| p.e).collect();
        es.windows(2).all(|w| match self.side {
            Side::Right => w[1] > w[0],
            Side::Left => w[1] < w[0],
        })
    }

    /// Point with energy closest to `e`.
    pub fn nearest(&self, e: f64) -> Option<&BranchPoint> {
        self.points.iter().min_by(|a, b| (a.e - e).abs().total_cmp(&(b.e - e).abs()))
    }
}

/// The x-problem of `H_α(k)` for continuous `k`.
pub fn fiber_matrix(params: &ModelParams, basis: &MixedBasis, side: Side, k: f64) -> SymTridiag {
    let wall = params.wall(side);
    let h2 = basis.hx * basis.hx;
    let diag = (0..basis.nx)
        .map(|j| {
            let x = basis.x(j);
            let v = k - basis.b * x;
            1.0 / h2 + 0.5 * v * v + wall.eval(x)
        })
        .collect();
    SymTridiag { diag, off: vec![-0.5 / h2; basis.nx - 1] }
}

fn lowest_checked(t: &SymTridiag, n: i64) -> Result<(f64, Vec<f64>)> {
    let (e, v) = t.lowest();
    let tv = t.matvec(&v);
    let res = tv.iter().zip(&v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
    let (lo, hi) = t.gershgorin();
    if !res.is_finite() || res > 1e-9 * (hi - lo).abs().max(1.0) {
        return Err(Error::NoConvergence { index: n as usize });
    }
    Ok((e, v))
}

fn branch_point(params: &ModelParams, basis: &MixedBasis, side: Side, n: i64) -> Result<BranchPoint> {
    let k = 2.0 * PI * n as f64 / basis.l;
    let (e, v) = lowest_checked(&fiber_matrix(params, basis, side, k), n)?;
    let j_integral = v.iter().enumerate().map(|(j, p)| p * p * (k - basis.b * basis.x(j))).sum();
    let ep = fiber_matrix(params, basis, side, k + FH_STEP).eigenvalue(0);
    let em = fiber_matrix(params, basis, side, k - FH_STEP).eigenvalue(0);
    Ok(BranchPoint { n, k, e, j_integral, j_derivative: (ep - em) / (2.0 * FH_STEP), vector: v })
}

/// Momentum indices of the default branch: `n ≥ 0` on the right, `n ≤ 0` on the left.
pub fn default_indices(basis: &MixedBasis, side: Side) -> Vec<i64> {
    basis
        .k_index
        .iter()
        .copied()
        .filter(|&n| match side {
            Side::Right => n >= 0,
            Side::Left => n <= 0,
        })
        .collect()
}

/// Lowest eigenpair of `H_α(2πn/L)` for each `n`, with both current formulas.
pub fn edge_branch(
    params: &ModelParams,
    basis: &MixedBasis,
    side: Side,
    indices: &[i64],
) -> Result<SpectralBranch> {
    if params.l != basis.l || params.b != basis.b {
        return Err(Error::BasisMismatch("parameters and basis disagree on L or B".into()));
    }
    let mut ns = indices.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let points = ns
        .par_iter()
        .map(|&n| branch_point(params, basis, side, n))
        .collect::<Result<Vec<_>>>()?;
    let window = params.window();
    let mut branch = SpectralBranch { side, band: 0, l: params.l, window, points, j_epsilon: None };
    branch.j_epsilon = branch.in_window().map(|p| p.j_integral.abs()).reduce(f64::min);
    Ok(branch)
}

pub fn default_branch(params: &ModelParams, basis: &MixedBasis, side: Side) -> Result<SpectralBranch> {
    edge_branch(params, basis, side, &default_indices(basis, side))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpacingReport {
    pub count: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// `j_epsilon/L`.
    pub threshold: Option<f64>,
    pub pass: bool,
}

/// Spacing between each branch level in `window` and the next level above it.
pub fn branch_spacing(branch: &SpectralBranch, window: (f64, f64)) -> Result<SpacingReport> {
    let (a, b) = window;
    let mut es: Vec<f64> = branch.points.iter().map(|p| p.e).collect();
    es.sort_by(f64::total_cmp);
    let count = es.iter().filter(|&&e| e >= a && e <= b).count();
    if es.len() < 2 {
        return Ok(SpacingReport { count, min: None, max: None, threshold: None, pass: true });
    }
    if es[0] > a || es[es.len() - 1] <= b {
        return Err(Error::WindowNotCovered { a, b });
    }
    let gaps: Vec<f64> = es.windows(2).filter(|w| w[0] >= a && w[0] <= b).map(|w| w[1] - w[0]).collect();
    let min = gaps.iter().copied().reduce(f64::min);
    let max = gaps.iter().copied().reduce(f64::max);
    let threshold = branch.j_epsilon.map(|j| j / branch.l);
    let pass = match (min, threshold) {
        (Some(m), Some(t)) => m > t,
        _ => true,
    };
    Ok(SpacingReport { count, min, max, threshold, pass })
}

/// Geometric mean of the two gaps around the branch level closest to `e`.
pub fn typical_spacing(branch: &SpectralBranch, e: f64) -> Option<f64> {
    let mut es: Vec<f64> = branch.points.iter().map(|p| p.e).collect();
    es.sort_by(f64::total_cmp);
    let i = (0..es.len()).min_by(|&i, &j| (es[i] - e).abs().total_cmp(&(es[j] - e).abs()))?;
    if i == 0 || i + 1 >= es.len() {
        return None;
    }
    Some(((es[i] - es[i - 1]) * (es[i + 1] - es[i])).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct H1Report {
    /// `L·min |E^ℓ − E^r|` over window pairs; `None` when either side has no window level.
    pub d_epsilon: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

/// Separation of the left and right edge spectra inside `window`.
pub fn check_h1(left: &SpectralBranch, right: &SpectralBranch, window: (f64, f64), threshold: f64) -> H1Report {
    let (a, b) = window;
    let inside = |br: &SpectralBranch| -> Vec<f64> {
        br.points.iter().map(|p| p.e).filter(|&e| e >= a && e <= b).collect()
    };
    let (el, er) = (inside(left), inside(right));
    let mut d: Option<f64> = None;
    for x in &el {
        for y in &er {
            let v = (x - y).abs() * left.l;
            d = Some(d.map_or(v, |c| c.min(v)));
        }
    }
    let pass = d.map_or(true, |d| d > threshold);
    H1Report { d_epsilon: d, threshold, pass }
}
