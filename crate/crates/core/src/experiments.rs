//! Ensemble campaigns: Wegner frequencies, the edge/bulk classification over
//! seeds and sizes, the Hall current and the H1/H2 diagnostics.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{build_band_basis, build_mixed_basis_capped, bulk_basis, MixedBasis};
use crate::classify::{
    classify_window, decay_profile, line_fit, ClassifiedSpectrum, ClassifyPolicy, StateLabel,
};
use crate::edge::{check_h1, default_branch, H1Report, SpectralBranch};
use crate::eigensolve::{dense_pairs, eig_window_with, EigenPair, WindowOptions};
use crate::model::{realization_seed, sample_disorder, DisorderRealization, ModelParams, Side, COUPLING_DENSITY_SUP};
use crate::operators::{assemble_bulk, assemble_full, assemble_vy, project_to_band};
use crate::specfun::kernel::wegner_constant;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    pub resolution: usize,
    pub tol: f64,
    pub dimension_cap: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { resolution: 8, tol: 1e-9, dimension_cap: crate::basis::DEFAULT_DIMENSION_CAP }
    }
}

impl SolverSettings {
    pub fn window_options(&self) -> WindowOptions {
        WindowOptions { tol: self.tol, ..Default::default() }
    }
}

/// Copy of `params` at length `l`, with the layer raised to `ln l` if needed.
pub fn at_length(params: &ModelParams, l: f64) -> ModelParams {
    let mut p = params.clone();
    p.l = l;
    p.layer = p.layer.max(l.ln());
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Wilson {
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Wilson score interval at 95%.
pub fn wilson(successes: usize, n: usize) -> Wilson {
    if n == 0 {
        return Wilson { p: 0.0, lo: 0.0, hi: 1.0 };
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let p = successes as f64 / nf;
    let den = 1.0 + z * z / nf;
    let centre = (p + z * z / (2.0 * nf)) / den;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / den;
    Wilson { p, lo: (centre - half).clamp(0.0, p), hi: (centre + half).clamp(p, 1.0) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Least-squares fit of `ln y = ln c + s·ln x` over the points with `x, y > 0`.
pub fn power_fit(xs: &[f64], ys: &[f64]) -> Option<PowerFit> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let (s, c, _) = line_fit(&pts)?;
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sse: f64 = pts.iter().map(|p| (p.1 - s * p.0 - c).powi(2)).sum();
    let stderr = if pts.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    Some(PowerFit { exponent: s, prefactor: c.exp(), stderr, points: pts.len() })
}

pub fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[m] } else { 0.5 * (s[m - 1] + s[m]) })
}

// ---------------------------------------------------------------------------
// Wegner

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WegnerMode {
    /// Compression of `H_b` onto the lowest-band orbitals.
    Fast,
    /// Window solve of `H_b` on the bulk mixed basis.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WegnerPoint {
    pub delta: f64,
    pub hits: usize,
    pub frequency: Wilson,
    /// `4c(B)‖h‖_∞ δ ε⁻² V0 L⁴`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WegnerReport {
    pub energy: f64,
    pub mode: WegnerMode,
    pub seeds: Vec<u64>,
    /// `dist(σ(H_b), E)` per seed.
    pub distances: Vec<f64>,
    pub points: Vec<WegnerPoint>,
    pub nondecreasing: bool,
    pub below_bound: bool,
    /// Fit over the smallest deltas with a nonzero frequency.
    pub small_delta_fit: Option<PowerFit>,
}

/// `dist(σ(H_b), E)` for one realization.
pub fn bulk_distance(
    params: &ModelParams,
    basis: &MixedBasis,
    real: &DisorderRealization,
    energy: f64,
    mode: WegnerMode,
    settings: &SolverSettings,
    reach: f64,
) -> Result<f64> {
    match mode {
        WegnerMode::Fast => {
            let band = build_band_basis(params, basis);
            let hb = assemble_bulk(basis, params, real)?;
            let proj = project_to_band(&hb, &band)?;
            let crate::operators::Storage::Dense(m) = &proj.storage else { unreachable!() };
            let es = dense_pairs(m)?;
            Ok(es.iter().map(|(e, _)| (e - energy).abs()).fold(f64::INFINITY, f64::min))
        }
        WegnerMode::Full => {
            let bb = bulk_basis(params, basis);
            let hb = assemble_bulk(&bb, params, real)?;
            let w = eig_window_with(&hb, energy - reach, energy + reach, settings.window_options())?;
            Ok(w.pairs.iter().map(|p| (p.e - energy).abs()).fold(reach, f64::min))
        }
    }
}

pub fn run_wegner(
    params: &ModelParams,
    energy: f64,
    deltas: &[f64],
    seeds: &[u64],
    mode: WegnerMode,
    settings: &SolverSettings,
) -> Result<WegnerReport> {
    params.validate()?;
    let (a, b) = params.window();
    if !(energy >= a && energy <= b) {
        return Err(Error::Precondition(format!("E ∈ [B/2 + ε, B/2 + V0] violated (E = {energy})")));
    }
    if deltas.iter().any(|d| !(*d >= 0.0)) {
        return Err(Error::Precondition("deltas must be nonnegative".into()));
    }
    let basis = build_mixed_basis_capped(params, settings.resolution, settings.dimension_cap)?;
    let reach = deltas.iter().copied().fold(0.0, f64::max) * 1.01 + 1e-12;
    let distances = seeds
        .par_iter()
        .map(|&s| {
            let real = sample_disorder(params, realization_seed(params.seed_base, s))?;
            bulk_distance(params, &basis, &real, energy, mode, settings, reach)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = seeds.len();
    let scale = 4.0 * wegner_constant(params.b) * COUPLING_DENSITY_SUP * params.v0 * params.l.powi(4)
        / params.epsilon.powi(2);
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let points: Vec<WegnerPoint> = sorted
        .iter()
        .map(|&d| {
            let hits = distances.iter().filter(|&&x| x < d).count();
            WegnerPoint { delta: d, hits, frequency: wilson(hits, n), bound: scale * d }
        })
        .collect();
    let nondecreasing = points.windows(2).all(|w| w[1].hits >= w[0].hits);
    let below_bound = points.iter().all(|p| p.frequency.p <= p.bound);
    // Small-delta regime: nonzero frequencies up to one half.
    let small: Vec<&WegnerPoint> = points.iter().filter(|p| p.hits > 0 && p.frequency.p <= 0.5).collect();
    let small_delta_fit = if small.len() >= 3 {
        power_fit(&small.iter().map(|p| p.delta).collect::<Vec<_>>(), &small.iter().map(|p| p.frequency.p).collect::<Vec<_>>())
    } else {
        None
    };
    Ok(WegnerReport {
        energy,
        mode,
        seeds: seeds.to_vec(),
        distances,
        points,
        nondecreasing,
        below_bound,
        small_delta_fit,
    })
}

// ---------------------------------------------------------------------------
// Classification of one realization

/// Everything computed for one realization at one size.
pub struct SeedSystem {
    pub params: ModelParams,
    pub basis: MixedBasis,
    pub left: SpectralBranch,
    pub right: SpectralBranch,
    pub classified: ClassifiedSpectrum,
    pub pairs: Vec<EigenPair>,
}

/// Solves the full operator on the window and classifies its spectrum.
/// `seed = None` gives the disorder-free system.
pub fn classify_seed(
    params: &ModelParams,
    seed: Option<u64>,
    settings: &SolverSettings,
    policy: &ClassifyPolicy,
) -> Result<SeedSystem> {
    let basis = build_mixed_basis_capped(params, settings.resolution, settings.dimension_cap)?;
    let real = match seed {
        Some(s) => sample_disorder(params, realization_seed(params.seed_base, s))?,
        None => DisorderRealization::uniform(params, 0.0)?,
    };
    let h = assemble_full(&basis, params, &real)?;
    let (a, b) = params.window();
    let w = eig_window_with(&h, a, b, settings.window_options())?;
    let vy = assemble_vy(&basis);
    let left = default_branch(params, &basis, Side::Left)?;
    let right = default_branch(params, &basis, Side::Right)?;
    let classified = classify_window(&w, &vy, &left, &right, policy)?;
    Ok(SeedSystem { params: params.clone(), basis, left, right, classified, pairs: w.pairs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedOutcome {
    pub l: f64,
    pub seed: u64,
    pub left: usize,
    pub bulk: usize,
    pub right: usize,
    pub ambiguous: usize,
    pub branch_left: usize,
    pub branch_right: usize,
    pub min_edge_abs_j: Option<f64>,
    pub max_bulk_abs_j: Option<f64>,
    pub separation_ratio: Option<f64>,
    pub median_shift: Option<f64>,
    /// Median `|J − J_0k|` over edge labels.
    pub median_current_deviation: Option<f64>,
    /// `dist(Σ_b, Σ_ℓ ∪ Σ_r)`; `None` when a set is empty.
    pub set_distance: Option<f64>,
    pub success: bool,
}

fn outcome(sys: &SeedSystem, seed: u64, p_exp: f64) -> SeedOutcome {
    let c = &sys.classified;
    let edges: Vec<_> = c.entries.iter().filter(|e| e.label.is_edge()).collect();
    let shifts: Vec<f64> = edges.iter().filter_map(|e| e.shift).collect();
    let devs: Vec<f64> = edges
        .iter()
        .filter_map(|e| {
            let br = if e.label == StateLabel::LeftEdge { &sys.left } else { &sys.right };
            let n = e.matched_n?;
            br.points.iter().find(|p| p.n == n).map(|p| (e.j - p.j_integral).abs())
        })
        .collect();
    let bulk_e: Vec<f64> = c.with_label(StateLabel::Bulk).map(|e| e.e).collect();
    let mut set_distance: Option<f64> = None;
    for x in &bulk_e {
        for e in &edges {
            let d = (x - e.e).abs();
            set_distance = Some(set_distance.map_or(d, |m| m.min(d)));
        }
    }
    let l = sys.params.l;
    let success = c.counts.ambiguous == 0
        && c.counts.left == sys.left.window_count()
        && c.counts.right == sys.right.window_count()
        && set_distance.map_or(true, |d| d >= l.powf(1.0 - p_exp));
    SeedOutcome {
        l,
        seed,
        left: c.counts.left,
        bulk: c.counts.bulk,
        right: c.counts.right,
        ambiguous: c.counts.ambiguous,
        branch_left: sys.left.window_count(),
        branch_right: sys.right.window_count(),
        min_edge_abs_j: c.min_edge_abs_j,
        max_bulk_abs_j: c.max_bulk_abs_j,
        separation_ratio: c.separation_ratio(),
        median_shift: median(&shifts),
        median_current_deviation: median(&devs),
        set_distance,
        success,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeSummary {
    pub l: f64,
    pub seeds: usize,
    pub median_edge_count: f64,
    pub median_bulk_count: f64,
    pub median_max_bulk_abs_j: Option<f64>,
    pub median_shift: Option<f64>,
    pub median_current_deviation: Option<f64>,
    pub ambiguous_fraction: f64,
    /// Seeds with separation ratio ≥ 100 among all seeds.
    pub separation_pass: Wilson,
    pub success: Wilson,
    /// `1 − 3L^{−s}`.
    pub success_target: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub p: f64,
    pub s: f64,
    pub theta: Option<f64>,
    pub outcomes: Vec<SeedOutcome>,
    pub sizes: Vec<SizeSummary>,
    pub edge_count_fit: Option<PowerFit>,
    pub bulk_count_fit: Option<PowerFit>,
    /// Slope of `ln(max bulk |J|)` against `B(ln L)²`.
    pub gamma_slope: Option<f64>,
    pub max_bulk_decreasing: Option<bool>,
}

pub fn run_theorem1(
    params: &ModelParams,
    seeds: &[u64],
    lengths: &[f64],
    settings: &SolverSettings,
    policy: &ClassifyPolicy,
    p_exp: f64,
    theta: Option<f64>,
) -> Result<Theorem1Report> {
    let s = theta.map_or(p_exp - 6.0, |t| t.min(p_exp - 6.0));
    let mut outcomes = Vec::new();
    let mut sizes = Vec::new();
    for &l in lengths {
        let p = at_length(params, l);
        p.validate()?;
        build_mixed_basis_capped(&p, settings.resolution, settings.dimension_cap)?;
        let outs = seeds
            .par_iter()
            .map(|&sd| classify_seed(&p, Some(sd), settings, policy).map(|sys| outcome(&sys, sd, p_exp)))
            .collect::<Result<Vec<_>>>()?;
        let n = outs.len();
        let f = |g: &dyn Fn(&SeedOutcome) -> Option<f64>| median(&outs.iter().filter_map(g).collect::<Vec<_>>());
        let amb: usize = outs.iter().map(|o| o.ambiguous).sum();
        let tot: usize = outs.iter().map(|o| o.left + o.bulk + o.right + o.ambiguous).sum();
        sizes.push(SizeSummary {
            l,
            seeds: n,
            median_edge_count: f(&|o| Some((o.left + o.right) as f64)).unwrap_or(0.0),
            median_bulk_count: f(&|o| Some(o.bulk as f64)).unwrap_or(0.0),
            median_max_bulk_abs_j: f(&|o| o.max_bulk_abs_j),
            median_shift: f(&|o| o.median_shift),
            median_current_deviation: f(&|o| o.median_current_deviation),
            ambiguous_fraction: if tot == 0 { 0.0 } else { amb as f64 / tot as f64 },
            separation_pass: wilson(outs.iter().filter(|o| o.separation_ratio.map_or(false, |r| r >= 100.0)).count(), n),
            success: wilson(outs.iter().filter(|o| o.success).count(), n),
            success_target: 1.0 - 3.0 * l.powf(-s),
        });
        outcomes.extend(outs);
    }
    let ls: Vec<f64> = sizes.iter().map(|s| s.l).collect();
    let edge_count_fit = power_fit(&ls, &sizes.iter().map(|s| s.median_edge_count).collect::<Vec<_>>())
        .filter(|f| f.points == ls.len());
    let bulk_count_fit = power_fit(&ls, &sizes.iter().map(|s| s.median_bulk_count).collect::<Vec<_>>())
        .filter(|f| f.points == ls.len());
    let maxj: Option<Vec<f64>> = sizes.iter().map(|s| s.median_max_bulk_abs_j).collect();
    let max_bulk_decreasing = maxj.as_ref().map(|v| v.windows(2).all(|w| w[1] < w[0]));
    let gamma_slope = maxj.and_then(|v| {
        let pts: Vec<(f64, f64)> = ls
            .iter()
            .zip(&v)
            .filter(|(_, j)| **j > 0.0)
            .map(|(l, j)| (params.b * l.ln().powi(2), j.ln()))
            .collect();
        line_fit(&pts).map(|f| -f.0)
    });
    Ok(Theorem1Report {
        p: p_exp,
        s,
        theta,
        outcomes,
        sizes,
        edge_count_fit,
        bulk_count_fit,
        gamma_slope,
        max_bulk_decreasing,
    })
}

// ---------------------------------------------------------------------------
// Hall current

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlateauPoint {
    pub e_f: f64,
    pub current: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HallResult {
    pub mu_l: f64,
    pub mu_r: f64,
    pub e_f: f64,
    pub l: f64,
    pub filled_left: Vec<f64>,
    pub filled_right: Vec<f64>,
    pub filled_bulk: Vec<f64>,
    /// `Σ_filled J/L`.
    pub current: f64,
    /// `(μ_r − μ_ℓ)/2π`.
    pub predicted: f64,
    /// `2π·I/(μ_r − μ_ℓ)`.
    pub ratio: f64,
    /// `|Σ_b| · max|J_bulk| / L`.
    pub bulk_budget: f64,
    /// Same filling applied to the clean branch levels.
    pub branch_sum: f64,
    pub plateau: Vec<PlateauPoint>,
    /// `(max I − min I)/|I|` over the plateau scan.
    pub plateau_variation: f64,
}

fn filled_current(c: &ClassifiedSpectrum, lo: f64, mu_l: f64, mu_r: f64, e_f: f64) -> (f64, [Vec<f64>; 3]) {
    let mut sets: [Vec<f64>; 3] = Default::default();
    let mut total = 0.0;
    for e in &c.entries {
        let (top, slot) = match e.label {
            StateLabel::LeftEdge => (mu_l, 0),
            StateLabel::RightEdge => (mu_r, 1),
            StateLabel::Bulk => (e_f, 2),
            StateLabel::Ambiguous => continue,
        };
        if e.e >= lo && e.e <= top {
            total += e.j;
            sets[slot].push(e.e);
        }
    }
    (total / c.l, sets)
}

/// Free-fermion current with the edge sets filled to `μ_ℓ`, `μ_r` and the
/// bulk to `E_F`, from `B/2 + ε` upwards.
#[allow(clippy::too_many_arguments)]
pub fn hall_current(
    classified: &ClassifiedSpectrum,
    left: &SpectralBranch,
    right: &SpectralBranch,
    params: &ModelParams,
    mu_l: f64,
    mu_r: f64,
    e_f: f64,
    scan_points: usize,
) -> Result<HallResult> {
    let (lo, hi) = params.window();
    if !(lo < mu_l && mu_l < e_f && e_f < mu_r && mu_r < hi) {
        return Err(Error::Ordering(format!(
            "B/2 + ε < μ_ℓ < E_F < μ_r < B/2 + V0 violated (μ_ℓ = {mu_l}, E_F = {e_f}, μ_r = {mu_r}, window [{lo}, {hi}])"
        )));
    }
    let l = classified.l;
    let (current, [filled_left, filled_right, filled_bulk]) = filled_current(classified, lo, mu_l, mu_r, e_f);
    let predicted = (mu_r - mu_l) / (2.0 * PI);
    let nb = classified.counts.bulk as f64;
    let bulk_budget = nb * classified.max_bulk_abs_j.unwrap_or(0.0) / l;
    let branch_sum = (left.points.iter().filter(|p| p.e >= lo && p.e <= mu_l).map(|p| p.j_integral).sum::<f64>()
        + right.points.iter().filter(|p| p.e >= lo && p.e <= mu_r).map(|p| p.j_integral).sum::<f64>())
        / l;
    // E_F sweep across 20% of the window, kept inside (μ_ℓ, μ_r).
    let half = 0.1 * (hi - lo);
    let (a, b) = ((e_f - half).max(mu_l), (e_f + half).min(mu_r));
    let m = scan_points.max(2);
    let plateau: Vec<PlateauPoint> = (0..m)
        .map(|i| {
            let ef = a + (b - a) * i as f64 / (m - 1) as f64;
            PlateauPoint { e_f: ef, current: filled_current(classified, lo, mu_l, mu_r, ef).0 }
        })
        .collect();
    let imax = plateau.iter().map(|p| p.current).fold(f64::NEG_INFINITY, f64::max);
    let imin = plateau.iter().map(|p| p.current).fold(f64::INFINITY, f64::min);
    let plateau_variation = if current != 0.0 { (imax - imin) / current.abs() } else { imax - imin };
    Ok(HallResult {
        mu_l,
        mu_r,
        e_f,
        l,
        filled_left,
        filled_right,
        filled_bulk,
        current,
        predicted,
        ratio: current / predicted,
        bulk_budget,
        branch_sum,
        plateau,
        plateau_variation,
    })
}

// ---------------------------------------------------------------------------
// H1 / H2 diagnostics

/// Bulk eigenstates of `H_b` whose energy differs from the discrete Landau
/// level by more than `offset`, i.e. states bound by the disorder.
pub fn bound_bulk_states(
    params: &ModelParams,
    basis: &MixedBasis,
    real: &DisorderRealization,
    offset: f64,
    settings: &SolverSettings,
) -> Result<(MixedBasis, Vec<EigenPair>, f64)> {
    let bb = bulk_basis(params, basis);
    let hb = assemble_bulk(&bb, params, real)?;
    let level = discrete_landau_level(&bb);
    let w = eig_window_with(&hb, 0.5 * params.b - params.v0, 0.5 * params.b + params.v0, settings.window_options())?;
    let pairs = w.pairs.into_iter().filter(|p| (p.e - level).abs() > offset).collect();
    Ok((bb, pairs, level))
}

/// Lowest eigenvalue of the free x-problem at `k = 0`.
pub fn discrete_landau_level(basis: &MixedBasis) -> f64 {
    let h2 = basis.hx * basis.hx;
    let t = crate::linalg::tridiag::SymTridiag {
        diag: (0..basis.nx).map(|j| 1.0 / h2 + 0.5 * (basis.b * basis.x(j)).powi(2)).collect(),
        off: vec![-0.5 / h2; basis.nx - 1],
    };
    t.eigenvalue(0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct H2SeedRecord {
    pub l: f64,
    pub seed: u64,
    pub states: usize,
    /// Largest H2 proxy among the bound bulk states.
    pub max_proxy: Option<f64>,
    pub median_slope: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct H2SizeSummary {
    pub l: f64,
    pub median_proxy: Option<f64>,
    pub median_slope: Option<f64>,
    pub pass_fraction: Wilson,
    /// `−ln(1 − f)/ln L` from the failing fraction `1 − f = L^{−θ}`.
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub h1: H1Report,
    pub h2_threshold: f64,
    pub level_offset: f64,
    pub records: Vec<H2SeedRecord>,
    pub sizes: Vec<H2SizeSummary>,
    pub proxy_decreasing: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
pub fn run_h1_h2_diagnostics(
    params: &ModelParams,
    seeds: &[u64],
    lengths: &[f64],
    settings: &SolverSettings,
    h1_threshold: f64,
    h2_threshold: f64,
    level_offset: f64,
) -> Result<DiagnosticsReport> {
    params.validate()?;
    let basis = build_mixed_basis_capped(params, settings.resolution, settings.dimension_cap)?;
    let left = default_branch(params, &basis, Side::Left)?;
    let right = default_branch(params, &basis, Side::Right)?;
    let h1 = check_h1(&left, &right, params.window(), h1_threshold);
    let mut records = Vec::new();
    let mut sizes = Vec::new();
    for &l in lengths {
        let p = at_length(params, l);
        p.validate()?;
        let basis = build_mixed_basis_capped(&p, settings.resolution, settings.dimension_cap)?;
        let recs = seeds
            .par_iter()
            .map(|&sd| {
                let real = sample_disorder(&p, realization_seed(p.seed_base, sd))?;
                let (bb, pairs, _) = bound_bulk_states(&p, &basis, &real, level_offset, settings)?;
                let mut proxies = Vec::new();
                let mut slopes = Vec::new();
                for pair in &pairs {
                    let d = decay_profile(pair, &bb, 4 * bb.nk())?;
                    proxies.push(d.h2_proxy);
                    if let Some(s) = d.slope {
                        slopes.push(s);
                    }
                }
                let max_proxy = proxies.iter().copied().reduce(f64::max);
                Ok(H2SeedRecord {
                    l,
                    seed: sd,
                    states: pairs.len(),
                    max_proxy,
                    median_slope: median(&slopes),
                    pass: max_proxy.map_or(true, |m| m <= h2_threshold),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let n = recs.len();
        let pass = wilson(recs.iter().filter(|r| r.pass).count(), n);
        let fail = 1.0 - pass.p;
        sizes.push(H2SizeSummary {
            l,
            median_proxy: median(&recs.iter().filter_map(|r| r.max_proxy).collect::<Vec<_>>()),
            median_slope: median(&recs.iter().filter_map(|r| r.median_slope).collect::<Vec<_>>()),
            pass_fraction: pass,
            theta: if fail > 0.0 && fail < 1.0 { Some(-fail.ln() / l.ln()) } else { None },
        });
        records.extend(recs);
    }
    let proxies: Option<Vec<f64>> = sizes.iter().map(|s| s.median_proxy).collect();
    let proxy_decreasing = proxies.map(|v| v.windows(2).all(|w| w[1] < w[0]));
    Ok(DiagnosticsReport { h1, h2_threshold, level_offset, records, sizes, proxy_decreasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_interval_is_well_formed() {
        for (k, n) in [(0, 10), (5, 10), (10, 10), (37, 500)] {
            let w = wilson(k, n);
            assert!(0.0 <= w.lo && w.lo <= w.p && w.p <= w.hi && w.hi <= 1.0);
        }
        let w = wilson(250, 500);
        assert!((w.hi - w.lo) < 0.15);
    }

    #[test]
    fn power_fit_recovers_exponent() {
        let xs = [8.0, 12.0, 16.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        let f = power_fit(&xs, &ys).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12 && (f.prefactor - 3.0).abs() < 1e-10);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn wegner_frequency_is_monotone_and_vanishes_at_zero() {
        let p = ModelParams::new(1.0, 8.0, 0.2, 0.05);
        let seeds: Vec<u64> = (0..8).collect();
        let r = run_wegner(&p, 0.6, &[0.0, 0.01, 0.1, 0.2], &seeds, WegnerMode::Fast, &SolverSettings::default()).unwrap();
        assert_eq!(r.points[0].hits, 0);
        assert!(r.nondecreasing);
    }

    #[test]
    fn fast_mode_matches_full_solve() {
        let p = ModelParams::new(1.0, 8.0, 0.2, 0.05);
        let s = SolverSettings::default();
        let basis = build_mixed_basis_capped(&p, s.resolution, s.dimension_cap).unwrap();
        for seed in 0..3 {
            let real = sample_disorder(&p, realization_seed(0, seed)).unwrap();
            let fast = bulk_distance(&p, &basis, &real, 0.55, WegnerMode::Fast, &s, 0.2).unwrap();
            let full = bulk_distance(&p, &basis, &real, 0.55, WegnerMode::Full, &s, 0.2).unwrap();
            assert!((fast - full).abs() < 2e-3, "{fast} vs {full}");
        }
    }

    #[test]
    fn hall_rejects_bad_ordering() {
        let p = ModelParams::new(1.0, 12.0, 0.2, 0.05);
        let sys = classify_seed(&p, None, &SolverSettings::default(), &ClassifyPolicy::default()).unwrap();
        let r = hall_current(&sys.classified, &sys.left, &sys.right, &p, 0.65, 0.6, 0.62, 5);
        assert!(matches!(r, Err(Error::Ordering(_))));
    }

    #[test]
    fn clean_hall_has_a_flat_plateau() {
        let p = ModelParams::new(1.0, 12.0, 0.2, 0.05);
        let sys = classify_seed(&p, None, &SolverSettings::default(), &ClassifyPolicy::default()).unwrap();
        let h = hall_current(&sys.classified, &sys.left, &sys.right, &p, 0.575, 0.675, 0.625, 11).unwrap();
        assert_eq!(h.plateau_variation, 0.0);
        assert!((h.current - h.branch_sum).abs() < 1e-6);
    }
}
