//! Currents of eigenstates, the edge/bulk classification of a window spectrum,
//! and the projector, pairwise-current and decay diagnostics.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::basis::MixedBasis;
use crate::edge::SpectralBranch;
use crate::eigensolve::{dense_pairs, EigenPair, SpectrumWindow};
use crate::linalg::{dotc, CMatrix};
use crate::model::{ModelParams, Side};
use crate::operators::HermitianOperator;
use crate::specfun::kernel::trace_constant_sq;
use crate::{Error, Result};

/// Diagonal bulk-current threshold.
pub const BULK_CURRENT_MAX: f64 = 1e-3;
/// Default slack of the pairwise-current certificate.
pub const PAIRWISE_SLACK: f64 = 1e-3;
/// Amplitudes below this fraction of the maximum are excluded from decay fits.
pub const DECAY_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateLabel {
    #[serde(rename = "L-edge")]
    LeftEdge,
    #[serde(rename = "bulk")]
    Bulk,
    #[serde(rename = "R-edge")]
    RightEdge,
    #[serde(rename = "ambiguous")]
    Ambiguous,
}

impl StateLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            StateLabel::LeftEdge => "L-edge",
            StateLabel::Bulk => "bulk",
            StateLabel::RightEdge => "R-edge",
            StateLabel::Ambiguous => "ambiguous",
        }
    }

    pub fn is_edge(self) -> bool {
        matches!(self, StateLabel::LeftEdge | StateLabel::RightEdge)
    }
}

fn check_len(v: &[C64], op: &HermitianOperator) -> Result<()> {
    if v.len() != op.dim() {
        return Err(Error::BasisMismatch(format!(
            "vector of length {} against operator of dimension {}",
            v.len(),
            op.dim()
        )));
    }
    Ok(())
}

/// `⟨ψ, v_y ψ⟩`.
pub fn state_current(pair: &EigenPair, vy: &HermitianOperator) -> Result<f64> {
    check_len(&pair.vector, vy)?;
    Ok(dotc(&pair.vector, &vy.matvec(&pair.vector)).re)
}

/// `Tr(v_y P)/s` for the projector onto an `s`-fold cluster.
pub fn cluster_current(cluster: &[&EigenPair], vy: &HermitianOperator) -> Result<f64> {
    let mut t = 0.0;
    for p in cluster {
        t += state_current(p, vy)?;
    }
    Ok(t / cluster.len().max(1) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyPolicy {
    /// `|J| ≥ j_edge` labels an edge state; defaults to `j_epsilon/2`.
    pub j_edge: Option<f64>,
    /// `|J| ≤ j_bulk` labels a bulk state; defaults to `j_epsilon/10`.
    pub j_bulk: Option<f64>,
    /// Proximity radius for the dead zone; defaults to `j_epsilon/(4L)`.
    pub radius: Option<f64>,
    /// Energies closer than this are one degenerate cluster.
    pub cluster_tol: f64,
}

impl Default for ClassifyPolicy {
    fn default() -> Self {
        ClassifyPolicy { j_edge: None, j_bulk: None, radius: None, cluster_tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifiedEntry {
    pub index: usize,
    pub e: f64,
    pub j: f64,
    pub residual: f64,
    pub label: StateLabel,
    pub matched_n: Option<i64>,
    pub matched_k: Option<f64>,
    /// `|E − E^α_{0k}|` against the matched branch level.
    pub shift: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LabelCounts {
    pub left: usize,
    pub bulk: usize,
    pub right: usize,
    pub ambiguous: usize,
}

impl LabelCounts {
    pub fn total(&self) -> usize {
        self.left + self.bulk + self.right + self.ambiguous
    }

    pub fn edge(&self) -> usize {
        self.left + self.right
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifiedSpectrum {
    pub window: (f64, f64),
    pub l: f64,
    pub j_epsilon: f64,
    pub j_edge: f64,
    pub j_bulk: f64,
    pub radius: f64,
    pub entries: Vec<ClassifiedEntry>,
    pub counts: LabelCounts,
    pub min_edge_abs_j: Option<f64>,
    pub max_bulk_abs_j: Option<f64>,
}

impl ClassifiedSpectrum {
    pub fn with_label(&self, label: StateLabel) -> impl Iterator<Item = &ClassifiedEntry> + '_ {
        self.entries.iter().filter(move |e| e.label == label)
    }

    /// `min_edge |J| / max_bulk |J|` when both sets are non-empty.
    pub fn separation_ratio(&self) -> Option<f64> {
        match (self.min_edge_abs_j, self.max_bulk_abs_j) {
            (Some(a), Some(b)) if b > 0.0 => Some(a / b),
            _ => None,
        }
    }
}

/// Currents per window state, degenerate clusters sharing their trace current.
pub fn window_currents(window: &SpectrumWindow, vy: &HermitianOperator, cluster_tol: f64) -> Result<Vec<f64>> {
    let pairs = &window.pairs;
    let mut out = vec![0.0; pairs.len()];
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i + 1;
        while j < pairs.len() && pairs[j].e - pairs[j - 1].e <= cluster_tol {
            j += 1;
        }
        let refs: Vec<&EigenPair> = pairs[i..j].iter().collect();
        let c = cluster_current(&refs, vy)?;
        out[i..j].iter_mut().for_each(|v| *v = c);
        i = j;
    }
    Ok(out)
}

/// Labels every eigenvalue of `window` inside `[a, b]` as left edge, bulk,
/// right edge or ambiguous.
pub fn classify_window(
    window: &SpectrumWindow,
    vy: &HermitianOperator,
    left: &SpectralBranch,
    right: &SpectralBranch,
    policy: &ClassifyPolicy,
) -> Result<ClassifiedSpectrum> {
    let currents = window_currents(window, vy, policy.cluster_tol)?;
    let l = left.l;
    let j_epsilon = match (left.j_epsilon, right.j_epsilon) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0.0,
    };
    let j_edge = policy.j_edge.unwrap_or(0.5 * j_epsilon);
    let j_bulk = policy.j_bulk.unwrap_or(0.1 * j_epsilon);
    let radius = policy.radius.unwrap_or(0.25 * j_epsilon / l);

    let mut entries = Vec::with_capacity(window.pairs.len());
    let mut counts = LabelCounts::default();
    for (index, (pair, &j)) in window.pairs.iter().zip(&currents).enumerate() {
        let near = |br: &SpectralBranch| br.nearest(pair.e).map(|p| (p.n, p.k, (p.e - pair.e).abs()));
        let (nl, nr) = (near(left), near(right));
        let mut label = if j_edge > 0.0 && j >= j_edge {
            StateLabel::RightEdge
        } else if j_edge > 0.0 && j <= -j_edge {
            StateLabel::LeftEdge
        } else if j.abs() <= j_bulk {
            StateLabel::Bulk
        } else {
            // Dead zone: nearest edge level of the sign-compatible side.
            let cand = if j > 0.0 { (nr, StateLabel::RightEdge) } else { (nl, StateLabel::LeftEdge) };
            match cand {
                (Some((_, _, d)), lab) if d <= radius => lab,
                _ => StateLabel::Ambiguous,
            }
        };
        if j_epsilon == 0.0 && label != StateLabel::Bulk {
            label = StateLabel::Ambiguous;
        }
        let matched = match label {
            StateLabel::LeftEdge => nl,
            StateLabel::RightEdge => nr,
            _ => None,
        };
        match label {
            StateLabel::LeftEdge => counts.left += 1,
            StateLabel::RightEdge => counts.right += 1,
            StateLabel::Bulk => counts.bulk += 1,
            StateLabel::Ambiguous => counts.ambiguous += 1,
        }
        entries.push(ClassifiedEntry {
            index,
            e: pair.e,
            j,
            residual: pair.residual,
            label,
            matched_n: matched.map(|m| m.0),
            matched_k: matched.map(|m| m.1),
            shift: matched.map(|m| m.2),
        });
    }
    let min_edge_abs_j = entries.iter().filter(|e| e.label.is_edge()).map(|e| e.j.abs()).reduce(f64::min);
    let max_bulk_abs_j =
        entries.iter().filter(|e| e.label == StateLabel::Bulk).map(|e| e.j.abs()).reduce(f64::max);
    Ok(ClassifiedSpectrum {
        window: (window.a, window.b),
        l,
        j_epsilon,
        j_edge,
        j_bulk,
        radius,
        entries,
        counts,
        min_edge_abs_j,
        max_bulk_abs_j,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairwiseCertificate {
    pub e1: f64,
    pub e2: f64,
    pub value_re: f64,
    pub value_im: f64,
    /// `2|E1 − E2|·L + slack`.
    pub bound: f64,
    pub pass: bool,
}

/// `(ψ₁, v_y ψ₂)` with its certificate against `2|E₁ − E₂|L + slack`.
pub fn pairwise_current(
    p1: &EigenPair,
    p2: &EigenPair,
    vy: &HermitianOperator,
    l: f64,
    slack: f64,
) -> Result<PairwiseCertificate> {
    check_len(&p1.vector, vy)?;
    check_len(&p2.vector, vy)?;
    let v = dotc(&p1.vector, &vy.matvec(&p2.vector));
    let bound = 2.0 * (p1.e - p2.e).abs() * l + slack;
    Ok(PairwiseCertificate { e1: p1.e, e2: p2.e, value_re: v.re, value_im: v.im, bound, pass: v.norm() <= bound })
}

fn check_orthonormal(vs: &[Vec<C64>]) -> Result<()> {
    let mut worst = 0.0f64;
    for (i, a) in vs.iter().enumerate() {
        for (j, b) in vs.iter().enumerate().skip(i) {
            let g = dotc(a, b);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    if worst > 1e-8 {
        return Err(Error::NotOrthonormal(worst));
    }
    Ok(())
}

/// `‖P_A − P_B‖` for the orthogonal projectors onto two orthonormal families.
pub fn projector_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> Result<f64> {
    check_orthonormal(a)?;
    check_orthonormal(b)?;
    if a.len() != b.len() {
        return Ok(1.0);
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let g = CMatrix::from_fn(a.len(), |i, j| dotc(&a[i], &b[j]));
    let gg = g.adjoint().matmul(&g);
    let s2_min = dense_pairs(&gg)?.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    Ok((1.0 - s2_min.clamp(0.0, 1.0)).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile {
    pub xs: Vec<f64>,
    /// `max_y |ψ(x, y)|` per grid node.
    pub envelope: Vec<f64>,
    /// Slope of `ln A` against `(x − L/2 + ln L)²` for `x > L/2`; `None` when
    /// fewer than three exterior nodes lie above the amplitude floor.
    pub slope: Option<f64>,
    pub slope_residual: Option<f64>,
    /// `min_y max_x |ψ(x, y)|`.
    pub h2_proxy: f64,
    /// Pointwise bound `√(Nk/(L·hx))` for a unit vector.
    pub pointwise_bound: f64,
}

/// Reconstructs `|ψ(x_j, y)|` on `ny` rows and fits the exterior Gaussian decay.
pub fn decay_profile(pair: &EigenPair, basis: &MixedBasis, ny: usize) -> Result<DecayProfile> {
    if pair.vector.len() != basis.dim() {
        return Err(Error::BasisMismatch("eigenvector does not live on this basis".into()));
    }
    let nk = basis.nk();
    let l = basis.l;
    let ny = ny.max(1);
    let ks = basis.ks();
    let ys: Vec<f64> = (0..ny).map(|i| -0.5 * l + l * i as f64 / ny as f64).collect();
    // e^{iky} table, row-major (y, k).
    let phases: Vec<C64> =
        ys.iter().flat_map(|&y| ks.iter().map(move |&k| C64::from_polar(1.0, k * y))).collect();
    let norm = 1.0 / (l * basis.hx).sqrt();
    let mut envelope = vec![0.0; basis.nx];
    let mut col_max = vec![0.0f64; ny];
    for (j, env) in envelope.iter_mut().enumerate() {
        let c = &pair.vector[j * nk..(j + 1) * nk];
        for (iy, cm) in col_max.iter_mut().enumerate() {
            let row = &phases[iy * nk..(iy + 1) * nk];
            let v = row.iter().zip(c).map(|(p, a)| p * a).sum::<C64>().norm() * norm;
            *env = f64::max(*env, v);
            *cm = cm.max(v);
        }
    }
    let xs = basis.xs();
    let amax = envelope.iter().copied().fold(0.0, f64::max);
    let shift = 0.5 * l - l.ln();
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(&envelope)
        .filter(|(&x, &a)| x > 0.5 * l && a > DECAY_FLOOR * amax)
        .map(|(&x, &a)| ((x - shift).powi(2), a.ln()))
        .collect();
    let (slope, slope_residual) = if pts.len() >= 3 { line_fit(&pts).map_or((None, None), |f| (Some(f.0), Some(f.2))) } else { (None, None) };
    Ok(DecayProfile {
        xs,
        envelope,
        slope,
        slope_residual,
        h2_proxy: col_max.iter().copied().fold(f64::INFINITY, f64::min),
        pointwise_bound: (nk as f64 / (l * basis.hx)).sqrt(),
    })
}

/// Least-squares line `y = s·x + c`; returns `(s, c, rms residual)`.
pub fn line_fit(pts: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let s = sxy / sxx;
    let c = my - s * mx;
    let rms = (pts.iter().map(|p| (p.1 - s * p.0 - c).powi(2)).sum::<f64>() / n).sqrt();
    Some((s, c, rms))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceCertificate {
    pub interval: (f64, f64),
    pub count: usize,
    /// `2ε⁻²c(B)²V0²L⁴`.
    pub bound: f64,
    pub pass: bool,
}

/// Eigenvalue count of a bulk solve inside `interval` against the trace bound.
pub fn trace_bound_check(energies: &[f64], interval: (f64, f64), params: &ModelParams) -> TraceCertificate {
    let count = energies.iter().filter(|&&e| e >= interval.0 && e <= interval.1).count();
    let bound = 2.0 * trace_constant_sq(params.b) * params.v0.powi(2) * params.l.powi(4) / params.epsilon.powi(2);
    TraceCertificate { interval, count, bound, pass: (count as f64) <= bound }
}

/// `round(B·L²/2π)`, the Landau degeneracy of the strip.
pub fn landau_degeneracy(b: f64, l: f64) -> f64 {
    (b * l * l / (2.0 * PI)).round()
}

/// Side of an edge label.
pub fn label_side(label: StateLabel) -> Option<Side> {
    match label {
        StateLabel::LeftEdge => Some(Side::Left),
        StateLabel::RightEdge => Some(Side::Right),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_mixed_basis, bulk_basis};
    use crate::edge::default_branch;
    use crate::eigensolve::eig_window;
    use crate::model::{realization_seed, sample_disorder, DisorderRealization};
    use crate::operators::{assemble_bulk, assemble_full, assemble_vy};

    fn unit(n: usize, i: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[i] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn symmetric_trial_state_carries_no_current() {
        let p = ModelParams::new(1.0, 8.0, 0.2, 0.05);
        let basis = build_mixed_basis(&p, 8).unwrap();
        let vy = assemble_vy(&basis);
        let ik = basis.sector_of(0).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); basis.dim()];
        // Grid is symmetric about x = 0, the centre of the k = 0 sector.
        for j in 0..basis.nx {
            v[basis.index(j, ik)] = C64::new((-0.5 * basis.x(j).powi(2)).exp(), 0.0);
        }
        let n = crate::linalg::norm2(&v);
        v.iter_mut().for_each(|c| *c /= n);
        let pair = EigenPair { e: 0.5, vector: v, residual: 0.0 };
        assert!(state_current(&pair, &vy).unwrap().abs() < 1e-10);
    }

    #[test]
    fn clean_edge_state_matches_branch_current() {
        let p = ModelParams::new(1.0, 12.0, 0.2, 0.05);
        let basis = build_mixed_basis(&p, 8).unwrap();
        let clean = DisorderRealization::uniform(&p, 0.0).unwrap();
        let h = assemble_full(&basis, &p, &clean).unwrap();
        let (a, b) = p.window();
        let w = eig_window(&h, a, b, 1e-10).unwrap();
        let vy = assemble_vy(&basis);
        let left = default_branch(&p, &basis, Side::Left).unwrap();
        let right = default_branch(&p, &basis, Side::Right).unwrap();
        let c = classify_window(&w, &vy, &left, &right, &ClassifyPolicy::default()).unwrap();
        assert_eq!(c.counts.bulk, 0);
        assert_eq!(c.counts.left, left.window_count());
        assert_eq!(c.counts.right, right.window_count());
        for e in c.entries.iter() {
            let br = if e.label == StateLabel::RightEdge { &right } else { &left };
            let pt = br.nearest(e.e).unwrap();
            assert!((e.j - pt.j_integral).abs() < 1e-6, "{} vs {}", e.j, pt.j_integral);
            assert!(e.shift.unwrap() < 1e-8);
        }
    }

    #[test]
    fn disordered_window_partitions() {
        let p = ModelParams::new(1.0, 12.0, 0.2, 0.05);
        let basis = build_mixed_basis(&p, 8).unwrap();
        let real = sample_disorder(&p, realization_seed(0, 3)).unwrap();
        let h = assemble_full(&basis, &p, &real).unwrap();
        let (a, b) = p.window();
        let w = eig_window(&h, a, b, 1e-10).unwrap();
        let vy = assemble_vy(&basis);
        let left = default_branch(&p, &basis, Side::Left).unwrap();
        let right = default_branch(&p, &basis, Side::Right).unwrap();
        let c = classify_window(&w, &vy, &left, &right, &ClassifyPolicy::default()).unwrap();
        assert_eq!(c.counts.total(), w.certified());
        for e in &c.entries {
            match e.label {
                StateLabel::LeftEdge => assert!(e.j < 0.0),
                StateLabel::RightEdge => assert!(e.j > 0.0),
                _ => {}
            }
        }
    }

    #[test]
    fn bulk_states_carry_small_currents() {
        let p = ModelParams::new(1.0, 12.0, 0.2, 0.05);
        let mixed = build_mixed_basis(&p, 8).unwrap();
        let basis = bulk_basis(&p, &mixed);
        let real = sample_disorder(&p, realization_seed(0, 5)).unwrap();
        let h = assemble_bulk(&basis, &p, &real).unwrap();
        let w = eig_window(&h, 0.4, 0.6, 1e-10).unwrap();
        let vy = assemble_vy(&basis);
        for pair in &w.pairs {
            assert!(state_current(pair, &vy).unwrap().abs() <= BULK_CURRENT_MAX);
        }
        for (i, p1) in w.pairs.iter().enumerate() {
            for p2 in &w.pairs[i..] {
                assert!(pairwise_current(p1, p2, &vy, 12.0, PAIRWISE_SLACK).unwrap().pass);
            }
        }
    }

    #[test]
    fn projector_distance_basics() {
        let a = vec![unit(4, 0)];
        let b = vec![unit(4, 1)];
        assert!(projector_distance(&a, &a).unwrap() < 1e-7);
        assert!((projector_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = vec![vec![C64::new(s, 0.0), C64::new(0.0, s), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]];
        let d1 = projector_distance(&a, &c).unwrap();
        let d2 = projector_distance(&c, &a).unwrap();
        assert!((d1 - s).abs() < 1e-12 && (d1 - d2).abs() < 1e-15);
        assert_eq!(projector_distance(&a, &[unit(4, 0), unit(4, 2)]).unwrap(), 1.0);
        let bad = vec![vec![C64::new(2.0, 0.0); 4]];
        assert!(matches!(projector_distance(&bad, &a), Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn envelope_respects_pointwise_bound() {
        let p = ModelParams::new(1.0, 8.0, 0.2, 0.05);
        let mixed = build_mixed_basis(&p, 8).unwrap();
        let basis = bulk_basis(&p, &mixed);
        let real = sample_disorder(&p, realization_seed(0, 7)).unwrap();
        let h = assemble_bulk(&basis, &p, &real).unwrap();
        let w = eig_window(&h, 0.4, 0.6, 1e-10).unwrap();
        for pair in w.pairs.iter().take(5) {
            let d = decay_profile(pair, &basis, 64).unwrap();
            assert!(d.envelope.iter().all(|&a| a >= 0.0 && a <= d.pointwise_bound * (1.0 + 1e-10)));
            assert!(d.h2_proxy <= d.envelope.iter().copied().fold(0.0, f64::max));
        }
    }

    #[test]
    fn trace_bound_on_empty_interval() {
        let p = ModelParams::new(1.0, 12.0, 0.2, 0.05);
        let c = trace_bound_check(&[0.5, 0.51], (0.6, 0.7), &p);
        assert_eq!(c.count, 0);
        assert!(c.pass && c.bound > 0.0);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, -0.3 * i as f64 + 2.0)).collect();
        let (s, c, r) = line_fit(&pts).unwrap();
        assert!((s + 0.3).abs() < 1e-12 && (c - 2.0).abs() < 1e-12 && r < 1e-12);
    }
}
