//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line to stderr
//! (bypassing output capture) and then asserts the same verdict.

use std::io::Write;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qhedge::basis::{build_mixed_basis, bulk_basis};
use qhedge::classify::{
    decay_profile, pairwise_current, state_current, trace_bound_check, ClassifyPolicy, PAIRWISE_SLACK,
};
use qhedge::config::parse_config;
use qhedge::decouple::{build_partitions, certified_z_grid, verify_decoupling, VerifyOptions};
use qhedge::edge::{branch_spacing, default_branch};
use qhedge::eigensolve::eig_window;
use qhedge::experiments::{
    at_length, bound_bulk_states, bulk_distance, classify_seed, hall_current, median, run_theorem1, run_wegner,
    SeedSystem, SolverSettings, Theorem1Report, WegnerMode,
};
use qhedge::model::{realization_seed, sample_disorder, ModelParams, Side};
use qhedge::operators::{assemble_bulk, assemble_edge, assemble_full, assemble_h0, assemble_vy};
use qhedge::runner::{run, Subcommand};
use qhedge::specfun::kernel::{certify_lemma3, lemma3_sample};
use qhedge::specfun::{kummer_u, kummer_u_drho, landau_projector_kernel, landau_projector_plane, resolvent_kernel_plane};
use qhedge::C64;

const B: f64 = 1.0;
const V0: f64 = 0.2;
const EPS: f64 = 0.05;
const SEEDS: u64 = 50;

fn desk(l: f64) -> ModelParams {
    at_length(&ModelParams::new(B, 8.0, V0, EPS), l)
}

fn verdict(n: u32, title: &str, pass: bool, detail: &str) {
    let line = format!("{} [{n:02}] {title}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    // Direct handle writes are not captured by the test harness.
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {n} failed: {detail}");
}

fn within(d: Duration, secs: u64) -> bool {
    d <= Duration::from_secs(secs)
}

fn seeds() -> Vec<u64> {
    (0..SEEDS).collect()
}

/// Classified realizations at L = 12, shared by criteria 4 and 8.
fn l12_systems() -> &'static (SeedSystem, Vec<SeedSystem>) {
    static CELL: OnceLock<(SeedSystem, Vec<SeedSystem>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = desk(12.0);
        let s = SolverSettings::default();
        let pol = ClassifyPolicy::default();
        let clean = classify_seed(&p, None, &s, &pol).unwrap();
        let dis = seeds().into_iter().map(|sd| classify_seed(&p, Some(sd), &s, &pol).unwrap()).collect();
        (clean, dis)
    })
}

/// The L ∈ {8, 12, 16} campaign shared by criteria 5 and 6.
fn theorem1() -> &'static Theorem1Report {
    static CELL: OnceLock<Theorem1Report> = OnceLock::new();
    CELL.get_or_init(|| {
        run_theorem1(
            &desk(8.0),
            &seeds(),
            &[8.0, 12.0, 16.0],
            &SolverSettings::default(),
            &ClassifyPolicy::default(),
            7.0,
            None,
        )
        .unwrap()
    })
}

#[test]
fn criterion_01_landau_levels() {
    let t = Instant::now();
    let p = desk(8.0);
    let basis = build_mixed_basis(&p, 16).unwrap();
    let h0 = assemble_h0(&basis);
    let w = eig_window(&h0, 0.0, 2.0 * B, 1e-10).unwrap();
    let mut es = w.energies();
    es.sort_by(f64::total_cmp);
    // Landau levels are the clusters of high multiplicity; the remaining
    // eigenvalues belong to sectors pressed against the grid ends.
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for e in es {
        match clusters.last_mut() {
            Some((c, m)) if e - *c <= 1e-6 * B => *m += 1,
            _ => clusters.push((e, 1)),
        }
    }
    let mut big = clusters.clone();
    big.sort_by(|a, b| b.1.cmp(&a.1));
    let mut levels: Vec<(f64, usize)> = big.into_iter().take(2).collect();
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let e0 = (levels[0].0 - 0.5 * B).abs();
    let e1 = (levels[1].0 - 1.5 * B).abs();
    let lowest = clusters[0].0;
    let dt = t.elapsed();
    let pass = lowest == levels[0].0 && e0 <= 1e-4 * B && e1 <= 1e-3 * B && within(dt, 10);
    verdict(
        1,
        "Landau levels of H0 (B=1, resolution 16)",
        pass,
        &format!(
            "E0={:.9} (mult {}, err {e0:.3e} vs 1e-4), E1={:.9} (mult {}, err {e1:.3e} vs 1e-3), {dt:.2?}",
            levels[0].0, levels[0].1, levels[1].0, levels[1].1
        ),
    );
}

#[test]
fn criterion_02_feynman_hellman() {
    let t = Instant::now();
    let p = desk(12.0);
    let basis = build_mixed_basis(&p, 8).unwrap();
    let mut worst = 0.0f64;
    let mut count = 0;
    for side in [Side::Left, Side::Right] {
        let br = default_branch(&p, &basis, side).unwrap();
        for q in br.in_window() {
            worst = worst.max((q.j_integral - q.j_derivative).abs());
            count += 1;
        }
    }
    let dt = t.elapsed();
    let pass = count > 0 && worst <= 1e-4 && within(dt, 30);
    verdict(2, "Feynman-Hellman consistency (L=12)", pass, &format!("{count} window levels, max |ΔJ| = {worst:.3e} vs 1e-4, {dt:.2?}"));
}

#[test]
fn criterion_03_edge_current_dichotomy() {
    let mut pass = true;
    let mut parts = Vec::new();
    for l in [8.0, 12.0, 16.0] {
        let p = desk(l);
        let basis = build_mixed_basis(&p, 8).unwrap();
        let left = default_branch(&p, &basis, Side::Left).unwrap();
        let right = default_branch(&p, &basis, Side::Right).unwrap();
        let signs = left.in_window().all(|q| q.j_integral < 0.0) && right.in_window().all(|q| q.j_integral > 0.0);
        let j_eps = [left.j_epsilon, right.j_epsilon].into_iter().flatten().reduce(f64::min);
        let sl = branch_spacing(&left, p.window()).unwrap();
        let sr = branch_spacing(&right, p.window()).unwrap();
        let ok = signs && j_eps.map_or(false, |j| j > 0.0) && sl.pass && sr.pass;
        pass &= ok;
        parts.push(format!(
            "L={l}: signs {signs}, j_eps={}, min spacing {:?}/{:?} vs j_eps/L",
            j_eps.map_or("none".into(), |j| format!("{j:.4}")),
            sl.min.map(|v| format!("{v:.4}")),
            sr.min.map(|v| format!("{v:.4}")),
        ));
    }
    verdict(3, "edge current dichotomy and spacing", pass, &parts.join("; "));
}

#[test]
fn criterion_04_classification_partition() {
    let (clean, dis) = l12_systems();
    let mut bad = Vec::new();
    for (i, sys) in dis.iter().enumerate() {
        let c = &sys.classified;
        if c.counts.ambiguous != 0 || c.counts.total() != c.entries.len() || c.entries.len() != sys.pairs.len() {
            bad.push(i);
        }
    }
    let clean_bulk = clean.classified.counts.bulk;
    let levels: usize = dis.iter().map(|s| s.pairs.len()).sum();
    let pass = bad.is_empty() && clean_bulk == 0 && clean.classified.counts.ambiguous == 0;
    verdict(
        4,
        "classification partitions the window (L=12, 50 seeds)",
        pass,
        &format!("{levels} window levels over {SEEDS} seeds, failing seeds {bad:?}, clean bulk labels {clean_bulk}"),
    );
}

#[test]
fn criterion_05_current_separation() {
    let r = theorem1();
    let l16 = r.sizes.iter().find(|s| s.l == 16.0).unwrap();
    let with_bulk = r.outcomes.iter().filter(|o| o.l == 16.0 && o.bulk > 0).count();
    let sep = l16.separation_pass.p >= 0.9;
    let dec = r.max_bulk_decreasing == Some(true);
    let medians: Vec<String> =
        r.sizes.iter().map(|s| format!("L={}: {:?}", s.l, s.median_max_bulk_abs_j)).collect();
    verdict(
        5,
        "current separation ≥ 1e2 at L=16 for ≥ 90% of seeds; max bulk |J| decreasing",
        sep && dec,
        &format!(
            "separation fraction {:.2} [{:.2}, {:.2}], seeds with bulk levels in window {with_bulk}/{SEEDS}, median max bulk |J| {}",
            l16.separation_pass.p,
            l16.separation_pass.lo,
            l16.separation_pass.hi,
            medians.join(", ")
        ),
    );
}

#[test]
fn criterion_06_counting_laws() {
    let r = theorem1();
    let edge = r.edge_count_fit.map(|f| f.exponent);
    let bulk = r.bulk_count_fit.map(|f| f.exponent);
    let pass = edge.map_or(false, |e| (e - 1.0).abs() <= 0.3) && bulk.map_or(false, |e| (e - 2.0).abs() <= 0.5);
    let counts: Vec<String> = r
        .sizes
        .iter()
        .map(|s| format!("L={}: edge {} bulk {}", s.l, s.median_edge_count, s.median_bulk_count))
        .collect();
    verdict(
        6,
        "counting laws (edge ~ L, bulk ~ L²)",
        pass,
        &format!("edge exponent {edge:?} vs 1.0±0.3, bulk exponent {bulk:?} vs 2.0±0.5; medians {}", counts.join(", ")),
    );
}

#[test]
fn criterion_07_wegner() {
    let t = Instant::now();
    let p = desk(8.0);
    let s = SolverSettings::default();
    let (a, b) = p.window();
    let e = 0.5 * (a + b);
    let deltas = [0.0, 0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.15, 0.2];
    let seeds: Vec<u64> = (0..500).collect();
    let r = run_wegner(&p, e, &deltas, &seeds, WegnerMode::Fast, &s).unwrap();
    // Fast mode against full solves on a few realizations.
    let basis = build_mixed_basis(&p, s.resolution).unwrap();
    let mut fast_vs_full = 0.0f64;
    for sd in 0..4 {
        let real = sample_disorder(&p, realization_seed(0, sd)).unwrap();
        let f = bulk_distance(&p, &basis, &real, e, WegnerMode::Fast, &s, 0.25).unwrap();
        let g = bulk_distance(&p, &basis, &real, e, WegnerMode::Full, &s, 0.25).unwrap();
        fast_vs_full = fast_vs_full.max((f - g).abs());
    }
    let dt = t.elapsed();
    let zero = r.points[0].delta == 0.0 && r.points[0].hits == 0;
    let fit = r.small_delta_fit.map(|f| f.exponent);
    let fit_ok = fit.map_or(false, |x| (x - 1.0).abs() <= 0.3);
    let pass = r.nondecreasing && zero && fit_ok && r.below_bound && within(dt, 600);
    let freqs: Vec<String> = r.points.iter().map(|q| format!("{}:{}", q.delta, q.hits)).collect();
    let dmin = r.distances.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(
        7,
        "Wegner frequencies (L=8, 500 seeds, fast mode)",
        pass,
        &format!(
            "nondecreasing {}, zero at 0 {zero}, below bound {}, small-δ exponent {fit:?} vs 1.0±0.3, hits {}, min dist {dmin:.4}, fast-vs-full {fast_vs_full:.1e}, {dt:.2?}",
            r.nondecreasing,
            r.below_bound,
            freqs.join(" ")
        ),
    );
}

#[test]
fn criterion_08_hall_conductance() {
    let p = desk(12.0);
    let (a, b) = p.window();
    let (mu_l, mu_r, e_f) = (a + (b - a) / 6.0, b - (b - a) / 6.0, 0.5 * (a + b));
    let (clean, dis) = l12_systems();
    let hc = hall_current(&clean.classified, &clean.left, &clean.right, &p, mu_l, mu_r, e_f, 21).unwrap();
    let clean_ok = (hc.ratio - 1.0).abs() <= 0.1 && hc.plateau_variation <= 0.01;
    let mut failing = Vec::new();
    let mut ratios = Vec::new();
    for (i, sys) in dis.iter().enumerate() {
        let h = hall_current(&sys.classified, &sys.left, &sys.right, &p, mu_l, mu_r, e_f, 21).unwrap();
        let tol = 0.1 + h.bulk_budget / h.predicted;
        ratios.push(h.ratio);
        if (h.ratio - 1.0).abs() > tol || h.plateau_variation > 0.01 {
            failing.push(i);
        }
    }
    let pass = clean_ok && failing.is_empty();
    verdict(
        8,
        "Hall current I·2π/(μr − μℓ) = 1 ± 0.1 and plateau (L=12)",
        pass,
        &format!(
            "μℓ={mu_l:.4} μr={mu_r:.4} E_F={e_f:.4}; clean ratio {:.4} (filled L {} R {}), plateau ΔI/I {:.1e}; disordered median ratio {:.4}, failing seeds {}/{SEEDS}",
            hc.ratio,
            hc.filled_left.len(),
            hc.filled_right.len(),
            hc.plateau_variation,
            median(&ratios).unwrap(),
            failing.len()
        ),
    );
}

/// `Σ_{ν ≤ 40} P_ν/(z − (ν + ½)B)` with Laguerre projector kernels.
fn truncated_spectral_sum(p: (f64, f64), q: (f64, f64), z: C64, b: f64) -> C64 {
    let t = 0.5 * b * ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2));
    let p0 = landau_projector_plane(p, q, b);
    let (mut l0, mut l1) = (1.0, 1.0 - t);
    let mut s = p0 / (z - 0.5 * b) + p0 * l1 / (z - 1.5 * b);
    for n in 1..40 {
        let nf = n as f64;
        let l2 = ((2.0 * nf + 1.0 - t) * l1 - nf * l0) / (nf + 1.0);
        l0 = l1;
        l1 = l2;
        s += p0 * l1 / (z - (nf + 1.5) * b);
    }
    s
}

#[test]
fn criterion_09_kernels() {
    let t = Instant::now();
    let mut u_err = 0.0f64;
    for rho in [0.05, 0.5, 2.0, 7.0, 15.0, 29.0, 31.0, 60.0] {
        u_err = u_err.max((kummer_u(C64::new(0.0, 0.0), 1, rho).unwrap() - 1.0).norm());
        u_err = u_err.max((kummer_u(C64::new(-1.0, 0.0), 1, rho).unwrap() - (rho - 1.0)).norm());
        u_err = u_err.max((kummer_u_drho(C64::new(-1.0, 0.0), rho).unwrap() - 1.0).norm());
    }
    // Remainders ν > 40 from the Mehler heat kernel at 80 digits.
    let cases = [
        ((-0.65, 0.0), (0.65, 0.0), C64::new(0.9, 0.0), C64::new(-0.006_236_394_368_425_425_3, 0.0)),
        (
            (0.2, -0.4),
            (1.194_294_843_469_835, 0.437_482_993_408_998_33),
            C64::new(0.9, 0.3),
            C64::new(-0.005_226_820_979_533_768_1, 0.003_401_650_962_230_381_7),
        ),
    ];
    let mut spec_err = 0.0f64;
    for (p, q, z, tail) in cases {
        let oracle = truncated_spectral_sum(p, q, z, 1.0) + tail;
        let v = resolvent_kernel_plane(p, q, z, 1.0).unwrap();
        spec_err = spec_err.max((v - oracle).norm() / oracle.norm());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let mut failed = 0;
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (p, q, z, b) = lemma3_sample(&mut rng);
        for c in certify_lemma3(&[(p, q)], z, b).unwrap() {
            worst = worst.max(c.value_abs / c.bound);
            failed += usize::from(!c.pass);
        }
    }
    let diag = landau_projector_kernel((0.7, -2.1), (0.7, -2.1), B, 12.0);
    let diag_err = (diag - C64::new(B / (2.0 * std::f64::consts::PI), 0.0)).norm();
    let dt = t.elapsed();
    let pass = u_err <= 1e-12 && spec_err <= 1e-6 && failed == 0 && diag_err <= 1e-10 && within(dt, 60);
    verdict(
        9,
        "kernels and resolvent bound certificates",
        pass,
        &format!(
            "U identities {u_err:.1e}, spectral-sum rel {spec_err:.1e}, certificates failed {failed}/20000 (max ratio {worst:.3}), projector diagonal {diag_err:.1e}, {dt:.2?}"
        ),
    );
}

#[test]
fn criterion_10_decoupling() {
    // Exactness of the identity needs D ≥ 4 and a disorder-free layer ≥ 3D/4 + 5/4.
    let p = desk(16.0).with_layer(4.25);
    let basis = build_mixed_basis(&p, 8).unwrap();
    let real = sample_disorder(&p, realization_seed(0, 0)).unwrap();
    let ops = [
        assemble_edge(&basis, &p, Side::Left).unwrap(),
        assemble_bulk(&basis, &p, &real).unwrap(),
        assemble_edge(&basis, &p, Side::Right).unwrap(),
    ];
    let full = assemble_full(&basis, &p, &real).unwrap();
    let left = default_branch(&p, &basis, Side::Left).unwrap();
    let right = default_branch(&p, &basis, Side::Right).unwrap();
    let zs = certified_z_grid(&left, &right, p.window(), 8);
    let opts = VerifyOptions::default();
    let mut by_d = Vec::new();
    for d in [4.0, 2.0] {
        let parts = build_partitions(p.l, d, &basis.xs()).unwrap();
        let (e1, e2) = parts.identity_errors();
        let reps: Vec<_> = zs
            .iter()
            .map(|&z| verify_decoupling(z, &full, [&ops[0], &ops[1], &ops[2]], &basis, &parts, &opts).unwrap())
            .collect();
        by_d.push((d, e1.max(e2), reps));
    }
    let (_, ident, reps4) = &by_d[0];
    let (_, _, reps2) = &by_d[1];
    let res = reps4.iter().map(|r| r.residual.max(r.reconstruction)).fold(0.0, f64::max);
    let k4 = reps4.iter().map(|r| r.k_norm).fold(0.0, f64::max);
    let k2 = reps2.iter().map(|r| r.k_norm).fold(0.0, f64::max);
    let decreasing = reps4.iter().zip(reps2).all(|(a, b)| a.k_norm < b.k_norm);
    let pass = !zs.is_empty() && *ident <= 1e-12 && res <= 1e-8 && k4 < 1.0 && decreasing;
    verdict(
        10,
        "decoupling identity on the certified z-grid (L=16, D=4)",
        pass,
        &format!(
            "{} z points, partition identities {ident:.1e}, max residual {res:.1e}, max ‖K‖ {k4:.3} (D=4) vs {k2:.3} (D=2), decreases with D {decreasing}",
            zs.len()
        ),
    );
}

#[test]
fn criterion_11_bulk_currents() {
    let p = desk(12.0);
    let basis = build_mixed_basis(&p, 8).unwrap();
    let bb = bulk_basis(&p, &basis);
    let real = sample_disorder(&p, realization_seed(0, 0)).unwrap();
    let hb = assemble_bulk(&bb, &p, &real).unwrap();
    let vy = assemble_vy(&bb);
    // Δ_ε holds no eigenvalue of H_b, so the window is the 30 lowest states.
    let w = eig_window(&hb, 0.0, 1.5 * B + V0, 1e-9).unwrap();
    let mut pairs = w.pairs.clone();
    pairs.sort_by(|a, b| a.e.total_cmp(&b.e));
    pairs.truncate(30);
    let diag: Vec<f64> = pairs.iter().map(|q| state_current(q, &vy).unwrap().abs()).collect();
    let max_diag = diag.iter().copied().fold(0.0, f64::max);
    let mut cert_fail = 0;
    let mut worst = 0.0f64;
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let c = pairwise_current(&pairs[i], &pairs[j], &vy, p.l, PAIRWISE_SLACK).unwrap();
            worst = worst.max(c.value_re.hypot(c.value_im) / c.bound);
            cert_fail += usize::from(!c.pass);
        }
    }
    let pass = pairs.len() == 30 && max_diag <= 1e-3 && cert_fail == 0;
    verdict(
        11,
        "bulk currents on a 30-state window (L=12)",
        pass,
        &format!(
            "{} states in [{:.4}, {:.4}], max diagonal |J| {max_diag:.2e} vs 1e-3, pairwise failures {cert_fail} (max value/bound {worst:.3})",
            pairs.len(),
            pairs.first().map_or(f64::NAN, |q| q.e),
            pairs.last().map_or(f64::NAN, |q| q.e)
        ),
    );
}

#[test]
fn criterion_12_bulk_count_and_decay() {
    let p = desk(12.0);
    let s = SolverSettings::default();
    let basis = build_mixed_basis(&p, s.resolution).unwrap();
    let bb = bulk_basis(&p, &basis);
    let offset = parse_config(r#"{"B": 1, "L": 12, "V0": 0.2, "epsilon": 0.05}"#).unwrap().diagnostics.level_offset;
    let mut count_fail = 0;
    let mut worst_count = (0, 0.0);
    let mut slopes = Vec::new();
    let mut sampled = 0;
    for sd in 0..20 {
        let real = sample_disorder(&p, realization_seed(0, sd)).unwrap();
        let hb = assemble_bulk(&bb, &p, &real).unwrap();
        let w = eig_window(&hb, p.window().0, p.window().1, 1e-9).unwrap();
        let cert = trace_bound_check(&w.energies(), p.window(), &p);
        if !cert.pass {
            count_fail += 1;
        }
        if cert.count >= worst_count.0 {
            worst_count = (cert.count, cert.bound);
        }
        let (bb2, pairs, _) = bound_bulk_states(&p, &basis, &real, offset, &s).unwrap();
        for q in &pairs {
            sampled += 1;
            if let Some(sl) = decay_profile(q, &bb2, 4 * bb2.nk()).unwrap().slope {
                slopes.push(sl);
            }
        }
    }
    let med = median(&slopes);
    let target = -B / 8.0 * 0.75;
    let pass = count_fail == 0 && med.map_or(false, |m| m <= target);
    verdict(
        12,
        "bulk count below the trace bound; exterior Gaussian slope (L=12, 20 seeds)",
        pass,
        &format!(
            "max bulk count in Δε {} vs bound {:.3e}, count failures {count_fail}; {sampled} bound states, {} slopes, median slope {med:?} vs ≤ {target}",
            worst_count.0,
            worst_count.1,
            slopes.len()
        ),
    );
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let e = e.unwrap().path();
            if e.is_dir() {
                stack.push(e);
            } else {
                out.push((e.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&e).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_13_determinism() {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let doc = r#"{"B": 1, "L": 8, "V0": 0.2, "epsilon": 0.05, "seeds": {"count": 4}, "wegner": {"mode": "fast"}}"#;
    let cfg = parse_config(doc).unwrap();
    let mut mismatched = Vec::new();
    let mut compared = 0;
    for sub in [Subcommand::Spectrum, Subcommand::Classify, Subcommand::Wegner, Subcommand::Hall] {
        let dirs: Vec<_> = ["a", "b"].iter().map(|r| tmp.path().join(format!("{sub}-{r}"))).collect();
        for d in &dirs {
            pool.install(|| run(sub, &cfg, d)).unwrap();
        }
        let (fa, fb) = (files(&dirs[0]), files(&dirs[1]));
        compared += fa.len();
        if fa != fb {
            mismatched.push(sub.name());
        }
    }
    verdict(
        13,
        "byte-identical artifacts on the reference path",
        mismatched.is_empty() && compared > 0,
        &format!("{compared} files compared, mismatching subcommands {mismatched:?}"),
    );
}
