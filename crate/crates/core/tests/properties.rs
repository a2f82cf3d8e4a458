use proptest::prelude::*;

use qhedge::basis::build_mixed_basis;
use qhedge::config::parse_config;
use qhedge::decouple::{build_partitions, smoothstep};
use qhedge::experiments::{median, wilson};
use qhedge::linalg::dotc;
use qhedge::model::{realization_seed, sample_disorder, ModelParams};
use qhedge::operators::{assemble_full, assemble_vy};
use qhedge::specfun::{kummer_u, landau_projector_plane, resolvent_kernel_plane};
use qhedge::C64;

fn cvec(seed: u64, n: usize) -> Vec<C64> {
    use rand::{Rng, SeedableRng};
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wilson_interval_contains_estimate(n in 1usize..2000, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac).floor() as usize;
        let w = wilson(k, n);
        prop_assert!(0.0 <= w.lo && w.lo <= w.p && w.p <= w.hi && w.hi <= 1.0);
    }

    #[test]
    fn median_lies_between_extremes(v in prop::collection::vec(-1e3f64..1e3, 1..40)) {
        let m = median(&v).unwrap();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(lo <= m && m <= hi);
    }

    #[test]
    fn smoothstep_is_monotone(a in -0.5f64..1.5, b in -0.5f64..1.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(smoothstep(lo) <= smoothstep(hi));
        prop_assert!((0.0..=1.0).contains(&smoothstep(a)));
    }

    #[test]
    fn sharp_and_smooth_partitions_compose_to_one(l in 16u32..40, dfrac in 0.1f64..0.25, x in -30.0f64..30.0) {
        let l = l as f64;
        let d = (dfrac * l).max(2.0);
        let p = build_partitions(l, d, &[x]).unwrap();
        let (e1, e2) = p.identity_errors();
        prop_assert!(e1 <= 1e-12);
        prop_assert_eq!(e2, 0.0);
        prop_assert!(p.smooth.iter().all(|v| (0.0..=1.0).contains(&v[0])));
    }

    #[test]
    fn kernel_symmetry(x in -2.0f64..2.0, y in -2.0f64..2.0, dx in 0.5f64..3.0, dy in -2.0f64..2.0,
                       zr in 0.55f64..1.45, zi in -1.0f64..1.0) {
        let p = (x, y);
        let q = (x + dx, y + dy);
        let z = C64::new(zr, zi);
        let a = resolvent_kernel_plane(p, q, z, 1.0).unwrap();
        let b = resolvent_kernel_plane(q, p, z.conj(), 1.0).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1e-300));
    }

    #[test]
    fn projector_modulus_is_gaussian(x in -3.0f64..3.0, y in -3.0f64..3.0, xp in -3.0f64..3.0, yp in -3.0f64..3.0) {
        let r2 = (x - xp).powi(2) + (y - yp).powi(2);
        let v = landau_projector_plane((x, y), (xp, yp), 1.0);
        let m = (-0.25 * r2).exp() / (2.0 * std::f64::consts::PI);
        prop_assert!((v.norm() - m).abs() <= 1e-15);
    }

    #[test]
    fn laguerre_reduction(rho in 0.05f64..60.0) {
        // U(−2, 1; ρ) = 2!·L₂(ρ) = ρ² − 4ρ + 2
        let u = kummer_u(C64::new(-2.0, 0.0), 1, rho).unwrap();
        let exact = rho * rho - 4.0 * rho + 2.0;
        prop_assert!((u - exact).norm() <= 1e-11 * exact.abs().max(1.0));
    }

    #[test]
    fn disorder_is_reproducible_and_bounded(base in any::<u64>(), idx in 0u64..1000) {
        let p = ModelParams::new(1.0, 8.0, 0.2, 0.05);
        let s = realization_seed(base, idx);
        let a = sample_disorder(&p, s).unwrap();
        let b = sample_disorder(&p, s).unwrap();
        let av: Vec<_> = a.sites().collect();
        prop_assert_eq!(&av, &b.sites().collect::<Vec<_>>());
        prop_assert!(av.iter().all(|(_, _, x)| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn config_round_trip(b in 1.0f64..3.0, vfrac in 0.1f64..0.24, efrac in 0.1f64..0.9, l in 4u32..30, count in 0u64..100) {
        let v0 = vfrac * b;
        let doc = format!(r#"{{"B": {b}, "L": {l}, "V0": {v0}, "epsilon": {}, "seeds": {{"count": {count}}}}}"#, efrac * v0);
        let c = parse_config(&doc).unwrap();
        let c2 = parse_config(&c.canonical_json()).unwrap();
        prop_assert_eq!(c.canonical_json(), c2.canonical_json());
        prop_assert_eq!(&c, &c2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn assembled_operators_are_hermitian(seed in 0u64..1000, vs in 0u64..1000) {
        let p = ModelParams::new(1.0, 8.0, 0.2, 0.05);
        let basis = build_mixed_basis(&p, 8).unwrap();
        let real = sample_disorder(&p, realization_seed(0, seed)).unwrap();
        let h = assemble_full(&basis, &p, &real).unwrap();
        let vy = assemble_vy(&basis);
        let u = cvec(vs, h.dim());
        let v = cvec(vs + 1, h.dim());
        for op in [&h, &vy] {
            let a = dotc(&u, &op.matvec(&v));
            let b = dotc(&op.matvec(&u), &v);
            prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0));
        }
    }
}
