//! Tricomi's confluent hypergeometric function `U(a, b, ρ)` for `b ∈ {1, 2}`
//! and real `ρ > 0`.
//!
//! Three regimes:
//! * `ρ ≤ SERIES_MAX`: the logarithmic series for integer `b`;
//! * `ρ ≥ ASYMPTOTIC_MIN`: the asymptotic expansion with optimal truncation;
//! * in between: Taylor continuation of Kummer's equation inward from the
//!   asymptotic regime. `U` is the recessive solution at infinity, so inward
//!   integration damps the error component along `M`.

use num_complex::Complex64 as C64;

use super::gamma::{digamma, rgamma};
use crate::{Error, Result};

pub const SERIES_MAX: f64 = 8.0;
pub const ASYMPTOTIC_MIN: f64 = 30.0;
/// Starting point of the inward continuation.
const CONTINUATION_START: f64 = 40.0;

fn nonpositive_integer(a: C64) -> Option<u32> {
    if a.im == 0.0 && a.re <= 0.0 && a.re.fract() == 0.0 {
        Some((-a.re) as u32)
    } else {
        None
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveRho(rho))
    }
}

/// `U(a, b, ρ)` with `b` equal to 1 or 2.
pub fn kummer_u(a: C64, b: u32, rho: f64) -> Result<C64> {
    check_rho(rho)?;
    assert!(b == 1 || b == 2, "only b = 1, 2 are supported");
    if let Some(n) = nonpositive_integer(a) {
        return Ok(polynomial(n, b, rho));
    }
    if rho <= SERIES_MAX {
        series(a, b, rho)
    } else if rho >= ASYMPTOTIC_MIN {
        Ok(asymptotic(a, b, rho).0)
    } else {
        Ok(continuation(a, b, rho))
    }
}

/// `dU(a, 1, ρ)/dρ = U(a, 1, ρ) − U(a, 2, ρ)`.
pub fn kummer_u_drho(a: C64, rho: f64) -> Result<C64> {
    Ok(kummer_u(a, 1, rho)? - kummer_u(a, 2, rho)?)
}

/// `U(−n, b, ρ) = (−1)ⁿ Σ_k C(n, k) (b + k)_{n−k} (−ρ)^k`.
fn polynomial(n: u32, b: u32, rho: f64) -> C64 {
    let mut s = 0.0;
    let mut binom = 1.0;
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
        }
        let mut poch = 1.0;
        for i in 0..(n - k) {
            poch *= (b + k + i) as f64;
        }
        s += binom * poch * (-rho).powi(k as i32);
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    C64::new(sign * s, 0.0)
}

/// Logarithmic series (Abramowitz–Stegun 13.1.6 with n = 0, 1).
pub fn series(a: C64, b: u32, rho: f64) -> Result<C64> {
    check_rho(rho)?;
    let ln = rho.ln();
    let mut sum = C64::new(0.0, 0.0);
    let mut term = C64::new(1.0, 0.0); // (a)_r ρ^r / (r! (b)_r)
    let mut r = 0u32;
    let mut psi_a = digamma(a)?;
    let euler = 0.577_215_664_901_532_9;
    let mut psi1 = -euler; // ψ(1 + r)
    let mut psi2 = 1.0 - euler; // ψ(2 + r)
    loop {
        let bracket = match b {
            1 => ln + psi_a - 2.0 * psi1,
            _ => ln + psi_a - psi1 - psi2,
        };
        let contrib = term * bracket;
        sum += contrib;
        if r > 5 && contrib.norm() <= 1e-17 * sum.norm() && term.norm() <= 1e-17 * sum.norm().max(1.0) {
            break;
        }
        if r > 2000 {
            return Err(Error::NoConvergence { index: r as usize });
        }
        let rf = r as f64;
        term *= (a + rf) * rho / ((rf + 1.0) * (rf + b as f64));
        psi_a += 1.0 / (a + rf);
        psi1 += 1.0 / (rf + 1.0);
        psi2 += 1.0 / (rf + 2.0);
        r += 1;
    }
    Ok(match b {
        1 => -rgamma(a) * sum,
        _ => rgamma(a - 1.0) * sum + rgamma(a) / rho,
    })
}

/// Asymptotic expansion `ρ^{−a} Σ_s (a)_s (a − b + 1)_s / s! (−ρ)^{−s}`,
/// truncated at the smallest term. Returns the value and the derivative.
pub fn asymptotic(a: C64, b: u32, rho: f64) -> (C64, C64) {
    let bb = b as f64;
    let mut sum = C64::new(0.0, 0.0);
    let mut dsum = C64::new(0.0, 0.0);
    let mut term = C64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for s in 0..400 {
        let sf = s as f64;
        let mag = term.norm();
        if mag > last {
            break;
        }
        sum += term;
        // d/dρ of ρ^{−a−s}
        dsum += term * (-(a + sf)) / rho;
        if mag <= 1e-17 * sum.norm() {
            break;
        }
        last = mag;
        term *= (a + sf) * (a - bb + 1.0 + sf) / ((sf + 1.0) * (-rho));
    }
    let pref = (-a * rho.ln()).exp();
    (pref * sum, pref * dsum)
}

/// Taylor-series continuation of `ρU'' + (b − ρ)U' − aU = 0` from the
/// asymptotic regime down to `rho`.
pub fn continuation(a: C64, b: u32, rho: f64) -> C64 {
    let start = CONTINUATION_START.max(rho);
    let (mut u, mut du) = asymptotic(a, b, start);
    let mut x = start;
    let bb = b as f64;
    while x > rho {
        let h = -(x - rho).min(2.0).min(0.4 * x);
        let mut c0 = u;
        let mut c1 = du;
        let mut val = c0 + c1 * h;
        let mut der = c1;
        let mut hp = h; // h^{n+1}
        for n in 0..300 {
            let nf = n as f64;
            let c2 = (-(nf + 1.0) * (nf + bb - x) * c1 + (nf + a) * c0) / (x * (nf + 2.0) * (nf + 1.0));
            let t = c2 * hp * h;
            val += t;
            der += c2 * (nf + 2.0) * hp;
            hp *= h;
            c0 = c1;
            c1 = c2;
            if n > 8 && t.norm() <= 1e-18 * val.norm() && (c2 * hp).norm() <= 1e-18 * der.norm().max(1e-300) {
                break;
            }
        }
        u = val;
        du = der;
        x += h;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn polynomial_cases() {
        for rho in [0.1, 1.0, 7.5, 20.0, 50.0] {
            assert!((kummer_u(c(0.0), 1, rho).unwrap() - 1.0).norm() < 1e-12);
            assert!((kummer_u(c(-1.0), 1, rho).unwrap() - (rho - 1.0)).norm() < 1e-12 * rho.max(1.0));
            assert!((kummer_u(c(-1.0), 2, rho).unwrap() - (rho - 2.0)).norm() < 1e-12 * rho.max(1.0));
            assert!((kummer_u_drho(c(-1.0), rho).unwrap() - 1.0).norm() < 1e-12);
            assert!(kummer_u_drho(c(0.0), rho).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_b2_a1() {
        // U(1, 2, ρ) = 1/ρ
        for rho in [0.5, 3.0, 12.0, 40.0] {
            let u = kummer_u(c(1.0), 2, rho).unwrap();
            assert!((u - 1.0 / rho).norm() < 1e-12 / rho, "rho {rho}: {u}");
        }
    }

    #[test]
    fn regimes_agree_at_seams() {
        for a in [C64::new(0.25, 0.0), C64::new(-0.4, 0.9), C64::new(0.7, -0.3)] {
            for b in [1, 2] {
                let s = series(a, b, SERIES_MAX).unwrap();
                let t = continuation(a, b, SERIES_MAX);
                assert!((s - t).norm() / s.norm() < 1e-10, "a {a} b {b}: {s} vs {t}");
                for rho in [25.0, 30.0, 35.0] {
                    let p = asymptotic(a, b, rho).0;
                    let q = continuation(a, b, rho);
                    assert!((p - q).norm() / p.norm() < 1e-8, "rho {rho}: {p} vs {q}");
                }
            }
        }
    }

    #[test]
    fn rejects_nonpositive_rho() {
        assert!(matches!(kummer_u(c(0.5), 1, 0.0), Err(Error::NonPositiveRho(_))));
    }

    /// Reference values from 30-digit arbitrary-precision evaluation.
    const REFERENCE: &[(f64, f64, u32, f64, f64, f64)] = &[
        (0.25, 0.0, 1, 0.3, 1.2319879137226817, 0.0),
        (0.25, 0.0, 1, 2.0, 0.820741156395263, 0.0),
        (0.25, 0.0, 1, 12.0, 0.5346475632702712, 0.0),
        (0.25, 0.0, 1, 22.0, 0.4604682584450663, 0.0),
        (0.25, 0.0, 1, 45.0, 0.38557012841984506, 0.0),
        (0.25, 0.0, 2, 0.3, 2.0339832439763463, 0.0),
        (0.25, 0.0, 2, 2.0, 0.9152306948875467, 0.0),
        (0.25, 0.0, 2, 12.0, 0.5455782032419403, 0.0),
        (0.25, 0.0, 2, 22.0, 0.46564503979952726, 0.0),
        (0.25, 0.0, 2, 45.0, 0.3877006602562382, 0.0),
        (-0.4, 0.9, 1, 0.3, 1.1357458683299062, 2.3327384788102945),
        (-0.4, 0.9, 1, 2.0, 1.7416480748016105, -0.7748247207310855),
        (-0.4, 0.9, 1, 12.0, -1.6403670458197634, -2.345197148733607),
        (-0.4, 0.9, 1, 22.0, -3.2824434950591193, -1.3530580458393873),
        (-0.4, 0.9, 1, 45.0, -4.485420440034856, 1.2352594127941827),
        (-0.4, 0.9, 2, 0.3, -2.2704144173887997, 6.795559752009),
        (-0.4, 0.9, 2, 2.0, 2.081591674839752, 0.10215378804123924),
        (-0.4, 0.9, 2, 12.0, -1.4081841397918995, -2.408724034594344),
        (-0.4, 0.9, 2, 22.0, -3.1702884973377747, -1.4691466302932854),
        (-0.4, 0.9, 2, 45.0, -4.4721694406237935, 1.133453370620886),
        (0.7, -0.3, 1, 0.3, 1.3908947867850852, 0.060748716625180894),
        (0.7, -0.3, 1, 2.0, 0.5001427052389413, 0.17869472245599155),
        (0.7, -0.3, 1, 12.0, 0.12139332831256897, 0.11934427949340061),
        (0.7, -0.3, 1, 22.0, 0.06610922386821762, 0.09152388102035627),
        (0.7, -0.3, 1, 45.0, 0.02812752089077646, 0.06302672641842597),
        (0.7, -0.3, 2, 0.3, 3.388720676778074, -0.38061881127058006),
        (0.7, -0.3, 2, 2.0, 0.6647839218346282, 0.1798144807390342),
        (0.7, -0.3, 2, 12.0, 0.13088014479714952, 0.12326819574934203),
        (0.7, -0.3, 2, 22.0, 0.06933979271477464, 0.09351516254602238),
        (0.7, -0.3, 2, 45.0, 0.02896761157932691, 0.06381312096987561),
        (-2.3, 0.05, 1, 0.3, 1.8342586707152604, -0.09733899904248625),
        (-2.3, 0.05, 1, 2.0, -2.69361105518449, 0.03333283265434039),
        (-2.3, 0.05, 1, 12.0, 178.30387117213772, -17.53792266930056),
        (-2.3, 0.05, 1, 22.0, 931.1490708625016, -133.49217134533154),
        (-2.3, 0.05, 1, 45.0, 5517.288214912546, -1031.6783736522625),
        (-2.3, 0.05, 2, 0.3, 2.6083659430646047, 0.6565601206874269),
        (-2.3, 0.05, 2, 2.0, -0.750036822844209, -0.35845458649438433),
        (-2.3, 0.05, 2, 12.0, 134.726214501178, -11.949365661231573),
        (-2.3, 0.05, 2, 22.0, 821.9773817612377, -115.06622380484059),
        (-2.3, 0.05, 2, 45.0, 5220.902692296756, -969.1664899642267),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &(ar, ai, b, rho, ur, ui) in REFERENCE {
            let u = kummer_u(C64::new(ar, ai), b, rho).unwrap();
            let want = C64::new(ur, ui);
            assert!((u - want).norm() <= 1e-11 * want.norm(), "a {ar}+{ai}i b {b} rho {rho}: {u} vs {want}");
        }
    }

    #[test]
    fn matches_integral_representation() {
        // Γ(a)U(a,1;ρ) = ∫₀^∞ e^{−ρt} t^{a−1}(1+t)^{−a} dt, adaptive quadrature at 80 digits.
        let u = kummer_u(c(0.25), 1, 2.0).unwrap();
        assert!((u - 0.820_741_156_395_263_0).norm() < 1e-8, "{u}");
    }

    #[test]
    fn derivative_relation_matches_finite_difference() {
        let a = c(0.25);
        let h = 1e-4;
        let fd = (kummer_u(a, 1, 2.0 + h).unwrap() - kummer_u(a, 1, 2.0 - h).unwrap()) / (2.0 * h);
        let d = kummer_u_drho(a, 2.0).unwrap();
        assert!((fd - d).norm() < 1e-6, "{fd} vs {d}");
        // −a·U(a+1, 2; ρ) at 80 digits.
        assert!((d - (-0.094_489_538_492_283_70)).norm() < 1e-10, "{d}");
    }
}
