//! Complex Gamma and digamma functions.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn nonpositive_integer(w: C64) -> bool {
    w.im == 0.0 && w.re <= 0.0 && w.re.fract() == 0.0
}

/// `ln Γ(w)` for `Re w ≥ 1/2` (principal branch of the Lanczos form).
fn ln_gamma_right(w: C64) -> C64 {
    let w = w - 1.0;
    let mut acc = C64::new(LANCZOS_P[0], 0.0);
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += p / (w + i as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (w + 0.5) * t.ln() - t + acc.ln()
}

pub fn gamma(w: C64) -> Result<C64> {
    if nonpositive_integer(w) {
        return Err(Error::GammaPole(w));
    }
    if w.re < 0.5 {
        // Γ(w) Γ(1 - w) = π / sin(πw)
        let s = (PI * w).sin();
        return Ok(PI / (s * ln_gamma_right(1.0 - w).exp()));
    }
    Ok(ln_gamma_right(w).exp())
}

/// `1/Γ(w)`, entire; zero at the poles of Γ.
pub fn rgamma(w: C64) -> C64 {
    if nonpositive_integer(w) {
        return C64::new(0.0, 0.0);
    }
    if w.re < 0.5 {
        return (PI * w).sin() * ln_gamma_right(1.0 - w).exp() / PI;
    }
    (-ln_gamma_right(w)).exp()
}

pub fn digamma(w: C64) -> Result<C64> {
    if nonpositive_integer(w) {
        return Err(Error::GammaPole(w));
    }
    let mut w = w;
    let mut acc = C64::new(0.0, 0.0);
    while w.re < 10.0 {
        acc -= 1.0 / w;
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    // Stirling tail with Bernoulli coefficients B_2k / 2k.
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 120.0,
        1.0 / 252.0,
        -1.0 / 240.0,
        1.0 / 132.0,
        -691.0 / 32_760.0,
        1.0 / 12.0,
    ];
    let mut tail = C64::new(0.0, 0.0);
    let mut p = inv2;
    for c in C {
        tail += c * p;
        p *= inv2;
    }
    Ok(acc + w.ln() - 0.5 * inv - tail)
}
