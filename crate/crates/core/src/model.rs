//! Physical parameters, confining walls, the impurity bump and disorder sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Support radius of a single impurity bump.
pub const BUMP_RADIUS: f64 = 0.25;

/// Sup-norm of the coupling density `h(t) = (15/16)(1 - t²)²`.
pub const COUPLING_DENSITY_SUP: f64 = 15.0 / 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One confining wall `c·d^m` where `d` is the distance past the strip edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerWall {
    pub coeff: f64,
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "V0")]
    pub v0: f64,
    pub epsilon: f64,
    pub c1: f64,
    pub c2: f64,
    pub m1: f64,
    pub m2: f64,
    pub left: PowerWall,
    pub right: PowerWall,
    /// Truncation margin beyond each strip edge.
    #[serde(rename = "W")]
    pub w: f64,
    /// Width of the disorder-free layer at each edge; at least `ln L`.
    pub layer: f64,
    pub seed_base: u64,
}

impl ModelParams {
    /// Parameters with the default confinement (`1.0·d²` left, `1.3·d²` right),
    /// the minimal truncation margin and the minimal layer `ln L`.
    pub fn new(b: f64, l: f64, v0: f64, epsilon: f64) -> Self {
        let mut p = ModelParams {
            b,
            l,
            v0,
            epsilon,
            c1: 1.0,
            c2: 1.3,
            m1: 2.0,
            m2: 2.0,
            left: PowerWall { coeff: 1.0, exponent: 2.0 },
            right: PowerWall { coeff: 1.3, exponent: 2.0 },
            w: 0.0,
            layer: l.ln(),
            seed_base: 0,
        };
        p.w = p.minimal_margin();
        p
    }

    /// Smallest `W` with `c1·W^m1 ≥ B/2 + V0 + 10B`.
    pub fn minimal_margin(&self) -> f64 {
        ((0.5 * self.b + self.v0 + 10.0 * self.b) / self.c1).powf(1.0 / self.m1)
    }

    pub fn magnetic_length(&self) -> f64 {
        1.0 / self.b.sqrt()
    }

    /// The analysis window `[B/2 + ε, B/2 + V0]`.
    pub fn window(&self) -> (f64, f64) {
        (0.5 * self.b + self.epsilon, 0.5 * self.b + self.v0)
    }

    pub fn with_layer(mut self, layer: f64) -> Self {
        self.layer = layer;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidParams(s));
        let finite = [
            self.b, self.l, self.v0, self.epsilon, self.c1, self.c2, self.m1, self.m2, self.w,
            self.layer,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if !(self.b > 0.0) {
            return bad(format!("B > 0 violated (B = {})", self.b));
        }
        if !(self.v0 > 0.0) {
            return bad(format!("V0 > 0 violated (V0 = {})", self.v0));
        }
        if !(self.b > 4.0 * self.v0) {
            return bad(format!("B > 4·V0 violated (B = {}, V0 = {})", self.b, self.v0));
        }
        if !(self.epsilon > 0.0 && self.epsilon < self.v0) {
            return bad(format!(
                "0 < epsilon < V0 violated (epsilon = {}, V0 = {})",
                self.epsilon, self.v0
            ));
        }
        if !(self.c1 > 0.0 && self.c1 < self.c2) {
            return bad(format!("0 < c1 < c2 violated (c1 = {}, c2 = {})", self.c1, self.c2));
        }
        if !(self.m1 >= 2.0 && self.m1 <= self.m2) {
            return bad(format!("2 ≤ m1 ≤ m2 violated (m1 = {}, m2 = {})", self.m1, self.m2));
        }
        if self.l < 4.0 || self.l.fract() != 0.0 {
            return bad(format!("L must be an integer ≥ 4 (L = {})", self.l));
        }
        if self.layer < self.l.ln() {
            return bad(format!("layer ≥ ln L violated (layer = {}, ln L = {})", self.layer, self.l.ln()));
        }
        let need = 0.5 * self.b + self.v0 + 10.0 * self.b;
        if self.c1 * self.w.powf(self.m1) < need * (1.0 - 1e-12) {
            return bad(format!(
                "c1·W^m1 ≥ B/2 + V0 + 10B violated (W = {}, required {})",
                self.w,
                self.minimal_margin()
            ));
        }
        for (name, wall) in [("left", self.left), ("right", self.right)] {
            if !(wall.exponent >= self.m1 && wall.exponent <= self.m2) {
                return bad(format!("{name} wall exponent outside [m1, m2]"));
            }
            let ok = wall.coeff >= self.c1 && wall.coeff <= self.c2;
            if !ok {
                return bad(format!("{name} wall coefficient outside [c1, c2]"));
            }
        }
        Ok(())
    }

    pub fn wall(&self, side: Side) -> ConfiningPotential {
        let w = match side {
            Side::Left => self.left,
            Side::Right => self.right,
        };
        ConfiningPotential { side, coeff: w.coeff, exponent: w.exponent, half_width: 0.5 * self.l }
    }

    /// Inclusive column range `[ceil(-L/2 + layer), floor(L/2 - layer)]`.
    pub fn column_range(&self) -> (i64, i64) {
        let lo = (-0.5 * self.l + self.layer).ceil() as i64;
        let hi = (0.5 * self.l - self.layer).floor() as i64;
        (lo, hi)
    }

    /// Half-open row range `[-L/2, L/2)` as an inclusive pair.
    pub fn row_range(&self) -> (i64, i64) {
        let lo = (-0.5 * self.l).ceil() as i64;
        (lo, lo + self.l as i64 - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfiningPotential {
    pub side: Side,
    pub coeff: f64,
    pub exponent: f64,
    pub half_width: f64,
}

impl ConfiningPotential {
    pub fn eval(&self, x: f64) -> f64 {
        let d = match self.side {
            Side::Right => x - self.half_width,
            Side::Left => -x - self.half_width,
        };
        if d > 0.0 {
            self.coeff * d.powf(self.exponent)
        } else {
            0.0
        }
    }
}

/// `V(r) = V0 (1 - 16 r²)³` inside radius 1/4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpProfile {
    pub amplitude: f64,
}

impl BumpProfile {
    pub fn eval_r2(&self, r2: f64) -> f64 {
        if r2 >= BUMP_RADIUS * BUMP_RADIUS {
            return 0.0;
        }
        let s = 1.0 - 16.0 * r2;
        self.amplitude * s * s * s
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_r2(x * x + y * y)
    }
}

/// Splittable 64-bit mixing of the seed root with a realization index.
pub fn realization_seed(seed_base: u64, index: u64) -> u64 {
    let mut z = seed_base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One draw from `h(t) = (15/16)(1 - t²)²` by rejection against the uniform law.
pub fn sample_coupling<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let t: f64 = rng.gen_range(-1.0..=1.0);
        let g = 1.0 - t * t;
        if rng.gen::<f64>() < g * g {
            return t;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisorderRealization {
    pub seed: u64,
    pub l: f64,
    pub bump: BumpProfile,
    pub n_range: (i64, i64),
    pub m_range: (i64, i64),
    /// Couplings in column-major lattice order: index `(n - n0)·rows + (m - m0)`.
    pub couplings: Vec<f64>,
}

pub fn sample_disorder(params: &ModelParams, seed: u64) -> Result<DisorderRealization> {
    params.validate()?;
    let n_range = params.column_range();
    let m_range = params.row_range();
    if n_range.0 > n_range.1 {
        return Err(Error::EmptyLattice { l: params.l, layer: params.layer });
    }
    let count = ((n_range.1 - n_range.0 + 1) * (m_range.1 - m_range.0 + 1)) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let couplings = (0..count).map(|_| sample_coupling(&mut rng)).collect();
    Ok(DisorderRealization {
        seed,
        l: params.l,
        bump: BumpProfile { amplitude: params.v0 },
        n_range,
        m_range,
        couplings,
    })
}

impl DisorderRealization {
    /// Realization with every coupling set to `value`; `0.0` gives the clean system.
    pub fn uniform(params: &ModelParams, value: f64) -> Result<Self> {
        let mut r = sample_disorder(params, 0)?;
        r.couplings.iter_mut().for_each(|c| *c = value);
        Ok(r)
    }

    pub fn rows(&self) -> usize {
        (self.m_range.1 - self.m_range.0 + 1) as usize
    }

    pub fn site_count(&self) -> usize {
        self.couplings.len()
    }

    pub fn coupling(&self, n: i64, m: i64) -> f64 {
        let i = (n - self.n_range.0) as usize * self.rows() + (m - self.m_range.0) as usize;
        self.couplings[i]
    }

    /// Iterates `(n, m, X_nm)` in lattice order.
    pub fn sites(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        let rows = self.rows();
        self.couplings.iter().enumerate().map(move |(i, &c)| {
            (self.n_range.0 + (i / rows) as i64, self.m_range.0 + (i % rows) as i64, c)
        })
    }

    /// Reduces `y` to `[-L/2, L/2)`.
    pub fn reduce_y(&self, y: f64) -> f64 {
        let h = 0.5 * self.l;
        let r = (y + h).rem_euclid(self.l) - h;
        if r >= h {
            -h
        } else {
            r
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let n = x.round();
        let ni = n as i64;
        if ni < self.n_range.0 || ni > self.n_range.1 {
            return 0.0;
        }
        let y = self.reduce_y(y);
        let m = y.round();
        let dx = x - n;
        let dy = y - m;
        let r2 = dx * dx + dy * dy;
        if r2 >= BUMP_RADIUS * BUMP_RADIUS {
            return 0.0;
        }
        let mut mi = m as i64;
        let rows = self.rows() as i64;
        if mi > self.m_range.1 {
            mi -= rows;
        }
        if mi < self.m_range.0 {
            mi += rows;
        }
        self.coupling(ni, mi) * self.bump.eval_r2(r2)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let sites: Vec<serde_json::Value> =
            self.sites().map(|(n, m, x)| serde_json::json!([n, m, x])).collect();
        serde_json::json!({ "seed": self.seed, "sites": sites })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk(l: f64) -> ModelParams {
        ModelParams::new(1.0, l, 0.2, 0.05)
    }

    #[test]
    fn margin_meets_wall_requirement() {
        let p = desk(8.0);
        assert!((p.w - 10.7f64.sqrt()).abs() < 1e-12);
        p.validate().unwrap();
    }

    #[test]
    fn rejects_strong_disorder() {
        let mut p = desk(8.0);
        p.v0 = 0.3;
        let msg = p.validate().unwrap_err().to_string();
        assert!(msg.contains("B > 4·V0"), "{msg}");
    }

    #[test]
    fn lattice_size_l8() {
        let p = desk(8.0);
        let r = sample_disorder(&p, 1).unwrap();
        // ln 8 ≈ 2.08: columns -1..=1, rows -4..=3
        assert_eq!(r.n_range, (-1, 1));
        assert_eq!(r.m_range, (-4, 3));
        assert_eq!(r.site_count(), 24);
        assert_eq!(r, sample_disorder(&p, 1).unwrap());
    }

    #[test]
    fn tiny_strip_has_no_lattice() {
        let mut p = desk(4.0);
        p.layer = 2.1;
        assert!(matches!(sample_disorder(&p, 1), Err(Error::EmptyLattice { .. })));
    }

    #[test]
    fn bump_center_and_outside() {
        let p = desk(8.0);
        let r = DisorderRealization::uniform(&p, 1.0).unwrap();
        assert_eq!(r.eval(0.0, 0.0), 0.2);
        assert_eq!(r.eval(0.5, 0.5), 0.0);
        assert_eq!(r.eval(3.0, 0.0), 0.0);
    }

    #[test]
    fn coupling_mean_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_coupling(&mut rng)).sum::<f64>() / n as f64;
        // Var h = 1/7
        let se = (1.0 / 7.0 / n as f64).sqrt();
        assert!(mean.abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn walls_vanish_inside_and_lie_in_envelope() {
        let p = desk(8.0);
        let r = p.wall(Side::Right);
        let l = p.wall(Side::Left);
        assert_eq!(r.eval(0.0), 0.0);
        assert_eq!(l.eval(0.0), 0.0);
        let u = r.eval(5.0);
        assert!(u >= p.c1 && u <= p.c2);
        assert!(r.eval(5.5) > r.eval(5.4));
        assert!(l.eval(-5.5) > l.eval(-5.4));
    }

    #[test]
    fn seeds_differ_by_index() {
        let a = realization_seed(7, 0);
        let b = realization_seed(7, 1);
        assert_ne!(a, b);
        assert_eq!(a, realization_seed(7, 0));
    }
}
