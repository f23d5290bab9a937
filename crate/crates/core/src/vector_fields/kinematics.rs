//! Knife-edge position sensing with a radially polarized beam.
//!
//! The field is `(x e_H + y e_V) exp(-(x² + y²))` (waist 1). An opaque edge
//! blocks `x < x0`; the transmitted light is integrated into one global
//! Stokes vector. The V-polarized transmitted power falls monotonically with
//! `x0`, which makes it a usable calibration variable; `S1` alone is not
//! monotone.

use std::sync::OnceLock;

use super::stokes::StokesVector;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Edge positions covered by the calibration curve, in waists.
pub const CALIBRATED_RANGE: f64 = 3.0;
pub const CALIBRATION_POINTS: usize = 401;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnifeEdge {
    /// Gauss-Legendre order per axis.
    pub order: usize,
    /// The integration window is `[-half_width, half_width]²` before masking.
    pub half_width: f64,
}

impl Default for KnifeEdge {
    fn default() -> Self {
        Self { order: 201, half_width: 6.0 }
    }
}

impl KnifeEdge {
    /// Global Stokes vector of the light passing the edge at `x0`
    /// (`-inf` for no obstruction).
    pub fn integrated_stokes(&self, x0: f64) -> StokesVector {
        let l = self.half_width;
        let lower = x0.max(-l);
        if lower >= l {
            return StokesVector([0.0; 4]);
        }
        let xs = gauss_legendre(self.order, lower, l);
        let ys = gauss_legendre(self.order, -l, l);
        let mut s = [0.0; 4];
        for (&x, &wx) in xs.nodes.iter().zip(&xs.weights) {
            for (&y, &wy) in ys.nodes.iter().zip(&ys.weights) {
                let w = wx * wy * (-2.0 * (x * x + y * y)).exp();
                s[0] += w * (x * x + y * y);
                s[1] += w * (x * x - y * y);
                s[2] += w * 2.0 * x * y;
            }
        }
        StokesVector(s)
    }
}

/// Transmitted V-polarized power relative to the unobstructed beam.
fn v_fraction(s: &StokesVector, v_total: f64) -> f64 {
    0.5 * (s.0[0] - s.0[1]) / v_total
}

/// Monotone cubic (Fritsch-Carlson) fit of the V fraction against `x0`.
#[derive(Debug, Clone)]
pub struct Calibration {
    geometry: KnifeEdge,
    v_total: f64,
    xs: Vec<f64>,
    qs: Vec<f64>,
    slopes: Vec<f64>,
}

impl Calibration {
    pub fn build(geometry: KnifeEdge) -> Self {
        let n = CALIBRATION_POINTS;
        let open = geometry.integrated_stokes(f64::NEG_INFINITY);
        let v_total = 0.5 * (open.0[0] - open.0[1]);
        let xs: Vec<f64> =
            (0..n).map(|i| -CALIBRATED_RANGE + 2.0 * CALIBRATED_RANGE * i as f64 / (n - 1) as f64).collect();
        let qs: Vec<f64> = xs.iter().map(|&x| v_fraction(&geometry.integrated_stokes(x), v_total)).collect();
        let slopes = pchip_slopes(&xs, &qs);
        Self { geometry, v_total, xs, qs, slopes }
    }

    pub fn geometry(&self) -> KnifeEdge {
        self.geometry
    }

    fn eval(&self, k: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.qs[k]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[k]
            + (-2.0 * t3 + 3.0 * t2) * self.qs[k + 1]
            + (t3 - t2) * h * self.slopes[k + 1]
    }

    /// Edge position whose calibrated V fraction matches `stokes`; clamps to
    /// the ends of the calibrated range.
    pub fn estimate(&self, stokes: &StokesVector) -> f64 {
        let q = v_fraction(stokes, self.v_total);
        let last = self.xs.len() - 1;
        if q >= self.qs[0] {
            return self.xs[0];
        }
        if q <= self.qs[last] {
            return self.xs[last];
        }
        // qs decreases with x.
        let k = self.qs.partition_point(|&v| v > q).saturating_sub(1).min(last - 1);
        let (mut lo, mut hi) = (self.xs[k], self.xs[k + 1]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.eval(k, mid) > q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    m
}

/// Calibration for the default geometry, built on first use.
pub fn default_calibration() -> &'static Calibration {
    static CAL: OnceLock<Calibration> = OnceLock::new();
    CAL.get_or_init(|| Calibration::build(KnifeEdge::default()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicReading {
    pub x0: f64,
    pub stokes: StokesVector,
    pub estimate: f64,
}

/// Simulates the edge at `x0` and inverts the reading through `calibration`.
/// `x0 = -inf` means no obstruction.
pub fn kinematic_sense(x0: f64, calibration: &Calibration) -> Result<KinematicReading> {
    if x0.is_nan() {
        return Err(Error::InvalidArgument("edge position is NaN".into()));
    }
    if x0 != f64::NEG_INFINITY && x0.abs() > CALIBRATED_RANGE {
        return Err(Error::OutOfRange { value: x0, min: -CALIBRATED_RANGE, max: CALIBRATED_RANGE });
    }
    let stokes = calibration.geometry.integrated_stokes(x0);
    Ok(KinematicReading { x0, stokes, estimate: calibration.estimate(&stokes) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn erfc(x: f64) -> f64 {
        // Independent oracle: composite Simpson on 2/√π ∫_x^∞ e^{-t²} dt.
        let (a, b, n) = (x, x.max(0.0) + 10.0, 20_000);
        let h = (b - a) / n as f64;
        let f = |t: f64| (-t * t).exp();
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        2.0 / PI.sqrt() * s * h / 3.0
    }

    #[test]
    fn open_beam_is_unpolarized() {
        let s = KnifeEdge::default().integrated_stokes(f64::NEG_INFINITY);
        assert!((s.0[0] - PI / 4.0).abs() < 1e-13);
        assert!(s.0[1..].iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn channel_powers_match_closed_form() {
        let g = KnifeEdge::default();
        for x0 in [-2.0, -0.7, 0.0, 0.3, 1.4] {
            let s = g.integrated_stokes(x0);
            let v = 0.5 * (s.0[0] - s.0[1]);
            assert!((v / (PI / 8.0) - 0.5 * erfc(2f64.sqrt() * x0)).abs() < 1e-10, "x0 = {x0}");
            assert!(s.0[2].abs() < 1e-13 && s.0[3] == 0.0);
        }
        // Both modes are parity-symmetric in intensity, so a centred edge
        // passes half of each; off centre the balance tips.
        assert!(g.integrated_stokes(0.0).0[1].abs() < 1e-13);
        assert!(g.integrated_stokes(0.3).0[1] > 1e-3);
        assert!(g.integrated_stokes(-0.3).0[1] < -1e-3);
    }

    #[test]
    fn mirrored_edges_mirror_stokes() {
        let g = KnifeEdge::default();
        let open = g.integrated_stokes(f64::NEG_INFINITY);
        for x0 in [0.25, 0.9, 2.0] {
            let (a, b) = (g.integrated_stokes(x0), g.integrated_stokes(-x0));
            // Blocking x < x0 transmits exactly what blocking x > -x0 removes.
            for i in 0..3 {
                assert!((a.0[i] + b.0[i] - open.0[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn positions_are_recovered() {
        let cal = default_calibration();
        for x0 in [-2.5, -1.0, -0.5, 0.0, 0.3, 1.0, 2.0] {
            let r = kinematic_sense(x0, cal).unwrap();
            assert!((r.estimate - x0).abs() < 1e-4, "{x0} -> {}", r.estimate);
        }
    }

    #[test]
    fn range_handling() {
        let cal = default_calibration();
        let r = kinematic_sense(f64::NEG_INFINITY, cal).unwrap();
        assert_eq!(r.estimate, -CALIBRATED_RANGE);
        assert!(matches!(kinematic_sense(3.5, cal), Err(Error::OutOfRange { .. })));
        assert!(kinematic_sense(f64::INFINITY, cal).is_err());
        assert!(kinematic_sense(f64::NAN, cal).is_err());
    }
}
