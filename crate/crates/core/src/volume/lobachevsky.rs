use std::f64::consts::PI;
use std::sync::OnceLock;

const TERMS: usize = 40;

/// `zeta(2k) / (k (2k + 1))` for `k = 1..=TERMS`.
fn coefficients() -> &'static [f64; TERMS] {
    static TABLE: OnceLock<[f64; TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; TERMS];
        let exact = [PI.powi(2) / 6.0, PI.powi(4) / 90.0, PI.powi(6) / 945.0, PI.powi(8) / 9450.0];
        for (i, slot) in out.iter_mut().enumerate() {
            let k = i + 1;
            let zeta = if k <= exact.len() {
                exact[k - 1]
            } else {
                let s = 2 * k as i32;
                let direct: f64 = (1..=50).rev().map(|m| (m as f64).powi(-s)).sum();
                // tail of the sum beyond m = 50
                direct + 50.5f64.powi(1 - s) / (s as f64 - 1.0)
            };
            *slot = zeta / (k as f64 * (2 * k + 1) as f64);
        }
        out
    })
}

/// Clausen function `Cl_2(theta)` for `theta` in `[-pi, pi]`.
fn clausen_reduced(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let r = (theta / (2.0 * PI)).powi(2);
    let mut p = theta;
    let mut series = 0.0;
    for c in coefficients() {
        p *= r;
        series += c * p;
    }
    theta - theta * theta.abs().ln() + series
}

/// The Lobachevsky function `Λ(x) = -∫_0^x log|2 sin t| dt`.
pub fn lobachevsky(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // reduce to (-pi/2, pi/2]
    let mut y = x - PI * (x / PI).round();
    if y <= -PI / 2.0 {
        y += PI;
    }
    0.5 * clausen_reduced(2.0 * y)
}
