// Shared reference values for the integration tests.

/// ln Γ(x) from the Stirling series after shifting x above 15.
pub fn stirling_ln_gamma(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

pub fn stirling_beta(x: f64, y: f64) -> f64 {
    (stirling_ln_gamma(x) + stirling_ln_gamma(y) - stirling_ln_gamma(x + y)).exp()
}
