//! Semi-analytic critical couplings of the four-dimensional lattice φ⁴
//! theory, used as the reference for `α_N = κ_crit / κ_crit^(N)`.

/// `(λ, κ_crit)` pairs.
pub const CRITICAL_KAPPA: [(f64, f64); 7] = [
    (0.001, 0.125202),
    (0.005, 0.125991),
    (0.01, 0.126968),
    (0.02, 0.128604),
    (0.03, 0.130096),
    (0.04, 0.133096),
    (0.07, 0.133825),
];

/// Reference κ_crit for a tabulated λ (exact match within 1e-12).
pub fn critical_kappa(lambda: f64) -> Option<f64> {
    CRITICAL_KAPPA
        .iter()
        .find(|(l, _)| (l - lambda).abs() < 1e-12)
        .map(|&(_, k)| k)
}
