//! Periodic finite differences acting on indices.

/// `D₊ᵖ u` with `(D₊u)ᵢ = u₍ᵢ₊₁₎ − uᵢ`, indices taken mod `m`. `p = 0` copies.
pub fn forward_difference(p: usize, u: &[f64]) -> Vec<f64> {
    let m = u.len();
    let mut cur = u.to_vec();
    for _ in 0..p {
        cur = (0..m).map(|i| cur[(i + 1) % m] - cur[i]).collect();
    }
    cur
}

/// `D₋ᵖ u` with `D₋ = −D₊ᵀ`, i.e. `(D₋u)ᵢ = uᵢ − u₍ᵢ₋₁₎`.
pub fn backward_difference(p: usize, u: &[f64]) -> Vec<f64> {
    let m = u.len();
    let mut cur = u.to_vec();
    for _ in 0..p {
        cur = (0..m).map(|i| cur[i] - cur[(i + m - 1) % m]).collect();
    }
    cur
}

/// `Lⁿ u` with `L = D₋D₊`, the periodic second difference `(1, −2, 1)`.
pub fn laplacian_power(n: usize, u: &[f64]) -> Vec<f64> {
    let m = u.len();
    let mut cur = u.to_vec();
    for _ in 0..n {
        cur = (0..m)
            .map(|i| cur[(i + 1) % m] - 2.0 * cur[i] + cur[(i + m - 1) % m])
            .collect();
    }
    cur
}
