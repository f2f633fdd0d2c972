//! Sampling overhead and shot allocation for a linear combination of estimates.
//!
//! For coefficients η the optimal split `s_i ∝ |η_i|` costs `c = γ²` times the
//! shots of an unmitigated estimate (`γ = ‖η‖₁`); an equal split costs
//! `c̃ = M ‖η‖₂²`.

use serde::{Deserialize, Serialize};

use crate::error::{LreError, Result};
use crate::interpolation::{default_scale_factors, eta_coefficients, EtaCoefficients};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub gamma: f64,
    pub gamma_tilde: f64,
    pub c: f64,
    pub c_tilde: f64,
    /// Shots per circuit; all zero in exact mode.
    pub allocations: Vec<u64>,
    /// Zero in exact mode.
    pub s_tot: u64,
}

impl BudgetReport {
    /// Norms only, for exact (shot-free) evaluation.
    pub fn exact(eta: &EtaCoefficients) -> Self {
        let gamma = eta.one_norm();
        let gamma_tilde = eta.two_norm();
        Self {
            gamma,
            gamma_tilde,
            c: gamma * gamma,
            c_tilde: eta.len() as f64 * gamma_tilde * gamma_tilde,
            allocations: vec![0; eta.len()],
            s_tot: 0,
        }
    }

    /// Standard deviation bound `γ / (2 √s_tot)` for estimates of a [0, 1]-valued
    /// observable under the optimal split.
    pub fn std_bound(&self) -> Option<f64> {
        (self.s_tot > 0).then(|| self.gamma / (2.0 * (self.s_tot as f64).sqrt()))
    }
}

pub fn overhead(eta: &EtaCoefficients, s_tot: u64) -> Result<BudgetReport> {
    let allocations = allocate(eta, s_tot)?;
    Ok(BudgetReport {
        allocations,
        s_tot,
        ..BudgetReport::exact(eta)
    })
}

/// Integer shots `s_i ∝ |η_i|` by largest remainder, at least one per circuit,
/// summing exactly to `s_tot`. Ties go to the lower index.
pub fn allocate(eta: &EtaCoefficients, s_tot: u64) -> Result<Vec<u64>> {
    let m = eta.len();
    if m == 0 || s_tot < m as u64 {
        return Err(LreError::BudgetTooSmall { s_tot, circuits: m });
    }
    let gamma = eta.one_norm();
    let quotas: Vec<f64> = eta
        .values()
        .iter()
        .map(|e| s_tot as f64 * e.abs() / gamma)
        .collect();
    let mut shots: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
    let assigned: u64 = shots.iter().sum();
    let mut leftover = s_tot.saturating_sub(assigned);

    // Fractional parts are quantized so that mathematically equal remainders
    // tie exactly despite rounding in the quotas.
    let mut order: Vec<usize> = (0..m).collect();
    let key = |i: usize| ((quotas[i] - quotas[i].floor()) * 1e9).round() as i64;
    order.sort_by_key(|&i| std::cmp::Reverse(key(i)));
    for &i in order.iter().cycle() {
        if leftover == 0 {
            break;
        }
        shots[i] += 1;
        leftover -= 1;
    }

    // Floating error could overshoot by a shot; take it back from the largest.
    while shots.iter().sum::<u64>() > s_tot {
        let j = argmax(&shots);
        shots[j] -= 1;
    }

    for i in 0..m {
        if shots[i] == 0 {
            let j = argmax(&shots);
            shots[j] -= 1;
            shots[i] = 1;
        }
    }
    Ok(shots)
}

fn argmax(values: &[u64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadPoint {
    pub l: usize,
    pub d: u32,
    pub delta: u32,
    pub gamma: f64,
    pub c: f64,
    pub c_tilde: f64,
}

pub fn overhead_point(l: usize, d: u32, delta: u32) -> Result<OverheadPoint> {
    let eta = eta_coefficients(&default_scale_factors(l, d, delta)?)?;
    let report = BudgetReport::exact(&eta);
    Ok(OverheadPoint {
        l,
        d,
        delta,
        gamma: report.gamma,
        c: report.c,
        c_tilde: report.c_tilde,
    })
}

/// Overhead `c` against the number of chunks under the default scale-factor pattern.
pub fn overhead_curve(
    layers: impl IntoIterator<Item = usize>,
    d: u32,
    delta: u32,
) -> Result<Vec<OverheadPoint>> {
    layers.into_iter().map(|l| overhead_point(l, d, delta)).collect()
}

/// Overhead `c` against the gap Δ for a fixed chunk count.
pub fn overhead_vs_delta(
    l: usize,
    d: u32,
    deltas: impl IntoIterator<Item = u32>,
) -> Result<Vec<OverheadPoint>> {
    deltas.into_iter().map(|delta| overhead_point(l, d, delta)).collect()
}
