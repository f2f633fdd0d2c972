//! Multivariate Lagrange extrapolation to the zero-noise point.
//!
//! The expectation value is modelled as a polynomial of total degree `d` in
//! the `l` per-chunk scale factors. With exactly `M = C(d+l, d)` nodes the
//! interpolant is unique whenever the sample matrix `A` (monomials evaluated
//! at the nodes) is non-singular, and its value at any point `x` is a linear
//! combination of the node values whose weights `w` solve `Aᵀ w = m(x)`,
//! `m(x)` being the monomial row at `x`. At `x = 0` that row is `e₁`, which
//! gives the extrapolation coefficients η.
//!
//! By Cramer's rule `w_i = det(A with row i replaced by m(x)) / det(A)`;
//! [`eta_by_determinants`] and [`lagrange_weights_by_determinants`] keep that
//! explicit form around as a reference path.

use serde::{Deserialize, Serialize};

use crate::error::{LreError, Result};
use crate::linalg::{LuFactors, SquareMatrix};

pub use crate::linalg::determinant;

/// `C(d + l, d)`.
pub fn monomial_count(vars: usize, degree: u32) -> usize {
    let d = degree as usize;
    let mut acc: u128 = 1;
    for i in 1..=d {
        acc = acc * (vars + i) as u128 / i as u128;
    }
    acc as usize
}

/// Monomials in `vars` variables of total degree at most `degree`, in graded
/// lexicographic order: by degree, then by exponent vector, largest first
/// (so `λ₁` precedes `λ₂`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialBasis {
    vars: usize,
    degree: u32,
    exponents: Vec<Vec<u32>>,
}

fn push_compositions(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        push_compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

pub fn monomial_basis(vars: usize, degree: u32) -> MonomialBasis {
    assert!(vars >= 1, "a monomial basis needs at least one variable");
    let mut exponents = Vec::with_capacity(monomial_count(vars, degree));
    let mut prefix = Vec::with_capacity(vars);
    for total in 0..=degree {
        push_compositions(total, vars, &mut prefix, &mut exponents);
    }
    MonomialBasis {
        vars,
        degree,
        exponents,
    }
}

impl MonomialBasis {
    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// Every monomial evaluated at `point`.
    pub fn evaluate(&self, point: &[f64]) -> Vec<f64> {
        assert_eq!(point.len(), self.vars, "point has the wrong dimension");
        self.exponents
            .iter()
            .map(|exps| {
                exps.iter()
                    .zip(point)
                    .map(|(&e, &x)| x.powi(e as i32))
                    .product()
            })
            .collect()
    }
}

/// The node set Λ: `M` vectors of odd scale factors, one entry per chunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleFactorConfig {
    vars: usize,
    degree: u32,
    /// Set when built from the default `1 + mΔ` pattern.
    delta: Option<u32>,
    vectors: Vec<Vec<u32>>,
}

impl ScaleFactorConfig {
    pub fn new(vars: usize, degree: u32, vectors: Vec<Vec<u32>>) -> Result<Self> {
        if vars == 0 {
            return Err(LreError::InvalidConfig("at least one chunk is required".into()));
        }
        let m = monomial_count(vars, degree);
        if vectors.len() != m {
            return Err(LreError::LengthMismatch {
                what: "scale-factor vectors",
                expected: m,
                actual: vectors.len(),
            });
        }
        for v in &vectors {
            if v.len() != vars {
                return Err(LreError::LengthMismatch {
                    what: "scale factors per vector",
                    expected: vars,
                    actual: v.len(),
                });
            }
            if let Some(&bad) = v.iter().find(|&&x| x == 0 || x % 2 == 0) {
                return Err(LreError::InvalidScaleFactor(bad));
            }
        }
        Ok(Self {
            vars,
            degree,
            delta: None,
            vectors,
        })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn delta(&self) -> Option<u32> {
        self.delta
    }

    pub fn vectors(&self) -> &[Vec<u32>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn basis(&self) -> MonomialBasis {
        monomial_basis(self.vars, self.degree)
    }
}

/// `λ_i = 1 + m_i Δ` for every non-negative integer vector `m_i` with
/// `|m_i|₁ <= d`, in the graded-lex order of the `m_i`.
pub fn default_scale_factors(vars: usize, degree: u32, delta: u32) -> Result<ScaleFactorConfig> {
    if delta < 2 || delta % 2 != 0 {
        return Err(LreError::InvalidDelta(delta));
    }
    if vars == 0 {
        return Err(LreError::InvalidConfig("at least one chunk is required".into()));
    }
    let vectors = monomial_basis(vars, degree)
        .exponents
        .iter()
        .map(|m| m.iter().map(|&k| 1 + k * delta).collect())
        .collect();
    Ok(ScaleFactorConfig {
        vars,
        degree,
        delta: Some(delta),
        vectors,
    })
}

/// `a_ij = M_j(λ_i)`, checked non-singular at construction.
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    basis: MonomialBasis,
    matrix: SquareMatrix,
    lu: LuFactors,
}

pub fn sample_matrix(config: &ScaleFactorConfig) -> Result<SampleMatrix> {
    let basis = config.basis();
    let rows = config
        .vectors
        .iter()
        .map(|v| {
            let point: Vec<f64> = v.iter().map(|&x| f64::from(x)).collect();
            basis.evaluate(&point)
        })
        .collect();
    let matrix = SquareMatrix::from_rows(rows);
    let lu = LuFactors::factor(&matrix).map_err(|s| LreError::SingularSampleMatrix {
        column: s.column,
        pivot: s.pivot,
    })?;
    Ok(SampleMatrix { basis, matrix, lu })
}

impl SampleMatrix {
    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn determinant(&self) -> f64 {
        self.lu.determinant()
    }

    /// Weights `w` with `P(point) = Σ w_i z_i` for the interpolant through the nodes.
    pub fn lagrange_weights(&self, point: &[f64]) -> Vec<f64> {
        self.lu.solve_transposed(&self.basis.evaluate(point))
    }
}

/// Extrapolation coefficients η; they sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EtaCoefficients(Vec<f64>);

impl EtaCoefficients {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn one_norm(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn two_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub fn eta_coefficients(config: &ScaleFactorConfig) -> Result<EtaCoefficients> {
    let a = sample_matrix(config)?;
    Ok(eta_from_sample_matrix(&a))
}

pub fn eta_from_sample_matrix(a: &SampleMatrix) -> EtaCoefficients {
    let mut e1 = vec![0.0; a.dim()];
    e1[0] = 1.0;
    EtaCoefficients(a.lu.solve_transposed(&e1))
}

/// η through explicit determinant ratios `det(M_i) / det(A)`. O(M⁴).
pub fn eta_by_determinants(config: &ScaleFactorConfig) -> Result<EtaCoefficients> {
    let a = sample_matrix(config)?;
    let mut e1 = vec![0.0; a.dim()];
    e1[0] = 1.0;
    Ok(EtaCoefficients(replaced_row_ratios(&a, &e1)))
}

/// Lagrange weights at `point` through explicit determinant ratios.
pub fn lagrange_weights_by_determinants(config: &ScaleFactorConfig, point: &[f64]) -> Result<Vec<f64>> {
    let a = sample_matrix(config)?;
    let row = a.basis.evaluate(point);
    Ok(replaced_row_ratios(&a, &row))
}

fn replaced_row_ratios(a: &SampleMatrix, row: &[f64]) -> Vec<f64> {
    let det_a = determinant(&a.matrix);
    (0..a.dim())
        .map(|i| {
            let mut mi = a.matrix.clone();
            mi.set_row(i, row);
            determinant(&mi) / det_a
        })
        .collect()
}

/// `Σ η_i z_i`.
pub fn lre_combine(eta: &EtaCoefficients, z: &[f64]) -> Result<f64> {
    if eta.len() != z.len() {
        return Err(LreError::LengthMismatch {
            what: "expectation values",
            expected: eta.len(),
            actual: z.len(),
        });
    }
    Ok(eta.0.iter().zip(z).map(|(e, v)| e * v).sum())
}

/// Value at `point` of the degree-`d` interpolant through `(λ_i, z_i)`.
pub fn interpolate_at(config: &ScaleFactorConfig, z: &[f64], point: &[f64]) -> Result<f64> {
    if z.len() != config.len() {
        return Err(LreError::LengthMismatch {
            what: "expectation values",
            expected: config.len(),
            actual: z.len(),
        });
    }
    if point.len() != config.vars {
        return Err(LreError::LengthMismatch {
            what: "coordinates",
            expected: config.vars,
            actual: point.len(),
        });
    }
    let a = sample_matrix(config)?;
    let w = a.lagrange_weights(point);
    Ok(w.iter().zip(z).map(|(w, v)| w * v).sum())
}

/// Node set, sample matrix and coefficients for one extrapolation.
#[derive(Debug, Clone)]
pub struct ExtrapolationPlan {
    config: ScaleFactorConfig,
    sample: SampleMatrix,
    eta: EtaCoefficients,
}

impl ExtrapolationPlan {
    pub fn new(config: ScaleFactorConfig) -> Result<Self> {
        let sample = sample_matrix(&config)?;
        let eta = eta_from_sample_matrix(&sample);
        Ok(Self { config, sample, eta })
    }

    pub fn config(&self) -> &ScaleFactorConfig {
        &self.config
    }

    pub fn sample_matrix(&self) -> &SampleMatrix {
        &self.sample
    }

    pub fn eta(&self) -> &EtaCoefficients {
        &self.eta
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }
}
