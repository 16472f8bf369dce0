//! Gauge transforms and the effective (gauge-reduced) potential.
//!
//! Adding a gradient to the convection field and the matching time derivative
//! to the absorption leaves all accessible boundary measurements unchanged
//! when the gauge function vanishes near the accessible boundary. The
//! laboratory uses such transforms to build provably indistinguishable
//! coefficient pairs and to test which combinations the recovery pipeline can
//! and cannot see.

use crate::error::{Error, Result};
use crate::fields::analytic::{AnalyticPair, AnalyticScalar, AnalyticVector};
use crate::fields::field::{CoefficientPair, ScalarField};
use crate::fields::ops;
use crate::geometry::SpaceTimeGrid;
use crate::Complex64;

/// Smooth gauge function `psi(t, x)` whose spatial support keeps a positive
/// distance from the accessible boundary (it may touch or cross the bottom
/// face).
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    psi: AnalyticScalar,
    dim: usize,
}

impl GaugeFunction {
    /// Validate support and wrap. The support box must satisfy
    /// `0 < lo_k` and `hi_k < 1` on every tangential axis and `hi < 1` on the
    /// normal axis; the zero field is accepted.
    pub fn new(psi: AnalyticScalar, dim: usize) -> Result<Self> {
        if let Some(sbox) = psi.support_box() {
            if sbox.len() != dim {
                return Err(Error::FieldConstraint(format!(
                    "gauge function has {} axes, expected {dim}",
                    sbox.len()
                )));
            }
            for (k, &(lo, hi)) in sbox.iter().enumerate() {
                let tangential = k + 1 < dim;
                let ok = if tangential {
                    lo > 0.0 && hi < 1.0
                } else {
                    hi < 1.0
                };
                if !ok {
                    return Err(Error::FieldConstraint(format!(
                        "gauge support [{lo}, {hi}] on axis {k} reaches the accessible boundary"
                    )));
                }
            }
        }
        Ok(Self { psi, dim })
    }

    /// The underlying closed-form field.
    pub fn psi(&self) -> &AnalyticScalar {
        &self.psi
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Exact spatial gradient.
    pub fn grad(&self) -> Result<AnalyticVector> {
        Ok(AnalyticVector {
            comps: (0..self.dim)
                .map(|j| self.psi.partial(j))
                .collect::<Result<Vec<_>>>()?,
        })
    }

    /// Exact time derivative.
    pub fn dt(&self) -> Result<AnalyticScalar> {
        self.psi.dt()
    }

    /// Gauge-transform a closed-form pair:
    /// `(A, q) -> (A + grad psi, q + dt psi)`.
    pub fn apply(&self, pair: &AnalyticPair) -> Result<AnalyticPair> {
        Ok(AnalyticPair {
            a: pair.a.add(&self.grad()?),
            q: pair.q.add(&self.dt()?),
        })
    }
}

/// Gauge-transform a sampled pair: the gauge derivatives are evaluated in
/// closed form and sampled, so no stencil error enters.
pub fn gauge_transform(pair: &CoefficientPair, gauge: &GaugeFunction) -> Result<CoefficientPair> {
    let grid = pair.grid();
    if grid.dim() != gauge.dim() {
        return Err(Error::GridMismatch(format!(
            "gauge dimension {} vs grid dimension {}",
            gauge.dim(),
            grid.dim()
        )));
    }
    let mut out = pair.clone();
    let grad = gauge.grad()?;
    for j in 0..grid.dim() {
        let gj = grad.comps[j].sample(grid);
        out.a.comp_mut(j).axpy(Complex64::ONE, &gj)?;
    }
    let dt = gauge.dt()?.sample(grid);
    out.q.axpy(Complex64::ONE, &dt)?;
    Ok(out)
}

/// Effective potential `-div A - A . A + q`.
///
/// The square is the analytic continuation `sum_j A_j^2`, not the Hermitian
/// square, so complex convection fields keep the operator-difference algebra
/// exact. The divergence uses the second-order stencils of [`ops`].
pub fn effective_potential(pair: &CoefficientPair) -> ScalarField {
    let grid = pair.grid().clone();
    let div = ops::divergence(&pair.a);
    let mut out = ScalarField::zeros(&grid);
    let ns = grid.space_len();
    for m in 0..=grid.nt() {
        let dl = div.level(m);
        let ql = pair.q.level(m);
        let al: Vec<&[Complex64]> = (0..grid.dim()).map(|j| pair.a.comp(j).level(m)).collect();
        let ol = out.level_mut(m);
        for flat in 0..ns {
            let mut a2 = Complex64::ZERO;
            for a in &al {
                a2 += a[flat] * a[flat];
            }
            ol[flat] = -dl[flat] - a2 + ql[flat];
        }
    }
    out
}

/// Effective potential of a closed-form pair, with the divergence taken
/// exactly before sampling. Sharper than [`effective_potential`] where the
/// coefficients are available analytically.
pub fn effective_potential_analytic(
    pair: &AnalyticPair,
    grid: &SpaceTimeGrid,
) -> Result<ScalarField> {
    let div = pair.a.divergence()?.sample(grid);
    let a = pair.a.sample(grid)?;
    let mut out = pair.q.sample(grid);
    let ns = grid.space_len();
    for m in 0..=grid.nt() {
        let dl = div.level(m);
        let al: Vec<&[Complex64]> = (0..grid.dim()).map(|j| a.comp(j).level(m)).collect();
        let ol = out.level_mut(m);
        for flat in 0..ns {
            let mut a2 = Complex64::ZERO;
            for comp in &al {
                a2 += comp[flat] * comp[flat];
            }
            ol[flat] += -dl[flat] - a2;
        }
    }
    Ok(out)
}
