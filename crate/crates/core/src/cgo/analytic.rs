//! Assembly of the analytic part of a probe: oscillatory exponential times
//! bump-in-time amplitude times transport factor.

use crate::cgo::frame::CgoProbe;
use crate::cgo::phase::Phase;
use crate::error::{Error, Result};
use crate::fields::ScalarField;

/// Largest admissible magnitude of the real exponent; `exp` overflows to
/// infinity near 709.8, and products of two analytic parts halve the
/// remaining headroom.
pub const EXP_ARG_LIMIT: f64 = 350.0;

/// Analytic part of one probe on a space-time grid.
#[derive(Debug, Clone)]
pub struct AnalyticPart {
    /// `m(t) exp(Phi)`, the transport amplitude.
    pub amplitude: ScalarField,
    /// `exp((x . zeta / h) eta(t)) * amplitude`, the full analytic factor.
    pub full: ScalarField,
    /// Largest possible `|Re exponent|` over the grid box.
    pub exponent_bound: f64,
}

/// Evaluates the analytic part `exp(phase) m(t) exp(Phi)` on the grid that
/// carries the transport amplitude `phi`.
///
/// Fails when the bump is not compactly supported inside `(0, t_end)` or
/// when the exponent could overflow for this `h`; the error reports the
/// smallest admissible `h` for the box.
pub fn build_analytic_part(
    probe: &CgoProbe,
    phase: &Phase,
    transport_phi: &ScalarField,
) -> Result<AnalyticPart> {
    let grid = transport_phi.grid().clone();
    if grid.dim() != probe.dim() {
        return Err(Error::GridMismatch(format!(
            "probe dimension {} does not match grid dimension {}",
            probe.dim(),
            grid.dim()
        )));
    }
    if !probe.bump.supported_inside(phase.t_end()) {
        let (lo, hi) = probe.bump.support();
        return Err(Error::InvalidProbe(format!(
            "bump support ({lo}, {hi}) must lie inside (0, {})",
            phase.t_end()
        )));
    }
    let dim = grid.dim();
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for k in 0..dim {
        let ax = grid.axis(k);
        lo[k] = ax.origin;
        hi[k] = ax.origin + ax.dx * (ax.len - 1) as f64;
    }
    let bound = phase.exponent_bound(&lo, &hi);
    if bound >= EXP_ARG_LIMIT {
        let floor = probe.h * bound / EXP_ARG_LIMIT;
        return Err(Error::InvalidProbe(format!(
            "h = {} overflows the analytic exponent (bound {bound:.1}); \
             the floor for this box is h >= {floor:.3e}",
            probe.h
        )));
    }

    let mut amplitude = ScalarField::zeros(&grid);
    let mut full = ScalarField::zeros(&grid);
    let ns = grid.space_len();
    let mut x = vec![0.0; dim];
    for m in 0..=grid.nt() {
        let t = grid.time(m);
        let bump = probe.bump.eval(t);
        if bump == 0.0 {
            continue;
        }
        let amp_level = amplitude.level_mut(m);
        for flat in 0..ns {
            grid.coords_into(flat, &mut x);
            amp_level[flat] = bump * transport_phi.at(m, flat).exp();
        }
        let full_level = full.level_mut(m);
        for flat in 0..ns {
            grid.coords_into(flat, &mut x);
            let e = phase.exponent(probe.role, t, &x);
            full_level[flat] = e.exp() * amplitude.at(m, flat);
        }
    }

    Ok(AnalyticPart {
        amplitude,
        full,
        exponent_bound: bound,
    })
}
