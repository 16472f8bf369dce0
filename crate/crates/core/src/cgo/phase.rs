//! Semiclassical phases: linear weights, the oscillatory time factor, the
//! complex frequency vectors of both probe roles, and the exponent algebra
//! that the reflected construction relies on.

use crate::cgo::frame::{CgoProbe, ProbeRole};
use crate::error::{Error, Result};
use crate::{Complex64, I};

/// Exponent combinations of a probe pair and its reflections.
///
/// Each variant names which factors meet in the product `u2 * conj(v)`:
/// `Direct` pairs the unreflected terms, `ReflectedSolution` reflects the
/// solution factor only, `ReflectedAdjoint` the adjoint factor only, and
/// `ReflectedBoth` reflects both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossTerm {
    /// Unreflected solution against unreflected adjoint.
    Direct,
    /// Reflected solution against unreflected adjoint.
    ReflectedSolution,
    /// Unreflected solution against reflected adjoint.
    ReflectedAdjoint,
    /// Both factors reflected.
    ReflectedBoth,
}

/// Phase data of one probe frequency at a fixed semiclassical parameter.
///
/// `phi(x) = x . mu2`, `psi_pm(x) = x . (pm h^(3/5) xi / 2 + c mu1)` with
/// `c = sqrt(1 - h^(6/5) |xi|^2 / 4)`, and the complex frequency vectors
/// `zeta2 = grad(phi + i psi_plus)`, `zeta1 = grad(-phi + i psi_minus)`.
/// The time factor is `eta(t; h) = sin(h^(2/5) (t_end - t)^2)`.
#[derive(Debug, Clone)]
pub struct Phase {
    xi: Vec<f64>,
    mu1: Vec<f64>,
    mu2: Vec<f64>,
    psi_plus_grad: Vec<f64>,
    psi_minus_grad: Vec<f64>,
    zeta2: Vec<Complex64>,
    zeta1: Vec<Complex64>,
    h: f64,
    c: f64,
    t_end: f64,
}

impl Phase {
    /// Builds the phase data of `probe` for the time interval `(0, t_end)`.
    pub fn new(probe: &CgoProbe, t_end: f64) -> Result<Self> {
        if !(t_end > 0.0) {
            return Err(Error::InvalidProbe(format!(
                "phase requires a positive final time, got {t_end}"
            )));
        }
        let n = probe.dim();
        let xi_norm_sq: f64 = probe.xi.iter().map(|c| c * c).sum();
        let gap = 1.0 - probe.h.powf(1.2) * xi_norm_sq / 4.0;
        if gap <= 0.0 {
            return Err(Error::InvalidProbe(format!(
                "h = {} too large for |xi| = {:.6}: psi square root not real",
                probe.h,
                xi_norm_sq.sqrt()
            )));
        }
        let c = gap.sqrt();
        let half = probe.h.powf(0.6) / 2.0;
        let mut psi_plus_grad = vec![0.0; n];
        let mut psi_minus_grad = vec![0.0; n];
        for k in 0..n {
            psi_plus_grad[k] = half * probe.xi[k] + c * probe.mu1[k];
            psi_minus_grad[k] = -half * probe.xi[k] + c * probe.mu1[k];
        }
        let zeta2: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(probe.mu2[k], psi_plus_grad[k]))
            .collect();
        let zeta1: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(-probe.mu2[k], psi_minus_grad[k]))
            .collect();
        Ok(Self {
            xi: probe.xi.clone(),
            mu1: probe.mu1.clone(),
            mu2: probe.mu2.clone(),
            psi_plus_grad,
            psi_minus_grad,
            zeta2,
            zeta1,
            h: probe.h,
            c,
            t_end,
        })
    }

    /// Space dimension.
    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// Semiclassical parameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// `sqrt(1 - h^(6/5) |xi|^2 / 4)`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Final time of the interval the phase lives on.
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Real weight `x . mu2`.
    pub fn phi(&self, x: &[f64]) -> f64 {
        dot(&self.mu2, x)
    }

    /// Imaginary weight of the solution role.
    pub fn psi_plus(&self, x: &[f64]) -> f64 {
        dot(&self.psi_plus_grad, x)
    }

    /// Imaginary weight of the adjoint role.
    pub fn psi_minus(&self, x: &[f64]) -> f64 {
        dot(&self.psi_minus_grad, x)
    }

    /// Gradient of the real weight, `mu2`.
    pub fn phi_grad(&self) -> &[f64] {
        &self.mu2
    }

    /// Gradient of the imaginary weight of the role.
    pub fn psi_grad(&self, role: ProbeRole) -> &[f64] {
        match role {
            ProbeRole::Solution => &self.psi_plus_grad,
            ProbeRole::Adjoint => &self.psi_minus_grad,
        }
    }

    /// Complex frequency of the role: `zeta2` for the solution, `zeta1` for
    /// the adjoint.
    pub fn zeta(&self, role: ProbeRole) -> &[Complex64] {
        match role {
            ProbeRole::Solution => &self.zeta2,
            ProbeRole::Adjoint => &self.zeta1,
        }
    }

    /// Oscillatory time factor `sin(h^(2/5) (t_end - t)^2)`.
    pub fn eta(&self, t: f64) -> f64 {
        let tau = self.t_end - t;
        (self.h.powf(0.4) * tau * tau).sin()
    }

    /// Time derivative of the oscillatory factor.
    pub fn eta_dt(&self, t: f64) -> f64 {
        let tau = self.t_end - t;
        let lam = self.h.powf(0.4);
        -2.0 * lam * tau * (lam * tau * tau).cos()
    }

    /// Full complex exponent `(x . zeta / h) eta(t)` of the role.
    pub fn exponent(&self, role: ProbeRole, t: f64, x: &[f64]) -> Complex64 {
        let z = self.zeta(role);
        let mut acc = Complex64::ZERO;
        for (zk, xk) in z.iter().zip(x) {
            acc += zk * xk;
        }
        acc * (self.eta(t) / self.h)
    }

    /// Largest possible real part of the exponent over a coordinate box,
    /// `max |phi| * max |eta| / h`. The time factor is bounded by one but
    /// reaches `sin` extrema inside `(0, t_end)` only for large arguments,
    /// so the bound uses the actual extremum of `eta` on `[0, t_end]`.
    pub fn exponent_bound(&self, corner_lo: &[f64], corner_hi: &[f64]) -> f64 {
        let mut phi_max = 0.0f64;
        for (k, m) in self.mu2.iter().enumerate() {
            let a = m * corner_lo[k];
            let b = m * corner_hi[k];
            phi_max += a.max(b);
        }
        let mut phi_min = 0.0f64;
        for (k, m) in self.mu2.iter().enumerate() {
            let a = m * corner_lo[k];
            let b = m * corner_hi[k];
            phi_min += a.min(b);
        }
        let amp = phi_max.abs().max(phi_min.abs());
        let arg_end = self.h.powf(0.4) * self.t_end * self.t_end;
        let eta_max = if arg_end >= std::f64::consts::FRAC_PI_2 {
            1.0
        } else {
            arg_end.sin()
        };
        amp * eta_max / self.h
    }

    /// Reflection of a complex vector across the flat boundary: the last
    /// component changes sign.
    pub fn reflect(v: &[Complex64]) -> Vec<Complex64> {
        let mut out = v.to_vec();
        let n = out.len();
        out[n - 1] = -out[n - 1];
        out
    }

    /// Real frequency of the exponent combination: `zeta_s + conj(zeta_a)`
    /// equals `i h^(3/5)` times the returned vector, with each factor
    /// optionally reflected. `Direct` returns `xi` itself; the mixed terms
    /// replace the normal component by `-+ 2 c mu1_n / h^(3/5)`, which grows
    /// without bound as `h` shrinks; `ReflectedBoth` returns the reflection
    /// of `xi`.
    pub fn cross_frequency(&self, which: CrossTerm) -> Vec<f64> {
        let n = self.dim();
        let mut out = self.xi.clone();
        match which {
            CrossTerm::Direct => {}
            CrossTerm::ReflectedBoth => out[n - 1] = -out[n - 1],
            CrossTerm::ReflectedSolution => {
                out[n - 1] = -2.0 * self.c * self.mu1[n - 1] / self.h.powf(0.6);
            }
            CrossTerm::ReflectedAdjoint => {
                out[n - 1] = 2.0 * self.c * self.mu1[n - 1] / self.h.powf(0.6);
            }
        }
        out
    }

    /// The combination `zeta_s + conj(zeta_a)` with the requested reflections
    /// applied, evaluated directly from the stored vectors.
    pub fn cross_combination(&self, which: CrossTerm) -> Vec<Complex64> {
        let (s, a) = match which {
            CrossTerm::Direct => (self.zeta2.clone(), self.zeta1.clone()),
            CrossTerm::ReflectedSolution => (Self::reflect(&self.zeta2), self.zeta1.clone()),
            CrossTerm::ReflectedAdjoint => (self.zeta2.clone(), Self::reflect(&self.zeta1)),
            CrossTerm::ReflectedBoth => (Self::reflect(&self.zeta2), Self::reflect(&self.zeta1)),
        };
        s.iter().zip(&a).map(|(zs, za)| zs + za.conj()).collect()
    }
}

/// Worst deviation between each exponent combination and its closed form
/// `i h^(3/5) xi_combo` at the given point.
pub fn exponent_algebra_defect(phase: &Phase, x: &[f64]) -> f64 {
    let scale = phase.h().powf(0.6);
    let mut worst = 0.0f64;
    for which in [
        CrossTerm::Direct,
        CrossTerm::ReflectedSolution,
        CrossTerm::ReflectedAdjoint,
        CrossTerm::ReflectedBoth,
    ] {
        let combo = phase.cross_combination(which);
        let freq = phase.cross_frequency(which);
        let lhs: Complex64 = combo.iter().zip(x).map(|(c, xk)| c * xk).sum();
        let rhs = I * scale * dot(&freq, x);
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgo::frame::ProbeBump;
    use rand::{Rng, SeedableRng};

    fn probe(xi: Vec<f64>, h: f64, role: ProbeRole) -> CgoProbe {
        CgoProbe::new(xi, h, role, ProbeBump::new(0.5, 0.2).unwrap()).unwrap()
    }

    #[test]
    fn eikonal_identities_hold() {
        let p = probe(vec![2.0, -1.0, 3.0], 0.23, ProbeRole::Solution);
        let phase = Phase::new(&p, 1.0).unwrap();
        for grad in [
            phase.psi_grad(ProbeRole::Solution),
            phase.psi_grad(ProbeRole::Adjoint),
        ] {
            let psi_sq: f64 = grad.iter().map(|g| g * g).sum();
            let phi_sq: f64 = phase.phi_grad().iter().map(|g| g * g).sum();
            assert!((psi_sq - phi_sq).abs() <= 1e-12, "norm gap {}", psi_sq - phi_sq);
            let mixed: f64 = grad.iter().zip(phase.phi_grad()).map(|(a, b)| a * b).sum();
            assert!(mixed.abs() <= 1e-12);
        }
    }

    #[test]
    fn direct_combination_is_scaled_frequency() {
        let p = probe(vec![1.5, 0.5, -2.0], 0.17, ProbeRole::Solution);
        let phase = Phase::new(&p, 1.0).unwrap();
        let combo = phase.cross_combination(CrossTerm::Direct);
        let scale = 0.17f64.powf(0.6);
        for (k, c) in combo.iter().enumerate() {
            let expect = I * scale * p.xi[k];
            assert!((c - expect).norm() <= 1e-14);
        }
    }

    #[test]
    fn exponent_algebra_at_random_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let p = probe(vec![3.0, -2.0, 1.0], 0.11, ProbeRole::Solution);
        let phase = Phase::new(&p, 1.0).unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(exponent_algebra_defect(&phase, &x) <= 1e-12);
        }
    }

    #[test]
    fn mixed_frequencies_grow_as_h_shrinks() {
        let p = probe(vec![2.0, 1.0, 0.5], 0.4, ProbeRole::Solution);
        let mut previous = 0.0f64;
        for h in [0.4, 0.3, 0.2, 0.15, 0.1] {
            let phase = Phase::new(&p.with_h(h).unwrap(), 1.0).unwrap();
            let plus = phase.cross_frequency(CrossTerm::ReflectedAdjoint);
            let minus = phase.cross_frequency(CrossTerm::ReflectedSolution);
            let np: f64 = plus.iter().map(|c| c * c).sum::<f64>().sqrt();
            let nm: f64 = minus.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((np - nm).abs() < 1e-12);
            assert!(np > previous, "|xi_pm| must increase: {np} after {previous}");
            previous = np;
        }
    }

    #[test]
    fn eta_vanishes_at_final_time() {
        let p = probe(vec![1.0, 1.0, 0.0], 0.2, ProbeRole::Adjoint);
        let phase = Phase::new(&p, 0.8).unwrap();
        assert_eq!(phase.eta(0.8), 0.0);
        let dt = 1e-6;
        let fd = (phase.eta(0.4 + dt) - phase.eta(0.4 - dt)) / (2.0 * dt);
        assert!((fd - phase.eta_dt(0.4)).abs() <= 1e-8);
    }

    #[test]
    fn reflection_is_involutive() {
        let v = vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-0.5, 0.25),
            Complex64::new(0.75, -1.5),
        ];
        assert_eq!(Phase::reflect(&Phase::reflect(&v)), v);
        let r = Phase::reflect(&v);
        assert_eq!(r[2], -v[2]);
        assert_eq!(r[0], v[0]);
    }

    #[test]
    fn exponent_bound_dominates_samples() {
        let p = probe(vec![1.0, -1.0, 2.0], 0.15, ProbeRole::Solution);
        let phase = Phase::new(&p, 1.0).unwrap();
        let lo = [0.0, 0.0, -1.0];
        let hi = [1.0, 1.0, 1.0];
        let bound = phase.exponent_bound(&lo, &hi);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x: Vec<f64> = (0..3)
                .map(|k| rng.gen_range(lo[k]..hi[k]))
                .collect();
            let t = rng.gen_range(0.0..1.0);
            for role in [ProbeRole::Solution, ProbeRole::Adjoint] {
                let re = phase.exponent(role, t, &x).re;
                assert!(re.abs() <= bound + 1e-12, "sample {re} exceeds bound {bound}");
            }
        }
    }
}
