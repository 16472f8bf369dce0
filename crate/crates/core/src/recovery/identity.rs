//! Evaluation of the interior/boundary integral identity that links the
//! coefficient differences to measured flux differences.
//!
//! For solutions u2 of the second pair and adjoint solutions v of the first,
//! integration by parts gives
//!
//! ```text
//!     int_Q (2 A . grad u2 + qs u2) conj(v)  =  - int_Sigma (L1 f - L2 f) conj(v)
//! ```
//!
//! with `A = A1 - A2`, `qs = qs2 - qs1` the effective-potential difference,
//! and `f` the trace of u2. Both sides are computed independently here; their
//! agreement is the audit that drives every later extraction step.

use crate::cgo::{
    assemble_reflected, build_analytic_part, build_special_solution, choose_frame, restrict_terms,
    solve_transport, CauchyGrid, CgoProbe, Phase, ProbeBump, ProbeRole, TransportField,
};
use crate::error::{Error, Result};
use crate::fields::{
    effective_potential_analytic, ops, AnalyticPair, CoefficientPair, ScalarField, VectorField,
};
use crate::forward::{
    apply_dn, BoundaryField, Coverage, DirichletDatum, Restriction, SolverOptions,
};
use crate::geometry::{ExtendedGrid, SpaceTimeGrid};
use crate::Complex64;

/// How the probe side of the identity is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    /// Full special solutions: transport amplitudes, extended solves,
    /// remainders. Verifies the identity as proved.
    Oracle,
    /// Pure-phase probes without amplitude correction or remainder; the
    /// boundary side is read from simulated measurements alone. Valid for
    /// small coefficient differences.
    Born,
}

/// One probe configuration for an identity evaluation.
#[derive(Debug, Clone)]
pub struct ProbeSpec {
    /// Spatial frequency carried by the probe pair.
    pub xi: Vec<f64>,
    /// Semiclassical parameter.
    pub h: f64,
    /// Flip the tangential frame leg (the second extraction variant).
    pub flip: bool,
    /// Time bump of the solution probe.
    pub bump_solution: ProbeBump,
    /// Time bump of the adjoint probe.
    pub bump_adjoint: ProbeBump,
    /// Probe construction mode.
    pub mode: ProbeMode,
}

/// Both sides of the identity for one probe, with the four-way reflection
/// split of the interior integral.
#[derive(Debug, Clone)]
pub struct IdentityEvaluation {
    /// Interior integral; equals the sum of `split`.
    pub interior: Complex64,
    /// Boundary value `- int (L1 f - L2 f) conj(v)` over the accessible part.
    pub boundary: Complex64,
    /// Signed contributions: direct, reflected-adjoint cross, reflected-
    /// solution cross, doubly reflected.
    pub split: [Complex64; 4],
    /// Cauchy-Schwarz bound `|flux difference| * |trace of v|`, the natural
    /// scale of the boundary value for null tests.
    pub boundary_scale: f64,
    /// Reference magnitude `|L2 flux of u2| * |trace of v|`; the boundary
    /// value of a null experiment is small against this even when the flux
    /// difference itself collapses.
    pub probe_scale: f64,
    /// Semiclassical remainder norms of the two special solutions, zero in
    /// Born mode.
    pub remainder_norms: (f64, f64),
    /// Total Krylov iterations spent.
    pub iterations: usize,
}

/// Boundary side of the identity alone, for sweeps that never look at the
/// interior integral.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryMeasurement {
    /// Boundary value `- int (L1 f - L2 f) conj(v)` over the accessible part.
    pub value: Complex64,
    /// Cauchy-Schwarz bound `|flux difference| * |trace of v|`.
    pub boundary_scale: f64,
    /// Reference magnitude `|L2 flux of u2| * |trace of v|`.
    pub probe_scale: f64,
    /// Semiclassical remainder norms of the two special solutions, zero in
    /// Born mode.
    pub remainder_norms: (f64, f64),
    /// Total Krylov iterations spent.
    pub iterations: usize,
}

impl IdentityEvaluation {
    /// `|interior - boundary|`.
    pub fn gap(&self) -> f64 {
        (self.interior - self.boundary).norm()
    }

    /// Gap relative to the larger side magnitude.
    pub fn relative_gap(&self) -> f64 {
        let scale = self.interior.norm().max(self.boundary.norm());
        if scale == 0.0 {
            0.0
        } else {
            self.gap() / scale
        }
    }

    /// Magnitudes of the two mixed reflection contributions.
    pub fn cross_magnitudes(&self) -> (f64, f64) {
        (self.split[1].norm(), self.split[2].norm())
    }
}

/// Shared state for evaluating the identity over many probes: sampled
/// coefficients, their extensions, and the difference fields.
#[derive(Debug)]
pub struct IdentityLab {
    base: SpaceTimeGrid,
    ext: ExtendedGrid,
    pair1: AnalyticPair,
    pair2: AnalyticPair,
    pair1_base: CoefficientPair,
    pair2_base: CoefficientPair,
    pair1_ext: CoefficientPair,
    pair2_ext: CoefficientPair,
    /// `-conj(A1)`, the transport field of the adjoint probe.
    adjoint_field: crate::fields::AnalyticVector,
    /// `A1 - A2` sampled on the cube.
    a_diff: VectorField,
    /// `qs2 - qs1` sampled on the cube (analytic divergences).
    qsharp_diff: ScalarField,
    opts: SolverOptions,
    cauchy: CauchyGrid,
}

/// Probe pair, restriction terms and flux shared by both identity sides.
struct ProbeAssembly {
    u2_terms: (ScalarField, ScalarField),
    v_terms: (ScalarField, ScalarField),
    u2: ScalarField,
    v: ScalarField,
    flux2: BoundaryField,
    remainder_norms: (f64, f64),
    iterations: usize,
}

impl IdentityLab {
    /// Samples and extends both pairs on `base` and precomputes the
    /// difference fields entering the interior integrand.
    pub fn new(
        pair1: &AnalyticPair,
        pair2: &AnalyticPair,
        base: &SpaceTimeGrid,
        opts: &SolverOptions,
        cauchy: &CauchyGrid,
    ) -> Result<Self> {
        if base.dim() != 3 {
            return Err(Error::InvalidGrid(format!(
                "identity evaluation supports three space dimensions, got {}",
                base.dim()
            )));
        }
        let ext = ExtendedGrid::from_base(base)?;
        let pair1_base = pair1.sample(base)?;
        let pair2_base = pair2.sample(base)?;
        let pair1_ext = crate::fields::extend_pair(&pair1_base, &ext)?;
        let pair2_ext = crate::fields::extend_pair(&pair2_base, &ext)?;

        let mut a_diff = pair1_base.a.clone();
        for (k, comp) in a_diff.comps_mut().iter_mut().enumerate() {
            comp.axpy(-Complex64::ONE, pair2_base.a.comp(k))?;
        }
        let qs1 = effective_potential_analytic(pair1, base)?;
        let mut qsharp_diff = effective_potential_analytic(pair2, base)?;
        qsharp_diff.axpy(-Complex64::ONE, &qs1)?;

        Ok(Self {
            base: base.clone(),
            ext,
            pair1: pair1.clone(),
            pair2: pair2.clone(),
            pair1_base,
            pair2_base,
            pair1_ext,
            pair2_ext,
            adjoint_field: pair1.a.conjugated().scaled(-Complex64::ONE),
            a_diff,
            qsharp_diff,
            opts: opts.clone(),
            cauchy: cauchy.clone(),
        })
    }

    /// The cube grid the lab evaluates on.
    pub fn base(&self) -> &SpaceTimeGrid {
        &self.base
    }

    /// The two closed-form pairs the lab was built from.
    pub fn pairs(&self) -> (&AnalyticPair, &AnalyticPair) {
        (&self.pair1, &self.pair2)
    }

    /// The mirror-extended grid probes are built on.
    pub fn extended(&self) -> &ExtendedGrid {
        &self.ext
    }

    /// Sampled difference `A1 - A2` on the cube.
    pub fn a_diff(&self) -> &VectorField {
        &self.a_diff
    }

    /// Sampled effective-potential difference on the cube.
    pub fn qsharp_diff(&self) -> &ScalarField {
        &self.qsharp_diff
    }

    /// Both coefficient pairs sampled on the mirror-extended grid.
    pub fn extended_pairs(&self) -> (&CoefficientPair, &CoefficientPair) {
        (&self.pair1_ext, &self.pair2_ext)
    }

    /// Cauchy-transform resolution used for transport solves.
    pub fn cauchy(&self) -> &CauchyGrid {
        &self.cauchy
    }

    /// Linear-solver options used for every solve.
    pub fn opts(&self) -> &SolverOptions {
        &self.opts
    }

    /// Transport field `-conj(A1)` of the adjoint probe.
    pub fn adjoint_field(&self) -> &crate::fields::AnalyticVector {
        &self.adjoint_field
    }

    /// Builds the probe pair and their fluxes for one configuration.
    fn assemble(&self, spec: &ProbeSpec) -> Result<ProbeAssembly> {
        if spec.xi.len() != self.base.dim() {
            return Err(Error::GridMismatch(format!(
                "probe frequency has {} components on a {}-dimensional grid",
                spec.xi.len(),
                self.base.dim()
            )));
        }
        let (mu1, mut mu2) = choose_frame(&spec.xi)?;
        if spec.flip {
            for c in &mut mu2 {
                *c = -*c;
            }
        }
        let sol_probe = CgoProbe::with_frame(
            spec.xi.clone(),
            mu1.clone(),
            mu2.clone(),
            spec.h,
            ProbeRole::Solution,
            spec.bump_solution.clone(),
        )?;
        let adj_probe = CgoProbe::with_frame(
            spec.xi.clone(),
            mu1,
            mu2,
            spec.h,
            ProbeRole::Adjoint,
            spec.bump_adjoint.clone(),
        )?;

        let t_end = self.base.t_end();
        let mut iterations = 0usize;
        let (u2_terms, v_terms, u2, v, flux2, remainder_norms) = match spec.mode {
            ProbeMode::Oracle => {
                let phase2 = Phase::new(&sol_probe, t_end)?;
                let field2 = TransportField::MirrorExtended(&self.pair2.a);
                let tr2 = solve_transport(
                    &field2,
                    phase2.zeta(ProbeRole::Solution),
                    self.ext.grid(),
                    &self.cauchy,
                )?;
                let u2s = build_special_solution(
                    &sol_probe,
                    &self.pair2_ext,
                    &tr2.phi,
                    &self.ext,
                    &self.opts,
                )?;
                let phase1 = Phase::new(&adj_probe, t_end)?;
                let field1 = TransportField::MirrorExtended(&self.adjoint_field);
                let tr1 = solve_transport(
                    &field1,
                    phase1.zeta(ProbeRole::Adjoint),
                    self.ext.grid(),
                    &self.cauchy,
                )?;
                let vs = build_special_solution(
                    &adj_probe,
                    &self.pair1_ext,
                    &tr1.phi,
                    &self.ext,
                    &self.opts,
                )?;
                iterations += u2s.stats.total_iterations + vs.stats.total_iterations;
                let u2_terms = restrict_terms(&self.ext, &u2s.extended)?;
                let v_terms = restrict_terms(&self.ext, &vs.extended)?;
                let flux2 =
                    BoundaryField::neumann_trace(&u2s.assembled, &self.pair2_base, Coverage::Accessible);
                let norms = (u2s.remainder_norm, vs.remainder_norm);
                (u2_terms, v_terms, u2s.assembled, vs.assembled, flux2, norms)
            }
            ProbeMode::Born => {
                let zero_phi = ScalarField::zeros(self.ext.grid());
                let phase2 = Phase::new(&sol_probe, t_end)?;
                let part2 = build_analytic_part(&sol_probe, &phase2, &zero_phi)?;
                let phase1 = Phase::new(&adj_probe, t_end)?;
                let part1 = build_analytic_part(&adj_probe, &phase1, &zero_phi)?;
                let u2 = assemble_reflected(&self.ext, &part2.full)?;
                let v = assemble_reflected(&self.ext, &part1.full)?;
                let u2_terms = restrict_terms(&self.ext, &part2.full)?;
                let v_terms = restrict_terms(&self.ext, &part1.full)?;
                // Born measurements query both maps; the flux of the second
                // pair comes from a solve rather than the probe itself.
                let datum = DirichletDatum::from_field(&u2);
                let rec2 = apply_dn(&self.pair2_base, &datum, Restriction::Local, &self.opts)?;
                iterations += rec2.stats.total_iterations;
                (u2_terms, v_terms, u2, v, rec2.flux, (0.0, 0.0))
            }
        };
        Ok(ProbeAssembly {
            u2_terms,
            v_terms,
            u2,
            v,
            flux2,
            remainder_norms,
            iterations,
        })
    }

    /// Measures the boundary side against the first pair's DN map.
    fn boundary_side(&self, asm: &ProbeAssembly) -> Result<(Complex64, f64, f64, usize)> {
        let datum = DirichletDatum::from_field(&asm.u2);
        let rec1 = apply_dn(&self.pair1_base, &datum, Restriction::Local, &self.opts)?;
        let iterations = rec1.stats.total_iterations;
        let v_trace = BoundaryField::dirichlet_trace(&asm.v, Coverage::Accessible);
        let probe_scale = asm.flux2.norm() * v_trace.norm();
        let mut flux_diff = rec1.flux;
        flux_diff.axpy(-Complex64::ONE, &asm.flux2)?;
        let boundary = -flux_diff.pair(&v_trace)?;
        let boundary_scale = flux_diff.norm() * v_trace.norm();
        Ok((boundary, boundary_scale, probe_scale, iterations))
    }

    /// Boundary side of the identity alone. This is the measurement the
    /// extraction sweeps consume; it skips the interior quadrature and the
    /// gradients behind it.
    pub fn boundary_value(&self, spec: &ProbeSpec) -> Result<BoundaryMeasurement> {
        let asm = self.assemble(spec)?;
        let (value, boundary_scale, probe_scale, dn_iterations) = self.boundary_side(&asm)?;
        Ok(BoundaryMeasurement {
            value,
            boundary_scale,
            probe_scale,
            remainder_norms: asm.remainder_norms,
            iterations: asm.iterations + dn_iterations,
        })
    }

    /// Evaluates both sides of the identity for one probe configuration.
    pub fn evaluate(&self, spec: &ProbeSpec) -> Result<IdentityEvaluation> {
        let asm = self.assemble(spec)?;
        let (boundary, boundary_scale, probe_scale, dn_iterations) = self.boundary_side(&asm)?;
        let iterations = asm.iterations + dn_iterations;

        let ProbeAssembly {
            u2_terms: (d2, m2),
            v_terms: (d1, m1),
            remainder_norms,
            ..
        } = asm;
        let g_d2 = ops::grad(&d2);
        let g_m2 = ops::grad(&m2);
        let i_dd = self.interior_piece(&d2, &g_d2, &d1);
        let i_dm = self.interior_piece(&d2, &g_d2, &m1);
        let i_md = self.interior_piece(&m2, &g_m2, &d1);
        let i_mm = self.interior_piece(&m2, &g_m2, &m1);
        let split = [i_dd, -i_dm, -i_md, i_mm];
        let interior = split.iter().sum();

        Ok(IdentityEvaluation {
            interior,
            boundary,
            split,
            boundary_scale,
            probe_scale,
            remainder_norms,
            iterations,
        })
    }

    /// Trapezoid quadrature of `(2 A . grad u + qs u) conj(v)` over the cube.
    fn interior_piece(&self, u: &ScalarField, grad_u: &VectorField, v: &ScalarField) -> Complex64 {
        let grid = &self.base;
        let ns = grid.space_len();
        let dim = grid.dim();
        let mut total = Complex64::ZERO;
        for m in 0..=grid.nt() {
            let ul = u.level(m);
            let vl = v.level(m);
            let ql = self.qsharp_diff.level(m);
            let mut level = Complex64::ZERO;
            for flat in 0..ns {
                let mut val = ql[flat] * ul[flat];
                for k in 0..dim {
                    val += 2.0 * self.a_diff.comp(k).at(m, flat) * grad_u.comp(k).at(m, flat);
                }
                level += grid.quad_weight(flat) * val * vl[flat].conj();
            }
            total += grid.time_quad_weight(m) * level;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{AnalyticScalar, AnalyticVector, GaugeFunction, TimeProfile};

    fn lab_pair(seed: f64) -> AnalyticPair {
        let mut comps = vec![AnalyticScalar::zero(); 3];
        comps[0] = AnalyticScalar::bump(
            Complex64::new(0.4, 0.1 * seed),
            &[0.5, 0.4, 0.5],
            &[0.3, 0.3, 0.3],
        )
        .unwrap();
        comps[2] = AnalyticScalar::bump(
            Complex64::new(0.25 * seed, -0.1),
            &[0.4, 0.6, 0.55],
            &[0.28, 0.3, 0.32],
        )
        .unwrap();
        let q = AnalyticScalar::bump(
            Complex64::new(0.5, 0.2 * seed),
            &[0.55, 0.5, 0.45],
            &[0.3, 0.32, 0.3],
        )
        .unwrap();
        AnalyticPair {
            a: AnalyticVector { comps },
            q,
        }
    }

    // Pairs whose coefficient differences carry an order-one signal; weak
    // differences push the identity sides toward the discretization floor
    // and make relative gaps meaningless at coarse resolution.
    fn strong_pairs() -> (AnalyticPair, AnalyticPair) {
        let mut comps1 = vec![AnalyticScalar::zero(); 3];
        comps1[1] = AnalyticScalar::bump(
            Complex64::new(0.3, -0.25),
            &[0.5, 0.5, 0.55],
            &[0.3, 0.3, 0.3],
        )
        .unwrap();
        let pair1 = AnalyticPair {
            a: AnalyticVector { comps: comps1 },
            q: AnalyticScalar::bump(
                Complex64::new(-0.4, 0.15),
                &[0.5, 0.45, 0.5],
                &[0.3, 0.3, 0.32],
            )
            .unwrap(),
        };
        let mut comps2 = vec![AnalyticScalar::zero(); 3];
        comps2[0] = AnalyticScalar::bump(
            Complex64::new(0.5, 0.2),
            &[0.5, 0.4, 0.5],
            &[0.3, 0.3, 0.3],
        )
        .unwrap();
        comps2[2] = AnalyticScalar::bump(
            Complex64::new(-0.35, 0.25),
            &[0.45, 0.55, 0.5],
            &[0.32, 0.3, 0.3],
        )
        .unwrap();
        let pair2 = AnalyticPair {
            a: AnalyticVector { comps: comps2 },
            q: AnalyticScalar::bump(
                Complex64::new(0.9, 0.35),
                &[0.55, 0.5, 0.45],
                &[0.3, 0.32, 0.3],
            )
            .unwrap(),
        };
        (pair1, pair2)
    }

    fn spec(h: f64, mode: ProbeMode) -> ProbeSpec {
        ProbeSpec {
            xi: vec![2.0, 1.0, -1.0],
            h,
            flip: false,
            bump_solution: ProbeBump::new(0.5, 0.3).unwrap(),
            bump_adjoint: ProbeBump::new(0.5, 0.3).unwrap(),
            mode,
        }
    }

    fn small_cauchy() -> CauchyGrid {
        CauchyGrid {
            plane_points: 32,
            transverse_points: 16,
        }
    }

    #[test]
    fn identical_pairs_give_vanishing_sides() {
        let base = SpaceTimeGrid::unit_cube(3, 5, 8, 1.0).unwrap();
        let pair = lab_pair(1.0);
        let opts = SolverOptions::default();
        let lab = IdentityLab::new(&pair, &pair, &base, &opts, &small_cauchy()).unwrap();
        let ev = lab.evaluate(&spec(0.3, ProbeMode::Oracle)).unwrap();
        assert_eq!(ev.interior, Complex64::ZERO);
        assert!(ev.probe_scale > 0.0);
        assert!(
            ev.boundary.norm() <= 1e-6 * ev.probe_scale,
            "boundary {:.3e} vs probe scale {:.3e}",
            ev.boundary.norm(),
            ev.probe_scale
        );
    }

    #[test]
    fn born_identical_pairs_cancel_exactly() {
        let base = SpaceTimeGrid::unit_cube(3, 5, 8, 1.0).unwrap();
        let pair = lab_pair(1.0);
        let opts = SolverOptions::default();
        let lab = IdentityLab::new(&pair, &pair, &base, &opts, &small_cauchy()).unwrap();
        let ev = lab.evaluate(&spec(0.3, ProbeMode::Born)).unwrap();
        // Identical deterministic solves produce bitwise-equal fluxes.
        assert_eq!(ev.boundary, Complex64::ZERO);
        assert_eq!(ev.interior, Complex64::ZERO);
        assert_eq!(ev.remainder_norms, (0.0, 0.0));
    }

    #[test]
    fn gauge_pair_sides_decay_under_refinement() {
        let psi = AnalyticScalar::bump_with_profile(
            Complex64::new(0.3, 0.0),
            &[0.5, 0.5, 0.5],
            &[0.32, 0.32, 0.3],
            TimeProfile::CosRamp { ramp: 0.4 },
        )
        .unwrap();
        let gauge = GaugeFunction::new(psi, 3).unwrap();
        let pair1 = lab_pair(1.0);
        let pair2 = gauge.apply(&pair1).unwrap();
        let opts = SolverOptions::default();
        let mut sizes = Vec::new();
        for (n, nt) in [(5usize, 8usize), (9, 16)] {
            let base = SpaceTimeGrid::unit_cube(3, n, nt, 1.0).unwrap();
            let lab = IdentityLab::new(&pair1, &pair2, &base, &opts, &small_cauchy()).unwrap();
            let ev = lab.evaluate(&spec(0.3, ProbeMode::Oracle)).unwrap();
            sizes.push(ev.interior.norm().max(ev.boundary.norm()));
        }
        assert!(
            sizes[1] < sizes[0] / 2.0,
            "gauge-pair sides should shrink under refinement: {sizes:?}"
        );
    }

    #[test]
    fn generic_pairs_close_the_identity() {
        // Relative gaps at this signal size are dominated by how well the
        // grid resolves the probe and the coefficient bumps, so the audit
        // tracks the gap across two resolutions and demands improvement plus
        // a calibrated absolute bound at the finer one. The acceptance suite
        // repeats this at the full default grid with a tighter bound.
        let (pair1, pair2) = strong_pairs();
        let opts = SolverOptions::default();
        let mut gaps = Vec::new();
        for (n, nt) in [(13usize, 24usize), (17, 32)] {
            let base = SpaceTimeGrid::unit_cube(3, n, nt, 1.0).unwrap();
            let lab = IdentityLab::new(&pair1, &pair2, &base, &opts, &small_cauchy()).unwrap();
            let ev = lab.evaluate(&spec(0.4, ProbeMode::Oracle)).unwrap();
            let (c1, c2) = ev.cross_magnitudes();
            assert!(c1.is_finite() && c2.is_finite());
            assert_eq!(ev.split.iter().sum::<Complex64>(), ev.interior);
            gaps.push(ev.relative_gap());
        }
        assert!(
            gaps[1] < gaps[0],
            "probe identity gap should shrink under refinement: {gaps:?}"
        );
        assert!(gaps[1] <= 0.5, "refined probe audit too loose: {gaps:?}");
    }

    #[test]
    fn frame_flip_changes_the_sample() {
        let base = SpaceTimeGrid::unit_cube(3, 5, 8, 1.0).unwrap();
        let pair1 = lab_pair(1.0);
        let pair2 = lab_pair(-0.6);
        let opts = SolverOptions::default();
        let lab = IdentityLab::new(&pair1, &pair2, &base, &opts, &small_cauchy()).unwrap();
        let plus = lab.evaluate(&spec(0.3, ProbeMode::Oracle)).unwrap();
        let mut flipped = spec(0.3, ProbeMode::Oracle);
        flipped.flip = true;
        let minus = lab.evaluate(&flipped).unwrap();
        assert!((plus.interior - minus.interior).norm() > 1e-10 * plus.interior.norm());
    }

    #[test]
    fn manufactured_solutions_close_the_identity() {
        // Identity audit with ordinary solves instead of probes: u2 solves
        // the second pair with smooth data, v solves the adjoint of the
        // first with data vanishing at the final time. The two sides must
        // then converge to each other under refinement, which pins the sign
        // conventions of both quadratures at order-one signal strength.
        use crate::forward::solve_adjoint_with;
        use crate::forward::solve_forward_with;
        let (pair1, pair2) = strong_pairs();
        let opts = SolverOptions::default();
        let mut gaps = Vec::new();
        for (n, nt) in [(5usize, 8usize), (9, 16), (13, 24)] {
            let base = SpaceTimeGrid::unit_cube(3, n, nt, 1.0).unwrap();
            let lab = IdentityLab::new(&pair1, &pair2, &base, &opts, &small_cauchy()).unwrap();
            let g2 = DirichletDatum::from_fn(&base, |t, x| {
                Complex64::new(t * t * (x[0] + 0.3 * x[2]), t * x[1] * x[1])
            });
            let (u2, _) = solve_forward_with(&lab.pair2_base, &g2, None, &opts).unwrap();
            let gv = DirichletDatum::from_fn(&base, |t, x| {
                let ramp = (1.0 - t) * (1.0 - t);
                Complex64::new(ramp * (x[1] + 0.4), ramp * x[0] * x[2])
            });
            let (v, _) = solve_adjoint_with(&lab.pair1_base, &gv, &opts).unwrap();

            let grad_u2 = ops::grad(&u2);
            let interior = lab.interior_piece(&u2, &grad_u2, &v);

            let datum = DirichletDatum::from_field(&u2);
            let rec1 = apply_dn(&lab.pair1_base, &datum, Restriction::Full, &opts).unwrap();
            let flux2 = BoundaryField::neumann_trace(&u2, &lab.pair2_base, Coverage::Whole);
            let v_trace = BoundaryField::dirichlet_trace(&v, Coverage::Whole);
            let mut flux_diff = rec1.flux;
            flux_diff.axpy(-Complex64::ONE, &flux2).unwrap();
            let boundary = -flux_diff.pair(&v_trace).unwrap();

            let scale = interior.norm().max(boundary.norm());
            gaps.push((interior - boundary).norm() / scale);
        }
        assert!(
            gaps[2] < gaps[1] && gaps[1] < gaps[0],
            "identity audit should improve under refinement: {gaps:?}"
        );
        assert!(
            gaps[2] <= 0.15,
            "refined manufactured audit too loose: {gaps:?}"
        );
    }

    #[test]
    fn dimension_guard_rejects_planar_grids() {
        let base = SpaceTimeGrid::unit_cube(2, 5, 8, 1.0).unwrap();
        let pair = AnalyticPair::zero(2);
        let opts = SolverOptions::default();
        assert!(IdentityLab::new(&pair, &pair, &base, &opts, &small_cauchy()).is_err());
    }
}
