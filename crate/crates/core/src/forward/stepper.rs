//! Crank-Nicolson time stepping for the convection-diffusion operator and
//! its adjoint.
//!
//! The stepping form of the forward equation is
//!
//! ```text
//!     dt u = Lap u + 2 A . grad u + (div A + A . A - q) u + source
//! ```
//!
//! and the adjoint equation, written in reversed time `s = T - t` so it also
//! marches forward, is
//!
//! ```text
//!     ds w = Lap w - 2 conj(A) . grad w + conj(-div A + A . A - q) w
//! ```
//!
//! with all coefficients read at the reflected time level. Each implicit step
//! solves a complex non-Hermitian system by BiCGStab preconditioned with the
//! exact inverse of its constant-coefficient part (identity plus scaled
//! Dirichlet Laplacian, diagonal in the sine basis).

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::fields::ops;
use crate::fields::{CoefficientPair, ScalarField, TimeProfile};
use crate::geometry::{BoundaryClass, SpaceTimeGrid};
use crate::forward::dst::DirichletSpectral;
use crate::forward::krylov::{bicgstab, LinOp};
use crate::Complex64;

/// Iterative-solver controls.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative residual each implicit step must reach.
    pub tol: f64,
    /// Iteration cap per implicit step.
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

/// Aggregate iteration statistics of one space-time solve.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    /// Time steps performed.
    pub steps: usize,
    /// Largest per-step iteration count.
    pub max_iterations: usize,
    /// Sum of iteration counts.
    pub total_iterations: usize,
    /// Largest per-step final residual.
    pub worst_residual: f64,
}

impl SolveStats {
    fn absorb(&mut self, iterations: usize, residual: f64) {
        self.steps += 1;
        self.max_iterations = self.max_iterations.max(iterations);
        self.total_iterations += iterations;
        self.worst_residual = self.worst_residual.max(residual);
    }
}

/// Relative size below which a trace is considered compatible with zero.
const COMPAT_TOL: f64 = 1e-12;

/// Dirichlet boundary data: complex values on every boundary node and time
/// level.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletDatum {
    grid: SpaceTimeGrid,
    nodes: Vec<usize>,
    pos_of: Vec<u32>,
    /// Level-major values: `values[m * nodes.len() + p]`.
    values: Vec<Complex64>,
}

impl DirichletDatum {
    /// Zero data on `grid`.
    pub fn zeros(grid: &SpaceTimeGrid) -> Self {
        let nodes = grid.boundary_nodes();
        let mut pos_of = vec![u32::MAX; grid.space_len()];
        for (p, &f) in nodes.iter().enumerate() {
            pos_of[f] = p as u32;
        }
        let values = vec![Complex64::ZERO; (grid.nt() + 1) * nodes.len()];
        Self {
            grid: grid.clone(),
            nodes,
            pos_of,
            values,
        }
    }

    /// Sample `f(t, x)` on the boundary nodes of every level.
    pub fn from_fn<F>(grid: &SpaceTimeGrid, mut f: F) -> Self
    where
        F: FnMut(f64, &[f64]) -> Complex64,
    {
        let mut out = Self::zeros(grid);
        let nb = out.nodes.len();
        let mut x = vec![0.0; grid.dim()];
        for m in 0..=grid.nt() {
            let t = grid.time(m);
            for p in 0..nb {
                grid.coords_into(out.nodes[p], &mut x);
                out.values[m * nb + p] = f(t, &x);
            }
        }
        out
    }

    /// Boundary trace of a sampled field.
    pub fn from_field(u: &ScalarField) -> Self {
        let grid = u.grid();
        let mut out = Self::zeros(grid);
        let nb = out.nodes.len();
        for m in 0..=grid.nt() {
            let lev = u.level(m);
            for p in 0..nb {
                out.values[m * nb + p] = lev[out.nodes[p]];
            }
        }
        out
    }

    /// Grid the data live on.
    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    /// Sorted boundary node ids.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Value at level `m` and boundary node id `flat` (zero for non-boundary
    /// ids).
    #[inline]
    pub fn value(&self, m: usize, flat: usize) -> Complex64 {
        let p = self.pos_of[flat];
        if p == u32::MAX {
            Complex64::ZERO
        } else {
            self.values[m * self.nodes.len() + p as usize]
        }
    }

    /// Largest modulus over boundary nodes and levels.
    pub fn linf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus at the initial level (must vanish for forward data).
    pub fn initial_defect(&self) -> f64 {
        let nb = self.nodes.len();
        self.values[..nb].iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus at the final level (must vanish for adjoint data).
    pub fn terminal_defect(&self) -> f64 {
        let nb = self.nodes.len();
        let m = self.grid.nt();
        self.values[m * nb..(m + 1) * nb]
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Largest modulus on the open bottom face over all levels (must vanish
    /// for data supported on the accessible part).
    pub fn inaccessible_defect(&self) -> f64 {
        let nb = self.nodes.len();
        let mut worst = 0.0f64;
        for (p, &f) in self.nodes.iter().enumerate() {
            if BoundaryClass::of(&self.grid, f) != BoundaryClass::Inaccessible {
                continue;
            }
            for m in 0..=self.grid.nt() {
                worst = worst.max(self.values[m * nb + p].norm());
            }
        }
        worst
    }

    /// Multiply every level by a time profile (used to ramp generic probe
    /// data so they vanish at `t = 0`).
    pub fn modulate(&mut self, profile: &TimeProfile) {
        let nb = self.nodes.len();
        for m in 0..=self.grid.nt() {
            let c = profile.eval(self.grid.time(m), 0);
            for p in 0..nb {
                self.values[m * nb + p] *= c;
            }
        }
    }

    /// Convenience: apply the standard compatibility ramp over the first
    /// `steps` time steps.
    pub fn ramped(mut self, steps: usize) -> Self {
        let ramp = self.grid.dt() * steps.max(1) as f64;
        self.modulate(&TimeProfile::CosRamp { ramp });
        self
    }

    /// In-place scaling.
    pub fn scale(&mut self, alpha: Complex64) {
        for v in &mut self.values {
            *v *= alpha;
        }
    }
}

/// Which operator a solve integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OperatorKind {
    Forward,
    Adjoint,
}

/// Per-level stepping coefficients: convection vector and zeroth-order term.
struct LevelCoeffs {
    conv: Vec<Vec<Complex64>>,
    c0: Vec<Complex64>,
}

impl LevelCoeffs {
    fn alloc(grid: &SpaceTimeGrid) -> Self {
        Self {
            conv: (0..grid.dim())
                .map(|_| vec![Complex64::ZERO; grid.space_len()])
                .collect(),
            c0: vec![Complex64::ZERO; grid.space_len()],
        }
    }

    /// Fill for physical time level `m_phys`.
    fn fill(
        &mut self,
        pair: &CoefficientPair,
        div_a: &ScalarField,
        kind: OperatorKind,
        m_phys: usize,
    ) {
        let grid = pair.grid();
        let dim = grid.dim();
        let ns = grid.space_len();
        let ql = pair.q.level(m_phys);
        let dl = div_a.level(m_phys);
        let al: Vec<&[Complex64]> = (0..dim).map(|j| pair.a.comp(j).level(m_phys)).collect();
        match kind {
            OperatorKind::Forward => {
                for j in 0..dim {
                    let dst = &mut self.conv[j];
                    for (d, &a) in dst.iter_mut().zip(al[j].iter()) {
                        *d = 2.0 * a;
                    }
                }
                for flat in 0..ns {
                    let mut a2 = Complex64::ZERO;
                    for a in &al {
                        a2 += a[flat] * a[flat];
                    }
                    self.c0[flat] = dl[flat] + a2 - ql[flat];
                }
            }
            OperatorKind::Adjoint => {
                for j in 0..dim {
                    let dst = &mut self.conv[j];
                    for (d, &a) in dst.iter_mut().zip(al[j].iter()) {
                        *d = -2.0 * a.conj();
                    }
                }
                for flat in 0..ns {
                    let mut a2 = Complex64::ZERO;
                    for a in &al {
                        a2 += a[flat] * a[flat];
                    }
                    self.c0[flat] = (-dl[flat] + a2 - ql[flat]).conj();
                }
            }
        }
    }
}

/// Spatial-operator application context shared by the explicit and implicit
/// halves of a step.
struct Stencil<'a> {
    grid: &'a SpaceTimeGrid,
    interior: &'a [usize],
    inv_dx2: Vec<f64>,
    inv_2dx: Vec<f64>,
}

impl<'a> Stencil<'a> {
    fn new(grid: &'a SpaceTimeGrid, interior: &'a [usize]) -> Self {
        let inv_dx2 = (0..grid.dim())
            .map(|k| 1.0 / (grid.axis(k).dx * grid.axis(k).dx))
            .collect();
        let inv_2dx = (0..grid.dim())
            .map(|k| 1.0 / (2.0 * grid.axis(k).dx))
            .collect();
        Self {
            grid,
            interior,
            inv_dx2,
            inv_2dx,
        }
    }

    /// `out[i] = (Lap full + conv . grad full + c0 full)` at interior node
    /// `i`, reading Dirichlet values from `full`.
    fn apply(&self, coeffs: &LevelCoeffs, full: &[Complex64], out: &mut [Complex64]) {
        let dim = self.grid.dim();
        let strides = self.grid.strides();
        for (i, &flat) in self.interior.iter().enumerate() {
            let center = full[flat];
            let mut acc = coeffs.c0[flat] * center;
            for k in 0..dim {
                let s = strides[k];
                let up = full[flat + s];
                let dn = full[flat - s];
                acc += (up + dn - 2.0 * center) * self.inv_dx2[k];
                acc += coeffs.conv[k][flat] * (up - dn) * self.inv_2dx[k];
            }
            out[i] = acc;
        }
    }
}

/// Implicit-step operator `x -> x - (dt/2) L x` on interior vectors, with
/// zero Dirichlet halo.
struct ImplicitOp<'a> {
    stencil: &'a Stencil<'a>,
    coeffs: &'a LevelCoeffs,
    half_dt: f64,
    full_scratch: RefCell<Vec<Complex64>>,
}

impl<'a> LinOp for ImplicitOp<'a> {
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let mut full = self.full_scratch.borrow_mut();
        full.fill(Complex64::ZERO);
        for (i, &flat) in self.stencil.interior.iter().enumerate() {
            full[flat] = x[i];
        }
        self.stencil.apply(self.coeffs, &full, y);
        for (yi, &xi) in y.iter_mut().zip(x.iter()) {
            *yi = xi - self.half_dt * *yi;
        }
    }

    fn len(&self) -> usize {
        self.stencil.interior.len()
    }
}

fn check_same_grid(pair: &CoefficientPair, data: &DirichletDatum) -> Result<()> {
    if pair.grid() != data.grid() {
        return Err(Error::GridMismatch(
            "coefficients and boundary data live on different grids".into(),
        ));
    }
    Ok(())
}

/// March one operator kind across all time steps. `data_level(m)` must
/// return the Dirichlet level in stepping time, `coeff_level(m)` the physical
/// coefficient level for stepping level `m`.
fn march(
    pair: &CoefficientPair,
    data: &DirichletDatum,
    source: Option<&ScalarField>,
    kind: OperatorKind,
    opts: &SolverOptions,
) -> Result<(Vec<Vec<Complex64>>, SolveStats)> {
    let grid = pair.grid().clone();
    let nt = grid.nt();
    let ns = grid.space_len();
    let dt = grid.dt();
    let interior = grid.interior_nodes();
    let ni = interior.len();
    let stencil = Stencil::new(&grid, &interior);
    let spectral = DirichletSpectral::new(&grid);
    let factors = spectral.factors(1.0, 0.5 * dt);
    let div_a = ops::divergence(&pair.a);

    // Stepping-time to physical-time maps.
    let phys = |m: usize| match kind {
        OperatorKind::Forward => m,
        OperatorKind::Adjoint => nt - m,
    };

    let mut stats = SolveStats::default();
    let mut coeffs_now = LevelCoeffs::alloc(&grid);
    let mut coeffs_next = LevelCoeffs::alloc(&grid);
    coeffs_now.fill(pair, &div_a, kind, phys(0));

    // Interior unknowns at the current stepping level.
    let mut x = vec![Complex64::ZERO; ni];
    let mut levels: Vec<Vec<Complex64>> = Vec::with_capacity(nt + 1);

    // Level 0 in stepping time: zero interior, boundary from data.
    let mut full = vec![Complex64::ZERO; ns];
    let fill_full = |full: &mut [Complex64], x: &[Complex64], m_step: usize| {
        for &bf in data.nodes() {
            full[bf] = data.value(phys(m_step), bf);
        }
        for (i, &flat) in interior.iter().enumerate() {
            full[flat] = x[i];
        }
    };
    fill_full(&mut full, &x, 0);
    levels.push(full.clone());

    let mut rhs = vec![Complex64::ZERO; ni];
    let mut work = vec![Complex64::ZERO; ni];
    let mut bc_full = vec![Complex64::ZERO; ns];

    for m in 0..nt {
        coeffs_next.fill(pair, &div_a, kind, phys(m + 1));

        // Explicit half: rhs = x + (dt/2) L^m full(x, data^m).
        fill_full(&mut full, &x, m);
        stencil.apply(&coeffs_now, &full, &mut work);
        for i in 0..ni {
            rhs[i] = x[i] + 0.5 * dt * work[i];
        }
        // Source terms at both half levels (forward solves only).
        if let Some(src) = source {
            let s_now = src.level(phys(m));
            let s_next = src.level(phys(m + 1));
            for (i, &flat) in interior.iter().enumerate() {
                rhs[i] += 0.5 * dt * (s_now[flat] + s_next[flat]);
            }
        }
        // Known next-level boundary contribution of the implicit half.
        bc_full.fill(Complex64::ZERO);
        for &bf in data.nodes() {
            bc_full[bf] = data.value(phys(m + 1), bf);
        }
        stencil.apply(&coeffs_next, &bc_full, &mut work);
        for i in 0..ni {
            rhs[i] += 0.5 * dt * work[i];
        }

        let op = ImplicitOp {
            stencil: &stencil,
            coeffs: &coeffs_next,
            half_dt: 0.5 * dt,
            full_scratch: RefCell::new(vec![Complex64::ZERO; ns]),
        };
        let precond = |z: &mut [Complex64]| spectral.solve_with_factors(&factors, z);
        let st = bicgstab(&op, &precond, &rhs, &mut x, opts.tol, opts.max_iter)?;
        stats.absorb(st.iterations, st.residual);

        fill_full(&mut full, &x, m + 1);
        levels.push(full.clone());
        std::mem::swap(&mut coeffs_now, &mut coeffs_next);
    }

    Ok((levels, stats))
}

/// Solve the forward problem: zero initial state, Dirichlet data on the
/// whole boundary, optional interior source. Returns the full space-time
/// solution together with iteration statistics.
pub fn solve_forward_with(
    pair: &CoefficientPair,
    data: &DirichletDatum,
    source: Option<&ScalarField>,
    opts: &SolverOptions,
) -> Result<(ScalarField, SolveStats)> {
    check_same_grid(pair, data)?;
    if let Some(src) = source {
        if src.grid() != pair.grid() {
            return Err(Error::GridMismatch("source on a different grid".into()));
        }
    }
    let defect = data.initial_defect();
    let scale = data.linf().max(1.0);
    if defect > COMPAT_TOL * scale {
        return Err(Error::FieldConstraint(format!(
            "boundary data must vanish at t = 0 (defect {defect:.3e}); \
             apply a compatibility ramp"
        )));
    }
    let (levels, stats) = march(pair, data, source, OperatorKind::Forward, opts)?;
    let grid = pair.grid();
    let mut out = ScalarField::zeros(grid);
    for (m, lev) in levels.into_iter().enumerate() {
        out.level_mut(m).copy_from_slice(&lev);
    }
    Ok((out, stats))
}

/// [`solve_forward_with`] without source or statistics.
pub fn solve_forward(
    pair: &CoefficientPair,
    data: &DirichletDatum,
    opts: &SolverOptions,
) -> Result<ScalarField> {
    solve_forward_with(pair, data, None, opts).map(|(u, _)| u)
}

/// Solve the adjoint problem backward from a zero terminal state with
/// Dirichlet data given in original (unreversed) time. The returned field is
/// indexed in original time: level `nt` is the terminal level.
pub fn solve_adjoint_with(
    pair: &CoefficientPair,
    data: &DirichletDatum,
    opts: &SolverOptions,
) -> Result<(ScalarField, SolveStats)> {
    check_same_grid(pair, data)?;
    let defect = data.terminal_defect();
    let scale = data.linf().max(1.0);
    if defect > COMPAT_TOL * scale {
        return Err(Error::FieldConstraint(format!(
            "adjoint boundary data must vanish at t = T (defect {defect:.3e})"
        )));
    }
    let (levels, stats) = march(pair, data, None, OperatorKind::Adjoint, opts)?;
    let grid = pair.grid();
    let nt = grid.nt();
    let mut out = ScalarField::zeros(grid);
    for (m, lev) in levels.into_iter().enumerate() {
        out.level_mut(nt - m).copy_from_slice(&lev);
    }
    Ok((out, stats))
}

/// [`solve_adjoint_with`] without statistics.
pub fn solve_adjoint(
    pair: &CoefficientPair,
    data: &DirichletDatum,
    opts: &SolverOptions,
) -> Result<ScalarField> {
    solve_adjoint_with(pair, data, opts).map(|(v, _)| v)
}
