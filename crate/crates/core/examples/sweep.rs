//! Scratch driver: remainder decay across an h sweep.

use cdlab_core::cgo::{
    build_analytic_part, compute_remainder, solve_transport, CauchyGrid, CgoProbe, Phase,
    ProbeBump, ProbeRole, TransportField,
};
use cdlab_core::fields::{extend_pair, AnalyticPair, AnalyticScalar, AnalyticVector};
use cdlab_core::forward::SolverOptions;
use cdlab_core::geometry::{ExtendedGrid, SpaceTimeGrid};
use cdlab_core::Complex64;
use std::time::Instant;

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(13);
    let nt: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(32);
    let base = SpaceTimeGrid::unit_cube(3, n, nt, 1.0).unwrap();
    let ext = ExtendedGrid::from_base(&base).unwrap();

    let mut comps = vec![AnalyticScalar::zero(); 3];
    comps[0] =
        AnalyticScalar::bump(Complex64::new(0.5, 0.0), &[0.5, 0.4, 0.5], &[0.3, 0.3, 0.3]).unwrap();
    comps[1] =
        AnalyticScalar::bump(Complex64::new(-0.3, 0.0), &[0.6, 0.5, 0.45], &[0.3, 0.3, 0.3])
            .unwrap();
    comps[2] = AnalyticScalar::bump(Complex64::new(0.25, 0.0), &[0.4, 0.6, 0.55], &[
        0.28, 0.3, 0.32,
    ])
    .unwrap();
    let q = AnalyticScalar::bump(Complex64::new(0.6, 0.0), &[0.55, 0.5, 0.45], &[0.3, 0.32, 0.3])
        .unwrap();
    let pair = AnalyticPair {
        a: AnalyticVector { comps },
        q,
    };
    let pair_ext = extend_pair(&pair.sample(&base).unwrap(), &ext).unwrap();

    let xi = vec![2.0, 1.0, -1.0];
    let bump = ProbeBump::new(0.5, 0.35).unwrap();
    let opts = SolverOptions::default();
    let cauchy = CauchyGrid {
        plane_points: 64,
        transverse_points: 32,
    };

    let mut rows = Vec::new();
    for &h in &[0.4, 0.3, 0.2, 0.15, 0.1] {
        let t0 = Instant::now();
        let probe = CgoProbe::new(xi.clone(), h, ProbeRole::Solution, bump.clone()).unwrap();
        let phase = Phase::new(&probe, 1.0).unwrap();
        let field = TransportField::MirrorExtended(&pair.a);
        let transport = solve_transport(&field, phase.zeta(probe.role), ext.grid(), &cauchy).unwrap();
        let part = build_analytic_part(&probe, &phase, &transport.phi).unwrap();
        let data = compute_remainder(&probe, &phase, &pair_ext, &part, &opts).unwrap();
        let amp_norm = cdlab_core::fields::ops::l2_spacetime(&part.amplitude);
        println!(
            "h={h:5.3}  |r|={:10.4e}  |a|={:10.4e}  rel={:8.4}  transport_res={:7.1e}  iters={}  {:.1}s",
            data.norm,
            amp_norm,
            data.norm / amp_norm,
            transport.residual_sup,
            data.stats.total_iterations,
            t0.elapsed().as_secs_f64()
        );
        rows.push((h.ln(), data.norm.ln()));
    }
    let m = rows.len() as f64;
    let sx: f64 = rows.iter().map(|r| r.0).sum::<f64>() / m;
    let sy: f64 = rows.iter().map(|r| r.1).sum::<f64>() / m;
    let slope: f64 = rows.iter().map(|r| (r.0 - sx) * (r.1 - sy)).sum::<f64>()
        / rows.iter().map(|r| (r.0 - sx).powi(2)).sum::<f64>();
    println!("least-squares slope: {slope:.4}");
}
