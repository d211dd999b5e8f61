use std::f64::consts::E;

use serde_json::json;
use tnnball_core::cyclic::{GrChartFlow, TauEigensystem};
use tnnball_core::flow::{
    euclidean_norm, extend_from_ball, retract_to_ball, sample_points, time_to_boundary, time_to_radius,
    verify_flow_axioms, ContractiveFlow, FnFlow, Membership,
};
use tnnball_core::Error;

use super::{bounded, close, ensure, max_abs_diff, Case, Check, Ctx};

pub fn cases() -> Vec<Case> {
    vec![
        Case { id: "flow.axioms.diagonal", ops: &["verify_flow_axioms"], run: axioms_diagonal },
        Case { id: "flow.axioms.identity_fails", ops: &["verify_flow_axioms"], run: axioms_identity },
        Case { id: "flow.axioms.gr_chart", ops: &["verify_flow_axioms"], run: axioms_gr },
        Case { id: "flow.axioms.limits", ops: &["verify_flow_axioms"], run: axioms_limits },
        Case { id: "flow.time_to_radius.closed_form", ops: &["time_to_radius"], run: radius_closed_form },
        Case { id: "flow.time_to_radius.on_sphere", ops: &["time_to_radius"], run: radius_on_sphere },
        Case { id: "flow.time_to_radius.zero_point", ops: &["time_to_radius"], run: radius_zero },
        Case { id: "flow.time_to_boundary.on_boundary", ops: &["time_to_boundary"], run: boundary_on_boundary },
        Case { id: "flow.time_to_boundary.closed_form", ops: &["time_to_boundary"], run: boundary_closed_form },
        Case { id: "flow.time_to_boundary.near_origin", ops: &["time_to_boundary"], run: boundary_near_origin },
        Case { id: "flow.time_to_boundary.outside", ops: &["time_to_boundary"], run: boundary_outside },
        Case { id: "flow.retract.origin", ops: &["retract_to_ball"], run: retract_origin },
        Case { id: "flow.retract.boundary_to_sphere", ops: &["retract_to_ball"], run: retract_boundary },
        Case { id: "flow.retract.round_trip", ops: &["retract_to_ball", "extend_from_ball"], run: retract_round_trip },
        Case { id: "flow.extend.origin", ops: &["extend_from_ball"], run: extend_origin },
        Case { id: "flow.extend.sphere_to_boundary", ops: &["extend_from_ball"], run: extend_sphere },
        Case { id: "flow.extend.round_trip", ops: &["extend_from_ball", "retract_to_ball"], run: extend_round_trip },
        Case { id: "flow.ball.gr24", ops: &["retract_to_ball", "extend_from_ball"], run: ball_gr24 },
    ]
}

/// `(x, y) -> (e^-t x, e^-2t y)` with region the open unit disk.
pub fn diagonal_disk() -> FnFlow {
    FnFlow::new(
        2,
        |t, p| vec![(-t).exp() * p[0], (-2.0 * t).exp() * p[1]],
        euclidean_norm,
        |p, tol| {
            let d = 1.0 - euclidean_norm(p);
            if d > tol {
                Membership::Interior
            } else if d >= -tol {
                Membership::ClosureBoundary
            } else {
                Membership::Outside
            }
        },
    )
}

fn grid() -> [f64; 7] {
    [-1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0]
}

fn axioms_diagonal(ctx: &Ctx) -> Check {
    let pts = sample_points(2, 200, 2.0, ctx.seed);
    let report = verify_flow_axioms(&diagonal_disk(), &pts, &grid(), ctx.tol);
    ensure(report.pass, json!({"flow": "diagonal", "samples": 200}), "pass", &report, Some(ctx.tol))
}

fn axioms_identity(ctx: &Ctx) -> Check {
    let flow = FnFlow::new(2, |_, p| p.to_vec(), euclidean_norm, |_, _| Membership::Interior);
    let pts = sample_points(2, 20, 1.0, ctx.seed);
    let report = verify_flow_axioms(&flow, &pts, &grid(), ctx.tol);
    ensure(
        !report.pass && report.contraction_failures > 0 && report.identity_max == 0.0 && report.group_max == 0.0,
        json!({"flow": "identity", "samples": 20}),
        "contraction fails, identity and group laws hold",
        &report,
        Some(ctx.tol),
    )
}

fn axioms_gr(ctx: &Ctx) -> Check {
    let flow = GrChartFlow::new(TauEigensystem::new(2, 4)?);
    let pts = sample_points(4, 200, 1.0, ctx.seed);
    let report = verify_flow_axioms(&flow, &pts, &grid(), ctx.tol);
    ensure(report.pass, json!({"flow": "gr", "k": 2, "n": 4}), "pass", &report, Some(ctx.tol))
}

fn axioms_limits(ctx: &Ctx) -> Check {
    let eps = 1e-6;
    let eig = TauEigensystem::new(2, 4)?;
    let big_t = 40.0 / eig.spectral_gap();
    let gr = GrChartFlow::new(eig);
    let disk = diagonal_disk();
    let flows: [(&str, &dyn ContractiveFlow, f64); 2] = [("diagonal", &disk, 40.0), ("gr", &gr, big_t)];
    for (name, flow, t) in flows {
        for p in sample_points(flow.dim(), 50, 1.0, ctx.seed) {
            let inputs = json!({"flow": name, "p": p, "T": t});
            let fwd = flow.norm(&flow.flow(t, &p));
            let back = flow.norm(&flow.flow(-t, &p));
            ensure(fwd < eps && back > 1.0 / eps, inputs, json!({"forward_below": eps, "backward_above": 1.0 / eps}), [fwd, back], None)?;
        }
    }
    Ok(())
}

fn radius_closed_form(ctx: &Ctx) -> Check {
    let flow = diagonal_disk();
    for p in [[E, 0.0], [0.0, E * E]] {
        let t = time_to_radius(&flow, &p, 1.0, ctx.tol)?;
        close(json!({"p": p, "r": 1}), 1.0, t, 10.0 * ctx.tol.max(1e-10))?;
    }
    Ok(())
}

fn radius_on_sphere(ctx: &Ctx) -> Check {
    let flow = diagonal_disk();
    for p in sample_points(2, 20, 1.0, ctx.seed) {
        let r = euclidean_norm(&p);
        let t = time_to_radius(&flow, &p, r, ctx.tol)?;
        close(json!({"p": p, "r": r}), 0.0, t, 10.0 * ctx.tol.max(1e-10))?;
    }
    Ok(())
}

fn radius_zero(ctx: &Ctx) -> Check {
    let got = time_to_radius(&diagonal_disk(), &[0.0, 0.0], 1.0, ctx.tol);
    ensure(matches!(got, Err(Error::ZeroPoint)), json!({"p": [0, 0], "r": 1}), "error", format!("{got:?}"), None)
}

fn boundary_on_boundary(ctx: &Ctx) -> Check {
    let flow = diagonal_disk();
    for p in [[1.0, 0.0], [0.6, -0.8]] {
        let t = time_to_boundary(&flow, &p, ctx.tol)?;
        ensure(t == 0.0, json!({"p": p}), 0.0, t, None)?;
    }
    Ok(())
}

fn boundary_closed_form(ctx: &Ctx) -> Check {
    let p = [1.0 / E, 0.0];
    let t = time_to_boundary(&diagonal_disk(), &p, ctx.tol)?;
    close(json!({"p": p}), -1.0, t, 10.0 * ctx.tol.max(1e-10))
}

fn boundary_near_origin(ctx: &Ctx) -> Check {
    let flow = diagonal_disk();
    let p = [1e-6, -2e-6];
    let t = time_to_boundary(&flow, &p, ctx.tol)?;
    let at = flow.flow(t, &p);
    let m = flow.membership(&at, ctx.tol);
    ensure(
        t < -5.0 && m == Membership::ClosureBoundary,
        json!({"p": p}),
        json!({"t_boundary_below": -5.0, "membership": "closure_boundary"}),
        json!({"t_boundary": t, "membership": m}),
        Some(ctx.tol),
    )
}

fn boundary_outside(ctx: &Ctx) -> Check {
    let got = time_to_boundary(&diagonal_disk(), &[2.0, 0.0], ctx.tol);
    ensure(matches!(got, Err(Error::OutsideRegion)), json!({"p": [2, 0]}), "error", format!("{got:?}"), None)
}

fn retract_origin(ctx: &Ctx) -> Check {
    let got = retract_to_ball(&diagonal_disk(), &[0.0, 0.0], 0.5, ctx.tol)?;
    ensure(got.image == [0.0, 0.0], json!({"p": [0, 0], "r": 0.5}), [0.0, 0.0], got.image, None)
}

fn retract_boundary(ctx: &Ctx) -> Check {
    let flow = diagonal_disk();
    for p in [[1.0, 0.0], [0.0, -1.0], [0.8, 0.6]] {
        let got = retract_to_ball(&flow, &p, 0.3, ctx.tol)?;
        close(json!({"p": p, "r": 0.3}), 0.3, euclidean_norm(&got.image), ctx.tol)?;
        ensure(got.t_boundary == 0.0, json!({"p": p}), 0.0, got.t_boundary, None)?;
    }
    Ok(())
}

fn disk_interior(ctx: &Ctx, count: usize) -> Vec<Vec<f64>> {
    sample_points(2, 4 * count, 1.0, ctx.seed)
        .into_iter()
        .filter(|p| {
            let r = euclidean_norm(p);
            r > 1e-3 && r < 0.999
        })
        .take(count)
        .collect()
}

fn retract_round_trip(ctx: &Ctx) -> Check {
    let flow = diagonal_disk();
    let r = 0.5;
    for p in disk_interior(ctx, 50) {
        let a = retract_to_ball(&flow, &p, r, ctx.tol)?;
        ensure(euclidean_norm(&a.image) <= r + ctx.tol, json!({"p": p}), "image in ball", &a.image, Some(ctx.tol))?;
        let back = extend_from_ball(&flow, &a.image, r, ctx.tol)?;
        let err = max_abs_diff(&back.image, &p);
        bounded(json!({"p": p, "r": r}), err, 10.0 * ctx.tol.max(1e-9))?;
    }
    Ok(())
}

fn extend_origin(ctx: &Ctx) -> Check {
    let got = extend_from_ball(&diagonal_disk(), &[0.0, 0.0], 0.5, ctx.tol)?;
    ensure(got.image == [0.0, 0.0], json!({"p": [0, 0], "r": 0.5}), [0.0, 0.0], got.image, None)
}

fn extend_sphere(ctx: &Ctx) -> Check {
    let flow = diagonal_disk();
    let r = 0.4;
    for theta in [0.0, 0.7, 2.0, 4.0] {
        let p = [r * f64::cos(theta), r * f64::sin(theta)];
        let got = extend_from_ball(&flow, &p, r, ctx.tol)?;
        let m = flow.membership(&got.image, 10.0 * ctx.tol);
        ensure(m == Membership::ClosureBoundary, json!({"p": p, "r": r}), "closure_boundary", m, Some(10.0 * ctx.tol))?;
    }
    Ok(())
}

fn extend_round_trip(ctx: &Ctx) -> Check {
    let flow = diagonal_disk();
    let r = 0.5;
    for p in disk_interior(ctx, 50) {
        let q: Vec<f64> = p.iter().map(|x| x * r).collect();
        let b = extend_from_ball(&flow, &q, r, ctx.tol)?;
        let a = retract_to_ball(&flow, &b.image, r, ctx.tol)?;
        let err = max_abs_diff(&a.image, &q);
        bounded(json!({"p": q, "r": r}), err, 10.0 * ctx.tol.max(1e-9))?;
    }
    Ok(())
}

/// Both compositions on the `Gr(2,4)` chart flow with `r = 0.1`, whose
/// ball lies inside the region.
fn ball_gr24(ctx: &Ctx) -> Check {
    let flow = GrChartFlow::new(TauEigensystem::new(2, 4)?);
    let r = 0.1;
    for (s, p) in sample_points(4, 30, 1.0, ctx.seed).into_iter().enumerate() {
        let scale = r * 0.99 / euclidean_norm(&p).max(1e-12);
        let q: Vec<f64> = p.iter().map(|x| x * scale).collect();
        let b = extend_from_ball(&flow, &q, r, ctx.tol)?;
        let back = retract_to_ball(&flow, &b.image, r, ctx.tol)?;
        bounded(json!({"sample": s, "r": r, "map": "alpha(beta(q))"}), max_abs_diff(&back.image, &q), 1e-7)?;
    }
    Ok(())
}
