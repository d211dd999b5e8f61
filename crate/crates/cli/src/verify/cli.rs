use serde_json::json;
use tnnball_core::cyclic::{ChartPoint, TauEigensystem};
use tnnball_core::electrical::ResistorNetwork;
use tnnball_core::grassmann::{sample_point, SampleKind};
use tnnball_core::io::{matrix_from_json, matrix_to_json, network_from_json, network_to_json, parse_json, plucker_from_json};
use tnnball_core::scalar::rat;
use tnnball_core::unipotent::UnipotentMatrix;
use tnnball_core::{Matrix, Rational};

use super::{bounded, close, ensure, Case, Check, Ctx};
use crate::trajectory::{gr_trajectory, u_trajectory};

pub fn cases() -> Vec<Case> {
    vec![
        Case { id: "cli.io_codec.matrix", ops: &["io_codec"], run: codec_matrix },
        Case { id: "cli.io_codec.bad_key", ops: &["io_codec"], run: codec_bad_key },
        Case { id: "cli.io_codec.network", ops: &["io_codec"], run: codec_network },
        Case { id: "cli.trajectory.gr_origin", ops: &["trajectory_export"], run: traj_origin },
        Case { id: "cli.trajectory.u_formulas", ops: &["trajectory_export"], run: traj_u },
        Case { id: "cli.trajectory.gr_boundary", ops: &["trajectory_export"], run: traj_boundary },
    ]
}

fn codec_matrix(_: &Ctx) -> Check {
    let m = Matrix::from_rows(vec![vec![rat(1, 3), rat(-2, 1), rat(0, 1)], vec![rat(7, 5), rat(1, 1), rat(-1, 9)]])?;
    let text = matrix_to_json(&m).to_string();
    let back: Matrix<Rational> = matrix_from_json(&parse_json(&text)?)?;
    ensure(back == m, json!({"json": text}), "identical matrix", matrix_to_json(&back), None)?;
    let third = &back[(0, 0)];
    ensure(*third == rat(1, 3), json!({"json": text}), "1/3", third.to_string(), None)
}

fn codec_bad_key(_: &Ctx) -> Check {
    let text = r#"{"k": 2, "n": 3, "coords": {"1,2": "1", "2,1": "1", "2,3": "1"}}"#;
    let got = plucker_from_json::<Rational>(&parse_json(text)?);
    let msg = got.as_ref().err().map(|e| e.to_string()).unwrap_or_default();
    ensure(got.is_err() && msg.contains("2,1"), json!({"json": text}), "error naming \"2,1\"", msg, None)
}

fn codec_network(_: &Ctx) -> Check {
    let net = ResistorNetwork::new(vec![0, 1, 2], vec![(0, 3, rat(1, 3)), (1, 3, rat(2, 1)), (2, 3, rat(5, 7))])?;
    let text = network_to_json(&net).to_string();
    let back: ResistorNetwork<Rational> = network_from_json(&parse_json(&text)?)?;
    ensure(
        back.boundary() == net.boundary() && back.edges() == net.edges(),
        json!({"json": text}),
        "identical network",
        network_to_json(&back),
        None,
    )
}

fn traj_origin(ctx: &Ctx) -> Check {
    let eig = TauEigensystem::new(2, 4)?;
    let table = gr_trajectory(&eig, &ChartPoint::zeros(2, 4), &[-1.0, 0.0, 0.5, 3.0])?;
    let first = &table.rows[0][1..];
    for row in &table.rows {
        bounded(json!({"k": 2, "n": 4, "A": 0, "t": row[0]}), super::max_abs_diff(&row[1..], first), ctx.tol)?;
    }
    Ok(())
}

fn traj_u(ctx: &Ctx) -> Check {
    let c = 2.0;
    let (p, q, r) = (0.0, 0.0, 0.0);
    let x = UnipotentMatrix::from_upper(3, &[p, q, r])?;
    let table = u_trajectory(&x, c, &[1.0, 2.0, 4.0])?;
    let cols = |name: &str| table.column(name).unwrap_or_default();
    let (b12, b13, b23) = (cols("b12"), cols("b13"), cols("b23"));
    for (i, t) in [1.0f64, 2.0, 4.0].into_iter().enumerate() {
        let inputs = json!({"n": 3, "pqr": [p, q, r], "c": c, "t": t});
        close(inputs.clone(), (p - 1.0) / (c * t), b12[i], ctx.tol)?;
        close(inputs.clone(), (r - 1.0) / (c * t), b23[i], ctx.tol)?;
        let want = ((2.0 * r - 2.0) * t + 2.0 * q - 2.0 * r + 1.0) / (c * c * t * t);
        close(inputs, want, b13[i], ctx.tol)?;
    }
    Ok(())
}

fn traj_boundary(ctx: &Ctx) -> Check {
    let eig = TauEigensystem::new(2, 4)?;
    // a coordinate subspace lies on the boundary and inside the chart
    let m: Matrix<f64> = sample_point(&SampleKind::BoundaryCoordinate(Some(vec![0, 1])), 2, 4, ctx.seed)?;
    let a = eig.chart_invert(&m)?;
    let ts = [-0.2, -0.05, 0.0, 0.05, 0.2];
    let table = gr_trajectory(&eig, &a, &ts)?;
    let margin = table.column("min_plucker").unwrap_or_default();
    let signs: Vec<i32> = margin
        .iter()
        .map(|&x| if x > ctx.tol { 1 } else if x < -ctx.tol { -1 } else { 0 })
        .collect();
    ensure(signs == [-1, -1, 0, 1, 1], json!({"k": 2, "n": 4, "subset": [1, 2], "t": ts}), [-1, -1, 0, 1, 1], margin, Some(ctx.tol))
}
