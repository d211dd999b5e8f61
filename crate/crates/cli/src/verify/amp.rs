use std::f64::consts::SQRT_2;

use serde_json::json;
use tnnball_core::amplituhedron::{build_spec, cyclic_polytope_oracle, AmpFlow, AmplituhedronPoint, HullMembership};
use tnnball_core::cyclic::{ChartPoint, TauEigensystem};
use tnnball_core::flow::{sample_points, verify_flow_axioms};
use tnnball_core::grassmann::{sample_point, SampleKind};
use tnnball_core::subsets::k_subsets;
use tnnball_core::Matrix;

use super::{bounded, ensure, max_abs_diff, Case, Check, Ctx};

pub fn cases() -> Vec<Case> {
    vec![
        Case { id: "amp.build_spec.worked_z0", ops: &["build_spec"], run: spec_worked },
        Case { id: "amp.build_spec.positive_minors", ops: &["build_spec"], run: spec_minors },
        Case { id: "amp.build_spec.square_edge_case", ops: &["build_spec"], run: spec_square },
        Case { id: "amp.build_spec.invalid", ops: &["build_spec"], run: spec_invalid },
        Case { id: "amp.map.center", ops: &["amplituhedron_map"], run: map_center },
        Case { id: "amp.map.tetrahedron_to_square", ops: &["amplituhedron_map"], run: map_square },
        Case { id: "amp.map.explicit_n4", ops: &["amplituhedron_map"], run: map_explicit },
        Case { id: "amp.map.diagram_commutes", ops: &["amplituhedron_map", "chart_project"], run: map_diagram },
        Case { id: "amp.chart_project.examples", ops: &["chart_project"], run: project_examples },
        Case { id: "amp.flow_m.examples", ops: &["flow_m"], run: flow_examples },
        Case { id: "amp.flow_m.equivariance", ops: &["flow_m", "chart_project"], run: flow_equivariance },
        Case { id: "amp.flow_m.axioms", ops: &["flow_m", "verify_flow_axioms"], run: flow_axioms },
        Case { id: "amp.hull.square_queries", ops: &["cyclic_polytope_oracle"], run: hull_queries },
        Case { id: "amp.hull.images_inside", ops: &["cyclic_polytope_oracle", "amplituhedron_map"], run: hull_images },
        Case { id: "amp.hull.flow_moves_inside", ops: &["cyclic_polytope_oracle", "flow_m"], run: hull_flow },
    ]
}

const SHAPES: [(usize, usize, usize); 4] = [(1, 2, 4), (1, 2, 5), (2, 2, 5), (2, 2, 6)];

fn spec_worked(ctx: &Ctx) -> Check {
    let spec = build_spec(1, 2, 4)?;
    let h = 0.5;
    let s = 1.0 / SQRT_2;
    let want = [[h, h, h, h], [s, 0.0, -s, 0.0], [0.0, s, 0.0, -s]];
    for (i, row) in want.iter().enumerate() {
        let got = spec.z0().row(i);
        let neg: Vec<f64> = row.iter().map(|x| -x).collect();
        let err = max_abs_diff(got, row).min(max_abs_diff(got, &neg));
        ensure(err <= ctx.tol, json!({"k": 1, "m": 2, "n": 4, "row": i + 1}), row, got, Some(ctx.tol))?;
    }
    Ok(())
}

fn min_maximal_minor(z: &Matrix<f64>) -> Result<f64, tnnball_core::Error> {
    let (r, n) = z.shape();
    let mut min = f64::INFINITY;
    for s in k_subsets(n, r) {
        min = min.min(z.select_columns(&s).det()?);
    }
    Ok(min)
}

fn spec_minors(_: &Ctx) -> Check {
    for (k, m, n) in [(2, 2, 5), (1, 2, 4), (1, 4, 7), (2, 2, 6), (3, 2, 7)] {
        let spec = build_spec(k, m, n)?;
        let min = min_maximal_minor(spec.z0())?;
        ensure(min > 0.0, json!({"k": k, "m": m, "n": n}), "all maximal minors positive", min, None)?;
    }
    Ok(())
}

fn spec_square(ctx: &Ctx) -> Check {
    let spec = build_spec(1, 2, 3)?;
    let z = spec.z0();
    let ortho = z.matmul(&z.transpose())?.max_abs_diff(&Matrix::identity(3));
    bounded(json!({"k": 1, "m": 2, "n": 3, "check": "Z0 Z0^T = I"}), ortho, ctx.tol)?;
    ensure(z.det()? > 0.0, json!({"k": 1, "m": 2, "n": 3}), "det Z0 > 0", z.det()?, None)
}

fn spec_invalid(_: &Ctx) -> Check {
    for (k, m, n) in [(1, 3, 5), (2, 2, 3), (0, 2, 4)] {
        let got = build_spec(k, m, n);
        ensure(got.is_err(), json!({"k": k, "m": m, "n": n}), "error", got.is_ok(), None)?;
    }
    Ok(())
}

fn map_center(ctx: &Ctx) -> Check {
    let spec = build_spec(1, 2, 4)?;
    let u1 = spec.eigensystem().basis().select_rows(&[0]);
    let got = spec.amplituhedron_map(&u1, ctx.tol)?.flat();
    bounded(json!({"M": "u1"}), got.iter().fold(0.0_f64, |a, x| a.max(x.abs())), ctx.tol)
}

fn map_square(ctx: &Ctx) -> Check {
    let spec = build_spec(1, 2, 4)?;
    let r = SQRT_2;
    let verts = [
        ([0.0, r, -1.0], [0.0, r]),
        ([0.0, -r, -1.0], [0.0, -r]),
        ([r, 0.0, 1.0], [r, 0.0]),
        ([-r, 0.0, 1.0], [-r, 0.0]),
    ];
    for (a, want) in verts {
        let m = spec.eigensystem().chart_embed(&ChartPoint::from_flat(1, 4, &a)?)?;
        let got = spec.amplituhedron_map(&m, ctx.tol)?.flat();
        ensure(max_abs_diff(&got, &want) <= ctx.tol, json!({"chart": a}), want, got, Some(ctx.tol))?;
    }
    let mut images = spec.vertex_images()?;
    images.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    ensure(images.len() == 4, json!({"k": 1, "m": 2, "n": 4}), 4, images.len(), None)
}

/// `v = (1 + sqrt2 a + c, 1 + sqrt2 b - c, 1 - sqrt2 a + c, 1 - sqrt2 b - c) / 2`
/// maps to `(a, b)`.
fn map_explicit(ctx: &Ctx) -> Check {
    let spec = build_spec(1, 2, 4)?;
    for p in sample_points(3, 100, 0.3, ctx.seed) {
        let (a, b, c) = (p[0], p[1], p[2]);
        let v = Matrix::from_rows(vec![vec![
            0.5 * (1.0 + SQRT_2 * a + c),
            0.5 * (1.0 + SQRT_2 * b - c),
            0.5 * (1.0 - SQRT_2 * a + c),
            0.5 * (1.0 - SQRT_2 * b - c),
        ]])?;
        let got = spec.amplituhedron_map(&v, ctx.tol)?.flat();
        bounded(json!({"abc": p}), max_abs_diff(&got, &[a, b]), 1e-12)?;
    }
    Ok(())
}

fn map_diagram(ctx: &Ctx) -> Check {
    for (k, m, n) in SHAPES {
        let spec = build_spec(k, m, n)?;
        for s in 0..250 {
            let seed = ctx.seed.wrapping_add(s);
            let x = sample_point::<f64>(&SampleKind::RandomTnn, k, n, seed)?;
            let direct = spec.amplituhedron_map(&x, ctx.tol)?.flat();
            let around = spec.chart_project(&spec.eigensystem().chart_invert(&x)?)?.flat();
            let scale = direct.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
            bounded(json!({"k": k, "m": m, "n": n, "seed": seed}), max_abs_diff(&direct, &around) / scale, ctx.tol)?;
        }
    }
    Ok(())
}

fn project_examples(_: &Ctx) -> Check {
    let spec = build_spec(1, 2, 4)?;
    let zero = spec.chart_project(&ChartPoint::zeros(1, 4))?.flat();
    ensure(zero == [0.0, 0.0], json!({"A": [[0, 0, 0]]}), [0.0, 0.0], zero, None)?;
    let got = spec.chart_project(&ChartPoint::from_flat(1, 4, &[1.0, 2.0, 3.0])?)?.flat();
    ensure(got == [1.0, 2.0], json!({"A": [[1, 2, 3]]}), [1.0, 2.0], got, None)
}

fn point(k: usize, m: usize, v: &[f64]) -> Result<AmplituhedronPoint, tnnball_core::Error> {
    Ok(AmplituhedronPoint { a: Matrix::new(k, m, v.to_vec())? })
}

fn flow_examples(ctx: &Ctx) -> Check {
    let spec = build_spec(2, 2, 5)?;
    let zero = spec.flow_m(1.5, &point(2, 2, &[0.0; 4])?)?.flat();
    ensure(zero == [0.0; 4], json!({"P": 0, "t": 1.5}), [0.0; 4], zero, None)?;
    let p = sample_points(4, 1, 1.0, ctx.seed).remove(0);
    let same = spec.flow_m(0.0, &point(2, 2, &p)?)?.flat();
    ensure(same == p, json!({"P": p, "t": 0}), &p, same, None)
}

fn flow_equivariance(ctx: &Ctx) -> Check {
    for (k, m, n) in SHAPES {
        let spec = build_spec(k, m, n)?;
        let eig: &TauEigensystem = spec.eigensystem();
        for (s, v) in sample_points(k * (n - k), 20, 1.0, ctx.seed).iter().enumerate() {
            let t = [-0.7, 0.3, 2.0][s % 3];
            let a = ChartPoint::from_flat(k, n, v)?;
            let lhs = spec.flow_m(t, &spec.chart_project(&a)?)?.flat();
            let rhs = spec.chart_project(&eig.flow_chart(t, &a)?)?.flat();
            ensure(lhs == rhs, json!({"k": k, "m": m, "n": n, "A": v, "t": t}), &rhs, &lhs, None)?;
        }
    }
    Ok(())
}

fn flow_axioms(ctx: &Ctx) -> Check {
    let grid = [-1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0];
    for (k, m, n) in [(1, 2, 4), (1, 2, 6), (1, 4, 7)] {
        let flow = AmpFlow::new(build_spec(k, m, n)?, ctx.tol)?;
        let pts = sample_points(m, 100, 1.0, ctx.seed);
        let report = verify_flow_axioms(&flow, &pts, &grid, ctx.tol);
        ensure(report.pass, json!({"k": k, "m": m, "n": n}), "pass", &report, Some(ctx.tol))?;
    }
    Ok(())
}

fn hull_queries(ctx: &Ctx) -> Check {
    let hull = cyclic_polytope_oracle(&build_spec(1, 2, 4)?, ctx.tol)?;
    let queries = [
        ([0.0, 0.0], HullMembership::Inside),
        ([SQRT_2, 0.0], HullMembership::Boundary),
        ([2.0, 2.0], HullMembership::Outside),
    ];
    for (q, want) in queries {
        let got = hull.classify(&q, ctx.tol)?;
        ensure(got == want, json!({"q": q}), want, got, Some(ctx.tol))?;
    }
    Ok(())
}

fn hull_images(ctx: &Ctx) -> Check {
    for (m, n) in [(2, 4), (2, 5), (2, 7), (4, 6), (4, 8)] {
        let spec = build_spec(1, m, n)?;
        let hull = cyclic_polytope_oracle(&spec, ctx.tol)?;
        for s in 0..100 {
            let seed = ctx.seed.wrapping_add(s);
            let x = sample_point::<f64>(&SampleKind::RandomTnn, 1, n, seed)?;
            let img = spec.amplituhedron_map(&x, ctx.tol)?.flat();
            let got = hull.classify(&img, 1e3 * ctx.tol)?;
            ensure(got != HullMembership::Outside, json!({"m": m, "n": n, "seed": seed}), "inside or boundary", got, Some(1e3 * ctx.tol))?;
        }
    }
    Ok(())
}

fn hull_flow(ctx: &Ctx) -> Check {
    for (m, n) in [(2, 4), (2, 6), (4, 7)] {
        let spec = build_spec(1, m, n)?;
        let hull = cyclic_polytope_oracle(&spec, ctx.tol)?;
        let mut images = spec.vertex_images()?;
        for s in 0..30 {
            let x = sample_point::<f64>(&SampleKind::RandomTnn, 1, n, ctx.seed.wrapping_add(s))?;
            images.push(spec.amplituhedron_map(&x, ctx.tol)?.flat());
        }
        for img in images {
            for t in [0.25, 1.0] {
                let moved = spec.flow_m(t, &point(1, m, &img)?)?.flat();
                let got = hull.classify(&moved, ctx.tol)?;
                ensure(got == HullMembership::Inside, json!({"m": m, "n": n, "image": img, "t": t}), HullMembership::Inside, got, Some(ctx.tol))?;
            }
        }
    }
    Ok(())
}
