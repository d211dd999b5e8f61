use std::f64::consts::{PI, SQRT_2};

use serde_json::json;
use tnnball_core::cyclic::{
    build_operators, shift_first_order, shift_plucker_expansion, tau_eigenvalues, x0_plucker, ChartPoint,
    GrChartFlow, TauEigensystem,
};
use tnnball_core::flow::{sample_points, verify_flow_axioms};
use tnnball_core::grassmann::{
    cauchy_binet, classify_positivity, plucker, plucker_raw, projective_distance, sample_point, Normalization,
    PluckerVector, PositivityClass, SampleKind,
};
use tnnball_core::scalar::rat;
use tnnball_core::subsets::{k_subsets, subset_key};
use tnnball_core::{Error, Matrix, Rational};

use super::{bounded, close, ensure, max_abs_diff, Case, Check, Ctx};

pub fn cases() -> Vec<Case> {
    vec![
        Case { id: "gr.plucker.worked_basis", ops: &["plucker"], run: plucker_worked_basis },
        Case { id: "gr.plucker.identity_block", ops: &["plucker"], run: plucker_identity_block },
        Case { id: "gr.plucker.laplace_oracle", ops: &["plucker", "sample_point"], run: plucker_laplace },
        Case { id: "gr.plucker.rank_deficient", ops: &["plucker"], run: plucker_rank_deficient },
        Case { id: "gr.plucker.row_operations", ops: &["plucker"], run: plucker_row_operations },
        Case { id: "gr.plucker.three_term_relation", ops: &["plucker"], run: plucker_relation },
        Case { id: "gr.classify.x0_is_tp", ops: &["classify_positivity", "x0_plucker"], run: classify_x0 },
        Case { id: "gr.classify.coordinate_is_boundary", ops: &["classify_positivity"], run: classify_coordinate },
        Case { id: "gr.classify.mixed_signs", ops: &["classify_positivity"], run: classify_mixed },
        Case { id: "gr.cauchy_binet.identity", ops: &["cauchy_binet"], run: cb_identity },
        Case { id: "gr.cauchy_binet.product_oracle", ops: &["cauchy_binet"], run: cb_product },
        Case { id: "gr.cauchy_binet.orthogonal", ops: &["cauchy_binet"], run: cb_orthogonal },
        Case { id: "gr.sample_point.vandermonde_tp", ops: &["sample_point"], run: sample_vandermonde },
        Case { id: "gr.sample_point.coordinate", ops: &["sample_point"], run: sample_coordinate },
        Case { id: "gr.sample_point.generic_rank", ops: &["sample_point"], run: sample_generic },
        Case { id: "gr.build_operators.corners", ops: &["build_operators"], run: operators_corners },
        Case { id: "gr.build_operators.structure", ops: &["build_operators"], run: operators_structure },
        Case { id: "gr.tau_eigensystem.worked_values", ops: &["tau_eigensystem"], run: eigen_values },
        Case { id: "gr.tau_eigensystem.residuals", ops: &["tau_eigensystem"], run: eigen_residuals },
        Case { id: "gr.tau_eigensystem.sign", ops: &["tau_eigensystem"], run: eigen_sign },
        Case { id: "gr.x0_plucker.ratios", ops: &["x0_plucker"], run: x0_ratios },
        Case { id: "gr.x0_plucker.eigenvector_minors", ops: &["x0_plucker", "tau_eigensystem"], run: x0_minors },
        Case { id: "gr.chart_embed.zero_is_x0", ops: &["chart_embed"], run: embed_zero },
        Case { id: "gr.chart_embed.worked_matrix", ops: &["chart_embed"], run: embed_worked },
        Case { id: "gr.chart_embed.worked_polynomials", ops: &["chart_embed", "plucker"], run: embed_polynomials },
        Case { id: "gr.chart_invert.round_trip", ops: &["chart_invert", "chart_embed"], run: invert_round_trip },
        Case { id: "gr.chart_invert.delta_formula", ops: &["chart_invert"], run: invert_delta_formula },
        Case { id: "gr.chart_invert.x0_is_zero", ops: &["chart_invert"], run: invert_x0 },
        Case { id: "gr.chart_invert.zero_cells", ops: &["chart_invert", "chart_embed"], run: invert_zero_cells },
        Case { id: "gr.chart_invert.outside_chart", ops: &["chart_invert"], run: invert_outside },
        Case { id: "gr.flow_chart.examples", ops: &["flow_chart"], run: flow_chart_examples },
        Case { id: "gr.flow_chart.axioms", ops: &["flow_chart", "verify_flow_axioms"], run: flow_chart_axioms },
        Case { id: "gr.flow_grassmann.coordinate_becomes_tp", ops: &["flow_grassmann"], run: grass_coordinate },
        Case { id: "gr.flow_grassmann.chart_consistency", ops: &["flow_grassmann", "chart_invert"], run: grass_consistency },
        Case { id: "gr.flow_grassmann.tnn_becomes_tp", ops: &["flow_grassmann"], run: grass_tnn_to_tp },
        Case { id: "gr.flow_grassmann.negative_time_leaves", ops: &["flow_grassmann"], run: grass_negative },
        Case { id: "gr.shift_expansion.examples", ops: &["shift_plucker_expansion"], run: shift_examples },
        Case { id: "gr.shift_expansion.random", ops: &["shift_plucker_expansion"], run: shift_random },
        Case { id: "gr.shift_expansion.first_order", ops: &["shift_plucker_expansion"], run: shift_first_order_check },
    ]
}

fn sqrt2_basis() -> Matrix<f64> {
    let r = SQRT_2;
    Matrix::from_rows(vec![
        vec![0.0, 1.0, r, 1.0],
        vec![-r, -1.0, 0.0, 1.0],
        vec![r, -1.0, 0.0, 1.0],
        vec![0.0, 1.0, -r, 1.0],
    ])
    .expect("rectangular")
}

/// The worked `Gr(2,4)` eigensystem, rows scaled to unit length.
fn worked_eigensystem() -> Result<TauEigensystem, Error> {
    TauEigensystem::from_basis(2, 4, &sqrt2_basis().scale(&0.5))
}

fn worked_polynomials(a: f64, b: f64, c: f64, d: f64) -> [f64; 6] {
    let r = SQRT_2;
    [
        r * (1.0 - 2.0 * a + b - c + a * d - b * c),
        2.0 * (1.0 - b - c - a * d + b * c),
        r * (1.0 + 2.0 * a + b - c + a * d - b * c),
        r * (1.0 - 2.0 * d - b + c + a * d - b * c),
        2.0 * (1.0 + b + c - a * d + b * c),
        r * (1.0 + 2.0 * d - b + c + a * d - b * c),
    ]
}

fn worked_inverse(p: &[f64]) -> [f64; 4] {
    let r = SQRT_2;
    let (d12, d13, d14, d23, d24, d34) = (p[0], p[1], p[2], p[3], p[4], p[5]);
    let delta = d12 + d23 + d34 + d14 + r * d13 + r * d24;
    [
        (2.0 * d14 - 2.0 * d12) / delta,
        (d12 - d23 - d34 + d14 - r * d13 + r * d24) / delta,
        (-d12 + d23 + d34 - d14 - r * d13 + r * d24) / delta,
        (2.0 * d34 - 2.0 * d23) / delta,
    ]
}

fn laplace_det(m: &[Vec<Rational>]) -> Rational {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = rat(0, 1);
    for j in 0..m.len() {
        let minor: Vec<Vec<Rational>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = m[0][j].clone() * laplace_det(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

fn plucker_worked_basis(ctx: &Ctx) -> Check {
    let m = sqrt2_basis().select_rows(&[0, 1]);
    let got = plucker_raw(&m)?.coords().to_vec();
    let want = [SQRT_2, 2.0, SQRT_2, SQRT_2, 2.0, SQRT_2];
    let err = max_abs_diff(&got, &want);
    ensure(err <= ctx.tol, json!({"rows": m.to_rows()}), want, got, Some(ctx.tol))
}

fn plucker_identity_block(_: &Ctx) -> Check {
    for (k, n) in [(1, 3), (2, 4), (2, 5), (3, 6)] {
        let m = Matrix::<Rational>::from_fn(k, n, |i, j| if i == j { rat(1, 1) } else { rat(0, 1) });
        let p = plucker_raw(&m)?;
        for (s, x) in p.iter() {
            let want = if s == (0..k).collect::<Vec<_>>() { rat(1, 1) } else { rat(0, 1) };
            ensure(*x == want, json!({"k": k, "n": n, "subset": subset_key(&s)}), want.to_string(), x.to_string(), None)?;
        }
    }
    Ok(())
}

fn plucker_laplace(ctx: &Ctx) -> Check {
    for (k, n) in [(2, 5), (3, 5), (3, 6)] {
        for s in 0..10 {
            let seed = ctx.seed.wrapping_add(s);
            let m = sample_point::<Rational>(&SampleKind::Generic, k, n, seed)?;
            let p = plucker_raw(&m)?;
            for (subset, x) in p.iter() {
                let block: Vec<Vec<Rational>> =
                    (0..k).map(|i| subset.iter().map(|&j| m[(i, j)].clone()).collect()).collect();
                let want = laplace_det(&block);
                ensure(
                    *x == want,
                    json!({"k": k, "n": n, "seed": seed, "subset": subset_key(&subset)}),
                    want.to_string(),
                    x.to_string(),
                    None,
                )?;
            }
        }
    }
    Ok(())
}

fn plucker_rank_deficient(_: &Ctx) -> Check {
    let m = Matrix::from_rows(vec![vec![rat(1, 1), rat(2, 1), rat(3, 1)], vec![rat(2, 1), rat(4, 1), rat(6, 1)]])
        .expect("rectangular");
    let got = plucker_raw(&m);
    ensure(
        matches!(got, Err(Error::NotGrassmannianPoint { .. })),
        json!({"rows": [[1, 2, 3], [2, 4, 6]]}),
        "not a Grassmannian point",
        format!("{got:?}"),
        None,
    )
}

fn plucker_row_operations(ctx: &Ctx) -> Check {
    for s in 0..20 {
        let seed = ctx.seed.wrapping_add(s);
        let k = 1 + (s as usize % 3);
        let n = k + 1 + (s as usize % 3);
        let m = sample_point::<Rational>(&SampleKind::Generic, k, n, seed)?;
        // an invertible g: random entries shifted until the determinant is nonzero
        let mut g = sample_point::<Rational>(&SampleKind::Generic, k, k + 1, seed ^ 0x5eed)?.select_columns(&(0..k).collect::<Vec<_>>());
        let mut bump = 0;
        while g.det()? == rat(0, 1) {
            bump += 1;
            g = g.add(&Matrix::identity(k).scale(&rat(bump, 1)))?;
        }
        let before = plucker(&m)?;
        let after = plucker(&g.matmul(&m)?)?;
        ensure(
            before.coords() == after.coords(),
            json!({"k": k, "n": n, "seed": seed}),
            before.coords().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            after.coords().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            None,
        )?;
    }
    Ok(())
}

fn plucker_relation(ctx: &Ctx) -> Check {
    for s in 0..50 {
        let seed = ctx.seed.wrapping_add(s);
        for kind in [SampleKind::Generic, SampleKind::RandomTnn] {
            let m = sample_point::<Rational>(&kind, 2, 4, seed)?;
            let p = plucker_raw(&m)?;
            let d = |i: usize, j: usize| p.get(&[i, j]).clone();
            let rel = d(0, 1) * d(2, 3) - d(0, 2) * d(1, 3) + d(0, 3) * d(1, 2);
            ensure(rel == rat(0, 1), json!({"seed": seed, "kind": format!("{kind:?}")}), "0", rel.to_string(), None)?;
        }
    }
    Ok(())
}

fn classify_x0(ctx: &Ctx) -> Check {
    let p = x0_plucker(2, 4)?;
    let class = classify_positivity(&p, ctx.tol);
    ensure(class.is_tp(), json!({"k": 2, "n": 4}), "TP", class.label(), Some(ctx.tol))
}

fn classify_coordinate(ctx: &Ctx) -> Check {
    let mut coords = vec![0.0; 6];
    coords[0] = 1.0;
    let class = classify_positivity(&PluckerVector::new(2, 4, coords)?, ctx.tol);
    ensure(
        class.label() == "TNN_boundary",
        json!({"coords": {"1,2": 1}}),
        "TNN_boundary",
        class.label(),
        Some(ctx.tol),
    )
}

fn classify_mixed(ctx: &Ctx) -> Check {
    let mut coords = vec![rat(0, 1); 6];
    coords[0] = rat(1, 1);
    coords[1] = rat(-1, 1);
    let class = classify_positivity(&PluckerVector::new(2, 4, coords)?, ctx.tol);
    let ok = matches!(&class, PositivityClass::NotTnn { positive_at, negative_at }
        if positive_at == &vec![0, 1] && negative_at == &vec![0, 2]);
    ensure(
        ok,
        json!({"coords": {"1,2": "1", "1,3": "-1"}}),
        json!({"class": "not_TNN", "witness": ["1,2", "1,3"]}),
        format!("{class:?}"),
        None,
    )
}

fn cb_identity(_: &Ctx) -> Check {
    let m = Matrix::<Rational>::from_fn(2, 4, |i, j| if i == j { rat(1, 1) } else { rat(0, 1) });
    let got = cauchy_binet(&m, &m)?;
    ensure(got == rat(1, 1), json!({"m0": "[I2|0]", "m": "[I2|0]"}), "1", got.to_string(), None)
}

fn cb_product(ctx: &Ctx) -> Check {
    for k in 1..=3 {
        for n in k + 1..=6 {
            for s in 0..4 {
                let seed = ctx.seed.wrapping_add(100 * k as u64 + 10 * n as u64 + s);
                let m0 = sample_point::<Rational>(&SampleKind::Generic, k, n, seed)?;
                let m = sample_point::<Rational>(&SampleKind::Generic, k, n, seed ^ 0xabc)?;
                let want = m0.matmul(&m.transpose())?.det()?;
                let got = cauchy_binet(&m0, &m)?;
                ensure(got == want, json!({"k": k, "n": n, "seed": seed}), want.to_string(), got.to_string(), None)?;
            }
        }
    }
    let bad = cauchy_binet(&Matrix::<Rational>::zeros(2, 4), &Matrix::zeros(2, 5));
    ensure(
        matches!(bad, Err(Error::ShapeMismatch { .. })),
        json!({"shapes": [[2, 4], [2, 5]]}),
        "shape mismatch",
        format!("{bad:?}"),
        None,
    )
}

fn cb_orthogonal(ctx: &Ctx) -> Check {
    let basis = sqrt2_basis();
    let m0 = basis.select_rows(&[0, 1]);
    let pts = sample_points(4, 2, 1.0, ctx.seed);
    // project a random vector off the rows of m0
    let mut v = pts[0].clone();
    for r in 0..2 {
        let u = m0.row(r);
        let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / u.iter().map(|x| x * x).sum::<f64>();
        v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
    }
    let m = Matrix::from_rows(vec![v.clone(), pts[1].clone()])?;
    let got = cauchy_binet(&m0, &m)?;
    close(json!({"m0": m0.to_rows(), "m": m.to_rows()}), 0.0, got, ctx.tol)
}

fn sample_vandermonde(ctx: &Ctx) -> Check {
    for (k, n) in [(2, 4), (1, 5), (3, 6), (4, 7)] {
        for s in 0..10 {
            let seed = ctx.seed.wrapping_add(s);
            let m = sample_point::<Rational>(&SampleKind::TpVandermonde, k, n, seed)?;
            let class = classify_positivity(&plucker_raw(&m)?, 0.0);
            ensure(class.is_tp(), json!({"k": k, "n": n, "seed": seed}), "TP", class.label(), None)?;
        }
    }
    Ok(())
}

fn sample_coordinate(_: &Ctx) -> Check {
    let m = sample_point::<Rational>(&SampleKind::BoundaryCoordinate(Some(vec![0, 1])), 2, 4, 0)?;
    let p = plucker_raw(&m)?;
    let got: Vec<String> = p.coords().iter().map(|x| x.to_string()).collect();
    let want = ["1", "0", "0", "0", "0", "0"];
    ensure(got == want, json!({"kind": "boundary-coordinate", "subset": "1,2"}), want, got, None)
}

fn sample_generic(ctx: &Ctx) -> Check {
    for s in 0..10 {
        let seed = ctx.seed.wrapping_add(s);
        let m = sample_point::<Rational>(&SampleKind::Generic, 1, 2, seed)?;
        ensure(m.rank(0.0) == 1, json!({"k": 1, "n": 2, "seed": seed}), 1, m.rank(0.0), None)?;
    }
    Ok(())
}

fn operators_corners(_: &Ctx) -> Check {
    for (k, want) in [(2, -1), (1, 1)] {
        let ops = build_operators::<Rational>(k, 4)?;
        let corners = [ops.tau[(0, 3)].clone(), ops.tau[(3, 0)].clone()];
        ensure(
            corners.iter().all(|c| *c == rat(want, 1)),
            json!({"k": k, "n": 4}),
            [want, want],
            corners.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            None,
        )?;
    }
    Ok(())
}

fn operators_structure(ctx: &Ctx) -> Check {
    for n in 2..=ctx.cap(12).max(2) {
        for k in 1..n {
            let ops = build_operators::<Rational>(k, n)?;
            let inputs = json!({"k": k, "n": n});
            ensure(ops.tau == ops.tau.transpose(), inputs.clone(), "tau symmetric", "asymmetric", None)?;
            let commute = ops.s.matmul(&ops.s_t)? == ops.s_t.matmul(&ops.s)?;
            ensure(commute, inputs.clone(), "S S^T = S^T S", "noncommuting", None)?;
            for i in 0..n {
                let nz: Vec<&Rational> = ops.s.row(i).iter().filter(|x| **x != rat(0, 1)).collect();
                let ok = nz.len() == 1 && (nz[0].clone() * nz[0].clone()) == rat(1, 1);
                ensure(ok, json!({"k": k, "n": n, "row": i}), "one entry of absolute value 1", nz.len(), None)?;
            }
        }
    }
    Ok(())
}

fn eigen_values(ctx: &Ctx) -> Check {
    let r = SQRT_2;
    let cases: [(usize, usize, Vec<f64>); 2] = [(2, 4, vec![r, r, -r, -r]), (1, 4, vec![2.0, 0.0, 0.0, -2.0])];
    for (k, n, want) in cases {
        let got = tau_eigenvalues(k, n)?;
        let err = max_abs_diff(&got, &want);
        ensure(err <= ctx.tol, json!({"k": k, "n": n}), want, got, Some(ctx.tol))?;
    }
    let l = tau_eigenvalues(3, 8)?;
    close(json!({"k": 3, "n": 8, "i": 3}), SQRT_2, l[2], ctx.tol)?;
    close(json!({"k": 3, "n": 8, "i": 4}), 0.0, l[3], ctx.tol)?;
    ensure(l[2] > l[3], json!({"k": 3, "n": 8}), "lambda_3 > lambda_4", [l[2], l[3]], None)
}

/// `tau U^T = U^T diag(lambda)` with `U U^T = I` pins down the whole spectrum,
/// independently of how the basis was built.
fn eigen_residuals(ctx: &Ctx) -> Check {
    let tol = 1e3 * ctx.tol.min(1e-9);
    for n in 2..=ctx.cap(12).max(2) {
        for k in 1..n {
            let eig = TauEigensystem::new(k, n)?;
            let tau = build_operators::<f64>(k, n)?.tau;
            let u = eig.basis();
            let l = eig.lambdas();
            let inputs = json!({"k": k, "n": n});
            let ortho = u.matmul(&u.transpose())?.max_abs_diff(&Matrix::identity(n));
            bounded(json!({"k": k, "n": n, "check": "U U^T = I"}), ortho, tol)?;
            let tu = tau.matmul(&u.transpose())?;
            let mut resid: f64 = 0.0;
            for i in 0..n {
                for r in 0..n {
                    resid = resid.max((tu[(r, i)] - l[i] * u[(i, r)]).abs());
                }
            }
            bounded(json!({"k": k, "n": n, "check": "tau u = lambda u"}), resid, tol)?;
            let sorted = l.windows(2).all(|w| w[0] >= w[1]);
            ensure(sorted, inputs.clone(), "descending", l.to_vec(), None)?;
            let want_k = 2.0 * ((k as f64 - 1.0) * PI / n as f64).cos();
            close(json!({"k": k, "n": n, "check": "lambda_k"}), want_k, l[k - 1], tol)?;
            ensure(eig.spectral_gap() > 0.0, inputs, "positive gap", eig.spectral_gap(), None)?;
        }
    }
    Ok(())
}

fn eigen_sign(ctx: &Ctx) -> Check {
    for n in 2..=ctx.cap(10).max(2) {
        for k in 1..n {
            let p = plucker_raw(&TauEigensystem::new(k, n)?.x0())?;
            let min = p.coords().iter().copied().fold(f64::INFINITY, f64::min);
            ensure(min > 0.0, json!({"k": k, "n": n}), "all maximal minors of u_1..u_k positive", min, None)?;
        }
    }
    Ok(())
}

fn x0_ratios(ctx: &Ctx) -> Check {
    let p = x0_plucker(2, 4)?;
    close(json!({"k": 2, "n": 4, "subset": "1,2"}), (PI / 4.0).sin(), *p.get(&[0, 1]), ctx.tol)?;
    close(json!({"k": 2, "n": 4, "ratio": "13/12"}), SQRT_2, p.get(&[0, 2]) / p.get(&[0, 1]), ctx.tol)?;
    for n in 2..=8 {
        let p = x0_plucker(1, n)?;
        ensure(
            p.coords().iter().all(|&x| x == 1.0),
            json!({"k": 1, "n": n}),
            "all coordinates 1",
            p.coords().to_vec(),
            None,
        )?;
    }
    Ok(())
}

fn x0_minors(ctx: &Ctx) -> Check {
    for n in 2..=ctx.cap(10).max(2) {
        for k in 1..n {
            let formula = x0_plucker(k, n)?;
            let minors = plucker_raw(&TauEigensystem::new(k, n)?.x0())?;
            let d = projective_distance(formula.coords(), minors.coords());
            bounded(json!({"k": k, "n": n}), d, 1e-9)?;
        }
    }
    Ok(())
}

fn embed_zero(ctx: &Ctx) -> Check {
    for (k, n) in [(1, 4), (2, 4), (2, 5), (3, 7)] {
        let eig = TauEigensystem::new(k, n)?;
        let m = eig.chart_embed(&ChartPoint::zeros(k, n))?;
        let d = projective_distance(plucker_raw(&m)?.coords(), x0_plucker(k, n)?.coords());
        bounded(json!({"k": k, "n": n}), d, ctx.tol)?;
    }
    Ok(())
}

fn embed_worked(ctx: &Ctx) -> Check {
    let eig = worked_eigensystem()?;
    let r = SQRT_2;
    for s in 0..20 {
        let v = &sample_points(4, 1, 1.0, ctx.seed.wrapping_add(s))[0];
        let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
        let m = eig.chart_embed(&ChartPoint::from_flat(2, 4, v)?)?.scale(&2.0);
        let want = [
            r * a,
            1.0 - a + b,
            r - r * b,
            1.0 + a + b,
            -r + r * c,
            -1.0 - c + d,
            -r * d,
            1.0 + c + d,
        ];
        let err = max_abs_diff(m.data(), &want);
        ensure(err <= ctx.tol, json!({"abcd": v}), want, m.data(), Some(ctx.tol))?;
    }
    Ok(())
}

fn embed_polynomials(ctx: &Ctx) -> Check {
    let eig = worked_eigensystem()?;
    for s in 0..50 {
        let v = &sample_points(4, 1, 1.0, ctx.seed.wrapping_add(s))[0];
        let m = eig.chart_embed(&ChartPoint::from_flat(2, 4, v)?)?;
        // unit-length rows scale every minor by 1/4
        let got: Vec<f64> = plucker_raw(&m)?.coords().iter().map(|x| 4.0 * x).collect();
        let want = worked_polynomials(v[0], v[1], v[2], v[3]);
        let err = max_abs_diff(&got, &want);
        ensure(err <= ctx.tol, json!({"abcd": v}), want, got, Some(ctx.tol))?;
    }
    Ok(())
}

fn invert_round_trip(ctx: &Ctx) -> Check {
    for (k, n) in [(1, 3), (2, 4), (2, 5), (3, 6), (2, 7)] {
        let eig = TauEigensystem::new(k, n)?;
        for (s, v) in sample_points(k * (n - k), 20, 2.0, ctx.seed).iter().enumerate() {
            let a = ChartPoint::from_flat(k, n, v)?;
            let back = eig.chart_invert(&eig.chart_embed(&a)?)?.flat();
            let err = max_abs_diff(&back, v);
            bounded(json!({"k": k, "n": n, "sample": s}), err, 1e3 * ctx.tol)?;
        }
    }
    Ok(())
}

fn invert_delta_formula(ctx: &Ctx) -> Check {
    let eig = worked_eigensystem()?;
    for s in 0..100 {
        let seed = ctx.seed.wrapping_add(s);
        let m = sample_point::<f64>(&SampleKind::RandomTnn, 2, 4, seed)?;
        let want = worked_inverse(plucker_raw(&m)?.coords());
        let got = eig.chart_invert(&m)?.flat();
        let scale = want.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
        let err = max_abs_diff(&got, &want) / scale;
        ensure(err <= ctx.tol, json!({"seed": seed}), want, got, Some(ctx.tol))?;
    }
    Ok(())
}

fn invert_x0(ctx: &Ctx) -> Check {
    for (k, n) in [(1, 4), (2, 4), (3, 6)] {
        let eig = TauEigensystem::new(k, n)?;
        let a = eig.chart_invert(&eig.x0())?.flat();
        let err = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        bounded(json!({"k": k, "n": n}), err, ctx.tol)?;
    }
    Ok(())
}

fn invert_zero_cells(ctx: &Ctx) -> Check {
    let eig = worked_eigensystem()?;
    let cells: [[f64; 4]; 6] = [
        [-2.0, 1.0, -1.0, 0.0],
        [0.0, -1.0, 1.0, -2.0],
        [0.0, -1.0, 1.0, 2.0],
        [2.0, 1.0, -1.0, 0.0],
        [0.0, -1.0, -1.0, 0.0],
        [0.0, 1.0, 1.0, 0.0],
    ];
    let mut hit = Vec::new();
    for cell in &cells {
        let m = eig.chart_embed(&ChartPoint::from_flat(2, 4, cell)?)?;
        let p = plucker_raw(&m)?.normalized(Normalization::MaxAbs);
        let nonzero: Vec<usize> = (0..6).filter(|&i| p.coords()[i].abs() > ctx.tol).collect();
        ensure(
            nonzero.len() == 1 && p.coords()[nonzero[0]] > 0.0,
            json!({"abcd": cell}),
            "a single positive Plücker coordinate",
            p.coords().to_vec(),
            Some(ctx.tol),
        )?;
        hit.push(nonzero[0]);
        let subset = k_subsets(4, 2)[nonzero[0]].clone();
        let e = sample_point::<f64>(&SampleKind::BoundaryCoordinate(Some(subset.clone())), 2, 4, 0)?;
        let back = eig.chart_invert(&e)?.flat();
        let err = max_abs_diff(&back, cell);
        ensure(err <= ctx.tol, json!({"subset": subset_key(&subset)}), cell, back, Some(ctx.tol))?;
    }
    hit.sort_unstable();
    ensure(hit == [0, 1, 2, 3, 4, 5], json!({}), "all six coordinate subspaces", hit, None)
}

fn invert_outside(_: &Ctx) -> Check {
    let eig = TauEigensystem::new(2, 4)?;
    let m = eig.basis().select_rows(&[2, 3]);
    let got = eig.chart_invert(&m);
    ensure(
        matches!(got, Err(Error::OutsideChart)),
        json!({"rows": "u3, u4"}),
        "outside chart",
        format!("{got:?}"),
        None,
    )
}

fn flow_chart_examples(ctx: &Ctx) -> Check {
    let eig = TauEigensystem::new(2, 4)?;
    let zero = eig.flow_chart(3.0, &ChartPoint::zeros(2, 4))?.flat();
    ensure(zero.iter().all(|&x| x == 0.0), json!({"A": 0, "t": 3}), [0.0; 4], zero, None)?;
    let a = ChartPoint::from_flat(2, 4, &[0.3, -1.2, 0.7, 2.0])?;
    let same = eig.flow_chart(0.0, &a)?.flat();
    ensure(same == a.flat(), json!({"A": a.flat(), "t": 0}), a.flat(), same, None)?;
    let one = eig.flow_chart(1.0, &ChartPoint::from_flat(2, 4, &[1.0, 0.0, 0.0, 0.0])?)?.flat();
    let want = (-2.0 * SQRT_2).exp();
    ensure(
        (one[0] - want).abs() <= ctx.tol && one[1..].iter().all(|&x| x == 0.0),
        json!({"A": [[1, 0], [0, 0]], "t": 1}),
        [want, 0.0, 0.0, 0.0],
        one,
        Some(ctx.tol),
    )
}

fn flow_chart_axioms(ctx: &Ctx) -> Check {
    let ts = [-1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0];
    for (k, n) in [(2, 4), (2, 5), (3, 6)] {
        let flow = GrChartFlow::new(TauEigensystem::new(k, n)?);
        let pts = sample_points(k * (n - k), 100, 1.0, ctx.seed);
        let report = verify_flow_axioms(&flow, &pts, &ts, ctx.tol);
        ensure(report.pass, json!({"k": k, "n": n, "samples": 100}), "pass", &report, Some(ctx.tol))?;
    }
    Ok(())
}

fn grass_coordinate(ctx: &Ctx) -> Check {
    let eig = TauEigensystem::new(2, 4)?;
    let e = sample_point::<f64>(&SampleKind::BoundaryCoordinate(Some(vec![0, 1])), 2, 4, 0)?;
    let moved = eig.flow_grassmann(0.5, &e)?;
    let class = classify_positivity(&plucker(&moved)?, ctx.tol);
    ensure(class.is_tp(), json!({"subset": "1,2", "t": 0.5}), "TP", class.label(), Some(ctx.tol))?;
    let still = eig.flow_grassmann(0.0, &e)?;
    let d = projective_distance(plucker_raw(&still)?.coords(), plucker_raw(&e)?.coords());
    bounded(json!({"subset": "1,2", "t": 0}), d, ctx.tol)
}

fn grass_consistency(ctx: &Ctx) -> Check {
    for (k, n) in [(2, 4), (2, 5), (3, 6)] {
        let eig = TauEigensystem::new(k, n)?;
        for s in 0..100 {
            let seed = ctx.seed.wrapping_add(s);
            let t = [0.3, 1.0, -0.2][s as usize % 3];
            let m = sample_point::<f64>(&SampleKind::RandomTnn, k, n, seed)?;
            let lhs = eig.chart_invert(&eig.flow_grassmann(t, &m)?)?.flat();
            let rhs = eig.flow_chart(t, &eig.chart_invert(&m)?)?.flat();
            let scale = rhs.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
            bounded(json!({"k": k, "n": n, "seed": seed, "t": t}), max_abs_diff(&lhs, &rhs) / scale, 1e3 * ctx.tol)?;
        }
    }
    Ok(())
}

fn grass_tnn_to_tp(ctx: &Ctx) -> Check {
    for (k, n) in [(2, 4), (2, 5), (3, 6)] {
        let eig = TauEigensystem::new(k, n)?;
        let mut subsets: Vec<SampleKind> =
            k_subsets(n, k).into_iter().map(|s| SampleKind::BoundaryCoordinate(Some(s))).collect();
        subsets.extend((0..20).map(|_| SampleKind::RandomTnn));
        for (s, kind) in subsets.iter().enumerate() {
            let seed = ctx.seed.wrapping_add(s as u64);
            let m = sample_point::<f64>(kind, k, n, seed)?;
            for t in [0.5, 1.0] {
                let p = plucker_raw(&eig.flow_grassmann(t, &m)?)?.normalized(Normalization::MaxAbs);
                let class = classify_positivity(&p, ctx.tol);
                ensure(
                    class.is_tp(),
                    json!({"k": k, "n": n, "kind": format!("{kind:?}"), "seed": seed, "t": t}),
                    "TP",
                    class.label(),
                    Some(ctx.tol),
                )?;
            }
        }
    }
    Ok(())
}

fn grass_negative(ctx: &Ctx) -> Check {
    for (k, n) in [(1, 4), (2, 4), (2, 5), (3, 6)] {
        let eig = TauEigensystem::new(k, n)?;
        for subset in k_subsets(n, k) {
            let e = sample_point::<f64>(&SampleKind::BoundaryCoordinate(Some(subset.clone())), k, n, 0)?;
            let p = plucker_raw(&eig.flow_grassmann(-0.05, &e)?)?.normalized(Normalization::MaxAbs);
            let class = classify_positivity(&p, ctx.tol);
            ensure(
                !class.is_tnn(),
                json!({"k": k, "n": n, "subset": subset_key(&subset), "t": -0.05}),
                "not_TNN",
                class.label(),
                Some(ctx.tol),
            )?;
        }
    }
    Ok(())
}

fn shift_examples(_: &Ctx) -> Check {
    let m = sample_point::<Rational>(&SampleKind::Generic, 2, 4, 7)?;
    let zero = shift_plucker_expansion(&rat(0, 1), &m)?;
    let base = plucker_raw(&m)?;
    ensure(
        zero.direct.coords() == base.coords() && zero.agree(0.0),
        json!({"t": "0"}),
        "identity",
        "changed",
        None,
    )?;

    let m = sample_point::<Rational>(&SampleKind::Generic, 1, 5, 3)?;
    let t = rat(2, 7);
    let got = shift_plucker_expansion(&t, &m)?;
    let x = m.row(0);
    for i in 0..5 {
        let want = x[i].clone() + t.clone() * x[(i + 1) % 5].clone();
        ensure(
            got.direct.coords()[i] == want && got.expansion.coords()[i] == want,
            json!({"k": 1, "n": 5, "t": "2/7", "i": i + 1}),
            want.to_string(),
            [got.direct.coords()[i].to_string(), got.expansion.coords()[i].to_string()],
            None,
        )?;
    }

    let m = sample_point::<Rational>(&SampleKind::Generic, 2, 4, 11)?;
    let got = shift_plucker_expansion(&rat(1, 3), &m)?;
    ensure(got.agree(0.0), json!({"k": 2, "n": 4, "t": "1/3"}), "agree", "disagree", None)
}

fn shift_random(ctx: &Ctx) -> Check {
    for n in 2..=6 {
        for k in 1..n {
            for s in 0..4 {
                let seed = ctx.seed.wrapping_add(s);
                let m = sample_point::<Rational>(&SampleKind::Generic, k, n, seed)?;
                let t = rat(s as i64 - 2, 3);
                let got = shift_plucker_expansion(&t, &m)?;
                ensure(got.agree(0.0), json!({"k": k, "n": n, "seed": seed, "t": t.to_string()}), "agree", "disagree", None)?;
            }
        }
    }
    Ok(())
}

/// Richardson-extrapolated forward differences of `Delta(X exp(hS)^T)` at
/// `h = 1e-4, 1e-5` against the first-order shift sum.
fn shift_first_order_check(ctx: &Ctx) -> Check {
    for (k, n) in [(1, 4), (2, 4), (2, 5), (3, 6)] {
        let s = build_operators::<f64>(k, n)?.s;
        for j in 0..5 {
            let seed = ctx.seed.wrapping_add(j);
            let x = sample_point::<f64>(&SampleKind::Generic, k, n, seed)?;
            let base = plucker_raw(&x)?;
            let fd = |h: f64| -> Result<Vec<f64>, Error> {
                let moved = x.matmul(&s.scale(&h).expm()?.transpose())?;
                Ok(plucker_raw(&moved)?
                    .coords()
                    .iter()
                    .zip(base.coords())
                    .map(|(a, b)| (a - b) / h)
                    .collect())
            };
            let (d4, d5) = (fd(1e-4)?, fd(1e-5)?);
            let rich: Vec<f64> = d4.iter().zip(&d5).map(|(a, b)| (10.0 * b - a) / 9.0).collect();
            let want = shift_first_order(&base);
            let num = rich.iter().zip(&want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let den = want.iter().map(|b| b * b).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            bounded(json!({"k": k, "n": n, "seed": seed, "h": [1e-4, 1e-5]}), num / den, 1e-5)?;
        }
    }
    Ok(())
}
