use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use tnnball_core::flow::verify_flow_axioms;
use tnnball_core::scalar::rat;
use tnnball_core::unipotent::{
    a_flow, b_coords, classify_u_positivity, sample_v_tnn, UnipotentFlow, UnipotentMatrix,
};
use tnnball_core::Rational;

use super::{ensure, Case, Check, Ctx};

pub fn cases() -> Vec<Case> {
    vec![
        Case { id: "u.a_flow.n3_formula", ops: &["a_flow"], run: a_flow_formula },
        Case { id: "u.a_flow.exp_e_fixed", ops: &["a_flow"], run: a_flow_fixed },
        Case { id: "u.a_flow.group_law", ops: &["a_flow", "sample_v_tnn"], run: a_flow_group },
        Case { id: "u.a_flow.nonpositive_t", ops: &["a_flow"], run: a_flow_bad_t },
        Case { id: "u.b_coords.exp_e_is_origin", ops: &["b_coords"], run: b_origin },
        Case { id: "u.b_coords.n3_trajectory", ops: &["b_coords", "a_flow"], run: b_trajectory },
        Case { id: "u.b_coords.superdiagonal_sum", ops: &["b_coords", "sample_v_tnn"], run: b_sum },
        Case { id: "u.b_coords.c_at_most_one", ops: &["b_coords"], run: b_bad_c },
        Case { id: "u.classify.examples", ops: &["classify_u_positivity"], run: classify_examples },
        Case { id: "u.sample_v_tnn.n2", ops: &["sample_v_tnn"], run: sample_n2 },
        Case { id: "u.sample_v_tnn.tnn_and_bounded", ops: &["sample_v_tnn", "classify_u_positivity"], run: sample_bounds },
        Case { id: "u.a_flow.forward_is_positive", ops: &["a_flow", "classify_u_positivity"], run: forward_positive },
        Case { id: "u.a_flow.norm_decreasing", ops: &["a_flow", "b_coords"], run: norm_decreasing },
        Case { id: "u.flow_axioms", ops: &["a_flow", "b_coords", "verify_flow_axioms"], run: flow_axioms },
    ]
}

fn r(p: i64, q: i64) -> Rational {
    rat(p, q)
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    rat(rng.gen_range(lo..=hi), rng.gen_range(1..=6))
}

fn strs(v: &[Rational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// The `n = 3` example: `(p, q, r)` flows to
/// `((t+p-1)/t, (t^2+(2r-2)t+2q-2r+1)/(2t^2), (t+r-1)/t)`.
fn a_flow_formula(ctx: &Ctx) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    for _ in 0..30 {
        let (p, q, rr) = (random_rational(&mut rng, -6, 6), random_rational(&mut rng, -6, 6), random_rational(&mut rng, -6, 6));
        let t = random_rational(&mut rng, 1, 9);
        let x = UnipotentMatrix::from_upper(3, &[p.clone(), q.clone(), rr.clone()])?;
        let got = a_flow(&t, &x)?.upper();
        let one = r(1, 1);
        let two = r(2, 1);
        let want = vec![
            (t.clone() + p.clone() - one.clone()) / t.clone(),
            (t.clone() * t.clone() + (two.clone() * rr.clone() - two.clone()) * t.clone() + two.clone() * q.clone()
                - two.clone() * rr.clone()
                + one.clone())
                / (two.clone() * t.clone() * t.clone()),
            (t.clone() + rr.clone() - one) / t.clone(),
        ];
        ensure(
            got == want,
            json!({"pqr": strs(&[p, q, rr]), "t": t.to_string()}),
            strs(&want),
            strs(&got),
            None,
        )?;
    }
    Ok(())
}

fn a_flow_fixed(_: &Ctx) -> Check {
    for n in 2..=6 {
        let x = UnipotentMatrix::<Rational>::exp_e(n);
        for t in [r(1, 3), r(2, 1), r(7, 2)] {
            let y = a_flow(&t, &x)?;
            ensure(y == x, json!({"n": n, "t": t.to_string()}), strs(&x.upper()), strs(&y.upper()), None)?;
        }
    }
    Ok(())
}

fn a_flow_group(ctx: &Ctx) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x9e37);
    for case in 0..50u64 {
        let cap = ctx.cap(5).clamp(2, 6);
        let n = 2 + case as usize % (cap - 1);
        let x = if case % 2 == 0 {
            sample_v_tnn::<Rational>(n, ctx.seed.wrapping_add(case))?
        } else {
            let upper: Vec<Rational> = (0..n * (n - 1) / 2).map(|_| random_rational(&mut rng, -5, 5)).collect();
            UnipotentMatrix::from_upper(n, &upper)?
        };
        let s = random_rational(&mut rng, 1, 8);
        let t = random_rational(&mut rng, 1, 8);
        let lhs = a_flow(&s, &a_flow(&t, &x)?)?;
        let rhs = a_flow(&(s.clone() * t.clone()), &x)?;
        ensure(
            lhs == rhs,
            json!({"n": n, "x": strs(&x.upper()), "s": s.to_string(), "t": t.to_string()}),
            strs(&rhs.upper()),
            strs(&lhs.upper()),
            None,
        )?;
    }
    Ok(())
}

fn a_flow_bad_t(_: &Ctx) -> Check {
    let x = UnipotentMatrix::<Rational>::identity(3);
    for t in [r(0, 1), r(-1, 2)] {
        let got = a_flow(&t, &x);
        ensure(got.is_err(), json!({"t": t.to_string()}), "error", format!("{got:?}"), None)?;
    }
    Ok(())
}

fn b_origin(_: &Ctx) -> Check {
    for n in 2..=6 {
        for c in [r(3, 2), r(2, 1), r(4, 1)] {
            let b = b_coords(&UnipotentMatrix::<Rational>::exp_e(n), &c)?;
            ensure(b.values.iter().all(|v| *v == r(0, 1)), json!({"n": n, "c": c.to_string()}), "all zero", strs(&b.values), None)?;
        }
    }
    Ok(())
}

fn b_trajectory(ctx: &Ctx) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0xb);
    for _ in 0..20 {
        let (p, q, rr) = (random_rational(&mut rng, -4, 4), random_rational(&mut rng, -4, 4), random_rational(&mut rng, -4, 4));
        let x = UnipotentMatrix::from_upper(3, &[p.clone(), q.clone(), rr.clone()])?;
        for c in [r(3, 2), r(2, 1), r(4, 1)] {
            for t in [r(1, 2), r(1, 1), r(2, 1), r(4, 1)] {
                let b = b_coords(&a_flow(&t, &x)?, &c)?;
                let one = r(1, 1);
                let two = r(2, 1);
                let want = [
                    (p.clone() - one.clone()) / (c.clone() * t.clone()),
                    ((two.clone() * rr.clone() - two.clone()) * t.clone() + two.clone() * q.clone() - two * rr.clone() + one.clone())
                        / (c.clone() * c.clone() * t.clone() * t.clone()),
                    (rr.clone() - one) / (c.clone() * t.clone()),
                ];
                let got = [b.get(0, 1).clone(), b.get(0, 2).clone(), b.get(1, 2).clone()];
                ensure(
                    got == want,
                    json!({"pqr": strs(&[p.clone(), q.clone(), rr.clone()]), "c": c.to_string(), "t": t.to_string()}),
                    strs(&want),
                    strs(&got),
                    None,
                )?;
            }
        }
    }
    Ok(())
}

fn b_sum(ctx: &Ctx) -> Check {
    for n in 2..=ctx.cap(5).max(2) {
        for s in 0..10 {
            let seed = ctx.seed.wrapping_add(s);
            let x = sample_v_tnn::<Rational>(n, seed)?;
            let b = b_coords(&x, &r(2, 1))?;
            let sum = b.superdiagonal_sum();
            ensure(sum == r(0, 1), json!({"n": n, "seed": seed}), "0", sum.to_string(), None)?;
        }
    }
    Ok(())
}

fn b_bad_c(_: &Ctx) -> Check {
    let x = UnipotentMatrix::<Rational>::identity(3);
    for c in [r(1, 1), r(1, 2), r(-2, 1)] {
        let got = b_coords(&x, &c);
        ensure(got.is_err(), json!({"c": c.to_string()}), "error", format!("{got:?}"), None)?;
    }
    Ok(())
}

fn classify_examples(_: &Ctx) -> Check {
    for n in 2..=5 {
        let id = classify_u_positivity(&UnipotentMatrix::<Rational>::identity(n), 0.0);
        ensure(id.label() == "U_ge0_boundary", json!({"x": "identity", "n": n}), "U_ge0_boundary", id.label(), None)?;
    }
    for n in 2..=4 {
        let e = classify_u_positivity(&UnipotentMatrix::<Rational>::exp_e(n), 0.0);
        ensure(e.label() == "U_gt0", json!({"x": "exp(e)", "n": n}), "U_gt0", e.label(), None)?;
    }
    let mut upper = vec![r(0, 1); 3];
    upper[0] = r(-1, 1);
    let bad = classify_u_positivity(&UnipotentMatrix::from_upper(3, &upper)?, 0.0);
    ensure(bad.label() == "not_TNN", json!({"x12": -1, "n": 3}), "not_TNN", bad.label(), None)
}

fn sample_n2(ctx: &Ctx) -> Check {
    for s in 0..10 {
        let seed = ctx.seed.wrapping_add(s);
        let x = sample_v_tnn::<Rational>(2, seed)?;
        ensure(*x.get(0, 1) == r(1, 1), json!({"n": 2, "seed": seed}), "1", x.get(0, 1).to_string(), None)?;
    }
    Ok(())
}

fn sample_bounds(ctx: &Ctx) -> Check {
    for n in 2..=ctx.cap(5).max(2) {
        for s in 0..20 {
            let seed = ctx.seed.wrapping_add(s);
            let x = sample_v_tnn::<Rational>(n, seed)?;
            let inputs = json!({"n": n, "seed": seed});
            let class = classify_u_positivity(&x, 0.0);
            ensure(class.is_tnn(), inputs.clone(), "TNN", class.label(), None)?;
            ensure(x.in_v(0.0), inputs.clone(), "superdiagonal sums to n-1", x.superdiagonal_sum().to_string(), None)?;
            ensure(x.entry_bound_holds(), inputs, "0 <= x_ij <= (n-1)^(j-i)", strs(&x.upper()), None)?;
        }
    }
    Ok(())
}

fn forward_positive(ctx: &Ctx) -> Check {
    for n in 2..=ctx.cap(4).clamp(2, 5) {
        for s in 0..10 {
            let seed = ctx.seed.wrapping_add(s);
            let x = sample_v_tnn::<Rational>(n, seed)?;
            for t in [r(2, 1), r(3, 1)] {
                let class = classify_u_positivity(&a_flow(&t, &x)?, 0.0);
                ensure(class.label() == "U_gt0", json!({"n": n, "seed": seed, "t": t.to_string()}), "U_gt0", class.label(), None)?;
            }
        }
    }
    Ok(())
}

fn sup_norm(values: &[Rational]) -> Rational {
    values.iter().map(|v| if *v < r(0, 1) { -v.clone() } else { v.clone() }).fold(r(0, 1), |a, b| if b > a { b } else { a })
}

/// Exact sup norms of the b-coordinates strictly decrease along `t`, for
/// every `c`, unless the point is `exp(e)`.
fn norm_decreasing(ctx: &Ctx) -> Check {
    let ts = [r(1, 2), r(1, 1), r(2, 1), r(4, 1), r(8, 1)];
    for n in 2..=ctx.cap(4).clamp(2, 5) {
        for s in 0..10 {
            let seed = ctx.seed.wrapping_add(s);
            let x = sample_v_tnn::<Rational>(n, seed)?;
            if x == UnipotentMatrix::exp_e(n) {
                continue;
            }
            for c in [r(3, 2), r(2, 1), r(4, 1)] {
                let norms = ts
                    .iter()
                    .map(|t| Ok(sup_norm(&b_coords(&a_flow(t, &x)?, &c)?.values)))
                    .collect::<Result<Vec<Rational>, tnnball_core::Error>>()?;
                ensure(
                    norms.windows(2).all(|w| w[1] < w[0]),
                    json!({"n": n, "seed": seed, "c": c.to_string(), "t": strs(&ts)}),
                    "strictly decreasing",
                    strs(&norms),
                    None,
                )?;
            }
        }
    }
    Ok(())
}

fn flow_axioms(ctx: &Ctx) -> Check {
    let grid = [-1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 2.0];
    for n in 2..=4 {
        let flow = UnipotentFlow::new(n, 2.0)?;
        let pts = flow.sample_w(50, 1.0, ctx.seed);
        let report = verify_flow_axioms(&flow, &pts, &grid, 1e3 * ctx.tol);
        ensure(report.pass, json!({"n": n, "c": 2, "samples": 50}), "pass", &report, Some(1e3 * ctx.tol))?;
    }
    Ok(())
}
