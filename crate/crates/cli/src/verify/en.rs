use std::collections::BTreeSet;

use serde_json::json;
use tnnball_core::electrical::{
    a_sigma, basis_vector, catalan, enumerate_nc, flow_invariance, h_subspace, is_noncrossing, phi_apply,
    phi_expansion, phi_first_order_error, response_matrix, ud_apply, verify_lemma_ud, xn_search, BigVector,
    NoncrossingPartition, ResistorNetwork,
};
use tnnball_core::flow::sample_points;
use tnnball_core::scalar::rat;
use tnnball_core::subsets::k_subsets;
use tnnball_core::{Error, Rational, Scalar};

use super::{bounded, ensure, Case, Check, Ctx};

pub fn cases() -> Vec<Case> {
    vec![
        Case { id: "en.enumerate_nc.examples", ops: &["enumerate_nc"], run: nc_examples },
        Case { id: "en.enumerate_nc.catalan", ops: &["enumerate_nc"], run: nc_catalan },
        Case { id: "en.enumerate_nc.brute_force", ops: &["enumerate_nc"], run: nc_brute_force },
        Case { id: "en.kreweras.examples", ops: &["kreweras"], run: kreweras_examples },
        Case { id: "en.kreweras.block_count", ops: &["kreweras", "enumerate_nc"], run: kreweras_count },
        Case { id: "en.a_sigma.examples", ops: &["a_sigma"], run: a_sigma_examples },
        Case { id: "en.sigma_prime.examples", ops: &["sigma_prime"], run: sigma_prime_examples },
        Case { id: "en.ud_apply.examples", ops: &["ud_apply", "a_sigma"], run: ud_examples },
        Case { id: "en.lemma_ud.exhaustive", ops: &["verify_lemma_ud", "ud_apply", "sigma_prime"], run: lemma_ud },
        Case { id: "en.phi.examples", ops: &["phi_apply"], run: phi_examples },
        Case { id: "en.phi.integer_span", ops: &["phi_apply", "a_sigma"], run: phi_span },
        Case { id: "en.phi.tangent_to_h", ops: &["phi_apply", "h_subspace"], run: phi_tangent },
        Case { id: "en.h_subspace.examples", ops: &["h_subspace"], run: h_examples },
        Case { id: "en.response.single_edge", ops: &["response_matrix"], run: response_edge },
        Case { id: "en.response.series_parallel", ops: &["response_matrix"], run: response_series_parallel },
        Case { id: "en.response.star", ops: &["response_matrix"], run: response_star },
        Case { id: "en.response.random", ops: &["response_matrix"], run: response_random },
        Case { id: "en.response.floating_interior", ops: &["response_matrix"], run: response_floating },
        Case { id: "en.xn.n2_immediate", ops: &["xn_search", "h_subspace"], run: xn_n2 },
        Case { id: "en.xn.n3_search", ops: &["xn_search", "h_subspace"], run: xn_n3 },
    ]
}

fn r(p: i64, q: i64) -> Rational {
    rat(p, q)
}

fn nc(n: usize, s: &str) -> Result<NoncrossingPartition, Error> {
    NoncrossingPartition::parse(n, s)
}

/// `e_I` for a 1-based subset.
fn e(n: usize, subset: &[usize]) -> BigVector<i64> {
    let zero_based: Vec<usize> = subset.iter().map(|x| x - 1).collect();
    basis_vector(n, &zero_based)
}

fn sum(vs: &[BigVector<i64>]) -> BigVector<i64> {
    vs.iter().skip(1).fold(vs[0].clone(), |a, b| a.add(b))
}

fn support(v: &BigVector<i64>) -> Vec<(String, i64)> {
    v.support()
}

fn nc_examples(_: &Ctx) -> Check {
    let one = enumerate_nc(1)?;
    ensure(one.len() == 1, json!({"n": 1}), 1, one.len(), None)?;
    let three: Vec<String> = enumerate_nc(3)?.iter().map(|s| s.to_string()).collect();
    ensure(
        three.len() == 5 && three.iter().any(|s| s == "1,3|5"),
        json!({"n": 3}),
        "5 partitions including 1,3|5",
        &three,
        None,
    )?;
    let five = enumerate_nc(5)?.len();
    ensure(five == 42, json!({"n": 5}), 42, five, None)
}

fn nc_catalan(ctx: &Ctx) -> Check {
    for n in 1..=ctx.cap(7).clamp(1, 8) {
        let count = enumerate_nc(n)?.len();
        ensure(count == catalan(n), json!({"n": n}), catalan(n), count, None)?;
    }
    Ok(())
}

/// All set partitions of the odd labels via restricted growth strings,
/// keeping the noncrossing ones.
fn brute_force_nc(n: usize) -> BTreeSet<String> {
    let labels: Vec<usize> = (0..n).map(|i| 2 * i + 1).collect();
    let mut out = BTreeSet::new();
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().map_or(0, |m| m + 1);
        let parts: Vec<Vec<usize>> = (0..blocks)
            .map(|b| (0..n).filter(|&i| rgs[i] == b).map(|i| labels[i]).collect())
            .collect();
        if is_noncrossing(&parts) {
            out.insert(NoncrossingPartition::new(n, parts).expect("valid").to_string());
        }
        // next restricted growth string
        let mut i = n;
        loop {
            if i == 1 {
                return out;
            }
            i -= 1;
            let prefix_max = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for v in rgs[i + 1..].iter_mut() {
                    *v = 0;
                }
                break;
            }
        }
    }
}

fn nc_brute_force(ctx: &Ctx) -> Check {
    for n in 1..=ctx.cap(5).clamp(1, 6) {
        let want = brute_force_nc(n);
        let got: BTreeSet<String> = enumerate_nc(n)?.iter().map(|s| s.to_string()).collect();
        ensure(got == want, json!({"n": n}), &want, &got, None)?;
    }
    Ok(())
}

fn kreweras_examples(_: &Ctx) -> Check {
    let got = nc(3, "1,3|5")?.kreweras();
    ensure(got == vec![vec![2], vec![4, 6]], json!({"sigma": "1,3|5"}), [[2].to_vec(), [4, 6].to_vec()], &got, None)?;
    let got = nc(3, "1|3|5")?.kreweras();
    ensure(got == vec![vec![2, 4, 6]], json!({"sigma": "1|3|5"}), [[2, 4, 6]], &got, None)
}

fn kreweras_count(ctx: &Ctx) -> Check {
    for n in 1..=ctx.cap(5).clamp(1, 6) {
        for sigma in enumerate_nc(n)? {
            let dual = sigma.kreweras();
            let total = sigma.len() + dual.len();
            ensure(total == n + 1, json!({"n": n, "sigma": sigma.to_string()}), n + 1, total, None)?;
            // sigma together with its dual is noncrossing on the full circle
            let mut all: Vec<Vec<usize>> = sigma.parts().to_vec();
            all.extend(dual.iter().cloned());
            ensure(is_noncrossing(&all), json!({"n": n, "sigma": sigma.to_string()}), "noncrossing union", &dual, None)?;
        }
    }
    Ok(())
}

fn a_sigma_examples(_: &Ctx) -> Check {
    let got = a_sigma(&nc(3, "1,3|5")?);
    let want = sum(&[e(3, &[1, 4]), e(3, &[1, 6]), e(3, &[3, 4]), e(3, &[3, 6])]);
    ensure(got == want, json!({"sigma": "1,3|5"}), support(&want), support(&got), None)?;
    let got = a_sigma(&nc(1, "1")?);
    let want = e(1, &[]);
    ensure(got == want, json!({"sigma": "1"}), support(&want), support(&got), None)?;
    let got = a_sigma(&nc(3, "1|3|5")?);
    let want = sum(&[e(3, &[2, 4]), e(3, &[2, 6]), e(3, &[4, 6])]);
    ensure(got == want, json!({"sigma": "1|3|5"}), support(&want), support(&got), None)
}

fn sigma_prime_examples(_: &Ctx) -> Check {
    let sigma = nc(3, "1,3|5")?;
    let table = [(1, "1|3|5"), (3, "1|3|5"), (2, "1,3|5"), (5, "1,3|5"), (4, "1,3,5"), (6, "1,3,5")];
    for (i, want) in table {
        let got = sigma.sigma_prime(i)?.to_string();
        ensure(got == want, json!({"sigma": "1,3|5", "i": i}), want, got, None)?;
    }
    let bad = sigma.sigma_prime(7);
    ensure(bad.is_err(), json!({"sigma": "1,3|5", "i": 7}), "error", bad.is_ok(), None)
}

fn ud_examples(_: &Ctx) -> Check {
    let a = a_sigma(&nc(3, "1,3|5")?);
    let got = ud_apply(1, &a)?;
    let want = a_sigma(&nc(3, "1|3|5")?);
    ensure(got == want, json!({"i": 1, "sigma": "1,3|5"}), support(&want), support(&got), None)?;
    let got = ud_apply(2, &a)?;
    ensure(got.is_zero(), json!({"i": 2, "sigma": "1,3|5"}), "0", support(&got), None)?;
    // no term survives when i is not in I
    for subset in k_subsets(6, 2) {
        let v: BigVector<i64> = basis_vector(3, &subset);
        for i in 1..=6 {
            if subset.contains(&(i - 1)) {
                continue;
            }
            let got = ud_apply(i, &v)?;
            ensure(got.is_zero(), json!({"i": i, "I": subset.iter().map(|x| x + 1).collect::<Vec<_>>()}), "0", support(&got), None)?;
        }
    }
    Ok(())
}

fn lemma_ud(ctx: &Ctx) -> Check {
    for n in 1..=ctx.cap(5).clamp(1, 6) {
        let report = verify_lemma_ud(n)?;
        let want_cases = catalan(n) * 2 * n;
        ensure(
            report.pass() && report.cases == want_cases,
            json!({"n": n}),
            json!({"cases": want_cases, "failures": 0}),
            &report,
            None,
        )?;
    }
    Ok(())
}

fn phi_examples(_: &Ctx) -> Check {
    let zero = BigVector::<i64>::zeros(3);
    ensure(phi_apply(&zero).is_zero(), json!({"v": 0}), "0", "nonzero", None)?;
    let got = phi_apply(&a_sigma(&nc(3, "1,3|5")?));
    let two = |v: BigVector<i64>| v.map(|x| 2 * x);
    let want = two(a_sigma(&nc(3, "1|3|5")?)).add(&two(a_sigma(&nc(3, "1,3,5")?)));
    ensure(got == want, json!({"sigma": "1,3|5"}), support(&want), support(&got), None)
}

fn phi_span(ctx: &Ctx) -> Check {
    for n in 1..=ctx.cap(5).clamp(1, 6) {
        for sigma in enumerate_nc(n)? {
            let got = phi_apply(&a_sigma(&sigma));
            let mut want = BigVector::<i64>::zeros(n);
            for (tau, c) in phi_expansion(&sigma) {
                want = want.add(&a_sigma(&tau).map(|x| c * x));
            }
            ensure(got == want, json!({"n": n, "sigma": sigma.to_string()}), support(&want), support(&got), None)?;
        }
    }
    Ok(())
}

fn phi_tangent(ctx: &Ctx) -> Check {
    for n in 1..=ctx.cap(4).clamp(1, 5) {
        let h = h_subspace(n)?;
        for sigma in &h.partitions {
            let v: Vec<Rational> = phi_apply(&a_sigma(sigma)).coords.iter().map(|&c| r(c, 1)).collect();
            let resid = h.residual_exact(&v)?;
            ensure(
                resid.iter().all(|x| *x == r(0, 1)),
                json!({"n": n, "sigma": sigma.to_string()}),
                "exact zero residual",
                resid.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                None,
            )?;
        }
    }
    Ok(())
}

fn h_examples(ctx: &Ctx) -> Check {
    for (n, count, dim) in [(2, 2, 4), (3, 5, 15)] {
        let h = h_subspace(n)?;
        let shape = h.vectors.shape();
        ensure(
            shape == (count, dim) && h.rank >= 1 && h.rank <= count,
            json!({"n": n}),
            json!({"vectors": count, "dimension": dim}),
            json!({"shape": shape, "rank": h.rank}),
            None,
        )?;
        for (i, sigma) in h.partitions.iter().enumerate() {
            let row = h.vectors.row(i).to_vec();
            ensure(h.contains_exact(&row)?, json!({"n": n, "sigma": sigma.to_string()}), "in H", false, None)?;
            let f: Vec<f64> = row.iter().map(Scalar::to_f64).collect();
            bounded(json!({"n": n, "sigma": sigma.to_string(), "float": true}), h.residual(&f)?, ctx.tol)?;
        }
    }
    Ok(())
}

fn net(boundary: Vec<usize>, edges: Vec<(usize, usize, Rational)>) -> Result<ResistorNetwork<Rational>, Error> {
    ResistorNetwork::new(boundary, edges)
}

fn strings(m: &tnnball_core::Matrix<Rational>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect()
}

fn response_edge(_: &Ctx) -> Check {
    let c = r(5, 3);
    let got = response_matrix(&net(vec![0, 1], vec![(0, 1, c.clone())])?)?.matrix;
    let want = tnnball_core::Matrix::from_rows(vec![vec![c.clone(), -c.clone()], vec![-c.clone(), c]])?;
    ensure(got == want, json!({"edges": [[0, 1, "5/3"]]}), strings(&want), strings(&got), None)
}

fn response_series_parallel(ctx: &Ctx) -> Check {
    let pts = sample_points(2, 10, 1.0, ctx.seed);
    for (i, p) in pts.iter().enumerate() {
        let a = r(1 + (p[0].abs() * 20.0) as i64, 3);
        let b = r(1 + (p[1].abs() * 20.0) as i64, 7);
        let series = response_matrix(&net(vec![0, 2], vec![(0, 1, a.clone()), (1, 2, b.clone())])?)?.matrix;
        let want = a.clone() * b.clone() / (a.clone() + b.clone());
        ensure(
            series[(0, 1)] == -want.clone() && series[(0, 0)] == want,
            json!({"case": i, "a": a.to_string(), "b": b.to_string(), "layout": "series"}),
            want.to_string(),
            strings(&series),
            None,
        )?;
        let parallel = response_matrix(&net(vec![0, 1], vec![(0, 1, a.clone()), (0, 1, b.clone())])?)?.matrix;
        let want = a.clone() + b.clone();
        ensure(
            parallel[(0, 0)] == want,
            json!({"case": i, "a": a.to_string(), "b": b.to_string(), "layout": "parallel"}),
            want.to_string(),
            strings(&parallel),
            None,
        )?;
    }
    Ok(())
}

fn response_star(_: &Ctx) -> Check {
    for (a, b, c) in [(r(1, 1), r(2, 1), r(3, 1)), (r(1, 2), r(5, 3), r(7, 4))] {
        let lam = response_matrix(&net(vec![0, 1, 2], vec![(0, 3, a.clone()), (1, 3, b.clone()), (2, 3, c.clone())])?)?.matrix;
        let s = a.clone() + b.clone() + c.clone();
        let want = [
            (0, 1, -(a.clone() * b.clone()) / s.clone()),
            (0, 2, -(a.clone() * c.clone()) / s.clone()),
            (1, 2, -(b.clone() * c.clone()) / s.clone()),
        ];
        for (i, j, w) in want {
            ensure(
                lam[(i, j)] == w,
                json!({"abc": [a.to_string(), b.to_string(), c.to_string()], "entry": [i + 1, j + 1]}),
                w.to_string(),
                lam[(i, j)].to_string(),
                None,
            )?;
        }
    }
    Ok(())
}

fn response_random(ctx: &Ctx) -> Check {
    for s in 0..20u64 {
        let pts = sample_points(8, 1, 1.0, ctx.seed.wrapping_add(s)).remove(0);
        let w = |i: usize| r(1 + (pts[i].abs() * 9.0) as i64, 1 + (s as i64 % 4));
        // a wheel: boundary cycle 0..4 around hub 4, plus a pendant interior node 5
        let mut edges: Vec<(usize, usize, Rational)> = (0..4).map(|i| (i, (i + 1) % 4, w(i))).collect();
        edges.extend((0..3).map(|i| (i, 4, w(4 + i))));
        edges.push((4, 5, w(7)));
        edges.push((3, 5, w(0)));
        let lam = response_matrix(&net(vec![0, 1, 2, 3], edges)?)?;
        ensure(
            lam.is_symmetric(0.0) && lam.row_sums_vanish(0.0),
            json!({"seed": ctx.seed.wrapping_add(s)}),
            "symmetric with zero row sums",
            strings(&lam.matrix),
            None,
        )?;
    }
    Ok(())
}

fn response_floating(_: &Ctx) -> Check {
    // nodes 2 and 3 form an interior component with no path to the boundary
    let got = response_matrix(&net(vec![0, 1], vec![(0, 1, r(1, 1)), (2, 3, r(1, 1))])?);
    ensure(matches!(got, Err(Error::FloatingInterior)), json!({"edges": [[0, 1], [2, 3]]}), "error", format!("{got:?}"), None)
}

fn xn_n2(ctx: &Ctx) -> Check {
    let h = h_subspace(2)?;
    let res = xn_search(&h, ctx.seed, 1e-10)?;
    ensure(
        res.converged && res.iterations == 0 && res.h_residual < 1e-10,
        json!({"n": 2, "seed": ctx.seed}),
        "immediate success",
        &res,
        Some(1e-10),
    )
}

fn xn_n3(ctx: &Ctx) -> Check {
    let h = h_subspace(3)?;
    let res = xn_search(&h, ctx.seed, 1e-10)?;
    let inputs = json!({"n": 3, "seed": ctx.seed});
    ensure(
        res.converged && res.plucker_residual < 1e-10 && res.h_residual < 1e-10,
        inputs.clone(),
        json!({"plucker_residual_below": 1e-10, "h_residual_below": 1e-10}),
        &res,
        Some(1e-10),
    )?;
    let x = res.matrix();
    for f in flow_invariance(&h, &x, &[0.25, 0.5, 1.0])? {
        ensure(
            f.h_residual < 1e-8 && (!res.tnn || f.min_plucker > 0.0),
            json!({"n": 3, "seed": ctx.seed, "t": f.t, "tnn": res.tnn}),
            json!({"h_residual_below": 1e-8, "min_plucker_positive": res.tnn}),
            &f,
            Some(1e-8),
        )?;
    }
    bounded(json!({"n": 3, "seed": ctx.seed, "step": 1e-4}), phi_first_order_error(&x, 1e-4)?, 1e-4)
}
