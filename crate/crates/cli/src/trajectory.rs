//! Sampled flow trajectories as CSV tables.

use std::io::Write;

use tnnball_core::amplituhedron::AmplituhedronSpec;
use tnnball_core::cyclic::{ChartPoint, TauEigensystem};
use tnnball_core::flow::euclidean_norm;
use tnnball_core::grassmann::plucker;
use tnnball_core::unipotent::{a_flow, b_coords, min_dominant_minor, UnipotentMatrix};
use tnnball_core::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Space {
    Gr,
    U,
    Amp,
}

/// Header plus one row per time.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn chart_header(k: usize, cols: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 0..k {
        for j in 0..cols {
            h.push(format!("a{}{}", i + 1, j + 1));
        }
    }
    h
}

/// `f(t, A)` in the chart, with the positivity margin of its Plücker vector.
pub fn gr_trajectory(eig: &TauEigensystem, a: &ChartPoint, ts: &[f64]) -> Result<Table> {
    let mut header = chart_header(eig.k(), eig.n() - eig.k());
    header.extend(["norm".into(), "min_plucker".into()]);
    let rows = ts
        .iter()
        .map(|&t| {
            let at = eig.flow_chart(t, a)?;
            let margin = plucker(&eig.chart_embed(&at)?)?.min_margin();
            let mut row = vec![t];
            row.extend(at.flat());
            row.extend([at.norm(), margin]);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Table { header, rows })
}

/// b-coordinates of `a(t) . x`, with the smallest dominant minor of `a(t) . x`.
pub fn u_trajectory(x: &UnipotentMatrix<f64>, c: f64, ts: &[f64]) -> Result<Table> {
    let n = x.n();
    let mut header = vec!["t".to_string()];
    for i in 0..n {
        for j in i + 1..n {
            header.push(format!("b{}{}", i + 1, j + 1));
        }
    }
    header.extend(["norm".into(), "min_minor".into()]);
    let rows = ts
        .iter()
        .map(|&t| {
            let xt = a_flow(&t, x)?;
            let b = b_coords(&xt, &c)?;
            let mut row = vec![t];
            row.extend(b.values.iter().copied());
            row.extend([b.norm_inf(), min_dominant_minor(&xt)]);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Table { header, rows })
}

/// `pi(f(t, A))`, with the positivity margin of `phi(f(t, A))`.
pub fn amp_trajectory(spec: &AmplituhedronSpec, a: &ChartPoint, ts: &[f64]) -> Result<Table> {
    let eig = spec.eigensystem();
    let mut header = chart_header(spec.k, spec.m);
    header.extend(["norm".into(), "min_plucker".into()]);
    let rows = ts
        .iter()
        .map(|&t| {
            let at = eig.flow_chart(t, a)?;
            let proj = spec.chart_project(&at)?.flat();
            let margin = plucker(&eig.chart_embed(&at)?)?.min_margin();
            let mut row = vec![t];
            row.extend(proj.iter().copied());
            row.extend([euclidean_norm(&proj), margin]);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Table { header, rows })
}
