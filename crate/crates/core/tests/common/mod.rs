//! Independent oracles shared by integration tests.

#![allow(dead_code)]

use curvlab::dsl::MetricField;
use nalgebra::DMatrix;

/// Worst relative disagreement between the automatic jets of `m` at `p`
/// and central finite differences of its values.
pub fn jet_fd_error(m: &MetricField, p: &[f64]) -> f64 {
    let n = m.dim();
    let jets = m.jets(p).expect("point in chart");
    let at = |q: &[f64]| m.matrix_at(q).expect("point in chart");
    let shift = |q: &[f64], k: usize, h: f64| {
        let mut q = q.to_vec();
        q[k] += h;
        q
    };
    let h1 = 1e-5;
    let h2 = 1e-4;
    let mut worst: f64 = 0.0;
    let mut check = |exact: f64, approx: f64| {
        worst = worst.max((exact - approx).abs() / (1.0 + exact.abs()));
    };
    let g0 = at(p);
    for i in 0..n {
        for j in 0..n {
            check(jets.g(i, j), g0[(i, j)]);
        }
    }
    for k in 0..n {
        let d: DMatrix<f64> = (at(&shift(p, k, h1)) - at(&shift(p, k, -h1))) / (2.0 * h1);
        for i in 0..n {
            for j in 0..n {
                check(jets.dg(k, i, j), d[(i, j)]);
            }
        }
        for l in 0..n {
            let pp = at(&shift(&shift(p, k, h2), l, h2));
            let pm = at(&shift(&shift(p, k, h2), l, -h2));
            let mp = at(&shift(&shift(p, k, -h2), l, h2));
            let mm = at(&shift(&shift(p, k, -h2), l, -h2));
            let dd = (pp - pm - mp + mm) / (4.0 * h2 * h2);
            for i in 0..n {
                for j in 0..n {
                    check(jets.ddg(k, l, i, j), dd[(i, j)]);
                }
            }
        }
    }
    worst
}

/// A fixed well-conditioned chart change with no zero entries.
pub fn chart_change(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        let base = if i == j { 1.0 } else { 0.0 };
        base + 0.1 * (((3 * i + 5 * j + 1) % 7) as f64 - 3.0) / 3.0
    })
}
