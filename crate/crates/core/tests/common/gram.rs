//! Finiteness by positive definiteness of the cosine matrix.

use cox_core::system::{CoxeterSystem, GenSubset, Order};

pub const TOLERANCE: f64 = 1e-9;

fn cosine(m: Order) -> f64 {
    match m {
        Order::Finite(k) => -(std::f64::consts::PI / k as f64).cos(),
        Order::Infinite => -1.0,
    }
}

/// Leading principal minors of the cosine matrix on `t`, all `> TOLERANCE`.
pub fn is_positive_definite(system: &CoxeterSystem, t: GenSubset) -> bool {
    let idx: Vec<usize> = t.iter().collect();
    let n = idx.len();
    let mut a: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| if i == j { 1.0 } else { cosine(system.m(i, j)) }).collect())
        .collect();
    // Gaussian elimination without pivoting: the k-th pivot is the ratio of
    // consecutive leading minors, so all minors are positive iff all pivots are.
    let mut minor = 1.0;
    for k in 0..n {
        let pivot = a[k][k];
        minor *= pivot;
        if minor <= TOLERANCE || pivot <= 0.0 {
            return false;
        }
        for i in k + 1..n {
            let f = a[i][k] / pivot;
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    true
}
