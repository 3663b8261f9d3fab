//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use mimo_cc_lab::channel::CMatrix;
use mimo_cc_lab::harness::RatePoint;
use mimo_cc_lab::multicast::CovarianceSet;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// All `k`-subsets of `0..n` in lexicographic order, by brute force over bitmasks.
pub fn lex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

/// `(1/|B|)·log2 det(I + H_k Σ_B K H_kᴴ Q_k⁻¹)` via an explicit inverse and a
/// plain determinant. `groups` lists the members of each multicast group.
pub fn oracle_rhs(h: &CMatrix, covs: &CovarianceSet, groups: &[Vec<usize>], k: usize, b: &[usize], n0: f64) -> f64 {
    let g = h.nrows();
    let mut q = DMatrix::<Complex64>::identity(g, g) * Complex64::new(n0, 0.0);
    for (i, grp) in groups.iter().enumerate() {
        if !grp.contains(&k) {
            q += h * &covs.mats[i] * h.adjoint();
        }
    }
    let mut s = DMatrix::<Complex64>::zeros(g, g);
    for &i in b {
        s += h * &covs.mats[i] * h.adjoint();
    }
    let m = DMatrix::<Complex64>::identity(g, g) + s * q.try_inverse().unwrap();
    m.determinant().re.log2() / b.len() as f64
}

/// Mean and standard error of `a - b` over trials that succeeded in both.
pub fn paired_difference(a: &RatePoint, b: &RatePoint) -> (f64, f64) {
    let d: Vec<f64> = a.samples.iter().zip(&b.samples).filter_map(|(x, y)| Some((*x)? - (*y)?)).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
