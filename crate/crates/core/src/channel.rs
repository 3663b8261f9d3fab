//! Seeded Rayleigh channel generation and Hermitian log-determinants.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-10;

/// Per-user `G×L` channel matrices for a served subset.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub users: Vec<usize>,
    pub matrices: Vec<CMatrix>,
    pub seed: u64,
}

impl ChannelSet {
    pub fn rx_dim(&self) -> usize {
        self.matrices.first().map_or(0, |h| h.nrows())
    }

    pub fn tx_dim(&self) -> usize {
        self.matrices.first().map_or(0, |h| h.ncols())
    }

    /// Restriction to `users` (global indices, each present in this set).
    pub fn select(&self, users: &[usize]) -> Option<ChannelSet> {
        let matrices = users
            .iter()
            .map(|u| self.users.iter().position(|v| v == u).map(|i| self.matrices[i].clone()))
            .collect::<Option<Vec<_>>>()?;
        Some(ChannelSet { users: users.to_vec(), matrices, seed: self.seed })
    }

    /// Builds a set from explicit matrices; used for hand-made test channels.
    pub fn from_matrices(matrices: Vec<CMatrix>) -> ChannelSet {
        ChannelSet { users: (0..matrices.len()).collect(), matrices, seed: 0 }
    }
}

/// Draws i.i.d. `CN(0, 1)` entries for each user in `users`.
///
/// Each user reads its own ChaCha stream (keyed on the seed and the user's
/// global index) in row-major entry order, so a user's matrix does not depend
/// on which other users are drawn alongside it.
pub fn sample_channels(g: usize, l: usize, users: &[usize], seed: u64) -> ChannelSet {
    let mut sorted = users.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let matrices = sorted
        .iter()
        .map(|&u| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u as u64);
            let mut entries = Vec::with_capacity(g * l);
            for _ in 0..g * l {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                entries.push(Complex64::new(re * scale, im * scale));
            }
            DMatrix::from_row_slice(g, l, &entries)
        })
        .collect();
    ChannelSet { users: sorted, matrices, seed }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermitian symmetry, relative to the
/// largest entry.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst / scale
}

/// `(M + Mᴴ) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Cholesky factorization of a Hermitian positive definite matrix together
/// with its natural-log determinant.
///
/// The complex factorization happily takes square roots of negative pivots,
/// so every pivot is checked to be real and positive.
pub(crate) fn cholesky_ln_det(m: CMatrix) -> Option<(nalgebra::Cholesky<Complex64, nalgebra::Dyn>, f64)> {
    let n = m.nrows();
    let chol = m.cholesky()?;
    let mut acc = 0.0;
    {
        let l = chol.l_dirty();
        for i in 0..n {
            let d = l[(i, i)];
            if d.re.is_nan() || d.re <= 0.0 || d.im.abs() > 1e-8 * d.re {
                return None;
            }
            acc += d.re.ln();
        }
    }
    if !acc.is_finite() {
        return None;
    }
    Some((chol, 2.0 * acc))
}

/// Base-2 log-determinant of a positive definite Hermitian matrix.
pub(crate) fn logdet_pd(m: &CMatrix) -> Option<f64> {
    cholesky_ln_det(m.clone()).map(|(_, ld)| ld * std::f64::consts::LOG2_E)
}

/// Base-2 log-determinant of a Hermitian positive semidefinite matrix.
///
/// Returns negative infinity for a singular PSD input. Inputs that are not
/// Hermitian to within `1e-10` (relative) or have an eigenvalue below
/// `-1e-10·trace` are rejected.
pub fn logdet_hermitian_psd(m: &CMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NumericDomain(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericDomain("matrix has non-finite entries".into()));
    }
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::NumericDomain(format!("matrix not Hermitian (relative defect {defect:.3e})")));
    }
    let h = hermitian_part(m);
    if let Some(v) = logdet_pd(&h) {
        return Ok(v);
    }
    let trace: f64 = (0..h.nrows()).map(|i| h[(i, i)].re).sum();
    let eig = SymmetricEigen::new(h);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -HERMITIAN_TOL * trace.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NumericDomain(format!("matrix indefinite (min eigenvalue {min:.3e})")));
    }
    if min <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(eig.eigenvalues.iter().map(|v| v.log2()).sum())
}
