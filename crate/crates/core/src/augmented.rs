//! Augmented complex algebra.
//!
//! A complex vector `x = u + jv` is carried either as its real composite
//! `z = [u; v]` or as the augmented vector `[x; x*] = T z`, where
//! `T = [[I, jI], [I, -jI]]` satisfies `T Tᴴ = Tᴴ T = 2I`. Widely linear maps
//! and augmented covariances share the block pattern `[[M1, M2], [M2*, M1*]]`;
//! [`AugmentedMatrix`] stores only the top blocks so the pattern cannot drift.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const J: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance for conjugate-symmetry and Hermitian checks.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Relative tolerance below which a negative eigenvalue is treated as zero.
pub const PSD_TOL: f64 = 1e-9;

/// Eigenvalues this far below the largest one are floored to exactly zero in
/// [`psd_sqrt`], so rank-deficient directions produce exactly zero columns.
const EIGEN_ZERO_FLOOR: f64 = 1e-13;

/// Relative eigenvalue threshold for declaring an innovation covariance singular.
pub const SINGULAR_RTOL: f64 = 1e-12;

pub fn max_abs_c(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_r(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Elementwise conjugate without transposition.
pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

fn conj_vec(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

/// The real-to-complex transform `T_n`, a `2n × 2n` matrix.
pub fn transform(n: usize) -> Result<CMat> {
    if n == 0 {
        return Err(Error::Dimension("transform size must be at least 1".into()));
    }
    let mut t = CMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        t[(i, i)] = Complex64::new(1.0, 0.0);
        t[(i, n + i)] = J;
        t[(n + i, i)] = Complex64::new(1.0, 0.0);
        t[(n + i, n + i)] = -J;
    }
    Ok(t)
}

/// How a real composite matrix maps into the augmented domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMode {
    /// System matrices act on vectors: `Ā = ½ T M Tᴴ`.
    System,
    /// Covariances transform as outer products: `R̄ = T R Tᴴ`.
    Covariance,
}

impl TransformMode {
    fn forward_scale(self) -> f64 {
        match self {
            TransformMode::System => 0.5,
            TransformMode::Covariance => 1.0,
        }
    }
}

/// Augmented vector `[x; x*]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedVector {
    top: CVec,
    bottom: CVec,
}

impl AugmentedVector {
    pub fn new(top: CVec) -> Self {
        let bottom = conj_vec(&top);
        Self { top, bottom }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(CVec::zeros(n))
    }

    /// Builds from explicit halves, rejecting pairs that are not conjugates.
    pub fn from_parts(top: CVec, bottom: CVec) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::Dimension(format!(
                "augmented halves have lengths {} and {}",
                top.len(),
                bottom.len()
            )));
        }
        let scale = top.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
        let residue = top
            .iter()
            .zip(bottom.iter())
            .fold(0.0f64, |acc, (a, b)| acc.max((a.conj() - b).norm()));
        if residue > CONSISTENCY_TOL * scale {
            return Err(Error::Consistency(format!(
                "bottom half differs from conj(top) by {residue:e}"
            )));
        }
        Ok(Self { top, bottom })
    }

    /// Splits a full `2n` vector into halves and checks conjugate symmetry.
    pub fn from_full(full: &CVec) -> Result<Self> {
        if full.len() % 2 != 0 {
            return Err(Error::Dimension(format!("augmented length {} is odd", full.len())));
        }
        let n = full.len() / 2;
        Self::from_parts(full.rows(0, n).into_owned(), full.rows(n, n).into_owned())
    }

    pub fn top(&self) -> &CVec {
        &self.top
    }

    pub fn bottom(&self) -> &CVec {
        &self.bottom
    }

    pub fn dim(&self) -> usize {
        self.top.len()
    }

    pub fn full(&self) -> CVec {
        let n = self.dim();
        let mut v = CVec::zeros(2 * n);
        v.rows_mut(0, n).copy_from(&self.top);
        v.rows_mut(n, n).copy_from(&self.bottom);
        v
    }
}

/// `z = [u; v]` of length `2n` to `[u + jv; u - jv]`.
pub fn real_to_augmented(z: &RVec) -> Result<AugmentedVector> {
    if z.len() % 2 != 0 {
        return Err(Error::Dimension(format!("composite length {} is odd", z.len())));
    }
    let n = z.len() / 2;
    let top = CVec::from_fn(n, |i, _| Complex64::new(z[i], z[n + i]));
    Ok(AugmentedVector::new(top))
}

/// Inverse of [`real_to_augmented`]: `z = ½ Tᴴ x̄`.
pub fn augmented_to_real(x: &AugmentedVector) -> Result<RVec> {
    // Re-validate: the halves may have been assembled with from_parts at a looser scale.
    let x = AugmentedVector::from_parts(x.top.clone(), x.bottom.clone())?;
    let n = x.dim();
    let mut z = RVec::zeros(2 * n);
    for i in 0..n {
        // average the two halves so tiny asymmetries do not bias one channel
        let xi = 0.5 * (x.top[i] + x.bottom[i].conj());
        z[i] = xi.re;
        z[n + i] = xi.im;
    }
    Ok(z)
}

/// Block-stored matrix with the augmented pattern `[[M1, M2], [M2*, M1*]]`.
///
/// Blocks may be rectangular (`r × c`), giving a `2r × 2c` full matrix; this
/// covers measurement matrices `C̄` as well as square system and covariance
/// matrices. Products, sums and adjoints are computed blockwise and therefore
/// preserve the pattern exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    m1: CMat,
    m2: CMat,
}

impl AugmentedMatrix {
    pub fn new(m1: CMat, m2: CMat) -> Result<Self> {
        if m1.shape() != m2.shape() {
            return Err(Error::Dimension(format!(
                "augmented blocks have shapes {:?} and {:?}",
                m1.shape(),
                m2.shape()
            )));
        }
        Ok(Self { m1, m2 })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            m1: CMat::zeros(rows, cols),
            m2: CMat::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m1: CMat::identity(n, n),
            m2: CMat::zeros(n, n),
        }
    }

    /// `diag(M1, M1*)`, the augmented form of a strictly linear map.
    pub fn strictly_linear(m1: CMat) -> Self {
        let m2 = CMat::zeros(m1.nrows(), m1.ncols());
        Self { m1, m2 }
    }

    /// Reads the top blocks of a full matrix after checking the pattern.
    pub fn from_full(full: &CMat) -> Result<Self> {
        let (rr, cc) = full.shape();
        if rr % 2 != 0 || cc % 2 != 0 {
            return Err(Error::Dimension(format!("augmented shape {:?} has an odd side", full.shape())));
        }
        let (r, c) = (rr / 2, cc / 2);
        let m1 = full.view((0, 0), (r, c)).into_owned();
        let m2 = full.view((0, c), (r, c)).into_owned();
        let m2c = full.view((r, 0), (r, c)).into_owned();
        let m1c = full.view((r, c), (r, c)).into_owned();
        let scale = max_abs_c(full).max(1.0);
        let residue = max_abs_c(&(conj(&m2) - m2c)).max(max_abs_c(&(conj(&m1) - m1c)));
        if residue > CONSISTENCY_TOL * scale {
            return Err(Error::Consistency(format!(
                "block pattern violated by {residue:e} (scale {scale:e})"
            )));
        }
        Ok(Self { m1, m2 })
    }

    pub fn m1(&self) -> &CMat {
        &self.m1
    }

    pub fn m2(&self) -> &CMat {
        &self.m2
    }

    pub fn rows(&self) -> usize {
        self.m1.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m1.ncols()
    }

    pub fn full(&self) -> CMat {
        let (r, c) = self.m1.shape();
        let mut f = CMat::zeros(2 * r, 2 * c);
        f.view_mut((0, 0), (r, c)).copy_from(&self.m1);
        f.view_mut((0, c), (r, c)).copy_from(&self.m2);
        f.view_mut((r, 0), (r, c)).copy_from(&conj(&self.m2));
        f.view_mut((r, c), (r, c)).copy_from(&conj(&self.m1));
        f
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m1: self.m1.adjoint(),
            m2: self.m2.transpose(),
        }
    }

    pub fn mul(&self, rhs: &AugmentedMatrix) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{} augmented blocks",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self {
            m1: &self.m1 * &rhs.m1 + &self.m2 * conj(&rhs.m2),
            m2: &self.m1 * &rhs.m2 + &self.m2 * conj(&rhs.m1),
        })
    }

    pub fn add(&self, rhs: &AugmentedMatrix) -> Result<Self> {
        if self.m1.shape() != rhs.m1.shape() {
            return Err(Error::Dimension("augmented sum of mismatched shapes".into()));
        }
        Ok(Self {
            m1: &self.m1 + &rhs.m1,
            m2: &self.m2 + &rhs.m2,
        })
    }

    pub fn sub(&self, rhs: &AugmentedMatrix) -> Result<Self> {
        if self.m1.shape() != rhs.m1.shape() {
            return Err(Error::Dimension("augmented difference of mismatched shapes".into()));
        }
        Ok(Self {
            m1: &self.m1 - &rhs.m1,
            m2: &self.m2 - &rhs.m2,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m1: &self.m1 * Complex64::new(s, 0.0),
            m2: &self.m2 * Complex64::new(s, 0.0),
        }
    }

    /// Widely linear action `M1 x + M2 x*`.
    pub fn apply(&self, x: &AugmentedVector) -> Result<AugmentedVector> {
        if self.cols() != x.dim() {
            return Err(Error::Dimension(format!(
                "augmented matrix has {} columns, vector has {}",
                self.cols(),
                x.dim()
            )));
        }
        Ok(AugmentedVector::new(&self.m1 * x.top() + &self.m2 * x.bottom()))
    }

    /// `M1 ← (M1 + M1ᴴ)/2`, `M2 ← (M2 + M2ᵀ)/2`; square covariances only.
    pub fn symmetrize(&self) -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self {
            m1: (&self.m1 + self.m1.adjoint()) * half,
            m2: (&self.m2 + self.m2.transpose()) * half,
        }
    }

    pub fn trace(&self) -> f64 {
        // tr of the full matrix is 2 Re tr(M1)
        2.0 * self.m1.trace().re
    }

    /// True when both blocks are zero-free up to `tol`.
    pub fn is_zero(&self, tol: f64) -> bool {
        max_abs_c(&self.m1) <= tol && max_abs_c(&self.m2) <= tol
    }
}

fn check_even(m: &RMat) -> Result<()> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 || r % 2 != 0 || c % 2 != 0 {
        return Err(Error::Dimension(format!("composite matrix shape {:?} is not even", m.shape())));
    }
    Ok(())
}

/// Real composite matrix to augmented form.
///
/// With `M = [[M11, M12], [M21, M22]]` the system-mode blocks are
/// `M1 = ½(M11 + M22 + j(M21 − M12))` and `M2 = ½(M11 − M22 + j(M21 + M12))`;
/// covariance mode doubles both.
pub fn real_matrix_to_augmented(m: &RMat, mode: TransformMode) -> Result<AugmentedMatrix> {
    check_even(m)?;
    let (r, c) = (m.nrows() / 2, m.ncols() / 2);
    let m11 = m.view((0, 0), (r, c));
    let m12 = m.view((0, c), (r, c));
    let m21 = m.view((r, 0), (r, c));
    let m22 = m.view((r, c), (r, c));
    let s = mode.forward_scale();
    let m1 = CMat::from_fn(r, c, |i, k| {
        Complex64::new(m11[(i, k)] + m22[(i, k)], m21[(i, k)] - m12[(i, k)]) * s
    });
    let m2 = CMat::from_fn(r, c, |i, k| {
        Complex64::new(m11[(i, k)] - m22[(i, k)], m21[(i, k)] + m12[(i, k)]) * s
    });
    Ok(AugmentedMatrix { m1, m2 })
}

/// Augmented matrix back to its real composite, via `T⁻¹ = ½Tᴴ` on the full matrix.
///
/// System mode returns `½ Tᴴ Ā T`, covariance mode `¼ Tᴴ R̄ T`.
pub fn augmented_to_real_matrix(m: &AugmentedMatrix, mode: TransformMode) -> Result<RMat> {
    augmented_full_to_real_matrix(&m.full(), mode)
}

/// Same as [`augmented_to_real_matrix`] for an explicit full matrix; fails when
/// the result has an imaginary residue, i.e. the input was not augmented.
pub fn augmented_full_to_real_matrix(full: &CMat, mode: TransformMode) -> Result<RMat> {
    let (rr, cc) = full.shape();
    if rr == 0 || cc == 0 || rr % 2 != 0 || cc % 2 != 0 {
        return Err(Error::Dimension(format!("augmented shape {:?} is not even", full.shape())));
    }
    let tr = transform(rr / 2)?;
    let tc = transform(cc / 2)?;
    let s = match mode {
        TransformMode::System => 0.5,
        TransformMode::Covariance => 0.25,
    };
    let back = tr.adjoint() * full * tc * Complex64::new(s, 0.0);
    let scale = max_abs_c(&back).max(1.0);
    let residue = back.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
    if residue > CONSISTENCY_TOL * scale {
        return Err(Error::Consistency(format!("imaginary residue {residue:e} in real composite")));
    }
    Ok(back.map(|z| z.re))
}

/// Symmetric square root `B` with `B Bᵀ = M`, built from the eigendecomposition
/// with eigenvalues floored at zero so singular PSD inputs are accepted.
pub fn psd_sqrt(m: &RMat) -> Result<RMat> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("psd_sqrt of non-square {:?}", m.shape())));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(RMat::zeros(0, 0));
    }
    let scale = max_abs_r(m);
    let asym = max_abs_r(&(m - m.transpose()));
    if asym > CONSISTENCY_TOL * scale.max(1.0) {
        return Err(Error::Consistency(format!("matrix is not symmetric (asymmetry {asym:e})")));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let min = eig.eigenvalues.min();
    if min < -PSD_TOL * scale {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let top = eig.eigenvalues.max().max(0.0);
    let mut b = eig.eigenvectors;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let root = if lambda <= EIGEN_ZERO_FLOOR * top { 0.0 } else { lambda.sqrt() };
        b.column_mut(k).scale_mut(root);
    }
    Ok(b)
}

/// Eigenvalues `(P + |P̃|, P − |P̃|)` of the scalar augmented covariance `[[P, P̃], [P̃*, P]]`.
pub fn eigenvalues_scalar_augmented(p: f64, p_tilde: Complex64) -> Result<(f64, f64)> {
    let m = p_tilde.norm();
    if p < 0.0 || m > p + 1e-12 * p.max(1.0) {
        return Err(Error::NotPsd { min_eigenvalue: p - m });
    }
    Ok((p + m, (p - m).max(0.0)))
}

/// Minimum eigenvalue of an augmented (Hermitian) matrix.
pub fn min_eigenvalue(m: &AugmentedMatrix) -> f64 {
    let full = m.full();
    let sym = (&full + full.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(sym).eigenvalues.min()
}

/// Solves `X S = rhs` for a self-adjoint `S`.
///
/// Uses a Cholesky solve when `S` is well conditioned, otherwise an eigenvalue
/// pseudo-inverse; the flag reports the second case.
pub fn right_divide_selfadjoint<T>(rhs: &DMatrix<T>, s: &DMatrix<T>) -> (DMatrix<T>, bool)
where
    T: ComplexField<RealField = f64> + Copy,
{
    let sym = (s + s.adjoint()) * T::from_real(0.5);
    let eig = SymmetricEigen::new(sym.clone());
    let top = eig.eigenvalues.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    let bottom = eig.eigenvalues.min();
    let singular = top == 0.0 || bottom <= SINGULAR_RTOL * top;
    if !singular {
        if let Some(chol) = sym.clone().cholesky() {
            // X S = rhs  <=>  S Xᴴ = rhsᴴ
            return (chol.solve(&rhs.adjoint()).adjoint(), false);
        }
    }
    let mut inv = DMatrix::<T>::zeros(sym.nrows(), sym.ncols());
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > SINGULAR_RTOL * top {
            let v = eig.eigenvectors.column(k);
            inv += (&v * v.adjoint()) * T::from_real(1.0 / lambda);
        }
    }
    (rhs * inv, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transform_n1_is_explicit() {
        let t = transform(1).unwrap();
        assert_eq!(t[(0, 0)], c(1.0, 0.0));
        assert_eq!(t[(0, 1)], c(0.0, 1.0));
        assert_eq!(t[(1, 0)], c(1.0, 0.0));
        assert_eq!(t[(1, 1)], c(0.0, -1.0));
    }

    #[test]
    fn transform_is_unitary_up_to_two() {
        for n in 1..=8 {
            let t = transform(n).unwrap();
            let two = CMat::identity(2 * n, 2 * n) * c(2.0, 0.0);
            assert!(max_abs_c(&(&t * t.adjoint() - &two)) < 1e-14);
            assert!(max_abs_c(&(t.adjoint() * &t - &two)) < 1e-14);
        }
        let t3 = transform(3).unwrap();
        let inv = t3.clone().try_inverse().unwrap();
        assert!(max_abs_c(&(inv - t3.adjoint() * c(0.5, 0.0))) < 1e-14);
        assert!(transform(0).is_err());
    }

    #[test]
    fn real_to_augmented_examples() {
        let x = real_to_augmented(&RVec::from_vec(vec![1.0, 2.0])).unwrap();
        assert_eq!(x.top()[0], c(1.0, 2.0));
        assert_eq!(x.bottom()[0], c(1.0, -2.0));

        let zero = real_to_augmented(&RVec::zeros(2)).unwrap();
        assert_eq!(zero.full(), CVec::zeros(2));

        let x = real_to_augmented(&RVec::from_vec(vec![3.0, -1.0, 0.0, 4.0])).unwrap();
        assert_eq!(x.top().as_slice(), &[c(3.0, 0.0), c(-1.0, 4.0)]);

        assert!(matches!(
            real_to_augmented(&RVec::zeros(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn augmented_to_real_checks_conjugacy() {
        let x = AugmentedVector::new(CVec::from_vec(vec![c(1.0, 2.0)]));
        assert_eq!(augmented_to_real(&x).unwrap().as_slice(), &[1.0, 2.0]);
        let bad = AugmentedVector::from_parts(
            CVec::from_vec(vec![c(1.0, 2.0)]),
            CVec::from_vec(vec![c(1.0, 2.0)]),
        );
        assert!(matches!(bad, Err(Error::Consistency(_))));
        let bad = AugmentedVector::from_full(&CVec::from_vec(vec![c(1.0, 2.0), c(1.0, 2.0)]));
        assert!(matches!(bad, Err(Error::Consistency(_))));
    }

    #[test]
    fn system_mode_examples() {
        let a = real_matrix_to_augmented(&RMat::identity(2, 2), TransformMode::System).unwrap();
        assert_eq!(a.m1()[(0, 0)], c(1.0, 0.0));
        assert_eq!(a.m2()[(0, 0)], c(0.0, 0.0));

        let rot = RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let a = real_matrix_to_augmented(&rot, TransformMode::System).unwrap();
        assert!((a.m1()[(0, 0)] - J).norm() < 1e-15);
        assert!(a.m2()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn covariance_mode_examples() {
        let r = real_matrix_to_augmented(&RMat::from_diagonal(&RVec::from_vec(vec![1.0, 0.0])), TransformMode::Covariance)
            .unwrap();
        assert!((r.m1()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((r.m2()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let rzz = augmented_to_real_matrix(&AugmentedMatrix::identity(1), TransformMode::Covariance).unwrap();
        assert!(max_abs_r(&(rzz - RMat::identity(2, 2) * 0.5)) < 1e-15);

        for &rho in &[0.0, 0.3, 0.8, 1.0] {
            let rbar = AugmentedMatrix::new(
                CMat::from_element(1, 1, c(1.0, 0.0)),
                CMat::from_element(1, 1, c(rho, 0.0)),
            )
            .unwrap();
            let rzz = augmented_to_real_matrix(&rbar, TransformMode::Covariance).unwrap();
            assert!((rzz[(0, 0)] - (1.0 + rho) / 2.0).abs() < 1e-15);
            assert!((rzz[(1, 1)] - (1.0 - rho) / 2.0).abs() < 1e-15);
            assert!(rzz[(0, 1)].abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_agrees_with_explicit_transform() {
        let m = RMat::from_fn(4, 6, |i, k| ((i * 7 + k * 3) % 5) as f64 - 1.7);
        let tr = transform(2).unwrap();
        let tc = transform(3).unwrap();
        let mc = m.map(|x| c(x, 0.0));
        let explicit = &tr * mc * tc.adjoint() * c(0.5, 0.0);
        let blocks = real_matrix_to_augmented(&m, TransformMode::System).unwrap();
        assert!(max_abs_c(&(explicit - blocks.full())) < 1e-14);
        assert!(real_matrix_to_augmented(&RMat::zeros(3, 3), TransformMode::System).is_err());
    }

    #[test]
    fn imaginary_residue_is_rejected() {
        // [[1, 0], [0, 2]] is not of the form [[a, b], [b*, a*]]
        let full = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        assert!(augmented_full_to_real_matrix(&full, TransformMode::Covariance).is_err());
        assert!(AugmentedMatrix::from_full(&full).is_err());
    }

    #[test]
    fn block_products_match_full_products() {
        let a = AugmentedMatrix::new(
            CMat::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.2, -0.1), c(0.0, 1.0), c(-0.3, 0.0)]),
            CMat::from_row_slice(2, 2, &[c(0.1, 0.2), c(0.0, 0.0), c(0.4, -0.4), c(1.0, 1.0)]),
        )
        .unwrap();
        let b = a.adjoint().scale(0.7);
        let prod = a.mul(&b).unwrap();
        assert!(max_abs_c(&(prod.full() - a.full() * b.full())) < 1e-14);
        assert!(max_abs_c(&(a.adjoint().full() - a.full().adjoint())) < 1e-15);
        let x = AugmentedVector::new(CVec::from_vec(vec![c(1.0, -1.0), c(0.5, 2.0)]));
        let y = a.apply(&x).unwrap();
        assert!((y.full() - a.full() * x.full()).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn psd_sqrt_examples() {
        let b = psd_sqrt(&(RMat::identity(2, 2) * 4.0)).unwrap();
        assert!(max_abs_r(&(&b * b.transpose() - RMat::identity(2, 2) * 4.0)) < 1e-14);

        let ones = RMat::from_element(2, 2, 1.0);
        let b = psd_sqrt(&ones).unwrap();
        assert!(max_abs_r(&(&b * b.transpose() - &ones)) < 1e-14);

        let neg = RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn scalar_augmented_eigenvalues() {
        assert_eq!(eigenvalues_scalar_augmented(1.0, c(0.0, 0.0)).unwrap(), (1.0, 1.0));
        assert_eq!(eigenvalues_scalar_augmented(1.0, c(1.0, 0.0)).unwrap(), (2.0, 0.0));
        let (l1, l2) = eigenvalues_scalar_augmented(1.0, c(0.0, 0.5)).unwrap();
        assert!((l1 - 1.5).abs() < 1e-15 && (l2 - 0.5).abs() < 1e-15);
        assert!(eigenvalues_scalar_augmented(1.0, c(1.2, 0.0)).is_err());
    }

    #[test]
    fn right_divide_flags_singular() {
        let s = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let rhs = CMat::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let (x, singular) = right_divide_selfadjoint(&rhs, &s);
        assert!(singular);
        // least-squares solution of x S = rhs
        assert!(max_abs_c(&(&x * &s - &rhs)) < 1e-12);

        let s = CMat::identity(2, 2) * c(2.0, 0.0);
        let (x, singular) = right_divide_selfadjoint(&rhs, &s);
        assert!(!singular);
        assert!(max_abs_c(&(x - rhs * c(0.5, 0.0))) < 1e-15);
    }
}
