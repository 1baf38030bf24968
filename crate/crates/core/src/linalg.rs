//! Dense complex linear algebra with explicit rank tolerances.
//!
//! Everything here works on small dense matrices (total dimension of a few
//! hundred at most). Rank decisions are relative: a singular value counts as
//! zero when it is below `rank_tol * sigma_max`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Unitarity slack accepted by [`eig_unitary`].
pub const UNITARY_TOL: f64 = 1e-8;
/// Reconstruction error allowed for an eigendecomposition.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

/// Numerical slack used for rank decisions and invariant checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative singular-value cutoff.
    pub rank_tol: f64,
    /// Slack for invariant checks (orthonormality, residuals).
    pub assert_tol: f64,
}

impl Tolerance {
    pub fn new(rank_tol: f64, assert_tol: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v <= 1e-6;
        if !ok(rank_tol) || !ok(assert_tol) {
            return Err(Error::InvalidInput(format!(
                "tolerances must lie in (0, 1e-6]: rank_tol={rank_tol}, assert_tol={assert_tol}"
            )));
        }
        Ok(Self {
            rank_tol,
            assert_tol,
        })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_tol: 1e-10,
            assert_tol: 1e-8,
        }
    }
}

pub fn is_finite_matrix(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn is_finite_vector(v: &ComplexVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if is_finite_matrix(m) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

fn to_faer(m: &ComplexMatrix) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    })
}

fn from_faer(m: faer::MatRef<'_, faer::c64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        C64::new(z.re, z.im)
    })
}

/// Singular value decomposition `M = U diag(s) V^dagger`.
///
/// Thin unless `full_v`, in which case `V` holds all `ncols` right singular
/// vectors (trailing ones span the part of the kernel beyond `min(m, n)`).
struct Svd {
    u: ComplexMatrix,
    s: Vec<f64>,
    v: ComplexMatrix,
}

fn svd(m: &ComplexMatrix, full_v: bool) -> Result<Svd> {
    let fm = to_faer(m);
    let fail = |e: faer::linalg::svd::SvdError| Error::Internal(format!("svd failed: {e:?}"));
    let (u, s, v) = if full_v {
        let d = fm.svd().map_err(fail)?;
        let s: Vec<f64> = d.S().column_vector().iter().map(|z| z.re).collect();
        (from_faer(d.U()), s, from_faer(d.V()))
    } else {
        let d = fm.thin_svd().map_err(fail)?;
        let s: Vec<f64> = d.S().column_vector().iter().map(|z| z.re).collect();
        (from_faer(d.U()), s, from_faer(d.V()))
    };
    Ok(Svd { u, s, v })
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
fn hermitian_eigen(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let d = to_faer(h)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Internal(format!("eigensolver failed: {e:?}")))?;
    let vals: Vec<f64> = d.S().column_vector().iter().map(|z| z.re).collect();
    let vecs = from_faer(d.U());
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted = order.iter().map(|&k| vals[k]).collect();
    let cols: Vec<ComplexVector> = order.iter().map(|&k| vecs.column(k).into_owned()).collect();
    Ok((sorted, columns(h.nrows(), &cols)))
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    match svd(m, false) {
        Ok(d) => d.s.iter().cloned().fold(0.0, f64::max),
        Err(_) => f64::NAN,
    }
}

/// `e_i` in `C^dim`.
pub fn basis_vector(dim: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[i] = ONE;
    v
}

/// Standard inner product, antilinear in the first argument.
pub fn inner(a: &ComplexVector, b: &ComplexVector) -> C64 {
    a.dotc(b)
}

/// Columns as a matrix (`dim x k`).
pub fn columns(dim: usize, vectors: &[ComplexVector]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Orthonormal basis of the null space of `m`.
///
/// Every returned vector `b` satisfies `|M b| <= 10 * rank_tol * |M|`.
pub fn kernel_basis(m: &ComplexMatrix, tol: Tolerance) -> Result<Vec<ComplexVector>> {
    if m.ncols() == 0 {
        return Err(Error::InvalidInput("kernel of a map with empty domain".into()));
    }
    ensure_finite(m)?;
    let n = m.ncols();
    if m.nrows() == 0 {
        return Ok((0..n).map(|i| basis_vector(n, i)).collect());
    }
    let d = svd(m, true)?;
    let sigma_max = d.s.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Ok((0..n).map(|i| basis_vector(n, i)).collect());
    }
    let cutoff = tol.rank_tol * sigma_max;
    let kernel = (0..n)
        .filter(|&i| d.s.get(i).is_none_or(|&s| s <= cutoff))
        .map(|i| d.v.column(i).into_owned())
        .collect();
    Ok(kernel)
}

/// Orthonormal basis of the span of `vectors` (all of dimension `dim`).
pub fn orthonormalize(
    dim: usize,
    vectors: &[ComplexVector],
    tol: Tolerance,
) -> Result<Vec<ComplexVector>> {
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    if vectors.is_empty() || dim == 0 {
        return Ok(Vec::new());
    }
    let m = columns(dim, vectors);
    ensure_finite(&m)?;
    let d = svd(&m, false)?;
    let sigma_max = d.s.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Ok(Vec::new());
    }
    let cutoff = tol.rank_tol * sigma_max;
    Ok(d.s
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff)
        .map(|(i, _)| d.u.column(i).into_owned())
        .collect())
}

fn is_orthonormal(vectors: &[ComplexVector], tol: f64) -> bool {
    vectors.iter().enumerate().all(|(i, a)| {
        vectors.iter().enumerate().all(|(j, b)| {
            let expect = if i == j { ONE } else { ZERO };
            (inner(a, b) - expect).norm() <= tol
        })
    })
}

/// Orthogonal projector onto the span of `basis` in `C^dim`.
///
/// The basis is orthonormalized first when it is not already orthonormal
/// within `assert_tol`.
pub fn projector_onto(dim: usize, basis: &[ComplexVector], tol: Tolerance) -> Result<ComplexMatrix> {
    for v in basis {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    let owned;
    let basis = if is_orthonormal(basis, tol.assert_tol) {
        basis
    } else {
        owned = orthonormalize(dim, basis, tol)?;
        &owned[..]
    };
    let mut p = ComplexMatrix::zeros(dim, dim);
    for b in basis {
        p += b * b.adjoint();
    }
    Ok(p)
}

/// Projector onto the null space of `m`.
pub fn kernel_projector(m: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let basis = kernel_basis(m, tol)?;
    projector_onto(m.ncols(), &basis, tol)
}

/// Minimum-norm least-squares solution of `m x = b` with its residual norm.
pub fn least_squares(
    m: &ComplexMatrix,
    b: &ComplexVector,
    tol: Tolerance,
) -> Result<(ComplexVector, f64)> {
    least_squares_scaled(m, b, tol, None)
}

/// As [`least_squares`], but singular values are cut at `rank_tol * scale`
/// instead of `rank_tol * sigma_max` when a reference scale is given. Use
/// this when `m` is a product whose entries may all be rounding noise.
pub fn least_squares_scaled(
    m: &ComplexMatrix,
    b: &ComplexVector,
    tol: Tolerance,
    scale: Option<f64>,
) -> Result<(ComplexVector, f64)> {
    if m.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: b.len(),
        });
    }
    ensure_finite(m)?;
    let n = m.ncols();
    if m.nrows() == 0 || n == 0 {
        let x = ComplexVector::zeros(n);
        return Ok((x, b.norm()));
    }
    let d = svd(m, false)?;
    let sigma_max = d.s.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol.rank_tol * scale.map_or(sigma_max, |s| s.max(sigma_max));
    let mut x = ComplexVector::zeros(n);
    for (i, &s) in d.s.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let coeff = d.u.column(i).dotc(b) / s;
            x += d.v.column(i) * coeff;
        }
    }
    let residual = (m * &x - b).norm();
    Ok((x, residual))
}

/// Minimum-norm exact solution of `m x = b`, or `None` when the system is
/// infeasible at the configured tolerance.
pub fn min_norm_solution(
    m: &ComplexMatrix,
    b: &ComplexVector,
    tol: Tolerance,
) -> Result<Option<ComplexVector>> {
    min_norm_solution_scaled(m, b, tol, None)
}

/// As [`min_norm_solution`] with the cutoff of [`least_squares_scaled`].
pub fn min_norm_solution_scaled(
    m: &ComplexMatrix,
    b: &ComplexVector,
    tol: Tolerance,
    scale: Option<f64>,
) -> Result<Option<ComplexVector>> {
    let (x, residual) = least_squares_scaled(m, b, tol, scale)?;
    let norm = scale.unwrap_or(0.0).max(spectral_norm(m));
    let slack = 10.0 * tol.rank_tol * (norm + b.norm());
    Ok((residual <= slack).then_some(x))
}

/// Canonical representative of a phase in `(-pi, pi]`.
pub fn canonical_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Eigenphases and orthonormal eigenvectors of a unitary.
#[derive(Debug, Clone)]
pub struct UnitaryEigensystem {
    /// Eigenphases in `(-pi, pi]`.
    pub phases: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: ComplexMatrix,
    /// Oracle calls per application of the unitary.
    pub queries_per_application: u64,
}

impl UnitaryEigensystem {
    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn with_queries(mut self, queries_per_application: u64) -> Self {
        self.queries_per_application = queries_per_application;
        self
    }

    /// Coefficients `<u_k|psi>` of `psi` in the eigenbasis.
    pub fn coefficients(&self, psi: &ComplexVector) -> Result<Vec<C64>> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi.len(),
            });
        }
        Ok((self.vectors.adjoint() * psi).iter().cloned().collect())
    }

    /// `|P_theta psi|^2`: weight of `psi` on eigenvectors with `|phase| <= theta`.
    pub fn low_phase_weight(&self, psi: &ComplexVector, theta: f64) -> Result<f64> {
        let coeffs = self.coefficients(psi)?;
        Ok(self
            .phases
            .iter()
            .zip(&coeffs)
            .filter(|(p, _)| p.abs() <= theta)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `P_theta psi` as a vector.
    pub fn project_low_phase(&self, psi: &ComplexVector, theta: f64) -> Result<ComplexVector> {
        let coeffs = self.coefficients(psi)?;
        let mut out = ComplexVector::zeros(self.dim());
        for (k, (p, a)) in self.phases.iter().zip(&coeffs).enumerate() {
            if p.abs() <= theta {
                out += self.vectors.column(k) * *a;
            }
        }
        Ok(out)
    }

    /// `sum_k e^{i theta_k} |u_k><u_k|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut diag = ComplexMatrix::zeros(d, d);
        for (k, p) in self.phases.iter().enumerate() {
            diag[(k, k)] = C64::from_polar(1.0, *p);
        }
        &self.vectors * diag * self.vectors.adjoint()
    }
}

/// Frobenius distance of `u^dagger u` from the identity.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - ComplexMatrix::identity(n, n)).norm()
}

/// Eigendecomposition of a unitary matrix.
///
/// The Hermitian part `(U + U^dagger)/2` is diagonalized first; within each
/// cluster of equal cosines the anti-Hermitian part separates `+theta` from
/// `-theta`. Both stages use a Hermitian eigensolver, so the eigenvectors are
/// orthonormal even inside degenerate eigenspaces.
pub fn eig_unitary(u: &ComplexMatrix, tol: Tolerance) -> Result<UnitaryEigensystem> {
    let n = u.nrows();
    if n == 0 || u.ncols() != n {
        return Err(Error::InvalidInput(format!(
            "expected a nonempty square matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    ensure_finite(u)?;
    let defect = unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }

    let u_dag = u.adjoint();
    let herm = (u + &u_dag) * C64::new(0.5, 0.0);
    let anti = (u - &u_dag) * C64::new(0.0, -0.5);

    let (values, eigvecs) = hermitian_eigen(&herm)?;

    const CLUSTER_GAP: f64 = 1e-9;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match clusters.last_mut() {
            Some(c) if values[k] - values[*c.last().unwrap()] <= CLUSTER_GAP =>
            {
                c.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }

    // Small generic weight on the cosine part resolves phases whose cosines
    // were merged by the cluster gap.
    const MIX: f64 = 0.137_035_999;
    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut col = 0;
    for cluster in &clusters {
        let q = columns(
            n,
            &cluster
                .iter()
                .map(|&k| eigvecs.column(k).into_owned())
                .collect::<Vec<_>>(),
        );
        let z = if cluster.len() == 1 {
            ComplexMatrix::identity(1, 1)
        } else {
            let restricted = q.adjoint() * (&anti + &herm * C64::new(MIX, 0.0)) * &q;
            let restricted = (&restricted + restricted.adjoint()) * C64::new(0.5, 0.0);
            hermitian_eigen(&restricted)?.1
        };
        let block = &q * z;
        for j in 0..block.ncols() {
            let mut v = block.column(j).into_owned();
            let nv = v.norm();
            v /= C64::new(nv, 0.0);
            vectors.set_column(col, &v);
            col += 1;
        }
    }

    let phases = (0..n)
        .map(|k| {
            let v = vectors.column(k);
            let rq = v.dotc(&(u * v));
            canonical_phase(rq.arg())
        })
        .collect();

    let es = UnitaryEigensystem {
        phases,
        vectors,
        queries_per_application: 0,
    };
    let err = (es.reconstruct() - u).norm();
    if err > RECONSTRUCTION_TOL.max(tol.assert_tol) {
        return Err(Error::Internal(format!(
            "eigendecomposition reconstruction error {err:.3e}"
        )));
    }
    Ok(es)
}
