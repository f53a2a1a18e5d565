//! Dense complex linear algebra on labeled tensor-product spaces.
//!
//! Matrices are `nalgebra` dense matrices of `Complex64`. A [`SubsystemLayout`]
//! names the tensor factors of a compound space (for example `R ⊗ Q ⊗ E`), with
//! the first factor being the most significant index.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Eigenvalues below this are treated as zero in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-12;
/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-8;
const ORTHONORMAL_TOL: f64 = 1e-9;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Builds a real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let v = DVector::from_iterator(values.len(), values.iter().map(|&x| c64(x, 0.0)));
    ComplexMatrix::from_diagonal(&v)
}

/// `|v⟩⟨v|`
pub fn projector(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Tensor-product factors of a compound Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    factors: Vec<(String, usize)>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(l, d)| (l.into(), d)).collect();
        if factors.is_empty() {
            return Err(Error::InvalidLayout("layout has no factors".into()));
        }
        for (i, (label, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::InvalidLayout(format!("factor `{label}` has dimension 0")));
            }
            if factors[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::InvalidLayout(format!("duplicate label `{label}`")));
            }
        }
        Ok(Self { factors })
    }

    /// One-factor layout.
    pub fn single(label: &str, dim: usize) -> Self {
        Self::new([(label, dim.max(1))]).expect("single factor layout")
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.factors.iter().map(|(l, _)| l.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|&(_, d)| d).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|&(_, d)| d).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|(l, _)| l == label)
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.position(label).map(|i| self.factors[i].1)
    }

    /// Layout of `self ⊗ other`.
    pub fn tensor(&self, other: &SubsystemLayout) -> Result<Self> {
        Self::new(self.factors.iter().chain(other.factors.iter()).cloned())
    }

    /// Restriction to `keep`, in this layout's order.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        for label in keep {
            if self.position(label).is_none() {
                return Err(Error::UnknownLabel((*label).to_string()));
            }
        }
        Self::new(
            self.factors
                .iter()
                .filter(|(l, _)| keep.contains(&l.as_str()))
                .cloned(),
        )
    }
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvector(&self, i: usize) -> ComplexVector {
        self.eigenvectors.column(i).into_owned()
    }

    /// Number of eigenvalues above `cutoff`.
    pub fn rank(&self, cutoff: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > cutoff).count()
    }

    /// `V diag(λ) V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let lambda = diag(&self.eigenvalues);
        &self.eigenvectors * lambda * self.eigenvectors.adjoint()
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    a.kronecker(b)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Offsets into the full index space of every multi-index over `positions`.
fn offsets(dims: &[usize], strides: &[usize], positions: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &p in positions {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for &base in &out {
            for digit in 0..dims[p] {
                next.push(base + digit * strides[p]);
            }
        }
        out = next;
    }
    out
}

/// Traces out every factor of `layout` not named in `keep`.
///
/// The result acts on the kept factors in layout order.
pub fn partial_trace(m: &ComplexMatrix, layout: &SubsystemLayout, keep: &[&str]) -> Result<ComplexMatrix> {
    ensure_square(m)?;
    if m.nrows() != layout.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.total_dim(),
            found: m.nrows(),
        });
    }
    let restricted = layout.restrict(keep)?;
    let dims = layout.dims();
    let st = strides(&dims);
    let (kept, traced): (Vec<usize>, Vec<usize>) = (0..dims.len())
        .partition(|&i| restricted.position(&layout.factors[i].0).is_some());
    let kept_off = offsets(&dims, &st, &kept);
    let traced_off = offsets(&dims, &st, &traced);

    let n = kept_off.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (a, &ra) in kept_off.iter().enumerate() {
        for (b, &rb) in kept_off.iter().enumerate() {
            out[(a, b)] = traced_off.iter().map(|&t| m[(ra + t, rb + t)]).sum();
        }
    }
    Ok(out)
}

/// Reduced density matrix of a pure vector on the kept factors.
pub fn reduced_from_vector(v: &ComplexVector, layout: &SubsystemLayout, keep: &[&str]) -> Result<ComplexMatrix> {
    partial_trace(&projector(v), layout, keep)
}

fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(())
}

/// Largest entry of `M − M†` relative to `max(1, ‖M‖_F)`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let diff = m - m.adjoint();
    max_abs(&diff) / m.norm().max(1.0)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral decomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(M + M†)/2` first. Eigenvalues are returned in
/// descending order and each eigenvector has its first non-negligible component
/// made real and positive.
pub fn herm_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    ensure_square(m)?;
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let sym = (m + m.adjoint()).unscale(2.0);
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        fix_phase(&mut v);
        vectors.set_column(col, &v);
    }
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        eigenvectors: vectors,
    })
}

/// Rotates the global phase so the first component with modulus above 1e-10
/// is real and positive.
pub fn fix_phase(v: &mut ComplexVector) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-10 * scale.max(1e-300)) {
        let phase = z.conj() / z.norm();
        *v *= phase;
    }
}

/// Shannon entropy in bits of a probability vector, skipping entries ≤ 1e-12.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    let s: f64 = probs
        .iter()
        .filter(|&&p| p > ENTROPY_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum();
    s.max(0.0)
}

/// Von Neumann entropy in bits of a density matrix.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let spec = herm_eig(rho)?;
    check_density_spectrum(rho, &spec)?;
    Ok(shannon_entropy(&spec.eigenvalues))
}

pub(crate) fn check_density_spectrum(rho: &ComplexMatrix, spec: &Spectrum) -> Result<()> {
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
    }
    if let Some(&min) = spec.eigenvalues.last() {
        if min < -1e-9 {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:.3e}")));
        }
    }
    Ok(())
}

/// `h(p) = −p log₂ p − (1−p) log₂(1−p)`
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParameterOutOfRange { name: "p", value: p });
    }
    Ok(shannon_entropy(&[p, 1.0 - p]))
}

/// Largest entry of `C†C − 1`.
pub fn orthonormality_defect(columns: &ComplexMatrix) -> f64 {
    let gram = columns.adjoint() * columns;
    max_abs(&(gram - identity(columns.ncols())))
}

/// Extends orthonormal columns to a square unitary.
///
/// The input occupies the leading columns. The remaining columns come from
/// Gram–Schmidt on the standard basis vectors in index order, skipping any
/// candidate whose residual norm falls below 1e-8.
pub fn unitary_completion(columns: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = columns.nrows();
    let k = columns.ncols();
    if k > n {
        return Err(Error::NotOrthonormal(f64::INFINITY));
    }
    let defect = orthonormality_defect(columns);
    if defect > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal(defect));
    }
    let mut basis: Vec<ComplexVector> = (0..k).map(|j| columns.column(j).into_owned()).collect();
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = ComplexVector::zeros(n);
        v[i] = c64(1.0, 0.0);
        // two passes of classical Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let norm = v.norm();
        if norm > PIVOT_TOL {
            basis.push(v.unscale(norm));
        }
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for (j, b) in basis.iter().enumerate() {
        out.set_column(j, b);
    }
    Ok(out)
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows() * a.ncols(),
            found: b.nrows() * b.ncols(),
        });
    }
    Ok((a - b).norm())
}

/// Largest entry of `U†U − 1`, or infinity for non-square input.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    orthonormality_defect(u)
}
