//! Density operators, pure states, purifications and ensembles.

use crate::error::{Error, Result};
use crate::linalg::{
    self, fix_phase, herm_eig, hermiticity_defect, kron_vec, orthonormality_defect, projector,
    ComplexMatrix, ComplexVector, Spectrum, SubsystemLayout, ENTROPY_CUTOFF,
};
use crate::random;

const STATE_TOL: f64 = 1e-9;

/// Hermitian, positive semidefinite, unit-trace matrix on a labeled layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    layout: SubsystemLayout,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix, layout: SubsystemLayout) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: matrix.nrows(),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > STATE_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {defect:.3e})")));
        }
        let spec = herm_eig(&matrix)?;
        linalg::check_density_spectrum(&matrix, &spec)?;
        Ok(Self { matrix, layout })
    }

    /// Density operator on a single factor labeled `Q`.
    pub fn on_system(matrix: ComplexMatrix) -> Result<Self> {
        let layout = SubsystemLayout::single("Q", matrix.nrows());
        Self::new(matrix, layout)
    }

    /// `I/d` on a single factor `Q`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        Self::on_system(linalg::identity(dim).unscale(dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spectrum(&self) -> Spectrum {
        herm_eig(&self.matrix).expect("validated density operator is Hermitian")
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        linalg::shannon_entropy(&self.spectrum().eigenvalues)
    }

    /// Reduced state on the named factors.
    pub fn reduce(&self, keep: &[&str]) -> Result<DensityOperator> {
        let m = linalg::partial_trace(&self.matrix, &self.layout, keep)?;
        let layout = self.layout.restrict(keep)?;
        DensityOperator::new(m, layout)
    }

    /// Same matrix, relabeled as one factor `Q`.
    pub fn flattened(&self) -> DensityOperator {
        DensityOperator {
            matrix: self.matrix.clone(),
            layout: SubsystemLayout::single("Q", self.dim()),
        }
    }

    /// Skips validation for matrices produced by trusted library routines.
    pub(crate) fn from_trusted(matrix: ComplexMatrix, layout: SubsystemLayout) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        Self { matrix, layout }
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.entropy()
}

/// Unit-norm state vector on a labeled layout.
///
/// The global phase is normalized so the first non-negligible amplitude is
/// real and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vector: ComplexVector,
    layout: SubsystemLayout,
}

impl PureState {
    pub fn new(mut vector: ComplexVector, layout: SubsystemLayout) -> Result<Self> {
        if vector.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: vector.len(),
            });
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        fix_phase(&mut vector);
        Ok(Self { vector, layout })
    }

    pub fn on_system(vector: ComplexVector) -> Result<Self> {
        let layout = SubsystemLayout::single("Q", vector.len());
        Self::new(vector, layout)
    }

    /// Standard basis vector `|index⟩` on a single factor `Q`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= dimension {dim}")));
        }
        let mut v = ComplexVector::zeros(dim);
        v[index] = linalg::c64(1.0, 0.0);
        Self::on_system(v)
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vector
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_trusted(projector(&self.vector), self.layout.clone())
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let layout = self.layout.tensor(&other.layout)?;
        Ok(PureState {
            vector: kron_vec(&self.vector, &other.vector),
            layout,
        })
    }

    /// Reduced state on the named factors.
    pub fn reduce(&self, keep: &[&str]) -> Result<DensityOperator> {
        let m = linalg::reduced_from_vector(&self.vector, &self.layout, keep)?;
        Ok(DensityOperator::from_trusted(m, self.layout.restrict(keep)?))
    }
}

/// `Σ_k √λ_k |left_k⟩ ⊗ |right_k⟩`
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// `√λ_k`, descending.
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<ComplexVector>,
    pub right_basis: Vec<ComplexVector>,
    pub left_layout: SubsystemLayout,
    pub right_layout: SubsystemLayout,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> ComplexVector {
        let dim = self.left_layout.total_dim() * self.right_layout.total_dim();
        let mut v = ComplexVector::zeros(dim);
        for ((c, l), r) in self.coefficients.iter().zip(&self.left_basis).zip(&self.right_basis) {
            v += kron_vec(l, r) * linalg::c64(*c, 0.0);
        }
        v
    }
}

/// Reorders the amplitudes of `v` so the factors appear in `order`.
fn permute_factors(v: &ComplexVector, layout: &SubsystemLayout, order: &[usize]) -> ComplexVector {
    let dims = layout.dims();
    let n = dims.len();
    let mut src_strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        src_strides[i] = src_strides[i + 1] * dims[i + 1];
    }
    let mut out = ComplexVector::zeros(v.len());
    let mut digits = vec![0usize; n];
    for (dst, slot) in out.iter_mut().enumerate() {
        let mut rem = dst;
        for k in (0..n).rev() {
            let d = dims[order[k]];
            digits[k] = rem % d;
            rem /= d;
        }
        let src: usize = (0..n).map(|k| digits[k] * src_strides[order[k]]).sum();
        *slot = v[src];
    }
    out
}

/// Schmidt decomposition of `psi` across the cut `first | second`.
///
/// Each group lists layout labels; together they must cover the layout exactly
/// once. Within a group the factors keep the order given.
pub fn schmidt(psi: &PureState, first: &[&str], second: &[&str]) -> Result<SchmidtDecomposition> {
    if first.is_empty() || second.is_empty() {
        return Err(Error::InvalidPartition("both groups must be non-empty".into()));
    }
    let layout = psi.layout();
    let mut order = Vec::new();
    for label in first.iter().chain(second) {
        let pos = layout
            .position(label)
            .ok_or_else(|| Error::InvalidPartition(format!("unknown label `{label}`")))?;
        if order.contains(&pos) {
            return Err(Error::InvalidPartition(format!("label `{label}` appears twice")));
        }
        order.push(pos);
    }
    if order.len() != layout.factors().len() {
        return Err(Error::InvalidPartition("groups do not cover every factor".into()));
    }
    let pick = |labels: &[&str]| {
        SubsystemLayout::new(labels.iter().map(|l| (l.to_string(), layout.dim_of(l).unwrap())))
    };
    let left_layout = pick(first)?;
    let right_layout = pick(second)?;
    let da = left_layout.total_dim();
    let db = right_layout.total_dim();

    let v = permute_factors(psi.vector(), layout, &order);
    let m = ComplexMatrix::from_fn(da, db, |a, b| v[a * db + b]);
    let spec = herm_eig(&(&m * m.adjoint()))?;

    let mut coefficients = Vec::new();
    let mut left_basis = Vec::new();
    let mut right_basis = Vec::new();
    for (k, &lambda) in spec.eigenvalues.iter().enumerate() {
        if lambda <= ENTROPY_CUTOFF {
            break;
        }
        let coeff = lambda.sqrt();
        let u = spec.eigenvector(k);
        let right = (m.transpose() * u.conjugate()).unscale(coeff);
        coefficients.push(coeff);
        left_basis.push(u);
        right_basis.push(right);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_basis,
        right_basis,
        left_layout,
        right_layout,
    })
}

fn reference_label(layout: &SubsystemLayout) -> String {
    let mut label = String::from("R");
    while layout.position(&label).is_some() {
        label.push('\'');
    }
    label
}

/// Minimal purification together with the eigen-data it was built from.
pub(crate) fn purify_with_spectrum(rho: &DensityOperator) -> (PureState, Vec<f64>, Vec<ComplexVector>) {
    let spec = rho.spectrum();
    let rank = spec.rank(ENTROPY_CUTOFF).max(1);
    let weights: Vec<f64> = spec.eigenvalues[..rank].iter().map(|&l| l.max(0.0)).collect();
    let basis: Vec<ComplexVector> = (0..rank).map(|k| spec.eigenvector(k)).collect();

    let d = rho.dim();
    let mut v = ComplexVector::zeros(rank * d);
    for (k, (w, b)) in weights.iter().zip(&basis).enumerate() {
        let amp = w.sqrt();
        for q in 0..d {
            v[k * d + q] = b[q] * amp;
        }
    }
    let norm = v.norm();
    v.unscale_mut(norm);
    fix_phase(&mut v);
    let r = SubsystemLayout::single(&reference_label(rho.layout()), rank);
    let layout = r.tensor(rho.layout()).expect("fresh reference label");
    (PureState { vector: v, layout }, weights, basis)
}

/// Minimal purification `Σ_k √λ_k |k⟩_R ⊗ |β_k⟩`.
///
/// The reference factor `R` (prepended to the layout) has dimension equal to
/// the rank of `rho`; its standard basis vectors are paired with the
/// eigenvectors of `rho` in descending eigenvalue order.
pub fn purify(rho: &DensityOperator) -> PureState {
    purify_with_spectrum(rho).0
}

/// Probability-weighted list of pure states on one system.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyEnsemble)?;
        let dim = first.1.dim();
        if let Some((_, s)) = members.iter().find(|(_, s)| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        if let Some(&(p, _)) = members.iter().find(|(p, _)| p.is_nan() || *p < 0.0) {
            return Err(Error::InvalidArgument(format!("negative probability {p}")));
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `Σ p_i |ψ_i⟩⟨ψ_i|`
pub fn mix(ensemble: &Ensemble) -> Result<DensityOperator> {
    let (_, first) = ensemble.members.first().ok_or(Error::EmptyEnsemble)?;
    let mut m = ComplexMatrix::zeros(first.dim(), first.dim());
    for (p, s) in &ensemble.members {
        m += projector(s.vector()) * linalg::c64(*p, 0.0);
    }
    DensityOperator::new(m, first.layout().clone())
}

/// Ensemble of `Q` states induced by measuring `R` of `psi` in the basis given
/// by the columns of `r_basis`.
///
/// `psi` must have exactly two factors, the reference first. Outcomes with
/// probability below 1e-12 are dropped.
pub fn relative_state_ensemble(psi: &PureState, r_basis: &ComplexMatrix) -> Result<Ensemble> {
    let factors = psi.layout().factors();
    if factors.len() != 2 {
        return Err(Error::InvalidArgument(
            "relative states need a two-factor layout (reference, system)".into(),
        ));
    }
    let (dr, dq) = (factors[0].1, factors[1].1);
    if r_basis.nrows() != dr || r_basis.ncols() != dr {
        return Err(Error::DimensionMismatch {
            expected: dr,
            found: r_basis.ncols(),
        });
    }
    let defect = orthonormality_defect(r_basis);
    if defect > STATE_TOL {
        return Err(Error::NotOrthonormal(defect));
    }
    let q_layout = SubsystemLayout::new([factors[1].clone()])?;
    let psi_mat = ComplexMatrix::from_fn(dr, dq, |r, q| psi.vector()[r * dq + q]);
    let mut members = Vec::new();
    for i in 0..dr {
        let b = r_basis.column(i);
        let u: ComplexVector = psi_mat.transpose() * b.conjugate();
        let p = u.norm_squared();
        if p < ENTROPY_CUTOFF {
            continue;
        }
        let mut state = u.unscale(p.sqrt());
        fix_phase(&mut state);
        members.push((p, PureState { vector: state, layout: q_layout.clone() }));
    }
    // renormalize the dropped mass away
    let total: f64 = members.iter().map(|(p, _)| p).sum();
    for m in &mut members {
        m.0 /= total;
    }
    Ensemble::new(members)
}

/// Random density operator of the given rank on a single factor `Q`.
///
/// Mixture of `rank` independent uniformly random pure states with weights
/// drawn uniformly from the simplex.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let mut rng = random::rng_from_seed(seed);
    let weights = random::simplex_weights(&mut rng, rank);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for w in weights {
        let v = random::unit_vector(&mut rng, dim);
        m += projector(&v) * linalg::c64(w, 0.0);
    }
    let m = (&m + m.adjoint()).unscale(2.0);
    DensityOperator::on_system(m)
}

/// Random pure state on a single factor `Q`.
pub fn random_pure(dim: usize, seed: u64) -> PureState {
    let v = random::unit_vector(&mut random::rng_from_seed(seed), dim);
    PureState::on_system(v).expect("unit vector")
}
