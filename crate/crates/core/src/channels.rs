//! Quantum channels in operator-sum form and their unitary dilations.

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, herm_eig, identity, kron, partial_trace, unitarity_defect, ComplexMatrix,
    ComplexVector, SubsystemLayout,
};
use crate::random;
use crate::states::DensityOperator;

/// Accepted deviation of `Σ A†A` from the identity (Frobenius norm).
pub const NORMALIZATION_TOL: f64 = 1e-8;
/// Operators with Frobenius norm below this are dropped by [`KrausChannel::pruned`].
pub const ZERO_OPERATOR_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-8;
const CANONICAL_CUTOFF: f64 = 1e-10;

/// Trace-preserving completely positive map `ρ ↦ Σ_μ A_μ ρ A_μ†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
    dim: usize,
}

/// `‖Σ_μ A_μ†A_μ − 1‖_F` for a raw list of operators.
pub fn normalization_defect(operators: &[ComplexMatrix]) -> Result<f64> {
    let first = operators
        .first()
        .ok_or_else(|| Error::InvalidArgument("no Kraus operators".into()))?;
    let d = first.nrows();
    let mut sum = ComplexMatrix::zeros(d, d);
    for a in operators {
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if a.nrows() != d { a.nrows() } else { a.ncols() },
            });
        }
        sum += a.adjoint() * a;
    }
    Ok((sum - identity(d)).norm())
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let defect = normalization_defect(&operators)?;
        if defect.is_nan() || defect > NORMALIZATION_TOL {
            return Err(Error::KrausNotNormalized(defect));
        }
        let dim = operators[0].nrows();
        Ok(Self { operators, dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![identity(dim)],
            dim,
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of Kraus operators.
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Normalization defect `‖Σ A†A − 1‖_F`.
    pub fn validate(&self) -> f64 {
        normalization_defect(&self.operators).expect("consistent dims")
    }

    /// Drops (near-)zero operators, keeping at least one.
    pub fn pruned(mut self) -> Self {
        if self.operators.iter().any(|a| a.norm() >= ZERO_OPERATOR_TOL) {
            self.operators.retain(|a| a.norm() >= ZERO_OPERATOR_TOL);
        }
        self
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: dim,
            });
        }
        Ok(())
    }

    pub(crate) fn apply_matrix(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.operators {
            out += a * rho * a.adjoint();
        }
        out
    }
}

/// `Σ_μ A_μ ρ A_μ†`
pub fn apply(ch: &KrausChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    ch.check_dim(rho.dim())?;
    let out = ch.apply_matrix(rho.matrix());
    let out = (&out + out.adjoint()).unscale(2.0);
    Ok(DensityOperator::from_trusted(out, rho.layout().clone()))
}

/// `second ∘ first`, with Kraus operators `B_ν A_μ` (ν outer, μ inner).
pub fn compose(second: &KrausChannel, first: &KrausChannel) -> Result<KrausChannel> {
    second.check_dim(first.dim)?;
    let operators = second
        .operators
        .iter()
        .flat_map(|b| first.operators.iter().map(move |a| b * a))
        .collect();
    Ok(KrausChannel {
        operators,
        dim: first.dim,
    })
}

/// `1_R ⊗ $` acting on `R ⊗ Q`.
pub fn extend(ch: &KrausChannel, ref_dim: usize) -> Result<KrausChannel> {
    if ref_dim == 0 {
        return Err(Error::InvalidArgument("reference dimension must be at least 1".into()));
    }
    let id = identity(ref_dim);
    Ok(KrausChannel {
        operators: ch.operators.iter().map(|a| kron(&id, a)).collect(),
        dim: ref_dim * ch.dim,
    })
}

/// Unitary `U` on `Q ⊗ E` with the environment starting in `|0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryDilation {
    unitary: ComplexMatrix,
    sys_dim: usize,
    env_dim: usize,
}

impl UnitaryDilation {
    pub fn new(unitary: ComplexMatrix, sys_dim: usize, env_dim: usize) -> Result<Self> {
        if sys_dim == 0 || env_dim == 0 || unitary.nrows() != sys_dim * env_dim {
            return Err(Error::DimensionMismatch {
                expected: sys_dim * env_dim,
                found: unitary.nrows(),
            });
        }
        let defect = unitarity_defect(&unitary);
        if defect.is_nan() || defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self {
            unitary,
            sys_dim,
            env_dim,
        })
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    /// Index of the environment's initial basis state.
    pub fn env_init(&self) -> usize {
        0
    }

    pub fn layout(&self) -> SubsystemLayout {
        SubsystemLayout::new([("Q", self.sys_dim), ("E", self.env_dim)]).expect("distinct labels")
    }
}

/// Unitary dilation with one environment level per Kraus operator.
///
/// Columns `|q⟩|0⟩` are fixed by `(⟨q'|⟨μ|) U (|q⟩|0⟩) = (A_μ)_{q'q}`; the
/// rest come from [`linalg::unitary_completion`].
pub fn to_dilation(ch: &KrausChannel) -> Result<UnitaryDilation> {
    let defect = ch.validate();
    if defect.is_nan() || defect > NORMALIZATION_TOL {
        return Err(Error::KrausNotNormalized(defect));
    }
    let d = ch.dim;
    let m = ch.len().max(1);
    let n = d * m;

    let mut fixed = ComplexMatrix::zeros(n, d);
    for (mu, a) in ch.operators.iter().enumerate() {
        for q in 0..d {
            for qp in 0..d {
                fixed[(qp * m + mu, q)] = a[(qp, q)];
            }
        }
    }
    // orthonormalize against rounding before completion
    let fixed = orthonormalize_columns(&fixed);
    let full = linalg::unitary_completion(&fixed)?;

    let mut u = ComplexMatrix::zeros(n, n);
    let mut spare = d..n;
    for col in 0..n {
        let src = if col % m == 0 {
            col / m
        } else {
            spare.next().expect("column count")
        };
        u.set_column(col, &full.column(src));
    }
    UnitaryDilation::new(u, d, m)
}

/// Löwdin orthonormalization `C (C†C)^{-1/2}`.
pub(crate) fn orthonormalize_columns(c: &ComplexMatrix) -> ComplexMatrix {
    let gram = c.adjoint() * c;
    let spec = herm_eig(&gram).expect("Gram matrix is Hermitian");
    let inv_sqrt: Vec<f64> = spec.eigenvalues.iter().map(|&l| 1.0 / l.max(1e-300).sqrt()).collect();
    let s = &spec.eigenvectors * linalg::diag(&inv_sqrt) * spec.eigenvectors.adjoint();
    c * s
}

/// `A_μ = (1 ⊗ ⟨μ|) U (1 ⊗ |0⟩)` for every environment basis state.
pub fn from_dilation(dil: &UnitaryDilation) -> Result<KrausChannel> {
    let (d, m) = (dil.sys_dim, dil.env_dim);
    let e0 = dil.env_init();
    let operators: Vec<ComplexMatrix> = (0..m)
        .map(|mu| ComplexMatrix::from_fn(d, d, |qp, q| dil.unitary[(qp * m + mu, q * m + e0)]))
        .collect();
    KrausChannel::new(operators)
}

/// Choi matrix `(1 ⊗ $)(|Ω⟩⟨Ω|)` with `|Ω⟩ = Σ_i |i⟩|i⟩` unnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
    pub source_dim: usize,
}

impl ChoiMatrix {
    pub fn min_eigenvalue(&self) -> f64 {
        herm_eig(&self.matrix)
            .map(|s| *s.eigenvalues.last().unwrap_or(&0.0))
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Complete positivity: all eigenvalues ≥ −1e-8.
    pub fn is_completely_positive(&self) -> bool {
        self.min_eigenvalue() >= -1e-8
    }

    /// `‖Tr_out C − 1‖_F`
    pub fn trace_preservation_defect(&self) -> f64 {
        let d = self.source_dim;
        let layout = SubsystemLayout::new([("in", d), ("out", d)]).expect("distinct labels");
        let reduced = partial_trace(&self.matrix, &layout, &["in"]).expect("consistent layout");
        (reduced - identity(d)).norm()
    }

    pub fn distance(&self, other: &ChoiMatrix) -> f64 {
        linalg::frobenius_distance(&self.matrix, &other.matrix).unwrap_or(f64::INFINITY)
    }
}

fn vectorize(a: &ComplexMatrix) -> ComplexVector {
    let d = a.nrows();
    ComplexVector::from_fn(d * d, |k, _| a[(k % d, k / d)])
}

pub fn choi(ch: &KrausChannel) -> ChoiMatrix {
    let d = ch.dim;
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for a in &ch.operators {
        let v = vectorize(a);
        m += &v * v.adjoint();
    }
    ChoiMatrix {
        matrix: m,
        source_dim: d,
    }
}

/// Choi-matrix distance between two channels; channels are equal when it is ≤ 1e-8.
pub fn channel_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    a.check_dim(b.dim)?;
    Ok(choi(a).distance(&choi(b)))
}

/// Minimal Kraus representation from the Choi eigendecomposition.
pub fn canonical_kraus(ch: &KrausChannel) -> KrausChannel {
    let d = ch.dim;
    let spec = herm_eig(&choi(ch).matrix).expect("Choi matrix is Hermitian");
    let operators: Vec<ComplexMatrix> = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > CANONICAL_CUTOFF)
        .map(|(k, &l)| {
            let v = spec.eigenvector(k) * c64(l.sqrt(), 0.0);
            ComplexMatrix::from_fn(d, d, |j, i| v[i * d + j])
        })
        .collect();
    if operators.is_empty() {
        return ch.clone();
    }
    KrausChannel { operators, dim: d }
}

/// `B_ν = Σ_μ v_{νμ} A_μ` for an isometry `v` with one column per operator.
pub fn remix(ch: &KrausChannel, v: &ComplexMatrix) -> Result<KrausChannel> {
    if v.ncols() != ch.len() || v.nrows() < v.ncols() {
        return Err(Error::DimensionMismatch {
            expected: ch.len(),
            found: v.ncols(),
        });
    }
    let defect = linalg::orthonormality_defect(v);
    if defect > 1e-9 {
        return Err(Error::NotOrthonormal(defect));
    }
    let d = ch.dim;
    let operators = (0..v.nrows())
        .map(|nu| {
            let mut b = ComplexMatrix::zeros(d, d);
            for (mu, a) in ch.operators.iter().enumerate() {
                b += a * v[(nu, mu)];
            }
            b
        })
        .collect();
    Ok(KrausChannel { operators, dim: d })
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
}

pub fn pauli_z() -> ComplexMatrix {
    linalg::diag(&[1.0, -1.0])
}

/// Standard channels available by name.
#[derive(Debug, Clone, PartialEq)]
pub enum StandardChannel {
    Identity(usize),
    Unitary(ComplexMatrix),
    Dephasing(f64),
    BitFlip(f64),
    /// Qubit depolarizing channel.
    Depolarizing(f64),
    AmplitudeDamping(f64),
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange { name, value });
    }
    Ok(())
}

fn scaled(m: ComplexMatrix, s: f64) -> ComplexMatrix {
    m * c64(s, 0.0)
}

pub fn zoo(spec: &StandardChannel) -> Result<KrausChannel> {
    use StandardChannel::*;
    let ops = match spec {
        Identity(d) => {
            if *d == 0 {
                return Err(Error::InvalidArgument("dimension must be at least 1".into()));
            }
            vec![identity(*d)]
        }
        Unitary(u) => {
            let defect = unitarity_defect(u);
            if defect.is_nan() || defect > UNITARY_TOL {
                return Err(Error::NotUnitary(defect));
            }
            vec![u.clone()]
        }
        Dephasing(p) => {
            check_probability("p", *p)?;
            vec![scaled(identity(2), (1.0 - p).sqrt()), scaled(pauli_z(), p.sqrt())]
        }
        BitFlip(p) => {
            check_probability("p", *p)?;
            vec![scaled(identity(2), (1.0 - p).sqrt()), scaled(pauli_x(), p.sqrt())]
        }
        Depolarizing(p) => {
            check_probability("p", *p)?;
            let s = (p / 4.0).sqrt();
            vec![
                scaled(identity(2), (1.0 - 3.0 * p / 4.0).sqrt()),
                scaled(pauli_x(), s),
                scaled(pauli_y(), s),
                scaled(pauli_z(), s),
            ]
        }
        AmplitudeDamping(g) => {
            check_probability("gamma", *g)?;
            vec![
                ComplexMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64((1.0 - g).sqrt(), 0.)]),
                ComplexMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(g.sqrt(), 0.), c64(0., 0.), c64(0., 0.)]),
            ]
        }
    };
    KrausChannel::new(ops)
}

/// Random channel with `kraus_count` operators, cut from a Haar isometry
/// `C^d → C^d ⊗ C^{kraus_count}`.
pub fn random_channel(dim: usize, kraus_count: usize, seed: u64) -> Result<KrausChannel> {
    if dim == 0 || kraus_count == 0 {
        return Err(Error::InvalidArgument("dimension and Kraus count must be positive".into()));
    }
    let mut rng = random::rng_from_seed(seed);
    let v = random::isometry(&mut rng, dim * kraus_count, dim);
    let operators = (0..kraus_count)
        .map(|mu| v.rows(mu * dim, dim).into_owned())
        .collect();
    KrausChannel::new(operators)
}

/// Random unitary channel.
pub fn random_unitary_channel(dim: usize, seed: u64) -> KrausChannel {
    let u = random::unitary(&mut random::rng_from_seed(seed), dim);
    KrausChannel {
        operators: vec![u],
        dim,
    }
}
