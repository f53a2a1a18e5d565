//! Perfect error correction: the `S(ρ) = I_e` test and the explicit recovery
//! channel built from the post-channel joint state.

use serde::Serialize;

use crate::channels::{self, apply, compose, KrausChannel};
use crate::error::{Error, Result};
use crate::info::{self, rq_and_re_states};
use crate::linalg::{self, c64, herm_eig, ComplexMatrix, ComplexVector};
use crate::random;
use crate::states::{self, DensityOperator};

/// Default tolerance (bits) on the correctability deficit.
pub const DEFAULT_TOL: f64 = 1e-7;
/// Eigenvalues of `ρ` and `ρ^{E'}` at or below this are ignored.
const WEIGHT_CUTOFF: f64 = 1e-10;

/// `S(ρ) − I_e`, clamped at zero.
pub fn correctability_deficit(rho: &DensityOperator, ch1: &KrausChannel) -> Result<f64> {
    let ie = info::coherent_information(rho, ch1)?;
    Ok((rho.entropy() - ie).max(0.0))
}

/// `‖ρ^{RE'} − ρ^R ⊗ ρ^{E'}‖_F` after `ch1` acts on a purification of `ρ`.
pub fn environment_info_check(rho: &DensityOperator, ch1: &KrausChannel) -> Result<f64> {
    Ok(rq_and_re_states(rho, ch1)?.product_defect())
}

/// Outcome of [`construct_corrector`].
#[derive(Debug, Clone, Serialize)]
pub struct CorrectionResult {
    pub deficit: f64,
    pub correctable: bool,
    #[serde(skip)]
    pub corrector: Option<KrausChannel>,
    pub verified_fidelity: Option<f64>,
    pub product_defect: f64,
}

/// Decides whether `ch1` is perfectly correctable on `ρ` and, if so, builds
/// the recovery channel.
///
/// With `|Ψ^{RQE₁'}⟩ = Σ_kl √(λ_k μ_l) |α_k⟩|φ_kl⟩|γ_l⟩` the recovery has
/// operators `A_0 = Π` (projector off the span of the `φ_kl`) and
/// `A_l = Σ_k |β_k⟩⟨φ_kl|`, where `|β_k⟩` are the eigenvectors of `ρ`.
pub fn construct_corrector(rho: &DensityOperator, ch1: &KrausChannel, tol: f64) -> Result<CorrectionResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let deficit = correctability_deficit(rho, ch1)?;
    let joint = rq_and_re_states(rho, ch1)?;
    let product_defect = joint.product_defect();
    if deficit > tol {
        return Ok(CorrectionResult {
            deficit,
            correctable: false,
            corrector: None,
            verified_fidelity: None,
            product_defect,
        });
    }

    let d = rho.dim();
    let (_, weights, system_basis) = states::purify_with_spectrum(&rho.flattened());
    let env_dim = joint.e.dim();
    let env = herm_eig(joint.e.matrix())?;

    // (⟨α_k| ⊗ 1 ⊗ ⟨γ_l|) |Ψ⟩, with α_k the standard basis of R
    let psi = joint.joint.vector();
    let mut relative: Vec<Vec<ComplexVector>> = Vec::new();
    for (l, &mu) in env.eigenvalues.iter().enumerate() {
        if mu <= WEIGHT_CUTOFF {
            continue;
        }
        let gamma = env.eigenvector(l);
        let mut row = Vec::new();
        for (k, &lambda) in weights.iter().enumerate() {
            if lambda <= WEIGHT_CUTOFF {
                continue;
            }
            let scale = (lambda * mu).sqrt();
            let phi = ComplexVector::from_fn(d, |q, _| {
                (0..env_dim)
                    .map(|e| gamma[e].conj() * psi[(k * d + q) * env_dim + e])
                    .sum::<num_complex::Complex64>()
                    / scale
            });
            row.push((k, phi));
        }
        relative.push(row.into_iter().map(|(_, v)| v).collect());
    }

    let flat: Vec<&ComplexVector> = relative.iter().flatten().collect();
    let mut phis = ComplexMatrix::zeros(d, flat.len());
    for (j, v) in flat.iter().enumerate() {
        phis.set_column(j, v);
    }
    let deviation = if flat.len() > d {
        f64::INFINITY
    } else {
        linalg::orthonormality_defect(&phis)
    };
    if deviation > 10.0 * tol {
        return Err(Error::ToleranceInconsistency { deficit, deviation });
    }
    let phis = channels::orthonormalize_columns(&phis);

    let projector_off = linalg::identity(d) - &phis * phis.adjoint();
    let mut operators = vec![projector_off];
    let kept: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] > WEIGHT_CUTOFF).collect();
    let mut col = 0;
    for row in &relative {
        let mut a = ComplexMatrix::zeros(d, d);
        for &k in &kept[..row.len()] {
            a += &system_basis[k] * phis.column(col).adjoint();
            col += 1;
        }
        operators.push(a);
    }
    let corrector = KrausChannel::new(operators)?.pruned();
    let verified = info::entanglement_fidelity(rho, &compose(&corrector, ch1)?)?;
    Ok(CorrectionResult {
        deficit,
        correctable: true,
        corrector: Some(corrector),
        verified_fidelity: Some(verified),
        product_defect,
    })
}

/// `(F_e12, ‖ρ^{Q''} − ρ‖_F)` for `ch2 ∘ ch1`.
pub fn verify_correction(rho: &DensityOperator, ch1: &KrausChannel, ch2: &KrausChannel) -> Result<(f64, f64)> {
    let both = compose(ch2, ch1)?;
    let fidelity = info::entanglement_fidelity(rho, &both)?;
    let restored = apply(&both, rho)?;
    let distance = linalg::frobenius_distance(restored.matrix(), rho.matrix())?;
    Ok((fidelity, distance))
}

/// Random recovery channel: a random projective measurement with a random
/// unitary applied after each outcome.
pub fn random_recovery(dim: usize, seed: u64) -> KrausChannel {
    use rand::Rng;
    let mut rng = random::rng_from_seed(seed);
    let basis = random::unitary(&mut rng, dim);
    let outcomes = rng.random_range(1..=dim);
    // sorted random cut points split the basis into `outcomes` groups
    let mut cuts: Vec<usize> = (1..dim).collect();
    for i in (1..cuts.len()).rev() {
        let j = rng.random_range(0..=i);
        cuts.swap(i, j);
    }
    let mut cuts: Vec<usize> = cuts.into_iter().take(outcomes - 1).collect();
    cuts.sort_unstable();
    let bounds: Vec<usize> = std::iter::once(0).chain(cuts).chain(std::iter::once(dim)).collect();

    let operators = bounds
        .windows(2)
        .map(|w| {
            let block = basis.columns(w[0], w[1] - w[0]);
            let projector = block * block.adjoint();
            random::unitary(&mut rng, dim) * projector
        })
        .collect();
    KrausChannel::new(operators).expect("projective measurement followed by unitaries")
}

/// Highest `F_e12` reached by `trials` random recoveries after `ch1`.
pub fn best_random_recovery(rho: &DensityOperator, ch1: &KrausChannel, trials: usize, seed: u64) -> Result<f64> {
    let mut best: f64 = 0.0;
    for i in 0..trials as u64 {
        let rec = random_recovery(ch1.dim(), seed.wrapping_add(i));
        best = best.max(info::entanglement_fidelity_trace(rho, &compose(&rec, ch1)?)?);
    }
    Ok(best)
}

/// `ρ = (|00⟩⟨00| + |11⟩⟨11|)/2` on two qubits.
pub fn two_qubit_code_state() -> DensityOperator {
    DensityOperator::on_system(linalg::diag(&[0.5, 0.0, 0.0, 0.5])).expect("valid state")
}

/// `{√(1−p)·1, √p·(P ⊗ 1)}` on two qubits for a single-qubit Pauli `P`.
pub fn first_qubit_pauli_channel(pauli: &ComplexMatrix, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParameterOutOfRange { name: "p", value: p });
    }
    KrausChannel::new(vec![
        linalg::identity(4) * c64((1.0 - p).sqrt(), 0.0),
        linalg::kron(pauli, &linalg::identity(2)) * c64(p.sqrt(), 0.0),
    ])
}
