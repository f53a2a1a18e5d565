//! Intrinsic channel quantities: entanglement fidelity, entropy exchange and
//! coherent information, with the quantum Fano and data-processing checks.
//!
//! All entropies are in bits.

use serde::{Deserialize, Serialize};

use crate::channels::{self, apply, compose, extend, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{self, binary_entropy, c64, herm_eig, ComplexMatrix, ComplexVector, SubsystemLayout};
use crate::random;
use crate::states::{self, DensityOperator, Ensemble, PureState};

/// Agreement required between the two entanglement-fidelity routes.
pub const FIDELITY_ROUTE_TOL: f64 = 1e-10;
/// Agreement required between `S(W)` and `S(ρ^{RQ'})`.
pub const ENTROPY_ROUTE_TOL: f64 = 1e-8;
/// Additive slack for single-step inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-9;

fn check_dims(rho: &DensityOperator, ch: &KrausChannel) -> Result<()> {
    if rho.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Density operator over Kraus indices, `W_{μν} = Tr A_μ ρ A_ν†`.
#[derive(Debug, Clone, PartialEq)]
pub struct WMatrix(pub ComplexMatrix);

impl WMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn entropy(&self) -> Result<f64> {
        linalg::von_neumann_entropy(&self.0)
    }
}

pub fn w_matrix(rho: &DensityOperator, ch: &KrausChannel) -> Result<WMatrix> {
    check_dims(rho, ch)?;
    let ops = ch.operators();
    let rho_a: Vec<ComplexMatrix> = ops.iter().map(|a| rho.matrix() * a.adjoint()).collect();
    let m = ops.len();
    let w = ComplexMatrix::from_fn(m, m, |mu, nu| linalg::trace(&(&ops[mu] * &rho_a[nu])));
    Ok(WMatrix((&w + w.adjoint()).unscale(2.0)))
}

/// `Σ_μ |Tr ρ A_μ|²`
pub fn entanglement_fidelity_trace(rho: &DensityOperator, ch: &KrausChannel) -> Result<f64> {
    check_dims(rho, ch)?;
    Ok(ch
        .operators()
        .iter()
        .map(|a| linalg::trace(&(rho.matrix() * a)).norm_sqr())
        .sum())
}

/// `⟨Ψ|ρ^{RQ'}|Ψ⟩` for the canonical purification `|Ψ⟩` of `ρ`.
pub fn entanglement_fidelity_purified(rho: &DensityOperator, ch: &KrausChannel) -> Result<f64> {
    check_dims(rho, ch)?;
    let psi = states::purify(rho);
    let r_dim = psi.dim() / rho.dim();
    let extended = extend(ch, r_dim)?;
    let out = extended.apply_matrix(&linalg::projector(psi.vector()));
    let v = psi.vector();
    Ok((v.adjoint() * out * v)[(0, 0)].re)
}

/// Entanglement fidelity `F_e`.
///
/// Evaluated through both the purification and the trace formula; the two must
/// agree within 1e-10, and the trace-formula value is returned.
pub fn entanglement_fidelity(rho: &DensityOperator, ch: &KrausChannel) -> Result<f64> {
    let by_trace = entanglement_fidelity_trace(rho, ch)?;
    let by_purification = entanglement_fidelity_purified(rho, ch)?;
    if (by_trace - by_purification).abs() > FIDELITY_ROUTE_TOL {
        return Err(Error::Inconsistent {
            quantity: "entanglement fidelity",
            left: by_trace,
            right: by_purification,
        });
    }
    Ok(by_trace.clamp(0.0, 1.0))
}

/// `⟨ψ| $(|ψ⟩⟨ψ|) |ψ⟩`
pub fn pure_state_fidelity(psi: &PureState, ch: &KrausChannel) -> Result<f64> {
    if psi.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: psi.dim(),
        });
    }
    let v = psi.vector();
    Ok(ch
        .operators()
        .iter()
        .map(|a| v.dotc(&(a * v)).norm_sqr())
        .sum())
}

/// `F̄ = Σ_i p_i ⟨ψ_i| $(|ψ_i⟩⟨ψ_i|) |ψ_i⟩`
pub fn average_fidelity(ensemble: &Ensemble, ch: &KrausChannel) -> Result<f64> {
    let mut total = 0.0;
    for (p, psi) in ensemble.members() {
        total += p * pure_state_fidelity(psi, ch)?;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Entropy exchange `S_e = S(W)`, cross-checked against `S(ρ^{RQ'})`.
pub fn entropy_exchange(rho: &DensityOperator, ch: &KrausChannel) -> Result<f64> {
    let by_w = w_matrix(rho, ch)?.entropy()?;
    let by_joint = rq_and_re_states(rho, ch)?.rq.entropy();
    if (by_w - by_joint).abs() > ENTROPY_ROUTE_TOL {
        return Err(Error::Inconsistent {
            quantity: "entropy exchange",
            left: by_w,
            right: by_joint,
        });
    }
    Ok(by_w)
}

/// `I_e = S($(ρ)) − S_e`; may be negative.
pub fn coherent_information(rho: &DensityOperator, ch: &KrausChannel) -> Result<f64> {
    let out = apply(ch, rho)?;
    Ok(out.entropy() - entropy_exchange(rho, ch)?)
}

/// Left side of the quantum Fano inequality, `h(F_e) + (1 − F_e) log₂(d² − 1)`.
///
/// For `d = 1` every channel has `F_e = 1` and the log term is taken as zero.
pub fn fano_bound(fidelity: f64, dim: usize) -> f64 {
    let f = fidelity.clamp(0.0, 1.0);
    let h = binary_entropy(f).expect("clamped probability");
    if dim <= 1 {
        return h;
    }
    let d2 = (dim * dim) as f64;
    h + (1.0 - f) * (d2 - 1.0).log2()
}

/// Scalars describing one channel acting on one input state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub input_entropy: f64,
    pub output_entropy: f64,
    pub entanglement_fidelity: f64,
    pub entropy_exchange: f64,
    pub coherent_information: f64,
    pub fano_lhs: f64,
    pub fano_margin: f64,
}

impl ChannelReport {
    pub fn fano_holds(&self) -> bool {
        self.fano_margin >= -INEQUALITY_SLACK
    }

    /// `I_e ≤ S(ρ)` within slack.
    pub fn coherent_bound_holds(&self) -> bool {
        self.coherent_information <= self.input_entropy + INEQUALITY_SLACK
    }

    /// Ordered `(name, value)` pairs, in declaration order.
    pub fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("input_entropy", self.input_entropy),
            ("output_entropy", self.output_entropy),
            ("entanglement_fidelity", self.entanglement_fidelity),
            ("entropy_exchange", self.entropy_exchange),
            ("coherent_information", self.coherent_information),
            ("fano_lhs", self.fano_lhs),
            ("fano_margin", self.fano_margin),
        ]
    }
}

pub fn report(rho: &DensityOperator, ch: &KrausChannel) -> Result<ChannelReport> {
    check_dims(rho, ch)?;
    let input_entropy = rho.entropy();
    let output_entropy = apply(ch, rho)?.entropy();
    let fe = entanglement_fidelity(rho, ch)?;
    let se = entropy_exchange(rho, ch)?;
    let fano_lhs = fano_bound(fe, ch.dim());
    Ok(ChannelReport {
        input_entropy,
        output_entropy,
        entanglement_fidelity: fe,
        entropy_exchange: se,
        coherent_information: output_entropy - se,
        fano_lhs,
        fano_margin: fano_lhs - se,
    })
}

/// Two-stage bookkeeping for `S(ρ) ≥ I_e1 ≥ I_e12`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpiReport {
    pub input_entropy: f64,
    pub ie_stage1: f64,
    pub ie_both: f64,
    pub se_stage1: f64,
    pub se_both: f64,
}

impl DpiReport {
    /// `S(ρ) ≥ I_e1 − 1e-9` and `I_e1 ≥ I_e12 − 1e-9` (2e-9 overall).
    pub fn chain_holds(&self) -> bool {
        self.input_entropy >= self.ie_stage1 - INEQUALITY_SLACK
            && self.ie_stage1 >= self.ie_both - INEQUALITY_SLACK
            && self.input_entropy >= self.ie_both - 2.0 * INEQUALITY_SLACK
    }

    pub fn fields(&self) -> [(&'static str, f64); 5] {
        [
            ("input_entropy", self.input_entropy),
            ("ie_stage1", self.ie_stage1),
            ("ie_both", self.ie_both),
            ("se_stage1", self.se_stage1),
            ("se_both", self.se_both),
        ]
    }
}

pub fn dpi_report(rho: &DensityOperator, ch1: &KrausChannel, ch2: &KrausChannel) -> Result<DpiReport> {
    check_dims(rho, ch1)?;
    let both = compose(ch2, ch1)?;
    let se_stage1 = entropy_exchange(rho, ch1)?;
    let se_both = entropy_exchange(rho, &both)?;
    let out1 = apply(ch1, rho)?;
    let out12 = apply(&both, rho)?;
    Ok(DpiReport {
        input_entropy: rho.entropy(),
        ie_stage1: out1.entropy() - se_stage1,
        ie_both: out12.entropy() - se_both,
        se_stage1,
        se_both,
    })
}

/// Joint states produced by running a channel's dilation on a purification.
#[derive(Debug, Clone)]
pub struct JointStates {
    /// `|Ψ^{RQE'}⟩` on layout `R ⊗ Q ⊗ E`.
    pub joint: PureState,
    pub rq: DensityOperator,
    pub re: DensityOperator,
    pub r: DensityOperator,
    pub e: DensityOperator,
}

impl JointStates {
    /// `‖ρ^{RE'} − ρ^R ⊗ ρ^{E'}‖_F`
    pub fn product_defect(&self) -> f64 {
        let product = linalg::kron(self.r.matrix(), self.e.matrix());
        (self.re.matrix() - product).norm()
    }
}

/// Purifies `ρ`, evolves `|Ψ^{RQ}⟩ ⊗ |0^E⟩` under `1 ⊗ U` and reduces.
pub fn rq_and_re_states(rho: &DensityOperator, ch: &KrausChannel) -> Result<JointStates> {
    check_dims(rho, ch)?;
    let psi = states::purify(&rho.flattened());
    let dil = channels::to_dilation(ch)?;
    let r_dim = psi.dim() / rho.dim();
    let env_dim = dil.env_dim();

    let mut env0 = ComplexVector::zeros(env_dim);
    env0[0] = c64(1.0, 0.0);
    let start = linalg::kron_vec(psi.vector(), &env0);
    let evolved = linalg::kron(&linalg::identity(r_dim), dil.unitary()) * start;

    let layout = SubsystemLayout::new([("R", r_dim), ("Q", rho.dim()), ("E", env_dim)])?;
    let joint = PureState::new(evolved, layout)?;
    Ok(JointStates {
        rq: joint.reduce(&["R", "Q"])?,
        re: joint.reduce(&["R", "E"])?,
        r: joint.reduce(&["R"])?,
        e: joint.reduce(&["E"])?,
        joint,
    })
}

/// Best value found by [`min_fidelity_search`] and the state attaining it.
#[derive(Debug, Clone)]
pub struct MinFidelity {
    pub value: f64,
    pub state: PureState,
}

const DESCENT_STOP: f64 = 1e-12;
const DESCENT_MAX_ITERS: usize = 20_000;

fn support_fidelity(ops: &[ComplexMatrix], x: &ComplexVector) -> f64 {
    ops.iter().map(|m| x.dotc(&(m * x)).norm_sqr()).sum()
}

/// Riemannian gradient of `Σ_μ |x†M_μx|²` on the unit sphere.
fn support_gradient(ops: &[ComplexMatrix], x: &ComplexVector) -> ComplexVector {
    let mut g = ComplexVector::zeros(x.len());
    for m in ops {
        let c = x.dotc(&(m * x));
        g += m * x * c.conj() + m.adjoint() * x * c;
    }
    let radial = x.dotc(&g);
    g - x * radial
}

fn descend(ops: &[ComplexMatrix], mut x: ComplexVector) -> (f64, ComplexVector) {
    let mut f = support_fidelity(ops, &x);
    let mut step = 0.5;
    let trial_at = |x: &ComplexVector, g: &ComplexVector, t: f64| {
        let y = x - g * c64(t, 0.0);
        let y = y.unscale(y.norm());
        (support_fidelity(ops, &y), y)
    };
    for _ in 0..DESCENT_MAX_ITERS {
        let g = support_gradient(ops, &x);
        if g.norm() < 1e-14 {
            break;
        }
        // backtrack to the first decrease, then keep whichever neighbouring
        // step (halved or doubled) lowers the value further
        let mut t = step;
        let mut best = None;
        while t > 1e-16 {
            let (ft, y) = trial_at(&x, &g, t);
            if ft < f {
                best = Some((ft, y, t));
                break;
            }
            t *= 0.5;
        }
        let Some((mut fb, mut yb, mut tb)) = best else { break };
        for factor in [0.5, 2.0] {
            loop {
                let t = tb * factor;
                if !(1e-16..=1e3).contains(&t) {
                    break;
                }
                let (ft, y) = trial_at(&x, &g, t);
                if ft >= fb {
                    break;
                }
                (fb, yb, tb) = (ft, y, t);
            }
        }
        let improvement = f - fb;
        f = fb;
        x = yb;
        step = tb;
        if improvement < DESCENT_STOP {
            break;
        }
    }
    (f, x)
}

/// Multi-start descent for `min_φ ⟨φ|$(|φ⟩⟨φ|)|φ⟩` over unit vectors in the
/// support of `ρ`.
///
/// The result is an upper bound on the true minimum.
pub fn min_fidelity_search(
    rho: &DensityOperator,
    ch: &KrausChannel,
    restarts: usize,
    seed: u64,
) -> Result<MinFidelity> {
    check_dims(rho, ch)?;
    let restarts = restarts.max(1);
    let spec = herm_eig(rho.matrix())?;
    let rank = spec.rank(linalg::ENTROPY_CUTOFF).max(1);
    let basis = spec.eigenvectors.columns(0, rank).into_owned();
    let reduced: Vec<ComplexMatrix> = ch
        .operators()
        .iter()
        .map(|a| basis.adjoint() * a * &basis)
        .collect();

    let mut rng = random::rng_from_seed(seed);
    let mut best: Option<(f64, ComplexVector)> = None;
    for _ in 0..restarts {
        let x0 = random::unit_vector(&mut rng, rank);
        let (f, x) = descend(&reduced, x0);
        if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
            best = Some((f, x));
        }
    }
    let (value, x) = best.expect("at least one restart");
    let phi = &basis * x;
    let phi = phi.unscale(phi.norm());
    Ok(MinFidelity {
        value: value.clamp(0.0, 1.0),
        state: PureState::on_system(phi)?,
    })
}
