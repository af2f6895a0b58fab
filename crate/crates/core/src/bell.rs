//! Bell's spin toy model: a four-component spin register with no
//! spatial beable of its own, coupled to a single pointer coordinate
//! `y` through the impulsive interaction `H = -i g (Z ⊗ 1) ∂/∂y`.
//!
//! Gates act on the register alone; the pointer wave packet (and with
//! it the ensemble) stays frozen until the measurement era, during
//! which each register component's packet rigidly translates with
//! velocity `± g` set by the data qubit's Z eigenvalue.

use std::cell::RefCell;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, CMat};
use crate::qubit::{
    compile_circuit, deutsch_circuit, evolve_register, pauli_z, GateTimings, HamiltonianSchedule,
    OracleFunction, RegisterState,
};
use crate::trajectories::{
    integrate_ensemble, sample_initial, Ensemble, FieldError, Flow, IntegratorConfig, Marginal1D,
    Point, SamplerSpec,
};

/// Gaussian pointer packet: `|φ|²` is a normal density with standard
/// deviation `sigma`; `shift_rate` is the rigid translation velocity of
/// this component during the measurement coupling (0 outside it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerPacket {
    pub center: f64,
    pub sigma: f64,
    pub shift_rate: f64,
}

impl PointerPacket {
    pub fn new(center: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidConfig { reason: format!("packet width must be positive, got {sigma}") });
        }
        Ok(Self { center, sigma, shift_rate: 0.0 })
    }

    /// `|φ(y)|²`, normalized to unit mass.
    pub fn density(&self, y: f64) -> f64 {
        let z = (y - self.center) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    /// Probability mass on the interval `[a, b]`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        0.5 * (erf((b - self.center) / (self.sigma * std::f64::consts::SQRT_2))
            - erf((a - self.center) / (self.sigma * std::f64::consts::SQRT_2)))
    }
}

/// Abramowitz-Stegun 7.1.26; |error| < 1.5e-7, used only for reporting
/// bin masses, never for dynamics.
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

/// The pointer position — the only beable of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellConfiguration {
    pub y: f64,
}

/// Impulsive Z-measurement coupling `H = -i g (Z ⊗ 1) ∂/∂y`.
#[derive(Debug, Clone, Copy)]
pub struct MeasurementCoupling {
    pub g: f64,
    pub duration: f64,
}

impl MeasurementCoupling {
    pub fn new(g: f64, duration: f64) -> Result<Self> {
        if g == 0.0 {
            return Err(Error::InvalidConfig { reason: "coupling strength g must be nonzero".into() });
        }
        if !(duration > 0.0) {
            return Err(Error::NonPositiveDuration { value: duration });
        }
        Ok(Self { g, duration })
    }

    /// Measured operator `Z ⊗ 1`.
    pub fn operator(&self) -> CMat {
        kron(&pauli_z(), &identity(2))
    }
}

/// Register plus one pointer packet per component `(mn)`. Before the
/// measurement all packets are identical (the factorized form
/// `ψ_mn(y,t) = φ₀(y) r_mn(t)`).
#[derive(Debug, Clone)]
pub struct BellState {
    register: RegisterState,
    packets: Vec<PointerPacket>,
}

impl BellState {
    /// Factorized initial state: every component shares `packet`.
    pub fn factorized(register: RegisterState, packet: PointerPacket) -> Result<Self> {
        if register.dim() != 4 {
            return Err(Error::BadDimension { dim: register.dim() });
        }
        Ok(Self { register, packets: vec![packet; 4] })
    }

    pub fn register(&self) -> &RegisterState {
        &self.register
    }

    pub fn packets(&self) -> &[PointerPacket] {
        &self.packets
    }

    pub fn with_register(&self, register: RegisterState) -> Result<Self> {
        if register.dim() != 4 {
            return Err(Error::BadDimension { dim: register.dim() });
        }
        Ok(Self { register, packets: self.packets.clone() })
    }

    /// Total norm: Σ_mn |r_mn|² ∫|φ_mn|² dy (each packet has unit mass).
    pub fn norm(&self) -> f64 {
        self.register.norm()
    }

    /// Full configuration-space density Σ_mn |ψ_mn(y)|².
    pub fn density(&self, y: f64) -> f64 {
        self.register
            .amplitudes()
            .iter()
            .zip(&self.packets)
            .map(|(r, p)| r.norm_sqr() * p.density(y))
            .sum()
    }
}

/// Z eigenvalue of the data qubit for component index `(mn)`.
fn z_eigenvalue(component: usize) -> f64 {
    if component < 2 {
        1.0
    } else {
        -1.0
    }
}

/// Translate each component's packet by `z_m g t` and switch on the
/// shift rates; register amplitudes are untouched.
pub fn apply_measurement(
    state: &BellState,
    coupling: &MeasurementCoupling,
    t: f64,
) -> Result<BellState> {
    if t < 0.0 || t > coupling.duration + 1e-12 {
        return Err(Error::TimeOutOfRange { t, total: coupling.duration });
    }
    let packets = state
        .packets
        .iter()
        .enumerate()
        .map(|(idx, p)| {
            let z = z_eigenvalue(idx);
            PointerPacket { center: p.center + z * coupling.g * t, sigma: p.sigma, shift_rate: z * coupling.g }
        })
        .collect();
    Ok(BellState { register: state.register.clone(), packets })
}

/// Guidance velocity of the pointer at `y`:
/// `j/ρ = Σ_mn shift_mn |ψ_mn(y)|² / Σ_mn |ψ_mn(y)|²`.
///
/// With all shift rates zero (before the measurement) this is exactly 0
/// regardless of `y`. Inside the coupling a query in a node region
/// (total density below `node_eps`) is flagged so the integrator can
/// refine; with a definite data state the rate is `±g` independent of y.
pub fn pointer_velocity(state: &BellState, y: f64, node_eps: f64) -> Result<f64> {
    if state.packets.iter().all(|p| p.shift_rate == 0.0) {
        return Ok(0.0);
    }
    let mut flux = 0.0;
    let mut rho = 0.0;
    for (r, p) in state.register.amplitudes().iter().zip(&state.packets) {
        let w = r.norm_sqr() * p.density(y);
        flux += w * p.shift_rate;
        rho += w;
    }
    if rho < node_eps {
        // tails where every packet underflows: fall back to amplitude
        // weights, exact whenever a single data eigenvalue carries all
        // of the norm
        let weights: Vec<f64> =
            state.register.amplitudes().iter().map(|r| r.norm_sqr()).collect();
        let up: f64 = weights[0] + weights[1];
        let down: f64 = weights[2] + weights[3];
        if up < 1e-15 || down < 1e-15 {
            let g = state.packets[0].shift_rate.abs();
            return Ok(if up >= down { g } else { -g });
        }
        return Err(Error::NodeEncounter { trajectory: usize::MAX, t: f64::NAN });
    }
    Ok(flux / rho)
}

/// Pointer velocity at elapsed coupling time `t`: advances the packets
/// first, so `t = 0` recovers the pre-measurement statics.
pub fn pointer_velocity_at(
    state: &BellState,
    coupling: &MeasurementCoupling,
    y: f64,
    t: f64,
    node_eps: f64,
) -> Result<f64> {
    let advanced = apply_measurement(state, coupling, t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    pointer_velocity(&advanced, y, node_eps)
}

/// Velocity-field view for the same computation, used by the integrator.
fn pointer_velocity_flagged(state: &BellState, y: f64, node_eps: f64) -> std::result::Result<f64, FieldError> {
    match pointer_velocity(state, y, node_eps) {
        Ok(v) => Ok(v),
        Err(_) => Err(FieldError::NodeProximity),
    }
}

/// Flow over two eras: the gate schedule (pointer static) followed by
/// the measurement coupling.
pub struct BellFlow {
    initial: BellState,
    schedule_duration: f64,
    coupling: MeasurementCoupling,
    final_register: RegisterState,
    memo: RefCell<Option<(u64, Rc<BellState>)>>,
}

impl BellFlow {
    pub fn new(
        initial: BellState,
        schedule: &HamiltonianSchedule,
        coupling: MeasurementCoupling,
    ) -> Result<Self> {
        let final_register =
            evolve_register(initial.register(), schedule, schedule.total_duration())?;
        Ok(Self {
            schedule_duration: schedule.total_duration(),
            initial,
            coupling,
            final_register,
            memo: RefCell::new(None),
        })
    }

    pub fn measurement_start(&self) -> f64 {
        self.schedule_duration
    }

    fn state_at_measurement(&self, tau: f64) -> Rc<BellState> {
        let key = tau.to_bits();
        if let Some((k, s)) = self.memo.borrow().as_ref() {
            if *k == key {
                return Rc::clone(s);
            }
        }
        let base = BellState {
            register: self.final_register.clone(),
            packets: self.initial.packets.clone(),
        };
        let state =
            Rc::new(apply_measurement(&base, &self.coupling, tau).expect("tau within coupling"));
        *self.memo.borrow_mut() = Some((key, Rc::clone(&state)));
        state
    }
}

impl Flow for BellFlow {
    fn dims(&self) -> usize {
        1
    }

    fn coord_names(&self) -> Vec<&'static str> {
        vec!["y"]
    }

    fn boundaries(&self) -> Vec<f64> {
        vec![0.0, self.schedule_duration, self.schedule_duration + self.coupling.duration]
    }

    fn velocity(
        &self,
        segment: usize,
        t: f64,
        p: &Point,
        node_eps: f64,
    ) -> std::result::Result<Point, FieldError> {
        if segment == 0 {
            // gates act on the register only; j(y) = 0
            return Ok([0.0; 3]);
        }
        let tau = (t - self.schedule_duration).clamp(0.0, self.coupling.duration);
        let state = self.state_at_measurement(tau);
        let v = pointer_velocity_flagged(&state, p[0], node_eps)?;
        Ok([v, 0.0, 0.0])
    }
}

/// Deutsch-run outcome labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Constant,
    Balanced,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Constant => "constant",
            Outcome::Balanced => "balanced",
        }
    }
}

/// Parameters of a Bell-model Deutsch run.
#[derive(Debug, Clone)]
pub struct BellRunParams {
    pub g: f64,
    pub sigma: f64,
    pub delta_t: f64,
    pub n: usize,
    pub seed: u64,
    pub timings: GateTimings,
    pub integrator: IntegratorConfig,
    pub sampler: SamplerSpec,
}

impl Default for BellRunParams {
    fn default() -> Self {
        Self {
            g: 1.0,
            sigma: 0.05,
            delta_t: 1.0,
            n: 100,
            seed: 0,
            timings: GateTimings::default(),
            integrator: IntegratorConfig::default(),
            sampler: SamplerSpec::Equilibrium,
        }
    }
}

/// Everything a Bell run produces.
#[derive(Debug, Clone)]
pub struct BellRunReport {
    pub oracle: OracleFunction,
    pub outcome: Outcome,
    /// Common pointer displacement over the coupling.
    pub displacement: f64,
    pub measurement_start: f64,
    pub ensemble: Ensemble,
    /// Register state after the gate era (the measured wave).
    pub final_register: RegisterState,
    pub params: BellRunParams,
}

/// Run the Deutsch algorithm in Bell's model: evolve `|01⟩` through the
/// compiled schedule (pointer static), then couple the pointer and
/// integrate `n` trajectories sampled from `|φ₀|²`.
pub fn run_deutsch_bell(f: OracleFunction, params: &BellRunParams) -> Result<BellRunReport> {
    if params.n == 0 {
        return Err(Error::InvalidConfig { reason: "need at least one trajectory".into() });
    }
    let coupling = MeasurementCoupling::new(params.g, params.delta_t)?;
    // narrow-packet condition: the two candidate packets must separate
    let displacement_magnitude = (params.g * params.delta_t).abs();
    if displacement_magnitude < 3.0 * params.sigma {
        return Err(Error::AmbiguousReadout {
            displacement: displacement_magnitude,
            threshold: 3.0 * params.sigma,
        });
    }

    let ir = deutsch_circuit(f);
    let schedule = compile_circuit(&ir, &params.timings)?;
    let packet = PointerPacket::new(0.0, params.sigma)?;
    let initial = BellState::factorized(ir.initial_state(), packet)?;

    let marginals = [Marginal1D::Gaussian { center: 0.0, sigma: params.sigma }];
    let support = |p: &Point| initial.density(p[0]);
    let points = sample_initial(
        &params.sampler,
        &marginals,
        Some(&support),
        params.n,
        params.seed,
        params.integrator.node_eps,
    )?;

    let flow = BellFlow::new(initial, &schedule, coupling)?;
    let t_meas = flow.measurement_start();
    let final_register = flow.final_register.clone();
    let ensemble = integrate_ensemble(&points, &flow, &params.integrator)?;

    // all trajectories displace identically; report the mean and check
    let last = ensemble.times.len() - 1;
    let displacements: Vec<f64> = ensemble
        .trajectories
        .iter()
        .map(|tr| tr.points[last][0] - tr.points[0][0])
        .collect();
    let mean = displacements.iter().sum::<f64>() / displacements.len() as f64;
    let spread = displacements
        .iter()
        .map(|d| (d - mean).abs())
        .fold(0.0, f64::max);
    if spread > 1e-9 || mean.abs() < 3.0 * params.sigma {
        return Err(Error::AmbiguousReadout { displacement: mean, threshold: 3.0 * params.sigma });
    }
    let outcome = if mean > 0.0 { Outcome::Constant } else { Outcome::Balanced };

    Ok(BellRunReport {
        oracle: f,
        outcome,
        displacement: mean,
        measurement_start: t_meas,
        ensemble,
        final_register,
        params: params.clone(),
    })
}
