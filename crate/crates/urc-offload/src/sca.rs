//! Successive convex approximation over transmit powers and slot durations
//! for a fixed offload decision.
//!
//! The transmit energy `sum_k P_k * L_k` is bilinear, so each outer round
//! minimizes a partially linearized surrogate with proximal damping, then
//! steps along the resulting direction with a diminishing step size.  Every
//! step is additionally backtracked until the exact constraints hold and the
//! exact energy does not increase, which makes the reported energy trace
//! monotone by construction.  Time-division subproblems carry the exact
//! (jointly convex) reliability constraints; superposition coding replaces
//! the concave interference term by its tangent, an inner approximation that
//! is tight at the expansion point.

use crate::channel;
use crate::kernel::{
    self, ConvexSubproblem, Feasibility, KernelError, KernelOptions, LinearFn, SmoothFn,
};
use crate::model::{
    evaluate, Allocation, Decision, EvalReport, ModelError, ScSlotAccounting, Scenario,
    TransmitMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScaError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Channel(#[from] channel::ChannelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaOptions {
    /// Initial step size along the surrogate direction.
    pub lambda0: f64,
    /// Diminishing-rule rate: `lambda <- lambda * (1 - epsilon * lambda)`.
    pub epsilon: f64,
    /// Proximal weight on slot coordinates, scaled by iterate magnitude.
    pub tau_slot: f64,
    /// Proximal weight on power coordinates, scaled by iterate magnitude.
    pub tau_power: f64,
    pub max_outer_iterations: usize,
    /// Relative iterate-change threshold for convergence.
    pub iterate_tolerance: f64,
    /// Relative energy-decrease threshold for convergence.
    pub energy_tolerance: f64,
    pub kernel: KernelOptions,
}

impl Default for ScaOptions {
    fn default() -> Self {
        Self {
            lambda0: 1.0,
            epsilon: 0.01,
            tau_slot: 1e-3,
            tau_power: 1e-3,
            max_outer_iterations: 500,
            iterate_tolerance: 1e-6,
            energy_tolerance: 1e-8,
            kernel: KernelOptions::default(),
        }
    }
}

pub(crate) fn next_lambda(lambda: f64, epsilon: f64) -> f64 {
    lambda * (1.0 - epsilon * lambda)
}

const LAMBDA_FLOOR: f64 = 1e-6;
const TAU_SCALE_FLOOR: f64 = 1e-3;

/// Variable layout of a subproblem.  Time division gives each offloaded task
/// its own slot pair; superposition coding shares one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct VarMap {
    mode: TransmitMode,
    n_off: usize,
}

impl VarMap {
    pub(crate) fn new(mode: TransmitMode, n_off: usize) -> Self {
        Self { mode, n_off }
    }

    pub(crate) fn dim(&self) -> usize {
        match self.mode {
            TransmitMode::Td => 4 * self.n_off,
            TransmitMode::Sc => 2 * self.n_off + 2,
        }
    }

    pub(crate) fn p_ul(&self, k: usize) -> usize {
        k
    }

    pub(crate) fn p_dl(&self, k: usize) -> usize {
        self.n_off + k
    }

    pub(crate) fn l_ul(&self, k: usize) -> usize {
        match self.mode {
            TransmitMode::Td => 2 * self.n_off + k,
            TransmitMode::Sc => 2 * self.n_off,
        }
    }

    pub(crate) fn l_dl(&self, k: usize) -> usize {
        match self.mode {
            TransmitMode::Td => 3 * self.n_off + k,
            TransmitMode::Sc => 2 * self.n_off + 1,
        }
    }

    pub(crate) fn to_allocation(self, x: &[f64]) -> Allocation {
        let n = self.n_off;
        let p_ul = (0..n).map(|k| x[self.p_ul(k)]).collect();
        let p_dl = (0..n).map(|k| x[self.p_dl(k)]).collect();
        match self.mode {
            TransmitMode::Td => Allocation::Td {
                p_ul,
                p_dl,
                l_ul: (0..n).map(|k| x[self.l_ul(k)]).collect(),
                l_dl: (0..n).map(|k| x[self.l_dl(k)]).collect(),
            },
            TransmitMode::Sc => Allocation::Sc {
                p_ul,
                p_dl,
                l_ul: x[self.l_ul(0)],
                l_dl: x[self.l_dl(0)],
            },
        }
    }
}

/// Linearized transmit energy around the current iterate plus diagonal
/// proximal damping.  The gradient at the iterate equals the exact bilinear
/// energy gradient, and the value at the iterate equals the exact transmit
/// energy.
pub struct EnergySurrogate {
    pairs: Vec<(usize, usize)>,
    iterate: Vec<f64>,
    tau: Vec<f64>,
}

impl EnergySurrogate {
    /// `pairs` lists the `(power index, slot index)` products that make up
    /// the transmit energy; `tau` holds one proximal weight per coordinate.
    pub fn new(iterate: Vec<f64>, pairs: Vec<(usize, usize)>, tau: Vec<f64>) -> Self {
        assert_eq!(iterate.len(), tau.len());
        for &(ip, il) in &pairs {
            assert!(ip < iterate.len() && il < iterate.len());
        }
        Self {
            pairs,
            iterate,
            tau,
        }
    }
}

impl SmoothFn for EnergySurrogate {
    fn dim(&self) -> usize {
        self.iterate.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for &(ip, il) in &self.pairs {
            let (p0, l0) = (self.iterate[ip], self.iterate[il]);
            total += p0 * l0 + l0 * (x[ip] - p0) + p0 * (x[il] - l0);
        }
        for ((xj, base), tau) in x.iter().zip(&self.iterate).zip(&self.tau) {
            let d = xj - base;
            total += 0.5 * tau * d * d;
        }
        total
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for &(ip, il) in &self.pairs {
            g[ip] += self.iterate[il];
            g[il] += self.iterate[ip];
        }
        for j in 0..x.len() {
            g[j] += self.tau[j] * (x[j] - self.iterate[j]);
        }
        g
    }

    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut h = vec![0.0; n * n];
        for j in 0..n {
            h[j * n + j] = self.tau[j];
        }
        h
    }
}

/// Exact time-division reliability constraint
/// `(2^(b / (L W)) - 1) / (snr P) - c <= 0`, jointly convex in `(P, L)` on
/// the positive orthant.
pub struct TdReliability {
    dim: usize,
    i_p: usize,
    i_l: usize,
    /// `bits * ln 2 / bandwidth`, so the SNR threshold is `e^(a / L) - 1`.
    a: f64,
    snr: f64,
    threshold: f64,
}

impl TdReliability {
    /// Constraint over a vector of `dim` variables where `x[i_p]` is the
    /// transmit power and `x[i_l]` the slot duration.
    pub fn new(
        dim: usize,
        i_p: usize,
        i_l: usize,
        bits: f64,
        bandwidth: f64,
        snr: f64,
        threshold: f64,
    ) -> Self {
        Self {
            dim,
            i_p,
            i_l,
            a: bits * core::f64::consts::LN_2 / bandwidth,
            snr,
            threshold,
        }
    }
}

impl SmoothFn for TdReliability {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (p, l) = (x[self.i_p], x[self.i_l]);
        if p <= 0.0 || l <= 0.0 {
            return f64::INFINITY;
        }
        (self.a / l).exp_m1() / (self.snr * p) - self.threshold
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (p, l) = (x[self.i_p], x[self.i_l]);
        let e = (self.a / l).exp();
        let mut g = vec![0.0; self.dim];
        g[self.i_l] = -self.a * e / (l * l * self.snr * p);
        g[self.i_p] = -(e - 1.0) / (self.snr * p * p);
        g
    }

    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let (p, l) = (x[self.i_p], x[self.i_l]);
        let e = (self.a / l).exp();
        let mut h = vec![0.0; self.dim * self.dim];
        let d2l = e * (self.a * self.a / l.powi(4) + 2.0 * self.a / l.powi(3)) / (self.snr * p);
        let dlp = self.a * e / (l * l * self.snr * p * p);
        let d2p = 2.0 * (e - 1.0) / (self.snr * p * p * p);
        h[self.i_l * self.dim + self.i_l] = d2l;
        h[self.i_p * self.dim + self.i_p] = d2p;
        h[self.i_l * self.dim + self.i_p] = dlp;
        h[self.i_p * self.dim + self.i_l] = dlp;
        h
    }
}

/// Superposition-coding reliability constraint for one layer with the
/// concave interference term replaced by its tangent at the expansion
/// iterate.  Upper-bounds the exact constraint everywhere and matches its
/// value and gradient at the expansion point, so feasible points of the
/// surrogate are exactly feasible.
pub struct ScLinearized {
    dim: usize,
    i_p: usize,
    later: Vec<usize>,
    i_l: usize,
    a: f64,
    snr: f64,
    slope: f64,
    lin_const: f64,
}

impl ScLinearized {
    /// Constraint over `dim` variables: `x[i_p]` is the layer power,
    /// `x[later]` the powers of layers decoded afterwards (the interference),
    /// and `x[i_l]` the shared slot.  The tangent is taken where the summed
    /// interference equals `interference0`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dim: usize,
        i_p: usize,
        later: Vec<usize>,
        i_l: usize,
        bits: f64,
        bandwidth: f64,
        snr: f64,
        threshold: f64,
        interference0: f64,
    ) -> Self {
        let denom0 = snr * interference0 + 1.0 / threshold;
        let slope = snr / (denom0 * denom0);
        let lin_const = -1.0 / denom0 - slope * interference0;
        Self {
            dim,
            i_p,
            later,
            i_l,
            a: bits * core::f64::consts::LN_2 / bandwidth,
            snr,
            slope,
            lin_const,
        }
    }
}

impl SmoothFn for ScLinearized {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (p, l) = (x[self.i_p], x[self.i_l]);
        if p <= 0.0 || l <= 0.0 {
            return f64::INFINITY;
        }
        let tail: f64 = self.later.iter().map(|&j| x[j]).sum();
        (self.a / l).exp_m1() / (self.snr * p) + self.slope * tail + self.lin_const
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (p, l) = (x[self.i_p], x[self.i_l]);
        let e = (self.a / l).exp();
        let mut g = vec![0.0; self.dim];
        g[self.i_l] = -self.a * e / (l * l * self.snr * p);
        g[self.i_p] = -(e - 1.0) / (self.snr * p * p);
        for &j in &self.later {
            g[j] += self.slope;
        }
        g
    }

    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let (p, l) = (x[self.i_p], x[self.i_l]);
        let e = (self.a / l).exp();
        let mut h = vec![0.0; self.dim * self.dim];
        let d2l = e * (self.a * self.a / l.powi(4) + 2.0 * self.a / l.powi(3)) / (self.snr * p);
        let dlp = self.a * e / (l * l * self.snr * p * p);
        let d2p = 2.0 * (e - 1.0) / (self.snr * p * p * p);
        h[self.i_l * self.dim + self.i_l] = d2l;
        h[self.i_p * self.dim + self.i_p] = d2p;
        h[self.i_l * self.dim + self.i_p] = dlp;
        h[self.i_p * self.dim + self.i_l] = dlp;
        h
    }
}

/// Exact superposition-coding reliability constraint for one layer,
/// `(2^(b/(L W)) - 1) / (snr P) - 1 / (snr S + 1/c) <= 0` with `S` the
/// summed interference of later layers.  Nonconvex in `S`; [`ScLinearized`]
/// is its tangent majorant.
pub struct ScExact {
    dim: usize,
    i_p: usize,
    later: Vec<usize>,
    i_l: usize,
    a: f64,
    snr: f64,
    threshold: f64,
}

impl ScExact {
    /// Same variable layout as [`ScLinearized::new`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dim: usize,
        i_p: usize,
        later: Vec<usize>,
        i_l: usize,
        bits: f64,
        bandwidth: f64,
        snr: f64,
        threshold: f64,
    ) -> Self {
        Self {
            dim,
            i_p,
            later,
            i_l,
            a: bits * core::f64::consts::LN_2 / bandwidth,
            snr,
            threshold,
        }
    }

    fn denom(&self, x: &[f64]) -> f64 {
        let tail: f64 = self.later.iter().map(|&j| x[j]).sum();
        self.snr * tail + 1.0 / self.threshold
    }
}

impl SmoothFn for ScExact {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let (p, l) = (x[self.i_p], x[self.i_l]);
        if p <= 0.0 || l <= 0.0 {
            return f64::INFINITY;
        }
        (self.a / l).exp_m1() / (self.snr * p) - 1.0 / self.denom(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (p, l) = (x[self.i_p], x[self.i_l]);
        let e = (self.a / l).exp();
        let denom = self.denom(x);
        let mut g = vec![0.0; self.dim];
        g[self.i_l] = -self.a * e / (l * l * self.snr * p);
        g[self.i_p] = -(e - 1.0) / (self.snr * p * p);
        for &j in &self.later {
            g[j] += self.snr / (denom * denom);
        }
        g
    }

    fn hessian(&self, x: &[f64]) -> Vec<f64> {
        let (p, l) = (x[self.i_p], x[self.i_l]);
        let e = (self.a / l).exp();
        let denom = self.denom(x);
        let mut h = vec![0.0; self.dim * self.dim];
        let d2l = e * (self.a * self.a / l.powi(4) + 2.0 * self.a / l.powi(3)) / (self.snr * p);
        let dlp = self.a * e / (l * l * self.snr * p * p);
        let d2p = 2.0 * (e - 1.0) / (self.snr * p * p * p);
        h[self.i_l * self.dim + self.i_l] = d2l;
        h[self.i_p * self.dim + self.i_p] = d2p;
        h[self.i_l * self.dim + self.i_p] = dlp;
        h[self.i_p * self.dim + self.i_l] = dlp;
        let d2s = -2.0 * self.snr * self.snr / (denom * denom * denom);
        for &j in &self.later {
            for &j2 in &self.later {
                h[j * self.dim + j2] += d2s;
            }
        }
        h
    }
}

/// Everything about a decision that the solver needs repeatedly: offloaded
/// task payloads, per-task conditional thresholds, and the slot budget.
struct Instance {
    map: VarMap,
    bits_in: Vec<f64>,
    bits_out: Vec<f64>,
    /// Conditional reliability targets per offloaded task, in layer order.
    conds: Vec<f64>,
    /// SNR thresholds `c` per offloaded task, from the conditional targets.
    thresholds: Vec<f64>,
    budget: f64,
    local_energy: f64,
}

impl Instance {
    fn build(
        scenario: &Scenario,
        decision: &Decision,
        mode: TransmitMode,
    ) -> Result<Self, ScaError> {
        let offloaded = decision.offloaded();
        let tasks = scenario.graph().tasks();
        let conditional = scenario.reliability().conditional();
        let params = scenario.params();
        let mut thresholds = Vec::with_capacity(offloaded.len());
        for &i in &offloaded {
            thresholds.push(channel::reliability_threshold(
                conditional[i],
                params.diversity,
            )?);
        }
        let compute_time = scenario.compute_time(decision);
        Ok(Self {
            map: VarMap::new(mode, offloaded.len()),
            bits_in: offloaded.iter().map(|&i| tasks[i].bits_in).collect(),
            bits_out: offloaded.iter().map(|&i| tasks[i].bits_out).collect(),
            conds: offloaded.iter().map(|&i| conditional[i]).collect(),
            thresholds,
            budget: params.latency_max - compute_time,
            local_energy: scenario.local_compute_energy(decision),
        })
    }

    fn n_off(&self) -> usize {
        self.bits_in.len()
    }

    /// Multiplicity of the shared slot pair in the latency budget.
    fn slot_weight(&self, params: &crate::model::SystemParams) -> f64 {
        match (self.map.mode, params.sc_slot_accounting) {
            (TransmitMode::Td, _) => 1.0,
            (TransmitMode::Sc, ScSlotAccounting::SharedOnce) => 1.0,
            (TransmitMode::Sc, ScSlotAccounting::PerTask) => self.n_off() as f64,
        }
    }

    fn exact_energy(&self, x: &[f64]) -> f64 {
        let mut e = self.local_energy;
        for k in 0..self.n_off() {
            e += x[self.map.p_ul(k)] * x[self.map.l_ul(k)];
        }
        e
    }

    /// Worst signed violation of the exact constraints at `x`; negative
    /// means strictly feasible.  Reliability uses the threshold form
    /// `x/(snr P) - 1/(snr S + 1/c)`, which is exact for both modes (the
    /// interference sum is empty under time division).
    fn exact_violation(&self, params: &crate::model::SystemParams, x: &[f64]) -> f64 {
        let map = &self.map;
        let n = self.n_off();
        let mut worst = f64::NEG_INFINITY;
        let mut slot_total = 0.0;
        for k in 0..n {
            for &idx in &[map.p_ul(k), map.p_dl(k), map.l_ul(k), map.l_dl(k)] {
                worst = worst.max(-x[idx]);
            }
            worst = worst.max(x[map.p_dl(k)] - params.p_max_dl);
        }
        match map.mode {
            TransmitMode::Td => {
                for k in 0..n {
                    slot_total += x[map.l_ul(k)] + x[map.l_dl(k)];
                }
            }
            TransmitMode::Sc => {
                slot_total = self.slot_weight(params) * (x[map.l_ul(0)] + x[map.l_dl(0)]);
            }
        }
        worst = worst.max(slot_total - self.budget);
        for k in 0..n {
            for (bits, bw, snr, p_of, l_of) in [
                (
                    self.bits_in[k],
                    params.bw_ul,
                    params.snr_ul,
                    map.p_ul(k),
                    map.l_ul(k),
                ),
                (
                    self.bits_out[k],
                    params.bw_dl,
                    params.snr_dl,
                    map.p_dl(k),
                    map.l_dl(k),
                ),
            ] {
                if bits <= 0.0 {
                    continue;
                }
                let (p, l) = (x[p_of], x[l_of]);
                if p <= 0.0 || l <= 0.0 {
                    worst = worst.max(f64::INFINITY);
                    continue;
                }
                let xt = channel::snr_threshold(bits, l, bw);
                let interference: f64 = match map.mode {
                    TransmitMode::Td => 0.0,
                    TransmitMode::Sc => {
                        if p_of == map.p_ul(k) {
                            (k + 1..n).map(|j| x[map.p_ul(j)]).sum()
                        } else {
                            (k + 1..n).map(|j| x[map.p_dl(j)]).sum()
                        }
                    }
                };
                let g = xt / (snr * p) - 1.0 / (snr * interference + 1.0 / self.thresholds[k]);
                worst = worst.max(g);
            }
        }
        worst
    }

    fn subproblem(
        &self,
        params: &crate::model::SystemParams,
        iterate: &[f64],
        options: &ScaOptions,
    ) -> ConvexSubproblem {
        let map = self.map;
        let dim = map.dim();
        let n = self.n_off();
        let mut tau = vec![0.0; dim];
        for k in 0..n {
            // Downlink power is absent from the energy, so damping it only
            // slows the climb toward the cap; it gets no proximal term.
            for (idx, base) in [
                (map.p_ul(k), options.tau_power),
                (map.l_ul(k), options.tau_slot),
                (map.l_dl(k), options.tau_slot),
            ] {
                tau[idx] = base * iterate[idx].abs().max(TAU_SCALE_FLOOR);
            }
        }
        let transmit_pairs: Vec<(usize, usize)> =
            (0..n).map(|k| (map.p_ul(k), map.l_ul(k))).collect();
        let objective = Box::new(EnergySurrogate::new(
            iterate.to_vec(),
            transmit_pairs,
            tau,
        ));

        let mut constraints: Vec<Box<dyn SmoothFn>> = Vec::new();
        for k in 0..n {
            for (bits, bw, snr, p_of, l_of, uplink) in [
                (
                    self.bits_in[k],
                    params.bw_ul,
                    params.snr_ul,
                    map.p_ul(k),
                    map.l_ul(k),
                    true,
                ),
                (
                    self.bits_out[k],
                    params.bw_dl,
                    params.snr_dl,
                    map.p_dl(k),
                    map.l_dl(k),
                    false,
                ),
            ] {
                if bits <= 0.0 {
                    continue;
                }
                match map.mode {
                    TransmitMode::Td => constraints.push(Box::new(TdReliability::new(
                        dim,
                        p_of,
                        l_of,
                        bits,
                        bw,
                        snr,
                        self.thresholds[k],
                    ))),
                    TransmitMode::Sc => {
                        let later: Vec<usize> = if uplink {
                            (k + 1..n).map(|j| map.p_ul(j)).collect()
                        } else {
                            (k + 1..n).map(|j| map.p_dl(j)).collect()
                        };
                        let interference0: f64 = later.iter().map(|&j| iterate[j]).sum();
                        constraints.push(Box::new(ScLinearized::new(
                            dim,
                            p_of,
                            later,
                            l_of,
                            bits,
                            bw,
                            snr,
                            self.thresholds[k],
                            interference0,
                        )));
                    }
                }
            }
        }

        let mut latency = vec![0.0; dim];
        let w = self.slot_weight(params);
        for k in 0..n {
            latency[map.l_ul(k)] = w;
            latency[map.l_dl(k)] = w;
        }
        constraints.push(Box::new(LinearFn::new(latency, -self.budget)));

        let lower = vec![Some(0.0); dim];
        let mut upper = vec![None; dim];
        for k in 0..n {
            upper[map.p_dl(k)] = Some(params.p_max_dl);
        }
        ConvexSubproblem::new(dim, objective, constraints).with_bounds(lower, upper)
    }
}

/// Split of the spare slot time left over after the mandatory downlink
/// floors.  The canonical split spends most of the spare on the uplink where
/// slot time buys energy directly; jittered splits are used for restarts.
struct SpareSplit {
    dl_frac: f64,
    ul_frac: f64,
    headroom: f64,
}

impl SpareSplit {
    fn canonical() -> Self {
        Self {
            dl_frac: 0.25,
            ul_frac: 0.70,
            headroom: 1.01,
        }
    }

    fn jittered(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dl_frac = 0.10 + 0.40 * rng.gen::<f64>();
        let remaining = 0.95 - dl_frac;
        let ul_frac = remaining * (0.55 + 0.40 * rng.gen::<f64>());
        let headroom = 1.005 + 0.045 * rng.gen::<f64>();
        Self {
            dl_frac,
            ul_frac,
            headroom,
        }
    }
}

/// Smallest shared downlink slot keeping the componentwise-minimal layer
/// stack under the power cap, found by bisection on the slot length.
fn sc_dl_slot_floor(
    bits: &[f64],
    bandwidth: f64,
    snr: f64,
    diversity: u32,
    targets: &[f64],
    p_max: f64,
    hi: f64,
) -> Result<Option<f64>, ScaError> {
    if bits.iter().all(|&b| b <= 0.0) {
        return Ok(Some(0.0));
    }
    let stack_ok = |slot: f64| -> Result<bool, ScaError> {
        let powers = channel::min_powers_sc(bits, slot, bandwidth, snr, diversity, targets)?;
        Ok(powers.iter().all(|&p| p <= p_max))
    };
    if !stack_ok(hi)? {
        return Ok(None);
    }
    let mut lo = hi;
    while stack_ok(lo)? && lo > 1e-15 {
        lo *= 0.5;
    }
    if lo <= 1e-15 {
        return Ok(Some(lo));
    }
    let mut hi_ok = lo * 2.0;
    let mut lo_bad = lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo_bad + hi_ok);
        if stack_ok(mid)? {
            hi_ok = mid;
        } else {
            lo_bad = mid;
        }
    }
    Ok(Some(hi_ok))
}

/// Analytic strictly feasible starting point, or `None` when the decision is
/// infeasible: not enough slot budget to cover the capped downlink floors.
fn initial_point(
    scenario: &Scenario,
    inst: &Instance,
    split: &SpareSplit,
) -> Result<Option<Vec<f64>>, ScaError> {
    let params = scenario.params();
    let map = inst.map;
    let n = inst.n_off();
    if inst.budget <= 0.0 {
        return Ok(None);
    }
    let mut x = vec![0.0; map.dim()];
    let w = inst.slot_weight(params);
    let zero_p_dl = (1e-6_f64).min(params.p_max_dl * 1e-3);

    match map.mode {
        TransmitMode::Td => {
            let mut floors = vec![0.0; n];
            for (floor, (&bits, &threshold)) in floors
                .iter_mut()
                .zip(inst.bits_out.iter().zip(&inst.thresholds))
            {
                if bits > 0.0 {
                    let a = bits * core::f64::consts::LN_2 / params.bw_dl;
                    *floor = a / (params.snr_dl * threshold * params.p_max_dl).ln_1p();
                }
            }
            let total_floor: f64 = floors.iter().sum();
            if total_floor >= inst.budget {
                return Ok(None);
            }
            let spare = inst.budget - total_floor;
            let n_dl = inst.bits_out.iter().filter(|&&b| b > 0.0).count();
            let n_ul = inst.bits_in.iter().filter(|&&b| b > 0.0).count();
            let tiny_slot = spare * 1e-4 / (2 * n) as f64;
            for k in 0..n {
                x[map.l_dl(k)] = if inst.bits_out[k] > 0.0 {
                    floors[k] + split.dl_frac * spare / n_dl as f64
                } else {
                    tiny_slot
                };
                x[map.l_ul(k)] = if inst.bits_in[k] > 0.0 {
                    split.ul_frac * spare / n_ul as f64
                } else {
                    tiny_slot
                };
            }
            for k in 0..n {
                x[map.p_ul(k)] = if inst.bits_in[k] > 0.0 {
                    let xt = channel::snr_threshold(inst.bits_in[k], x[map.l_ul(k)], params.bw_ul);
                    xt / (params.snr_ul * inst.thresholds[k]) * split.headroom
                } else {
                    1e-6
                };
                x[map.p_dl(k)] = if inst.bits_out[k] > 0.0 {
                    let xt = channel::snr_threshold(inst.bits_out[k], x[map.l_dl(k)], params.bw_dl);
                    let req = xt / (params.snr_dl * inst.thresholds[k]);
                    (req * split.headroom).min(0.5 * (req + params.p_max_dl))
                } else {
                    zero_p_dl
                };
            }
        }
        TransmitMode::Sc => {
            let slot_budget = inst.budget / w;
            let has_ul = inst.bits_in.iter().any(|&b| b > 0.0);
            let hi = if has_ul {
                slot_budget * (1.0 - 1e-6)
            } else {
                slot_budget * (1.0 - 1e-9)
            };
            let floor = match sc_dl_slot_floor(
                &inst.bits_out,
                params.bw_dl,
                params.snr_dl,
                params.diversity,
                &inst.conds,
                params.p_max_dl,
                hi,
            )? {
                Some(f) => f,
                None => return Ok(None),
            };
            let spare = slot_budget - floor;
            if spare <= 0.0 {
                return Ok(None);
            }
            let tiny_slot = spare * 1e-4;
            let has_dl = inst.bits_out.iter().any(|&b| b > 0.0);
            let l_dl = if has_dl {
                floor + split.dl_frac * spare
            } else {
                tiny_slot
            };
            let l_ul = if has_ul {
                split.ul_frac * spare
            } else {
                tiny_slot
            };
            x[map.l_ul(0)] = l_ul;
            x[map.l_dl(0)] = l_dl;
            let ul_stack = channel::min_powers_sc(
                &inst.bits_in,
                l_ul,
                params.bw_ul,
                params.snr_ul,
                params.diversity,
                &inst.conds,
            )?;
            let ul_max = ul_stack.iter().fold(0.0_f64, |m, &p| m.max(p));
            for k in 0..n {
                x[map.p_ul(k)] = if inst.bits_in[k] > 0.0 {
                    ul_stack[k] * split.headroom
                } else {
                    1e-12 * (1.0 + ul_max)
                };
            }
            let dl_stack = channel::min_powers_sc(
                &inst.bits_out,
                l_dl,
                params.bw_dl,
                params.snr_dl,
                params.diversity,
                &inst.conds,
            )?;
            let dl_max = dl_stack.iter().fold(0.0_f64, |m, &p| m.max(p));
            let alpha = if dl_max > 0.0 {
                split
                    .headroom
                    .min(0.5 * (1.0 + params.p_max_dl / dl_max))
            } else {
                1.0
            };
            for k in 0..n {
                x[map.p_dl(k)] = if inst.bits_out[k] > 0.0 {
                    dl_stack[k] * alpha
                } else {
                    (1e-12 * (1.0 + dl_max)).min(zero_p_dl)
                };
            }
        }
    }
    Ok(Some(x))
}

/// Minimal downlink powers for the final slots, replacing whatever interior
/// values the barrier left.  Downlink power does not enter the energy, so
/// this is a pure determinism and reporting cleanup.
fn minimize_dl_powers(
    scenario: &Scenario,
    inst: &Instance,
    x: &mut [f64],
) -> Result<(), ScaError> {
    let params = scenario.params();
    let map = inst.map;
    let n = inst.n_off();
    match map.mode {
        TransmitMode::Td => {
            for k in 0..n {
                x[map.p_dl(k)] = if inst.bits_out[k] > 0.0 {
                    let xt = channel::snr_threshold(inst.bits_out[k], x[map.l_dl(k)], params.bw_dl);
                    xt / (params.snr_dl * inst.thresholds[k])
                } else {
                    0.0
                };
            }
        }
        TransmitMode::Sc => {
            let stack = channel::min_powers_sc(
                &inst.bits_out,
                x[map.l_dl(0)],
                params.bw_dl,
                params.snr_dl,
                params.diversity,
                &inst.conds,
            )?;
            for k in 0..n {
                x[map.p_dl(k)] = stack[k];
            }
        }
    }
    Ok(())
}

/// Result of one converged solve: the allocation, its exact audit, and the
/// accepted-energy trace (non-increasing by construction).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaOutcome {
    pub allocation: Allocation,
    pub energy: f64,
    pub report: EvalReport,
    pub energy_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Outcome of a fixed-decision solve.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum SolveOutcome {
    Solved(ScaOutcome),
    Infeasible,
}

impl SolveOutcome {
    pub fn solved(&self) -> Option<&ScaOutcome> {
        match self {
            SolveOutcome::Solved(o) => Some(o),
            SolveOutcome::Infeasible => None,
        }
    }
}

/// Optimizes powers and slots for a fixed decision and mode.  `jitter_seed`
/// perturbs the starting point for restarts; `None` uses the canonical
/// start.
pub fn sca_solve(
    scenario: &Scenario,
    decision: &Decision,
    mode: TransmitMode,
    options: &ScaOptions,
    jitter_seed: Option<u64>,
) -> Result<SolveOutcome, ScaError> {
    let params = scenario.params();
    if decision.n_offloaded() == 0 {
        let alloc = Allocation::empty(mode);
        let report = evaluate(scenario, decision, &alloc)?;
        if !report.feasible {
            return Ok(SolveOutcome::Infeasible);
        }
        let energy = report.energy;
        return Ok(SolveOutcome::Solved(ScaOutcome {
            allocation: alloc,
            energy,
            report,
            energy_trace: vec![energy],
            iterations: 0,
            converged: true,
        }));
    }

    let inst = Instance::build(scenario, decision, mode)?;
    let split = match jitter_seed {
        None => SpareSplit::canonical(),
        Some(seed) => SpareSplit::jittered(seed),
    };
    let init = match initial_point(scenario, &inst, &split)? {
        Some(x) => x,
        None => return Ok(SolveOutcome::Infeasible),
    };
    debug_assert!(inst.exact_violation(params, &init) < 0.0);

    let anchor = match initial_point(scenario, &inst, &SpareSplit::canonical())? {
        Some(x) => x,
        None => return Ok(SolveOutcome::Infeasible),
    };

    let mut s = init;
    let mut energy = inst.exact_energy(&s);
    let mut trace = vec![energy];
    let mut lambda = options.lambda0;
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..options.max_outer_iterations {
        iterations += 1;
        let sub = inst.subproblem(params, &s, options);
        let start = find_start(&sub, &s, &anchor, &options.kernel)?;
        let start = match start {
            Some(x) => x,
            None => break,
        };
        let sol = kernel::solve(&sub, &start, &options.kernel)?;
        let d: Vec<f64> = sol.x.iter().zip(&s).map(|(a, b)| a - b).collect();

        let mut lam = lambda;
        let mut accepted: Option<(Vec<f64>, f64)> = None;
        while lam >= LAMBDA_FLOOR {
            let cand: Vec<f64> = s.iter().zip(&d).map(|(v, dv)| v + lam * dv).collect();
            if inst.exact_violation(params, &cand) < 0.0 {
                let e_cand = inst.exact_energy(&cand);
                if e_cand <= energy {
                    accepted = Some((cand, e_cand));
                    break;
                }
            }
            lam *= 0.5;
        }

        match accepted {
            None => {
                converged = true;
                break;
            }
            Some((cand, e_cand)) => {
                let step: f64 = cand
                    .iter()
                    .zip(&s)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let base: f64 = s.iter().map(|v| v * v).sum::<f64>().sqrt();
                let rel_it = step / (1.0 + base);
                let rel_en = (energy - e_cand) / energy.abs().max(1e-30);
                s = cand;
                energy = e_cand;
                trace.push(energy);
                if rel_it < options.iterate_tolerance && rel_en < options.energy_tolerance {
                    converged = true;
                    break;
                }
            }
        }
        lambda = next_lambda(lambda, options.epsilon);
    }

    minimize_dl_powers(scenario, &inst, &mut s)?;
    let allocation = inst.map.to_allocation(&s);
    let report = evaluate(scenario, decision, &allocation)?;
    Ok(SolveOutcome::Solved(ScaOutcome {
        energy: report.energy,
        allocation,
        report,
        energy_trace: trace,
        iterations,
        converged,
    }))
}

/// Starting point for the kernel: the iterate when strictly feasible for the
/// subproblem, otherwise a blend toward the anchor, otherwise a phase-I
/// search seeded at the iterate.  `None` means not even phase-I found an
/// interior point.
fn find_start(
    sub: &ConvexSubproblem,
    iterate: &[f64],
    anchor: &[f64],
    kernel_options: &KernelOptions,
) -> Result<Option<Vec<f64>>, ScaError> {
    let strict = |x: &[f64]| -> bool {
        sub.constraints.iter().all(|c| c.value(x) < 0.0)
            && x.iter().zip(&sub.lower).all(|(v, b)| match b {
                Some(lb) => v > lb,
                None => true,
            })
            && x.iter().zip(&sub.upper).all(|(v, b)| match b {
                Some(ub) => v < ub,
                None => true,
            })
    };
    if strict(iterate) {
        return Ok(Some(iterate.to_vec()));
    }
    for alpha in [0.02, 0.05, 0.1, 0.2, 0.5, 1.0] {
        let blended: Vec<f64> = iterate
            .iter()
            .zip(anchor)
            .map(|(v, a)| v + alpha * (a - v))
            .collect();
        if strict(&blended) {
            return Ok(Some(blended));
        }
    }
    match kernel::find_strictly_feasible(sub, iterate, kernel_options)? {
        Feasibility::Feasible(x) => Ok(Some(x)),
        Feasibility::Infeasible { .. } => Ok(None),
    }
}
