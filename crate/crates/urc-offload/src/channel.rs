//! Success probabilities for payload transmission over Rayleigh block fading
//! with selection diversity, plus the threshold algebra used to turn a
//! reliability target into a power constraint.
//!
//! Two transmission schemes are covered:
//!
//! * time-division (`success_prob_td`): each payload gets its own slot and the
//!   receiver sees no interference;
//! * superposition coding (`success_prob_sc`): payloads are superimposed in a
//!   shared slot and decoded successively in layer order, treating
//!   not-yet-decoded layers as noise.
//!
//! The channel power gain is the best of `diversity` independent unit-mean
//! exponential draws, held constant over a slot.  A transmission succeeds when
//! the instantaneous capacity of the slot covers the payload.  Seeded Monte
//! Carlo estimators of both probabilities are provided as an independent
//! cross-check of the closed forms; they sample per-draw substreams so that
//! estimates are reproducible bit for bit given `(seed, samples)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Numeric floor treated as "no payload" when deciding degenerate cases.
const ZERO_BITS: f64 = 0.0;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("{field} must be positive and finite (got {value})")]
    InvalidParameter { field: &'static str, value: f64 },
    #[error("payload size must be nonnegative and finite (got {value})")]
    InvalidBits { value: f64 },
    #[error("diversity order must be at least 1")]
    InvalidDiversity,
    #[error("conditional reliability target must lie in (0, 1) (got {value})")]
    InvalidTarget { value: f64 },
    #[error("conditional reliability target 1 is unattainable with finite power")]
    UnattainableTarget,
    #[error("layer index {layer} out of range for a {layers}-layer stack")]
    LayerOutOfRange { layer: usize, layers: usize },
}

/// A single point-to-point link: payload, slot, bandwidth, mean SNR at unit
/// transmit power, and selection-diversity order.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkParams {
    bits: f64,
    slot: f64,
    bandwidth: f64,
    snr: f64,
    diversity: u32,
}

impl LinkParams {
    pub fn new(
        bits: f64,
        slot: f64,
        bandwidth: f64,
        snr: f64,
        diversity: u32,
    ) -> Result<Self, ChannelError> {
        if !bits.is_finite() || bits < 0.0 {
            return Err(ChannelError::InvalidBits { value: bits });
        }
        check_positive("slot", slot)?;
        check_positive("bandwidth", bandwidth)?;
        check_positive("snr", snr)?;
        if diversity == 0 {
            return Err(ChannelError::InvalidDiversity);
        }
        Ok(Self {
            bits,
            slot,
            bandwidth,
            snr,
            diversity,
        })
    }

    pub fn bits(&self) -> f64 {
        self.bits
    }

    pub fn slot(&self) -> f64 {
        self.slot
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn diversity(&self) -> u32 {
        self.diversity
    }

    /// SNR threshold the fading gain times `snr * power` must clear:
    /// `2^(bits / (slot * bandwidth)) - 1`.
    pub fn snr_threshold(&self) -> f64 {
        snr_threshold(self.bits, self.slot, self.bandwidth)
    }
}

/// A superposition-coded slot: one shared gain, one slot duration, and a
/// vector of layer powers decoded in index order (layer 0 first).  While a
/// layer is decoded, all later layers act as noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ScLayerStack {
    bits: Vec<f64>,
    powers: Vec<f64>,
    slot: f64,
    bandwidth: f64,
    snr: f64,
    diversity: u32,
}

impl ScLayerStack {
    pub fn new(
        bits: Vec<f64>,
        powers: Vec<f64>,
        slot: f64,
        bandwidth: f64,
        snr: f64,
        diversity: u32,
    ) -> Result<Self, ChannelError> {
        if bits.len() != powers.len() {
            return Err(ChannelError::LayerOutOfRange {
                layer: bits.len().max(powers.len()),
                layers: bits.len().min(powers.len()),
            });
        }
        for &b in &bits {
            if !b.is_finite() || b < 0.0 {
                return Err(ChannelError::InvalidBits { value: b });
            }
        }
        for &p in &powers {
            if !p.is_finite() || p < 0.0 {
                return Err(ChannelError::InvalidParameter {
                    field: "layer power",
                    value: p,
                });
            }
        }
        check_positive("slot", slot)?;
        check_positive("bandwidth", bandwidth)?;
        check_positive("snr", snr)?;
        if diversity == 0 {
            return Err(ChannelError::InvalidDiversity);
        }
        Ok(Self {
            bits,
            powers,
            slot,
            bandwidth,
            snr,
            diversity,
        })
    }

    pub fn layers(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[f64] {
        &self.bits
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn slot(&self) -> f64 {
        self.slot
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn diversity(&self) -> u32 {
        self.diversity
    }
}

fn check_positive(field: &'static str, value: f64) -> Result<(), ChannelError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(ChannelError::InvalidParameter { field, value });
    }
    Ok(())
}

/// `2^(bits/(slot*bandwidth)) - 1`, evaluated as `expm1` for small exponents.
pub fn snr_threshold(bits: f64, slot: f64, bandwidth: f64) -> f64 {
    let ratio = bits / (slot * bandwidth);
    (core::f64::consts::LN_2 * ratio).exp_m1()
}

/// Success probability `1 - (1 - e^(-z))^d` where `z` is the ratio of the SNR
/// threshold to the effective received SNR.
fn prob_from_ratio(z: f64, diversity: u32) -> f64 {
    let branch_outage = -(-z).exp_m1();
    1.0 - branch_outage.powi(diversity as i32)
}

/// Probability that a dedicated-slot transmission at `power` delivers the
/// payload.  Returns 1 for an empty payload and 0 for zero power with a
/// nonempty payload.
pub fn success_prob_td(link: &LinkParams, power: f64) -> f64 {
    if link.bits <= ZERO_BITS {
        return 1.0;
    }
    if power <= 0.0 {
        return 0.0;
    }
    let z = link.snr_threshold() / (link.snr * power);
    prob_from_ratio(z, link.diversity)
}

/// Probability that layer `layer` of a superposition-coded slot is decoded,
/// conditioned on all earlier layers having been stripped.  Later layers act
/// as noise; when the layer power cannot overcome that interference even with
/// unbounded gain the probability is 0.
pub fn success_prob_sc(stack: &ScLayerStack, layer: usize) -> Result<f64, ChannelError> {
    if layer >= stack.layers() {
        return Err(ChannelError::LayerOutOfRange {
            layer,
            layers: stack.layers(),
        });
    }
    if stack.bits[layer] <= ZERO_BITS {
        return Ok(1.0);
    }
    let x = snr_threshold(stack.bits[layer], stack.slot, stack.bandwidth);
    let interference: f64 = stack.powers[layer + 1..].iter().sum();
    let denom = stack.snr * stack.powers[layer] - x * (stack.snr * interference);
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok(prob_from_ratio(x / denom, stack.diversity))
}

/// The largest admissible ratio `snr_threshold / (snr * power)` that still
/// meets a conditional per-link reliability target: the constraint
/// `success_prob >= sqrt(target)` is equivalent to `ratio <= threshold`.
pub fn reliability_threshold(
    conditional_target: f64,
    diversity: u32,
) -> Result<f64, ChannelError> {
    if diversity == 0 {
        return Err(ChannelError::InvalidDiversity);
    }
    if !conditional_target.is_finite() || conditional_target <= 0.0 {
        return Err(ChannelError::InvalidTarget {
            value: conditional_target,
        });
    }
    if conditional_target >= 1.0 {
        return Err(ChannelError::UnattainableTarget);
    }
    let sqrt_target = conditional_target.sqrt();
    // 1 - sqrt(r) computed without cancellation for targets close to 1.
    let one_minus_sqrt = (1.0 - conditional_target) / (1.0 + sqrt_target);
    let branch_outage = one_minus_sqrt.powf(1.0 / f64::from(diversity));
    Ok(-(-branch_outage).ln_1p())
}

/// Minimum transmit power meeting the conditional reliability target on a
/// dedicated slot.  Zero payloads need no power.
pub fn min_power_td(link: &LinkParams, conditional_target: f64) -> Result<f64, ChannelError> {
    if link.bits <= ZERO_BITS {
        return Ok(0.0);
    }
    let threshold = reliability_threshold(conditional_target, link.diversity)?;
    Ok(link.snr_threshold() / (link.snr * threshold))
}

/// Componentwise-minimal layer powers meeting per-layer conditional targets on
/// a shared slot.  Computed back to front: the last layer sees no
/// interference, each earlier layer must overcome the (already minimal)
/// powers decoded after it.
pub fn min_powers_sc(
    bits: &[f64],
    slot: f64,
    bandwidth: f64,
    snr: f64,
    diversity: u32,
    conditional_targets: &[f64],
) -> Result<Vec<f64>, ChannelError> {
    assert_eq!(bits.len(), conditional_targets.len());
    check_positive("slot", slot)?;
    check_positive("bandwidth", bandwidth)?;
    check_positive("snr", snr)?;
    let mut powers = vec![0.0; bits.len()];
    let mut tail_sum = 0.0;
    for i in (0..bits.len()).rev() {
        if bits[i] <= ZERO_BITS {
            powers[i] = 0.0;
            continue;
        }
        let threshold = reliability_threshold(conditional_targets[i], diversity)?;
        let x = snr_threshold(bits[i], slot, bandwidth);
        powers[i] = x / (snr * threshold) + x * tail_sum;
        tail_sum += powers[i];
    }
    Ok(powers)
}

/// A Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_successes(successes: u64, samples: u64) -> Self {
        let estimate = successes as f64 / samples as f64;
        let std_error = (estimate * (1.0 - estimate) / samples as f64).sqrt();
        Self {
            estimate,
            std_error,
            samples,
        }
    }
}

pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One independent substream per sample so that the gain seen by sample `i`
/// does not depend on how many draws other samples consumed.  This makes the
/// estimator reproducible and lets different diversity orders share draws.
fn sample_rng(seed: u64, sample: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed ^ mix64(sample)))
}

/// Best-of-`diversity` unit-mean exponential gain.
fn selection_gain(rng: &mut ChaCha8Rng, diversity: u32) -> f64 {
    let mut best = 0.0_f64;
    for _ in 0..diversity {
        let u: f64 = rng.gen();
        let draw = -(-u).ln_1p();
        if draw > best {
            best = draw;
        }
    }
    best
}

/// Monte Carlo estimate of `success_prob_td`: counts samples whose slot
/// capacity `slot * bandwidth * log2(1 + gain * snr * power)` covers the
/// payload.
pub fn mc_estimate_td(link: &LinkParams, power: f64, samples: u64, seed: u64) -> McEstimate {
    assert!(samples > 0);
    let mut successes = 0_u64;
    for i in 0..samples {
        let mut rng = sample_rng(seed, i);
        let gain = selection_gain(&mut rng, link.diversity);
        let rate = link.slot * link.bandwidth * (1.0 + gain * link.snr * power).log2();
        if rate >= link.bits {
            successes += 1;
        }
    }
    McEstimate::from_successes(successes, samples)
}

/// Monte Carlo estimate of `success_prob_sc` for one layer.  A single gain is
/// drawn per sample and shared by all layers of the slot; the layer succeeds
/// when its SINR-based capacity covers its payload.
pub fn mc_estimate_sc(
    stack: &ScLayerStack,
    layer: usize,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, ChannelError> {
    if layer >= stack.layers() {
        return Err(ChannelError::LayerOutOfRange {
            layer,
            layers: stack.layers(),
        });
    }
    assert!(samples > 0);
    let interference: f64 = stack.powers[layer + 1..].iter().sum();
    let mut successes = 0_u64;
    for i in 0..samples {
        let mut rng = sample_rng(seed, i);
        let gain = selection_gain(&mut rng, stack.diversity);
        let sinr =
            gain * stack.snr * stack.powers[layer] / (1.0 + gain * stack.snr * interference);
        let rate = stack.slot * stack.bandwidth * (1.0 + sinr).log2();
        if rate >= stack.bits[layer] {
            successes += 1;
        }
    }
    Ok(McEstimate::from_successes(successes, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BASE_BITS: f64 = 1.4e5;
    const BASE_BW: f64 = 1.0e6;

    fn base_link(diversity: u32) -> LinkParams {
        LinkParams::new(BASE_BITS, 1.0, BASE_BW, 1.0, diversity).unwrap()
    }

    #[test]
    fn snr_threshold_matches_reference_value() {
        let x = base_link(1).snr_threshold();
        assert!((x - 0.101905115876611).abs() < 1e-12, "x = {x}");
    }

    #[test]
    fn success_prob_td_reference_values() {
        let p1 = success_prob_td(&base_link(1), 1.0);
        assert!((p1 - 0.903115238901396).abs() < 1e-12, "d=1: {p1}");
        let p2 = success_prob_td(&base_link(2), 1.0);
        assert!((p2 - 0.990613343066866).abs() < 1e-12, "d=2: {p2}");
    }

    #[test]
    fn zero_bits_always_succeed() {
        let link = LinkParams::new(0.0, 1.0, BASE_BW, 1.0, 2).unwrap();
        assert_eq!(success_prob_td(&link, 0.0), 1.0);
        assert_eq!(success_prob_td(&link, 5.0), 1.0);
    }

    #[test]
    fn zero_power_fails_nonempty_payload() {
        assert_eq!(success_prob_td(&base_link(2), 0.0), 0.0);
    }

    #[test]
    fn diversity_identity_holds() {
        for d in 2..=4_u32 {
            let p1 = success_prob_td(&base_link(1), 0.8);
            let pd = success_prob_td(&base_link(d), 0.8);
            let expected = 1.0 - (1.0 - p1).powi(d as i32);
            assert!(
                (pd - expected).abs() < 1e-14,
                "d={d}: {pd} vs {expected}"
            );
        }
    }

    #[test]
    fn invalid_link_parameters_rejected() {
        assert!(LinkParams::new(1.0, 0.0, BASE_BW, 1.0, 1).is_err());
        assert!(LinkParams::new(1.0, 1.0, -1.0, 1.0, 1).is_err());
        assert!(LinkParams::new(1.0, 1.0, BASE_BW, 0.0, 1).is_err());
        assert!(LinkParams::new(1.0, 1.0, BASE_BW, 1.0, 0).is_err());
        assert!(LinkParams::new(-1.0, 1.0, BASE_BW, 1.0, 1).is_err());
    }

    #[test]
    fn sc_reference_values() {
        let stack = ScLayerStack::new(
            vec![BASE_BITS, BASE_BITS],
            vec![2.0, 1.0],
            1.0,
            BASE_BW,
            1.0,
            1,
        )
        .unwrap();
        let p0 = success_prob_sc(&stack, 0).unwrap();
        assert!((p0 - 0.947727652705828).abs() < 1e-12, "layer 0: {p0}");
        let p1 = success_prob_sc(&stack, 1).unwrap();
        assert!((p1 - 0.903115238901396).abs() < 1e-12, "layer 1: {p1}");
    }

    #[test]
    fn sc_undecodable_layer_has_zero_probability() {
        let stack = ScLayerStack::new(
            vec![BASE_BITS, BASE_BITS],
            vec![0.1, 1.0],
            1.0,
            BASE_BW,
            1.0,
            1,
        )
        .unwrap();
        assert_eq!(success_prob_sc(&stack, 0).unwrap(), 0.0);
    }

    #[test]
    fn sc_single_layer_matches_td_bit_for_bit() {
        for d in 1..=3_u32 {
            for &power in &[0.3, 1.0, 2.7] {
                let stack =
                    ScLayerStack::new(vec![BASE_BITS], vec![power], 1.0, BASE_BW, 1.0, d).unwrap();
                let sc = success_prob_sc(&stack, 0).unwrap();
                let td = success_prob_td(&base_link(d), power);
                assert_eq!(sc.to_bits(), td.to_bits());
            }
        }
    }

    #[test]
    fn threshold_reference_values() {
        let c2 = reliability_threshold(0.99, 2).unwrap();
        assert!((c2 - 0.0734306920546615).abs() < 1e-12, "c = {c2}");
        let c1 = reliability_threshold(0.99, 1).unwrap();
        assert!((c1 - 0.00502516792675072).abs() < 1e-12, "c = {c1}");
    }

    #[test]
    fn threshold_round_trips_through_success_probability() {
        for &target in &[0.9, 0.99, 0.995] {
            for d in 1..=3_u32 {
                let c = reliability_threshold(target, d).unwrap();
                let rho = prob_from_ratio(c, d);
                assert!(
                    (rho - target.sqrt()).abs() < 1e-12,
                    "target {target} d {d}: {rho}"
                );
            }
        }
    }

    #[test]
    fn threshold_grows_with_diversity() {
        let mut prev = 0.0;
        for d in 1..=6_u32 {
            let c = reliability_threshold(0.99, d).unwrap();
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn threshold_rejects_degenerate_targets() {
        assert_eq!(
            reliability_threshold(1.0, 2),
            Err(ChannelError::UnattainableTarget)
        );
        assert!(reliability_threshold(0.0, 2).is_err());
        assert!(reliability_threshold(-0.5, 2).is_err());
        assert!(reliability_threshold(1.5, 2).is_err());
    }

    #[test]
    fn min_power_reference_value_and_round_trip() {
        let p = min_power_td(&base_link(2), 0.99).unwrap();
        assert!((p - 1.38777278308576).abs() < 1e-9, "p = {p}");
        let rho = success_prob_td(&base_link(2), p);
        assert!((rho - 0.99_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn min_power_zero_payload_is_zero() {
        let link = LinkParams::new(0.0, 1.0, BASE_BW, 1.0, 2).unwrap();
        assert_eq!(min_power_td(&link, 0.99).unwrap(), 0.0);
    }

    #[test]
    fn doubling_slot_strictly_lowers_min_power() {
        let short = base_link(2);
        let long = LinkParams::new(BASE_BITS, 2.0, BASE_BW, 1.0, 2).unwrap();
        let p_short = min_power_td(&short, 0.99).unwrap();
        let p_long = min_power_td(&long, 0.99).unwrap();
        assert!(p_long < p_short);
    }

    #[test]
    fn min_powers_sc_meet_their_targets_exactly() {
        let bits = [BASE_BITS, 2.8e5, BASE_BITS];
        let targets = [0.99, 0.95, 0.9];
        let powers = min_powers_sc(&bits, 1.0, BASE_BW, 1.0, 2, &targets).unwrap();
        let stack =
            ScLayerStack::new(bits.to_vec(), powers.clone(), 1.0, BASE_BW, 1.0, 2).unwrap();
        for (i, &target) in targets.iter().enumerate() {
            let rho = success_prob_sc(&stack, i).unwrap();
            assert!(
                (rho - target.sqrt()).abs() < 1e-9,
                "layer {i}: {rho} vs {}",
                target.sqrt()
            );
        }
        // Later layers interfere with earlier ones, so the first layer pays
        // more than it would alone.
        let solo = min_power_td(&base_link(2), 0.99).unwrap();
        assert!(powers[0] > solo);
    }

    #[test]
    fn mc_td_agrees_with_closed_form() {
        let link = base_link(2);
        let est = mc_estimate_td(&link, 1.0, 100_000, 7);
        let exact = success_prob_td(&link, 1.0);
        assert!(
            (est.estimate - exact).abs() <= 3.0 * est.std_error,
            "estimate {} exact {} se {}",
            est.estimate,
            exact,
            est.std_error
        );
    }

    #[test]
    fn mc_is_deterministic_given_seed() {
        let link = base_link(3);
        let a = mc_estimate_td(&link, 0.9, 20_000, 42);
        let b = mc_estimate_td(&link, 0.9, 20_000, 42);
        assert_eq!(a, b);
        // Binomial means over 20k samples can collide across seeds, so seed
        // sensitivity is checked on the substreams themselves.
        use rand::RngCore;
        for sample in [0, 1, 19_999] {
            assert_ne!(
                sample_rng(42, sample).next_u64(),
                sample_rng(43, sample).next_u64()
            );
        }
    }

    #[test]
    fn mc_zero_power_estimates_zero() {
        let est = mc_estimate_td(&base_link(2), 0.0, 10_000, 1);
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn mc_diversity_dominates_with_shared_draws() {
        let link1 = base_link(1);
        let link3 = base_link(3);
        let e1 = mc_estimate_td(&link1, 0.7, 50_000, 11);
        let e3 = mc_estimate_td(&link3, 0.7, 50_000, 11);
        assert!(e3.estimate >= e1.estimate);
    }

    #[test]
    fn mc_sc_single_layer_matches_mc_td_bit_for_bit() {
        let link = base_link(2);
        let stack = ScLayerStack::new(vec![BASE_BITS], vec![1.3], 1.0, BASE_BW, 1.0, 2).unwrap();
        let td = mc_estimate_td(&link, 1.3, 30_000, 5);
        let sc = mc_estimate_sc(&stack, 0, 30_000, 5).unwrap();
        assert_eq!(td, sc);
    }

    #[test]
    fn mc_sc_undecodable_layer_estimates_zero() {
        let stack = ScLayerStack::new(
            vec![BASE_BITS, BASE_BITS],
            vec![0.1, 1.0],
            1.0,
            BASE_BW,
            1.0,
            2,
        )
        .unwrap();
        let est = mc_estimate_sc(&stack, 0, 10_000, 3).unwrap();
        assert_eq!(est.estimate, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig {
            cases: 128,
            failure_persistence: None,
            .. ProptestConfig::default()
        })]

        #[test]
        fn success_prob_monotone_in_power_and_slot(
            bits in 1.0e4..5.0e5_f64,
            slot in 0.05..4.0_f64,
            snr in 0.25..4.0_f64,
            power in 0.05..8.0_f64,
            d in 1..4_u32,
        ) {
            let link = LinkParams::new(bits, slot, BASE_BW, snr, d).unwrap();
            let p = success_prob_td(&link, power);
            prop_assert!((0.0..=1.0).contains(&p));

            let more_power = success_prob_td(&link, power * 1.5);
            prop_assert!(more_power >= p - 1e-15);

            let longer = LinkParams::new(bits, slot * 1.5, BASE_BW, snr, d).unwrap();
            prop_assert!(success_prob_td(&longer, power) >= p - 1e-15);

            let heavier = LinkParams::new(bits * 1.5, slot, BASE_BW, snr, d).unwrap();
            prop_assert!(success_prob_td(&heavier, power) <= p + 1e-15);
        }

        #[test]
        fn diversity_identity_random(
            bits in 1.0e4..5.0e5_f64,
            slot in 0.05..4.0_f64,
            power in 0.05..8.0_f64,
            d in 2..5_u32,
        ) {
            let link1 = LinkParams::new(bits, slot, BASE_BW, 1.0, 1).unwrap();
            let linkd = LinkParams::new(bits, slot, BASE_BW, 1.0, d).unwrap();
            let p1 = success_prob_td(&link1, power);
            let pd = success_prob_td(&linkd, power);
            let expected = 1.0 - (1.0 - p1).powi(d as i32);
            prop_assert!((pd - expected).abs() < 1e-9);
        }

        #[test]
        fn min_power_round_trip_random(
            target in 0.5..0.9999_f64,
            bits in 1.0e4..5.0e5_f64,
            slot in 0.05..4.0_f64,
            d in 1..4_u32,
        ) {
            let link = LinkParams::new(bits, slot, BASE_BW, 1.0, d).unwrap();
            let p = min_power_td(&link, target).unwrap();
            let rho = success_prob_td(&link, p);
            prop_assert!((rho - target.sqrt()).abs() < 1e-9);
        }
    }
}
