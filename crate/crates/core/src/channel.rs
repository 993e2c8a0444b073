//! Corrupting channels and detection statistics.
//!
//! [`ChannelModel::UniformReplacement`] is the model the error bounds are
//! stated for: the received payload is a uniformly random string different
//! from the sent one. The bit-flip channels go beyond that model and are
//! there for comparison.

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::counting::{p1_bound, CountingError, DyadicProbability};
use crate::scheme::{verify, CheckedMessage, DetectionStage, VerificationOutcome};

/// Largest payload [`exhaustive_acceptance`] will enumerate.
pub const EXHAUSTIVE_MAX_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("flip position {position} outside a {len}-bit payload")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("flip position {0} listed twice")]
    DuplicatePosition(usize),
    #[error("cannot flip {count} distinct bits of a {len}-bit payload")]
    TooManyFlips { count: usize, len: usize },
    #[error("channel never changes the payload")]
    NoErrors,
    #[error("flip probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("a 0-bit payload has no other value to be replaced with")]
    EmptyPayload,
    #[error("need at least one trial")]
    NoTrials,
    #[error("payload of {len} bits exceeds the exhaustive limit of {max}")]
    TooLarge { len: usize, max: usize },
    #[error("undetected fraction {undetected}/{total} exceeds 2^-{y}")]
    BoundViolated { undetected: u64, total: u64, y: u64 },
    #[error(transparent)]
    Counting(#[from] CountingError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelModel {
    /// Flip exactly these positions.
    FlipPositions { positions: Vec<usize> },
    /// Flip `count` distinct positions chosen uniformly.
    FlipRandom { count: usize, seed: u64 },
    /// Flip each bit independently with probability `epsilon`.
    BernoulliFlip { epsilon: f64, seed: u64 },
    /// Replace the payload by a uniformly random different string.
    UniformReplacement { seed: u64 },
}

impl ChannelModel {
    fn seed(&self) -> Option<u64> {
        match *self {
            ChannelModel::FlipPositions { .. } => None,
            ChannelModel::FlipRandom { seed, .. }
            | ChannelModel::BernoulliFlip { seed, .. }
            | ChannelModel::UniformReplacement { seed } => Some(seed),
        }
    }

    /// Rejects parameters that cannot apply to an `len`-bit payload, or that
    /// leave it unchanged.
    pub fn validate(&self, len: usize) -> Result<(), ChannelError> {
        match self {
            ChannelModel::FlipPositions { positions } => {
                if positions.is_empty() {
                    return Err(ChannelError::NoErrors);
                }
                let mut seen = vec![false; len];
                for &p in positions {
                    if p >= len {
                        return Err(ChannelError::PositionOutOfRange { position: p, len });
                    }
                    if std::mem::replace(&mut seen[p], true) {
                        return Err(ChannelError::DuplicatePosition(p));
                    }
                }
            }
            ChannelModel::FlipRandom { count, .. } => {
                if *count == 0 {
                    return Err(ChannelError::NoErrors);
                }
                if *count > len {
                    return Err(ChannelError::TooManyFlips { count: *count, len });
                }
            }
            ChannelModel::BernoulliFlip { epsilon, .. } => {
                if !(0.0..=1.0).contains(epsilon) {
                    return Err(ChannelError::BadProbability(*epsilon));
                }
                if *epsilon == 0.0 {
                    return Err(ChannelError::NoErrors);
                }
            }
            ChannelModel::UniformReplacement { .. } => {}
        }
        if len == 0 {
            return Err(ChannelError::EmptyPayload);
        }
        Ok(())
    }
}

/// Independent RNG stream for one trial: same (seed, trial) gives the same
/// draws no matter which thread runs it.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn random_bits(rng: &mut impl Rng, len: usize) -> BitString {
    BitString::new((0..len).map(|_| rng.gen::<bool>()).collect())
}

/// Applies the channel once (trial 0 of its seed).
pub fn corrupt(payload: &BitString, model: &ChannelModel) -> Result<BitString, ChannelError> {
    model.validate(payload.len())?;
    Ok(corrupt_trial(payload, model, 0))
}

/// Output of the channel for trial `trial`. Always differs from `payload`;
/// the Bernoulli channel is conditioned on at least one flip. The model must
/// already be valid for this payload.
pub fn corrupt_trial(payload: &BitString, model: &ChannelModel, trial: u64) -> BitString {
    let len = payload.len();
    let mut rng = model.seed().map(|s| trial_rng(s, trial));
    match model {
        ChannelModel::FlipPositions { positions } => {
            let mut out = payload.clone();
            positions.iter().for_each(|&p| out.flip(p));
            out
        }
        ChannelModel::FlipRandom { count, .. } => {
            let rng = rng.as_mut().expect("seeded");
            let mut out = payload.clone();
            sample(rng, len, *count).into_iter().for_each(|p| out.flip(p));
            out
        }
        ChannelModel::BernoulliFlip { epsilon, .. } => {
            let rng = rng.as_mut().expect("seeded");
            loop {
                let mut out = payload.clone();
                (0..len).filter(|_| rng.gen_bool(*epsilon)).for_each(|p| out.flip(p));
                if out != *payload {
                    break out;
                }
            }
        }
        ChannelModel::UniformReplacement { .. } => {
            let rng = rng.as_mut().expect("seeded");
            loop {
                let out = random_bits(rng, len);
                if out != *payload {
                    break out;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub malformed: u64,
    pub improper_coloring: u64,
    pub chromatic_drop: u64,
}

impl StageCounts {
    pub fn total(&self) -> u64 {
        self.malformed + self.improper_coloring + self.chromatic_drop
    }

    pub fn get(&self, stage: DetectionStage) -> u64 {
        match stage {
            DetectionStage::Malformed => self.malformed,
            DetectionStage::ImproperColoring => self.improper_coloring,
            DetectionStage::ChromaticDrop => self.chromatic_drop,
        }
    }

    fn record(&mut self, stage: DetectionStage) {
        match stage {
            DetectionStage::Malformed => self.malformed += 1,
            DetectionStage::ImproperColoring => self.improper_coloring += 1,
            DetectionStage::ChromaticDrop => self.chromatic_drop += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    detected: StageCounts,
    undetected: u64,
}

impl Tally {
    fn record(mut self, outcome: VerificationOutcome) -> Self {
        match outcome.stage() {
            Some(stage) => self.detected.record(stage),
            None => self.undetected += 1,
        }
        self
    }

    fn merge(self, other: Self) -> Self {
        Tally {
            detected: StageCounts {
                malformed: self.detected.malformed + other.detected.malformed,
                improper_coloring: self.detected.improper_coloring + other.detected.improper_coloring,
                chromatic_drop: self.detected.chromatic_drop + other.detected.chromatic_drop,
            },
            undetected: self.undetected + other.undetected,
        }
    }
}

/// Reference lines every report carries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct References {
    p1: DyadicProbability,
    bound: DyadicProbability,
    model_mismatch: bool,
    detection_exponent: usize,
}

fn references(msg: &CheckedMessage) -> Result<References, ChannelError> {
    let plan = msg.plan();
    let b = p1_bound(plan.total_order(), msg.n())?;
    Ok(References {
        p1: b.p1,
        bound: b.bound,
        model_mismatch: !plan.is_exact_fit(),
        detection_exponent: msg.monochrome_positions().len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub trials: u64,
    pub detected_by_stage: StageCounts,
    pub undetected: u64,
    pub p_hat: f64,
    pub p1_exact: f64,
    pub bound_2_to_minus_y: f64,
    pub stderr: f64,
    /// m − n for the message's total order.
    pub y: u64,
    /// Set when padding makes the 2^-y line a poor reference.
    pub model_mismatch: bool,
    /// Payload positions joining same-colored vertices; acceptance needs all
    /// of them clear.
    pub detection_exponent: usize,
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str = "trials,detected_malformed,detected_improper_coloring,detected_chromatic_drop,undetected,p_hat,p1_exact,bound_2_to_minus_y,stderr,y,model_mismatch,detection_exponent";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.trials,
            self.detected_by_stage.malformed,
            self.detected_by_stage.improper_coloring,
            self.detected_by_stage.chromatic_drop,
            self.undetected,
            self.p_hat,
            self.p1_exact,
            self.bound_2_to_minus_y,
            self.stderr,
            self.y,
            self.model_mismatch,
            self.detection_exponent
        )
    }

    /// Whether `p_hat` lies within `sigmas` standard errors above the 2^-y line.
    pub fn within_bound(&self, sigmas: f64) -> bool {
        self.p_hat <= self.bound_2_to_minus_y + sigmas * self.stderr
    }
}

pub fn run_monte_carlo(msg: &CheckedMessage, model: &ChannelModel, trials: u64) -> Result<ExperimentReport, ChannelError> {
    if trials == 0 {
        return Err(ChannelError::NoTrials);
    }
    model.validate(msg.payload().len())?;
    let refs = references(msg)?;
    let tally = (0..trials)
        .into_par_iter()
        .map(|t| {
            let received = corrupt_trial(msg.payload(), model, t);
            verify(&msg.with_payload(received).expect("channel keeps the length"))
        })
        .fold(Tally::default, Tally::record)
        .reduce(Tally::default, Tally::merge);

    let p_hat = tally.undetected as f64 / trials as f64;
    Ok(ExperimentReport {
        trials,
        detected_by_stage: tally.detected,
        undetected: tally.undetected,
        p_hat,
        p1_exact: refs.p1.to_f64(),
        bound_2_to_minus_y: refs.bound.to_f64(),
        stderr: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        y: refs.bound.neg_exponent,
        model_mismatch: refs.model_mismatch,
        detection_exponent: refs.detection_exponent,
    })
}

/// Exact outcome over every received payload `D′ ≠ D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveReport {
    pub corruptions: u64,
    pub detected_by_stage: StageCounts,
    pub undetected: u64,
    pub p_hat: Ratio<u64>,
    pub p1: DyadicProbability,
    pub bound: DyadicProbability,
    pub exact_fit: bool,
    pub detection_exponent: usize,
}

impl ExhaustiveReport {
    /// `p_hat ≤ 2^-y`, compared exactly.
    pub fn within_bound(&self) -> bool {
        u128::from(self.undetected) << self.bound.neg_exponent <= u128::from(self.corruptions)
    }

    /// `p_hat < p1`, compared exactly.
    pub fn below_p1(&self) -> bool {
        u128::from(self.undetected) << self.p1.neg_exponent < u128::from(self.corruptions)
    }
}

/// Verifies every `D′ ≠ D`. For exact-fit plans a fraction above 2^-(m−n) is
/// reported as [`ChannelError::BoundViolated`].
pub fn exhaustive_acceptance(msg: &CheckedMessage) -> Result<ExhaustiveReport, ChannelError> {
    let len = msg.payload().len();
    if len > EXHAUSTIVE_MAX_BITS {
        return Err(ChannelError::TooLarge { len, max: EXHAUSTIVE_MAX_BITS });
    }
    if len == 0 {
        return Err(ChannelError::EmptyPayload);
    }
    let refs = references(msg)?;
    let sent = msg.payload().to_word().expect("at most 20 bits");
    let tally = (0..1u64 << len)
        .into_par_iter()
        .filter(|&w| w != sent)
        .map(|w| verify(&msg.with_payload(BitString::from_word(w, len)).expect("same length")))
        .fold(Tally::default, Tally::record)
        .reduce(Tally::default, Tally::merge);

    let corruptions = (1u64 << len) - 1;
    let report = ExhaustiveReport {
        corruptions,
        detected_by_stage: tally.detected,
        undetected: tally.undetected,
        p_hat: Ratio::new(tally.undetected, corruptions),
        p1: refs.p1,
        bound: refs.bound,
        exact_fit: !refs.model_mismatch,
        detection_exponent: refs.detection_exponent,
    };
    if report.exact_fit && !report.within_bound() {
        return Err(ChannelError::BoundViolated {
            undetected: report.undetected,
            total: corruptions,
            y: report.bound.neg_exponent,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::PaddingMode;
    use crate::scheme::encode;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn zf(s: &str) -> CheckedMessage {
        encode(&bits(s), PaddingMode::ZeroFill, 0).unwrap()
    }

    #[test]
    fn corrupt_examples() {
        let flip = |p: Vec<usize>| corrupt(&bits("110"), &ChannelModel::FlipPositions { positions: p });
        assert_eq!(flip(vec![2]).unwrap(), bits("111"));
        assert_eq!(flip(vec![0, 0]), Err(ChannelError::DuplicatePosition(0)));
        assert_eq!(flip(vec![3]), Err(ChannelError::PositionOutOfRange { position: 3, len: 3 }));
        assert_eq!(flip(vec![]), Err(ChannelError::NoErrors));
        for seed in 0..200 {
            assert_ne!(corrupt(&bits("110"), &ChannelModel::UniformReplacement { seed }).unwrap(), bits("110"));
        }
    }

    #[test]
    fn flip_random_flips_exactly_count() {
        let d = BitString::zeros(40);
        for seed in 0..50 {
            let out = corrupt(&d, &ChannelModel::FlipRandom { count: 7, seed }).unwrap();
            assert_eq!(out.count_ones(), 7);
        }
        assert_eq!(
            corrupt(&bits("110"), &ChannelModel::FlipRandom { count: 4, seed: 1 }),
            Err(ChannelError::TooManyFlips { count: 4, len: 3 })
        );
    }

    #[test]
    fn bernoulli_validation_and_change() {
        let d = BitString::zeros(10);
        assert_eq!(corrupt(&d, &ChannelModel::BernoulliFlip { epsilon: 1.5, seed: 0 }), Err(ChannelError::BadProbability(1.5)));
        assert_eq!(corrupt(&d, &ChannelModel::BernoulliFlip { epsilon: 0.0, seed: 0 }), Err(ChannelError::NoErrors));
        let out = corrupt(&d, &ChannelModel::BernoulliFlip { epsilon: 0.01, seed: 3 }).unwrap();
        assert_ne!(out, d);
    }

    #[test]
    fn seeded_channels_are_reproducible() {
        let d = BitString::zeros(30);
        for model in [
            ChannelModel::FlipRandom { count: 3, seed: 9 },
            ChannelModel::BernoulliFlip { epsilon: 0.2, seed: 9 },
            ChannelModel::UniformReplacement { seed: 9 },
        ] {
            let a: Vec<_> = (0..20).map(|t| corrupt_trial(&d, &model, t)).collect();
            let b: Vec<_> = (0..20).map(|t| corrupt_trial(&d, &model, t)).collect();
            assert_eq!(a, b);
            assert_ne!(a[0], a[1], "trials use distinct streams");
        }
    }

    #[test]
    fn monte_carlo_examples() {
        // Flipping a32 of D = 110 always clashes with colors (0,1,1).
        let r = run_monte_carlo(&zf("110"), &ChannelModel::FlipPositions { positions: vec![2] }, 1).unwrap();
        assert_eq!((r.undetected, r.detected_by_stage.improper_coloring), (0, 1));

        let zeros = zf(&"0".repeat(15));
        let r = run_monte_carlo(&zeros, &ChannelModel::UniformReplacement { seed: 1 }, 1000).unwrap();
        assert_eq!(r.undetected, 0);
        assert_eq!(r.detected_by_stage.total(), 1000);

        assert_eq!(run_monte_carlo(&zeros, &ChannelModel::UniformReplacement { seed: 1 }, 0), Err(ChannelError::NoTrials));
    }

    #[test]
    fn exhaustive_examples() {
        let r = exhaustive_acceptance(&zf("110")).unwrap();
        assert_eq!((r.undetected, r.corruptions), (2, 7));
        assert_eq!(r.p_hat, Ratio::new(2, 7));
        assert_eq!(r.p1.neg_exponent, 1);
        assert!(r.below_p1() && r.within_bound());

        let r = exhaustive_acceptance(&zf("000000")).unwrap();
        assert_eq!((r.undetected, r.corruptions), (0, 63));

        let r = exhaustive_acceptance(&zf("111")).unwrap();
        assert_eq!(r.bound.neg_exponent, 0);
        assert!(r.within_bound());

        assert!(matches!(exhaustive_acceptance(&zf(&"0".repeat(21))), Err(ChannelError::TooLarge { .. })));
    }

    #[test]
    fn padded_messages_flag_model_mismatch() {
        let m = zf("1101");
        let r = exhaustive_acceptance(&m).unwrap();
        assert!(!r.exact_fit);
        let r = run_monte_carlo(&m, &ChannelModel::UniformReplacement { seed: 2 }, 100).unwrap();
        assert!(r.model_mismatch);
    }

    #[test]
    fn report_serialization() {
        let r = run_monte_carlo(&zf("110"), &ChannelModel::UniformReplacement { seed: 5 }, 50).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["trials"], 50);
        assert!(v["detected_by_stage"]["improper_coloring"].is_u64());
        assert_eq!(ExperimentReport::CSV_HEADER.split(',').count(), r.csv_row().split(',').count());
    }
}
