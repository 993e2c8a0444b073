use gccd_core::channel::exhaustive_acceptance;
use gccd_core::codec::{bits_to_graph, capacity};
use gccd_core::coloring::{chromatic_number, is_proper};
use gccd_core::counting::{cross_pairs_exponent, PartitionSpec};
use gccd_core::wire::{parse_message, serialize_message};
use gccd_core::{encode, verify, BitString, CheckedMessage, DetectionStage, Encoder, PaddingMode, VerificationOutcome};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact_fit(m: usize, word: u64) -> CheckedMessage {
    encode(&BitString::from_word(word, capacity(m)), PaddingMode::ZeroFill, 0).unwrap()
}

#[test]
fn encode_then_verify_accepts_random_payloads() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let encoder = Encoder::with_max_order(48);
    for i in 0..1000 {
        let len = rng.gen_range(1..=500);
        let density = rng.gen_range(0.0..1.0);
        let payload = BitString::new((0..len).map(|_| rng.gen_bool(density)).collect());
        let (mode, pin) = if i % 4 == 3 { (PaddingMode::CliquePin, rng.gen_range(1..=6)) } else { (PaddingMode::ZeroFill, 0) };
        let msg = encoder.encode(&payload, mode, pin).unwrap();
        assert_eq!(verify(&msg), VerificationOutcome::Accepted, "len {len} density {density:.2}");
    }
}

/// Exhaustive sweep over every exact-fit payload of order `m` and every
/// received `D′ ≠ D`.
fn sweep(m: usize, mut visit: impl FnMut(&CheckedMessage, &BitString, VerificationOutcome)) {
    let l = capacity(m);
    for d in 0..1u64 << l {
        let msg = exact_fit(m, d);
        for d2 in (0..1u64 << l).filter(|&w| w != d) {
            let received = BitString::from_word(d2, l);
            let outcome = verify(&msg.with_payload(received.clone()).unwrap());
            visit(&msg, &received, outcome);
        }
    }
}

#[test]
fn acceptance_is_proper_and_same_chromatic_number() {
    for m in [3, 4] {
        sweep(m, |msg, received, outcome| {
            let g = bits_to_graph(received, msg.plan()).unwrap();
            let proper = is_proper(&g, msg.colors()).unwrap();
            let same_chi = chromatic_number(&g).unwrap().n == msg.n();
            assert_eq!(outcome.is_accepted(), proper && same_chi);
            if !proper {
                assert_eq!(outcome.stage(), Some(DetectionStage::ImproperColoring));
            } else if !same_chi {
                assert_eq!(outcome.stage(), Some(DetectionStage::ChromaticDrop));
            }
        });
    }
}

#[test]
fn undetected_count_below_partition_count() {
    for m in [3usize, 4] {
        let l = capacity(m);
        for d in 0..1u64 << l {
            let msg = exact_fit(m, d);
            let report = exhaustive_acceptance(&msg).unwrap();
            let classes = PartitionSpec::new(msg.colors().class_sizes()).unwrap();
            let cross = cross_pairs_exponent(&classes).unwrap();
            assert!(report.undetected < 1u64 << cross, "D={d:b}");
            // undetected / (2^l - 1) <= 2^-(m-n)
            assert!(u128::from(report.undetected) << (m - msg.n()) <= u128::from(report.corruptions));
        }
    }
}

#[test]
fn chromatic_drop_stage_is_needed() {
    let mut witness = None;
    sweep(4, |msg, received, outcome| {
        if witness.is_none() && outcome.stage() == Some(DetectionStage::ChromaticDrop) {
            witness = Some((msg.payload().clone(), received.clone()));
        }
    });
    let (d, d2) = witness.expect("some corruption keeps the coloring proper but lowers χ");
    let msg = exact_fit(4, d.to_word().unwrap());
    let g = bits_to_graph(&d2, msg.plan()).unwrap();
    assert!(is_proper(&g, msg.colors()).unwrap());
    assert!(chromatic_number(&g).unwrap().n < msg.n());
}

#[test]
fn all_zero_payload_detects_every_corruption() {
    for l in 1..=15 {
        let msg = encode(&BitString::zeros(l), PaddingMode::ZeroFill, 0).unwrap();
        let report = exhaustive_acceptance(&msg).unwrap();
        assert_eq!(report.undetected, 0, "l = {l}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn wire_roundtrip(bits in proptest::collection::vec(any::<bool>(), 1..=200), pin in 0usize..4) {
        let mode = if pin == 0 { PaddingMode::ZeroFill } else { PaddingMode::CliquePin };
        let msg = encode(&BitString::new(bits), mode, pin).unwrap();
        let bytes = serialize_message(&msg).unwrap();
        prop_assert_eq!(parse_message(&bytes).unwrap(), msg);
    }

    #[test]
    fn parse_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let _ = parse_message(&bytes);
    }
}
