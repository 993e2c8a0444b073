use gccd_core::channel::{corrupt_trial, exhaustive_acceptance, run_monte_carlo, ChannelModel};
use gccd_core::codec::capacity;
use gccd_core::{encode, verify, BitString, PaddingMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn reports_are_reproducible_and_schedule_independent() {
    let msg = encode(&"1011001110".parse().unwrap(), PaddingMode::ZeroFill, 0).unwrap();
    for model in [
        ChannelModel::UniformReplacement { seed: 17 },
        ChannelModel::FlipRandom { count: 2, seed: 17 },
        ChannelModel::BernoulliFlip { epsilon: 0.1, seed: 17 },
    ] {
        let a = run_monte_carlo(&msg, &model, 4000).unwrap();
        let b = run_monte_carlo(&msg, &model, 4000).unwrap();
        assert_eq!(a, b);

        // Sequential replay of the same per-trial streams.
        let undetected = (0..4000u64)
            .filter(|&t| verify(&msg.with_payload(corrupt_trial(msg.payload(), &model, t)).unwrap()).is_accepted())
            .count() as u64;
        assert_eq!(a.undetected, undetected);
        assert_eq!(a.detected_by_stage.total() + a.undetected, a.trials);
        assert!((0.0..=1.0).contains(&a.p_hat));
    }
}

#[test]
fn monte_carlo_agrees_with_exhaustive_up_to_12_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for len in [3usize, 6, 10, 12] {
        for _ in 0..3 {
            let payload = BitString::new((0..len).map(|_| rng.gen_bool(0.5)).collect());
            let msg = encode(&payload, PaddingMode::ZeroFill, 0).unwrap();
            let exact = exhaustive_acceptance(&msg).unwrap();
            let p_exact = exact.undetected as f64 / exact.corruptions as f64;
            let mc = run_monte_carlo(&msg, &ChannelModel::UniformReplacement { seed: rng.gen() }, 100_000).unwrap();
            let sigma = (p_exact * (1.0 - p_exact) / mc.trials as f64).sqrt();
            assert!(
                (mc.p_hat - p_exact).abs() <= 5.0 * sigma + f64::EPSILON,
                "len {len}: mc {} vs exact {p_exact}",
                mc.p_hat
            );
        }
    }
}

#[test]
fn exact_fit_sweeps_respect_the_bound_chain() {
    for m in [3usize, 4] {
        let l = capacity(m);
        let mut total_undetected = 0u64;
        for d in 0..1u64 << l {
            let msg = encode(&BitString::from_word(d, l), PaddingMode::ZeroFill, 0).unwrap();
            let r = exhaustive_acceptance(&msg).unwrap();
            assert!(r.exact_fit);
            assert!(r.within_bound());
            assert!(r.p1 <= r.bound);
            if r.undetected > 0 {
                assert!(r.below_p1());
            }
            total_undetected += r.undetected;
        }
        // Averaged over payloads as well.
        let pairs = (1u64 << l) * ((1u64 << l) - 1);
        assert!(total_undetected < pairs);
    }
}
