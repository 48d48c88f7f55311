use std::f64::consts::PI;

use narrowtoa::btcs::{
    differential_template, gfsk_demodulate, gfsk_modulate, sounding_sequence, CsSyncConfig,
    CsSyncPacket, Payload, PhyMode,
};
use narrowtoa::sigproc::{add_awgn, cross_correlate};
use proptest::prelude::*;

fn phy() -> impl Strategy<Value = (PhyMode, usize)> {
    prop_oneof![
        Just((PhyMode::Le1M, 8)),
        Just((PhyMode::Le2M, 4)),
        Just((PhyMode::Le1M, 16))
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelope_continuity_and_round_trip(bits in prop::collection::vec(0u8..2, 1..120), (mode, osr) in phy()) {
        let s = gfsk_modulate(&bits, mode, osr).unwrap();
        prop_assert_eq!(s.len(), bits.len() * osr);
        let limit = PI * 0.5 / osr as f64 * (1.0 + 1e-9);
        for w in s.samples().windows(2) {
            prop_assert!((w[0].norm() - 1.0).abs() < 1e-14);
            prop_assert!((w[1] * w[0].conj()).arg().abs() <= limit);
        }
        let decoded = gfsk_demodulate(&s, mode, osr / 2).unwrap();
        prop_assert_eq!(decoded, bits);
    }

    #[test]
    fn sounding_markers_flip_two_bits_each(n_bits in 16usize..200, markers in 0usize..8, seed in any::<u64>()) {
        prop_assume!(markers * 4 <= n_bits);
        let seq = sounding_sequence(n_bits, markers, seed).unwrap();
        let base = sounding_sequence(n_bits, 0, seed).unwrap();
        let diff = seq.bits.iter().zip(&base.bits).filter(|(a, b)| a != b).count();
        prop_assert_eq!(diff, 2 * markers);
        prop_assert_eq!(seq.marker_positions.len(), markers);
    }
}

#[test]
fn noisy_round_trip_mostly_error_free() {
    let clean = (0..100u64)
        .filter(|&seed| {
            let p = CsSyncPacket::generate(&CsSyncConfig::new(
                PhyMode::Le1M,
                Payload::Random { n_bits: 128 },
                seed,
            ))
            .unwrap();
            let noisy = add_awgn(&p.waveform, 20.0, seed + 1000).unwrap();
            gfsk_demodulate(&noisy, PhyMode::Le1M, 4).unwrap() == p.bits
        })
        .count();
    assert!(clean >= 95, "{clean} error-free packets");
}

#[test]
fn templates_of_different_access_addresses_are_distinct() {
    for seed in 0..20u64 {
        let a =
            CsSyncPacket::generate(&CsSyncConfig::new(PhyMode::Le1M, Payload::None, seed)).unwrap();
        let b =
            CsSyncPacket::generate(&CsSyncConfig::new(PhyMode::Le1M, Payload::None, seed + 500))
                .unwrap();
        assert_ne!(a.access_address, b.access_address);
        let ta = differential_template(&a.bits, PhyMode::Le1M, 8).unwrap();
        let tb = differential_template(&b.bits, PhyMode::Le1M, 8).unwrap();
        assert_eq!(ta, a.waveform);
        let peak = cross_correlate(&ta, &tb)
            .unwrap()
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let norm = (ta.energy() * tb.energy()).sqrt();
        assert!(peak / norm < 0.9, "seed {seed}: {}", peak / norm);
    }
}
