use narrowtoa::attack::{AttackSpec, MaskSpec, NgdFilterSpec};
use narrowtoa::btcs::{CsSyncConfig, CsSyncPacket, Payload, PhyMode};
use narrowtoa::harness::{emit_plots, preset, run_chain, run_experiment, RfChainConfig};
use narrowtoa::receiver::{nadm_dft, process_packet};
use narrowtoa::Error;

fn packet(seed: u64) -> CsSyncPacket {
    CsSyncPacket::generate(&CsSyncConfig::new(
        PhyMode::Le1M,
        Payload::Random { n_bits: 64 },
        seed,
    ))
    .unwrap()
}

fn small(name: &str, n: usize) -> narrowtoa::harness::ExperimentConfig {
    let mut cfg = preset(name).unwrap();
    cfg.n_packets = n;
    cfg
}

#[test]
fn no_attack_gives_zero_advance() {
    let mut cfg = small("exp3-legit", 6);
    cfg.attack = AttackSpec::None;
    let res = run_experiment(&cfg).unwrap();
    for r in &res.records {
        assert_eq!(r.toa_advance_m, Some(0.0));
    }
}

#[test]
fn reruns_are_identical() {
    let cfg = small("exp2-noisy", 4);
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(
        serde_json::to_string(&a.records).unwrap(),
        serde_json::to_string(&b.records).unwrap()
    );
}

#[test]
fn common_delay_moves_toa_not_advance() {
    let p = packet(5);
    let rf = RfChainConfig::default();
    let attack = AttackSpec::Ngd(NgdFilterSpec::new(62e-9, rf.if_freq));
    let mut delayed = p.clone();
    let k = 13;
    delayed.waveform = p
        .waveform
        .clone()
        .with_time_origin(p.waveform.t0() + k as f64 / 8e6);
    let measure = |pk: &CsSyncPacket| {
        let out = run_chain(pk, &rf, &attack, Some(20.0), 9).unwrap();
        let gt = process_packet(&out.ground_truth, &p.waveform, &p.bits, PhyMode::Le1M).unwrap();
        let at = process_packet(&out.attacked, &p.waveform, &p.bits, PhyMode::Le1M).unwrap();
        (gt.toa.toa_seconds, at.toa.toa_seconds)
    };
    let (g0, a0) = measure(&p);
    let (g1, a1) = measure(&delayed);
    let dt = k as f64 / 8e6;
    assert!((g1 - g0 - dt).abs() < 1e-12);
    assert!((a1 - a0 - dt).abs() < 1e-12);
    assert!(((a1 - g1) - (a0 - g0)).abs() < 1e-12);
}

#[test]
fn conversion_round_trip_is_transparent() {
    for seed in 0..4 {
        let p = packet(seed);
        let rf = RfChainConfig {
            bandpass: None,
            ..RfChainConfig::default()
        };
        let out = run_chain(&p, &rf, &AttackSpec::None, None, 0).unwrap();
        let pad = rf.pad_symbols * p.oversampling;
        let core = &out.ground_truth.samples()[pad..pad + p.waveform.len()];
        let err: f64 = core
            .iter()
            .zip(p.waveform.samples())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        assert!((err / p.waveform.energy()).sqrt() < 1e-3);
    }
}

#[test]
fn real_mask_leaves_toa_but_shows_in_dft() {
    let rf = RfChainConfig::default();
    let attack = AttackSpec::Mask(MaskSpec::truncation(0.5, 0.0, 1e-6));
    for seed in 0..5 {
        let p = packet(seed);
        let out = run_chain(&p, &rf, &attack, None, 0).unwrap();
        let gt = process_packet(&out.ground_truth, &p.waveform, &p.bits, PhyMode::Le1M).unwrap();
        let at = process_packet(&out.attacked, &p.waveform, &p.bits, PhyMode::Le1M).unwrap();
        let shift = (at.toa.toa_seconds - gt.toa.toa_seconds) * 8e6;
        assert!(shift.abs() < 0.25, "shift {shift} samples");
        let clean = nadm_dft(&out.ground_truth, 1e6).unwrap();
        assert!(at.nadm.dft > 10.0 * clean, "{} vs {clean}", at.nadm.dft);
    }
}

#[test]
fn plots_are_deterministic_and_show_advance() {
    let cfg = small("exp1", 1);
    let res = run_experiment(&cfg).unwrap();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let files = emit_plots(&res, d1.path()).unwrap();
    emit_plots(&run_experiment(&cfg).unwrap(), d2.path()).unwrap();
    for f in &files {
        let name = f.file_name().unwrap();
        assert_eq!(
            std::fs::read(f).unwrap(),
            std::fs::read(d2.path().join(name)).unwrap()
        );
    }
    let trace = std::fs::read_to_string(d1.path().join("correlation_trace.csv")).unwrap();
    let rows: Vec<(f64, f64, f64)> = trace
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect();
    let peak = |col: fn(&(f64, f64, f64)) -> f64| {
        rows.iter()
            .max_by(|a, b| col(a).total_cmp(&col(b)))
            .unwrap()
            .0
    };
    let (gt_peak, at_peak) = (peak(|r| r.1), peak(|r| r.2));
    assert!(at_peak <= gt_peak);
    let ex = res.exemplar.as_ref().unwrap();
    let refine = |c: &narrowtoa::sigproc::Correlation| {
        narrowtoa::receiver::estimate_toa(c).unwrap().toa_seconds
    };
    assert!(refine(&ex.attacked) < refine(&ex.ground_truth));
}

#[test]
fn empty_result_is_rejected() {
    let mut res = run_experiment(&small("exp1", 1)).unwrap();
    res.records.clear();
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        emit_plots(&res, dir.path()),
        Err(Error::EmptyResult)
    ));
}
