use proptest::prelude::*;
use wow_uwb_core::analysis::{
    attenuation_db, compute_pdp, count_significant_mpcs, identify_clusters, ClusterConfig, SIGNIFICANT_MPC_FRACTION,
};
use wow_uwb_core::fitting::{fit_large_scale, k_to_m, nakagami_moments};
use wow_uwb_core::io::{cir_to_json_line, read_cir_jsonl};
use wow_uwb_core::params::{builtin_column, parse_column, HURRICANE_WINDS_MPH};
use wow_uwb_core::rng::seeded;
use wow_uwb_core::synthesis::{apply_rain, synthesize_cir};
use wow_uwb_core::{Cir, Position, RainState, Scenario, SynthesisOptions};

fn column() -> impl Strategy<Value = (Position, RainState)> {
    (prop::sample::select(Position::ALL.to_vec()), prop::sample::select(RainState::ALL.to_vec()))
}

fn wind() -> impl Strategy<Value = f64> {
    prop::sample::select(HURRICANE_WINDS_MPH.to_vec())
}

fn scan(pos: Position, rain: RainState, wind: f64, seed: u64) -> Cir {
    let params = builtin_column(pos, rain);
    let scenario = Scenario::hurricane(pos, rain, wind).unwrap();
    synthesize_cir(&scenario, &params.multipath, &SynthesisOptions::full(params.large_scale), seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn synthesized_scans_are_well_formed((pos, rain) in column(), wind in wind(), seed in any::<u64>()) {
        let cir = scan(pos, rain, wind, seed);
        prop_assert!(cir.check_invariants().is_ok());
        prop_assert_eq!(cir.direct.is_some(), pos != Position::P3);
        prop_assert!(count_significant_mpcs(&cir, SIGNIFICANT_MPC_FRACTION) >= 1);
        prop_assert_eq!(&cir, &scan(pos, rain, wind, seed));
    }

    #[test]
    fn pdp_conserves_energy((pos, rain) in column(), wind in wind(), seed in any::<u64>()) {
        let cir = scan(pos, rain, wind, seed);
        let pdp = compute_pdp(&cir);
        let (a, b) = (pdp.total_energy(), cir.total_energy());
        prop_assert!((a - b).abs() <= 1e-12 * b, "{} vs {}", a, b);
        prop_assert!(pdp.bins.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn jsonl_round_trip_is_lossless((pos, rain) in column(), wind in wind(), seed in any::<u64>(), index in any::<u64>()) {
        let cir = scan(pos, rain, wind, seed);
        let line = cir_to_json_line(index, &cir, Some("abc")).unwrap();
        let back = read_cir_jsonl(&line).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(back[0].0, index);
        prop_assert_eq!(&back[0].1, &cir);
    }

    #[test]
    fn cluster_segments_are_ordered_and_disjoint((pos, rain) in column(), wind in wind(), seed in any::<u64>()) {
        let pdp = compute_pdp(&scan(pos, rain, wind, seed));
        let seg = identify_clusters(&pdp, &ClusterConfig::default());
        prop_assert_eq!(seg.count, seg.boundaries.len());
        prop_assert!(seg.count >= 1);
        for s in &seg.boundaries {
            prop_assert!(s.start_bin <= s.peak_bin && s.peak_bin <= s.end_bin);
            prop_assert_eq!(s.peak_power, pdp.bins[s.peak_bin]);
        }
        for w in seg.boundaries.windows(2) {
            prop_assert!(w[0].end_bin < w[1].start_bin);
        }
    }

    #[test]
    fn rain_keeps_bins_within_twice_beta(seed in any::<u64>(), beta in 0.05f64..0.99, sigma in 0.0f64..12.0) {
        let pdp = compute_pdp(&scan(Position::P1, RainState::S2, 100.0, seed));
        let out = apply_rain(&pdp, beta, sigma, &mut seeded(seed)).unwrap();
        for (p, q) in pdp.bins.iter().zip(&out.bins) {
            prop_assert!(*q >= 0.0 && *q <= 2.0 * beta * p * (1.0 + 1e-12));
        }
    }

    #[test]
    fn attenuation_is_antisymmetric(a in 1e-9f64..1e9, b in 1e-9f64..1e9) {
        let ab = attenuation_db(a, b).unwrap();
        let ba = attenuation_db(b, a).unwrap();
        prop_assert!((ab + ba).abs() < 1e-9);
        prop_assert_eq!(attenuation_db(a, a).unwrap(), 0.0);
    }

    #[test]
    fn noiseless_line_is_recovered(alpha in -0.5f64..0.5, a_w0 in -40.0f64..40.0) {
        let samples: Vec<_> = HURRICANE_WINDS_MPH
            .iter()
            .map(|&v| wow_uwb_core::analysis::AttenuationSample {
                wind_mph: v,
                attenuation_db: a_w0 + alpha * v,
                scenario: Scenario::hurricane(Position::P1, RainState::S1, v).unwrap(),
            })
            .collect();
        let fit = fit_large_scale(&samples).unwrap();
        prop_assert!((fit.get("alpha").unwrap() - alpha).abs() < 1e-9);
        prop_assert!((fit.get("a_w0_db").unwrap() - a_w0).abs() < 1e-7);
    }

    #[test]
    fn nakagami_moments_scale(values in prop::collection::vec(0.01f64..10.0, 3..200), c in 0.1f64..10.0) {
        prop_assume!(values.iter().any(|&v| (v - values[0]).abs() > 1e-3));
        let a = nakagami_moments(&values).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
        let b = nakagami_moments(&scaled).unwrap();
        prop_assert!((b.m / a.m - 1.0).abs() < 1e-9);
        prop_assert!((b.omega / (c * c * a.omega) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn k_to_m_is_at_least_one_and_increasing(k in 0.0f64..1e6, dk in 1e-3f64..10.0) {
        let m = k_to_m(k).unwrap();
        prop_assert!(m >= 1.0);
        prop_assert!(k_to_m(k + dk).unwrap() > m);
    }

    #[test]
    fn column_names_parse_in_any_case((pos, rain) in column(), lower in any::<bool>(), comma in any::<bool>()) {
        let mut name = if comma { format!("{pos},{rain}") } else { format!("{pos}{rain}") };
        if lower {
            name = name.to_lowercase();
        }
        prop_assert_eq!(parse_column(&name).unwrap(), (pos, rain));
    }
}
