mod common;

use common::{mixed_statistics, rng};
use proptest::prelude::*;
use revpref::irrationality::{garp_breakpoints, garp_irrationality_bisection, irrationality_report};
use revpref::{check_garp, check_harp, garp_irrationality, harp_irrationality};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn breakpoints_agree_with_bisection(seed in any::<u64>()) {
        let ts = mixed_statistics(&mut rng(seed), 6, 4);
        let exact = garp_irrationality(&ts);
        let bis = garp_irrationality_bisection(&ts, 0.0, 1e-12);
        prop_assert!((exact.omega - bis).abs() <= 1e-9);
        if exact.omega > 0.0 {
            prop_assert_eq!(check_garp(&ts, exact.omega).satisfied, exact.attained);
        }
        if ts.periods() > 1 {
            prop_assert!(garp_breakpoints(&ts).contains(&exact.omega));
        }
    }

    #[test]
    fn indices_bracket_the_verdicts(seed in any::<u64>()) {
        let ts = mixed_statistics(&mut rng(seed), 6, 4);
        let g = garp_irrationality(&ts);
        let h = harp_irrationality(&ts);
        if ts.periods() >= 2 {
            prop_assert!(g.omega <= h * (1.0 + 1e-12));
            prop_assert!(check_harp(&ts, h * (1.0 + 1e-9)).satisfied);
            prop_assert!(!check_harp(&ts, h * (1.0 - 1e-6)).satisfied);
        }
        prop_assert!(check_garp(&ts, g.omega * (1.0 + 1e-9) + 1e-300).satisfied);
        if g.omega > 0.0 {
            prop_assert!(!check_garp(&ts, g.omega * (1.0 - 1e-9)).satisfied);
        }
    }

    #[test]
    fn report_witnesses_match_verdicts(seed in any::<u64>()) {
        let ts = mixed_statistics(&mut rng(seed), 6, 4);
        let r = irrationality_report(&ts);
        prop_assert_eq!(r.garp_witness.is_some(), r.omega_g > 0.0);
        prop_assert_eq!(r.harp_witness.is_some(), ts.periods() >= 2);
        if let Some(w) = r.harp_witness {
            let mean = w.product.powf(1.0 / w.cycle.len() as f64);
            prop_assert!((mean - r.omega_h).abs() <= 1e-12 * r.omega_h);
        }
        if let Some(w) = r.garp_witness {
            // the witness violates GARP just below the index
            let below = r.omega_g * (1.0 - 1e-9);
            prop_assert!(!check_garp(&ts, below).satisfied);
            prop_assert!(w.chain.len() >= 2);
        }
    }
}

#[test]
fn two_period_values() {
    let ts = revpref::fixtures::two_period_statistics::<f64>();
    assert!((harp_irrationality(&ts) - 1.25f64.sqrt()).abs() < 1e-9);
    let g = garp_irrationality(&ts);
    assert!((g.omega - 0.75).abs() < 1e-9);
    assert!(!g.attained);
}
