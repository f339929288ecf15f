use proptest::prelude::*;
use serde_json::json;
use surface_kz::config::{RunConfig, Suite};
use surface_kz::report::CheckRecord;
use surface_kz::suites::{apply_safety, render, run_suites, RunSummary};

fn record(residual: f64, budget: f64) -> CheckRecord {
    if budget == 0.0 {
        let fails: Vec<String> = (0..residual as usize).map(|k| format!("f{k}")).collect();
        CheckRecord::exact("t", "exact", json!({}), &fails, json!({}))
    } else {
        CheckRecord::numeric("t", "numeric", json!({}), residual, budget, 10.0, json!({}))
    }
}

proptest! {
    #[test]
    fn exit_code_matches_the_residual_rule(
        raw in prop::collection::vec((0.0f64..2.0, prop_oneof![Just(0.0), 1e-3f64..1.0]), 1..12),
        safety in 0.1f64..10.0,
    ) {
        let mut recs: Vec<CheckRecord> =
            raw.iter().map(|(r, b)| record(if *b == 0.0 { r.floor() } else { *r }, *b)).collect();
        apply_safety(&mut recs, safety);
        let expected = recs.iter().all(|r| if r.budget > 0.0 { r.residual < r.budget * safety } else { r.residual == 0.0 });
        let summary = RunSummary::new(&RunConfig::default(), &recs, None);
        prop_assert_eq!(summary.exit_code == 0, expected);
        prop_assert_eq!(summary.failed.len(), recs.iter().filter(|r| !r.pass).count());
    }

    #[test]
    fn config_round_trips(g in 1usize..3, n in 1usize..5, pmax in 1usize..4, seed in any::<u64>(), l in 1usize..10) {
        let c = RunConfig { g, n, pmax, seed, l: Some(l), suite: Suite::Forms, ..RunConfig::default() };
        prop_assert!(c.validate().is_ok());
        let back = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}

#[test]
fn same_seed_same_report() {
    let render_with = |seed| {
        let c = RunConfig { g: 2, n: 2, suite: Suite::Flatness, seed, ..RunConfig::default() };
        let recs = run_suites(&c).unwrap();
        render(&recs, &RunSummary::new(&c, &recs, None)).unwrap()
    };
    let a = render_with(4);
    assert_eq!(a, render_with(4));
    assert_ne!(a, render_with(5));
}
