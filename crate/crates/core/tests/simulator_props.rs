use std::path::{Path, PathBuf};

use proptest::prelude::*;

use flatrack::simulator::{csv_string, run_scenario, ControllerKind, ScenarioConfig};
use flatrack::stability::{trivial_ABC, TrivialFlatSpec};
use flatrack::trivial_flat::{trivial_predict, FlatState, LinearPredictor};

fn bundled(name: &str) -> ScenarioConfig {
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(format!("{name}.json"));
    ScenarioConfig::from_path(&path).unwrap()
}

fn final_position(cfg: &ScenarioConfig) -> [f64; 2] {
    let tr = run_scenario(cfg).unwrap();
    assert!(tr.status.is_completed());
    tr.records.last().unwrap().y
}

/// Halving dt halves the change in the end position. The run ends at
/// t = 10 s; at t = 100 s the sine has zero curvature and the first-order
/// term happens to cancel.
#[test]
fn euler_refinement_is_first_order() {
    let mut cfg = bundled("unicycle_sine");
    cfg.duration = 10.0;
    let ends: Vec<[f64; 2]> = [1e-3, 5e-4, 2.5e-4]
        .iter()
        .map(|&dt| {
            cfg.dt = dt;
            final_position(&cfg)
        })
        .collect();
    let d = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    let ratio = d(ends[0], ends[1]) / d(ends[1], ends[2]);
    assert!((1.5..=2.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn unicycle_flat_and_direct_traces_coincide() {
    for name in ["unicycle_sine", "unicycle_spiral"] {
        let mut cfg = bundled(name);
        let flat = run_scenario(&cfg).unwrap();
        cfg.controller = ControllerKind::NrDirect;
        let direct = run_scenario(&cfg).unwrap();
        assert_eq!(flat.records.len(), direct.records.len());
        for (a, b) in flat.records.iter().zip(&direct.records) {
            for (x, y) in a.state.iter().zip(&b.state) {
                assert!((x - y).abs() < 1e-6, "{name} t={}: {x} vs {y}", a.t);
            }
        }
    }
}

#[test]
fn identical_configs_give_identical_csv() {
    let mut cfg = bundled("bicycle_spiral");
    cfg.duration = 5.0;
    assert_eq!(
        csv_string(&run_scenario(&cfg).unwrap()),
        csv_string(&run_scenario(&cfg).unwrap())
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    /// The Taylor predictor is exact for integrator chains.
    #[test]
    fn taylor_predictor_matches_expm(
        k in 0usize..=3, m in 1usize..=3, t in 0.02f64..1.0,
        seed in prop::collection::vec(-1.0f64..1.0, 15),
    ) {
        let spec = TrivialFlatSpec::new(m, k, t, 2.0).unwrap();
        let n = spec.n();
        let f = FlatState::from_stacked(m, &seed[..n], &seed[n..n + m]).unwrap();
        let p = LinearPredictor::new(trivial_ABC(&spec), t).unwrap();
        let exact = p.predict(&seed[..n], &seed[n..n + m]).unwrap();
        for (a, b) in trivial_predict(&f, &spec).iter().zip(&exact) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
