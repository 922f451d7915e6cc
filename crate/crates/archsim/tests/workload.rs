use flexhe::params::{Context, ParamSet};
use flexhe_archsim::workload::*;

const SINGLE_DEPTH_BOUND: f64 = 1.0 / 65536.0;
const CHAIN_BOUND: f64 = 1.0 / 1024.0;
const LOGREG_CYCLES: f64 = 1.3e6;

fn run_preset(ctx: &Context, name: &str, timing: bool) -> RunReport {
    let w = Workload::preset(name, ctx).unwrap();
    let s = Session::new(ctx, 2024, &w.rotations()).unwrap();
    let options = RunOptions { backend: Backend::Library, timing: timing.then(Default::default) };
    run(&s, &w, &options).unwrap()
}

#[test]
fn depth_chains_stay_accurate_in_both_modes() {
    for params in [ParamSet::set1(), ParamSet::set2()] {
        let ctx = Context::new(params).unwrap();
        let one = run_preset(&ctx, "depth1", false);
        assert!(one.outputs[0].max_rel_error < SINGLE_DEPTH_BOUND, "{one:?}");
        let chain = run_preset(&ctx, "chain", false);
        assert_eq!(chain.steps.iter().filter(|s| s.op == "rescale").count(), chain_rounds(&ctx));
        assert!(chain.outputs[0].max_rel_error < CHAIN_BOUND, "{chain:?}");
        assert_eq!(chain.outputs[0].log2_scale, ctx.params().log_scale as f64);
    }
}

#[test]
fn functional_results_do_not_depend_on_timing() {
    let ctx = Context::new(ParamSet::custom("toy", 5, 5, 4, 40)).unwrap();
    for name in PRESETS.iter().filter(|&&n| n != "logreg") {
        let plain = run_preset(&ctx, name, false);
        let timed = run_preset(&ctx, name, true);
        assert_eq!(plain.outputs, timed.outputs, "{name}");
        assert!(plain.timing.is_none() && timed.timing.is_some());
    }
}

#[test]
fn logistic_regression_has_the_published_shape_and_cost() {
    let ctx = Context::new(ParamSet::logreg()).unwrap();
    let w = Workload::logreg(&ctx);
    let counts = w.counts();
    assert_eq!((counts["rotate"], counts["rescale"], counts["mult_relin"]), (7, 11, 5));
    let r = run_preset(&ctx, "logreg", true);
    let t = r.timing.as_ref().unwrap();
    assert!((t.total_cycles as f64 - LOGREG_CYCLES).abs() <= 0.2 * LOGREG_CYCLES, "{t:?}");
    assert!(r.outputs[0].max_rel_error < 1e-6, "{:?}", r.outputs);
    assert!(t.peak_slots <= 13);
}

#[test]
fn unknown_presets_are_rejected() {
    let ctx = Context::new(ParamSet::custom("toy", 5, 5, 4, 40)).unwrap();
    assert!(Workload::preset("bootstrap", &ctx).is_err());
    for name in PRESETS {
        assert!(Workload::preset(name, &ctx).is_ok(), "{name}");
    }
}
