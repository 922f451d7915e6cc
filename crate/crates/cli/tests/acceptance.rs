//! One line per acceptance criterion. Exits non-zero if a hard criterion fails.

use std::time::{Duration, Instant};

use flexhe::heaan::{self, Ciphertext};
use flexhe::keys::{encrypt, sampling, KeySwitchKey};
use flexhe::modarith::Modulus;
use flexhe::params::{Context, ParamSet};
use flexhe::polyring::{Domain, ResiduePoly, Ring, Twist};
use flexhe::ringsplit::{join, split, split_mul_check, SplitPair};
use flexhe::scale::Scale;
use flexhe_archsim::audit::audit;
use flexhe_archsim::calibrate::{compare, dual_issue_savings, set1_reference, set1_shape, set2_reference, set2_shape};
use flexhe_archsim::compile::{compile, HeOp, Shape};
use flexhe_archsim::cost::{CostModel, MachineConfig};
use flexhe_archsim::exec::{execute, Input};
use flexhe_archsim::sim::simulate;
use flexhe_archsim::workload::{run, Backend, RunOptions, RunReport, Session, Workload};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REDUCE_SAMPLES: usize = 1_000_000;
const REDUCE_BUDGET: Duration = Duration::from_secs(30);
const NTT_BUDGET: Duration = Duration::from_secs(120);
const SCHOOLBOOK_PAIRS: usize = 100;
const SPLIT_INSTANCES: usize = 1000;
const SPLIT_BUDGET: Duration = Duration::from_secs(120);
const SINGLE_DEPTH_BOUND: f64 = 1.0 / 65536.0;
const CHAIN_BOUND: f64 = 1.0 / 1024.0;
const SET1_TOLERANCE: f64 = 0.10;
const SET2_TOLERANCE: f64 = 0.20;
const SET2_CALIBRATED_TOLERANCE: f64 = 0.10;
const DUAL_ISSUE_TARGET: f64 = 0.40;
const DUAL_ISSUE_TOLERANCE: f64 = 0.10;
const NTT_CYCLES: u64 = 7168;
const SLOTS_PER_RPAU: usize = 7;
const LOGREG_CYCLES: f64 = 1.3e6;
const LOGREG_CYCLE_TOLERANCE: f64 = 0.20;
const LOGREG_INSTRUCTIONS: f64 = 834.0;
const LOGREG_INSTRUCTION_TOLERANCE: f64 = 0.15;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn schoolbook(a: &[u64], b: &[u64], c: u64, q: u64) -> Vec<u64> {
    let n = a.len();
    let mut out = vec![0u64; n];
    for i in 0..n {
        for j in 0..n {
            let t = mulmod(a[i], b[j], q);
            let (k, t) = if i + j >= n { (i + j - n, mulmod(t, c, q)) } else { (i + j, t) };
            out[k] = (out[k] + t) % q;
        }
    }
    out
}

fn random_vec(rng: &mut impl Rng, n: usize, q: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(0..q)).collect()
}

fn contexts() -> Vec<Context> {
    [ParamSet::set1(), ParamSet::set2(), ParamSet::logreg()].into_iter().map(|p| Context::new(p).unwrap()).collect()
}

fn reduction(ctxs: &[Context]) -> Verdict {
    let mut primes: Vec<Modulus> = ctxs.iter().flat_map(|c| c.base().all().to_vec()).collect();
    primes.sort_by_key(Modulus::value);
    primes.dedup_by_key(|q| q.value());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut mismatches = 0usize;
    for q in &primes {
        let v = q.value();
        for i in 0..REDUCE_SAMPLES {
            // alternate full-width words with products of residues
            let x = if i % 2 == 0 { rng.gen::<u128>() } else { rng.gen_range(0..v) as u128 * rng.gen_range(0..v) as u128 };
            mismatches += usize::from(q.reduce_u128(x) != (x % v as u128) as u64);
        }
    }
    let took = start.elapsed();
    verdict(
        mismatches == 0 && took < REDUCE_BUDGET,
        format!("{} primes x {REDUCE_SAMPLES} inputs, {mismatches} mismatches, {:.1}s", primes.len(), took.as_secs_f64()),
    )
}

fn configured_rings(ctxs: &[Context]) -> Vec<Ring> {
    let mut rings = Vec::new();
    for ctx in &ctxs[..2] {
        for r in ctx.rings() {
            if r.degree() > ctx.params().hw_degree() {
                let (a, b) = r.halves().unwrap();
                rings.extend([a, b]);
            } else {
                rings.push(*r);
            }
        }
    }
    rings
}

fn transforms(ctxs: &[Context]) -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rings = configured_rings(ctxs);
    let mut bad_round_trips = 0;
    for r in &rings {
        let a = random_vec(&mut rng, r.degree(), r.modulus().value());
        let back = r.poly(Domain::Coefficient, a.clone()).unwrap().forward().unwrap().inverse().unwrap();
        bad_round_trips += usize::from(back.data() != a.as_slice());
    }
    let q = Modulus::new(18014398509404161).unwrap();
    let (mut products, mut bad_products) = (0, 0);
    for twist in [Twist::Standard, Twist::Plus, Twist::Minus] {
        for log_n in 3..=8 {
            let n = 1usize << log_n;
            let r = match twist {
                Twist::Standard => Ring::standard(q, n, q.root_of_unity(2 * n as u64).unwrap()).unwrap(),
                t => Ring::twisted(q, n, t, q.root_of_unity(4 * n as u64).unwrap()).unwrap(),
            };
            for _ in 0..SCHOOLBOOK_PAIRS {
                let a = random_vec(&mut rng, n, q.value());
                let b = random_vec(&mut rng, n, q.value());
                let pa = r.poly(Domain::Coefficient, a.clone()).unwrap();
                let pb = r.poly(Domain::Coefficient, b.clone()).unwrap();
                let got = pa.ring_mul(&pb).unwrap();
                products += 1;
                bad_products += usize::from(got.data() != schoolbook(&a, &b, r.constant(), q.value()).as_slice());
            }
        }
    }
    let took = start.elapsed();
    verdict(
        bad_round_trips == 0 && bad_products == 0 && took < NTT_BUDGET,
        format!(
            "{} configured rings round-trip ({bad_round_trips} bad), {products} products vs schoolbook ({bad_products} bad), {:.1}s",
            rings.len(),
            took.as_secs_f64()
        ),
    )
}

fn combine(pair_a: &SplitPair, pair_b: &SplitPair, subtract: bool) -> SplitPair {
    let (mut plus, mut minus) = (pair_a.plus.clone(), pair_a.minus.clone());
    if subtract {
        plus.sub_assign(&pair_b.plus).unwrap();
        minus.sub_assign(&pair_b.minus).unwrap();
    } else {
        plus.add_assign(&pair_b.plus).unwrap();
        minus.add_assign(&pair_b.minus).unwrap();
    }
    SplitPair { plus, minus }
}

fn split_join(ctxs: &[Context]) -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    let mut details = Vec::new();
    for two_n in [16usize, 1 << 15] {
        // the full-size parent is a Set-2 prime; the product oracle there is the
        // native degree-2N transform, checked against schoolbook at small sizes
        let parent = if two_n == 16 {
            let q = Modulus::new(18014398509404161).unwrap();
            Ring::standard(q, two_n, q.root_of_unity(2 * two_n as u64).unwrap()).unwrap()
        } else {
            *ctxs[1].ring(1)
        };
        let q = parent.modulus();
        let mut bad = 0;
        for _ in 0..SPLIT_INSTANCES {
            let a = random_vec(&mut rng, two_n, q.value());
            let b = random_vec(&mut rng, two_n, q.value());
            let pa: ResiduePoly = parent.poly(Domain::Coefficient, a.clone()).unwrap();
            let pb = parent.poly(Domain::Coefficient, b.clone()).unwrap();
            let (sa, sb) = (split(&pa).unwrap(), split(&pb).unwrap());
            let mut ok = join(&sa).unwrap() == pa;
            let mut sum = pa.clone();
            sum.add_assign(&pb).unwrap();
            ok &= join(&combine(&sa, &sb, false)).unwrap() == sum;
            let mut diff = pa.clone();
            diff.sub_assign(&pb).unwrap();
            ok &= join(&combine(&sa, &sb, true)).unwrap() == diff;
            let product = split_mul_check(&pa, &pb).unwrap();
            ok &= if two_n == 16 {
                product.data() == schoolbook(&a, &b, q.value() - 1, q.value()).as_slice()
            } else {
                product == pa.ring_mul(&pb).unwrap()
            };
            bad += usize::from(!ok);
        }
        failures += bad;
        details.push(format!("2N={two_n}: {bad}/{SPLIT_INSTANCES} bad"));
    }
    let took = start.elapsed();
    details.push(format!("{:.1}s", took.as_secs_f64()));
    verdict(failures == 0 && took < SPLIT_BUDGET, details.join(", "))
}

fn run_preset(ctx: &Context, name: &str) -> RunReport {
    let w = Workload::preset(name, ctx).unwrap();
    let s = Session::new(ctx, 2024, &w.rotations()).unwrap();
    run(&s, &w, &RunOptions { backend: Backend::Library, timing: None }).unwrap()
}

fn accuracy(ctxs: &[Context]) -> Verdict {
    let mut pass = true;
    let mut details = Vec::new();
    for ctx in &ctxs[..2] {
        let one = run_preset(ctx, "depth1").outputs[0].max_rel_error;
        let chain = run_preset(ctx, "chain").outputs[0].max_rel_error;
        pass &= one < SINGLE_DEPTH_BOUND && chain < CHAIN_BOUND;
        details.push(format!("{}: depth 2^{:.1}, chain 2^{:.1}", ctx.params().name, one.log2(), chain.log2()));
    }
    verdict(pass, details.join("; "))
}

fn fresh(s: &Session<'_>, seed: u64) -> Ciphertext {
    let mut rng = sampling::stream(seed, 1);
    let values: Vec<Complex64> = (0..s.encoder().slots()).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..6.28))).collect();
    let pt = s.encoder().encode(&values, &Scale::pow2(s.ctx.params().log_scale)).unwrap();
    encrypt(s.ctx, &s.public, &pt, s.ctx.max_level(), &mut rng).unwrap()
}

fn eval_words(ct: &Ciphertext) -> Vec<Vec<u64>> {
    ct.parts().iter().flat_map(|p| p.limbs().iter().map(|l| l.eval_data())).collect()
}

fn twins(split_ctx: &Context) -> Verdict {
    let native = Context::new(ParamSet::set2_native()).unwrap();
    let trace = |ctx: &Context| {
        let s = Session::new(ctx, 77, &[1]).unwrap();
        let (a, b) = (fresh(&s, 1), fresh(&s, 2));
        let m = heaan::mult_relin(ctx, &a, &b, &s.keys).unwrap();
        let r = heaan::rescale(ctx, &m).unwrap();
        let rot = heaan::rotate(ctx, &r, 1, &s.keys).unwrap();
        [a, m, r, rot].iter().map(eval_words).collect::<Vec<_>>()
    };
    let (s, n) = (trace(split_ctx), trace(&native));
    let words: usize = s.iter().flatten().map(Vec::len).sum();
    verdict(s == n, format!("fresh, mult_relin, rescale, rotate: {words} words compared"))
}

fn cycles(op: HeOp, shape: Shape, costs: &CostModel) -> u64 {
    simulate(&compile(op, shape).unwrap(), costs, &MachineConfig::default()).unwrap().total
}

fn table_rows() -> Verdict {
    let costs = CostModel::default();
    let m = MachineConfig::default();
    let mut pass = true;
    let mut details = Vec::new();
    for (rows, tol) in [(compare(&set1_reference(), &costs, &m).unwrap(), SET1_TOLERANCE), (compare(&set2_reference(), &costs, &m).unwrap(), SET2_TOLERANCE)] {
        for row in rows {
            pass &= row.rel_error.abs() <= tol;
            if row.mode == "split" {
                pass &= row.rel_error.abs() <= SET2_CALIBRATED_TOLERANCE;
            }
            details.push(format!("{} {} {} ({:+.1}%)", row.mode, row.op, row.simulated, 100.0 * row.rel_error));
        }
    }
    verdict(pass, details.join(", "))
}

fn dual_issue() -> Verdict {
    let s = &dual_issue_savings(&[HeOp::MultRelin], set1_shape(), &CostModel::default(), &MachineConfig::default()).unwrap()[0];
    verdict(
        (s.reduction - DUAL_ISSUE_TARGET).abs() <= DUAL_ISSUE_TOLERANCE,
        format!("serial {} -> dual issue {}, {:.1}% fewer cycles", s.serial, s.dual_issue, 100.0 * s.reduction),
    )
}

fn lower_bound() -> Verdict {
    let costs = CostModel::default();
    let one = cycles(HeOp::MultRelin, set1_shape(), &costs);
    let two = cycles(HeOp::MultRelin, set2_shape(), &costs);
    let ratio = two as f64 / one as f64;
    verdict(one >= NTT_CYCLES * 8 && ratio > 2.0, format!("set1 {one} >= {}, set2/set1 = {ratio:.2}", NTT_CYCLES * 8))
}

fn memory(set1: &Context) -> Verdict {
    let r = audit(&compile(HeOp::MultRelin, set1_shape()).unwrap());
    let s = Session::new(set1, 3, &[]).unwrap();
    let key = s.keys.relin().unwrap();
    let rebuilt = KeySwitchKey::from_secret(set1, key.seed(), key.tag(), key.secret_parts().to_vec()).unwrap();
    let (a, b) = (fresh(&s, 11), fresh(&s, 12));
    let program = compile(HeOp::MultRelin, Shape::new(set1, set1.max_level())).unwrap();
    let inputs = [Input::Ciphertext(&a), Input::Ciphertext(&b)];
    let same = execute(set1, &program, &inputs, Some(key)).unwrap() == execute(set1, &program, &inputs, Some(&rebuilt)).unwrap();
    verdict(
        r.high_water <= SLOTS_PER_RPAU && same,
        format!("high-water {} slots per RPAU, regenerated key output identical: {same}", r.high_water),
    )
}

fn logreg() -> (Verdict, Verdict) {
    let ctx = Context::new(ParamSet::logreg()).unwrap();
    let w = Workload::logreg(&ctx);
    let counts = w.counts();
    let shape = (counts["rotate"], counts["rescale"], counts["mult_relin"]);
    let s = Session::new(&ctx, 2024, &w.rotations()).unwrap();
    let r = run(&s, &w, &RunOptions { backend: Backend::Library, timing: Some(Default::default()) }).unwrap();
    let t = r.timing.expect("timed run");
    let total = t.total_cycles as f64;
    let cycles = verdict(
        shape == (7, 11, 5) && (total / LOGREG_CYCLES - 1.0).abs() <= LOGREG_CYCLE_TOLERANCE,
        format!("{} rotate / {} rescale / {} mult_relin, {} cycles ({:+.1}%)", shape.0, shape.1, shape.2, t.total_cycles, 100.0 * (total / LOGREG_CYCLES - 1.0)),
    );
    let err = t.instructions as f64 / LOGREG_INSTRUCTIONS - 1.0;
    let instructions = verdict(
        err.abs() <= LOGREG_INSTRUCTION_TOLERANCE,
        format!("{} instructions vs {LOGREG_INSTRUCTIONS} ({:+.1}%), soft target, not enforced", t.instructions, 100.0 * err),
    );
    (cycles, instructions)
}

fn main() {
    let ctxs = contexts();
    let mut hard_failures = 0;
    let mut report = |id: &str, name: &str, v: Verdict, hard: bool| {
        println!("{} {id:<3} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        hard_failures += usize::from(hard && !v.pass);
    };
    report("1", "pseudo-Mersenne and Barrett reduction", reduction(&ctxs), true);
    report("2", "transform round trip and schoolbook products", transforms(&ctxs), true);
    report("3", "split/join identity and split arithmetic", split_join(&ctxs), true);
    report("4", "precision bounds, set1 native and set2 split", accuracy(&ctxs), true);
    report("5", "set2 split equals native 2^15 bit for bit", twins(&ctxs[1]), true);
    report("6", "per-operation cycle table", table_rows(), true);
    report("7", "dual-issue saving on set1 mult_relin", dual_issue(), true);
    report("8", "mult_relin transform lower bound and scaling", lower_bound(), true);
    report("9", "slot budget and key regeneration", memory(&ctxs[0]), true);
    let (cycles, instructions) = logreg();
    report("10a", "logistic regression cycles and shape", cycles, true);
    report("10b", "logistic regression instruction count", instructions, false);
    if hard_failures > 0 {
        println!("{hard_failures} criteria failed");
        std::process::exit(1);
    }
}
