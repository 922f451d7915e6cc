//! Workloads: straight-line programs over ciphertexts, run functionally and
//! optionally timed on the accelerator model.

use std::collections::{BTreeMap, HashMap};

use flexhe::heaan::{self, Ciphertext, RnsPoly};
use flexhe::keys::{decrypt, encrypt, sampling, Encoder, EvalKeys, KeyGenerator, Plaintext, PublicKey, SecretKey};
use flexhe::params::Context;
use flexhe::scale::Scale;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::compile::{compile, HeOp, Shape};
use crate::cost::{CostModel, MachineConfig};
use crate::exec::{execute, Input};
use crate::isa::Program;
use crate::sim::simulate;
use crate::{Error, Result};

pub type ValueId = usize;

/// How slot values of an input are drawn.
#[derive(Clone, Debug, PartialEq)]
pub enum SlotGen {
    /// Uniform on the complex unit circle.
    UnitCircle,
    /// Real, uniform in `[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    Constant(f64),
    /// Ones in the first `len` slots, zeros elsewhere.
    Prefix { len: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlainScale {
    Fixed(Scale),
    /// Chosen per use so that multiplying and then rescaling lands exactly here.
    Landing(Scale),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plain {
    pub values: SlotGen,
    pub scale: PlainScale,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Fresh { level: usize, scale: Scale, values: SlotGen },
    Add(ValueId, ValueId),
    Sub(ValueId, ValueId),
    MultRelin(ValueId, ValueId),
    Rescale(ValueId),
    Rotate(ValueId, i64),
    MulPlain(ValueId, Plain),
    AddPlain(ValueId, Plain),
    DropLevel(ValueId, usize),
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::Fresh { .. } => "fresh",
            Step::Add(..) => "add",
            Step::Sub(..) => "sub",
            Step::MultRelin(..) => "mult_relin",
            Step::Rescale(..) => "rescale",
            Step::Rotate(..) => "rotate",
            Step::MulPlain(..) => "mul_plain",
            Step::AddPlain(..) => "add_plain",
            Step::DropLevel(..) => "drop_level",
        }
    }
}

/// Every step defines one value; a value's id is its step index.
#[derive(Clone, Debug, PartialEq)]
pub struct Workload {
    pub name: String,
    pub steps: Vec<Step>,
    pub outputs: Vec<ValueId>,
}

pub const PRESETS: [&str; 8] = ["empty", "add", "mult-relin", "rescale", "rotate", "depth1", "chain", "logreg"];

/// Multiply-and-rescale rounds of the `chain` preset.
pub fn chain_rounds(ctx: &Context) -> usize {
    7.min(ctx.max_level() - 1)
}

impl Workload {
    fn new(name: &str) -> Self {
        Self { name: name.into(), steps: vec![], outputs: vec![] }
    }

    fn push(&mut self, step: Step) -> ValueId {
        self.steps.push(step);
        self.steps.len() - 1
    }

    pub fn fresh(&mut self, level: usize, scale: Scale, values: SlotGen) -> ValueId {
        self.push(Step::Fresh { level, scale, values })
    }

    pub fn add(&mut self, a: ValueId, b: ValueId) -> ValueId {
        self.push(Step::Add(a, b))
    }

    pub fn mult_relin(&mut self, a: ValueId, b: ValueId) -> ValueId {
        self.push(Step::MultRelin(a, b))
    }

    pub fn rescale(&mut self, a: ValueId) -> ValueId {
        self.push(Step::Rescale(a))
    }

    pub fn rotate(&mut self, a: ValueId, steps: i64) -> ValueId {
        self.push(Step::Rotate(a, steps))
    }

    pub fn mul_plain(&mut self, a: ValueId, values: SlotGen, scale: PlainScale) -> ValueId {
        self.push(Step::MulPlain(a, Plain { values, scale }))
    }

    pub fn add_plain(&mut self, a: ValueId, values: SlotGen, scale: PlainScale) -> ValueId {
        self.push(Step::AddPlain(a, Plain { values, scale }))
    }

    pub fn drop_level(&mut self, a: ValueId, level: usize) -> ValueId {
        self.push(Step::DropLevel(a, level))
    }

    pub fn output(&mut self, v: ValueId) {
        self.outputs.push(v);
    }

    pub fn preset(name: &str, ctx: &Context) -> Result<Self> {
        let top = ctx.max_level();
        let delta = Scale::pow2(ctx.params().log_scale);
        let mut w = Workload::new(name);
        match name {
            "empty" => {}
            "add" => {
                let x = w.fresh(top, delta.clone(), SlotGen::UnitCircle);
                let y = w.fresh(top, delta, SlotGen::UnitCircle);
                let z = w.add(x, y);
                w.output(z);
            }
            "mult-relin" => {
                let x = w.fresh(top, delta.clone(), SlotGen::UnitCircle);
                let y = w.fresh(top, delta, SlotGen::UnitCircle);
                let z = w.mult_relin(x, y);
                w.output(z);
            }
            "rescale" => {
                let x = w.fresh(top, delta.mul_int(ctx.modulus(top - 1).value()), SlotGen::UnitCircle);
                let z = w.rescale(x);
                w.output(z);
            }
            "rotate" => {
                let x = w.fresh(top, delta, SlotGen::UnitCircle);
                let z = w.rotate(x, 1);
                w.output(z);
            }
            "depth1" => return Ok(Self::chain(ctx, 1)),
            "chain" => return Ok(Self::chain(ctx, chain_rounds(ctx))),
            "logreg" => return Ok(Self::logreg(ctx)),
            _ => return Err(Error::Unsupported(format!("unknown workload {name:?}; expected one of {}", PRESETS.join(", ")))),
        }
        Ok(w)
    }

    /// `rounds` multiply-and-rescale steps. Each factor is encrypted at the
    /// prime about to be dropped, so the scale stays exactly `2^log_scale`.
    pub fn chain(ctx: &Context, rounds: usize) -> Self {
        let top = ctx.max_level();
        let mut w = Workload::new(if rounds == 1 { "depth1" } else { "chain" });
        let mut x = w.fresh(top, Scale::pow2(ctx.params().log_scale), SlotGen::UnitCircle);
        for r in 0..rounds {
            let level = top - r;
            let y = w.fresh(level, Scale::integer(ctx.modulus(level - 1).value()), SlotGen::UnitCircle);
            let p = w.mult_relin(x, y);
            x = w.rescale(p);
        }
        w.output(x);
        w
    }

    /// One logistic-regression inference: inner product by rotate-and-sum,
    /// then a degree-7 odd polynomial approximation of the sigmoid.
    pub fn logreg(ctx: &Context) -> Self {
        const FEATURES_LOG: u32 = 5;
        const SIGMOID: [f64; 4] = [0.216884, -8.19276e-3, 1.65861e-4, -1.19581e-6];
        let top = ctx.max_level();
        let delta = Scale::pow2(ctx.params().log_scale);
        let land = || PlainScale::Landing(Scale::pow2(ctx.params().log_scale));
        let mut w = Workload::new("logreg");
        let x = w.fresh(top, delta, SlotGen::Uniform { lo: -1.0, hi: 1.0 });
        let wx = w.mul_plain(x, SlotGen::Uniform { lo: -0.5, hi: 0.5 }, land());
        let mut z = w.rescale(wx);
        for k in 0..FEATURES_LOG {
            let r = w.rotate(z, 1 << k);
            z = w.add(z, r);
        }
        let square = |w: &mut Workload, a, b| {
            let p = w.mult_relin(a, b);
            w.rescale(p)
        };
        let z2 = square(&mut w, z, z);
        let z4 = square(&mut w, z2, z2);
        let z_at_z2 = w.drop_level(z, top - 2);
        let z3 = square(&mut w, z2, z_at_z2);
        let z_at_z4 = w.drop_level(z, top - 3);
        let z5 = square(&mut w, z4, z_at_z4);
        let z7 = square(&mut w, z4, z3);
        let coeff = |w: &mut Workload, v, a: f64| {
            let p = w.mul_plain(v, SlotGen::Constant(a), land());
            w.rescale(p)
        };
        let masked_mul = w.mul_plain(z, SlotGen::Prefix { len: 1 << FEATURES_LOG }, land());
        let masked = w.rescale(masked_mul);
        let terms = [(masked, SIGMOID[0]), (z3, SIGMOID[1]), (z5, SIGMOID[2]), (z7, SIGMOID[3])].map(|(v, a)| coeff(&mut w, v, a));
        let mut sum = w.drop_level(terms[0], 1);
        for &t in &terms[1..] {
            let t = w.drop_level(t, 1);
            sum = w.add(sum, t);
        }
        let mut y = w.add_plain(sum, SlotGen::Constant(0.5), land());
        for r in [-1, -2] {
            let t = w.rotate(y, r);
            y = w.add(y, t);
        }
        w.output(y);
        w
    }

    pub fn rotations(&self) -> Vec<i64> {
        let mut r: Vec<i64> = self.steps.iter().filter_map(|s| if let Step::Rotate(_, k) = s { Some(*k) } else { None }).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    /// Number of steps per kind.
    pub fn counts(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for s in &self.steps {
            *m.entry(s.name()).or_default() += 1;
        }
        m
    }
}

/// Keys and encoder for one parameter set and seed.
pub struct Session<'a> {
    pub ctx: &'a Context,
    pub seed: u64,
    pub secret: SecretKey,
    pub public: PublicKey,
    pub keys: EvalKeys,
    encoder: Encoder,
}

const LABEL_VALUES: u64 = 0x5641_4c55;
const LABEL_ENCRYPT: u64 = 0x454e_4352;

impl<'a> Session<'a> {
    pub fn new(ctx: &'a Context, seed: u64, rotations: &[i64]) -> Result<Self> {
        let gen = KeyGenerator::new(ctx, seed);
        let secret = gen.secret_key()?;
        let public = gen.public_key(&secret)?;
        let keys = gen.eval_keys(&secret, rotations)?;
        Ok(Self { ctx, seed, secret, public, keys, encoder: Encoder::new(ctx.degree())? })
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }
}

/// Which implementation computes the ciphertexts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// The software library.
    Library,
    /// The compiled instruction streams on the functional executor.
    Accelerator,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub backend: Backend,
    /// Time every operation on this machine.
    pub timing: Option<(CostModel, MachineConfig)>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { backend: Backend::Library, timing: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub index: usize,
    pub op: String,
    pub level: usize,
    pub cycles: Option<u64>,
    pub instructions: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputRecord {
    pub value: ValueId,
    pub level: usize,
    pub log2_scale: f64,
    pub max_abs_error: f64,
    /// Largest slot error over the largest expected slot magnitude.
    pub max_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpTotals {
    pub count: usize,
    pub cycles: u64,
    pub instructions: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub total_cycles: u64,
    pub instructions: usize,
    pub clock_mhz: f64,
    pub latency_us: f64,
    /// Workloads per second; absent for an empty workload.
    pub throughput: Option<f64>,
    pub peak_slots: usize,
    pub per_op: BTreeMap<String, OpTotals>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub workload: String,
    pub param_set: String,
    pub seed: u64,
    pub backend: Backend,
    pub steps: Vec<StepRecord>,
    pub outputs: Vec<OutputRecord>,
    pub timing: Option<Timing>,
}

/// A ciphertext with the exact slot values it should decrypt to.
pub struct Tracked {
    pub ct: Ciphertext,
    pub expected: Vec<Complex64>,
}

fn generate(gen: &SlotGen, slots: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..slots)
        .map(|j| match *gen {
            SlotGen::UnitCircle => Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU)),
            SlotGen::Uniform { lo, hi } => Complex64::new(rng.gen_range(lo..hi), 0.0),
            SlotGen::Constant(c) => Complex64::new(c, 0.0),
            SlotGen::Prefix { len } => Complex64::new(if j < len { 1.0 } else { 0.0 }, 0.0),
        })
        .collect()
}

pub fn lift(ctx: &Context, pt: &Plaintext, level: usize) -> Result<RnsPoly> {
    Ok(RnsPoly::from_wide(ctx, &pt.coeffs, &(0..level).collect::<Vec<_>>())?)
}

/// Runs one operation through a compiled program on the functional executor.
pub fn accelerate(ctx: &Context, keys: &EvalKeys, op: HeOp, a: &Ciphertext, b: Option<&Ciphertext>, plain: Option<&Plaintext>) -> Result<Ciphertext> {
    let program = compile(op, Shape::new(ctx, a.level()))?;
    let lifted = plain.map(|p| lift(ctx, p, a.level())).transpose()?;
    let mut inputs = vec![Input::Ciphertext(a)];
    if let Some(b) = b {
        inputs.push(Input::Ciphertext(b));
    }
    if let Some(p) = &lifted {
        inputs.push(Input::Plaintext(p));
    }
    let missing = |what: String| Error::Unsupported(format!("no key for {what}"));
    let key = match op {
        HeOp::MultRelin => Some(keys.relin().ok_or_else(|| missing("relinearization".into()))?),
        HeOp::Rotate { galois } => Some(keys.galois(galois).ok_or_else(|| missing(format!("Galois element {galois}")))?),
        _ => None,
    };
    let parts = execute(ctx, &program, &inputs, key)?;
    let scale = match op {
        HeOp::MultRelin => a.scale().mul(b.expect("two operands").scale()),
        HeOp::Rescale => a.scale().div_int(ctx.modulus(a.level() - 1).value()),
        HeOp::MulPlain => a.scale().mul(&plain.expect("plaintext operand").scale),
        _ => a.scale().clone(),
    };
    Ok(Ciphertext::new(parts, scale)?)
}

struct Timer {
    costs: CostModel,
    machine: MachineConfig,
    cache: HashMap<(HeOp, Shape), (u64, usize, usize)>,
}

impl Timer {
    fn time(&mut self, op: HeOp, shape: Shape) -> Result<(u64, usize, usize)> {
        if let Some(&t) = self.cache.get(&(op, shape)) {
            return Ok(t);
        }
        let program: Program = compile(op, shape)?;
        let r = simulate(&program, &self.costs, &self.machine)?;
        let t = (r.total, r.instructions, r.memory.high_water);
        self.cache.insert((op, shape), t);
        Ok(t)
    }
}

pub fn run(session: &Session<'_>, workload: &Workload, options: &RunOptions) -> Result<RunReport> {
    run_with_outputs(session, workload, options).map(|(report, _)| report)
}

/// [`run`], also returning the output ciphertexts.
pub fn run_with_outputs(session: &Session<'_>, workload: &Workload, options: &RunOptions) -> Result<(RunReport, Vec<Ciphertext>)> {
    let ctx = session.ctx;
    let slots = session.encoder.slots();
    let mut value_rng = sampling::stream(session.seed, LABEL_VALUES);
    let mut enc_rng = sampling::stream(session.seed, LABEL_ENCRYPT);
    let mut timer = options.timing.clone().map(|(costs, machine)| Timer { costs, machine, cache: HashMap::new() });
    let mut values: Vec<Tracked> = Vec::with_capacity(workload.steps.len());
    let mut records = Vec::new();
    let mut per_op: BTreeMap<String, OpTotals> = BTreeMap::new();
    let mut peak_slots = 0;

    for (index, step) in workload.steps.iter().enumerate() {
        let get = |v: ValueId| -> Result<&Tracked> {
            values.get(v).ok_or_else(|| Error::Unsupported(format!("step {index} uses value {v} before it is defined")))
        };
        let mut plain = |p: &Plain, ct: &Ciphertext, product: bool| -> Result<(Plaintext, Vec<Complex64>)> {
            let vals = generate(&p.values, slots, &mut value_rng);
            let scale = match &p.scale {
                PlainScale::Fixed(s) => s.clone(),
                PlainScale::Landing(t) if product => t.mul_int(ctx.modulus(ct.level() - 1).value()).div(ct.scale()),
                PlainScale::Landing(_) => ct.scale().clone(),
            };
            Ok((session.encoder.encode(&vals, &scale)?, vals))
        };
        let zip = |a: &[Complex64], b: &[Complex64], f: fn(Complex64, Complex64) -> Complex64| -> Vec<Complex64> {
            a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
        };
        let level;
        let mut op = None;
        let tracked = match step {
            Step::Fresh { level: l, scale, values: gen } => {
                let vals = generate(gen, slots, &mut value_rng);
                let pt = session.encoder.encode(&vals, scale)?;
                level = *l;
                Tracked { ct: encrypt(ctx, &session.public, &pt, *l, &mut enc_rng)?, expected: vals }
            }
            Step::DropLevel(a, l) => {
                let a = get(*a)?;
                level = *l;
                Tracked { ct: heaan::drop_to_level(&a.ct, *l)?, expected: a.expected.clone() }
            }
            Step::Add(a, b) | Step::Sub(a, b) | Step::MultRelin(a, b) => {
                let (a, b) = (get(*a)?, get(*b)?);
                level = a.ct.level();
                let (he, f): (HeOp, fn(Complex64, Complex64) -> Complex64) = match step {
                    Step::Add(..) => (HeOp::Add, |x, y| x + y),
                    Step::Sub(..) => (HeOp::Sub, |x, y| x - y),
                    _ => (HeOp::MultRelin, |x, y| x * y),
                };
                op = Some(he);
                let ct = match options.backend {
                    Backend::Accelerator => accelerate(ctx, &session.keys, he, &a.ct, Some(&b.ct), None)?,
                    Backend::Library => match he {
                        HeOp::Add => heaan::add(&a.ct, &b.ct)?,
                        HeOp::Sub => heaan::sub(&a.ct, &b.ct)?,
                        _ => heaan::mult_relin(ctx, &a.ct, &b.ct, &session.keys)?,
                    },
                };
                Tracked { ct, expected: zip(&a.expected, &b.expected, f) }
            }
            Step::Rescale(a) => {
                let a = get(*a)?;
                level = a.ct.level();
                op = Some(HeOp::Rescale);
                let ct = match options.backend {
                    Backend::Accelerator => accelerate(ctx, &session.keys, HeOp::Rescale, &a.ct, None, None)?,
                    Backend::Library => heaan::rescale(ctx, &a.ct)?,
                };
                Tracked { ct, expected: a.expected.clone() }
            }
            Step::Rotate(a, k) => {
                let a = get(*a)?;
                level = a.ct.level();
                let galois = heaan::galois_element(ctx.degree(), *k);
                let shift = k.rem_euclid(slots as i64) as usize;
                let expected = (0..slots).map(|j| a.expected[(j + shift) % slots]).collect();
                let ct = if galois == 1 {
                    a.ct.clone()
                } else {
                    op = Some(HeOp::Rotate { galois });
                    match options.backend {
                        Backend::Accelerator => accelerate(ctx, &session.keys, HeOp::Rotate { galois }, &a.ct, None, None)?,
                        Backend::Library => heaan::rotate(ctx, &a.ct, *k, &session.keys)?,
                    }
                };
                Tracked { ct, expected }
            }
            Step::MulPlain(a, p) | Step::AddPlain(a, p) => {
                let a = get(*a)?;
                level = a.ct.level();
                let product = matches!(step, Step::MulPlain(..));
                let (pt, vals) = plain(p, &a.ct, product)?;
                let he = if product { HeOp::MulPlain } else { HeOp::AddPlain };
                op = Some(he);
                let ct = match (options.backend, product) {
                    (Backend::Accelerator, _) => accelerate(ctx, &session.keys, he, &a.ct, None, Some(&pt))?,
                    (Backend::Library, true) => heaan::mul_plain(ctx, &a.ct, &pt)?,
                    (Backend::Library, false) => heaan::add_plain(ctx, &a.ct, &pt)?,
                };
                let f: fn(Complex64, Complex64) -> Complex64 = if product { |x, y| x * y } else { |x, y| x + y };
                Tracked { ct, expected: zip(&a.expected, &vals, f) }
            }
        };
        let (mut cycles, mut instructions) = (None, None);
        if let (Some(t), Some(he)) = (timer.as_mut(), op) {
            let (c, n, slots_used) = t.time(he, Shape::new(ctx, level))?;
            cycles = Some(c);
            instructions = Some(n);
            peak_slots = peak_slots.max(slots_used);
            let e = per_op.entry(he.name().to_string()).or_insert(OpTotals { count: 0, cycles: 0, instructions: 0 });
            e.count += 1;
            e.cycles += c;
            e.instructions += n;
        }
        records.push(StepRecord { index, op: step.name().into(), level, cycles, instructions });
        values.push(tracked);
    }

    let outputs = workload
        .outputs
        .iter()
        .map(|&v| {
            let t = values.get(v).ok_or_else(|| Error::Unsupported(format!("output {v} is not defined")))?;
            let got = decrypt(ctx, &session.secret, &t.ct)?;
            let max_abs_error = got.iter().zip(&t.expected).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            let peak = t.expected.iter().map(|y| y.norm()).fold(0.0, f64::max);
            Ok(OutputRecord {
                value: v,
                level: t.ct.level(),
                log2_scale: t.ct.scale().log2(),
                max_abs_error,
                max_rel_error: if peak > 0.0 { max_abs_error / peak } else { max_abs_error },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let timing = timer.map(|t| {
        let total_cycles = records.iter().filter_map(|r| r.cycles).sum();
        Timing {
            total_cycles,
            instructions: records.iter().filter_map(|r| r.instructions).sum(),
            clock_mhz: t.machine.clock_mhz,
            latency_us: total_cycles as f64 / t.machine.clock_mhz,
            throughput: (total_cycles > 0).then(|| 1e6 * t.machine.clock_mhz / total_cycles as f64),
            peak_slots,
            per_op,
        }
    });
    let cts = workload.outputs.iter().map(|&v| values[v].ct.clone()).collect();
    let report = RunReport {
        workload: workload.name.clone(),
        param_set: ctx.params().name.clone(),
        seed: session.seed,
        backend: options.backend,
        steps: records,
        outputs,
        timing,
    };
    Ok((report, cts))
}
