mod common;

use common::*;
use flexhe::params::DegreeMode;
use flexhe_archsim::compile::{compile, HeOp, Shape};
use flexhe_archsim::cost::{CostModel, MachineConfig};
use flexhe_archsim::isa::{Opcode, Pipe, Program};
use flexhe_archsim::sim::{schedule, simulate, Schedule};
use flexhe::scale::Scale;
use flexhe_archsim::workload::{run_with_outputs, Backend, PlainScale, RunOptions, SlotGen, Step, Workload};
use proptest::prelude::*;

fn op_strategy() -> impl Strategy<Value = HeOp> {
    prop_oneof![
        Just(HeOp::Add),
        Just(HeOp::Sub),
        Just(HeOp::MultRelin),
        Just(HeOp::Rescale),
        Just(HeOp::ModDown),
        Just(HeOp::MulPlain),
        Just(HeOp::AddPlain),
        (1usize..64).prop_map(|k| HeOp::Rotate { galois: 2 * k + 1 }),
    ]
}

fn program_strategy() -> impl Strategy<Value = Program> {
    (op_strategy(), prop::bool::ANY, 2usize..10, 0usize..8).prop_map(|(op, split, max_level, drop)| {
        let mode = if split { DegreeMode::Split } else { DegreeMode::Native };
        let level = max_level - drop % (max_level - 1);
        compile(op, Shape { mode, level, max_level }).unwrap()
    })
}

fn costs_strategy() -> impl Strategy<Value = CostModel> {
    prop::collection::vec(1u64..10_000, 11).prop_map(|v| CostModel {
        ntt: v[0],
        intt: v[1],
        bcast: v[2],
        scale_qinv: v[3],
        cwise_main: v[4],
        dyadic: v[5],
        split: v[6],
        join: v[7],
        auto: v[8],
        split_surcharge: v[9] - 1,
        op_overhead: v[10] - 1,
    })
}

fn overlaps(s: &Schedule, i: usize, j: usize) -> bool {
    s.start[i] < s.end[j] && s.start[j] < s.end[i]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scheduling_is_deterministic(p in program_strategy(), c in costs_strategy(), serial in prop::bool::ANY) {
        let m = MachineConfig { serial, ..MachineConfig::default() };
        prop_assert_eq!(schedule(&p, &c, &m), schedule(&p, &c, &m));
        prop_assert_eq!(simulate(&p, &c, &m).unwrap(), simulate(&p, &c, &m).unwrap());
    }

    #[test]
    fn pipes_and_the_ring_are_exclusive(p in program_strategy(), c in costs_strategy(), serial in prop::bool::ANY) {
        let m = MachineConfig { serial, ..MachineConfig::default() };
        let s = schedule(&p, &c, &m);
        let lane = |o: Opcode| match o.pipe() {
            Pipe::Dyadic if serial => Pipe::Main,
            pipe => pipe,
        };
        for i in 0..p.instrs.len() {
            for j in i + 1..p.instrs.len() {
                let (a, b) = (&p.instrs[i], &p.instrs[j]);
                let (la, lb) = (lane(a.op.opcode()), lane(b.op.opcode()));
                if la != lb || la == Pipe::None || !overlaps(&s, i, j) {
                    continue;
                }
                prop_assert!(la != Pipe::Ring, "broadcasts {} and {} overlap", i, j);
                prop_assert!(a.mask.0 & b.mask.0 == 0, "instructions {} and {} share a pipe", i, j);
            }
        }
    }

    #[test]
    fn conflicting_slot_accesses_are_ordered(p in program_strategy(), c in costs_strategy()) {
        let s = schedule(&p, &c, &MachineConfig::default());
        let touches = |k: usize| {
            let i = &p.instrs[k];
            let mut reads: Vec<(usize, u8)> = i.mask.iter().flat_map(|r| i.op.reads().into_iter().map(move |x| (r, x))).collect();
            if let Some((from, src)) = i.op.source_reads() {
                reads.extend(src.into_iter().map(|x| (from, x)));
            }
            let writes: Vec<(usize, u8)> = i.mask.iter().flat_map(|r| i.op.writes().into_iter().map(move |x| (r, x))).collect();
            (reads, writes)
        };
        for i in 0..p.instrs.len() {
            let (ri, wi) = touches(i);
            for j in i + 1..p.instrs.len() {
                let (rj, wj) = touches(j);
                let conflict = wi.iter().any(|x| rj.contains(x) || wj.contains(x)) || ri.iter().any(|x| wj.contains(x));
                if conflict {
                    prop_assert!(s.start[j] >= s.end[i], "{} must follow {}", j, i);
                }
            }
        }
    }

    #[test]
    fn totals_dominate_every_pipe(p in program_strategy(), c in costs_strategy()) {
        let r = simulate(&p, &c, &MachineConfig::default()).unwrap();
        prop_assert!(r.busy.values().all(|&b| b <= r.makespan));
        prop_assert_eq!(r.total, r.makespan + c.op_overhead);
    }
}

fn build(ops: &[u8], top: usize) -> Workload {
    let mut w = Workload::preset("empty", &toy_native()).unwrap();
    let (mut x, mut level) = (w.fresh(top, Scale::pow2(40), SlotGen::UnitCircle), top);
    for &o in ops {
        x = match o {
            0 => {
                let r = w.rotate(x, 1);
                w.add(x, r)
            }
            1 if level > 1 => {
                level -= 1;
                let m = w.mult_relin(x, x);
                w.rescale(m)
            }
            1 => w.mult_relin(x, x),
            2 => w.rotate(x, -1),
            3 if level > 1 => {
                level -= 1;
                let m = w.mul_plain(x, SlotGen::Uniform { lo: -1.0, hi: 1.0 }, PlainScale::Landing(Scale::pow2(30)));
                w.rescale(m)
            }
            3 => w.mul_plain(x, SlotGen::Constant(3.0), PlainScale::Fixed(Scale::integer(3))),
            4 => w.add_plain(x, SlotGen::Constant(0.25), PlainScale::Landing(Scale::one())),
            _ => {
                let l = w.drop_level(x, level.max(2) - 1);
                level = level.max(2) - 1;
                l
            }
        };
        if matches!(w.steps[x], Step::MultRelin(..)) {
            break;
        }
    }
    w.output(x);
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn executor_and_library_agree_on_random_workloads(ops in prop::collection::vec(0u8..6, 1..7), split in prop::bool::ANY) {
        let ctx = if split { toy_split() } else { toy_native() };
        let s = session(&ctx);
        let w = build(&ops, ctx.max_level());
        let (lib, lib_cts) = run_with_outputs(&s, &w, &RunOptions { backend: Backend::Library, timing: None }).unwrap();
        let (acc, acc_cts) = run_with_outputs(&s, &w, &RunOptions { backend: Backend::Accelerator, timing: None }).unwrap();
        prop_assert_eq!(lib_cts, acc_cts);
        prop_assert_eq!(lib.outputs, acc.outputs);
    }
}
