//! Greedy in-order scheduler.
//!
//! Each pipe of each RPAU issues its instructions in program order. An
//! instruction starts once its pipe is free on every masked RPAU, every slot
//! it touches is free of conflicting accesses, the broadcast ring is free (for
//! BCAST) and every instruction before the latest SYNC_CTRL has finished.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::audit::{audit, MemoryReport};
use crate::cost::{CostModel, MachineConfig};
use crate::isa::{Opcode, Pipe, Program, Slot};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpcodeStat {
    pub opcode: String,
    pub count: usize,
    pub cycles: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub index: usize,
    pub opcode: String,
    pub mask: u64,
    pub start: u64,
    pub end: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleReport {
    pub program: String,
    /// Makespan plus the per-operation launch overhead.
    pub total: u64,
    pub makespan: u64,
    /// Busy cycles per pipe, maximum over RPAUs.
    pub busy: BTreeMap<String, u64>,
    pub histogram: Vec<OpcodeStat>,
    pub critical_path: Vec<TraceEntry>,
    pub memory: MemoryReport,
    /// Instructions excluding synchronization and END.
    pub instructions: usize,
    pub clock_mhz: f64,
    pub latency_us: f64,
}

impl CycleReport {
    /// Operations per second.
    pub fn throughput(&self) -> f64 {
        1e6 / self.latency_us
    }
}

/// Start and end of every instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub start: Vec<u64>,
    pub end: Vec<u64>,
    cause: Vec<Option<usize>>,
}

#[derive(Clone, Copy, Default)]
struct Access {
    time: u64,
    by: Option<usize>,
}

impl Access {
    fn bump(&mut self, time: u64, by: usize) {
        if time >= self.time {
            *self = Access { time, by: Some(by) };
        }
    }
}

#[derive(Default)]
struct Bound {
    time: u64,
    cause: Option<usize>,
}

impl Bound {
    fn at_least(&mut self, a: Access) {
        if a.time > self.time {
            self.time = a.time;
            self.cause = a.by;
        }
    }
}

fn pipe_index(pipe: Pipe, serial: bool) -> Option<usize> {
    match pipe {
        Pipe::Main => Some(0),
        Pipe::Dyadic if serial => Some(0),
        Pipe::Dyadic => Some(1),
        Pipe::Ring | Pipe::None => None,
    }
}

fn invalid(program: &Program, index: usize, reason: String) -> Error {
    Error::Program { program: program.name.clone(), index, reason }
}

/// Rejects programs that do not fit the machine or read undefined slots.
pub fn validate(program: &Program, machine: &MachineConfig) -> Result<()> {
    if program.rpaus > machine.rpaus {
        return Err(Error::Config(format!("{} needs {} RPAUs, the machine has {}", program.name, program.rpaus, machine.rpaus)));
    }
    let limit = low_bits(program.rpaus);
    let mut defined: HashSet<(usize, Slot)> = HashSet::new();
    for b in &program.inputs {
        b.mask.iter().for_each(|r| {
            defined.insert((r, b.slot));
        });
    }
    for (index, instr) in program.instrs.iter().enumerate() {
        if instr.mask.0 & !limit != 0 {
            return Err(invalid(program, index, format!("mask {:#x} exceeds {} RPAUs", instr.mask.0, program.rpaus)));
        }
        let slots = instr.op.reads().into_iter().chain(instr.op.writes());
        if let Some(s) = slots.clone().find(|&s| usize::from(s) >= machine.slots) {
            return Err(invalid(program, index, format!("slot {s} beyond {}", machine.slots)));
        }
        let mut reads: Vec<(usize, Slot)> = instr.mask.iter().flat_map(|r| instr.op.reads().into_iter().map(move |s| (r, s))).collect();
        if let Some((from, src)) = instr.op.source_reads() {
            if from >= program.rpaus {
                return Err(invalid(program, index, format!("broadcast from RPAU {from}")));
            }
            reads.extend(src.into_iter().map(|s| (from, s)));
        }
        if let Some(&(r, s)) = reads.iter().find(|k| !defined.contains(k)) {
            return Err(invalid(program, index, format!("reads undefined slot {s} on RPAU {r}")));
        }
        for r in instr.mask.iter() {
            for s in instr.op.writes() {
                defined.insert((r, s));
            }
        }
    }
    for b in &program.outputs {
        if let Some(r) = b.mask.iter().find(|&r| !defined.contains(&(r, b.slot))) {
            return Err(invalid(program, program.instrs.len(), format!("output slot {} undefined on RPAU {r}", b.slot)));
        }
    }
    Ok(())
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn schedule(program: &Program, costs: &CostModel, machine: &MachineConfig) -> Schedule {
    let n = program.rpaus;
    let slots = machine.slots;
    let mut written = vec![Access::default(); n * slots];
    let mut read = vec![Access::default(); n * slots];
    let mut pipes = vec![[Access::default(); 2]; n];
    let mut ring = Access::default();
    let mut barrier = Access::default();
    let mut latest = Access::default();
    let mut sched = Schedule { start: vec![], end: vec![], cause: vec![] };
    for (index, instr) in program.instrs.iter().enumerate() {
        let opcode = instr.op.opcode();
        let mut bound = Bound::default();
        bound.at_least(barrier);
        let pipe = pipe_index(opcode.pipe(), machine.serial);
        let reads = instr.op.reads();
        let writes = instr.op.writes();
        let source = instr.op.source_reads();
        for r in instr.mask.iter() {
            if let Some(p) = pipe {
                bound.at_least(pipes[r][p]);
            }
            for &s in &reads {
                bound.at_least(written[r * slots + usize::from(s)]);
            }
            for &s in &writes {
                bound.at_least(written[r * slots + usize::from(s)]);
                bound.at_least(read[r * slots + usize::from(s)]);
            }
        }
        if let Some((from, src)) = &source {
            for &s in src {
                bound.at_least(written[from * slots + usize::from(s)]);
            }
            bound.at_least(ring);
        }
        let start = bound.time;
        let end = start + costs.cycles(&instr.op);
        let stamp = |a: &mut Access| a.bump(end, index);
        for r in instr.mask.iter() {
            if let Some(p) = pipe {
                stamp(&mut pipes[r][p]);
            }
            reads.iter().for_each(|&s| stamp(&mut read[r * slots + usize::from(s)]));
            writes.iter().for_each(|&s| stamp(&mut written[r * slots + usize::from(s)]));
        }
        if let Some((from, src)) = &source {
            src.iter().for_each(|&s| stamp(&mut read[from * slots + usize::from(s)]));
            stamp(&mut ring);
        }
        stamp(&mut latest);
        if opcode == Opcode::SyncCtrl {
            barrier = latest;
        }
        sched.start.push(start);
        sched.end.push(end);
        sched.cause.push(bound.cause);
    }
    sched
}

pub fn simulate(program: &Program, costs: &CostModel, machine: &MachineConfig) -> Result<CycleReport> {
    costs.validate()?;
    machine.validate()?;
    validate(program, machine)?;
    let memory = audit(program);
    if memory.high_water > machine.slots {
        return Err(Error::Memory { program: program.name.clone(), needed: memory.high_water, available: machine.slots });
    }
    if memory.ksk_stored > machine.ksk_slots {
        return Err(Error::Memory { program: program.name.clone(), needed: memory.ksk_stored, available: machine.ksk_slots });
    }
    let sched = schedule(program, costs, machine);
    let makespan = sched.end.iter().copied().max().unwrap_or(0);
    let total = makespan + costs.op_overhead;

    let mut busy_per_rpau: BTreeMap<Pipe, Vec<u64>> = BTreeMap::new();
    let mut histogram: BTreeMap<Opcode, (usize, u64)> = BTreeMap::new();
    for instr in &program.instrs {
        let opcode = instr.op.opcode();
        let cycles = costs.cycles(&instr.op);
        let h = histogram.entry(opcode).or_default();
        h.0 += 1;
        h.1 += cycles;
        let pipe = opcode.pipe();
        if pipe == Pipe::None {
            continue;
        }
        let v = busy_per_rpau.entry(pipe).or_insert_with(|| vec![0; program.rpaus]);
        if pipe == Pipe::Ring {
            v.iter_mut().for_each(|b| *b += cycles);
        } else {
            instr.mask.iter().for_each(|r| v[r] += cycles);
        }
    }
    let busy = [Pipe::Main, Pipe::Dyadic, Pipe::Ring]
        .into_iter()
        .map(|p| (p.name().to_string(), busy_per_rpau.get(&p).and_then(|v| v.iter().max().copied()).unwrap_or(0)))
        .collect();
    let histogram = histogram
        .into_iter()
        .map(|(c, (count, cycles))| OpcodeStat { opcode: c.name().into(), count, cycles })
        .collect();

    let mut critical_path = Vec::new();
    let mut at = (0..sched.end.len()).filter(|&i| sched.end[i] == makespan).min_by_key(|&i| sched.start[i]);
    while let Some(i) = at {
        let instr = &program.instrs[i];
        critical_path.push(TraceEntry {
            index: i,
            opcode: instr.op.opcode().name().into(),
            mask: instr.mask.0,
            start: sched.start[i],
            end: sched.end[i],
        });
        at = sched.cause[i];
    }
    critical_path.reverse();

    Ok(CycleReport {
        program: program.name.clone(),
        total,
        makespan,
        busy,
        histogram,
        critical_path,
        memory,
        instructions: program.compute_instructions(),
        clock_mhz: machine.clock_mhz,
        latency_us: total as f64 / machine.clock_mhz,
    })
}
