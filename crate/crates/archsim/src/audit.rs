//! On-chip memory occupancy from slot liveness.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::isa::{Half, KeyPart, Program, Slot};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemoryReport {
    /// Largest number of simultaneously live slots on any RPAU.
    pub high_water: usize,
    /// Peak per RPAU.
    pub per_rpau: Vec<usize>,
    /// Index of the instruction where `high_water` is first reached.
    pub peak_at: Option<usize>,
    /// Key polynomials that must be resident per RPAU.
    pub ksk_stored: usize,
    /// Key polynomials regenerated from the seed per RPAU.
    pub ksk_seeded: usize,
}

/// Backward liveness from the output bindings. A slot is occupied during an
/// instruction if it is live before or after it, or written by it.
pub fn audit(program: &Program) -> MemoryReport {
    let n = program.rpaus;
    let mut per_rpau = vec![0usize; n];
    let mut peak_index = vec![None; n];
    for (r, peak) in per_rpau.iter_mut().enumerate() {
        let mut live: BTreeSet<Slot> = program.outputs.iter().filter(|b| b.mask.contains(r)).map(|b| b.slot).collect();
        *peak = live.len();
        for (index, instr) in program.instrs.iter().enumerate().rev() {
            let mut reads = Vec::new();
            let mut writes = Vec::new();
            if instr.mask.contains(r) {
                reads = instr.op.reads();
                writes = instr.op.writes();
            }
            if let Some((from, src)) = instr.op.source_reads() {
                if from == r {
                    reads.extend(src);
                }
            }
            if reads.is_empty() && writes.is_empty() {
                continue;
            }
            let mut occupied = live.clone();
            occupied.extend(writes.iter().copied());
            for w in &writes {
                live.remove(w);
            }
            live.extend(reads.iter().copied());
            occupied.extend(live.iter().copied());
            if occupied.len() >= *peak {
                *peak = occupied.len();
                peak_index[r] = Some(index);
            }
        }
        let inputs = program.inputs.iter().filter(|b| b.mask.contains(r)).count();
        *peak = (*peak).max(inputs);
    }
    let high_water = per_rpau.iter().copied().max().unwrap_or(0);
    let peak_at = per_rpau.iter().position(|&p| p == high_water).and_then(|r| peak_index[r]);
    let keys = |part: KeyPart| {
        let set: BTreeSet<(usize, Half)> = program
            .instrs
            .iter()
            .flat_map(|i| i.op.key_refs())
            .filter(|k| k.0 == part)
            .map(|k| (k.1, k.2))
            .collect();
        set.len()
    };
    MemoryReport { high_water, per_rpau, peak_at, ksk_stored: keys(KeyPart::Stored), ksk_seeded: keys(KeyPart::Seeded) }
}
