//! Published cycle counts and the fit of the split-mode surcharge.

use flexhe::params::DegreeMode;
use serde::Serialize;

use crate::compile::{compile, HeOp, Shape};
use crate::cost::{CostModel, MachineConfig};
use crate::sim::simulate;
use crate::Result;

/// One published per-operation cycle count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reference {
    pub op: HeOp,
    pub shape: Shape,
    pub cycles: u64,
}

/// Native `N = 2^14`, 7 ciphertext primes.
pub fn set1_shape() -> Shape {
    Shape { mode: DegreeMode::Native, level: 7, max_level: 7 }
}

/// Split `2N = 2^15`, 9 ciphertext primes.
pub fn set2_shape() -> Shape {
    Shape { mode: DegreeMode::Split, level: 9, max_level: 9 }
}

pub fn set1_reference() -> [Reference; 3] {
    let shape = set1_shape();
    [
        Reference { op: HeOp::Add, shape, cycles: 1152 },
        Reference { op: HeOp::MultRelin, shape, cycles: 99448 },
        Reference { op: HeOp::Rescale, shape, cycles: 34430 },
    ]
}

pub fn set2_reference() -> [Reference; 3] {
    let shape = set2_shape();
    [
        Reference { op: HeOp::Add, shape, cycles: 2865 },
        Reference { op: HeOp::MultRelin, shape, cycles: 274885 },
        Reference { op: HeOp::Rescale, shape, cycles: 75464 },
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub op: String,
    pub mode: String,
    pub simulated: u64,
    pub reference: u64,
    pub rel_error: f64,
}

pub fn compare(refs: &[Reference], costs: &CostModel, machine: &MachineConfig) -> Result<Vec<Row>> {
    refs.iter()
        .map(|r| {
            let simulated = simulate(&compile(r.op, r.shape)?, costs, machine)?.total;
            Ok(Row {
                op: r.op.name().into(),
                mode: r.shape.mode.name().into(),
                simulated,
                reference: r.cycles,
                rel_error: (simulated as f64 - r.cycles as f64) / r.cycles as f64,
            })
        })
        .collect()
}

fn worst(rows: &[Row]) -> f64 {
    rows.iter().map(|r| r.rel_error.abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub surcharge: u64,
    pub max_rel_error: f64,
    pub rows: Vec<Row>,
}

/// Surcharge in `0..=limit` minimising the worst relative error over `refs`;
/// the smallest such value on ties.
pub fn calibrate_surcharge(base: &CostModel, machine: &MachineConfig, refs: &[Reference], limit: u64) -> Result<Calibration> {
    let mut best: Option<Calibration> = None;
    for surcharge in 0..=limit {
        let costs = CostModel { split_surcharge: surcharge, ..base.clone() };
        let rows = compare(refs, &costs, machine)?;
        let err = worst(&rows);
        if best.as_ref().map_or(true, |b| err < b.max_rel_error) {
            best = Some(Calibration { surcharge, max_rel_error: err, rows });
        }
    }
    Ok(best.expect("the search range is not empty"))
}

/// Default fit: the split-mode rows, surcharge up to one dyadic operation.
pub fn default_calibration(base: &CostModel, machine: &MachineConfig) -> Result<Calibration> {
    calibrate_surcharge(base, machine, &set2_reference(), base.dyadic)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Savings {
    pub op: String,
    pub serial: u64,
    pub dual_issue: u64,
    /// `1 - dual / serial`.
    pub reduction: f64,
}

/// Cycles with the main and dyadic pipes serialised versus overlapped.
pub fn dual_issue_savings(ops: &[HeOp], shape: Shape, costs: &CostModel, machine: &MachineConfig) -> Result<Vec<Savings>> {
    ops.iter()
        .map(|&op| {
            let program = compile(op, shape)?;
            let dual = simulate(&program, costs, &MachineConfig { serial: false, ..machine.clone() })?.total;
            let serial = simulate(&program, costs, &machine.serial())?.total;
            Ok(Savings { op: op.name().into(), serial, dual_issue: dual, reduction: 1.0 - dual as f64 / serial as f64 })
        })
        .collect()
}
