//! Instruction costs and machine shape.

use serde::{Deserialize, Serialize};

use crate::isa::{Op, Opcode};
use crate::{Error, Result};

/// Cycles per instruction class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostModel {
    pub ntt: u64,
    pub intt: u64,
    pub bcast: u64,
    pub scale_qinv: u64,
    pub cwise_main: u64,
    pub dyadic: u64,
    pub split: u64,
    pub join: u64,
    pub auto: u64,
    /// Extra on-chip data movement charged at every SPLIT, JOIN and MOVE.
    pub split_surcharge: u64,
    /// Fixed cost of launching one high-level operation.
    pub op_overhead: u64,
}

/// Surcharge fitted against the published split-mode rows; see
/// [`crate::calibrate::calibrate_surcharge`].
pub const CALIBRATED_SURCHARGE: u64 = 853;

impl Default for CostModel {
    fn default() -> Self {
        Self {
            ntt: 7168,
            intt: 7168,
            bcast: 512,
            scale_qinv: 512,
            cwise_main: 512,
            dyadic: 4096,
            split: 1024,
            join: 1024,
            auto: 512,
            split_surcharge: CALIBRATED_SURCHARGE,
            op_overhead: 128,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let base = [self.ntt, self.intt, self.bcast, self.scale_qinv, self.cwise_main, self.dyadic, self.split, self.join, self.auto];
        if base.contains(&0) {
            return Err(Error::Config("instruction costs must be positive".into()));
        }
        Ok(())
    }

    /// Cost of one transform-sized instance of an opcode.
    pub fn unit(&self, opcode: Opcode) -> u64 {
        match opcode {
            Opcode::Ntt => self.ntt,
            Opcode::Intt => self.intt,
            Opcode::CwiseMain => self.cwise_main,
            Opcode::ScaleQinv => self.scale_qinv,
            Opcode::Dyadic => self.dyadic,
            Opcode::Bcast => self.bcast,
            Opcode::Split => self.split + self.split_surcharge,
            Opcode::Join => self.join + self.split_surcharge,
            Opcode::Auto => self.auto,
            Opcode::Move => self.split_surcharge,
            Opcode::SyncPipes | Opcode::SyncCtrl | Opcode::End => 0,
        }
    }

    pub fn cycles(&self, op: &Op) -> u64 {
        self.unit(op.opcode()) * op.width()
    }
}

/// The machine a program runs on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MachineConfig {
    pub rpaus: usize,
    /// Ciphertext-dependent residue-polynomial memories per RPAU.
    pub slots: usize,
    /// Key-switching-key polynomials an RPAU can hold.
    pub ksk_slots: usize,
    /// Forbid overlap of the main and dyadic pipes.
    pub serial: bool,
    pub clock_mhz: f64,
}

impl Default for MachineConfig {
    fn default() -> Self {
        Self { rpaus: 10, slots: 13, ksk_slots: 18, serial: false, clock_mhz: 200.0 }
    }
}

impl MachineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rpaus == 0 || self.rpaus > 64 || self.slots == 0 || self.slots > 256 {
            return Err(Error::Config(format!("{} RPAUs with {} slots", self.rpaus, self.slots)));
        }
        if !(self.clock_mhz.is_finite() && self.clock_mhz > 0.0) {
            return Err(Error::Config(format!("clock of {} MHz", self.clock_mhz)));
        }
        Ok(())
    }

    pub fn serial(&self) -> Self {
        Self { serial: true, ..self.clone() }
    }
}
