//! Instruction set of the accelerator model.
//!
//! An RPAU holds one RNS limb in a bank of residue-polynomial memories
//! (slots). Instructions name slots, an RPAU mask and the controller that
//! issues them. Every instruction is SIMD over its mask.

use std::fmt;

pub type Slot = u8;

/// Which transform-sized ring a half-polynomial lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Half {
    Full,
    Plus,
    Minus,
}

/// Set of RPAUs as a bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mask(pub u64);

impl Mask {
    pub fn range(range: std::ops::Range<usize>) -> Self {
        Self(range.fold(0, |m, r| m | 1 << r))
    }

    pub fn one(r: usize) -> Self {
        Self(1 << r)
    }

    pub fn with(self, r: usize) -> Self {
        Self(self.0 | 1 << r)
    }

    pub fn contains(self, r: usize) -> bool {
        self.0 >> r & 1 == 1
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&r| self.contains(r))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn highest(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arith {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DyadicOp {
    Add,
    Sub,
    Mul,
    Mac,
}

/// Key-switching key component: the seeded uniform part is regenerated on
/// the fly; the other part is stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KeyPart {
    Stored,
    Seeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operand {
    Slot(Slot),
    /// Limb of digit `digit` of the program's key, at the executing RPAU.
    Key { part: KeyPart, digit: usize, half: Half },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    /// Inverse of the prime held by the given RPAU.
    InversePrime(usize),
    Integer(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    Ntt { slot: Slot, half: Half },
    Intt { slot: Slot, half: Half },
    Cwise { op: Arith, dst: Slot, a: Slot, b: Slot },
    Scale { slot: Slot, by: Factor },
    Dyadic { op: DyadicOp, dst: Slot, a: Operand, b: Operand },
    /// Copies `src` of RPAU `from` into `dst` of every masked RPAU, reduced
    /// into the receiver's prime. A wide value spans two slots.
    Bcast { from: usize, src: [Slot; 2], dst: [Slot; 2], wide: bool },
    /// Wide coefficient value in `(lo, hi)` to plus half in `lo`, minus in `hi`.
    Split { lo: Slot, hi: Slot },
    /// Inverse of [`Op::Split`].
    Join { plus: Slot, minus: Slot },
    Auto { slots: [Slot; 2], galois: usize, wide: bool },
    /// Parallel slot-to-slot copies.
    Move { copies: Vec<(Slot, Slot)> },
    SyncPipes,
    SyncCtrl,
    End,
}

/// Cost and histogram class of an instruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Opcode {
    Ntt,
    Intt,
    CwiseMain,
    ScaleQinv,
    Dyadic,
    Bcast,
    Split,
    Join,
    Auto,
    Move,
    SyncPipes,
    SyncCtrl,
    End,
}

impl Opcode {
    pub const ALL: [Opcode; 13] = [
        Opcode::Ntt,
        Opcode::Intt,
        Opcode::CwiseMain,
        Opcode::ScaleQinv,
        Opcode::Dyadic,
        Opcode::Bcast,
        Opcode::Split,
        Opcode::Join,
        Opcode::Auto,
        Opcode::Move,
        Opcode::SyncPipes,
        Opcode::SyncCtrl,
        Opcode::End,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Opcode::Ntt => "NTT",
            Opcode::Intt => "INTT",
            Opcode::CwiseMain => "CWISE_MAIN",
            Opcode::ScaleQinv => "SCALE_QINV",
            Opcode::Dyadic => "DYADIC",
            Opcode::Bcast => "BCAST",
            Opcode::Split => "SPLIT",
            Opcode::Join => "JOIN",
            Opcode::Auto => "AUTO",
            Opcode::Move => "MOVE",
            Opcode::SyncPipes => "SYNC_PIPES",
            Opcode::SyncCtrl => "SYNC_CTRL",
            Opcode::End => "END",
        }
    }

    pub fn pipe(self) -> Pipe {
        match self {
            Opcode::Dyadic => Pipe::Dyadic,
            Opcode::Bcast => Pipe::Ring,
            Opcode::SyncPipes | Opcode::SyncCtrl | Opcode::End => Pipe::None,
            _ => Pipe::Main,
        }
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pipe {
    Main,
    Dyadic,
    Ring,
    None,
}

impl Pipe {
    pub fn name(self) -> &'static str {
        match self {
            Pipe::Main => "main",
            Pipe::Dyadic => "dyadic",
            Pipe::Ring => "ring",
            Pipe::None => "none",
        }
    }
}

impl Op {
    pub fn opcode(&self) -> Opcode {
        match self {
            Op::Ntt { .. } => Opcode::Ntt,
            Op::Intt { .. } => Opcode::Intt,
            Op::Cwise { .. } => Opcode::CwiseMain,
            Op::Scale { .. } => Opcode::ScaleQinv,
            Op::Dyadic { .. } => Opcode::Dyadic,
            Op::Bcast { .. } => Opcode::Bcast,
            Op::Split { .. } => Opcode::Split,
            Op::Join { .. } => Opcode::Join,
            Op::Auto { .. } => Opcode::Auto,
            Op::Move { .. } => Opcode::Move,
            Op::SyncPipes => Opcode::SyncPipes,
            Op::SyncCtrl => Opcode::SyncCtrl,
            Op::End => Opcode::End,
        }
    }

    /// Slots read on each masked RPAU (for a broadcast, on the receivers).
    pub fn reads(&self) -> Vec<Slot> {
        let from = |o: &Operand| match o {
            Operand::Slot(s) => Some(*s),
            Operand::Key { .. } => None,
        };
        match self {
            Op::Ntt { slot, .. } | Op::Intt { slot, .. } | Op::Scale { slot, .. } => vec![*slot],
            Op::Cwise { a, b, .. } => vec![*a, *b],
            Op::Dyadic { op, dst, a, b } => {
                let mut v: Vec<Slot> = [from(a), from(b)].into_iter().flatten().collect();
                if *op == DyadicOp::Mac {
                    v.push(*dst);
                }
                v
            }
            Op::Bcast { .. } | Op::SyncPipes | Op::SyncCtrl | Op::End => vec![],
            Op::Split { lo, hi } => vec![*lo, *hi],
            Op::Join { plus, minus } => vec![*plus, *minus],
            Op::Auto { slots, wide, .. } => span(*slots, *wide),
            Op::Move { copies } => copies.iter().map(|c| c.0).collect(),
        }
    }

    /// Slots written on each masked RPAU.
    pub fn writes(&self) -> Vec<Slot> {
        match self {
            Op::Ntt { slot, .. } | Op::Intt { slot, .. } | Op::Scale { slot, .. } => vec![*slot],
            Op::Cwise { dst, .. } | Op::Dyadic { dst, .. } => vec![*dst],
            Op::Bcast { dst, wide, .. } => span(*dst, *wide),
            Op::Split { lo, hi } => vec![*lo, *hi],
            Op::Join { plus, minus } => vec![*plus, *minus],
            Op::Auto { slots, wide, .. } => span(*slots, *wide),
            Op::Move { copies } => copies.iter().map(|c| c.1).collect(),
            Op::SyncPipes | Op::SyncCtrl | Op::End => vec![],
        }
    }

    /// Slots read on the broadcasting RPAU.
    pub fn source_reads(&self) -> Option<(usize, Vec<Slot>)> {
        match self {
            Op::Bcast { from, src, wide, .. } => Some((*from, span(*src, *wide))),
            _ => None,
        }
    }

    /// Number of transform-sized polynomials the instruction processes.
    pub fn width(&self) -> u64 {
        match self {
            Op::Bcast { wide: true, .. } | Op::Auto { wide: true, .. } => 2,
            _ => 1,
        }
    }

    pub fn key_refs(&self) -> Vec<(KeyPart, usize, Half)> {
        match self {
            Op::Dyadic { a, b, .. } => [a, b]
                .into_iter()
                .filter_map(|o| match o {
                    Operand::Key { part, digit, half } => Some((*part, *digit, *half)),
                    Operand::Slot(_) => None,
                })
                .collect(),
            _ => vec![],
        }
    }
}

fn span(s: [Slot; 2], wide: bool) -> Vec<Slot> {
    if wide {
        s.to_vec()
    } else {
        vec![s[0]]
    }
}

/// One of the two program controllers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ctrl {
    Zero,
    One,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instr {
    pub op: Op,
    pub ctrl: Ctrl,
    pub mask: Mask,
}

/// What a slot holds when a program starts or finishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Value {
    /// Part `part` of ciphertext operand `operand`.
    Ciphertext { operand: usize, part: usize },
    /// Plaintext operand, lifted into every limb.
    Plaintext { operand: usize },
    /// An extended polynomial over the data RPAUs and the special RPAU.
    Extended { operand: usize },
}

/// Placement of one value's half on every RPAU of `mask`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Binding {
    pub value: Value,
    pub half: Half,
    pub slot: Slot,
    pub mask: Mask,
}

/// A compiled high-level operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub rpaus: usize,
    pub instrs: Vec<Instr>,
    pub inputs: Vec<Binding>,
    pub outputs: Vec<Binding>,
}

impl Program {
    /// Instructions excluding zero-cost synchronization and END.
    pub fn compute_instructions(&self) -> usize {
        self.instrs.iter().filter(|i| i.op.opcode().pipe() != Pipe::None).count()
    }

    pub fn histogram(&self) -> Vec<(Opcode, usize)> {
        Opcode::ALL
            .iter()
            .map(|&c| (c, self.instrs.iter().filter(|i| i.op.opcode() == c).count()))
            .filter(|&(_, n)| n > 0)
            .collect()
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.ctrl {
            Ctrl::Zero => 0,
            Ctrl::One => 1,
        };
        write!(f, "c{c} {:#06x} {:?}", self.mask.0, self.op)
    }
}
