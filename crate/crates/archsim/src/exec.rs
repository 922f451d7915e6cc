//! Functional execution of programs on real residues.

use flexhe::heaan::{Ciphertext, LimbPoly, RnsPoly};
use flexhe::keys::KeySwitchKey;
use flexhe::params::{Context, DegreeMode};
use flexhe::polyring::{automorphism_coeff, automorphism_eval, ResiduePoly};
use flexhe::ringsplit::{join, split, SplitPair};

use crate::isa::{Arith, DyadicOp, Factor, Half, KeyPart, Op, Operand, Program, Slot, Value};
use crate::{Error, Result};

/// A program operand, indexed by the operand number of [`Value`].
#[derive(Clone, Copy, Debug)]
pub enum Input<'a> {
    Ciphertext(&'a Ciphertext),
    /// A lifted plaintext over the ciphertext limbs.
    Plaintext(&'a RnsPoly),
    /// Limbs `0..l` followed by the special prime.
    Extended(&'a RnsPoly),
}

#[derive(Clone, Debug)]
enum Cell {
    Empty,
    Poly(ResiduePoly),
    /// Upper slot of a wide value held in the slot below.
    Tail,
}

struct Machine<'a> {
    ctx: &'a Context,
    program: &'a Program,
    key: Option<&'a KeySwitchKey>,
    cells: Vec<Vec<Cell>>,
    index: usize,
}

fn half_of(limb: &LimbPoly, half: Half) -> Option<&ResiduePoly> {
    match (limb, half) {
        (LimbPoly::Native(p), Half::Full) => Some(p),
        (LimbPoly::Split(pair), Half::Plus) => Some(&pair.plus),
        (LimbPoly::Split(pair), Half::Minus) => Some(&pair.minus),
        _ => None,
    }
}

impl<'a> Machine<'a> {
    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::Program { program: self.program.name.clone(), index: self.index, reason: reason.into() }
    }

    fn get(&self, r: usize, s: Slot) -> Result<&ResiduePoly> {
        match self.cells.get(r).and_then(|c| c.get(usize::from(s))) {
            Some(Cell::Poly(p)) => Ok(p),
            _ => Err(self.fail(format!("slot {s} on RPAU {r} holds no polynomial"))),
        }
    }

    fn put(&mut self, r: usize, s: Slot, cell: Cell) -> Result<()> {
        let slot = self
            .cells
            .get_mut(r)
            .and_then(|c| c.get_mut(usize::from(s)))
            .ok_or_else(|| Error::Program { program: self.program.name.clone(), index: self.index, reason: format!("slot {s} on RPAU {r}") })?;
        *slot = cell;
        Ok(())
    }

    fn operand(&self, r: usize, o: &Operand) -> Result<ResiduePoly> {
        match *o {
            Operand::Slot(s) => self.get(r, s).cloned(),
            Operand::Key { part, digit, half } => {
                let key = self.key.ok_or_else(|| self.fail("program needs a key"))?;
                if digit >= key.digits() {
                    return Err(self.fail(format!("key has no digit {digit}")));
                }
                let poly = match part {
                    KeyPart::Stored => key.secret(digit),
                    KeyPart::Seeded => key.uniform(digit),
                };
                let limb = poly.limbs().get(r).ok_or_else(|| self.fail(format!("key has no limb {r}")))?;
                half_of(limb, half).cloned().ok_or_else(|| self.fail("key half does not match the mode"))
            }
        }
    }

    fn step(&mut self, op: &Op, mask: crate::isa::Mask) -> Result<()> {
        if let Op::Bcast { from, src, dst, wide } = op {
            let value = self.get(*from, src[0])?.clone();
            for r in mask.iter() {
                let reduced = value.reduce_into(self.ctx.ring(r))?;
                self.put(r, dst[0], Cell::Poly(reduced))?;
                if *wide {
                    self.put(r, dst[1], Cell::Tail)?;
                }
            }
            return Ok(());
        }
        for r in mask.iter() {
            match op {
                Op::Ntt { slot, .. } => {
                    let p = self.get(r, *slot)?.clone().forward()?;
                    self.put(r, *slot, Cell::Poly(p))?;
                }
                Op::Intt { slot, .. } => {
                    let p = self.get(r, *slot)?.clone().inverse()?;
                    self.put(r, *slot, Cell::Poly(p))?;
                }
                Op::Cwise { op, dst, a, b } => {
                    let mut x = self.get(r, *a)?.clone();
                    let y = self.get(r, *b)?;
                    match op {
                        Arith::Add => x.add_assign(y)?,
                        Arith::Sub => x.sub_assign(y)?,
                        Arith::Mul => x.dyadic_mul_assign(y)?,
                    }
                    self.put(r, *dst, Cell::Poly(x))?;
                }
                Op::Scale { slot, by } => {
                    let mut x = self.get(r, *slot)?.clone();
                    let q = x.modulus();
                    let k = match *by {
                        Factor::InversePrime(f) => q.inv(self.ctx.modulus(f).value())?,
                        Factor::Integer(k) => q.from_i64(k),
                    };
                    x.scalar_mul_assign(k);
                    self.put(r, *slot, Cell::Poly(x))?;
                }
                Op::Dyadic { op, dst, a, b } => {
                    let a = self.operand(r, a)?;
                    let b = self.operand(r, b)?;
                    let out = match op {
                        DyadicOp::Mac => {
                            let mut acc = self.get(r, *dst)?.clone();
                            acc.dyadic_mac(&a, &b)?;
                            acc
                        }
                        DyadicOp::Mul => {
                            let mut x = a;
                            x.dyadic_mul_assign(&b)?;
                            x
                        }
                        DyadicOp::Add => {
                            let mut x = a;
                            x.add_assign(&b)?;
                            x
                        }
                        DyadicOp::Sub => {
                            let mut x = a;
                            x.sub_assign(&b)?;
                            x
                        }
                    };
                    self.put(r, *dst, Cell::Poly(out))?;
                }
                Op::Split { lo, hi } => {
                    let pair = split(self.get(r, *lo)?)?;
                    self.put(r, *lo, Cell::Poly(pair.plus))?;
                    self.put(r, *hi, Cell::Poly(pair.minus))?;
                }
                Op::Join { plus, minus } => {
                    let pair = SplitPair { plus: self.get(r, *plus)?.clone(), minus: self.get(r, *minus)?.clone() };
                    self.put(r, *plus, Cell::Poly(join(&pair)?))?;
                    self.put(r, *minus, Cell::Tail)?;
                }
                Op::Auto { slots, galois, wide } => {
                    let x = self.get(r, slots[0])?;
                    let y = if *wide { automorphism_coeff(x, *galois)? } else { automorphism_eval(x, *galois)? };
                    self.put(r, slots[0], Cell::Poly(y))?;
                }
                Op::Move { copies } => {
                    let values: Vec<Cell> = copies
                        .iter()
                        .map(|&(s, _)| self.cells[r].get(usize::from(s)).cloned().unwrap_or(Cell::Empty))
                        .collect();
                    for (&(_, d), v) in copies.iter().zip(values) {
                        self.put(r, d, v)?;
                    }
                }
                Op::Bcast { .. } | Op::SyncPipes | Op::SyncCtrl | Op::End => {}
            }
        }
        Ok(())
    }
}

fn input_limb<'p>(ctx: &Context, input: &Input<'p>, value: &Value, r: usize) -> Option<&'p LimbPoly> {
    let poly = match (input, value) {
        (Input::Ciphertext(ct), Value::Ciphertext { part, .. }) => ct.parts().get(*part)?,
        (Input::Plaintext(p), Value::Plaintext { .. }) => *p,
        (Input::Extended(p), Value::Extended { .. }) => *p,
        _ => return None,
    };
    if r == ctx.special_index() {
        poly.limbs().last().filter(|l| l.modulus() == ctx.modulus(r).value())
    } else {
        poly.limbs().get(r)
    }
}

fn operand_of(value: &Value) -> usize {
    match *value {
        Value::Ciphertext { operand, .. } | Value::Plaintext { operand } | Value::Extended { operand } => operand,
    }
}

/// Runs `program` and returns the output polynomials in part order.
pub fn execute(ctx: &Context, program: &Program, inputs: &[Input<'_>], key: Option<&KeySwitchKey>) -> Result<Vec<RnsPoly>> {
    let slots = program
        .instrs
        .iter()
        .flat_map(|i| i.op.reads().into_iter().chain(i.op.writes()))
        .chain(program.inputs.iter().chain(&program.outputs).map(|b| b.slot))
        .max()
        .map_or(0, |s| usize::from(s) + 1);
    let mut m = Machine {
        ctx,
        program,
        key,
        cells: vec![vec![Cell::Empty; slots]; program.rpaus],
        index: 0,
    };
    for b in &program.inputs {
        let input = inputs.get(operand_of(&b.value)).ok_or_else(|| m.fail(format!("missing operand for {:?}", b.value)))?;
        for r in b.mask.iter() {
            let limb = input_limb(ctx, input, &b.value, r).ok_or_else(|| m.fail(format!("operand has no limb for RPAU {r}")))?;
            let half = half_of(limb, b.half).ok_or_else(|| m.fail("operand mode differs from the program"))?;
            m.put(r, b.slot, Cell::Poly(half.clone()))?;
        }
    }
    for (index, instr) in program.instrs.iter().enumerate() {
        m.index = index;
        m.step(&instr.op, instr.mask)?;
    }
    m.index = program.instrs.len();
    let parts = program
        .outputs
        .iter()
        .filter_map(|b| match b.value {
            Value::Ciphertext { part, .. } => Some(part),
            _ => None,
        })
        .max()
        .map_or(0, |p| p + 1);
    (0..parts)
        .map(|part| {
            let bound: Vec<_> = program.outputs.iter().filter(|b| b.value == Value::Ciphertext { operand: 0, part }).collect();
            let mask = bound.first().map(|b| b.mask).ok_or_else(|| m.fail(format!("no binding for part {part}")))?;
            let limbs = mask
                .iter()
                .map(|r| {
                    let find = |h: Half| -> Result<ResiduePoly> {
                        let b = bound.iter().find(|b| b.half == h).ok_or_else(|| m.fail("output half missing"))?;
                        m.get(r, b.slot).cloned()
                    };
                    Ok(match ctx.mode() {
                        DegreeMode::Native => LimbPoly::Native(find(Half::Full)?),
                        DegreeMode::Split => LimbPoly::Split(SplitPair { plus: find(Half::Plus)?, minus: find(Half::Minus)? }),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RnsPoly::new(limbs)?)
        })
        .collect()
}
