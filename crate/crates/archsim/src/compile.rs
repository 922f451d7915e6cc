//! Kernels: high-level operations lowered to instruction streams.

use flexhe::params::{Context, DegreeMode};

use crate::isa::*;
use crate::{Error, Result};

/// High-level operations the compiler understands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HeOp {
    Add,
    Sub,
    MultRelin,
    Rescale,
    /// Division of one extended polynomial by the special prime.
    ModDown,
    Rotate { galois: usize },
    MulPlain,
    AddPlain,
}

impl HeOp {
    pub fn name(self) -> &'static str {
        match self {
            HeOp::Add => "add",
            HeOp::Sub => "sub",
            HeOp::MultRelin => "mult_relin",
            HeOp::Rescale => "rescale",
            HeOp::ModDown => "moddown",
            HeOp::Rotate { .. } => "rotate",
            HeOp::MulPlain => "mul_plain",
            HeOp::AddPlain => "add_plain",
        }
    }

    /// Level of the result given the operand level.
    pub fn output_level(self, level: usize) -> usize {
        match self {
            HeOp::Rescale => level - 1,
            _ => level,
        }
    }
}

/// Everything the compiler needs to know about the operands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub mode: DegreeMode,
    /// Number of ciphertext limbs of the operands.
    pub level: usize,
    /// Ciphertext primes of the parameter set; the special prime sits on
    /// RPAU `max_level`.
    pub max_level: usize,
}

impl Shape {
    pub fn new(ctx: &Context, level: usize) -> Self {
        Self { mode: ctx.mode(), level, max_level: ctx.max_level() }
    }

    pub fn rpaus(&self) -> usize {
        self.max_level + 1
    }

    pub fn special(&self) -> usize {
        self.max_level
    }

    pub fn data(&self) -> Mask {
        Mask::range(0..self.level)
    }

    pub fn extended(&self) -> Mask {
        self.data().with(self.special())
    }

    fn halves(&self) -> &'static [Half] {
        match self.mode {
            DegreeMode::Native => &[Half::Full],
            DegreeMode::Split => &[Half::Plus, Half::Minus],
        }
    }

    fn wide(&self) -> bool {
        self.mode == DegreeMode::Split
    }
}

/// A logical polynomial: one slot natively, a plus and a minus slot when split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Poly([Slot; 2]);

impl Poly {
    fn native(s: Slot) -> Self {
        Self([s, s])
    }
}

struct Kernel {
    shape: Shape,
    program: Program,
}

impl Kernel {
    fn new(op: HeOp, shape: Shape) -> Self {
        let name = format!("{}@{}/{}", op.name(), shape.level, shape.mode.name());
        Self {
            shape,
            program: Program { name, rpaus: shape.rpaus(), instrs: vec![], inputs: vec![], outputs: vec![] },
        }
    }

    fn poly(&self, plus: Slot, minus: Slot) -> Poly {
        match self.shape.mode {
            DegreeMode::Native => Poly::native(plus),
            DegreeMode::Split => Poly([plus, minus]),
        }
    }

    fn parts(&self, p: Poly) -> Vec<(Slot, Half)> {
        self.shape.halves().iter().enumerate().map(|(k, &h)| (p.0[k], h)).collect()
    }

    fn emit(&mut self, ctrl: Ctrl, mask: Mask, op: Op) {
        self.program.instrs.push(Instr { op, ctrl, mask });
    }

    fn input(&mut self, value: Value, p: Poly, mask: Mask) {
        for (slot, half) in self.parts(p) {
            self.program.inputs.push(Binding { value, half, slot, mask });
        }
    }

    fn output(&mut self, part: usize, p: Poly, mask: Mask) {
        for (slot, half) in self.parts(p) {
            self.program.outputs.push(Binding { value: Value::Ciphertext { operand: 0, part }, half, slot, mask });
        }
    }

    fn finish(mut self) -> Program {
        self.emit(Ctrl::Zero, self.shape.data(), Op::End);
        self.program
    }

    /// Evaluation form to coefficient form; a split pair becomes one wide value.
    fn to_coefficients(&mut self, ctrl: Ctrl, mask: Mask, p: Poly) {
        for (slot, half) in self.parts(p) {
            self.emit(ctrl, mask, Op::Intt { slot, half });
        }
        if self.shape.wide() {
            self.emit(ctrl, mask, Op::Join { plus: p.0[0], minus: p.0[1] });
        }
    }

    fn to_evaluation(&mut self, ctrl: Ctrl, mask: Mask, p: Poly) {
        if self.shape.wide() {
            self.emit(ctrl, mask, Op::Split { lo: p.0[0], hi: p.0[1] });
        }
        for (slot, half) in self.parts(p) {
            self.emit(ctrl, mask, Op::Ntt { slot, half });
        }
    }

    fn broadcast(&mut self, ctrl: Ctrl, mask: Mask, from: usize, src: Poly, dst: Poly) {
        let wide = self.shape.wide();
        self.emit(ctrl, mask, Op::Bcast { from, src: src.0, dst: dst.0, wide });
    }

    fn cwise(&mut self, ctrl: Ctrl, mask: Mask, op: Arith, dst: Poly, a: Poly, b: Poly) {
        for k in 0..self.shape.halves().len() {
            self.emit(ctrl, mask, Op::Cwise { op, dst: dst.0[k], a: a.0[k], b: b.0[k] });
        }
    }

    /// `x <- (x - [src]) / q_from` on `mask`, where `x` on RPAU `from` is the
    /// limb being dropped. With `add_to`, the result is then added there.
    fn drop_limb(&mut self, from: usize, mask: Mask, x: Poly, buffer: Poly, add_to: Option<Poly>) {
        let one = Mask::one(from);
        self.to_coefficients(Ctrl::One, one, x);
        self.broadcast(Ctrl::One, mask, from, x, buffer);
        self.to_evaluation(Ctrl::Zero, mask, buffer);
        self.cwise(Ctrl::Zero, mask, Arith::Sub, x, x, buffer);
        for (slot, _) in self.parts(x) {
            self.emit(Ctrl::Zero, mask, Op::Scale { slot, by: Factor::InversePrime(from) });
        }
        if let Some(d) = add_to {
            self.cwise(Ctrl::Zero, mask, Arith::Add, d, d, x);
        }
        self.emit(Ctrl::Zero, mask.with(from), Op::SyncCtrl);
    }

    /// Key-switching inner loop over the coefficient-form `digits`.
    fn switch_loop(&mut self, digits: Poly, acc: [Poly; 2], buffers: &[Slot]) {
        let ext = self.shape.extended();
        let width = self.shape.halves().len();
        for i in 0..self.shape.level {
            let buf = Poly([buffers[(width * i) % buffers.len()], buffers[(width * i + width - 1) % buffers.len()]]);
            self.broadcast(Ctrl::Zero, ext, i, digits, buf);
            self.to_evaluation(Ctrl::Zero, ext, buf);
            self.emit(Ctrl::Zero, ext, Op::SyncPipes);
            for (k, &half) in self.shape.halves().iter().enumerate() {
                for (a, part) in acc.iter().zip([KeyPart::Stored, KeyPart::Seeded]) {
                    let op = if i == 0 { DyadicOp::Mul } else { DyadicOp::Mac };
                    let key = Operand::Key { part, digit: i, half };
                    self.emit(Ctrl::Zero, ext, Op::Dyadic { op, dst: a.0[k], a: key, b: Operand::Slot(buf.0[k]) });
                }
            }
        }
    }
}

fn check(op: HeOp, shape: &Shape) -> Result<()> {
    let min = if op == HeOp::Rescale { 2 } else { 1 };
    if shape.level < min || shape.level > shape.max_level || shape.rpaus() > 64 {
        return Err(Error::Unsupported(format!("{} at level {} of {}", op.name(), shape.level, shape.max_level)));
    }
    if let HeOp::Rotate { galois } = op {
        if galois % 2 == 0 || galois == 1 {
            return Err(Error::Unsupported(format!("rotation by Galois element {galois}")));
        }
    }
    Ok(())
}

pub fn compile(op: HeOp, shape: Shape) -> Result<Program> {
    check(op, &shape)?;
    let mut k = Kernel::new(op, shape);
    match op {
        HeOp::Add | HeOp::Sub | HeOp::MulPlain | HeOp::AddPlain => elementwise(&mut k, op),
        HeOp::MultRelin => mult_relin(&mut k),
        HeOp::Rescale => rescale(&mut k),
        HeOp::ModDown => mod_down(&mut k),
        HeOp::Rotate { galois } => rotate(&mut k, galois),
    }
    Ok(k.finish())
}

fn ct(operand: usize, part: usize) -> Value {
    Value::Ciphertext { operand, part }
}

/// Operands occupy slots 0..4 natively. Split operands are processed plus
/// halves first; the minus halves are then moved into the same slots.
fn elementwise(k: &mut Kernel, op: HeOp) {
    let data = k.shape.data();
    let with_plain = matches!(op, HeOp::MulPlain | HeOp::AddPlain);
    let arith = match op {
        HeOp::Sub => Arith::Sub,
        HeOp::MulPlain => Arith::Mul,
        _ => Arith::Add,
    };
    let bind = |k: &mut Kernel, value: Value, slot: Slot, half: Half| {
        k.program.inputs.push(Binding { value, half, slot, mask: data });
    };
    let passes: &[Half] = k.shape.halves();
    for (pass, &half) in passes.iter().enumerate() {
        let base = 4 * pass as Slot;
        bind(k, ct(0, 0), base, half);
        bind(k, ct(0, 1), base + 1, half);
        if with_plain {
            bind(k, Value::Plaintext { operand: 1 }, base + 2, half);
        } else {
            bind(k, ct(1, 0), base + 2, half);
            bind(k, ct(1, 1), base + 3, half);
        }
    }
    let body = |k: &mut Kernel| {
        let b1 = if with_plain { 2 } else { 3 };
        k.emit(Ctrl::Zero, data, Op::Cwise { op: arith, dst: 0, a: 0, b: 2 });
        if op != HeOp::AddPlain {
            k.emit(Ctrl::Zero, data, Op::Cwise { op: arith, dst: 1, a: 1, b: b1 });
        }
    };
    body(k);
    let out = |k: &mut Kernel, part: usize, slot: Slot, half: Half| {
        k.program.outputs.push(Binding { value: ct(0, part), half, slot, mask: data });
    };
    if k.shape.wide() {
        let last: Slot = if with_plain { 3 } else { 4 };
        let mut copies = vec![(0, 8), (1, 9)];
        copies.extend((0..last).map(|s| (s + 4, s)));
        k.emit(Ctrl::Zero, data, Op::Move { copies });
        body(k);
        out(k, 0, 8, Half::Plus);
        out(k, 1, 9, Half::Plus);
        out(k, 0, 0, Half::Minus);
        out(k, 1, 1, Half::Minus);
    } else {
        out(k, 0, 0, Half::Full);
        out(k, 1, 1, Half::Full);
    }
}

/// Tensor product on the dyadic pipe: `d2 = a1 b1` first so its transform
/// can start while `d1 = a0 b1 + a1 b0` and `d0 = a0 b0` are formed.
fn tensor(k: &mut Kernel, base: Slot, d2: Slot, d1: Slot, d0: Slot, half: Half) {
    let data = k.shape.data();
    let s = |x: Slot| Operand::Slot(base + x);
    let dy = |op, dst, a, b| Op::Dyadic { op, dst, a, b };
    k.emit(Ctrl::Zero, data, dy(DyadicOp::Mul, d2, s(1), s(3)));
    k.emit(Ctrl::Zero, data, Op::SyncPipes);
    k.emit(Ctrl::Zero, data, Op::Intt { slot: d2, half });
    k.emit(Ctrl::Zero, data, dy(DyadicOp::Mul, d1, s(0), s(3)));
    k.emit(Ctrl::Zero, data, dy(DyadicOp::Mul, d0, s(0), s(2)));
    k.emit(Ctrl::Zero, data, dy(DyadicOp::Mac, d1, s(1), s(2)));
}

fn mult_relin(k: &mut Kernel) {
    let data = k.shape.data();
    let special = k.shape.special();
    if k.shape.wide() {
        for (pass, half) in [Half::Plus, Half::Minus].into_iter().enumerate() {
            let base = 4 * pass as Slot;
            for (i, (operand, part)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                k.program.inputs.push(Binding { value: ct(operand, part), half, slot: base + i as Slot, mask: data });
            }
        }
        tensor(k, 0, 8, 9, 10, Half::Plus);
        k.emit(Ctrl::Zero, data, Op::Move { copies: vec![(4, 0), (5, 1), (6, 2), (7, 3)] });
        tensor(k, 0, 4, 5, 6, Half::Minus);
        k.emit(Ctrl::Zero, data, Op::Join { plus: 8, minus: 4 });
        let (d0, d1) = (Poly([10, 6]), Poly([9, 5]));
        let acc = [Poly([0, 2]), Poly([1, 3])];
        k.switch_loop(Poly([8, 4]), acc, &[7, 11, 12]);
        k.drop_limb(special, data, acc[0], Poly([7, 11]), Some(d0));
        k.drop_limb(special, data, acc[1], Poly([7, 11]), Some(d1));
        k.output(0, d0, data);
        k.output(1, d1, data);
    } else {
        for (i, (operand, part)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            k.program.inputs.push(Binding { value: ct(operand, part), half: Half::Full, slot: i as Slot, mask: data });
        }
        tensor(k, 0, 4, 6, 5, Half::Full);
        let (d0, d1) = (Poly::native(5), Poly::native(6));
        let acc = [Poly::native(0), Poly::native(1)];
        k.switch_loop(Poly::native(4), acc, &[3, 2]);
        k.drop_limb(special, data, acc[0], Poly::native(2), Some(d0));
        k.drop_limb(special, data, acc[1], Poly::native(2), Some(d1));
        k.output(0, d0, data);
        k.output(1, d1, data);
    }
}

fn rescale(k: &mut Kernel) {
    let data = k.shape.data();
    let top = k.shape.level - 1;
    let rest = Mask::range(0..top);
    let c = [k.poly(0, 2), k.poly(1, 3)];
    let buffer = k.poly(4, 5);
    for (part, &p) in c.iter().enumerate() {
        k.input(ct(0, part), p, data);
    }
    for &p in &c {
        k.drop_limb(top, rest, p, buffer, None);
    }
    for (part, &p) in c.iter().enumerate() {
        k.output(part, p, rest);
    }
}

fn mod_down(k: &mut Kernel) {
    let data = k.shape.data();
    let x = k.poly(0, 1);
    k.input(Value::Extended { operand: 0 }, x, k.shape.extended());
    k.drop_limb(k.shape.special(), data, x, k.poly(2, 3), None);
    k.output(0, x, data);
}

fn rotate(k: &mut Kernel, galois: usize) {
    let data = k.shape.data();
    let special = k.shape.special();
    let wide = k.shape.wide();
    let c0 = k.poly(0, 2);
    let c1 = k.poly(1, 3);
    k.input(ct(0, 0), c0, data);
    k.input(ct(0, 1), c1, data);
    let permute = |k: &mut Kernel, p: Poly| k.emit(Ctrl::Zero, data, Op::Auto { slots: p.0, galois, wide });
    let (acc, buffers, buffer): ([Poly; 2], &[Slot], Poly) = if wide {
        k.to_coefficients(Ctrl::Zero, data, c1);
        permute(k, c1);
        ([Poly([4, 6]), Poly([5, 7])], &[8, 9, 10], Poly([8, 9]))
    } else {
        permute(k, c0);
        permute(k, c1);
        k.to_coefficients(Ctrl::Zero, data, c1);
        ([Poly::native(2), Poly::native(3)], &[4, 5], Poly::native(4))
    };
    k.switch_loop(c1, acc, buffers);
    if wide {
        k.to_coefficients(Ctrl::Zero, data, c0);
        permute(k, c0);
        k.to_evaluation(Ctrl::Zero, data, c0);
    }
    k.drop_limb(special, data, acc[0], buffer, Some(c0));
    k.drop_limb(special, data, acc[1], buffer, None);
    k.output(0, c0, data);
    k.output(1, acc[1], data);
}
