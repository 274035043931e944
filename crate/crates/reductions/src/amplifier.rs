//! Amplifiers and the unary hardening of coverability instances.
//!
//! An amplifier is a path-shaped machine whose unique run turns the start
//! configuration (st = 1, everything else 0) into x_i = p_i / 2^k. It
//! halves st k times and then builds each x_i most significant bit first:
//! per bit, double x_i (or idle while x_i is still 0) and then add st (or
//! idle). Each of the n bits costs four rules.

use fracreach::machines::{forced_run, Config, Firing, FiringSequence, IvassRl, Qvass, VassRule};
use fracreach::numerics::{IntVector, RatVector, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ctrl::{complement_index, ivass_to_cvassrl, value_index, CtrlChain};
use crate::gadgets::IvassBuilder;
use crate::{ReductionError, RunLengthInstance};

#[derive(Clone, Debug)]
pub struct IvassAmplifier {
    pub instance: RunLengthInstance<IvassRl>,
    /// Rule ids along the path.
    pub path: Vec<usize>,
    pub k: u32,
    pub n: usize,
}

impl IvassAmplifier {
    pub fn st(&self) -> usize {
        self.instance.machine.dim - 2
    }
    pub fn te(&self) -> usize {
        self.instance.machine.dim - 1
    }

    pub fn witness(&self) -> Result<FiringSequence, ReductionError> {
        forced_run(&self.instance.machine, &self.instance.c_init, &self.path)
            .map(|(_, s)| s)
            .map_err(|e| ReductionError::BadRun(e.to_string()))
    }
}

fn bit_width(p: &[BigInt]) -> usize {
    p.iter().map(|x| x.bits() as usize).max().unwrap_or(0).max(1)
}

pub fn ivass_amplifier(p: &[BigInt], k: u32) -> Result<IvassAmplifier, ReductionError> {
    ivass_amplifier_with_width(p, k, bit_width(p))
}

/// Like [`ivass_amplifier`] but with an explicit bit width n, which must
/// cover every p_i.
pub fn ivass_amplifier_with_width(p: &[BigInt], k: u32, n: usize) -> Result<IvassAmplifier, ReductionError> {
    let limit = BigInt::one() << k;
    for x in p {
        if x.sign() == num_bigint::Sign::Minus || *x > limit {
            return Err(ReductionError::TooLarge { value: x.to_string(), k });
        }
    }
    if n < bit_width(p) {
        return Err(ReductionError::Parameter(format!("{n} bits cannot hold every value")));
    }
    let m = p.len();
    let (st, te) = (m, m + 1);
    let mut b = IvassBuilder::new(m + 2);
    let mut cur = b.state("h0");
    let mut path = Vec::new();
    for i in 0..k {
        let next = b.state(format!("h{}", i + 1));
        path.extend(b.halve(cur, next, st, te));
        cur = next;
    }
    for (i, x) in p.iter().enumerate() {
        let mut seen_one = false;
        for j in (0..n).rev() {
            let mid = b.state(format!("x{}.b{j}", i + 1));
            path.extend(if seen_one { b.double(cur, mid, i, te) } else { b.idle(cur, mid, st, te) });
            let next = b.state(format!("x{}.b{j}'", i + 1));
            let bit = x.bit(j as u64);
            path.extend(if bit { b.add(mid, next, i, st, te) } else { b.idle(mid, next, st, te) });
            seen_one |= bit;
            cur = next;
        }
    }
    let scale = Rational::pow2(k).recip();
    let mut init = RatVector::zeros(m + 2);
    init.0[st] = Rational::one();
    let mut fin = RatVector::zeros(m + 2);
    for (i, x) in p.iter().enumerate() {
        fin.0[i] = Rational::int(x.clone()) * &scale;
    }
    fin.0[st] = scale;
    let steps = path.len();
    Ok(IvassAmplifier {
        instance: RunLengthInstance { machine: b.finish(), c_init: Config::new(0, init), c_fin: Config::new(cur, fin), steps },
        path,
        k,
        n,
    })
}

#[derive(Clone, Debug)]
pub struct QvassAmplifier {
    pub inner: IvassAmplifier,
    pub chain: CtrlChain,
    pub witness: FiringSequence,
}

impl QvassAmplifier {
    pub fn instance(&self) -> &RunLengthInstance<Qvass> {
        &self.chain.instance
    }
    pub fn ctrl(&self) -> usize {
        self.chain.ctrl()
    }
    /// Counter of the i-th inner counter (x_1.. x_m, st, te) and its complement.
    pub fn pair(&self, i: usize) -> (usize, usize) {
        (value_index(i), complement_index(i))
    }
}

pub fn qvass_amplifier(p: &[BigInt], k: u32) -> Result<QvassAmplifier, ReductionError> {
    qvass_amplifier_with_width(p, k, bit_width(p))
}

pub fn qvass_amplifier_with_width(p: &[BigInt], k: u32, n: usize) -> Result<QvassAmplifier, ReductionError> {
    let inner = ivass_amplifier_with_width(p, k, n)?;
    let chain = ivass_to_cvassrl(&inner.instance);
    let witness = chain.translate(&inner.witness()?);
    Ok(QvassAmplifier { inner, chain, witness })
}

/// Exponent e with x = a / 2^e in lowest terms, if the denominator is a power of two.
fn two_adic_denominator(x: &Rational) -> Option<u32> {
    let d = x.denom();
    let e = d.bits() as u32 - 1;
    (*d == BigInt::one() << e).then_some(e)
}

fn check_structured(c: &Config) -> Result<u32, ReductionError> {
    let mut k = 0;
    for x in &c.values.0 {
        k = k.max(two_adic_denominator(x).ok_or_else(|| ReductionError::NotStructured(x.to_string()))?);
    }
    Ok(k)
}

#[derive(Clone, Debug)]
pub struct SuperChain {
    pub instance: RunLengthInstance<Qvass>,
    pub k: u32,
    pub b: usize,
    pub b_bar: usize,
}

/// Scales every value by 1/2^k, with 2^k above every value and the run
/// length, and threads a pair (b, b̄) with b + b̄ = 1/2^k through every
/// rule, so no fraction can exceed 1/2^k.
pub fn structured_to_superstructured(inst: &RunLengthInstance<Qvass>) -> Result<SuperChain, ReductionError> {
    check_structured(&inst.c_init)?;
    check_structured(&inst.c_fin)?;
    let mut top = BigInt::from(inst.steps);
    for x in inst.c_init.values.0.iter().chain(&inst.c_fin.values.0) {
        top = top.max(x.ceil());
    }
    let mut k = 0u32;
    while (BigInt::one() << k) <= top {
        k += 1;
    }
    let m = &inst.machine;
    let d = m.dim;
    let (b, b_bar) = (d, d + 1);
    let mut states = m.states.clone();
    let mut rules = Vec::with_capacity(2 * m.rules.len());
    for (i, r) in m.rules.iter().enumerate() {
        let mid = states.len();
        states.push(format!("r{i}.sup"));
        let mut ub = r.update.0.clone();
        ub.extend([BigInt::from(-1), BigInt::from(1)]);
        let mut ue = vec![BigInt::zero(); d];
        ue.extend([BigInt::from(1), BigInt::from(-1)]);
        rules.push(VassRule { from: r.from, to: mid, update: IntVector(ub) });
        rules.push(VassRule { from: mid, to: r.to, update: IntVector(ue) });
    }
    let scale = Rational::pow2(k).recip();
    let lift = |c: &Config| {
        let mut v = c.values.scale(&scale);
        v.0.extend([scale.clone(), Rational::zero()]);
        Config::new(c.state, v)
    };
    Ok(SuperChain {
        instance: RunLengthInstance {
            machine: Qvass { states, dim: d + 2, rules },
            c_init: lift(&inst.c_init),
            c_fin: lift(&inst.c_fin),
            steps: 2 * inst.steps,
        },
        k,
        b,
        b_bar,
    })
}

impl SuperChain {
    /// (α, r) becomes (α/2^k, r^b), (α/2^k, r^e).
    pub fn translate(&self, seq: &[Firing]) -> FiringSequence {
        let s = Rational::pow2(self.k).recip();
        seq.iter()
            .flat_map(|f| {
                let a = &f.fraction * &s;
                [Firing::new(a.clone(), 2 * f.rule), Firing::new(a, 2 * f.rule + 1)]
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct UnaryChain {
    pub instance: RunLengthInstance<Qvass>,
    pub amp_init: QvassAmplifier,
    pub amp_fin: QvassAmplifier,
    pub k: u32,
    /// First counter of the two amplifier blocks.
    pub y_offset: usize,
    pub z_offset: usize,
    amp_init_rules: usize,
    t_inc: Vec<(usize, Rational)>,
    core_rules: usize,
    bridge: usize,
    amp_fin_rules: usize,
    t_dec: Vec<(usize, Rational)>,
}

struct Assembler {
    states: Vec<String>,
    dim: usize,
    rules: Vec<VassRule>,
}

impl Assembler {
    /// Copies `m`, renaming states with `prefix` and moving counter j to
    /// `offset + j`. Returns the state offset.
    fn embed(&mut self, m: &Qvass, prefix: &str, offset: usize) -> usize {
        let so = self.states.len();
        self.states.extend(m.states.iter().map(|s| format!("{prefix}{s}")));
        for r in &m.rules {
            let mut u = vec![BigInt::zero(); self.dim];
            for (j, w) in r.update.0.iter().enumerate() {
                u[offset + j] = w.clone();
            }
            self.rules.push(VassRule { from: so + r.from, to: so + r.to, update: IntVector(u) });
        }
        so
    }

    fn state(&mut self, name: String) -> usize {
        self.states.push(name);
        self.states.len() - 1
    }

    fn rule(&mut self, from: usize, to: usize, delta: &[(usize, i64)]) -> usize {
        let mut u = vec![BigInt::zero(); self.dim];
        for &(i, w) in delta {
            u[i] += w;
        }
        self.rules.push(VassRule { from, to, update: IntVector(u) });
        self.rules.len() - 1
    }
}

/// Wraps a coverability instance whose configurations have power-of-two
/// denominators and values at most 1 between two amplifiers, so that the
/// new start and target configurations are integral. The source target
/// state should have no outgoing rules for the converse direction to hold.
pub fn assemble_unary_instance(inst: &RunLengthInstance<Qvass>) -> Result<UnaryChain, ReductionError> {
    let k = check_structured(&inst.c_init)?.max(check_structured(&inst.c_fin)?);
    for x in inst.c_init.values.0.iter().chain(&inst.c_fin.values.0) {
        if *x > Rational::one() {
            return Err(ReductionError::Parameter(format!("value {x} exceeds 1")));
        }
    }
    let pow = Rational::pow2(k);
    let nums = |c: &Config| -> Vec<BigInt> { c.values.0.iter().map(|x| (x * &pow).floor()).collect() };
    let alpha = nums(&inst.c_init);
    let beta = nums(&inst.c_fin);
    let n = bit_width(&alpha).max(bit_width(&beta));
    let amp_init = qvass_amplifier_with_width(&alpha, k, n)?;
    let amp_fin = qvass_amplifier_with_width(&beta, k, n)?;
    let d = inst.machine.dim;
    let block = amp_init.chain.instance.machine.dim;
    let (y_offset, z_offset) = (d, d + block);
    let mut a = Assembler { states: Vec::new(), dim: d + 2 * block, rules: Vec::new() };

    let amp_d = &amp_init.chain.instance;
    let sd = a.embed(&amp_d.machine, "d.", y_offset);
    let amp_init_rules = a.rules.len();
    let sm = a.embed(&inst.machine, "", 0);
    let amp_e = &amp_fin.chain.instance;
    let amp_fin_rules = a.rules.len();
    let se = a.embed(&amp_e.machine, "e.", z_offset);

    // transfer chains
    let scale = pow.recip();
    let inner = d + 2;
    let transfer = |a: &mut Assembler, from: usize, to: usize, off: usize, vals: &[BigInt], sign: i64, tag: &str| {
        let mut out = Vec::with_capacity(inner);
        let mut cur = from;
        for i in 0..inner {
            let next = if i + 1 == inner { to } else { a.state(format!("{tag}{}", i + 1)) };
            let v = if i < d {
                Rational::int(vals[i].clone()) * &scale
            } else if i == d {
                scale.clone()
            } else {
                Rational::zero()
            };
            let r = if v.is_zero() {
                a.rule(cur, next, &[])
            } else {
                let mut delta = vec![(off + value_index(i), -1), (off + complement_index(i), 1)];
                if i < d {
                    delta.push((i, sign));
                }
                a.rule(cur, next, &delta)
            };
            out.push((r, if v.is_zero() { Rational::one() } else { v }));
            cur = next;
        }
        out
    };
    let end = a.state("end".into());
    let t_inc = transfer(&mut a, sd + amp_d.c_fin.state, sm + inst.c_init.state, y_offset, &alpha, 1, "inc.");
    let bridge = a.rule(sm + inst.c_fin.state, se + amp_e.c_init.state, &[]);
    let t_dec = transfer(&mut a, se + amp_e.c_fin.state, end, z_offset, &beta, -1, "dec.");

    let mut init = RatVector::zeros(a.dim);
    let mut fin = RatVector::zeros(a.dim);
    for (off, amp) in [(y_offset, amp_d), (z_offset, amp_e)] {
        for j in 0..block {
            init.0[off + j] = amp.c_init.values.0[j].clone();
        }
        for i in 0..inner {
            fin.0[off + complement_index(i)] = Rational::one();
        }
        fin.0[off + 2 * inner] = amp.c_fin.values.0[2 * inner].clone();
    }
    let steps = amp_d.steps + inner + inst.steps + 1 + amp_e.steps + inner;
    let machine = Qvass { states: a.states, dim: a.dim, rules: a.rules };
    Ok(UnaryChain {
        instance: RunLengthInstance {
            machine,
            c_init: Config::new(sd + amp_d.c_init.state, init),
            c_fin: Config::new(end, fin),
            steps,
        },
        amp_init_rules,
        t_inc,
        core_rules: inst.machine.rules.len(),
        bridge,
        amp_fin_rules,
        t_dec,
        amp_init,
        amp_fin,
        k,
        y_offset,
        z_offset,
    })
}

impl UnaryChain {
    /// Composes amplifier runs, the transfer chains and a run of the
    /// wrapped machine that covers its target.
    pub fn translate(&self, seq: &[Firing]) -> Result<FiringSequence, ReductionError> {
        if let Some(f) = seq.iter().find(|f| f.rule >= self.core_rules) {
            return Err(ReductionError::BadRun(format!("no rule {}", f.rule)));
        }
        let mut out: FiringSequence = self.amp_init.witness.clone();
        out.extend(self.t_inc.iter().map(|(r, a)| Firing::new(a.clone(), *r)));
        out.extend(seq.iter().map(|f| Firing::new(f.fraction.clone(), self.amp_init_rules + f.rule)));
        out.push(Firing::new(Rational::one(), self.bridge));
        out.extend(self.amp_fin.witness.iter().map(|f| Firing::new(f.fraction.clone(), self.amp_fin_rules + f.rule)));
        out.extend(self.t_dec.iter().map(|(r, a)| Firing::new(a.clone(), *r)));
        Ok(out)
    }
}
