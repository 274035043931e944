//! Two-rule gadgets over [0,1]-bounded counters: addition, doubling,
//! halving and an idle round trip. Each one, started with `te = 0`,
//! has exactly one run of length two because every rule zero-tests the
//! counter it drains.

use fracreach::machines::{IvassRl, IvassRule};
use fracreach::numerics::IntVector;

/// Incremental construction of an `IvassRl`.
#[derive(Clone, Debug)]
pub struct IvassBuilder {
    pub machine: IvassRl,
}

impl IvassBuilder {
    pub fn new(dim: usize) -> Self {
        IvassBuilder { machine: IvassRl { states: Vec::new(), dim, rules: Vec::new() } }
    }

    pub fn state(&mut self, name: impl Into<String>) -> usize {
        self.machine.states.push(name.into());
        self.machine.states.len() - 1
    }

    /// Adds a rule whose update is given sparsely as (counter, delta) pairs.
    pub fn rule(&mut self, from: usize, to: usize, delta: &[(usize, i64)], tests: &[usize]) -> usize {
        let mut u = vec![0i64; self.machine.dim];
        for &(i, d) in delta {
            u[i] += d;
        }
        self.machine.rules.push(IvassRule { from, to, update: IntVector::from_i64(&u), zero_tests: tests.to_vec() });
        self.machine.rules.len() - 1
    }

    fn mid(&mut self, from: usize, tag: &str) -> usize {
        let name = format!("{}.{tag}", self.machine.states[from]);
        self.state(name)
    }

    /// x += st, leaving st unchanged. Returns the two rule ids.
    pub fn add(&mut self, from: usize, to: usize, x: usize, st: usize, te: usize) -> [usize; 2] {
        let m = self.mid(from, "add");
        [self.rule(from, m, &[(x, 1), (te, 1), (st, -1)], &[st]), self.rule(m, to, &[(st, 1), (te, -1)], &[te])]
    }

    /// x *= 2. Cannot fire when x = 0.
    pub fn double(&mut self, from: usize, to: usize, x: usize, te: usize) -> [usize; 2] {
        let m = self.mid(from, "doub");
        [self.rule(from, m, &[(x, -1), (te, 2)], &[x]), self.rule(m, to, &[(x, 1), (te, -1)], &[te])]
    }

    /// x /= 2. Cannot fire when x = 0.
    pub fn halve(&mut self, from: usize, to: usize, x: usize, te: usize) -> [usize; 2] {
        let m = self.mid(from, "halve");
        [self.rule(from, m, &[(x, -2), (te, 1)], &[x]), self.rule(m, to, &[(x, 1), (te, -1)], &[te])]
    }

    /// Moves st to te and back; a two-step no-op with forced fractions.
    pub fn idle(&mut self, from: usize, to: usize, st: usize, te: usize) -> [usize; 2] {
        let m = self.mid(from, "idle");
        [self.rule(from, m, &[(te, 1), (st, -1)], &[st]), self.rule(m, to, &[(st, 1), (te, -1)], &[te])]
    }

    pub fn finish(self) -> IvassRl {
        self.machine
    }
}

fn standalone(dim: usize, f: impl FnOnce(&mut IvassBuilder, usize, usize)) -> IvassRl {
    let mut b = IvassBuilder::new(dim);
    let q = b.state("q");
    let q2 = b.state("q'");
    f(&mut b, q, q2);
    b.finish()
}

/// Addition gadget from state 0 to state 1 (the middle state is 2).
pub fn gadget_add(dim: usize, x: usize, st: usize, te: usize) -> IvassRl {
    standalone(dim, |b, q, q2| {
        b.add(q, q2, x, st, te);
    })
}

pub fn gadget_double(dim: usize, x: usize, te: usize) -> IvassRl {
    standalone(dim, |b, q, q2| {
        b.double(q, q2, x, te);
    })
}

pub fn gadget_halve(dim: usize, x: usize, te: usize) -> IvassRl {
    standalone(dim, |b, q, q2| {
        b.halve(q, q2, x, te);
    })
}

pub fn gadget_idle(dim: usize, st: usize, te: usize) -> IvassRl {
    standalone(dim, |b, q, q2| {
        b.idle(q, q2, st, te);
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fracreach::machines::examples::rat;
    use fracreach::machines::{forced_run, Config};

    fn run(g: &IvassRl, v: &[(i64, i64)]) -> Config {
        forced_run(g, &Config::new(0, rat(v)), &[0, 1]).unwrap().0
    }

    #[test]
    fn add_example() {
        let g = gadget_add(3, 0, 1, 2);
        assert_eq!(run(&g, &[(1, 4), (1, 8), (0, 1)]).values, rat(&[(3, 8), (1, 8), (0, 1)]));
    }

    #[test]
    fn double_and_halve() {
        let g = gadget_double(2, 0, 1);
        assert_eq!(run(&g, &[(1, 8), (0, 1)]).values, rat(&[(1, 4), (0, 1)]));
        let h = gadget_halve(2, 0, 1);
        assert_eq!(run(&h, &[(1, 2), (0, 1)]).values, rat(&[(1, 4), (0, 1)]));
    }
}
