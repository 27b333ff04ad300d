use std::collections::{BTreeMap, HashMap};

use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::error::Result;
use crate::poly::WeightExpr;

/// One way into a new state: the old state's value times a product of arc
/// weights.
pub(crate) struct Contribution<S> {
    pub to: S,
    pub from: S,
    pub weights: Vec<WeightExpr>,
}

/// Dynamic program over a sequence of steps whose values live in one layer
/// at a time. Products are chains of multiplications by input gates and sums
/// are balanced trees, with `x + 0` padding to keep everything layered.
pub(crate) struct LayeredDp<S> {
    b: CircuitBuilder,
    level: usize,
    frame: BTreeMap<S, GateId>,
    zeros: HashMap<usize, GateId>,
    inputs: HashMap<(usize, WeightExpr), GateId>,
}

impl<S: Ord + Clone> LayeredDp<S> {
    pub fn new(start: S) -> Self {
        let mut b = CircuitBuilder::new();
        let one = b.push_at(Gate::Input(WeightExpr::one()), 0);
        LayeredDp {
            b,
            level: 0,
            frame: BTreeMap::from([(start, one)]),
            zeros: HashMap::new(),
            inputs: HashMap::new(),
        }
    }

    pub fn states(&self) -> impl Iterator<Item = &S> {
        self.frame.keys()
    }

    /// Renames or drops states without spending a layer. States mapped to
    /// the same name must not collide.
    pub fn remap(&mut self, mut f: impl FnMut(&S) -> Option<S>) {
        let old = std::mem::take(&mut self.frame);
        for (s, g) in old {
            if let Some(t) = f(&s) {
                let prev = self.frame.insert(t, g);
                assert!(prev.is_none(), "remap merged two states");
            }
        }
    }

    fn input_at(&mut self, w: &WeightExpr, level: usize) -> GateId {
        let b = &mut self.b;
        *self
            .inputs
            .entry((level, w.clone()))
            .or_insert_with(|| b.push_at(Gate::Input(w.clone()), level))
    }

    fn pad(&mut self, g: GateId, level: usize) -> GateId {
        let z = match self.zeros.get(&(level - 1)) {
            Some(&z) => z,
            None => {
                let z = self.b.push_at(Gate::Input(WeightExpr::int(0)), level - 1);
                self.zeros.insert(level - 1, z);
                z
            }
        };
        self.b.push_at(Gate::Add(g, z), level)
    }

    pub fn step(&mut self, contributions: Vec<Contribution<S>>) {
        let base = self.level;
        let chain = contributions
            .iter()
            .map(|c| c.weights.iter().filter(|w| !w.is_one()).count())
            .max()
            .unwrap_or(0)
            .max(1);
        let mut groups: BTreeMap<S, Vec<GateId>> = BTreeMap::new();
        for c in contributions {
            let Some(&start) = self.frame.get(&c.from) else {
                continue;
            };
            let mut cur = start;
            let mut level = base;
            for w in c.weights.iter().filter(|w| !w.is_one()) {
                let x = self.input_at(w, level);
                level += 1;
                cur = self.b.push_at(Gate::Mul(cur, x), level);
            }
            while level < base + chain {
                level += 1;
                cur = self.pad(cur, level);
            }
            groups.entry(c.to).or_default().push(cur);
        }
        let mut level = base + chain;
        while groups.values().any(|v| v.len() > 1) {
            level += 1;
            for items in groups.values_mut() {
                let mut next = Vec::with_capacity(items.len().div_ceil(2));
                for pair in items.chunks(2) {
                    next.push(if pair.len() == 2 {
                        self.b.push_at(Gate::Add(pair[0], pair[1]), level)
                    } else {
                        self.pad(pair[0], level)
                    });
                }
                *items = next;
            }
        }
        self.level = level;
        self.frame = groups.into_iter().map(|(s, v)| (s, v[0])).collect();
    }

    /// Circuit computing the value of `state`, or the constant 0 when the
    /// state was never reached.
    pub fn finish(self, state: &S) -> Result<Circuit> {
        match self.frame.get(state) {
            Some(&g) => self.b.finish_layered(g),
            None => Ok(Circuit::input(WeightExpr::int(0))),
        }
    }
}
