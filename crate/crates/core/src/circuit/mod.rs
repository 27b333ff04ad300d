//! Arithmetic circuits: gates in topological order, optional layer numbers,
//! class membership checks and evaluation.

mod lbs;
mod text;

pub use lbs::{run_lbs, LbsInstruction, LbsProgram, Sign};
pub use text::{parse_circuit, write_circuit};

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{Poly, Rational, WeightExpr, DEFAULT_TERM_CAP};

pub type GateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(WeightExpr),
    Add(GateId, GateId),
    Mul(GateId, GateId),
}

impl Gate {
    pub fn operands(&self) -> Option<(GateId, GateId)> {
        match *self {
            Gate::Input(_) => None,
            Gate::Add(a, b) | Gate::Mul(a, b) => Some((a, b)),
        }
    }

    pub fn is_input(&self) -> bool {
        matches!(self, Gate::Input(_))
    }
}

/// An acyclic circuit whose gates are stored in topological order.
///
/// Layers, when present, are numbered from 1 (the output side) upwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: GateId,
    layers: Option<Vec<usize>>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>, output: GateId, layers: Option<Vec<usize>>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::MalformedCircuit("circuit has no gates".into()));
        }
        if output >= gates.len() {
            return Err(Error::MalformedCircuit(format!(
                "output g{output} does not exist"
            )));
        }
        let mut outdeg = vec![0usize; gates.len()];
        for (g, gate) in gates.iter().enumerate() {
            if let Some((a, b)) = gate.operands() {
                if a >= g || b >= g {
                    return Err(Error::MalformedCircuit(format!(
                        "g{g} reads a gate that does not precede it"
                    )));
                }
                outdeg[a] += 1;
                outdeg[b] += 1;
            }
        }
        if outdeg[output] != 0 {
            return Err(Error::MalformedCircuit(format!(
                "output g{output} feeds another gate"
            )));
        }
        if let Some(dead) = (0..gates.len()).find(|&g| g != output && outdeg[g] == 0) {
            return Err(Error::MalformedCircuit(format!(
                "g{dead} has outdegree 0 but is not the output"
            )));
        }
        if let Some(l) = &layers {
            if l.len() != gates.len() {
                return Err(Error::MalformedCircuit("layer map is not total".into()));
            }
            if let Some(g) = l.iter().position(|&x| x == 0) {
                return Err(Error::Layering {
                    gate: g,
                    reason: "layers are numbered from 1".into(),
                });
            }
        }
        Ok(Circuit {
            gates,
            output,
            layers,
        })
    }

    /// The one-gate circuit computing a constant or a variable.
    pub fn input(w: WeightExpr) -> Self {
        Circuit {
            gates: vec![Gate::Input(w)],
            output: 0,
            layers: Some(vec![1]),
        }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, g: GateId) -> &Gate {
        &self.gates[g]
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    pub fn layers(&self) -> Option<&[usize]> {
        self.layers.as_deref()
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn without_layers(&self) -> Circuit {
        Circuit {
            layers: None,
            ..self.clone()
        }
    }

    /// Arrows leaving each gate, as `(consumer, operand position)`.
    pub fn consumers(&self) -> Vec<Vec<(GateId, u8)>> {
        let mut out = vec![Vec::new(); self.gates.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            if let Some((a, b)) = gate.operands() {
                out[a].push((g, 0));
                out[b].push((g, 1));
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.gates.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            if let Some((a, b)) = gate.operands() {
                d[g] = 1 + d[a].max(d[b]);
            }
        }
        d[self.output]
    }
}

/// Incremental construction with dead-gate pruning at the end.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    layers: Vec<usize>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Adds a gate at a level (levels count upwards from the inputs; they are
    /// turned into layer numbers by [`CircuitBuilder::finish_layered`]).
    pub fn push_at(&mut self, gate: Gate, level: usize) -> GateId {
        self.gates.push(gate);
        self.layers.push(level);
        self.gates.len() - 1
    }

    pub fn push(&mut self, gate: Gate) -> GateId {
        self.push_at(gate, 0)
    }

    pub fn input(&mut self, w: WeightExpr) -> GateId {
        self.push(Gate::Input(w))
    }

    pub fn add(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Add(a, b))
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Mul(a, b))
    }

    /// Balanced addition tree over `items` (which must be nonempty).
    pub fn sum(&mut self, items: &[GateId]) -> GateId {
        let mut cur = items.to_vec();
        while cur.len() > 1 {
            let mut next = Vec::with_capacity(cur.len().div_ceil(2));
            for pair in cur.chunks(2) {
                next.push(if pair.len() == 2 {
                    self.add(pair[0], pair[1])
                } else {
                    pair[0]
                });
            }
            cur = next;
        }
        cur[0]
    }

    fn prune(&self, output: GateId) -> (Vec<Gate>, Vec<usize>, GateId) {
        let mut live = vec![false; self.gates.len()];
        live[output] = true;
        for g in (0..=output).rev() {
            if live[g] {
                if let Some((a, b)) = self.gates[g].operands() {
                    live[a] = true;
                    live[b] = true;
                }
            }
        }
        let mut remap = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        let mut levels = Vec::new();
        for g in 0..=output {
            if !live[g] {
                continue;
            }
            remap[g] = gates.len();
            gates.push(match &self.gates[g] {
                Gate::Input(w) => Gate::Input(w.clone()),
                Gate::Add(a, b) => Gate::Add(remap[*a], remap[*b]),
                Gate::Mul(a, b) => Gate::Mul(remap[*a], remap[*b]),
            });
            levels.push(self.layers[g]);
        }
        let out = remap[output];
        (gates, levels, out)
    }

    pub fn finish(self, output: GateId) -> Result<Circuit> {
        let (gates, _, out) = self.prune(output);
        Circuit::new(gates, out, None)
    }

    /// Prunes dead gates and converts levels to layers so that the output
    /// lands in layer 1.
    pub fn finish_layered(self, output: GateId) -> Result<Circuit> {
        let (gates, levels, out) = self.prune(output);
        let top = levels[out];
        if let Some(g) = levels.iter().position(|&l| l > top) {
            return Err(Error::Layering {
                gate: g,
                reason: "gate sits above the output level".into(),
            });
        }
        let layers = levels.iter().map(|&l| top - l + 1).collect();
        Circuit::new(gates, out, Some(layers))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitClassReport {
    pub is_formula: bool,
    pub is_skew: bool,
    pub is_weakly_skew: bool,
    pub width: Option<usize>,
    pub size: usize,
    pub depth: usize,
}

/// Whether the subcircuit below `operand` reaches the rest of the circuit only
/// through the arrow into `consumer` at position `side`.
fn operand_is_disjoint(
    c: &Circuit,
    consumers: &[Vec<(GateId, u8)>],
    consumer: GateId,
    side: u8,
    operand: GateId,
) -> bool {
    let mut in_cone = vec![false; c.size()];
    let mut stack = vec![operand];
    in_cone[operand] = true;
    let mut cone = Vec::new();
    while let Some(g) = stack.pop() {
        cone.push(g);
        if let Some((a, b)) = c.gate(g).operands() {
            for x in [a, b] {
                if !in_cone[x] {
                    in_cone[x] = true;
                    stack.push(x);
                }
            }
        }
    }
    cone.iter().all(|&g| {
        consumers[g]
            .iter()
            .all(|&(to, pos)| in_cone[to] || (g == operand && to == consumer && pos == side))
    })
}

/// Which operand of a multiplication gate may be split off as a disjoint
/// subcircuit. Input operands always qualify (a leaf can be duplicated per
/// arrow). When both qualify the right operand is returned, so the left one
/// stays with the enclosing subcircuit.
pub fn disjoint_operand(
    c: &Circuit,
    consumers: &[Vec<(GateId, u8)>],
    mul: GateId,
) -> Option<GateId> {
    let (a, b) = c.gate(mul).operands()?;
    let passes = |op: GateId, side: u8| {
        c.gate(op).is_input() || operand_is_disjoint(c, consumers, mul, side, op)
    };
    if passes(b, 1) {
        Some(b)
    } else if passes(a, 0) {
        Some(a)
    } else {
        None
    }
}

pub fn classify_circuit(c: &Circuit) -> CircuitClassReport {
    let consumers = c.consumers();
    let is_formula = (0..c.size()).all(|g| g == c.output() || consumers[g].len() == 1);
    let mut is_skew = true;
    let mut is_weakly_skew = true;
    for (g, gate) in c.gates().iter().enumerate() {
        if let Gate::Mul(a, b) = *gate {
            if !(c.gate(a).is_input() || c.gate(b).is_input()) {
                is_skew = false;
                if disjoint_operand(c, &consumers, g).is_none() {
                    is_weakly_skew = false;
                }
            }
        }
    }
    CircuitClassReport {
        is_formula,
        is_skew,
        is_weakly_skew,
        width: validate_layering(c).ok(),
        size: c.size(),
        depth: c.depth(),
    }
}

/// Checks the bounded-width layering and returns the width (largest layer).
pub fn validate_layering(c: &Circuit) -> Result<usize> {
    let layers = c.layers().ok_or_else(|| Error::Layering {
        gate: c.output(),
        reason: "circuit carries no layer assignment".into(),
    })?;
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (g, gate) in c.gates().iter().enumerate() {
        *counts.entry(layers[g]).or_insert(0) += 1;
        if let Some((a, b)) = gate.operands() {
            for x in [a, b] {
                if layers[x] != layers[g] + 1 {
                    return Err(Error::Layering {
                        gate: g,
                        reason: format!(
                            "in layer {} but operand g{x} is in layer {}",
                            layers[g], layers[x]
                        ),
                    });
                }
            }
        }
    }
    Ok(counts.values().copied().max().unwrap_or(0))
}

#[derive(Clone, Copy, Debug)]
pub enum EvalMode<'a> {
    Symbolic,
    Numeric(&'a HashMap<String, Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Poly(Poly),
    Number(Rational),
}

pub fn eval_circuit(c: &Circuit, mode: EvalMode<'_>) -> Result<Value> {
    match mode {
        EvalMode::Symbolic => eval_symbolic_capped(c, DEFAULT_TERM_CAP).map(Value::Poly),
        EvalMode::Numeric(a) => eval_numeric(c, a).map(Value::Number),
    }
}

pub fn eval_symbolic(c: &Circuit) -> Poly {
    eval_symbolic_capped(c, usize::MAX).expect("uncapped evaluation")
}

/// Topological fold; each intermediate value is dropped after its last use.
pub fn eval_symbolic_capped(c: &Circuit, cap: usize) -> Result<Poly> {
    let mut remaining: Vec<usize> = c.consumers().iter().map(Vec::len).collect();
    let mut vals: Vec<Option<Poly>> = vec![None; c.size()];
    for (g, gate) in c.gates().iter().enumerate() {
        let v = match gate {
            Gate::Input(w) => w.to_poly(),
            Gate::Add(a, b) => vals[*a]
                .as_ref()
                .unwrap()
                .checked_add(vals[*b].as_ref().unwrap(), cap)?,
            Gate::Mul(a, b) => vals[*a]
                .as_ref()
                .unwrap()
                .checked_mul(vals[*b].as_ref().unwrap(), cap)?,
        };
        if let Some((a, b)) = gate.operands() {
            for x in [a, b] {
                remaining[x] -= 1;
                if remaining[x] == 0 {
                    vals[x] = None;
                }
            }
        }
        vals[g] = Some(v);
    }
    Ok(vals[c.output()].take().unwrap())
}

pub fn eval_numeric(c: &Circuit, assignment: &HashMap<String, Rational>) -> Result<Rational> {
    let mut vals: Vec<Rational> = Vec::with_capacity(c.size());
    for gate in c.gates() {
        let v = match gate {
            Gate::Input(WeightExpr::Const(k)) => k.clone(),
            Gate::Input(WeightExpr::Var(x)) => assignment
                .get(x)
                .cloned()
                .ok_or_else(|| Error::MissingVariable(x.clone()))?,
            Gate::Add(a, b) => &vals[*a] + &vals[*b],
            Gate::Mul(a, b) => &vals[*a] * &vals[*b],
        };
        vals.push(v);
    }
    Ok(vals.swap_remove(c.output()))
}

impl Value {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Poly(p) => p.is_zero(),
            Value::Number(r) => r.is_zero(),
        }
    }
}
