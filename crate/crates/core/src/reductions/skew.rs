use crate::circuit::{disjoint_operand, Circuit, Gate, GateId};
use crate::error::{Error, Result};

/// Split of a weakly skew circuit into subcircuits. Subcircuit 0 holds the
/// output; every other subcircuit feeds exactly one multiplication gate.
///
/// Non-input gates belong to exactly one subcircuit. An input gate that is
/// the split-off operand of a multiplication forms a subcircuit on its own
/// and may also occur elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewDecomposition {
    pub subcircuits: Vec<Vec<GateId>>,
    /// Output gate of each subcircuit.
    pub outputs: Vec<GateId>,
    /// The multiplication gate a subcircuit feeds (`None` for subcircuit 0).
    pub parent_mul: Vec<Option<GateId>>,
    /// For every multiplication gate, the subcircuit split off at it.
    pub child_of_mul: Vec<Option<usize>>,
    /// `(top, bottom)` layer of each subcircuit when the circuit is layered.
    pub spans: Option<Vec<(usize, usize)>>,
}

impl SkewDecomposition {
    pub fn len(&self) -> usize {
        self.subcircuits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subcircuits.is_empty()
    }

    /// The operand of `mul` that stays in the enclosing subcircuit.
    pub fn main_operand(&self, c: &Circuit, mul: GateId) -> GateId {
        let (a, b) = c.gate(mul).operands().expect("multiplication gate");
        let child = self.outputs[self.child_of_mul[mul].expect("split multiplication")];
        if child == b {
            a
        } else {
            b
        }
    }
}

/// An input operand is preferred as the split-off side; otherwise the right
/// operand is split off when possible, so the left one stays.
fn choose_child(c: &Circuit, consumers: &[Vec<(GateId, u8)>], mul: GateId) -> Option<GateId> {
    let (a, b) = c.gate(mul).operands()?;
    match (c.gate(a).is_input(), c.gate(b).is_input()) {
        (_, true) => Some(b),
        (true, false) => Some(a),
        (false, false) => disjoint_operand(c, consumers, mul),
    }
}

pub fn decompose_weakly_skew(c: &Circuit) -> Result<SkewDecomposition> {
    let consumers = c.consumers();
    let mut subcircuits: Vec<Vec<GateId>> = vec![Vec::new()];
    let mut outputs = vec![c.output()];
    let mut parent_mul = vec![None];
    let mut child_of_mul = vec![None; c.size()];
    let mut owner: Vec<Option<usize>> = vec![None; c.size()];
    let mut stack = vec![(c.output(), 0usize)];
    while let Some((g, sub)) = stack.pop() {
        let single_input_child = sub != 0 && c.gate(g).is_input() && outputs[sub] == g;
        if !single_input_child {
            match owner[g] {
                Some(o) if o == sub => continue,
                Some(_) if c.gate(g).is_input() => {}
                Some(_) => {
                    return Err(Error::NotWeaklySkew(parent_mul[sub].unwrap_or(g)));
                }
                None => owner[g] = Some(sub),
            }
        }
        subcircuits[sub].push(g);
        match *c.gate(g) {
            Gate::Input(_) => {}
            Gate::Add(a, b) => {
                stack.push((b, sub));
                stack.push((a, sub));
            }
            Gate::Mul(a, b) => {
                let child = choose_child(c, &consumers, g).ok_or(Error::NotWeaklySkew(g))?;
                let main = if child == b { a } else { b };
                let j = subcircuits.len();
                subcircuits.push(Vec::new());
                outputs.push(child);
                parent_mul.push(Some(g));
                child_of_mul[g] = Some(j);
                stack.push((child, j));
                stack.push((main, sub));
            }
        }
    }
    for s in &mut subcircuits {
        s.sort_unstable();
        s.dedup();
    }
    let spans = c.layers().map(|layers| {
        subcircuits
            .iter()
            .zip(&outputs)
            .map(|(gs, &o)| (layers[o], gs.iter().map(|&g| layers[g]).max().unwrap()))
            .collect()
    });
    Ok(SkewDecomposition {
        subcircuits,
        outputs,
        parent_mul,
        child_of_mul,
        spans,
    })
}
