use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId, LbsInstruction, LbsProgram, Sign};
use crate::error::{Error, Result};
use crate::poly::WeightExpr;

/// Compiles a formula into a three-register program whose register 1 ends up
/// holding the formula's value. Registers start as `(0, 1, 0)`.
pub fn formula_to_lbs(c: &Circuit) -> Result<LbsProgram> {
    let consumers = c.consumers();
    if (0..c.size()).any(|g| g != c.output() && consumers[g].len() != 1) {
        return Err(Error::NotFormula);
    }
    let mut instructions = Vec::new();
    // (gate, source, target, sign): R_target += sign * value(gate) * R_source
    let mut stack: Vec<(GateId, usize, usize, Sign)> = vec![(c.output(), 2, 1, Sign::Plus)];
    while let Some((g, i, j, s)) = stack.pop() {
        match c.gate(g) {
            Gate::Input(w) => instructions.push(LbsInstruction {
                target: j,
                source: i,
                sign: s,
                operand: w.clone(),
            }),
            Gate::Add(a, b) => {
                stack.push((*b, i, j, s));
                stack.push((*a, i, j, s));
            }
            Gate::Mul(a, b) => {
                let k = 6 - i - j;
                stack.push((*b, k, j, s.flip()));
                stack.push((*a, i, k, Sign::Minus));
                stack.push((*b, k, j, s));
                stack.push((*a, i, k, Sign::Plus));
            }
        }
    }
    Ok(LbsProgram {
        init: vec![WeightExpr::int(0), WeightExpr::one(), WeightExpr::int(0)],
        instructions,
    })
}

/// Layered skew circuit of width at most 6 computing register 1 of a
/// three-register program. A `+=` instruction takes two layers, a `-=` three.
pub fn lbs_to_width6_skew(p: &LbsProgram) -> Result<Circuit> {
    p.validate()?;
    if p.register_count() != 3 {
        return Err(Error::Register(format!(
            "expected 3 registers, found {}",
            p.register_count()
        )));
    }
    if p.instructions.is_empty() {
        return Ok(Circuit::input(p.init[0].clone()));
    }
    let mut b = CircuitBuilder::new();
    let zero = |b: &mut CircuitBuilder, level| b.push_at(Gate::Input(WeightExpr::int(0)), level);
    let mut regs: Vec<GateId> = p
        .init
        .iter()
        .map(|w| b.push_at(Gate::Input(w.clone()), 0))
        .collect();
    let mut level = 0;
    // inputs sitting beside the registers, consumed by the next instruction
    let mut pending_zero = zero(&mut b, 0);
    let first = &p.instructions[0];
    let mut pending_op = b.push_at(Gate::Input(first.operand.clone()), 0);
    for (n, ins) in p.instructions.iter().enumerate() {
        let (i, j) = (ins.source - 1, ins.target - 1);
        level += 1;
        let mut carried: Vec<GateId> = regs
            .iter()
            .map(|&r| b.push_at(Gate::Add(r, pending_zero), level))
            .collect();
        let mut product = b.push_at(Gate::Mul(regs[i], pending_op), level);
        let mut z = zero(&mut b, level);
        if ins.sign == Sign::Minus {
            let neg = b.push_at(Gate::Input(WeightExpr::int(-1)), level);
            level += 1;
            carried = carried
                .iter()
                .map(|&r| b.push_at(Gate::Add(r, z), level))
                .collect();
            product = b.push_at(Gate::Mul(product, neg), level);
            z = zero(&mut b, level);
        }
        level += 1;
        regs = (0..3)
            .map(|a| {
                let other = if a == j { product } else { z };
                b.push_at(Gate::Add(carried[a], other), level)
            })
            .collect();
        if let Some(next) = p.instructions.get(n + 1) {
            pending_zero = zero(&mut b, level);
            pending_op = b.push_at(Gate::Input(next.operand.clone()), level);
        }
    }
    b.finish_layered(regs[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{
        classify_circuit, eval_symbolic, parse_circuit, run_lbs, EvalMode, Value,
    };
    use crate::poly::Poly;

    fn reg1(p: &LbsProgram) -> Poly {
        match run_lbs(p, EvalMode::Symbolic).unwrap().swap_remove(0) {
            Value::Poly(q) => q,
            Value::Number(_) => unreachable!(),
        }
    }

    #[test]
    fn product_of_sums() {
        let c = parse_circuit(
            "g0 = var x\ng1 = var y\ng2 = add g0 g1\ng3 = var z\ng4 = const -2\ng5 = add g3 g4\n\
             g6 = mul g2 g5\noutput g6\n",
        )
        .unwrap();
        let p = formula_to_lbs(&c).unwrap();
        assert_eq!(reg1(&p), eval_symbolic(&c));
        assert_eq!(p.instructions.len(), 8);
        let w = lbs_to_width6_skew(&p).unwrap();
        let r = classify_circuit(&w);
        assert!(r.is_skew);
        assert!(r.width.unwrap() <= 6);
        assert_eq!(eval_symbolic(&w), eval_symbolic(&c));
        let minus = p
            .instructions
            .iter()
            .filter(|i| i.sign == Sign::Minus)
            .count();
        let plus = p.instructions.len() - minus;
        let depth = w.layers().unwrap().iter().max().copied().unwrap();
        assert_eq!(depth, 1 + 2 * plus + 3 * minus);
    }

    #[test]
    fn leaf_and_empty_program() {
        let c = Circuit::input(WeightExpr::var("x"));
        let p = formula_to_lbs(&c).unwrap();
        assert_eq!(p.instructions.len(), 1);
        assert_eq!(
            eval_symbolic(&lbs_to_width6_skew(&p).unwrap()),
            Poly::var("x")
        );
        let empty = LbsProgram {
            init: vec![WeightExpr::var("a"), WeightExpr::one(), WeightExpr::one()],
            instructions: vec![],
        };
        assert_eq!(
            eval_symbolic(&lbs_to_width6_skew(&empty).unwrap()),
            Poly::var("a")
        );
    }

    #[test]
    fn rejects_shared_gate() {
        let c = parse_circuit("g0 = var x\ng1 = add g0 g0\ng2 = mul g1 g1\noutput g2\n").unwrap();
        assert_eq!(formula_to_lbs(&c), Err(Error::NotFormula));
    }

    #[test]
    fn wrong_register_count() {
        let p = LbsProgram {
            init: vec![WeightExpr::one(); 4],
            instructions: vec![LbsInstruction {
                target: 1,
                source: 2,
                sign: Sign::Plus,
                operand: WeightExpr::one(),
            }],
        };
        assert!(matches!(lbs_to_width6_skew(&p), Err(Error::Register(_))));
    }
}
