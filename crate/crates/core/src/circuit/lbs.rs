use std::fmt;

use super::{EvalMode, Value};
use crate::error::{Error, Result};
use crate::poly::{Poly, Rational, WeightExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `R_target <- R_target ± (R_source * operand)`, registers numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LbsInstruction {
    pub target: usize,
    pub source: usize,
    pub sign: Sign,
    pub operand: WeightExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LbsProgram {
    pub init: Vec<WeightExpr>,
    pub instructions: Vec<LbsInstruction>,
}

impl LbsProgram {
    pub fn register_count(&self) -> usize {
        self.init.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.register_count();
        for (n, ins) in self.instructions.iter().enumerate() {
            if ins.target == 0 || ins.target > m || ins.source == 0 || ins.source > m {
                return Err(Error::Register(format!(
                    "instruction {n} uses a register outside 1..={m}"
                )));
            }
            if ins.target == ins.source {
                return Err(Error::Register(format!(
                    "instruction {n} reads and writes register {}",
                    ins.target
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for LbsInstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.sign {
            Sign::Plus => "+=",
            Sign::Minus => "-=",
        };
        write!(
            f,
            "R{} {op} R{} * {}",
            self.target, self.source, self.operand
        )
    }
}

impl fmt::Display for LbsProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "registers {}", self.register_count())?;
        write!(f, "init")?;
        for w in &self.init {
            write!(f, " {w}")?;
        }
        writeln!(f)?;
        for ins in &self.instructions {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}

pub fn run_lbs(p: &LbsProgram, mode: EvalMode<'_>) -> Result<Vec<Value>> {
    p.validate()?;
    match mode {
        EvalMode::Symbolic => {
            let mut regs: Vec<Poly> = p.init.iter().map(WeightExpr::to_poly).collect();
            for ins in &p.instructions {
                let delta = &regs[ins.source - 1] * &ins.operand.to_poly();
                let r = &mut regs[ins.target - 1];
                *r = match ins.sign {
                    Sign::Plus => &*r + &delta,
                    Sign::Minus => &*r - &delta,
                };
            }
            Ok(regs.into_iter().map(Value::Poly).collect())
        }
        EvalMode::Numeric(a) => {
            let val = |w: &WeightExpr| -> Result<Rational> {
                match w {
                    WeightExpr::Const(c) => Ok(c.clone()),
                    WeightExpr::Var(x) => a
                        .get(x)
                        .cloned()
                        .ok_or_else(|| Error::MissingVariable(x.clone())),
                }
            };
            let mut regs = p.init.iter().map(val).collect::<Result<Vec<_>>>()?;
            for ins in &p.instructions {
                let delta = &regs[ins.source - 1] * val(&ins.operand)?;
                let r = &mut regs[ins.target - 1];
                match ins.sign {
                    Sign::Plus => *r += delta,
                    Sign::Minus => *r -= delta,
                }
            }
            Ok(regs.into_iter().map(Value::Number).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ins(target: usize, source: usize, sign: Sign, w: WeightExpr) -> LbsInstruction {
        LbsInstruction {
            target,
            source,
            sign,
            operand: w,
        }
    }

    fn polys(v: Vec<Value>) -> Vec<Poly> {
        v.into_iter()
            .map(|x| match x {
                Value::Poly(p) => p,
                Value::Number(_) => unreachable!(),
            })
            .collect()
    }

    #[test]
    fn single_step() {
        let p = LbsProgram {
            init: vec![WeightExpr::one(); 3],
            instructions: vec![ins(1, 2, Sign::Plus, WeightExpr::var("x"))],
        };
        let r = polys(run_lbs(&p, EvalMode::Symbolic).unwrap());
        assert_eq!(
            r,
            vec![&Poly::one() + &Poly::var("x"), Poly::one(), Poly::one()]
        );
    }

    #[test]
    fn identity_and_cancellation() {
        let abc = LbsProgram {
            init: vec![
                WeightExpr::var("a"),
                WeightExpr::var("b"),
                WeightExpr::var("c"),
            ],
            instructions: vec![],
        };
        let r = polys(run_lbs(&abc, EvalMode::Symbolic).unwrap());
        assert_eq!(r, vec![Poly::var("a"), Poly::var("b"), Poly::var("c")]);

        let cancel = LbsProgram {
            init: vec![WeightExpr::int(0), WeightExpr::int(1), WeightExpr::int(0)],
            instructions: vec![
                ins(1, 2, Sign::Plus, WeightExpr::var("x")),
                ins(1, 2, Sign::Minus, WeightExpr::var("x")),
            ],
        };
        let r = polys(run_lbs(&cancel, EvalMode::Symbolic).unwrap());
        assert_eq!(r, vec![Poly::zero(), Poly::one(), Poly::zero()]);
    }

    #[test]
    fn register_errors() {
        let same = LbsProgram {
            init: vec![WeightExpr::one(); 3],
            instructions: vec![ins(2, 2, Sign::Plus, WeightExpr::one())],
        };
        assert!(matches!(
            run_lbs(&same, EvalMode::Symbolic),
            Err(Error::Register(_))
        ));
        let out = LbsProgram {
            init: vec![WeightExpr::one(); 3],
            instructions: vec![ins(4, 1, Sign::Plus, WeightExpr::one())],
        };
        assert!(matches!(
            run_lbs(&out, EvalMode::Symbolic),
            Err(Error::Register(_))
        ));
    }

    #[test]
    fn display_form() {
        let i = ins(1, 3, Sign::Minus, WeightExpr::var("y"));
        assert_eq!(i.to_string(), "R1 -= R3 * y");
    }
}
