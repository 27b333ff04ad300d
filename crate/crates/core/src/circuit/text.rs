use std::collections::HashMap;
use std::fmt::Write;

use super::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::poly::{is_identifier, parse_rational, WeightExpr};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        what: "circuit",
        line,
        msg: msg.into(),
    }
}

/// Parses the line-oriented circuit format. `#` starts a comment.
pub fn parse_circuit(src: &str) -> Result<Circuit> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut gates = Vec::new();
    let mut layer_lines: Vec<(usize, String, usize)> = Vec::new();
    let mut output: Option<(usize, String)> = None;

    for (n, raw) in src.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["output", g] => {
                if output.is_some() {
                    return Err(err(line_no, "duplicate output directive"));
                }
                output = Some((line_no, g.to_string()));
            }
            ["layer", g, l] => {
                let l: usize = l
                    .parse()
                    .map_err(|_| err(line_no, format!("bad layer number `{l}`")))?;
                layer_lines.push((line_no, g.to_string(), l));
            }
            [name, "=", rest @ ..] => {
                if !is_gate_name(name) {
                    return Err(err(line_no, format!("bad gate name `{name}`")));
                }
                if index.contains_key(*name) {
                    return Err(err(line_no, format!("gate `{name}` defined twice")));
                }
                let operand = |tok: &str| {
                    index.get(tok).copied().ok_or_else(|| {
                        err(line_no, format!("operand `{tok}` is not defined above"))
                    })
                };
                let gate = match rest {
                    ["var", x] if is_identifier(x) => Gate::Input(WeightExpr::var(x)),
                    ["const", c] => Gate::Input(WeightExpr::Const(
                        parse_rational(c)
                            .ok_or_else(|| err(line_no, format!("bad constant `{c}`")))?,
                    )),
                    ["add", a, b] => Gate::Add(operand(a)?, operand(b)?),
                    ["mul", a, b] => Gate::Mul(operand(a)?, operand(b)?),
                    _ => {
                        return Err(err(
                            line_no,
                            format!("unrecognised gate `{}`", rest.join(" ")),
                        ))
                    }
                };
                index.insert(name.to_string(), gates.len());
                gates.push(gate);
            }
            _ => return Err(err(line_no, format!("unknown directive `{line}`"))),
        }
    }

    let (out_line, out_name) = output.ok_or_else(|| err(0, "missing output directive"))?;
    let out = *index
        .get(&out_name)
        .ok_or_else(|| err(out_line, format!("output `{out_name}` is not defined")))?;
    let layers = if layer_lines.is_empty() {
        None
    } else {
        let mut layers = vec![0usize; gates.len()];
        for (line_no, g, l) in layer_lines {
            let id = *index
                .get(&g)
                .ok_or_else(|| err(line_no, format!("layer for undefined gate `{g}`")))?;
            layers[id] = l;
        }
        if let Some(missing) = layers.iter().position(|&l| l == 0) {
            return Err(Error::Layering {
                gate: missing,
                reason: "no layer assigned".into(),
            });
        }
        Some(layers)
    };
    Circuit::new(gates, out, layers)
}

fn is_gate_name(s: &str) -> bool {
    s.len() > 1 && s.starts_with('g') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

pub fn write_circuit(c: &Circuit) -> String {
    let mut s = String::new();
    for (g, gate) in c.gates().iter().enumerate() {
        let _ = match gate {
            Gate::Input(WeightExpr::Var(x)) => writeln!(s, "g{g} = var {x}"),
            Gate::Input(WeightExpr::Const(k)) => writeln!(s, "g{g} = const {k}"),
            Gate::Add(a, b) => writeln!(s, "g{g} = add g{a} g{b}"),
            Gate::Mul(a, b) => writeln!(s, "g{g} = mul g{a} g{b}"),
        };
    }
    if let Some(layers) = c.layers() {
        for (g, l) in layers.iter().enumerate() {
            let _ = writeln!(s, "layer g{g} {l}");
        }
    }
    let _ = writeln!(s, "output g{}", c.output());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{classify_circuit, eval_symbolic};
    use crate::poly::Poly;

    const XY_Z: &str = "\
# (x + y) * z
g0 = var x
g1 = var y
g2 = add g0 g1
g3 = var z
g4 = mul g2 g3
layer g0 3
layer g1 3
layer g2 2
layer g3 2
layer g4 1
output g4
";

    #[test]
    fn parses_and_roundtrips() {
        let c = parse_circuit(XY_Z).unwrap();
        assert_eq!(classify_circuit(&c).width, Some(2));
        let expected = &(&Poly::var("x") * &Poly::var("z")) + &(&Poly::var("y") * &Poly::var("z"));
        assert_eq!(eval_symbolic(&c), expected);
        assert_eq!(parse_circuit(&write_circuit(&c)).unwrap(), c);
    }

    #[test]
    fn constants_parse() {
        let c = parse_circuit("g0 = const -3/4\noutput g0\n").unwrap();
        assert_eq!(write_circuit(&c), "g0 = const -3/4\noutput g0\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_circuit("g0 = var x\ng1 = frob g0\noutput g1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_circuit("g0 = var x\nwibble\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_circuit("g1 = add g0 g0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        assert!(parse_circuit("g0 = var x\n").is_err());
        assert!(parse_circuit("g0 = var x\ng1 = var y\nlayer g0 1\noutput g0\n").is_err());
    }
}
