//! A small OpenQASM 2.0 subset.
//!
//! Grammar (statements end with `;`, `//` starts a comment):
//!
//! ```text
//! program   := ["OPENQASM" REAL ";"] stmt*
//! stmt      := "include" STRING ";"            (only "qelib1.inc", ignored)
//!            | ("qreg" | "creg") ID "[" INT "]" ";"
//!            | ID ["(" expr ("," expr)* ")"] arg ("," arg)* ";"
//!            | "measure" arg "->" arg ";"
//!            | "barrier" [arg ("," arg)*] ";"
//!            | "reset" arg ";"
//! arg       := ID ["[" INT "]"]                 (a bare register broadcasts)
//! expr      := term (("+" | "-") term)*
//! term      := unary (("*" | "/") unary)*
//! unary     := "-" unary | "pi" | NUMBER | "(" expr ")"
//! ```
//!
//! Registers are flattened in declaration order. In QASM's own histogram
//! keys classical bit 0 is the rightmost character; this crate writes it
//! leftmost, and [`reverse_key`] converts between the two.

use super::{Circuit, Op};
use crate::error::{Error, Result};
use crate::gates::standard_gate;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(char),
    Arrow,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let st = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[st..i].iter().collect()), line, col });
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let st = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[st..i].iter().collect();
                let v = s.parse::<f64>().map_err(|_| err(line, col, format!("bad number '{s}'")))?;
                out.push(Token { tok: Tok::Num(v), line, col });
            } else if c == '"' {
                let st = i + 1;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i >= chars.len() {
                    return Err(err(line, col, "unterminated string"));
                }
                out.push(Token { tok: Tok::Str(chars[st..i].iter().collect()), line, col });
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push(Token { tok: Tok::Arrow, line, col });
                i += 2;
            } else if "[](),;+-*/".contains(c) {
                out.push(Token { tok: Tok::Sym(c), line, col });
                i += 1;
            } else {
                return Err(err(line, col, format!("unexpected character '{c}'")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    qregs: Vec<(String, usize)>,
    cregs: Vec<(String, usize)>,
}

enum Arg {
    One(usize),
    All(Vec<usize>),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn next(&mut self) -> Result<Token> {
        let t = self.peek().cloned().ok_or_else(|| err(self.end.0, self.end.1, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        let t = self.next()?;
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(err(t.line, t.col, format!("expected '{c}'")))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().is_some_and(|t| t.tok == Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize)> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.line, t.col)),
            _ => Err(err(t.line, t.col, "expected identifier")),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        let t = self.next()?;
        match t.tok {
            Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 => Ok(v as usize),
            _ => Err(err(t.line, t.col, "expected non-negative integer")),
        }
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym('*') {
                v *= self.unary()?;
            } else if self.eat_sym('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        let t = self.next()?;
        match t.tok {
            Tok::Num(v) => Ok(v),
            Tok::Ident(ref s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            _ => Err(err(t.line, t.col, "expected expression")),
        }
    }

    fn lookup(regs: &[(String, usize)], name: &str) -> Option<(usize, usize)> {
        let mut off = 0;
        for (n, sz) in regs {
            if n == name {
                return Some((off, *sz));
            }
            off += sz;
        }
        None
    }

    fn arg(&mut self, quantum: bool) -> Result<Arg> {
        let (name, line, col) = self.ident()?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let (off, size) = Self::lookup(regs, &name).ok_or_else(|| {
            err(line, col, format!("undeclared {} register '{name}'", if quantum { "quantum" } else { "classical" }))
        })?;
        if self.eat_sym('[') {
            let (l2, c2) = self.here();
            let idx = self.integer()?;
            self.expect_sym(']')?;
            if idx >= size {
                return Err(err(l2, c2, format!("index {idx} out of range for register '{name}' of size {size}")));
            }
            Ok(Arg::One(off + idx))
        } else {
            Ok(Arg::All((off..off + size).collect()))
        }
    }

    fn arg_list(&mut self, quantum: bool) -> Result<Vec<Arg>> {
        let mut v = vec![self.arg(quantum)?];
        while self.eat_sym(',') {
            v.push(self.arg(quantum)?);
        }
        Ok(v)
    }
}

/// Expands register arguments: bare registers broadcast element-wise and
/// must agree in size.
fn broadcast(args: &[Arg], line: usize, col: usize) -> Result<Vec<Vec<usize>>> {
    let mut width = None;
    for a in args {
        if let Arg::All(v) = a {
            match width {
                None => width = Some(v.len()),
                Some(w) if w != v.len() => return Err(err(line, col, "register arguments differ in size")),
                _ => {}
            }
        }
    }
    let w = width.unwrap_or(1);
    Ok((0..w)
        .map(|k| {
            args.iter()
                .map(|a| match a {
                    Arg::One(q) => *q,
                    Arg::All(v) => v[k],
                })
                .collect()
        })
        .collect())
}

/// Parses the documented subset into a [`Circuit`].
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let toks = lex(text)?;
    let nlines = text.lines().count().max(1);
    let mut p = Parser { toks, pos: 0, end: (nlines, 1), qregs: Vec::new(), cregs: Vec::new() };
    // Registers are appended in declaration order, so flat indices resolved
    // while parsing stay valid once every register is known.
    let mut ops: Vec<Op> = Vec::new();
    while let Some(t) = p.peek().cloned() {
        let (kw, line, col) = match &t.tok {
            Tok::Ident(s) => (s.clone(), t.line, t.col),
            _ => return Err(err(t.line, t.col, "expected statement")),
        };
        p.pos += 1;
        match kw.as_str() {
            "OPENQASM" => {
                let v = p.next()?;
                if !matches!(v.tok, Tok::Num(_)) {
                    return Err(err(v.line, v.col, "expected version number"));
                }
                p.expect_sym(';')?;
            }
            "include" => {
                let f = p.next()?;
                match f.tok {
                    Tok::Str(ref s) if s == "qelib1.inc" => {}
                    _ => return Err(err(f.line, f.col, "only the standard gate library include is supported")),
                }
                p.expect_sym(';')?;
            }
            "qreg" | "creg" => {
                let (name, l, c) = p.ident()?;
                p.expect_sym('[')?;
                let size = p.integer()?;
                p.expect_sym(']')?;
                p.expect_sym(';')?;
                if Parser::lookup(&p.qregs, &name).is_some() || Parser::lookup(&p.cregs, &name).is_some() {
                    return Err(err(l, c, format!("register '{name}' declared twice")));
                }
                if size == 0 {
                    return Err(err(l, c, "register size must be positive"));
                }
                if kw == "qreg" {
                    p.qregs.push((name, size));
                } else {
                    p.cregs.push((name, size));
                }
            }
            "measure" => {
                let q = p.arg(true)?;
                let a = p.next()?;
                if a.tok != Tok::Arrow {
                    return Err(err(a.line, a.col, "expected '->'"));
                }
                let c = p.arg(false)?;
                p.expect_sym(';')?;
                match (q, c) {
                    (Arg::One(q), Arg::One(c)) => ops.push(Op::Measure { qubit: q, clbit: c }),
                    (Arg::All(qs), Arg::All(cs)) if qs.len() == cs.len() => {
                        for (q, c) in qs.into_iter().zip(cs) {
                            ops.push(Op::Measure { qubit: q, clbit: c });
                        }
                    }
                    _ => return Err(err(line, col, "measure arguments must both be bits or equal-size registers")),
                }
            }
            "barrier" => {
                let mut qs = Vec::new();
                if !p.eat_sym(';') {
                    for a in p.arg_list(true)? {
                        match a {
                            Arg::One(q) => qs.push(q),
                            Arg::All(v) => qs.extend(v),
                        }
                    }
                    p.expect_sym(';')?;
                }
                ops.push(Op::Barrier(qs));
            }
            "reset" => {
                let a = p.arg(true)?;
                p.expect_sym(';')?;
                match a {
                    Arg::One(q) => ops.push(Op::Reset(q)),
                    Arg::All(v) => ops.extend(v.into_iter().map(Op::Reset)),
                }
            }
            "gate" | "opaque" | "if" => {
                return Err(err(line, col, format!("'{kw}' is outside the supported subset")));
            }
            name => {
                let mut params = Vec::new();
                if p.eat_sym('(')
                    && !p.eat_sym(')') {
                        params.push(p.expr()?);
                        while p.eat_sym(',') {
                            params.push(p.expr()?);
                        }
                        p.expect_sym(')')?;
                    }
                let gate = standard_gate(name, &params).map_err(|e| err(line, col, e.to_string()))?;
                let args = p.arg_list(true)?;
                p.expect_sym(';')?;
                for targets in broadcast(&args, line, col)? {
                    let app = crate::gates::GateApplication::new(gate.clone(), targets)
                        .map_err(|e| err(line, col, e.to_string()))?;
                    ops.push(Op::Gate(app));
                }
            }
        }
    }
    let mut c = Circuit::with_registers(p.qregs, p.cregs);
    for op in ops {
        match op {
            Op::Barrier(qs) if qs.is_empty() => {
                c.barrier(&[]);
            }
            other => c.push_op(other),
        }
    }
    Ok(c)
}

fn locate(regs: &[(String, usize)], mut idx: usize) -> String {
    for (name, size) in regs {
        if idx < *size {
            return format!("{name}[{idx}]");
        }
        idx -= size;
    }
    format!("?[{idx}]")
}

/// Writes a circuit in the QASM subset. Parameters are printed with full
/// round-trip precision. Gates that are not in the standard set (for example
/// oracle or matrix gates) cannot be expressed and are an error.
pub fn emit_qasm(c: &Circuit) -> Result<String> {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    for (n, k) in c.qregs() {
        writeln!(s, "qreg {n}[{k}];").unwrap();
    }
    for (n, k) in c.cregs() {
        writeln!(s, "creg {n}[{k}];").unwrap();
    }
    let q = |i: usize| locate(c.qregs(), i);
    for op in c.ops() {
        match op {
            Op::Gate(app) => {
                let g = &app.gate;
                let std = standard_gate(g.name(), g.params()).ok();
                let same = std.as_ref().is_some_and(|sg| {
                    sg.arity() == g.arity() && sg.data().iter().zip(g.data()).all(|(a, b)| (a - b).norm() < 1e-12)
                });
                if !same {
                    return Err(Error::Invalid(format!("gate '{}' has no QASM subset equivalent", g.name())));
                }
                s.push_str(g.name());
                if !g.params().is_empty() {
                    let ps: Vec<String> = g.params().iter().map(|p| format!("{p:?}")).collect();
                    write!(s, "({})", ps.join(",")).unwrap();
                }
                let ts: Vec<String> = app.targets.iter().map(|&t| q(t)).collect();
                writeln!(s, " {};", ts.join(",")).unwrap();
            }
            Op::Measure { qubit, clbit } => {
                writeln!(s, "measure {} -> {};", q(*qubit), locate(c.cregs(), *clbit)).unwrap();
            }
            Op::Barrier(qs) => {
                let ts: Vec<String> = qs.iter().map(|&t| q(t)).collect();
                writeln!(s, "barrier {};", ts.join(",")).unwrap();
            }
            Op::Reset(r) => {
                writeln!(s, "reset {};", q(*r)).unwrap();
            }
        }
    }
    Ok(s)
}

/// Reverses a bit-string key (clbit 0 leftmost ⇄ clbit 0 rightmost).
pub fn reverse_key(key: &str) -> String {
    key.chars().rev().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::param;

    #[test]
    fn bell_from_text() {
        let c = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];").unwrap();
        let mut bell = Circuit::new(2, 0);
        bell.h(0).cx(0, 1);
        assert_eq!(c, bell);
    }

    #[test]
    fn bell_round_trip() {
        let mut bell = Circuit::new(2, 2);
        bell.h(0).cx(0, 1).measure_all().unwrap();
        let text = emit_qasm(&bell).unwrap();
        assert_eq!(parse_qasm(&text).unwrap(), bell);
    }

    #[test]
    fn u3_params() {
        let c = parse_qasm("qreg q[1];\nu3(1.5707,0,3.14159) q[0];").unwrap();
        match &c.ops()[0] {
            Op::Gate(app) => {
                assert_eq!(app.gate, param("u3", &[1.5707, 0.0, 3.14159]));
            }
            _ => panic!("expected a gate"),
        }
    }

    #[test]
    fn expressions_and_broadcast() {
        let c = parse_qasm(
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg a[2];\nqreg b[1];\ncreg c[3];\n\
             rz(-pi/4 + 2*(pi - pi)) a[1]; // comment\nh a;\nmeasure a -> c[0];",
        );
        assert!(c.is_err(), "register to single bit must fail");
        let c = parse_qasm("qreg a[2];\nqreg b[1];\ncreg c[2];\nrz(-pi/4+2*(pi-pi)) a[1];\nh a;\nx b[0];\nmeasure a -> c;").unwrap();
        assert_eq!(c.n_qubits(), 3);
        assert_eq!(c.gate_count(), 4);
        match &c.ops()[0] {
            Op::Gate(app) => assert!((app.gate.params()[0] + std::f64::consts::FRAC_PI_4).abs() < 1e-15),
            _ => panic!(),
        }
        match &c.ops()[3] {
            Op::Gate(app) => assert_eq!(app.targets, vec![2]),
            _ => panic!(),
        }
        assert_eq!(c.measurements(), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_qasm("qreg q[2];\nh q[5];") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 5)),
            other => panic!("{other:?}"),
        }
        match parse_qasm("qreg q[1];\n  foo q[0];") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_qasm("qreg q[1]\nh q[0];"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_qasm("include \"other.inc\";").is_err());
        assert!(parse_qasm("qreg q[1]; gate foo a { h a; }").is_err());
        assert!(parse_qasm("qreg q[1]; h r[0];").is_err());
        assert!(parse_qasm("qreg q[1]; u3(1,2) q[0];").is_err());
    }

    #[test]
    fn custom_gate_cannot_be_emitted() {
        let mut c = Circuit::new(1, 0);
        c.push_gate(crate::gates::named("h").renamed("mine"), &[0]).unwrap();
        assert!(emit_qasm(&c).is_err());
    }

    #[test]
    fn key_reversal() {
        assert_eq!(reverse_key("001"), "100");
    }
}
