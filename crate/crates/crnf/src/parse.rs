//! Input parsing: series JSON or polynomial expressions over `z1..zn`,
//! `zb1..zbn`, `s`, complex literals and `+ - * ^ ( )`.
//!
//! `s` is the real variable `re w` and `i` the imaginary unit; conjugate
//! variables are separate tokens.

use std::path::Path;

use crate::cr_tensors::GenericSubmanifold;
use crate::error::{Error, Result};
use crate::hypersurface::Hypersurface;
use crate::series::{c64, Series, SeriesJson, Space, C64};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(C64),
    Z(usize),
    Zb(usize),
    S,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

/// Expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(C64),
    Z(usize),
    Zb(usize),
    S,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let (l0, c0) = (line, col);
        let single = |t| Spanned { tok: t, line: l0, col: c0 };
        match ch {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '+' => out.push(single(Tok::Plus)),
            '-' => out.push(single(Tok::Minus)),
            '*' => out.push(single(Tok::Star)),
            '^' => out.push(single(Tok::Caret)),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part
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
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text.parse().map_err(|_| err(l0, c0, format!("bad number '{text}'")))?;
                let imag = i < chars.len() && chars[i] == 'i' && !chars.get(i + 1).is_some_and(|c| c.is_alphanumeric());
                if imag {
                    i += 1;
                }
                col += i - start;
                out.push(single(Tok::Num(if imag { c64(0.0, v) } else { c64(v, 0.0) })));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = ident(&word).ok_or_else(|| err(l0, c0, format!("unknown identifier '{word}'")))?;
                col += i - start;
                out.push(single(tok));
                continue;
            }
            c => return Err(err(l0, c0, format!("unexpected character '{c}'"))),
        }
        i += 1;
        col += 1;
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

fn ident(w: &str) -> Option<Tok> {
    let index = |d: &str| d.parse::<usize>().ok().filter(|&k| k >= 1 && !d.starts_with('0')).map(|k| k - 1);
    match w {
        "i" => Some(Tok::Num(c64(0.0, 1.0))),
        "s" => Some(Tok::S),
        _ if w.starts_with("zb") => index(&w[2..]).map(Tok::Zb),
        _ if w.starts_with('z') => index(&w[1..]).map(Tok::Z),
        _ => None,
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.peek().tok == Tok::Star {
            self.next();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Minus => {
                self.next();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let t = self.next();
        match t.tok {
            Tok::Num(c) if c.im == 0.0 && c.re >= 0.0 && c.re.fract() == 0.0 && c.re <= 64.0 => {
                Ok(Expr::Pow(Box::new(base), c.re as u32))
            }
            _ => Err(err(t.line, t.col, "exponent must be a non-negative integer")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.next();
        match t.tok {
            Tok::Num(c) => Ok(Expr::Num(c)),
            Tok::Z(k) => Ok(Expr::Z(k)),
            Tok::Zb(k) => Ok(Expr::Zb(k)),
            Tok::S => Ok(Expr::S),
            Tok::LParen => {
                let e = self.expr()?;
                let close = self.next();
                if close.tok != Tok::RParen {
                    return Err(err(close.line, close.col, "expected ')'"));
                }
                Ok(e)
            }
            Tok::End => Err(err(t.line, t.col, "unexpected end of input")),
            other => Err(err(t.line, t.col, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses an expression into a tree.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(err(t.line, t.col, format!("unexpected token {:?}", t.tok)));
    }
    Ok(e)
}

impl Expr {
    /// Largest variable index plus one.
    pub fn n_vars(&self) -> usize {
        match self {
            Expr::Z(k) | Expr::Zb(k) => k + 1,
            Expr::Num(_) | Expr::S => 0,
            Expr::Neg(a) | Expr::Pow(a, _) => a.n_vars(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.n_vars().max(b.n_vars()),
        }
    }

    /// Evaluates in `Space::Mixed(n)` through weighted degree `trunc`.
    pub fn eval(&self, n: usize, trunc: i32) -> Result<Series> {
        let sp = Space::Mixed(n);
        let var = |i: usize| -> Result<Series> {
            if i >= 2 * n {
                return Err(Error::Input(format!("variable index exceeds n = {n}")));
            }
            Ok(Series::var(sp, trunc, i))
        };
        Ok(match self {
            Expr::Num(c) => Series::constant(sp, trunc, *c),
            Expr::Z(k) if *k < n => var(*k)?,
            Expr::Zb(k) if *k < n => var(n + k)?,
            Expr::Z(_) | Expr::Zb(_) => return Err(Error::Input(format!("variable index exceeds n = {n}"))),
            Expr::S => Series::var(sp, trunc, 2 * n),
            Expr::Neg(a) => a.eval(n, trunc)?.scale_re(-1.0),
            Expr::Add(a, b) => &a.eval(n, trunc)? + &b.eval(n, trunc)?,
            Expr::Sub(a, b) => &a.eval(n, trunc)? - &b.eval(n, trunc)?,
            Expr::Mul(a, b) => &a.eval(n, trunc)? * &b.eval(n, trunc)?,
            Expr::Pow(a, k) => a.eval(n, trunc)?.pow(*k),
        })
    }
}

/// Expression to a mixed series; `n` defaults to the largest index used.
pub fn parse_series(src: &str, n: Option<usize>, trunc: i32) -> Result<Series> {
    let e = parse_expr(src)?;
    let n = n.unwrap_or_else(|| e.n_vars().max(1));
    e.eval(n, trunc)
}

/// Parsed input.
#[derive(Clone, Debug)]
pub enum Input {
    Hyper(Hypersurface),
    Generic(GenericSubmanifold),
}

/// Reads a file or an inline text. JSON objects are series JSON of the
/// graph `phi`; JSON arrays are the defining functions of a generic
/// submanifold; anything else is an expression for `phi`.
pub fn parse_input(arg: &str, n: Option<usize>, trunc: i32) -> Result<Input> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| Error::Input(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    let t = text.trim_start();
    if t.starts_with('{') {
        let j: SeriesJson = serde_json::from_str(t).map_err(json_err)?;
        return Ok(Input::Hyper(Hypersurface::from_json(&j)?));
    }
    if t.starts_with('[') {
        let js: Vec<SeriesJson> = serde_json::from_str(t).map_err(json_err)?;
        let rho = js.iter().map(Series::from_json).collect::<Result<Vec<_>>>()?;
        return Ok(Input::Generic(GenericSubmanifold::new(rho)?));
    }
    Ok(Input::Hyper(Hypersurface::new(parse_series(&text, n, trunc)?)?))
}

/// Hypersurface input only.
pub fn parse_hypersurface(arg: &str, n: Option<usize>, trunc: i32) -> Result<Hypersurface> {
    match parse_input(arg, n, trunc)? {
        Input::Hyper(h) => Ok(h),
        Input::Generic(_) => Err(Error::Input("expected a hypersurface, got several defining functions".into())),
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), col: e.column(), msg: e.to_string() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_of_dangling_operator() {
        match parse_expr("z1*") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (1, 4)),
            other => panic!("{other:?}"),
        }
        match parse_expr("z1\n + )") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn literals() {
        let s = parse_series("2.5i*z1 - (1e-1 + i)*zb1^2", Some(1), 4).unwrap();
        assert_eq!(s.coeff_of(&[1, 0, 0]), c64(0.0, 2.5));
        assert_eq!(s.coeff_of(&[0, 2, 0]), c64(-0.1, -1.0));
    }

    #[test]
    fn model_from_text() {
        let h = parse_hypersurface("z1*zb1 + zb2*z2^2 + z2*zb2^2", None, 6).unwrap();
        let m = Hypersurface::semidef_model(crate::hypersurface::SemidefCase::III, &[0.0], 6);
        assert!(h.phi().dist(m.phi()) < 1e-15);
        assert!(matches!(parse_input("i*z1", None, 4), Err(Error::NonReal) | Err(Error::Input(_))));
    }
}
