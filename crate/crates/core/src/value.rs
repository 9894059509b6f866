//! Elements of finite carriers.
//!
//! A [`Value`] is an opaque atom, a tuple, or a finitely supported measure
//! (so that carriers of nested monad applications are ordinary finite sets).
//! Every value has a canonical text form, used as JSON map keys and parsed
//! back exactly by [`Value::parse`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finprob::{Distribution, SubDistribution};
use crate::polymeasure::Polymeasure;
use crate::rational::{parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Atom(String),
    Tuple(Vec<Value>),
    Dist(Arc<Distribution>),
    SubDist(Arc<SubDistribution>),
    Poly(Arc<Polymeasure>),
}

const RESERVED: &[char] = &[',', ':', '(', ')', '{', '}', '[', ']', '|'];

impl Value {
    pub fn atom(s: impl Into<String>) -> Value {
        Value::Atom(s.into())
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Tuple(vec![a, b])
    }

    pub fn unit() -> Value {
        Value::Tuple(Vec::new())
    }

    pub fn as_dist(&self) -> Option<&Distribution> {
        match self {
            Value::Dist(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_subdist(&self) -> Option<&SubDistribution> {
        match self {
            Value::SubDist(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_poly(&self) -> Option<&Polymeasure> {
        match self {
            Value::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Result<Value> {
        let mut p = Parser { src: s, pos: 0 };
        let v = p.value()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

/// `n` atoms `prefix0 .. prefix{n-1}`.
pub fn atoms(prefix: &str, n: usize) -> Vec<Value> {
    (0..n).map(|i| Value::atom(format!("{prefix}{i}"))).collect()
}

pub fn atoms_from(names: &[&str]) -> Vec<Value> {
    names.iter().map(|s| Value::atom(*s)).collect()
}

/// Left-nested product element: `[] -> ()`, `[x] -> x`, `[x,y,z] -> ((x,y),z)`.
pub fn lnest(parts: &[Value]) -> Value {
    match parts {
        [] => Value::unit(),
        [x] => x.clone(),
        [first, rest @ ..] => rest
            .iter()
            .fold(first.clone(), |acc, x| Value::pair(acc, x.clone())),
    }
}

/// Inverse of [`lnest`] for a known number of factors.
pub fn unnest(v: &Value, n: usize) -> Option<Vec<Value>> {
    match n {
        0 => match v {
            Value::Tuple(t) if t.is_empty() => Some(Vec::new()),
            _ => None,
        },
        1 => Some(vec![v.clone()]),
        _ => match v {
            Value::Tuple(t) if t.len() == 2 => {
                let mut head = unnest(&t[0], n - 1)?;
                head.push(t[1].clone());
                Some(head)
            }
            _ => None,
        },
    }
}

/// Cartesian product of carriers in lexicographic order, as left-nested values.
pub fn product_set(carriers: &[Vec<Value>]) -> Vec<Value> {
    index_tuples(&carriers.iter().map(|c| c.len()).collect::<Vec<_>>())
        .into_iter()
        .map(|ix| {
            let parts: Vec<Value> = ix.iter().enumerate().map(|(i, &j)| carriers[i][j].clone()).collect();
            lnest(&parts)
        })
        .collect()
}

/// All index tuples of a mixed-radix shape, last coordinate fastest.
pub fn index_tuples(shape: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = shape.iter().product();
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut cur = vec![0usize; shape.len()];
    loop {
        out.push(cur.clone());
        let mut i = shape.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < shape[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// Sorted, deduplicated copy of a carrier.
pub fn canonical_set(items: impl IntoIterator<Item = Value>) -> Vec<Value> {
    let mut v: Vec<Value> = items.into_iter().collect();
    v.sort();
    v.dedup();
    v
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl IntoIterator<Item = T>) -> fmt::Result {
    let mut first = true;
    for it in items {
        if !first {
            f.write_str(",")?;
        }
        first = false;
        write!(f, "{it}")?;
    }
    Ok(())
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(s) => f.write_str(s),
            Value::Tuple(t) => {
                f.write_str("(")?;
                write_list(f, t)?;
                f.write_str(")")
            }
            Value::Dist(d) => {
                f.write_str("D{")?;
                write_list(f, d.carrier())?;
                f.write_str("|")?;
                write_list(f, d.weights().iter().map(|(k, w)| format!("{k}:{w}")))?;
                f.write_str("}")
            }
            Value::SubDist(d) => {
                f.write_str("S{")?;
                write_list(f, d.carrier())?;
                f.write_str("|")?;
                write_list(f, d.weights().iter().map(|(k, w)| format!("{k}:{w}")))?;
                f.write_str("}")
            }
            Value::Poly(p) => {
                f.write_str("P{")?;
                let mut first = true;
                for c in p.carriers() {
                    if !first {
                        f.write_str(",")?;
                    }
                    first = false;
                    f.write_str("[")?;
                    write_list(f, c)?;
                    f.write_str("]")?;
                }
                f.write_str("|")?;
                let mut first = true;
                for (k, w) in p.density() {
                    if !first {
                        f.write_str(",")?;
                    }
                    first = false;
                    f.write_str("(")?;
                    write_list(f, k)?;
                    write!(f, "):{w}")?;
                }
                f.write_str("}")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::parse(format!("value {:?} at byte {}: {msg}", self.src, self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || RESERVED.contains(&c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn rational(&mut self) -> Result<Rational> {
        let t = self.token();
        parse_rational(t)
    }

    /// Comma separated items up to `close`; the opening delimiter is consumed.
    fn items<T>(&mut self, close: char, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn items_until_bar(&mut self) -> Result<Vec<Value>> {
        let mut out = Vec::new();
        if self.eat('|') {
            return Ok(out);
        }
        loop {
            out.push(self.value()?);
            if self.eat('|') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn value(&mut self) -> Result<Value> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                Ok(Value::Tuple(self.items(')', |p| p.value())?))
            }
            Some(_) => {
                let tok = self.token();
                if tok.is_empty() {
                    return Err(self.err("expected a value"));
                }
                if self.peek() == Some('{') && matches!(tok, "D" | "S" | "P") {
                    self.pos += 1;
                    return match tok {
                        "D" | "S" => {
                            let carrier = self.items_until_bar()?;
                            let entries = self.items('}', |p| {
                                let k = p.value()?;
                                p.expect(':')?;
                                let w = p.rational()?;
                                Ok((k, w))
                            })?;
                            if tok == "D" {
                                Distribution::new(carrier, entries).map(|d| Value::Dist(Arc::new(d)))
                            } else {
                                SubDistribution::new(carrier, entries).map(|d| Value::SubDist(Arc::new(d)))
                            }
                        }
                        _ => {
                            let mut carriers = Vec::new();
                            if !self.eat('|') {
                                loop {
                                    self.expect('[')?;
                                    carriers.push(self.items(']', |p| p.value())?);
                                    if self.eat('|') {
                                        break;
                                    }
                                    self.expect(',')?;
                                }
                            }
                            let entries = self.items('}', |p| {
                                p.expect('(')?;
                                let k = p.items(')', |q| q.value())?;
                                p.expect(':')?;
                                let w = p.rational()?;
                                Ok((k, w))
                            })?;
                            Polymeasure::from_density(carriers, entries).map(|p| Value::Poly(Arc::new(p)))
                        }
                    };
                }
                Ok(Value::Atom(tok.to_string()))
            }
            None => Err(self.err("unexpected end")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn nesting_round_trips() {
        let xs = atoms("x", 3);
        for n in 0..=3 {
            let v = lnest(&xs[..n]);
            assert_eq!(unnest(&v, n).unwrap(), xs[..n].to_vec());
        }
        assert_eq!(lnest(&xs).to_string(), "((x0,x1),x2)");
    }

    #[test]
    fn product_set_is_lexicographic() {
        let a = atoms("a", 2);
        let b = atoms("b", 2);
        let p = product_set(&[a, b]);
        let s: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        assert_eq!(s, vec!["(a0,b0)", "(a0,b1)", "(a1,b0)", "(a1,b1)"]);
        let mut sorted = p.clone();
        sorted.sort();
        assert_eq!(sorted, p);
        assert_eq!(product_set(&[]), vec![Value::unit()]);
    }

    #[test]
    fn text_form_round_trips() {
        let d = Distribution::new(
            atoms_from(&["a", "b"]),
            vec![(Value::atom("a"), ratio(1, 3)), (Value::atom("b"), ratio(2, 3))],
        )
        .unwrap();
        let dd = Distribution::new(vec![Value::Dist(Arc::new(d.clone()))], vec![(Value::Dist(Arc::new(d)), ratio(1, 1))]).unwrap();
        let v = Value::Tuple(vec![Value::atom("1/2"), Value::Dist(Arc::new(dd))]);
        let s = v.to_string();
        assert_eq!(Value::parse(&s).unwrap(), v);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Value::parse("(a,").is_err());
        assert!(Value::parse("D{a|a:1/0}").is_err());
        assert!(Value::parse("a b").is_err());
    }
}
