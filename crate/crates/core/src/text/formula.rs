//! Parser for the concrete formula syntax.
//!
//! ```text
//! phi   ::= atom ('&' atom)*
//! atom  ::= 'T' | '(' phi ')' | '<' label '>' body
//! body  ::= '[' bound phi (',' bound phi)* ']'     -- multi-constraint, bound ∈ {>q, <q}
//!         | munary
//! psi   ::= munary ('\/' munary)*
//! munary::= '!' munary | '(' psi ')' | '[' phi ']' ('>=' | '>' | '<' | '<=') q
//! ```

use crate::error::{Error, Result};
use crate::logic::{Cmp, Constraint, MeasureFormula, StateFormula};
use crate::rational::{in_unit_interval, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Amp,
    Lt,
    Gt,
    Le,
    Ge,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    Bang,
    Or,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::Amp => "`&`".into(),
        Tok::Lt => "`<`".into(),
        Tok::Gt => "`>`".into(),
        Tok::Le => "`<=`".into(),
        Tok::Ge => "`>=`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Or => "`\\/`".into(),
        Tok::End => "end of input".into(),
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '.' | '/')
}

/// Tokens with their 1-based column.
fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match c {
            '&' => (Tok::Amp, 1),
            '<' if next == Some('=') => (Tok::Le, 2),
            '>' if next == Some('=') => (Tok::Ge, 2),
            '<' => (Tok::Lt, 1),
            '>' => (Tok::Gt, 1),
            '[' => (Tok::LBrack, 1),
            ']' => (Tok::RBrack, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '!' => (Tok::Bang, 1),
            '\\' if next == Some('/') => (Tok::Or, 2),
            c if is_word_char(c) => {
                let start = i;
                let mut j = i;
                while j < chars.len() && is_word_char(chars[j]) {
                    j += 1;
                }
                (Tok::Word(chars[start..j].iter().collect()), j - start)
            }
            other => {
                return Err(Error::Parse {
                    line: 1,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((tok, col));
        i += width;
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: self.line,
            column: self.toks[self.pos].1,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!(
                "expected {}, found {}",
                describe(&tok),
                describe(self.peek())
            ))
        }
    }

    fn threshold(&mut self) -> Result<Rational> {
        match self.peek().clone() {
            Tok::Word(w) => match parse_rational(&w) {
                Some(q) if in_unit_interval(&q) => {
                    self.bump();
                    Ok(q)
                }
                Some(_) => self.error(format!("threshold {w} outside [0,1]")),
                None => self.error(format!("expected a rational threshold, found `{w}`")),
            },
            other => self.error(format!(
                "expected a rational threshold, found {}",
                describe(&other)
            )),
        }
    }

    fn state(&mut self) -> Result<StateFormula> {
        let mut phi = self.state_atom()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.state_atom()?;
            phi = StateFormula::and(phi, rhs);
        }
        Ok(phi)
    }

    fn state_atom(&mut self) -> Result<StateFormula> {
        match self.peek().clone() {
            Tok::Word(w) if w == "T" => {
                self.bump();
                Ok(StateFormula::Top)
            }
            Tok::LParen => {
                self.bump();
                let phi = self.state()?;
                self.expect(Tok::RParen)?;
                Ok(phi)
            }
            Tok::Lt => {
                self.bump();
                let label = match self.bump() {
                    Tok::Word(w) => w,
                    other => {
                        self.pos -= 1;
                        return self.error(format!("expected a label, found {}", describe(&other)));
                    }
                };
                self.expect(Tok::Gt)?;
                if self.at_multi() {
                    self.multi(label)
                } else {
                    Ok(StateFormula::diamond(label, self.measure_unary()?))
                }
            }
            other => self.error(format!(
                "expected a state formula, found {}",
                describe(&other)
            )),
        }
    }

    /// After `<a>`: a `[` opening a bound list rather than `[phi]`.
    fn at_multi(&self) -> bool {
        if *self.peek() != Tok::LBrack {
            return false;
        }
        match self.peek_at(1) {
            Tok::Gt => true,
            Tok::Lt => *self.peek_at(3) != Tok::Gt,
            _ => false,
        }
    }

    fn multi(&mut self, label: String) -> Result<StateFormula> {
        self.expect(Tok::LBrack)?;
        let mut constraints = Vec::new();
        loop {
            let cmp = match self.bump() {
                Tok::Gt => Cmp::Greater,
                Tok::Lt => Cmp::Less,
                other => {
                    self.pos -= 1;
                    return self.error(format!("expected `>` or `<`, found {}", describe(&other)));
                }
            };
            let threshold = self.threshold()?;
            let formula = self.state()?;
            constraints.push(Constraint {
                cmp,
                threshold,
                formula,
            });
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrack => {
                    self.bump();
                    break;
                }
                other => {
                    return self.error(format!("expected `,` or `]`, found {}", describe(other)))
                }
            }
        }
        StateFormula::multi(label, constraints)
    }

    fn measure(&mut self) -> Result<MeasureFormula> {
        let first = self.measure_unary()?;
        if *self.peek() != Tok::Or {
            return Ok(first);
        }
        let mut parts = vec![first];
        while *self.peek() == Tok::Or {
            self.bump();
            parts.push(self.measure_unary()?);
        }
        Ok(MeasureFormula::Or(parts))
    }

    fn measure_unary(&mut self) -> Result<MeasureFormula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(MeasureFormula::not(self.measure_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let psi = self.measure()?;
                self.expect(Tok::RParen)?;
                Ok(psi)
            }
            Tok::LBrack => {
                self.bump();
                let phi = Box::new(self.state()?);
                self.expect(Tok::RBrack)?;
                let op = self.bump();
                let q = self.threshold()?;
                match op {
                    Tok::Ge => Ok(MeasureFormula::AtLeast(phi, q)),
                    Tok::Gt => Ok(MeasureFormula::Greater(phi, q)),
                    Tok::Lt => Ok(MeasureFormula::Less(phi, q)),
                    Tok::Le => Ok(MeasureFormula::AtMost(phi, q)),
                    other => self.error(format!(
                        "expected a bound after `]`, found {}",
                        describe(&other)
                    )),
                }
            }
            other => self.error(format!(
                "expected a measure formula, found {}",
                describe(&other)
            )),
        }
    }
}

fn run<T>(text: &str, f: impl FnOnce(&mut Parser) -> Result<T>) -> Result<T> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        line: 1,
    };
    let out = f(&mut p)?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {} after formula", describe(p.peek())));
    }
    Ok(out)
}

/// Parses a state formula.
pub fn parse_formula(text: &str) -> Result<StateFormula> {
    run(text, Parser::state)
}

/// Parses a measure formula.
pub fn parse_measure_formula(text: &str) -> Result<MeasureFormula> {
    run(text, Parser::measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn parses_the_grammar() {
        assert_eq!(parse_formula("T").unwrap(), StateFormula::Top);
        let phi = parse_formula("<b>[T]>=1").unwrap();
        assert_eq!(
            phi,
            StateFormula::diamond("b", MeasureFormula::at_least(StateFormula::Top, int(1)))
        );
        let multi = parse_formula("<a>[ >1/4 <b>[T]>=1 , <3/4 <b>[T]>=1 ]").unwrap();
        assert_eq!(multi.constraint_count(), Some(2));
        match &multi {
            StateFormula::DiamondMulti(a, cs) => {
                assert_eq!(a, "a");
                assert_eq!(cs[0].cmp, Cmp::Greater);
                assert_eq!(cs[0].threshold, ratio(1, 4));
                assert_eq!(cs[1].formula, phi);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn conjunction_is_left_associative() {
        let f = parse_formula("T & T & (T & T)").unwrap();
        let tt = StateFormula::and(StateFormula::Top, StateFormula::Top);
        assert_eq!(f, StateFormula::and(tt.clone(), tt));
    }

    #[test]
    fn measure_level_operators() {
        let psi = parse_measure_formula("![T]>1/2 \\/ [T]<1/2 \\/ ([T]<=1)").unwrap();
        match psi {
            MeasureFormula::Or(ps) => {
                assert_eq!(ps.len(), 3);
                assert!(matches!(ps[0], MeasureFormula::Not(_)));
                assert!(matches!(ps[1], MeasureFormula::Less(..)));
                assert!(matches!(ps[2], MeasureFormula::AtMost(..)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diamond_inside_bound_is_not_a_multi() {
        let f = parse_formula("<a>[<b>[T]>=1]>=1/2").unwrap();
        assert!(matches!(f, StateFormula::Diamond(..)));
        let g = parse_formula("<a>[ <1/2 <b>[T]>=1 ]").unwrap();
        assert!(matches!(g, StateFormula::DiamondMulti(..)));
    }

    #[test]
    fn errors_carry_columns() {
        match parse_formula("T & ").unwrap_err() {
            Error::Parse { column, .. } => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("<a>[T]>=3/2").is_err());
        assert!(parse_formula("<a>[T]").is_err());
        assert!(parse_formula("T T").is_err());
        assert!(parse_formula("<a>[ ]").is_err());
        assert!(parse_formula("T $").is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "T",
            "<a>[ >1/4 <b>[ >0 T ] , <3/4 <b>[ >0 T ] ]",
            "<a> ([T]>=1/2 \\/ ![<b> [T]>=1]<1/3) & T",
            "T & (T & <c> [T]<=0)",
            "<a> !!([T]>1 \\/ [T]>=0)",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{text}");
        }
    }
}
