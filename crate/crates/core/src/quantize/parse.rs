//! Parser for element expressions such as `2*w1 w2^3 - i*0.5*w1 + 1`.
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := factor (['*'] factor)*
//! factor := '-' factor | number | 'i' | generator ['^' integer] | '(' expr ')'
//! ```
//!
//! Generators are the parent's letter followed by a 1-based index. Adjacent
//! factors multiply, so `w1 w2` and `w1*w2` are the same word.

use std::sync::Arc;

use num_complex::Complex64;

use super::{AlgebraElement, Parent, QuantizeError};

pub fn parse_element(parent: &Arc<Parent>, source: &str) -> Result<AlgebraElement, QuantizeError> {
    let mut p = Parser { parent, src: source.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected character"));
    }
    Ok(e)
}

struct Parser<'a> {
    parent: &'a Arc<Parent>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> QuantizeError {
        QuantizeError::Parse { position: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<AlgebraElement, QuantizeError> {
        let mut sign = 1.0;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                self.pos += 1;
                sign = -1.0;
            }
            _ => {}
        }
        let mut acc = self.term()?.scale(Complex64::new(sign, 0.0));
        loop {
            let sign = match self.peek() {
                Some(b'+') => 1.0,
                Some(b'-') => -1.0,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let t = self.term()?.scale(Complex64::new(sign, 0.0));
            acc = acc.add(&t)?;
        }
    }

    fn starts_factor(&mut self) -> bool {
        match self.peek() {
            Some(c) => c == b'(' || c == b'.' || c == b'i' || c.is_ascii_digit() || c == self.parent.letter() as u8,
            None => false,
        }
    }

    fn term(&mut self) -> Result<AlgebraElement, QuantizeError> {
        let mut acc = self.factor()?;
        loop {
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else if !self.starts_factor() {
                return Ok(acc);
            }
            let f = self.factor()?;
            acc = acc.multiply(&f)?;
        }
    }

    fn factor(&mut self) -> Result<AlgebraElement, QuantizeError> {
        let letter = self.parent.letter() as u8;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.scale(Complex64::new(-1.0, 0.0)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(AlgebraElement::scalar(self.parent, Complex64::new(0.0, 1.0)))
            }
            Some(c) if c == letter => {
                let start = self.pos;
                self.pos += 1;
                let index = self.integer().ok_or_else(|| self.error("expected generator index"))?;
                if index == 0 {
                    self.pos = start;
                    return Err(self.error("generator indices start at 1"));
                }
                let mut power = 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    power = self.integer().ok_or_else(|| self.error("expected exponent"))?;
                }
                let word = vec![index - 1; power];
                AlgebraElement::normal_form(self.parent, &word, Complex64::new(1.0, 0.0)).map_err(|e| match e {
                    QuantizeError::IndexOutOfRange { .. } => QuantizeError::Parse {
                        position: start,
                        message: format!("no generator {}{index} in rank {}", letter as char, self.parent.rank()),
                    },
                    other => other,
                })
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let x = self.number()?;
                Ok(AlgebraElement::scalar(self.parent, Complex64::new(x, 0.0)))
            }
            Some(_) => Err(self.error("expected a number, 'i', a generator or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Option<usize> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn number(&mut self) -> Result<f64, QuantizeError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let before = self.pos;
            digits(self);
            if self.pos == before {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().map_err(|_| QuantizeError::Parse { position: start, message: format!("bad number '{text}'") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantize::PoissonSpace;

    fn ccr() -> Arc<Parent> {
        Arc::new(Parent::Ccr(PoissonSpace::from_matrix(&[vec![0.0, 1.0], vec![-1.0, 0.0]], 0.0).unwrap()))
    }

    #[test]
    fn parses_words_and_coefficients() {
        let p = ccr();
        let a = parse_element(&p, "w2 w1").unwrap();
        assert_eq!(a.to_string(), "i*-1 * 1 + 1 * w1 w2");
        let b = parse_element(&p, "2*w1^2 - i*0.5 + (1+i) * w2").unwrap();
        assert_eq!(b.to_string(), "i*-0.5 * 1 + (1+i*1) * w2 + 2 * w1^2");
    }

    #[test]
    fn rendering_roundtrips() {
        let p = ccr();
        let a = parse_element(&p, "w2^2 w1 - 3.25*i*w1 + (0.5 - i*2)").unwrap();
        assert_eq!(parse_element(&p, &a.to_string()).unwrap(), a);
    }

    #[test]
    fn reports_positions() {
        let p = ccr();
        assert_eq!(
            parse_element(&p, "w1 + w3"),
            Err(QuantizeError::Parse { position: 5, message: "no generator w3 in rank 2".into() })
        );
        assert!(matches!(parse_element(&p, "w1 + v1"), Err(QuantizeError::Parse { position: 5, .. })));
        assert!(matches!(parse_element(&p, "(w1"), Err(QuantizeError::Parse { position: 3, .. })));
        assert!(matches!(parse_element(&p, "w0"), Err(QuantizeError::Parse { position: 0, .. })));
    }
}
