//! Parser for distribution literals:
//!
//! ```text
//! dist    := bern(p) | gauss(mu, sigma) | pois(lambda)
//!          | disc(x:p, x:p, ...) | mix(w*dist + w*dist + ...)
//! ```
//!
//! Names are case-insensitive and whitespace is ignored between tokens.

use super::Distribution;
use crate::error::{Error, Result};

pub(super) fn parse(input: &str) -> Result<Distribution> {
    let mut parser = Parser { input, pos: 0 };
    let d = parser.distribution()?;
    parser.skip_ws();
    if parser.pos != input.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(d)
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, reason: &str) -> Error {
        Error::Parse {
            literal: self.input.to_string(),
            reason: format!("{reason} at offset {}", self.pos),
        }
    }

    fn rest(&self) -> &str {
        &self.input[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.input.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a distribution name"));
        }
        let name = self.rest()[..len].to_ascii_lowercase();
        self.pos += len;
        Ok(name)
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let bytes = self.rest().as_bytes();
        let mut end = 0;
        while end < bytes.len() {
            let b = bytes[end];
            let sign_ok = (b == b'+' || b == b'-')
                && (end == 0 || matches!(bytes[end - 1], b'e' | b'E'));
            if b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || sign_ok {
                end += 1;
            } else {
                break;
            }
        }
        let text = &self.rest()[..end];
        let value = text
            .parse::<f64>()
            .map_err(|_| self.error(&format!("expected a number, found `{text}`")))?;
        self.pos += end;
        Ok(value)
    }

    fn distribution(&mut self) -> Result<Distribution> {
        let start = self.pos;
        let name = self.ident()?;
        self.expect('(')?;
        let d = match name.as_str() {
            "bern" => Distribution::bernoulli(self.number()?),
            "gauss" => {
                let mean = self.number()?;
                self.expect(',')?;
                Distribution::gaussian(mean, self.number()?)
            }
            "pois" => Distribution::poisson(self.number()?),
            "disc" => {
                let (mut atoms, mut probs) = (Vec::new(), Vec::new());
                loop {
                    atoms.push(self.number()?);
                    self.expect(':')?;
                    probs.push(self.number()?);
                    if self.peek() != Some(',') {
                        break;
                    }
                    self.expect(',')?;
                }
                Distribution::finite_discrete(atoms, probs)
            }
            "mix" => {
                let (mut weights, mut components) = (Vec::new(), Vec::new());
                loop {
                    weights.push(self.number()?);
                    self.expect('*')?;
                    components.push(self.distribution()?);
                    if self.peek() != Some('+') {
                        break;
                    }
                    self.expect('+')?;
                }
                Distribution::mixture(weights, components)
            }
            other => {
                self.pos = start;
                return Err(self.error(&format!("unknown distribution `{other}`")));
            }
        }?;
        self.expect(')')?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Family;

    #[test]
    fn parses_each_family() {
        assert_eq!(parse("bern(0.25)").unwrap(), Distribution::bernoulli(0.25).unwrap());
        assert_eq!(parse(" GAUSS( 0 , 1 ) ").unwrap(), Distribution::gaussian(0.0, 1.0).unwrap());
        assert_eq!(parse("Pois(5000)").unwrap(), Distribution::poisson(5000.0).unwrap());
        let d = parse("disc(0:0.5, 1:0.4, 2:0.1)").unwrap();
        assert_eq!(d.family(), Family::FiniteDiscrete);
        let m = parse("mix(0.995*gauss(0,1) + 0.005*gauss(100,1))").unwrap();
        assert_eq!(m.family(), Family::Mixture);
        let m = parse("mix(0.9 * pois(5000)+0.1*pois(1e4))").unwrap();
        assert!(m.is_discrete());
    }

    #[test]
    fn negative_and_exponent_numbers() {
        let d = parse("disc(-1.5:0.5,2e-1:0.5)").unwrap();
        assert_eq!(d.log_density(0.2), 0.5f64.ln());
        assert_eq!(d.log_density(-1.5), 0.5f64.ln());
    }

    #[test]
    fn display_round_trips() {
        for lit in [
            "bern(0.25)",
            "disc(0:0.5,1:0.4,2:0.1)",
            "gauss(-0.2,1.5)",
            "pois(3.5)",
            "mix(0.995*gauss(0,1) + 0.005*gauss(100,1))",
        ] {
            let d = parse(lit).unwrap();
            assert_eq!(d.to_string(), lit);
            assert_eq!(parse(&d.to_string()).unwrap(), d);
        }
    }

    #[test]
    fn rejects_bad_literals() {
        for bad in [
            "",
            "bern",
            "bern(0.5",
            "bern(0.5) x",
            "cauchy(0,1)",
            "gauss(0)",
            "bern(2)",
            "mix(0.5*mix(1*bern(0.5)) + 0.5*bern(0.1))",
        ] {
            assert!(parse(bad).is_err(), "{bad} should fail");
        }
    }
}
