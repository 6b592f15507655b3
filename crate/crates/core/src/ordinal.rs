//! Ordinals below ω^ω in Cantor normal form.
//!
//! Time limits, timers and winning time labels all live here. Exponents are
//! naturals, so every value is a finite sum `ω^e₁·c₁ + … + ω^eₖ·cₖ` with
//! strictly decreasing exponents and positive coefficients.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("zero has no predecessor")]
    Zero,
    #[error("limit ordinal has no predecessor")]
    Limit,
    #[error("invalid ordinal at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// A single `ω^exponent · coefficient` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub exponent: u64,
    pub coefficient: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn omega() -> Self {
        Self::omega_pow(1)
    }

    pub fn omega_pow(exponent: u64) -> Self {
        Ordinal {
            terms: vec![Term {
                exponent,
                coefficient: 1,
            }],
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs, checking the
    /// normal-form invariants.
    pub fn from_terms(terms: impl IntoIterator<Item = (u64, u64)>) -> Result<Self, OrdinalError> {
        let terms: Vec<Term> = terms
            .into_iter()
            .map(|(exponent, coefficient)| Term {
                exponent,
                coefficient,
            })
            .collect();
        for (i, t) in terms.iter().enumerate() {
            if t.coefficient == 0 {
                return Err(OrdinalError::Parse {
                    offset: 0,
                    message: format!("term {i} has coefficient 0"),
                });
            }
            if i > 0 && terms[i - 1].exponent <= t.exponent {
                return Err(OrdinalError::Parse {
                    offset: 0,
                    message: "exponents must be strictly decreasing".into(),
                });
            }
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent == 0)
    }

    pub fn as_natural(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [Term {
                exponent: 0,
                coefficient,
            }] => Some(*coefficient),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && self.terms.last().is_some_and(|t| t.exponent > 0)
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent == 0)
    }

    /// `self + 1`.
    pub fn successor(&self) -> Ordinal {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some(t) if t.exponent == 0 => t.coefficient += 1,
            _ => terms.push(Term {
                exponent: 0,
                coefficient: 1,
            }),
        }
        Ordinal { terms }
    }

    /// The unique `b` with `b + 1 = self`.
    pub fn predecessor(&self) -> Result<Ordinal, OrdinalError> {
        if self.is_zero() {
            return Err(OrdinalError::Zero);
        }
        if self.is_limit() {
            return Err(OrdinalError::Limit);
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("non-zero");
        last.coefficient -= 1;
        if last.coefficient == 0 {
            terms.pop();
        }
        Ok(Ordinal { terms })
    }

    /// Number of moves a descending sequence starting here may take when every
    /// limit is lowered to an ordinal whose finite tail is at most
    /// `max_finite_choice`. Used to bound bounded plays.
    pub fn descent_budget(&self, max_finite_choice: u64) -> u64 {
        // Each ω^e·c block (e > 0) costs c lowerings, each of which lands on at
        // most ω^(e-1)·k + … with finite choices capped by max_finite_choice.
        fn block(exponent: u64, cap: u64) -> u64 {
            if exponent == 0 {
                return 1;
            }
            1u64.saturating_add(cap.saturating_add(1).saturating_mul(block(exponent - 1, cap)))
        }
        self.terms.iter().fold(0u64, |acc, t| {
            acc.saturating_add(t.coefficient.saturating_mul(block(t.exponent, max_finite_choice)))
        })
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        if n == 0 {
            Ordinal::zero()
        } else {
            Ordinal {
                terms: vec![Term {
                    exponent: 0,
                    coefficient: n,
                }],
            }
        }
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then(a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match t.exponent {
                0 => write!(f, "{}", t.coefficient)?,
                1 => f.write_str("w")?,
                e => write!(f, "w^{e}")?,
            }
            if t.exponent > 0 && t.coefficient > 1 {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let err = |offset: usize, message: &str| OrdinalError::Parse {
            offset,
            message: message.to_string(),
        };
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let nat = |pos: &mut usize| -> Result<u64, OrdinalError> {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if start == *pos {
                return Err(err(start, "expected a natural number"));
            }
            s[start..*pos]
                .parse::<u64>()
                .map_err(|_| err(start, "natural number out of range"))
        };

        let mut terms: Vec<Term> = Vec::new();
        skip_ws(&mut pos);
        if pos == bytes.len() {
            return Err(err(pos, "empty ordinal"));
        }
        loop {
            skip_ws(&mut pos);
            let term_start = pos;
            let term = if bytes.get(pos) == Some(&b'w') {
                pos += 1;
                let exponent = if bytes.get(pos) == Some(&b'^') {
                    pos += 1;
                    nat(&mut pos)?
                } else {
                    1
                };
                skip_ws(&mut pos);
                let coefficient = if bytes.get(pos) == Some(&b'*') {
                    pos += 1;
                    skip_ws(&mut pos);
                    nat(&mut pos)?
                } else {
                    1
                };
                Term {
                    exponent,
                    coefficient,
                }
            } else {
                Term {
                    exponent: 0,
                    coefficient: nat(&mut pos)?,
                }
            };
            if term.coefficient == 0 {
                // a lone "0" is the zero ordinal; anything else with a zero factor is malformed
                if terms.is_empty() && term.exponent == 0 {
                    skip_ws(&mut pos);
                    if pos == bytes.len() {
                        return Ok(Ordinal::zero());
                    }
                }
                return Err(err(term_start, "coefficient must be positive"));
            }
            if let Some(prev) = terms.last() {
                if prev.exponent <= term.exponent {
                    return Err(err(term_start, "exponents must be strictly decreasing"));
                }
            }
            terms.push(term);
            skip_ws(&mut pos);
            match bytes.get(pos) {
                None => break,
                Some(b'+') => pos += 1,
                Some(_) => return Err(err(pos, "expected '+' or end of input")),
            }
        }
        Ok(Ordinal { terms })
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
