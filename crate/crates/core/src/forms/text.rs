//! Text and JSON encodings of forms.
//!
//! Text: a signed sum of terms `c*x0^a0*x1^a1*...`, largest monomial first.
//! JSON: `{"n": int, "degree": int, "terms": [[[a0..an], "p/q"], ...]}`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{FormError, HomogeneousForm, Monomial};
use crate::rational::{self, Rational};

pub(super) fn render(f: &HomogeneousForm) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in f.terms.iter().rev().enumerate() {
        let negative = c.is_negative();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let abs = c.abs();
        let vars: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| if e == 1 { format!("x{v}") } else { format!("x{v}^{e}") })
            .collect();
        if vars.is_empty() {
            out.push_str(&rational::to_text(&abs));
        } else {
            if !abs.is_one() {
                out.push_str(&rational::to_text(&abs));
                out.push('*');
            }
            out.push_str(&vars.join("*"));
        }
    }
    out
}

fn parse_term(term: &str, n: usize) -> Result<(Vec<u32>, Rational), FormError> {
    let mut coeff = Rational::one();
    let mut exps = vec![0u32; n + 1];
    for factor in term.split('*') {
        if let Some(var) = factor.strip_prefix('x') {
            let (idx, exp) = match var.split_once('^') {
                Some((i, e)) => (i, e),
                None => (var, "1"),
            };
            let idx: usize = idx.parse().map_err(|_| FormError::Parse(format!("bad variable {factor:?}")))?;
            let exp: u32 = exp.parse().map_err(|_| FormError::Parse(format!("bad exponent {factor:?}")))?;
            if idx > n {
                return Err(FormError::Parse(format!("variable x{idx} outside P^{n}")));
            }
            exps[idx] += exp;
        } else {
            coeff *= rational::parse(factor).map_err(FormError::Parse)?;
        }
    }
    Ok((exps, coeff))
}

impl HomogeneousForm {
    /// Parses the text format. The degree is inferred from the terms unless
    /// given; `"0"` needs an explicit degree to be anything but degree 0.
    pub fn parse(text: &str, n: usize, degree: Option<u32>) -> Result<Self, FormError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(FormError::Parse("empty form".into()));
        }
        // Split on top-level signs; a sign directly after '^', '*' or '/' is
        // part of a number and never occurs in rendered output.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && (i == 0 || !matches!(current.chars().last(), Some('^' | '*' | '/'))) {
                if !current.is_empty() {
                    terms.push((negative, std::mem::take(&mut current)));
                } else if i != 0 {
                    return Err(FormError::Parse(format!("dangling sign in {text:?}")));
                }
                negative = ch == '-';
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(FormError::Parse(format!("trailing sign in {text:?}")));
        }
        terms.push((negative, current));

        let mut parsed = Vec::with_capacity(terms.len());
        for (neg, t) in &terms {
            let (e, c) = parse_term(t, n)?;
            parsed.push((e, if *neg { -c } else { c }));
        }
        let nonzero: Vec<_> = parsed.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let degree = match degree {
            Some(d) => d,
            None => nonzero.first().map_or(0, |(e, _)| e.iter().sum()),
        };
        Self::from_terms(n, degree, nonzero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormRecord {
    pub n: usize,
    pub degree: u32,
    pub terms: Vec<(Vec<u32>, String)>,
}

impl From<&HomogeneousForm> for FormRecord {
    fn from(f: &HomogeneousForm) -> Self {
        Self {
            n: f.n,
            degree: f.degree,
            terms: f.terms.iter().rev().map(|(m, c)| (m.0.clone(), rational::to_wire(c))).collect(),
        }
    }
}

impl TryFrom<FormRecord> for HomogeneousForm {
    type Error = FormError;

    fn try_from(r: FormRecord) -> Result<Self, FormError> {
        let mut terms = Vec::with_capacity(r.terms.len());
        for (e, c) in r.terms {
            let c = rational::parse(&c).map_err(FormError::Parse)?;
            if c.is_zero() {
                return Err(FormError::Parse("zero coefficient stored".into()));
            }
            terms.push((e, c));
        }
        let before = terms.len();
        let f = Self::from_terms(r.n, r.degree, terms)?;
        if f.terms.len() != before {
            return Err(FormError::Parse("repeated monomial".into()));
        }
        Ok(f)
    }
}

impl Serialize for HomogeneousForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FormRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomogeneousForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let record = FormRecord::deserialize(d)?;
        Self::try_from(record).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}
