use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::SurfaceError;
use crate::qlinalg::{QVec, Rat};

/// Identity of the model a divisor belongs to: its name and ordered class list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelTag {
    pub name: String,
    pub classes: Vec<String>,
}

/// A ℚ-divisor: one exact coefficient per class of its model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Divisor {
    tag: Arc<ModelTag>,
    coeffs: QVec,
}

impl Divisor {
    pub(crate) fn new(tag: Arc<ModelTag>, coeffs: QVec) -> Self {
        debug_assert_eq!(tag.classes.len(), coeffs.len());
        Divisor { tag, coeffs }
    }

    pub fn tag(&self) -> &Arc<ModelTag> {
        &self.tag
    }

    pub fn model_name(&self) -> &str {
        &self.tag.name
    }

    pub fn classes(&self) -> &[String] {
        &self.tag.classes
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rat {
        &self.coeffs[i]
    }

    pub fn coeff_of(&self, class: &str) -> Result<&Rat, SurfaceError> {
        let i = self
            .tag
            .classes
            .iter()
            .position(|c| c == class)
            .ok_or_else(|| SurfaceError::UnknownClass(class.to_string()))?;
        Ok(&self.coeffs[i])
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn zero_like(&self) -> Divisor {
        self.map(|_| Rat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Every coefficient nonnegative.
    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    fn same_model(&self, other: &Divisor) -> Result<(), SurfaceError> {
        if self.tag != other.tag {
            return Err(SurfaceError::ModelMismatch {
                left: self.tag.name.clone(),
                right: other.tag.name.clone(),
            });
        }
        Ok(())
    }

    fn map(&self, f: impl Fn(&Rat) -> Rat) -> Divisor {
        Divisor {
            tag: self.tag.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn zip(
        &self,
        other: &Divisor,
        f: impl Fn(&Rat, &Rat) -> Rat,
    ) -> Result<Divisor, SurfaceError> {
        self.same_model(other)?;
        Ok(Divisor {
            tag: self.tag.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn try_add(&self, other: &Divisor) -> Result<Divisor, SurfaceError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Divisor) -> Result<Divisor, SurfaceError> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rat) -> Divisor {
        self.map(|a| c * a)
    }

    pub fn neg(&self) -> Divisor {
        self.map(|a| -a)
    }

    pub fn round_down(&self) -> Divisor {
        self.map(Rat::floor)
    }

    pub fn round_up(&self) -> Divisor {
        self.map(Rat::ceil)
    }

    /// Coefficientwise minimum `A ∧ B`.
    pub fn wedge(&self, other: &Divisor) -> Result<Divisor, SurfaceError> {
        self.zip(other, |a, b| a.clone().min(b.clone()))
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Divisor) -> Result<bool, SurfaceError> {
        self.same_model(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b))
    }

    /// The reduced divisor of classes whose coefficient is exactly 1.
    pub fn boundary_components(&self) -> Divisor {
        self.map(|a| if a.is_one() { Rat::one() } else { Rat::zero() })
    }

    pub fn record(&self) -> DivisorRecord {
        DivisorRecord {
            model: self.tag.name.clone(),
            classes: self.tag.classes.clone(),
            coeffs: self.coeffs.clone(),
            text: self.to_string(),
        }
    }
}

impl fmt::Display for Divisor {
    /// `3/2*H - 1*E`; zero terms omitted; the zero divisor prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, name) in self.coeffs.iter().zip(&self.tag.classes) {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", c.abs(), name)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Self-describing serialized divisor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorRecord {
    pub model: String,
    pub classes: Vec<String>,
    pub coeffs: QVec,
    pub text: String,
}

impl Serialize for Divisor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Divisor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = DivisorRecord::deserialize(d)?;
        if r.classes.len() != r.coeffs.len() {
            return Err(serde::de::Error::custom("class/coefficient length mismatch"));
        }
        Ok(Divisor {
            tag: Arc::new(ModelTag {
                name: r.model,
                classes: r.classes,
            }),
            coeffs: r.coeffs,
        })
    }
}

/// Parses a divisor literal such as `"3/2*H - 1*E"`, `"H + 2*E"` or `"0"`.
pub(crate) fn parse_terms(s: &str) -> Result<Vec<(Rat, Option<String>)>, SurfaceError> {
    let err = |m: &str| SurfaceError::Parse(format!("{m} in `{s}`"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty divisor"));
    }
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    let mut prev: Option<char> = None;
    for ch in compact.chars() {
        let splits = (ch == '+' || ch == '-') && !matches!(prev, None | Some('*') | Some('/'));
        if splits {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
        prev = Some(ch);
    }
    terms.push(cur);

    let mut out = Vec::new();
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(rest) => (-Rat::one(), rest),
            None => (Rat::one(), t.strip_prefix('+').unwrap_or(&t)),
        };
        if body.is_empty() {
            return Err(err("dangling sign"));
        }
        let (coef, name) = match body.split_once('*') {
            Some((c, n)) => (
                c.parse::<Rat>().map_err(|_| err("bad coefficient"))?,
                Some(n.to_string()),
            ),
            None => match body.parse::<Rat>() {
                Ok(c) => (c, None),
                Err(_) => (Rat::one(), Some(body.to_string())),
            },
        };
        if let Some(n) = &name {
            let valid = n
                .chars()
                .next()
                .is_some_and(|c| c.is_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
            if !valid {
                return Err(err("bad class name"));
            }
        }
        out.push((sign * coef, name));
    }
    Ok(out)
}
