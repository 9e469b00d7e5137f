//! Exact rational probabilities and finite-support distributions.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"num/den"`, `"num"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Malformed(format!("invalid rational `{text}`"));
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = int.abs() * &scale + frac;
        let value = Rational::new(magnitude, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = text.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Renders as `"num/den"` in lowest terms (`"1/1"` for one, `"0/1"` for zero).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A probability distribution with finite support and exact weights.
///
/// Entries are sorted by key, every weight is strictly positive and the
/// weights sum to exactly one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Distribution<T> {
    entries: Vec<(T, Rational)>,
}

impl<T: Ord + Clone> Distribution<T> {
    /// Builds a distribution, merging duplicate keys and dropping zero weights.
    pub fn new(weights: impl IntoIterator<Item = (T, Rational)>) -> Result<Self> {
        let mut entries: Vec<(T, Rational)> = Vec::new();
        for (key, w) in weights {
            if w.is_negative() {
                return Err(Error::NotNormalised(format!(
                    "negative weight {}",
                    format_rational(&w)
                )));
            }
            entries.push((key, w));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(T, Rational)> = Vec::with_capacity(entries.len());
        for (key, w) in entries {
            match merged.last_mut() {
                Some((k, acc)) if *k == key => *acc += w,
                _ => merged.push((key, w)),
            }
        }
        merged.retain(|(_, w)| !w.is_zero());
        let total: Rational = merged.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() {
            return Err(Error::NotNormalised(format!(
                "weights sum to {}",
                format_rational(&total)
            )));
        }
        Ok(Distribution { entries: merged })
    }

    pub fn dirac(value: T) -> Self {
        Distribution {
            entries: vec![(value, Rational::one())],
        }
    }

    /// Uniform over the distinct values yielded; panics on an empty iterator.
    pub fn uniform(values: impl IntoIterator<Item = T>) -> Self {
        let mut values: Vec<T> = values.into_iter().collect();
        values.sort();
        values.dedup();
        assert!(!values.is_empty(), "uniform distribution over an empty set");
        let w = rat(1, values.len() as i64);
        Distribution {
            entries: values.into_iter().map(|v| (v, w.clone())).collect(),
        }
    }

    pub fn prob(&self, value: &T) -> Rational {
        match self.entries.binary_search_by(|(k, _)| k.cmp(value)) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn contains(&self, value: &T) -> bool {
        self.entries.binary_search_by(|(k, _)| k.cmp(value)).is_ok()
    }

    pub fn map<U: Ord + Clone>(&self, mut f: impl FnMut(&T) -> U) -> Distribution<U> {
        Distribution::new(self.entries.iter().map(|(k, w)| (f(k), w.clone())))
            .expect("image of a distribution is a distribution")
    }

    /// Monadic bind: draws from `self`, then from `f` of the draw.
    pub fn flat_map<U: Ord + Clone>(
        &self,
        mut f: impl FnMut(&T) -> Distribution<U>,
    ) -> Distribution<U> {
        let mut out = Vec::new();
        for (k, w) in &self.entries {
            for (u, v) in f(k).entries {
                out.push((u, w * v));
            }
        }
        Distribution::new(out).expect("bind of distributions is a distribution")
    }

    /// Samples by inverse transform on a uniform `f64` draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (k, w) in &self.entries {
            acc += to_f64(w);
            if u < acc {
                return k.clone();
            }
        }
        self.entries.last().expect("nonempty").0.clone()
    }
}

impl<T> Distribution<T> {
    pub fn iter(&self) -> impl Iterator<Item = (&T, &Rational)> {
        self.entries.iter().map(|(k, w)| (k, w))
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|(k, _)| k)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_dirac(&self) -> bool {
        self.entries.len() == 1
    }

    /// The single point of a Dirac distribution.
    pub fn point(&self) -> Option<&T> {
        match self.entries.as_slice() {
            [(k, _)] => Some(k),
            _ => None,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Distribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", k, format_rational(w))?;
        }
        write!(f, "}}")
    }
}
