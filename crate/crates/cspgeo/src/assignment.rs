use crate::error::{Error, Result};

/// A point of `D^n`: one domain value per variable.
///
/// Domain values are 0-based (`0..domain_size`). Colorings use
/// `domain_size = k`, Boolean problems use `domain_size = 2` with
/// 0 = false and 1 = true.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Assignment {
    values: Vec<u8>,
    domain_size: u8,
}

impl Assignment {
    pub fn new(values: Vec<u8>, domain_size: u8) -> Result<Self> {
        if domain_size < 2 {
            return Err(Error::parameter("domain_size must be at least 2"));
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= domain_size) {
            return Err(Error::parameter(format!(
                "value {bad} out of domain 0..{domain_size}"
            )));
        }
        Ok(Assignment { values, domain_size })
    }

    /// All-zero assignment of length `n`.
    pub fn zero(n: usize, domain_size: u8) -> Self {
        Assignment { values: vec![0; n], domain_size }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn domain_size(&self) -> u8 {
        self.domain_size
    }

    pub fn value(&self, var: usize) -> u8 {
        self.values[var]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn set(&mut self, var: usize, value: u8) {
        debug_assert!(value < self.domain_size);
        self.values[var] = value;
    }

    pub fn hamming_distance(&self, other: &Assignment) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Global complement of a Boolean assignment (0 <-> 1).
    pub fn complemented(&self) -> Result<Assignment> {
        if self.domain_size != 2 {
            return Err(Error::parameter("complement requires a Boolean domain"));
        }
        Ok(Assignment {
            values: self.values.iter().map(|&v| 1 - v).collect(),
            domain_size: 2,
        })
    }

    /// Digit-string form, e.g. `0211`; the solution-set export format.
    /// Digits above 9 use letters `a..` (domain sizes up to 36).
    pub fn to_digit_string(&self) -> String {
        self.values
            .iter()
            .map(|&v| std::char::from_digit(v as u32, 36).unwrap())
            .collect()
    }

    pub fn from_digit_string(s: &str, domain_size: u8) -> Result<Self> {
        let values = s
            .chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("bad digit {c:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Assignment::new(values, domain_size)
    }
}
