use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A perversity `p̄(0), p̄(1), …, p̄(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perversity {
    pub values: Vec<usize>,
}

impl Perversity {
    /// Checks `p̄(0) = 0` and steps of 0 or 1.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        match values.first() {
            None => return Err(invalid("perversity needs at least the value p(0)")),
            Some(&v) if v != 0 => return Err(invalid(format!("perversity must have p(0) = 0, got {v}"))),
            _ => {}
        }
        for (j, w) in values.windows(2).enumerate() {
            if w[1] < w[0] || w[1] - w[0] > 1 {
                return Err(invalid(format!("perversity step p({}) - p({j}) = {} is not 0 or 1", j + 1, w[1] as i64 - w[0] as i64)));
            }
        }
        Ok(Self { values })
    }

    /// Parses a comma-separated list such as `0,0,0,1`.
    pub fn parse(list: &str) -> Result<Self> {
        let values = list
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| invalid(format!("perversity entry {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    /// Largest codimension covered.
    pub fn max_codim(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, k: usize) -> usize {
        self.values[k]
    }

    /// `self.p̄(k) ≤ other.p̄(k)` for every `k` both define.
    pub fn le(&self, other: &Perversity) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// Upper middle perversity `p̄(0) = 0`, `p̄(j) = ⌊(j − 1)/2⌋`, up to `n`.
pub fn gm_perversity(n: usize) -> Perversity {
    let values = (0..=n).map(|j| if j == 0 { 0 } else { (j - 1) / 2 }).collect();
    Perversity { values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_middle_values() {
        assert_eq!(gm_perversity(3).values, vec![0, 0, 0, 1]);
        assert_eq!(gm_perversity(7).at(7), 3);
        assert_eq!(gm_perversity(1).at(1), 0);
        for n in 0..12 {
            assert!(Perversity::new(gm_perversity(n).values).is_ok());
        }
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(Perversity::new(vec![1, 1]).is_err());
        assert!(Perversity::new(vec![0, 2]).is_err());
        assert!(Perversity::new(vec![0, 1, 0]).is_err());
        assert!(Perversity::parse("0, 0, 1").is_ok());
        assert!(Perversity::parse("0,x").is_err());
    }
}
