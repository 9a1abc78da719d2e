use crate::error::{Error, Result};

/// A real-valued signal on the nodes of a graph with cached energy and sum.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal {
    values: Vec<f64>,
    norm_sq: f64,
    sum: f64,
}

impl GraphSignal {
    pub fn new(values: Vec<f64>) -> Self {
        let norm_sq = values.iter().map(|v| v * v).sum();
        let sum = values.iter().sum();
        GraphSignal {
            values,
            norm_sq,
            sum,
        }
    }

    /// Indicator of node `node` on `n` nodes.
    pub fn dirac(n: usize, node: usize) -> Result<Self> {
        if node >= n {
            return Err(Error::IndexOutOfRange { index: node, n });
        }
        let mut v = vec![0.0; n];
        v[node] = 1.0;
        Ok(Self::new(v))
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self::new(vec![value; n])
    }

    /// i.i.d. standard normal entries from a seeded ChaCha stream.
    pub fn standard_normal(n: usize, seed: u64) -> Self {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `‖x‖₂²`
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// `Σᵢ xᵢ`
    pub fn sum(&self) -> f64 {
        self.sum
    }

    pub(crate) fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for v in &self.values {
            v.to_bits().hash(&mut h);
        }
        h.finish()
    }
}

impl From<Vec<f64>> for GraphSignal {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}
