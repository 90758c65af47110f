//! Finite probability vectors and row-stochastic channels.
//!
//! Zero entries are significant: supports, confusion graphs and the
//! no-contraction test all read exact zeros, so validation renormalizes
//! but never rounds small positive mass down to zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed deviation of a probability vector's sum from 1.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A probability vector on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates `raw` with the default tolerance.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        Self::validate(raw, NORMALIZATION_TOL)
    }

    /// Checks non-negativity and normalization; a sum within `tolerance`
    /// of 1 is renormalized to sum to 1.
    pub fn validate(raw: Vec<f64>, tolerance: f64) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in raw.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(Error::NotNormalized { sum, tolerance });
        }
        let probs = if sum == 1.0 {
            raw
        } else {
            raw.into_iter().map(|v| v / sum).collect()
        };
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: at + 1,
            });
        }
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    /// Indices carrying strictly positive mass.
    pub fn support(&self) -> SupportSet {
        SupportSet {
            indices: self
                .probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(i, _)| i)
                .collect(),
        }
    }

    pub(crate) fn check_same_size(&self, other: &Distribution) -> Result<()> {
        if self.alphabet_size() != other.alphabet_size() {
            return Err(Error::DimensionMismatch {
                expected: self.alphabet_size(),
                found: other.alphabet_size(),
            });
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            probs: Vec<f64>,
        }
        let raw = Raw::deserialize(de)?;
        Distribution::new(raw.probs).map_err(serde::de::Error::custom)
    }
}

/// Sorted indices with strictly positive mass.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_subset(&self, other: &SupportSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    pub fn is_disjoint(&self, other: &SupportSet) -> bool {
        // both sorted: merge walk
        let (mut a, mut b) = (self.indices.iter().peekable(), other.indices.iter().peekable());
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let mut indices: Vec<usize> = self.indices.iter().chain(&other.indices).copied().collect();
        indices.sort_unstable();
        indices.dedup();
        SupportSet { indices }
    }
}

/// A row-stochastic matrix; row `x` is the output distribution given input `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    rows: Vec<Distribution>,
    output_size: usize,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::validate(rows, NORMALIZATION_TOL)
    }

    pub fn validate(rows: Vec<Vec<f64>>, tolerance: f64) -> Result<Self> {
        let output_size = rows.first().map(Vec::len).ok_or(Error::Empty)?;
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(row, values)| {
                if values.len() != output_size {
                    return Err(Error::RaggedRows {
                        row,
                        expected: output_size,
                        found: values.len(),
                    });
                }
                Distribution::validate(values, tolerance).map_err(|e| Error::InvalidRow {
                    row,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows, output_size })
    }

    /// Builds a channel from already validated rows of equal length.
    pub fn from_rows(rows: Vec<Distribution>) -> Result<Self> {
        let output_size = rows.first().map(Distribution::alphabet_size).ok_or(Error::Empty)?;
        if let Some((row, d)) = rows
            .iter()
            .enumerate()
            .find(|(_, d)| d.alphabet_size() != output_size)
        {
            return Err(Error::RaggedRows {
                row,
                expected: output_size,
                found: d.alphabet_size(),
            });
        }
        Ok(Self { rows, output_size })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let rows = (0..n)
            .map(|x| Distribution::point_mass(n, x))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    /// Channel whose every row equals `row`.
    pub fn constant(input_size: usize, row: &Distribution) -> Result<Self> {
        Self::from_rows(vec![row.clone(); input_size])
    }

    pub fn input_size(&self) -> usize {
        self.rows.len()
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn is_square(&self) -> bool {
        self.input_size() == self.output_size
    }

    pub fn row(&self, x: usize) -> &Distribution {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Distribution] {
        &self.rows
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.rows[x].probs()[y]
    }

    /// Sub-channel keeping only the listed input rows.
    pub fn restrict_inputs(&self, inputs: &[usize]) -> Result<Self> {
        let rows = inputs
            .iter()
            .map(|&x| {
                self.rows.get(x).cloned().ok_or(Error::DimensionMismatch {
                    expected: self.input_size(),
                    found: x + 1,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    /// Output distribution `sum_x input[x] * row_x`.
    pub fn push_forward(&self, input: &Distribution) -> Result<Distribution> {
        if input.alphabet_size() != self.input_size() {
            return Err(Error::DimensionMismatch {
                expected: self.input_size(),
                found: input.alphabet_size(),
            });
        }
        let mut out = vec![0.0; self.output_size];
        for (row, &weight) in self.rows.iter().zip(input.probs()) {
            if weight == 0.0 {
                continue;
            }
            for (o, &c) in out.iter_mut().zip(row.probs()) {
                *o += weight * c;
            }
        }
        Distribution::new(out)
    }

    /// The cascade `self` then `second`: row `w` of the result is
    /// `second` applied to row `w` of `self`.
    pub fn compose(&self, second: &Channel) -> Result<Channel> {
        if self.output_size != second.input_size() {
            return Err(Error::DimensionMismatch {
                expected: second.input_size(),
                found: self.output_size,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| second.push_forward(row))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.probs().to_vec()).collect()
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rows: Vec<Vec<f64>>,
        }
        let raw = Raw::deserialize(de)?;
        Channel::new(raw.rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block_q22() -> Channel {
        Channel::new(vec![
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![0.0, 0.0, 0.5, 0.5],
        ])
        .unwrap()
    }

    #[test]
    fn validate_exact_simplex_point() {
        let d = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(d.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn validate_renormalizes_within_tolerance() {
        let d = Distribution::new(vec![0.5, 0.5 + 1e-12]).unwrap();
        let sum: f64 = d.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn validate_rejects_bad_sum_and_negative() {
        assert!(matches!(
            Distribution::new(vec![0.5, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            Distribution::new(vec![1.5, -0.5]),
            Err(Error::NegativeMass { index: 1, .. })
        ));
        assert_eq!(Distribution::new(vec![]), Err(Error::Empty));
    }

    #[test]
    fn validation_keeps_tiny_mass_positive() {
        let d = Distribution::new(vec![1.0 - 1e-300, 1e-300]).unwrap();
        assert_eq!(d.support().indices(), &[0, 1]);
    }

    #[test]
    fn push_forward_identity_and_constant() {
        let p = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(Channel::identity(3).unwrap().push_forward(&p).unwrap(), p);
        let r = Distribution::new(vec![0.1, 0.9]).unwrap();
        let c = Channel::constant(3, &r).unwrap();
        let out = c.push_forward(&p).unwrap();
        for (a, b) in out.probs().iter().zip(r.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn push_forward_block_uniform_point_mass() {
        let p = Distribution::point_mass(4, 0).unwrap();
        let out = block_q22().push_forward(&p).unwrap();
        assert_eq!(out.probs(), &[0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn push_forward_dimension_mismatch() {
        let p = Distribution::uniform(3).unwrap();
        assert!(matches!(
            block_q22().push_forward(&p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compose_with_identity_is_noop() {
        let c = block_q22();
        let id = Channel::identity(4).unwrap();
        assert_eq!(id.compose(&c).unwrap(), c);
        assert_eq!(c.compose(&id).unwrap(), c);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn compose_matches_triple_loop() {
        // randomized response N = 4, e^eps = 2: diag 2/5, off 1/5
        let rr: Vec<Vec<f64>> = (0..4)
            .map(|w| (0..4).map(|x| if w == x { 0.4 } else { 0.2 }).collect())
            .collect();
        let first = Channel::new(rr.clone()).unwrap();
        let second = block_q22();
        let composed = first.compose(&second).unwrap();
        let q = second.to_rows();
        for w in 0..4 {
            for y in 0..4 {
                let mut acc = 0.0;
                for x in 0..4 {
                    acc += rr[w][x] * q[x][y];
                }
                assert!((composed.entry(w, y) - acc).abs() < 1e-15);
            }
        }
        // hand values: row 0 -> [0.3, 0.3, 0.2, 0.2]
        let row0 = composed.row(0).probs();
        for (a, b) in row0.iter().zip([0.3, 0.3, 0.2, 0.2]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn support_examples() {
        assert_eq!(Distribution::new(vec![0.0, 1.0]).unwrap().support().indices(), &[1]);
        assert_eq!(Distribution::new(vec![0.5, 0.5]).unwrap().support().indices(), &[0, 1]);
        assert_eq!(block_q22().row(0).support().indices(), &[0, 1]);
    }

    #[test]
    fn support_set_relations() {
        let a = Distribution::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap().support();
        let b = Distribution::new(vec![0.0, 0.0, 0.5, 0.5]).unwrap().support();
        let c = Distribution::new(vec![0.0, 0.5, 0.5, 0.0]).unwrap().support();
        assert!(a.is_disjoint(&b));
        assert!(!a.is_disjoint(&c));
        assert_eq!(a.union(&b).len(), 4);
        assert!(a.is_subset(&a.union(&c)));
    }

    #[test]
    fn channel_rejects_bad_rows() {
        assert!(matches!(
            Channel::new(vec![vec![0.5, 0.5], vec![0.7, 0.7]]),
            Err(Error::InvalidRow { row: 1, .. })
        ));
        assert!(matches!(
            Channel::new(vec![vec![0.5, 0.5], vec![1.0]]),
            Err(Error::RaggedRows { row: 1, .. })
        ));
    }
}
