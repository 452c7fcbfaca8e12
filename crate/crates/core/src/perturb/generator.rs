use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::UnitaryMatrix;

/// Sense of rotation of the diagonal phase perturbation.
///
/// `Clockwise` uses `V(t)^H = exp(-i t D)` in place of `V(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Counterclockwise,
    Clockwise,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Counterclockwise => 1.0,
            Direction::Clockwise => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Counterclockwise => Direction::Clockwise,
            Direction::Clockwise => Direction::Counterclockwise,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Direction::Counterclockwise => "ccw",
            Direction::Clockwise => "cw",
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ccw" | "counterclockwise" => Ok(Direction::Counterclockwise),
            "cw" | "clockwise" => Ok(Direction::Clockwise),
            other => Err(Error::InvalidArgument(format!("unknown direction `{other}`"))),
        }
    }
}

/// Probability vector `p` defining `D = sum_i p_i |i><i|`, plus the
/// direction in which `V(t)` rotates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationGenerator {
    p: Vec<f64>,
    direction: Direction,
}

impl PerturbationGenerator {
    pub fn new(p: Vec<f64>, direction: Direction) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidProbability("empty vector".into()));
        }
        if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidProbability(format!("entry {bad} is negative or non-finite")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidProbability(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self { p, direction })
    }

    pub fn one_hot(dim: usize, index: usize, direction: Direction) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!("index {index} out of range for dimension {dim}")));
        }
        let mut p = vec![0.0; dim];
        p[index] = 1.0;
        Self::new(p, direction)
    }

    pub fn uniform(dim: usize, direction: Direction) -> Result<Self> {
        Self::new(vec![1.0 / dim as f64; dim], direction)
            .or_else(|_| {
                // 1/d summed d times can miss 1 by a few ulps for odd d.
                let mut p = vec![1.0 / dim as f64; dim];
                let rest: f64 = p[1..].iter().sum();
                p[0] = 1.0 - rest;
                Self::new(p, direction)
            })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn with_direction(&self, direction: Direction) -> Self {
        Self {
            p: self.p.clone(),
            direction,
        }
    }

    /// Phase angles `+-p_i t` of the diagonal of `V(t)`.
    pub fn phases(&self, t: f64) -> Vec<f64> {
        let s = self.direction.sign();
        self.p.iter().map(|&pi| s * pi * t).collect()
    }

    /// `V(t)`, or `V(t)^H` for the clockwise direction.
    pub fn phase_matrix(&self, t: f64) -> UnitaryMatrix {
        UnitaryMatrix::diagonal_phases(&self.phases(t))
    }

    /// `<x|D|x> = sum_i p_i |x_i|^2`.
    pub fn expectation(&self, x: &[num_complex::Complex64]) -> f64 {
        self.p.iter().zip(x).map(|(&pi, z)| pi * z.norm_sqr()).sum()
    }

    /// Indices with `p_i > 0`.
    pub fn support(&self) -> Vec<usize> {
        (0..self.p.len()).filter(|&i| self.p[i] > 0.0).collect()
    }
}
