use std::ops::{Add, Index, Sub};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::scalar::Scalar;

/// Amount of each resource dimension (CPU, RAM, storage, bandwidth, ...).
///
/// All components are finite and non-negative. The dimension count is fixed
/// per scenario; mixing vectors of different lengths is a logic error and
/// panics in the arithmetic operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ResourceVector<T> {
    components: Vec<T>,
}

impl<T: Scalar> ResourceVector<T> {
    pub fn new(components: Vec<T>) -> Result<Self, ModelError> {
        if components.is_empty() {
            return Err(ModelError::EmptyVector);
        }
        if let Some(bad) = components.iter().find(|c| !c.is_finite() || **c < T::zero()) {
            return Err(ModelError::InvalidComponent(bad.as_f64()));
        }
        Ok(Self { components })
    }

    pub fn from_f64s(values: &[f64]) -> Result<Self, ModelError> {
        Self::new(values.iter().map(|&v| T::of(v)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { components: vec![T::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[T] {
        &self.components
    }

    pub fn mean(&self) -> T {
        let total: T = self.components.iter().copied().sum();
        total / T::of(self.components.len() as f64)
    }

    /// Componentwise `self <= other`, exact.
    pub fn le(&self, other: &Self) -> bool {
        self.components.iter().zip(&other.components).all(|(a, b)| a <= b)
    }

    /// Componentwise `self <= other + tol`.
    pub fn fits_within(&self, other: &Self, tol: T) -> bool {
        self.components.iter().zip(&other.components).all(|(a, b)| *a <= *b + tol)
    }

    /// Componentwise `self <= other` with at least one strict component.
    pub fn strictly_below(&self, other: &Self) -> bool {
        self.le(other) && self.components.iter().zip(&other.components).any(|(a, b)| a < b)
    }
}

impl<T> Index<usize> for ResourceVector<T> {
    type Output = T;

    fn index(&self, k: usize) -> &T {
        &self.components[k]
    }
}

impl<T: Scalar> Add for &ResourceVector<T> {
    type Output = ResourceVector<T>;

    fn add(self, rhs: Self) -> ResourceVector<T> {
        assert_eq!(self.dim(), rhs.dim(), "resource dimension mismatch");
        ResourceVector {
            components: self.components.iter().zip(&rhs.components).map(|(a, b)| *a + *b).collect(),
        }
    }
}

/// Componentwise difference; may go negative, so the result is only used as a
/// scratch quantity (e.g. remaining capacity bookkeeping).
impl<T: Scalar> Sub for &ResourceVector<T> {
    type Output = Vec<T>;

    fn sub(self, rhs: Self) -> Vec<T> {
        assert_eq!(self.dim(), rhs.dim(), "resource dimension mismatch");
        self.components.iter().zip(&rhs.components).map(|(a, b)| *a - *b).collect()
    }
}

impl<T: Scalar> TryFrom<Vec<T>> for ResourceVector<T> {
    type Error = ModelError;

    fn try_from(v: Vec<T>) -> Result<Self, ModelError> {
        Self::new(v)
    }
}

impl<T> From<ResourceVector<T>> for Vec<T> {
    fn from(v: ResourceVector<T>) -> Vec<T> {
        v.components
    }
}
