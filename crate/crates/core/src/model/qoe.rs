//! Logistic QoE model and the catalog of discrete QoS levels.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::ResourceVector;
use crate::scalar::Scalar;

/// Parameters of the logistic QoE curve `max / (1 + exp(-growth * (x - midpoint)))`,
/// where `x` is the mean of a demand vector over its dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QoeParams<T> {
    /// Maximum attainable QoE.
    pub max: T,
    /// Growth rate of the curve, > 0.
    pub growth: T,
    /// Mean demand at which QoE is half of `max`.
    pub midpoint: T,
}

impl<T: Scalar> QoeParams<T> {
    pub fn new(max: T, growth: T, midpoint: T) -> Result<Self, ModelError> {
        let p = Self { max, growth, midpoint };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.max.is_finite() && self.max > T::zero()) {
            return Err(ModelError::InvalidQoeParams(format!("max must be > 0, got {}", self.max)));
        }
        if !(self.growth.is_finite() && self.growth > T::zero()) {
            return Err(ModelError::InvalidQoeParams(format!("growth must be > 0, got {}", self.growth)));
        }
        if !self.midpoint.is_finite() {
            return Err(ModelError::InvalidQoeParams("midpoint must be finite".into()));
        }
        Ok(())
    }

    /// QoE of a scalar mean demand.
    pub fn qoe_of_mean(&self, mean: T) -> T {
        self.max / (T::one() + (-self.growth * (mean - self.midpoint)).exp())
    }

    /// QoE of a raw demand slice. Rejects empty or non-finite input.
    pub fn qoe_of_demand(&self, demand: &[T]) -> Result<T, ModelError> {
        if demand.is_empty() {
            return Err(ModelError::EmptyVector);
        }
        if let Some(bad) = demand.iter().find(|c| !c.is_finite()) {
            return Err(ModelError::InvalidComponent(bad.as_f64()));
        }
        let mean = demand.iter().copied().sum::<T>() / T::of(demand.len() as f64);
        Ok(self.qoe_of_mean(mean))
    }
}

impl QoeParams<f64> {
    /// `L = 5, alpha = 1.5, beta = 2`.
    pub fn standard() -> Self {
        Self { max: 5.0, growth: 1.5, midpoint: 2.0 }
    }
}

/// Free-function form of [`QoeParams::qoe_of_demand`].
pub fn qoe_of_demand<T: Scalar>(demand: &ResourceVector<T>, params: &QoeParams<T>) -> T {
    params.qoe_of_mean(demand.mean())
}

/// One selectable QoS level with its precomputed QoE.
#[derive(Debug, Clone, PartialEq)]
pub struct QosLevel<T> {
    /// 1-based level number.
    pub index: usize,
    pub demand: ResourceVector<T>,
    pub qoe: T,
}

/// Ordered list of QoS levels, strictly increasing in demand and QoE.
#[derive(Debug, Clone, PartialEq)]
pub struct QosCatalog<T> {
    levels: Vec<QosLevel<T>>,
}

impl<T: Scalar> QosCatalog<T> {
    pub fn new(demands: Vec<ResourceVector<T>>, params: &QoeParams<T>) -> Result<Self, ModelError> {
        params.validate()?;
        let first = demands.first().ok_or(ModelError::EmptyCatalog)?;
        let dim = first.dim();
        for w in &demands {
            if w.dim() != dim {
                return Err(ModelError::DimensionMismatch { expected: dim, got: w.dim() });
            }
        }
        let levels: Vec<QosLevel<T>> = demands
            .into_iter()
            .enumerate()
            .map(|(i, demand)| QosLevel { index: i + 1, qoe: qoe_of_demand(&demand, params), demand })
            .collect();
        for pair in levels.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            // Strict demand order does not imply strict mean order under f32
            // rounding, so QoE is checked separately.
            if !lo.demand.strictly_below(&hi.demand) || lo.qoe >= hi.qoe {
                return Err(ModelError::CatalogNotIncreasing { prev: lo.index, level: hi.index });
            }
        }
        Ok(Self { levels })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.levels[0].demand.dim()
    }

    pub fn levels(&self) -> &[QosLevel<T>] {
        &self.levels
    }

    /// Level by 1-based index.
    pub fn level(&self, index: usize) -> Option<&QosLevel<T>> {
        index.checked_sub(1).and_then(|i| self.levels.get(i))
    }

    pub fn lowest(&self) -> &QosLevel<T> {
        &self.levels[0]
    }

    pub fn highest(&self) -> &QosLevel<T> {
        &self.levels[self.levels.len() - 1]
    }

    /// Highest 1-based level whose demand fits in `room`, if any.
    ///
    /// Demands are componentwise increasing, so the fitting levels form a
    /// prefix of the catalog.
    pub fn highest_fitting(&self, room: &[T], tol: T) -> Option<usize> {
        self.levels
            .iter()
            .take_while(|lv| lv.demand.components().iter().zip(room).all(|(w, r)| *w <= *r + tol))
            .last()
            .map(|lv| lv.index)
    }

    pub fn demands(&self) -> impl Iterator<Item = &ResourceVector<T>> {
        self.levels.iter().map(|l| &l.demand)
    }
}

impl QosCatalog<f64> {
    /// Three-level catalog `<1,2,1,2>`, `<2,3,3,4>`, `<5,7,6,6>` under the
    /// standard QoE parameters.
    pub fn standard() -> Self {
        let demands = [[1.0, 2.0, 1.0, 2.0], [2.0, 3.0, 3.0, 4.0], [5.0, 7.0, 6.0, 6.0]]
            .iter()
            .map(|w| ResourceVector::new(w.to_vec()).unwrap())
            .collect();
        Self::new(demands, &QoeParams::standard()).unwrap()
    }
}
