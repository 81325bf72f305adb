//! Objective functions, search boxes and evaluation accounting.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::{Error, Result};

/// A scalar function to be minimized.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    /// Evaluates the function. Callers guarantee `x.len() == self.dimension()`.
    fn value(&self, x: &[f64]) -> Result<f64>;
}

/// Axis-aligned search box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::param("bounds", "zero-dimensional box"));
        }
        if let Some(j) = (0..lower.len()).find(|&j| !(lower[j] < upper[j])) {
            return Err(Error::param(
                "bounds",
                format!(
                    "lower[{j}] = {} is not below upper[{j}] = {}",
                    lower[j], upper[j]
                ),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lower, upper]` on every axis.
    pub fn cube(dimension: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dimension], vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| lo <= v && v <= hi)
    }

    /// Projects `x` into the box coordinate by coordinate.
    pub fn clamp_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dimension());
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(lo, hi);
        }
    }
}

/// Returns the projection of `x` onto `bounds`.
pub fn clamp_to_bounds(x: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    if x.len() != bounds.dimension() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dimension(),
            got: x.len(),
        });
    }
    let mut out = x.to_vec();
    bounds.clamp_in_place(&mut out);
    Ok(out)
}

/// An objective together with its search box, optional known optimum and
/// an evaluation counter that stays exact under concurrent use.
pub struct ObjectiveHandle {
    objective: Arc<dyn Objective>,
    bounds: Bounds,
    known_optimum: Option<f64>,
    evals: AtomicU64,
}

impl ObjectiveHandle {
    pub fn new(
        objective: Arc<dyn Objective>,
        bounds: Bounds,
        known_optimum: Option<f64>,
    ) -> Result<Self> {
        if objective.dimension() != bounds.dimension() {
            return Err(Error::DimensionMismatch {
                expected: objective.dimension(),
                got: bounds.dimension(),
            });
        }
        Ok(Self {
            objective,
            bounds,
            known_optimum,
            evals: AtomicU64::new(0),
        })
    }

    pub fn name(&self) -> &str {
        self.objective.name()
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn known_optimum(&self) -> Option<f64> {
        self.known_optimum
    }

    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    pub fn reset_eval_count(&self) {
        self.evals.store(0, Ordering::Relaxed);
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        self.evals.fetch_add(1, Ordering::Relaxed);
        self.objective.value(x)
    }

    /// Distance of `score` to the known optimum, or the raw score when none is known.
    pub fn gap(&self, score: f64) -> f64 {
        match self.known_optimum {
            Some(opt) => score - opt,
            None => score,
        }
    }
}

impl fmt::Debug for ObjectiveHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveHandle")
            .field("name", &self.name())
            .field("dimension", &self.dimension())
            .field("known_optimum", &self.known_optimum)
            .field("evals", &self.eval_count())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::Benchmark;
    use std::f64::consts::PI;

    #[test]
    fn evaluate_counts_and_rejects_wrong_length() {
        let h = Benchmark::Ackley.handle(10).unwrap();
        assert!(h.evaluate(&[0.0; 10]).unwrap().abs() < 1e-12);
        assert_eq!(h.eval_count(), 1);
        let err = h.evaluate(&[0.0; 9]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 10,
                got: 9
            }
        );
        assert_eq!(h.eval_count(), 1);

        let g = Benchmark::Griewank.handle(5).unwrap();
        assert_eq!(g.evaluate(&[0.0; 5]).unwrap(), 0.0);
    }

    #[test]
    fn clamp_examples() {
        let b = Bounds::cube(2, -6.0 * PI, 6.0 * PI).unwrap();
        assert_eq!(
            clamp_to_bounds(&[100.0, 0.0], &b).unwrap(),
            vec![6.0 * PI, 0.0]
        );
        assert_eq!(
            clamp_to_bounds(&[-100.0, -100.0], &b).unwrap(),
            vec![-6.0 * PI, -6.0 * PI]
        );
        assert_eq!(clamp_to_bounds(&[1.0, -2.0], &b).unwrap(), vec![1.0, -2.0]);
        assert!(clamp_to_bounds(&[1.0], &b).is_err());
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(Bounds::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
    }

    #[test]
    fn concurrent_evaluations_are_counted_exactly() {
        let h = Benchmark::Rastrigin.handle(3).unwrap();
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| {
                    for _ in 0..250 {
                        h.evaluate(&[0.1, 0.2, 0.3]).unwrap();
                    }
                });
            }
        });
        assert_eq!(h.eval_count(), 1000);
    }

    proptest::proptest! {
        #[test]
        fn clamp_is_idempotent_and_in_bounds(x in proptest::collection::vec(-100.0f64..100.0, 4)) {
            let b = Bounds::new(vec![-1.0, -5.0, 0.0, -60.0], vec![1.0, 5.0, 2.0, 60.0]).unwrap();
            let once = clamp_to_bounds(&x, &b).unwrap();
            let twice = clamp_to_bounds(&once, &b).unwrap();
            proptest::prop_assert_eq!(&once, &twice);
            proptest::prop_assert!(b.contains(&once));
            if b.contains(&x) {
                proptest::prop_assert_eq!(&once, &x);
            }
        }
    }
}
