//! Griewank, Rastrigin and Ackley test functions.
//!
//! The default [`Form::Published`] variants use a `1/400` Griewank prefactor
//! and a `cos(π x)` Rastrigin term, with the search boxes
//! `[-6π, 6π]` (Griewank, Ackley) and `[-π/2, π/2]` (Rastrigin). The more
//! common `1/4000` and `cos(2π x)` forms are available as [`Form::Literature`].
//! Every variant has its global minimum 0 at the origin.

use std::f64::consts::{E, PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::objective::{Bounds, Objective, ObjectiveHandle};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Benchmark {
    Griewank,
    Rastrigin,
    Ackley,
}

/// Which constants to use for Griewank and Rastrigin. Ackley is the same in both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Form {
    #[default]
    Published,
    Literature,
}

impl Benchmark {
    pub const ALL: [Benchmark; 3] = [Benchmark::Griewank, Benchmark::Rastrigin, Benchmark::Ackley];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Griewank => "griewank",
            Benchmark::Rastrigin => "rastrigin",
            Benchmark::Ackley => "ackley",
        }
    }

    /// Per-coordinate search interval.
    pub fn domain(self) -> (f64, f64) {
        match self {
            Benchmark::Griewank | Benchmark::Ackley => (-6.0 * PI, 6.0 * PI),
            Benchmark::Rastrigin => (-PI / 2.0, PI / 2.0),
        }
    }

    pub fn eval(self, x: &[f64], form: Form) -> f64 {
        match (self, form) {
            (Benchmark::Griewank, Form::Published) => griewank(x),
            (Benchmark::Griewank, Form::Literature) => griewank_with(x, 1.0 / 4000.0),
            (Benchmark::Rastrigin, Form::Published) => rastrigin(x),
            (Benchmark::Rastrigin, Form::Literature) => rastrigin_with(x, TAU),
            (Benchmark::Ackley, _) => ackley(x),
        }
    }

    pub fn objective(self, dimension: usize, form: Form) -> BenchmarkObjective {
        BenchmarkObjective {
            benchmark: self,
            dimension,
            form,
        }
    }

    /// Handle with the default search box and known optimum 0.
    pub fn handle(self, dimension: usize) -> Result<ObjectiveHandle> {
        self.handle_with(dimension, Form::Published)
    }

    pub fn handle_with(self, dimension: usize, form: Form) -> Result<ObjectiveHandle> {
        if dimension == 0 {
            return Err(Error::param("dimension", "must be positive"));
        }
        let (lo, hi) = self.domain();
        ObjectiveHandle::new(
            Arc::new(self.objective(dimension, form)),
            Bounds::cube(dimension, lo, hi)?,
            Some(0.0),
        )
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "griewank" => Ok(Benchmark::Griewank),
            "rastrigin" => Ok(Benchmark::Rastrigin),
            "ackley" => Ok(Benchmark::Ackley),
            other => Err(Error::param(
                "objective",
                format!("unknown benchmark `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BenchmarkObjective {
    benchmark: Benchmark,
    dimension: usize,
    form: Form,
}

impl Objective for BenchmarkObjective {
    fn name(&self) -> &str {
        self.benchmark.name()
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.benchmark.eval(x, self.form))
    }
}

pub fn griewank(x: &[f64]) -> f64 {
    griewank_with(x, 1.0 / 400.0)
}

fn griewank_with(x: &[f64], scale: f64) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for (i, &v) in x.iter().enumerate() {
        sum += v * v;
        prod *= (v / ((i + 1) as f64).sqrt()).cos();
    }
    scale * sum - prod + 1.0
}

pub fn rastrigin(x: &[f64]) -> f64 {
    rastrigin_with(x, PI)
}

fn rastrigin_with(x: &[f64], freq: f64) -> f64 {
    x.iter()
        .map(|&v| 10.0 + v * v - 10.0 * (freq * v).cos())
        .sum()
}

pub fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cs = x.iter().map(|v| (TAU * v).cos()).sum::<f64>() / n;
    -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_optimal() {
        for d in [1, 5, 10, 20, 50] {
            let z = vec![0.0; d];
            for b in Benchmark::ALL {
                assert!(b.eval(&z, Form::Published).abs() < 1e-12, "{b} d={d}");
                assert!(b.eval(&z, Form::Literature).abs() < 1e-12, "{b} d={d}");
            }
        }
    }

    #[test]
    fn scalar_examples() {
        assert!((griewank(&[2.0 * PI]) - PI * PI / 100.0).abs() < 1e-12);
        assert!((rastrigin(&[1.0]) - 21.0).abs() < 1e-12);
        let expected = -20.0 * (-0.1f64).exp() - (-1.0f64).exp() + 20.0 + E;
        assert!((ackley(&[0.5]) - expected).abs() < 1e-12);
        assert!((ackley(&[0.5]) - 4.2537).abs() < 1e-4);
    }

    #[test]
    fn literature_forms_differ() {
        assert!(
            (Benchmark::Griewank.eval(&[2.0 * PI], Form::Literature) - PI * PI / 1000.0).abs()
                < 1e-12
        );
        assert!((Benchmark::Rastrigin.eval(&[0.5], Form::Literature) - 20.25).abs() < 1e-12);
    }

    #[test]
    fn names_round_trip() {
        for b in Benchmark::ALL {
            assert_eq!(b.name().parse::<Benchmark>().unwrap(), b);
        }
        assert!("sphere".parse::<Benchmark>().is_err());
    }

    /// Dense 1-D scan: rastrigin is separable, so non-negativity per coordinate suffices.
    #[test]
    fn rastrigin_grid_minimum() {
        let (lo, hi) = Benchmark::Rastrigin.domain();
        let n = 200_001;
        let (mut best, mut arg) = (f64::INFINITY, 0.0);
        for i in 0..n {
            let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let v = rastrigin(&[x]);
            assert!(v >= 0.0);
            if v < best {
                best = v;
                arg = x;
            }
        }
        assert!(arg.abs() < 1e-4 && best < 1e-6);
    }

    /// Ackley depends on the radius and the cosine sum; along each axis the minimum is the origin.
    #[test]
    fn ackley_and_griewank_axis_scans() {
        for b in [Benchmark::Ackley, Benchmark::Griewank] {
            let (lo, hi) = b.domain();
            for d in 1..=3 {
                for axis in 0..d {
                    let mut x = vec![0.0; d];
                    for i in 0..20_001 {
                        x[axis] = lo + (hi - lo) * i as f64 / 20_000.0;
                        let v = b.eval(&x, Form::Published);
                        assert!(v >= -1e-15, "{b} {x:?} -> {v}");
                        if x[axis].abs() > 1e-3 {
                            assert!(v > 0.0);
                        }
                    }
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn non_negative_on_domain(u in proptest::collection::vec(0.0f64..1.0, 1..6)) {
            for b in Benchmark::ALL {
                let (lo, hi) = b.domain();
                let x: Vec<f64> = u.iter().map(|t| lo + (hi - lo) * t).collect();
                proptest::prop_assert!(b.eval(&x, Form::Published) >= -1e-12);
            }
        }

        #[test]
        fn symmetric(x in proptest::collection::vec(-10.0f64..10.0, 1..8)) {
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            proptest::prop_assert!((griewank(&x) - griewank(&neg)).abs() < 1e-12);
            let mut rev = x.clone();
            rev.reverse();
            proptest::prop_assert!((ackley(&x) - ackley(&rev)).abs() < 1e-12);
            proptest::prop_assert!((rastrigin(&x) - rastrigin(&rev)).abs() < 1e-9);
        }
    }
}
