//! Random streams and q-Gaussian deviates.
//!
//! Deviates for the displacement term are drawn with the generalized
//! Box–Müller transform: for uniforms `u1, u2` on `(0, 1)`,
//! `sqrt(-2 ln_{q'}(u1)) cos(2π u2)` with `q' = (1 + q) / (3 - q)` follows the
//! standard q-Gaussian with density proportional to
//! `(1 + (q - 1) x² / (3 - q))^(1 / (1 - q))`. At `q = 1` it is the ordinary
//! Box–Müller transform.

use std::f64::consts::TAU;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// What a stream is used for. Each (role, index) pair gets its own stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    /// Initial particle positions of one replica.
    Init = 0,
    /// Swarm dynamics of one replica.
    Dynamics = 1,
    /// The exchange controller.
    Exchange = 2,
}

/// Identifier of an independent stream derived from a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId(u64);

impl StreamId {
    pub const fn new(role: StreamRole, index: u32) -> Self {
        StreamId(((index as u64) << 2) | role as u64)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }
}

/// A seeded ChaCha8 stream. The same `(seed, stream_id)` always yields the same sequence.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: StreamId) -> Self {
        Self::from_raw(seed, stream_id.raw())
    }

    pub fn from_raw(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn open_uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    /// Uniform on `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

/// Tsallis index of the displacement distribution, `1 <= q < 3`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QParam(f64);

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if !(1.0..3.0).contains(&q) {
            return Err(Error::param("q", format!("{q} is outside [1, 3)")));
        }
        Ok(QParam(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Index of the q-logarithm used in the generalized Box–Müller transform.
    pub fn box_muller_index(self) -> f64 {
        (1.0 + self.0) / (3.0 - self.0)
    }
}

/// Tsallis q-logarithm, `(x^(1-q) - 1) / (1 - q)`, with `ln x` at `q = 1`.
pub fn ln_q(x: f64, q: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            function: "ln_q",
            value: x,
        });
    }
    Ok(ln_q_unchecked(x, q))
}

#[inline]
fn ln_q_unchecked(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x.ln()
    } else {
        let a = 1.0 - q;
        (a * x.ln()).exp_m1() / a
    }
}

/// Precomputed generalized Box–Müller sampler for one q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGaussian {
    q: QParam,
    q_prime: f64,
}

impl QGaussian {
    pub fn new(q: QParam) -> Self {
        Self {
            q,
            q_prime: q.box_muller_index(),
        }
    }

    pub fn q(&self) -> QParam {
        self.q
    }

    /// Maps two uniforms (`u1` in `(0, 1]`) to one deviate.
    #[inline]
    pub fn transform(&self, u1: f64, u2: f64) -> f64 {
        (-2.0 * ln_q_unchecked(u1, self.q_prime)).sqrt() * (TAU * u2).cos()
    }

    #[inline]
    pub fn sample(&self, s: &mut RngStream) -> f64 {
        let u1 = s.open_uniform();
        let u2 = s.uniform();
        self.transform(u1, u2)
    }
}

/// Draws one q-Gaussian deviate (standard Gaussian at `q = 1`).
pub fn sample_q_gaussian(s: &mut RngStream, q: QParam) -> f64 {
    QGaussian::new(q).sample(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_q_examples() {
        for q in [1.0, 1.5, 2.0, 2.9] {
            assert_eq!(ln_q(1.0, q).unwrap(), 0.0);
        }
        assert!((ln_q(std::f64::consts::E, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((ln_q(2.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(ln_q(0.0, 1.5), Err(Error::Domain { .. })));
        assert!(ln_q(-1.0, 1.0).is_err());
    }

    #[test]
    fn ln_q_is_continuous_at_one() {
        let x = 0.3;
        let near = ln_q(x, 1.0 + 1e-9).unwrap();
        assert!((near - x.ln()).abs() < 1e-8);
    }

    #[test]
    fn qparam_range() {
        assert!(QParam::new(1.0).is_ok());
        assert!(QParam::new(2.999).is_ok());
        assert!(QParam::new(3.0).is_err());
        assert!(QParam::new(0.99).is_err());
        assert!(QParam::new(f64::NAN).is_err());
        assert_eq!(QParam::new(1.0).unwrap().box_muller_index(), 1.0);
    }

    #[test]
    fn streams_replay_and_differ() {
        let id = StreamId::new(StreamRole::Dynamics, 3);
        let mut a = RngStream::new(42, id);
        let mut b = RngStream::new(42, id);
        let xs: Vec<f64> = (0..100).map(|_| a.uniform()).collect();
        let ys: Vec<f64> = (0..100).map(|_| b.uniform()).collect();
        assert_eq!(xs, ys);
        let mut c = RngStream::new(42, StreamId::new(StreamRole::Init, 3));
        let zs: Vec<f64> = (0..100).map(|_| c.uniform()).collect();
        assert_ne!(xs, zs);
    }

    #[test]
    fn stream_ids_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for role in [StreamRole::Init, StreamRole::Dynamics, StreamRole::Exchange] {
            for i in 0..64 {
                assert!(seen.insert(StreamId::new(role, i)));
            }
        }
    }

    #[test]
    fn uniform_mean() {
        let mut s = RngStream::new(7, StreamId::new(StreamRole::Dynamics, 0));
        let n = 100_000;
        let mean = (0..n).map(|_| s.uniform()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn gaussian_moments_at_q_one() {
        let mut s = RngStream::new(11, StreamId::new(StreamRole::Dynamics, 0));
        let q = QParam::new(1.0).unwrap();
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_q_gaussian(&mut s, q)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }
}
