//! Single-swarm q-Gaussian quantum particle kernel.
//!
//! One iteration is synchronous: the mean best position and the global best
//! are frozen at the start of the sweep, every particle moves to
//!
//! ```text
//! x_j <- p_j ± γ_t |mbest_j - x_j| |F_q|
//! ```
//!
//! (sign chosen by an independent fair coin `z`), is clamped into the search
//! box and evaluated, and the global best is merged once all particles have
//! moved. `p_j` is a uniform convex combination of the particle's personal
//! best and the global best, and `γ_t = 1 + g |A sin(ω t)|`.

use crate::objective::ObjectiveHandle;
use crate::qsampler::{QGaussian, QParam, RngStream};
use crate::{Bounds, Error, Result};

/// Upper limit on the contraction coefficient γ.
pub const GAMMA_LIMIT: f64 = 1.7;

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_score: f64,
}

impl Particle {
    /// A particle whose personal best is its current position.
    pub fn at(position: Vec<f64>, score: f64) -> Self {
        Self {
            best_position: position.clone(),
            position,
            best_score: score,
        }
    }
}

/// Parameters of the sinusoidal contraction schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams {
    pub g: f64,
    pub amplitude: f64,
    pub omega: f64,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            g: 0.5,
            amplitude: 0.5,
            omega: 0.1,
        }
    }
}

impl ScheduleParams {
    pub fn new(g: f64, amplitude: f64, omega: f64) -> Result<Self> {
        let p = Self {
            g,
            amplitude,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.amplitude.is_finite() && self.omega.is_finite()) {
            return Err(Error::param("schedule", "non-finite parameter"));
        }
        if self.g < 0.0 {
            return Err(Error::param("g", format!("{} is negative", self.g)));
        }
        let peak = 1.0 + self.g * self.amplitude.abs();
        if peak >= GAMMA_LIMIT {
            return Err(Error::param(
                "amplitude",
                format!("1 + g|A| = {peak} must stay below {GAMMA_LIMIT}"),
            ));
        }
        Ok(())
    }
}

/// Contraction coefficient `1 + g |A sin(ω t)|` at iteration `t`.
pub fn gamma(t: u64, p: &ScheduleParams) -> f64 {
    1.0 + p.g * (p.amplitude * (p.omega * t as f64).sin()).abs()
}

/// State of one swarm at one q level.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub global_best_position: Vec<f64>,
    pub global_best_score: f64,
    pub q: QParam,
    pub iteration: u64,
}

impl SwarmState {
    /// Builds a swarm from explicit particles; the global best is taken from them.
    pub fn from_particles(particles: Vec<Particle>, q: QParam) -> Result<Self> {
        if particles.len() < 2 {
            return Err(Error::param(
                "particles",
                format!(
                    "a swarm needs at least 2 particles, got {}",
                    particles.len()
                ),
            ));
        }
        let d = particles[0].position.len();
        if let Some(p) = particles
            .iter()
            .find(|p| p.position.len() != d || p.best_position.len() != d)
        {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.position.len().min(p.best_position.len()),
            });
        }
        let mut s = Self {
            global_best_position: particles[0].best_position.clone(),
            global_best_score: particles[0].best_score,
            particles,
            q,
            iteration: 0,
        };
        s.merge_global_best();
        Ok(s)
    }

    /// Positions uniform in the objective's bounds; personal best = initial position.
    pub fn initialize(
        obj: &ObjectiveHandle,
        n: usize,
        q: QParam,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let bounds = obj.bounds();
        let mut particles = Vec::with_capacity(n);
        for _ in 0..n {
            let x: Vec<f64> = bounds
                .lower()
                .iter()
                .zip(bounds.upper())
                .map(|(&lo, &hi)| rng.uniform_in(lo, hi))
                .collect();
            let score = obj.evaluate(&x)?;
            particles.push(Particle::at(x, score));
        }
        Self::from_particles(particles, q)
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.global_best_position.len()
    }

    /// Component-wise mean of the personal best positions.
    pub fn mbest(&self) -> Vec<f64> {
        compute_mbest(&self.particles)
    }

    pub fn diversity(&self) -> f64 {
        diversity(&self.particles)
    }

    /// Adopts the best personal best if it improves the global best.
    fn merge_global_best(&mut self) {
        let best = self
            .particles
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.best_score.is_nan())
            .min_by(|a, b| a.1.best_score.total_cmp(&b.1.best_score));
        if let Some((i, p)) = best {
            if p.best_score < self.global_best_score || self.global_best_score.is_nan() {
                self.global_best_score = p.best_score;
                self.global_best_position
                    .clone_from(&self.particles[i].best_position);
            }
        }
    }

    /// One synchronous iteration. Performs exactly `len()` evaluations.
    pub fn step(
        &mut self,
        schedule: &ScheduleParams,
        obj: &ObjectiveHandle,
        rng: &mut RngStream,
    ) -> Result<()> {
        let g = gamma(self.iteration, schedule);
        let mbest = self.mbest();
        let sampler = QGaussian::new(self.q);
        let bounds = obj.bounds();
        for particle in &mut self.particles {
            update_particle(
                particle,
                &mbest,
                &self.global_best_position,
                g,
                &sampler,
                bounds,
                rng,
            );
            let score = obj.evaluate(&particle.position)?;
            if score < particle.best_score {
                particle.best_score = score;
                particle.best_position.clone_from(&particle.position);
            }
        }
        self.merge_global_best();
        self.iteration += 1;
        Ok(())
    }
}

/// Component-wise mean of the particles' personal best positions.
pub fn compute_mbest(particles: &[Particle]) -> Vec<f64> {
    let Some(first) = particles.first() else {
        return Vec::new();
    };
    let mut m = vec![0.0; first.best_position.len()];
    for p in particles {
        for (acc, &v) in m.iter_mut().zip(&p.best_position) {
            *acc += v;
        }
    }
    let n = particles.len() as f64;
    m.iter_mut().for_each(|v| *v /= n);
    m
}

/// Mean Euclidean distance of the personal bests from their mean.
pub fn diversity(particles: &[Particle]) -> f64 {
    if particles.is_empty() {
        return 0.0;
    }
    let m = compute_mbest(particles);
    let total: f64 = particles
        .iter()
        .map(|p| {
            p.best_position
                .iter()
                .zip(&m)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .sum();
    total / particles.len() as f64
}

/// `phi * personal + (1 - phi) * global` for one coordinate.
#[inline]
pub fn blend(personal: f64, global: f64, phi: f64) -> f64 {
    phi * personal + (1.0 - phi) * global
}

/// Local attractor of a particle with a fresh `phi` per coordinate.
pub fn local_attractor(particle: &Particle, global_best: &[f64], rng: &mut RngStream) -> Vec<f64> {
    particle
        .best_position
        .iter()
        .zip(global_best)
        .map(|(&pb, &gb)| blend(pb, gb, rng.uniform()))
        .collect()
}

/// One coordinate of the position update: `attractor ± gamma |mbest - x| magnitude`,
/// with `+` when `z >= 0.5`.
#[inline]
pub fn displace(attractor: f64, mbest: f64, x: f64, gamma: f64, magnitude: f64, z: f64) -> f64 {
    let step = gamma * (mbest - x).abs() * magnitude;
    if z >= 0.5 {
        attractor + step
    } else {
        attractor - step
    }
}

/// Moves `particle.position` in place and returns a view of it.
///
/// Per coordinate the draws are `phi`, `z`, then the two uniforms of the
/// q-Gaussian deviate, all from `rng`.
pub fn update_particle<'a>(
    particle: &'a mut Particle,
    mbest: &[f64],
    global_best: &[f64],
    gamma: f64,
    sampler: &QGaussian,
    bounds: &Bounds,
    rng: &mut RngStream,
) -> &'a [f64] {
    for j in 0..particle.position.len() {
        let p = blend(particle.best_position[j], global_best[j], rng.uniform());
        let z = rng.uniform();
        let f = sampler.sample(rng).abs();
        particle.position[j] = displace(p, mbest[j], particle.position[j], gamma, f, z);
    }
    bounds.clamp_in_place(&mut particle.position);
    &particle.position
}
