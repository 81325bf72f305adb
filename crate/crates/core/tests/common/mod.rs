//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use rexq::swarm::{Particle, SwarmState};
use rexq::{QParam, RngStream, StreamId};

/// CDF of the q-Gaussian `[1 + (q-1) x² / (3-q)]^(-1/(q-1))`, normalized by quadrature.
///
/// The density is integrated in `s` with `x = sinh(s)`, which turns the power-law
/// tails into exponentially decaying ones.
pub struct QGaussianCdf {
    s0: f64,
    h: f64,
    table: Vec<f64>,
}

impl QGaussianCdf {
    pub fn new(q: f64) -> Self {
        assert!(q > 1.0 && q < 3.0);
        let density = |x: f64| (1.0 + (q - 1.0) * x * x / (3.0 - q)).powf(-1.0 / (q - 1.0));
        let integrand = |s: f64| density(s.sinh()) * s.cosh();
        let (s0, s1) = (-90.0, 90.0);
        let panels = 36_000;
        let h = (s1 - s0) / panels as f64;
        // Composite Simpson over consecutive panel pairs, then linear interpolation inside a pair.
        let mut table = vec![0.0; panels + 1];
        let mut acc = 0.0;
        for k in (0..panels).step_by(2) {
            let a = s0 + k as f64 * h;
            let (fa, fm, fb) = (integrand(a), integrand(a + h), integrand(a + 2.0 * h));
            let half = h / 12.0 * (5.0 * fa + 8.0 * fm - fb);
            table[k + 1] = acc + half;
            acc += h / 3.0 * (fa + 4.0 * fm + fb);
            table[k + 2] = acc;
        }
        for v in &mut table {
            *v /= acc;
        }
        Self { s0, h, table }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let pos = (x.asinh() - self.s0) / self.h;
        if pos <= 0.0 {
            return 0.0;
        }
        let i = pos.floor() as usize;
        if i + 1 >= self.table.len() {
            return 1.0;
        }
        let frac = pos - i as f64;
        self.table[i] * (1.0 - frac) + self.table[i + 1] * frac
    }
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at the 1 % level.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Γ(k/2) for positive integer k.
fn gamma_half_integer(k: usize) -> f64 {
    let mut g = if k.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut s = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    while s < k as f64 / 2.0 {
        g *= s;
        s += 1.0;
    }
    g
}

/// Regularized lower incomplete gamma P(k/2, x/2) via its power series.
pub fn chi_square_cdf(df: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let a = df as f64 / 2.0;
    let y = x / 2.0;
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut n = 1.0;
    while term > 1e-17 * sum {
        term *= y / (a + n);
        sum += term;
        n += 1.0;
    }
    (a * y.ln() - y).exp() * sum / gamma_half_integer(df)
}

/// Inverts [`chi_square_cdf`] by bisection.
pub fn chi_square_quantile(df: usize, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1000.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_cdf(df, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bond angle from the arccosine of the normalized dot product.
pub fn acos_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u = sub(a, b);
    let v = sub(c, b);
    (dot(u, v) / (norm(u) * norm(v))).clamp(-1.0, 1.0).acos()
}

/// Signed dihedral: angle between the two plane normals, sign from the middle bond.
pub fn acos_dihedral(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> f64 {
    let b1 = sub(b, a);
    let b2 = sub(c, b);
    let b3 = sub(d, c);
    let n1 = cross(b1, b2);
    let n2 = cross(b2, b3);
    let phi = (dot(n1, n2) / (norm(n1) * norm(n2)))
        .clamp(-1.0, 1.0)
        .acos();
    if dot(cross(n1, n2), b2) < 0.0 {
        -phi
    } else {
        phi
    }
}

pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Rotation matrix about a unit axis (Rodrigues).
pub fn rotation(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let n = norm(axis);
    let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

pub fn rotate_flat(coords: &[f64], r: &[[f64; 3]; 3]) -> Vec<f64> {
    coords
        .chunks(3)
        .flat_map(|p| (0..3).map(move |i| r[i][0] * p[0] + r[i][1] * p[1] + r[i][2] * p[2]))
        .collect()
}

pub fn rng(seed: u64) -> RngStream {
    RngStream::from_raw(seed, 0xfeed)
}

/// A swarm whose particles all sit at one point with one score; it never changes unless stepped.
pub fn frozen_swarm(score: f64, marker: f64, q: f64) -> SwarmState {
    let particles = (0..2).map(|_| Particle::at(vec![marker], score)).collect();
    SwarmState::from_particles(particles, QParam::new(q).unwrap()).unwrap()
}

pub fn stream(seed: u64, id: StreamId) -> RngStream {
    RngStream::new(seed, id)
}
