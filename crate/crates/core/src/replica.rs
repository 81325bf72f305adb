//! Replica exchange over a ladder of q values.
//!
//! `M` swarms run at `q_1 = 1 < q_2 < ... < q_M < q_max` (geometric spacing).
//! Each level carries a weight `α_i = 1 / (k q_i)`. Every `exchange_interval`
//! iterations one neighbouring pair `(i, i+1)` is picked uniformly and the two
//! particle configurations are swapped with probability
//! `min(1, exp(-(α_i - α_j)(E_j - E_i)))`, where `E` is the lowest personal
//! best score in the swarm. Configurations carry their scores with them, so
//! nothing is re-evaluated after a swap.

use crate::analysis::OccupancyTable;
use crate::objective::ObjectiveHandle;
use crate::qsampler::{QParam, RngStream, StreamId, StreamRole};
use crate::swarm::{gamma, ScheduleParams, SwarmState};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub q: QParam,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QLadder {
    levels: Vec<Level>,
    k: f64,
    q_max: f64,
}

impl QLadder {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn q(&self, level: usize) -> f64 {
        self.levels[level].q.value()
    }

    pub fn alpha(&self, level: usize) -> f64 {
        self.levels[level].alpha
    }
}

/// Geometric ladder `q_i = q_max^((i-1)/M)` with `α_i = 1/(k q_i)`.
pub fn build_ladder(m: usize, q_max: f64, k: f64) -> Result<QLadder> {
    if m < 2 {
        return Err(Error::param(
            "replicas",
            format!("need at least 2 levels, got {m}"),
        ));
    }
    if !(q_max > 1.0) || !q_max.is_finite() {
        return Err(Error::param("q_max", format!("{q_max} must exceed 1")));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::param("k", format!("{k} must be positive")));
    }
    let levels = (0..m)
        .map(|i| {
            let q = q_max.powf(i as f64 / m as f64);
            Ok(Level {
                q: QParam::new(q)?,
                alpha: 1.0 / (k * q),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QLadder { levels, k, q_max })
}

/// Swap acceptance `min(1, exp(-(α_i - α_j)(E_j - E_i)))`.
pub fn acceptance_probability(alpha_i: f64, alpha_j: f64, e_i: f64, e_j: f64) -> f64 {
    acceptance_from_delta(exchange_delta(alpha_i, alpha_j, e_i, e_j))
}

/// Exponent `(α_i - α_j)(E_j - E_i)` of the swap criterion.
pub fn exchange_delta(alpha_i: f64, alpha_j: f64, e_i: f64, e_j: f64) -> f64 {
    let de = if e_i == e_j { 0.0 } else { e_j - e_i };
    (alpha_i - alpha_j) * de
}

fn acceptance_from_delta(delta: f64) -> f64 {
    if delta.is_nan() {
        0.0
    } else if delta <= 0.0 {
        1.0
    } else {
        (-delta).exp()
    }
}

/// Lowest personal best score of the swarm.
pub fn replica_energy(s: &SwarmState) -> f64 {
    s.particles
        .iter()
        .map(|p| p.best_score)
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeDecision {
    /// Lower and upper level (0-based).
    pub pair: (usize, usize),
    pub delta: f64,
    pub acceptance_prob: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairStats {
    pub attempts: u64,
    pub accepted: u64,
}

impl PairStats {
    pub fn rate(&self) -> Option<f64> {
        (self.attempts > 0).then(|| self.accepted as f64 / self.attempts as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum End {
    Bottom,
    Top,
}

#[derive(Debug, Clone, Default)]
struct TripTracker {
    // (end the current trip started from, time it started)
    start: Option<(End, u64)>,
    last: Option<End>,
    durations: Vec<u64>,
}

impl TripTracker {
    fn observe(&mut self, end: Option<End>, t: u64) {
        let Some(end) = end else { return };
        match (self.start, self.last) {
            (None, _) | (_, None) => {
                self.start = Some((end, t));
                self.last = Some(end);
            }
            (Some((origin, t0)), Some(last)) if end != last => {
                if end == origin {
                    self.durations.push(t - t0);
                    self.start = Some((end, t));
                }
                self.last = Some(end);
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripSummary {
    /// 0-based replica tag.
    pub tag: usize,
    pub count: usize,
    pub mean: Option<f64>,
}

/// The M swarms of a replica-exchange run plus the bookkeeping on top of them.
#[derive(Debug, Clone)]
pub struct ReplicaSet {
    ladder: QLadder,
    swarms: Vec<SwarmState>,
    /// `tags[level]` is the replica currently at `level`.
    tags: Vec<usize>,
    /// `visits[tag][level]`.
    visits: Vec<Vec<u64>>,
    pairs: Vec<PairStats>,
    trips: Vec<TripTracker>,
    recorded: u64,
}

impl ReplicaSet {
    /// Places `swarms[i]` at ladder level `i` with tag `i`; each swarm takes the q of its level.
    pub fn new(ladder: QLadder, mut swarms: Vec<SwarmState>) -> Result<Self> {
        let m = ladder.len();
        if swarms.len() != m {
            return Err(Error::param(
                "replicas",
                format!("{} swarms for a ladder of {m} levels", swarms.len()),
            ));
        }
        for (s, l) in swarms.iter_mut().zip(ladder.levels()) {
            s.q = l.q;
        }
        let mut rs = Self {
            ladder,
            swarms,
            tags: (0..m).collect(),
            visits: vec![vec![0; m]; m],
            pairs: vec![PairStats::default(); m - 1],
            trips: vec![TripTracker::default(); m],
            recorded: 0,
        };
        rs.observe_trips(0);
        Ok(rs)
    }

    pub fn ladder(&self) -> &QLadder {
        &self.ladder
    }

    pub fn len(&self) -> usize {
        self.swarms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swarms.is_empty()
    }

    pub fn swarms(&self) -> &[SwarmState] {
        &self.swarms
    }

    pub fn swarm(&self, level: usize) -> &SwarmState {
        &self.swarms[level]
    }

    pub fn swarm_mut(&mut self, level: usize) -> &mut SwarmState {
        &mut self.swarms[level]
    }

    pub fn tags(&self) -> &[usize] {
        &self.tags
    }

    pub fn pair_stats(&self) -> &[PairStats] {
        &self.pairs
    }

    pub fn recorded(&self) -> u64 {
        self.recorded
    }

    pub fn energy(&self, level: usize) -> f64 {
        replica_energy(&self.swarms[level])
    }

    /// Level holding the lowest energy, ties going to the lower level.
    pub fn best_level(&self) -> usize {
        (0..self.len())
            .min_by(|&a, &b| self.energy(a).total_cmp(&self.energy(b)))
            .unwrap_or(0)
    }

    /// Tries to swap the configurations at `lower` and `lower + 1`.
    pub fn attempt_exchange(
        &mut self,
        lower: usize,
        rng: &mut RngStream,
    ) -> Result<ExchangeDecision> {
        if lower + 1 >= self.len() {
            return Err(Error::param(
                "level",
                format!(
                    "no neighbour pair starting at level {lower} in a ladder of {}",
                    self.len()
                ),
            ));
        }
        let upper = lower + 1;
        let delta = exchange_delta(
            self.ladder.alpha(lower),
            self.ladder.alpha(upper),
            self.energy(lower),
            self.energy(upper),
        );
        let acceptance_prob = acceptance_from_delta(delta);
        let u = rng.uniform();
        let accepted = u < acceptance_prob;
        self.pairs[lower].attempts += 1;
        if accepted {
            self.pairs[lower].accepted += 1;
            self.swap_configurations(lower, upper);
        }
        Ok(ExchangeDecision {
            pair: (lower, upper),
            delta,
            acceptance_prob,
            accepted,
        })
    }

    fn swap_configurations(&mut self, a: usize, b: usize) {
        let (lo, hi) = self.swarms.split_at_mut(b);
        let (x, y) = (&mut lo[a], &mut hi[0]);
        std::mem::swap(&mut x.particles, &mut y.particles);
        std::mem::swap(&mut x.global_best_position, &mut y.global_best_position);
        std::mem::swap(&mut x.global_best_score, &mut y.global_best_score);
        self.tags.swap(a, b);
    }

    /// One attempt on a uniformly chosen neighbour pair.
    pub fn exchange_sweep(&mut self, rng: &mut RngStream) -> ExchangeDecision {
        let lower = rng.index(self.len() - 1);
        self.attempt_exchange(lower, rng)
            .expect("sampled pair is always in range")
    }

    /// Counts one visit for every tag at its current level and advances the round-trip clocks.
    pub fn record_occupancy(&mut self, t: u64) {
        for (level, &tag) in self.tags.iter().enumerate() {
            self.visits[tag][level] += 1;
        }
        self.recorded += 1;
        self.observe_trips(t);
    }

    fn observe_trips(&mut self, t: u64) {
        let top = self.len() - 1;
        for (level, &tag) in self.tags.iter().enumerate() {
            let end = if level == 0 {
                Some(End::Bottom)
            } else if level == top {
                Some(End::Top)
            } else {
                None
            };
            self.trips[tag].observe(end, t);
        }
    }

    pub fn occupancy(&self) -> OccupancyTable {
        OccupancyTable::new(self.visits.clone()).expect("visit matrix is square and consistent")
    }

    /// Completed bottom-top-bottom (or top-bottom-top) trips per tag.
    pub fn round_trip_stats(&self) -> Vec<RoundTripSummary> {
        self.trips
            .iter()
            .enumerate()
            .map(|(tag, tr)| RoundTripSummary {
                tag,
                count: tr.durations.len(),
                mean: (!tr.durations.is_empty())
                    .then(|| tr.durations.iter().sum::<u64>() as f64 / tr.durations.len() as f64),
            })
            .collect()
    }
}

/// Parameters of a replica-exchange run.
#[derive(Debug, Clone, PartialEq)]
pub struct RexParams {
    pub replicas: usize,
    pub q_max: f64,
    pub k: f64,
    pub particles: usize,
    pub schedule: ScheduleParams,
    pub exchange_interval: u64,
    /// Stop once the best gap to the known optimum falls below this; `None` runs the full budget.
    pub tol: Option<f64>,
    pub max_iterations: u64,
    pub seed: u64,
}

impl Default for RexParams {
    fn default() -> Self {
        Self {
            replicas: 5,
            q_max: 3.0,
            k: 0.0005,
            particles: 20,
            schedule: ScheduleParams::default(),
            exchange_interval: 1,
            tol: Some(1e-5),
            max_iterations: 50_000,
            seed: 0,
        }
    }
}

/// Parameters of a single-swarm run at fixed q.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParams {
    pub q: f64,
    pub particles: usize,
    pub schedule: ScheduleParams,
    pub tol: Option<f64>,
    pub max_iterations: u64,
    pub seed: u64,
}

impl Default for SingleParams {
    fn default() -> Self {
        Self {
            q: 1.0,
            particles: 20,
            schedule: ScheduleParams::default(),
            tol: Some(1e-5),
            max_iterations: 50_000,
            seed: 0,
        }
    }
}

/// Per-level time series; entry `t` describes the state after `t` iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrace {
    pub q: f64,
    pub alpha: Option<f64>,
    pub best_score: Vec<f64>,
    pub diversity: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl LevelTrace {
    fn new(q: f64, alpha: Option<f64>) -> Self {
        Self {
            q,
            alpha,
            best_score: Vec::new(),
            diversity: Vec::new(),
            gamma: Vec::new(),
        }
    }

    fn push(&mut self, s: &SwarmState, schedule: &ScheduleParams) {
        self.best_score.push(s.global_best_score);
        self.diversity.push(s.diversity());
        self.gamma.push(gamma(s.iteration, schedule));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub converged: bool,
    pub iterations: u64,
    pub best_score: f64,
    pub best_position: Vec<f64>,
    /// Level holding the best configuration at the end of the run.
    pub best_level: usize,
    pub evaluations: u64,
    pub levels: Vec<LevelTrace>,
    /// Tag × level visit counts; `None` for single-swarm runs.
    pub occupancy: Option<OccupancyTable>,
    /// Indexed by the lower level of each neighbour pair.
    pub exchange: Vec<PairStats>,
    pub round_trips: Vec<RoundTripSummary>,
}

impl RunResult {
    pub fn diversity_traces(&self) -> Vec<Vec<f64>> {
        self.levels.iter().map(|l| l.diversity.clone()).collect()
    }
}

fn converged(obj: &ObjectiveHandle, score: f64, tol: Option<f64>) -> bool {
    tol.is_some_and(|tol| obj.gap(score) < tol)
}

fn validate_common(particles: usize, schedule: &ScheduleParams) -> Result<()> {
    if particles < 2 {
        return Err(Error::param(
            "particles",
            format!("need at least 2, got {particles}"),
        ));
    }
    schedule.validate()
}

/// Runs replica exchange until convergence or the iteration budget.
pub fn run_rex(params: &RexParams, obj: &ObjectiveHandle) -> Result<RunResult> {
    run_rex_observed(params, obj, |_, _| {})
}

/// As [`run_rex`], calling `observer(set, t)` after initialization (`t = 0`) and after each iteration.
pub fn run_rex_observed<F>(
    params: &RexParams,
    obj: &ObjectiveHandle,
    mut observer: F,
) -> Result<RunResult>
where
    F: FnMut(&ReplicaSet, u64),
{
    validate_common(params.particles, &params.schedule)?;
    if params.exchange_interval == 0 {
        return Err(Error::param("exchange_interval", "must be positive"));
    }
    let ladder = build_ladder(params.replicas, params.q_max, params.k)?;
    let evals_before = obj.eval_count();

    let mut swarms = Vec::with_capacity(params.replicas);
    for (i, level) in ladder.levels().iter().enumerate() {
        let mut init = RngStream::new(params.seed, StreamId::new(StreamRole::Init, i as u32));
        swarms.push(SwarmState::initialize(
            obj,
            params.particles,
            level.q,
            &mut init,
        )?);
    }
    let mut dynamics: Vec<RngStream> = (0..params.replicas)
        .map(|i| RngStream::new(params.seed, StreamId::new(StreamRole::Dynamics, i as u32)))
        .collect();
    let mut exchange_rng = RngStream::new(params.seed, StreamId::new(StreamRole::Exchange, 0));

    let mut traces: Vec<LevelTrace> = ladder
        .levels()
        .iter()
        .map(|l| LevelTrace::new(l.q.value(), Some(l.alpha)))
        .collect();
    let mut set = ReplicaSet::new(ladder, swarms)?;
    for (tr, s) in traces.iter_mut().zip(set.swarms()) {
        tr.push(s, &params.schedule);
    }
    observer(&set, 0);

    let mut t = 0;
    let done = loop {
        if converged(obj, set.energy(set.best_level()), params.tol) {
            break true;
        }
        if t >= params.max_iterations {
            break false;
        }
        for (s, rng) in set.swarms.iter_mut().zip(dynamics.iter_mut()) {
            s.step(&params.schedule, obj, rng)?;
        }
        t += 1;
        if t % params.exchange_interval == 0 {
            set.exchange_sweep(&mut exchange_rng);
        }
        set.record_occupancy(t);
        for (tr, s) in traces.iter_mut().zip(set.swarms()) {
            tr.push(s, &params.schedule);
        }
        observer(&set, t);
    };

    let best_level = set.best_level();
    let best = set.swarm(best_level);
    Ok(RunResult {
        converged: done,
        iterations: t,
        best_score: best.global_best_score,
        best_position: best.global_best_position.clone(),
        best_level,
        evaluations: obj.eval_count() - evals_before,
        levels: traces,
        occupancy: Some(set.occupancy()),
        exchange: set.pair_stats().to_vec(),
        round_trips: set.round_trip_stats(),
    })
}

/// Runs one swarm at fixed q (q = 1 gives the Gaussian variant).
pub fn run_single(params: &SingleParams, obj: &ObjectiveHandle) -> Result<RunResult> {
    validate_common(params.particles, &params.schedule)?;
    let q = QParam::new(params.q)?;
    let evals_before = obj.eval_count();
    let mut init = RngStream::new(params.seed, StreamId::new(StreamRole::Init, 0));
    let mut dynamics = RngStream::new(params.seed, StreamId::new(StreamRole::Dynamics, 0));
    let mut swarm = SwarmState::initialize(obj, params.particles, q, &mut init)?;
    let mut trace = LevelTrace::new(q.value(), None);
    trace.push(&swarm, &params.schedule);

    let mut t = 0;
    let done = loop {
        if converged(obj, swarm.global_best_score, params.tol) {
            break true;
        }
        if t >= params.max_iterations {
            break false;
        }
        swarm.step(&params.schedule, obj, &mut dynamics)?;
        t += 1;
        trace.push(&swarm, &params.schedule);
    };

    Ok(RunResult {
        converged: done,
        iterations: t,
        best_score: swarm.global_best_score,
        best_position: swarm.global_best_position,
        best_level: 0,
        evaluations: obj.eval_count() - evals_before,
        levels: vec![trace],
        occupancy: None,
        exchange: Vec::new(),
        round_trips: Vec::new(),
    })
}
