//! Seeded sampling of bounded plays.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arena::{Arena, Side, VertexId};
use crate::conditions::{ColourSet, Condition};
use crate::error::{Error, Result};
use crate::strategy::{ExecutionState, Strategy};

use super::chain::{check_strategy, check_vertex};

/// Two-sided 99% normal quantile.
const Z99: f64 = 2.575_829_303_548_900_4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Wilson score interval at 99% for `hits` successes out of `n`.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = Z99 * Z99;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z99 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

fn sample_move(
    arena: &Arena,
    strategy: &Strategy,
    v: VertexId,
    state: ExecutionState,
    rng: &mut ChaCha8Rng,
) -> (usize, ExecutionState) {
    let side = strategy.side();
    let seen = strategy.observe_opt(state, arena.vertex_signal(side, v)).sample(rng);
    let a = strategy.action(seen).sample(rng);
    let after = strategy.observe_opt(seen, arena.action_signal(side, a)).sample(rng);
    (a, after)
}

struct Job<'a> {
    arena: &'a Arena,
    eve: &'a Strategy,
    adam: &'a Strategy,
    start: VertexId,
    watched: ColourSet,
    horizon: usize,
}

impl Job<'_> {
    /// `true` if a watched colour shows up among `v0 .. v_horizon`.
    fn play_hits(&self, rng: &mut ChaCha8Rng) -> bool {
        let hit = |v: VertexId| self.arena.colour_of(v).is_some_and(|c| self.watched.contains(c));
        let mut v = self.start;
        let mut e = self.eve.initial_states().sample(rng);
        let mut a = self.adam.initial_states().sample(rng);
        if hit(v) {
            return true;
        }
        for _ in 0..self.horizon {
            let (x, e2) = sample_move(self.arena, self.eve, v, e, rng);
            let (y, a2) = sample_move(self.arena, self.adam, v, a, rng);
            v = self.arena.transition(v, x, y).sample(rng);
            e = e2;
            a = a2;
            if hit(v) {
                return true;
            }
        }
        false
    }

    fn run(&self, seed: u64, stream: u64, n: u64) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        (0..n).filter(|_| self.play_hits(&mut rng)).count() as u64
    }
}

/// Estimates the probability of a Reach or Safety condition over plays of
/// `horizon` steps, on a single worker.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo(
    arena: &Arena,
    eve: &Strategy,
    adam: &Strategy,
    start_vertex: VertexId,
    condition: &Condition,
    horizon: usize,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    monte_carlo_with_workers(arena, eve, adam, start_vertex, condition, horizon, n, seed, 1)
}

/// As [`monte_carlo`], split over `workers` threads. Worker `w` draws from
/// stream `w` of the seeded generator, so the result depends only on
/// `(seed, n, workers)`.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_with_workers(
    arena: &Arena,
    eve: &Strategy,
    adam: &Strategy,
    start_vertex: VertexId,
    condition: &Condition,
    horizon: usize,
    n: u64,
    seed: u64,
    workers: usize,
) -> Result<Estimate> {
    check_strategy(arena, eve, Side::Eve)?;
    check_strategy(arena, adam, Side::Adam)?;
    check_vertex(arena, start_vertex)?;
    if n == 0 {
        return Err(Error::Malformed("sample count must be at least 1".into()));
    }
    let (watched, reach) = match condition {
        Condition::Reach(t) => (*t, true),
        Condition::Safety(b) => (*b, false),
        other => {
            return Err(Error::UnsupportedCondition(format!(
                "{} is not decided by a bounded prefix; use exact evaluation",
                other.name()
            )))
        }
    };
    let job = Job { arena, eve, adam, start: start_vertex, watched, horizon };
    let workers = workers.max(1) as u64;
    let share = |w: u64| n / workers + u64::from(w < n % workers);
    let hits: u64 = if workers == 1 {
        job.run(seed, 0, n)
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let job = &job;
                    scope.spawn(move || job.run(seed, w, share(w)))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).sum()
        })
    };
    let wins = if reach { hits } else { n - hits };
    let (ci_low, ci_high) = wilson_interval(wins, n);
    Ok(Estimate {
        point: wins as f64 / n as f64,
        ci_low,
        ci_high,
        samples: n,
        seed,
    })
}
