//! Grid engine for models with a Brownian part. Gaussian increments on a
//! fixed step, jumps at their exact Poisson epochs. Passage times carry the
//! usual O(sqrt(step)) bias; crossings between grid points are missed.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::exact::{EventSource, Exit, RandomEvents};
use super::tracker::Tracker;
use super::{FunctionalSample, SimConfig};
use crate::model::LevyModel;

struct Grid<R> {
    drift: f64,
    sigma: f64,
    step: f64,
    jumps: RandomEvents<R>,
    next_jump: f64,
    pending: f64,
}

impl<R: Rng> Grid<R> {
    fn new(model: &LevyModel, step: f64, rng: R) -> Self {
        let mut jumps = RandomEvents::new(model, rng);
        let (wait, j) = jumps.next_event();
        Self {
            drift: model.drift(),
            sigma: model.sigma(),
            step,
            jumps,
            next_jump: wait,
            pending: j,
        }
    }

    /// Continuous increment over `dt`.
    #[inline]
    fn increment(&mut self, dt: f64) -> f64 {
        let n: f64 = StandardNormal.sample(self.jumps.rng_mut());
        self.drift * dt + self.sigma * dt.sqrt() * n
    }

    /// Jump at `now` if one is due, scheduling the next.
    #[inline]
    fn take_jump(&mut self, now: f64) -> Option<f64> {
        if now < self.next_jump {
            return None;
        }
        let j = self.pending;
        let (wait, next) = self.jumps.next_event();
        self.next_jump = now + wait;
        self.pending = next;
        Some(j)
    }
}

pub(crate) fn run_reflected<R: Rng>(
    model: &LevyModel,
    cfg: &SimConfig,
    index: u64,
    rng: R,
) -> FunctionalSample {
    let mut g = Grid::new(model, cfg.step, rng);
    let mut tr = Tracker::new(cfg);
    let t = cfg.t;
    let (mut s, mut y) = (0.0f64, 0.0f64);
    loop {
        let mut target = (s + g.step).min(g.next_jump);
        if !tr.t_recorded() && t < target {
            target = t;
        }
        let dt = target - s;
        if dt > 0.0 {
            y += g.increment(dt);
            if y <= 0.0 {
                y = 0.0;
                tr.zero(target, target);
            }
            let mut crossed = [None, None];
            for (i, (which, level)) in tr.open_levels().enumerate() {
                if y > level {
                    crossed[i] = Some(which);
                }
            }
            for which in crossed.into_iter().flatten() {
                tr.creep(which, target);
            }
            tr.observe(target, y);
        }
        s = target;
        if !tr.t_recorded() && s >= t {
            tr.record_t(y);
        }
        if let Some(j) = g.take_jump(s) {
            y = (y + j).max(0.0);
            if y == 0.0 {
                tr.zero(s, s);
            }
            tr.observe(s, y);
            tr.land(s, y);
        }
        if tr.done(s) {
            break;
        }
    }
    tr.finish(index)
}

pub(crate) fn run_exit<R: Rng>(
    model: &LevyModel,
    step: f64,
    up: f64,
    down: f64,
    max_time: f64,
    rng: R,
) -> Option<Exit> {
    if up <= 0.0 {
        return Some(Exit::Up(0.0));
    }
    let mut g = Grid::new(model, step, rng);
    let (mut s, mut x) = (0.0f64, 0.0f64);
    while s < max_time {
        let target = (s + g.step).min(g.next_jump);
        x += g.increment(target - s);
        s = target;
        if x > up {
            return Some(Exit::Up(0.0));
        }
        if x < -down {
            return Some(Exit::Down);
        }
        if let Some(j) = g.take_jump(s) {
            x += j;
            if x > up {
                return Some(Exit::Up(x - up));
            }
            if x < -down {
                return Some(Exit::Down);
            }
        }
    }
    None
}

pub(crate) fn run_supremum<R: Rng>(model: &LevyModel, step: f64, t: f64, rng: R) -> f64 {
    let mut g = Grid::new(model, step, rng);
    let (mut s, mut x, mut sup) = (0.0f64, 0.0f64, 0.0f64);
    while s < t {
        let target = (s + g.step).min(g.next_jump).min(t);
        x += g.increment(target - s);
        s = target;
        sup = sup.max(x);
        if s < t {
            if let Some(j) = g.take_jump(s) {
                x += j;
                sup = sup.max(x);
            }
        }
    }
    sup
}
