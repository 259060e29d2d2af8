//! Event-driven engine for drift plus compound Poisson paths. Between jumps
//! X is linear, so reflection, level passage and the running maximum are
//! solved in closed form on each segment.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::tracker::Tracker;
use super::{FunctionalSample, SimConfig};
use crate::model::LevyModel;

/// Stream of `(waiting time, signed jump size)` pairs driving a path.
pub trait EventSource {
    fn next_event(&mut self) -> (f64, f64);
}

/// Poisson epochs with two-sided exponential marks drawn from `rng`.
#[derive(Debug)]
pub struct RandomEvents<R> {
    rng: R,
    total_rate: f64,
    p_up: f64,
    up_decay: f64,
    down_decay: f64,
}

impl<R: Rng> RandomEvents<R> {
    pub fn new(model: &LevyModel, rng: R) -> Self {
        let (up_rate, up_decay) = model.up_jumps().map_or((0.0, 1.0), |j| (j.rate, j.decay));
        let (down_rate, down_decay) = model.down_jumps().map_or((0.0, 1.0), |j| (j.rate, j.decay));
        let total_rate = up_rate + down_rate;
        Self {
            rng,
            total_rate,
            p_up: if total_rate > 0.0 { up_rate / total_rate } else { 0.0 },
            up_decay,
            down_decay,
        }
    }
}

impl<R> RandomEvents<R> {
    pub(crate) fn rng_mut(&mut self) -> &mut R {
        &mut self.rng
    }
}

impl<R: Rng> EventSource for RandomEvents<R> {
    #[inline]
    fn next_event(&mut self) -> (f64, f64) {
        if self.total_rate == 0.0 {
            return (f64::INFINITY, 0.0);
        }
        let wait: f64 = Exp1.sample(&mut self.rng);
        let wait = wait / self.total_rate;
        let e: f64 = Exp1.sample(&mut self.rng);
        let jump = if self.p_up == 1.0 || (self.p_up > 0.0 && self.rng.random::<f64>() < self.p_up) {
            e / self.up_decay
        } else {
            -e / self.down_decay
        };
        (wait, jump)
    }
}

/// Wraps a source and keeps every event it hands out.
#[derive(Debug)]
pub struct RecordedEvents<S> {
    inner: S,
    pub events: Vec<(f64, f64)>,
}

impl<S> RecordedEvents<S> {
    pub fn new(inner: S) -> Self {
        Self { inner, events: Vec::new() }
    }
}

impl<S: EventSource> EventSource for RecordedEvents<S> {
    fn next_event(&mut self) -> (f64, f64) {
        let ev = self.inner.next_event();
        self.events.push(ev);
        ev
    }
}

/// Replays a fixed list, then produces no further jumps.
#[derive(Debug, Clone)]
pub struct ReplayEvents {
    events: Vec<(f64, f64)>,
    pos: usize,
}

impl ReplayEvents {
    pub fn new(events: Vec<(f64, f64)>) -> Self {
        Self { events, pos: 0 }
    }
}

impl EventSource for ReplayEvents {
    fn next_event(&mut self) -> (f64, f64) {
        let ev = self.events.get(self.pos).copied().unwrap_or((f64::INFINITY, 0.0));
        self.pos += 1;
        ev
    }
}

struct Reflected {
    drift: f64,
    s: f64,
    y: f64,
    tr: Tracker,
}

impl Reflected {
    /// Linear evolution on `[s, s2]` with no jump inside.
    #[inline]
    fn drift_to(&mut self, s2: f64) {
        let dt = s2 - self.s;
        let mu = self.drift;
        if mu > 0.0 {
            let y2 = self.y + mu * dt;
            let (s, y) = (self.s, self.y);
            let mut crossed = [None, None];
            for (i, (which, level)) in self.tr.open_levels().enumerate() {
                if y <= level && y2 > level {
                    crossed[i] = Some((which, s + (level - y) / mu));
                }
            }
            for (which, time) in crossed.into_iter().flatten() {
                self.tr.creep(which, time);
            }
            self.tr.observe(s2, y2);
            self.y = y2;
        } else if mu < 0.0 {
            if self.y > 0.0 {
                let hit = self.y / -mu;
                if hit <= dt {
                    self.tr.zero(self.s + hit, s2);
                    self.y = 0.0;
                } else {
                    self.y += mu * dt;
                }
            } else {
                self.tr.zero(self.s, s2);
            }
        } else if self.y == 0.0 {
            self.tr.zero(self.s, s2);
        }
        self.s = s2;
    }

    #[inline]
    fn jump(&mut self, j: f64) {
        if j >= 0.0 {
            self.y += j;
            self.tr.observe(self.s, self.y);
            self.tr.land(self.s, self.y);
        } else {
            self.y += j;
            if self.y <= 0.0 {
                self.y = 0.0;
                self.tr.zero(self.s, self.s);
            }
        }
    }
}

/// Runs one reflected path driven by `events`. The model must have no
/// Brownian part.
pub fn run_reflected<S: EventSource>(
    model: &LevyModel,
    cfg: &SimConfig,
    index: u64,
    events: &mut S,
) -> FunctionalSample {
    debug_assert!(!model.has_diffusion());
    let mut p = Reflected {
        drift: model.drift(),
        s: 0.0,
        y: 0.0,
        tr: Tracker::new(cfg),
    };
    let t = p.tr.t();
    loop {
        let (wait, j) = events.next_event();
        let e = p.s + wait;
        if !p.tr.t_recorded() && t <= e {
            p.drift_to(t);
            let y = p.y;
            p.tr.record_t(y);
        }
        if p.tr.done(p.s) {
            break;
        }
        if e.is_infinite() {
            // No more jumps: only linear motion remains.
            if p.drift > 0.0 {
                let far = p.s + p.tr.open_levels().map(|(_, l)| l).fold(0.0, f64::max) / p.drift + 1.0;
                p.drift_to(far);
            } else if p.drift < 0.0 {
                let hit = p.s + p.y / -p.drift;
                p.drift_to(hit + 1.0);
            }
            break;
        }
        p.drift_to(e);
        if p.tr.done(p.s) {
            break;
        }
        p.jump(j);
    }
    p.tr.finish(index)
}

/// Level passage of X (not reflected) started at 0 over `up` before going
/// below `-down`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exit {
    /// Passage above `up`; the field is the overshoot `X(T) - up`.
    Up(f64),
    Down,
}

/// Two-sided exit of the unreflected path driven by `events`. With
/// `down = inf` this is the one-sided first passage; `max_time` caps it.
pub fn run_exit<S: EventSource>(
    drift: f64,
    up: f64,
    down: f64,
    max_time: f64,
    events: &mut S,
) -> Option<Exit> {
    if up <= 0.0 {
        return Some(Exit::Up(0.0));
    }
    let (mut s, mut x) = (0.0f64, 0.0f64);
    while s < max_time {
        let (wait, j) = events.next_event();
        let x_end = x + drift * wait;
        if drift > 0.0 && x_end > up {
            return Some(Exit::Up(0.0));
        }
        if drift < 0.0 && x_end <= -down {
            return Some(Exit::Down);
        }
        if wait.is_infinite() {
            return None;
        }
        s += wait;
        x = x_end + j;
        if x > up {
            return Some(Exit::Up(x - up));
        }
        if x < -down {
            return Some(Exit::Down);
        }
    }
    None
}

/// `sup_{s <= t} X(s)` of the unreflected path.
pub fn run_supremum<S: EventSource>(drift: f64, t: f64, events: &mut S) -> f64 {
    let (mut s, mut x, mut sup) = (0.0f64, 0.0f64, 0.0f64);
    loop {
        let (wait, j) = events.next_event();
        if s + wait >= t {
            return sup.max(x + drift * (t - s));
        }
        s += wait;
        x += drift * wait;
        sup = sup.max(x);
        x += j;
        sup = sup.max(x);
    }
}
