use super::{d1, Evolver};
use crate::error::Result;
use num_complex::Complex64;

type C = Complex64;

/// Hook called by [`Evolver::run`].
pub trait Observer {
    fn start(&mut self, _ev: &Evolver<'_>) -> Result<()> {
        Ok(())
    }
    fn observe(&mut self, ev: &Evolver<'_>) -> Result<()>;
}

/// Section coefficient data of one wave on a `{t = const}` slice.
#[derive(Debug, Clone)]
pub struct FlatWave {
    pub f: Vec<C>,
    pub f_t: Vec<C>,
    pub f_s: Vec<C>,
}

/// All waves (and `γ`, when linked) at one step time.
#[derive(Debug, Clone)]
pub struct FlatSnapshot {
    pub t: f64,
    pub waves: Vec<FlatWave>,
    pub gamma: Option<Vec<C>>,
}

impl FlatSnapshot {
    pub fn take(ev: &Evolver<'_>, deriv_order: u32) -> Self {
        let table = ev.table;
        let h = table.grid.h;
        let waves = ev
            .waves
            .iter()
            .map(|w| {
                let mut f = Vec::with_capacity(w.u.len());
                let mut f_t = Vec::with_capacity(w.u.len());
                let mut f_s = Vec::with_capacity(w.u.len());
                for (j, p) in table.points.iter().enumerate() {
                    let us = d1(&w.u, j, h, deriv_order);
                    f.push(w.u[j] / p.r);
                    f_t.push(w.v[j] / p.r);
                    f_s.push(us / p.r - w.u[j] * (p.a / (p.r * p.r)));
                }
                FlatWave { f, f_t, f_s }
            })
            .collect();
        Self { t: ev.t, waves, gamma: ev.gamma.as_ref().map(|g| g.g.clone()) }
    }
}

/// Records flat snapshots at the steps nearest to the requested times.
pub struct SnapshotRecorder {
    times: Vec<f64>,
    taken: Vec<bool>,
    tolerance: f64,
    deriv_order: u32,
    snaps: Vec<FlatSnapshot>,
}

impl SnapshotRecorder {
    pub fn new(times: Vec<f64>, dt: f64, deriv_order: u32) -> Self {
        let taken = vec![false; times.len()];
        Self { times, taken, tolerance: 0.5 * dt.abs() * (1.0 + 1e-9), deriv_order, snaps: Vec::new() }
    }

    fn grab(&mut self, ev: &Evolver<'_>) {
        for i in 0..self.times.len() {
            if !self.taken[i] && (self.times[i] - ev.t).abs() <= self.tolerance {
                self.taken[i] = true;
                self.snaps.push(FlatSnapshot::take(ev, self.deriv_order));
                break;
            }
        }
    }

    pub fn into_snapshots(mut self) -> Vec<FlatSnapshot> {
        self.snaps.sort_by(|a, b| a.t.total_cmp(&b.t));
        self.snaps
    }
}

impl Observer for SnapshotRecorder {
    fn start(&mut self, ev: &Evolver<'_>) -> Result<()> {
        self.grab(ev);
        Ok(())
    }
    fn observe(&mut self, ev: &Evolver<'_>) -> Result<()> {
        self.grab(ev);
        Ok(())
    }
}

/// Section data at one node of a curved slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint {
    pub node: usize,
    pub t: f64,
    pub f: C,
    pub f_t: C,
    pub f_s: C,
}

struct Target {
    slice: usize,
    slot: usize,
    node: usize,
    t: f64,
}

/// Samples one wave along slices `t = t_j` at prescribed nodes, using cubic
/// Hermite interpolation in time between consecutive steps.
pub struct SliceCapture {
    wave: usize,
    deriv_order: u32,
    targets: Vec<Target>,
    done: Vec<bool>,
    pub slices: Vec<Vec<Option<SlicePoint>>>,
}

fn hermite(theta: f64, dt: f64, y0: C, m0: C, y1: C, m1: C) -> C {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0) + m0 * ((t3 - 2.0 * t2 + theta) * dt) + y1 * (3.0 * t2 - 2.0 * t3) + m1 * ((t3 - t2) * dt)
}

impl SliceCapture {
    /// `slices[i]` lists `(node, t)` pairs for slice `i`.
    pub fn new(wave: usize, deriv_order: u32, slices: &[Vec<(usize, f64)>]) -> Self {
        let mut targets = Vec::new();
        let mut out = Vec::with_capacity(slices.len());
        for (i, s) in slices.iter().enumerate() {
            for (slot, &(node, t)) in s.iter().enumerate() {
                targets.push(Target { slice: i, slot, node, t });
            }
            out.push(vec![None; s.len()]);
        }
        targets.sort_by(|a, b| a.t.total_cmp(&b.t));
        let done = vec![false; targets.len()];
        Self { wave, deriv_order, targets, done, slices: out }
    }

    pub fn is_complete(&self) -> bool {
        self.done.iter().all(|d| *d)
    }

    fn record(&mut self, idx: usize, p: SlicePoint) {
        if !self.done[idx] {
            self.done[idx] = true;
            let t = &self.targets[idx];
            self.slices[t.slice][t.slot] = Some(p);
        }
    }
}

impl Observer for SliceCapture {
    fn start(&mut self, ev: &Evolver<'_>) -> Result<()> {
        let w = &ev.waves[self.wave];
        let h = ev.table.grid.h;
        let lo = self.targets.partition_point(|t| t.t < ev.t - 1e-12);
        let hi = self.targets.partition_point(|t| t.t <= ev.t + 1e-12);
        for idx in lo..hi {
            let j = self.targets[idx].node;
            let p = ev.table.points[j];
            let us = d1(&w.u, j, h, self.deriv_order);
            self.record(
                idx,
                SlicePoint {
                    node: j,
                    t: ev.t,
                    f: w.u[j] / p.r,
                    f_t: w.v[j] / p.r,
                    f_s: us / p.r - w.u[j] * (p.a / (p.r * p.r)),
                },
            );
        }
        Ok(())
    }

    fn observe(&mut self, ev: &Evolver<'_>) -> Result<()> {
        let (t0, t1) = (ev.prev_t, ev.t);
        let (lo_t, hi_t) = if t1 > t0 { (t0, t1) } else { (t1, t0) };
        let lo = self.targets.partition_point(|t| t.t < lo_t);
        let hi = self.targets.partition_point(|t| t.t <= hi_t);
        if lo >= hi {
            return Ok(());
        }
        let w = &ev.waves[self.wave];
        let h = ev.table.grid.h;
        let k = self.wave;
        let dt = t1 - t0;
        for idx in lo..hi {
            if self.done[idx] {
                continue;
            }
            let j = self.targets[idx].node;
            let theta = (self.targets[idx].t - t0) / dt;
            let p = ev.table.points[j];
            let u = hermite(theta, dt, w.prev_u()[j], w.prev_v()[j], w.u[j], w.v[j]);
            let v = hermite(
                theta,
                dt,
                w.prev_v()[j],
                ev.laplacian_at(k, w.prev_u(), j),
                w.v[j],
                ev.laplacian_at(k, &w.u, j),
            );
            let us = hermite(
                theta,
                dt,
                d1(w.prev_u(), j, h, self.deriv_order),
                d1(w.prev_v(), j, h, self.deriv_order),
                d1(&w.u, j, h, self.deriv_order),
                d1(&w.v, j, h, self.deriv_order),
            );
            self.record(
                idx,
                SlicePoint {
                    node: j,
                    t: self.targets[idx].t,
                    f: u / p.r,
                    f_t: v / p.r,
                    f_s: us / p.r - u * (p.a / (p.r * p.r)),
                },
            );
        }
        Ok(())
    }
}
