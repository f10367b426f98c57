use serde::Serialize;

use super::{SimplexPoint, Triple, SUM_TOL};
use crate::channel::SuperOperator;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::serde_util;
use crate::spectral::{ep_locate_1d, eigenvalues, phase_of, DepressedCubic, EPRecord, EpOptions, Phase};

/// Sweep of coordinate `index` over `n` equispaced values in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceRow {
    pub point: SimplexPoint,
    /// Value of the swept coordinate.
    pub parameter: f64,
    /// Branch-tracked: column `k` follows one continuous eigenvalue curve.
    #[serde(serialize_with = "serde_util::complex_array")]
    pub eigenvalues: [C64; 3],
    pub phase: Phase,
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceTable {
    pub fixed: (usize, f64),
    pub sweep: Sweep,
    pub rows: Vec<SliceRow>,
    /// Eigenvalue coalescences found along the slice, ordered by parameter.
    pub coalescences: Vec<EPRecord>,
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Reorders `ev` to best continue the curves through `prev` (and `prev2`,
/// used for a linear prediction when available).
fn track(ev: [C64; 3], prev: &[C64; 3], prev2: Option<&[C64; 3]>) -> [C64; 3] {
    let guess: [C64; 3] = match prev2 {
        Some(p2) => std::array::from_fn(|k| prev[k] * 2.0 - p2[k]),
        None => *prev,
    };
    let cost = |p: &[usize; 3]| -> f64 { (0..3).map(|k| (ev[p[k]] - guess[k]).norm_sqr()).sum() };
    let best = PERMS
        .iter()
        .min_by(|a, b| cost(a).total_cmp(&cost(b)))
        .unwrap();
    best.map(|i| ev[i])
}

fn min_gap(ev: &[C64; 3]) -> f64 {
    let mut g = f64::INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            g = g.min((ev[i] - ev[j]).norm());
        }
    }
    g
}

/// A point of `(lo, hi)` whose phase differs from the (shared) phase of the
/// ends, found by pushing the discriminant towards the other sign. Catches
/// pockets narrower than the sweep grid.
fn hidden_pocket<F>(family: &F, lo: f64, hi: f64, broken_ends: bool, class_tol: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> nalgebra::Matrix3<f64>,
{
    const SAMPLES: usize = 65;
    let sign = if broken_ends { 1.0 } else { -1.0 };
    let score = |t: f64| sign * DepressedCubic::of(&family(t)).discriminant();
    let dt = (hi - lo) / (SAMPLES - 1) as f64;
    let best = (0..SAMPLES)
        .map(|k| lo + dt * k as f64)
        .max_by(|x, y| score(*x).total_cmp(&score(*y)))
        .unwrap();
    let (mut a, mut b) = ((best - dt).max(lo), (best + dt).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..120 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if score(x1) >= score(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let t = 0.5 * (a + b);
    let broken = phase_of(&family(t), class_tol)? == Phase::KBroken;
    Ok((broken != broken_ends && t > lo && t < hi).then_some(t))
}

/// Eigenvalue curves of `E(a)` along a line of the simplex, holding coordinate
/// `fixed.0` at `fixed.1` and sweeping `sweep.index`; the third coordinate
/// absorbs the remainder.
///
/// Coalescences are located with [`ep_locate_1d`] on every grid interval where
/// the phase flips, and around every grid-local minimum of the smallest
/// eigenvalue gap. Around a gap minimum whose neighbours share a phase, a
/// pocket of the other phase is looked for first and, if present, both of its
/// edges are located.
pub fn slice_sweep(channels: &[SuperOperator; 3], fixed: (usize, f64), sweep: Sweep) -> Result<SliceTable> {
    let (fi, fv) = fixed;
    if fi > 2 || sweep.index > 2 || fi == sweep.index {
        return Err(Error::InvalidArgument(format!(
            "fixed and swept coordinates must be distinct indices in 0..3 (got {fi} and {})",
            sweep.index
        )));
    }
    if sweep.n < 2 || !(sweep.lo < sweep.hi) {
        return Err(Error::InvalidArgument("sweep needs n ≥ 2 and lo < hi".into()));
    }
    let rest = 3 - fi - sweep.index;
    let coords = |t: f64| -> [f64; 3] {
        let mut a = [0.0; 3];
        a[fi] = fv;
        a[sweep.index] = t;
        a[rest] = 1.0 - fv - t;
        a
    };
    for t in [sweep.lo, sweep.hi] {
        let a = coords(t);
        if a.iter().any(|&x| !(-SUM_TOL..=1.0 + SUM_TOL).contains(&x)) {
            return Err(Error::OutsideSimplex(a.to_vec()));
        }
    }
    let triple = Triple::new(channels)?;
    let family = |t: f64| triple.at(&coords(t));

    let step = (sweep.hi - sweep.lo) / (sweep.n - 1) as f64;
    let params: Vec<f64> = (0..sweep.n)
        .map(|k| if k + 1 == sweep.n { sweep.hi } else { sweep.lo + step * k as f64 })
        .collect();
    let mut rows: Vec<SliceRow> = Vec::with_capacity(sweep.n);
    let mut gaps = Vec::with_capacity(sweep.n);
    for &t in &params {
        let e = family(t);
        let raw = eigenvalues(&e)?;
        gaps.push(min_gap(&raw));
        let ev = match rows.len() {
            0 => raw,
            1 => track(raw, &rows[0].eigenvalues, None),
            m => track(raw, &rows[m - 1].eigenvalues, Some(&rows[m - 2].eigenvalues)),
        };
        rows.push(SliceRow {
            point: SimplexPoint { a: coords(t) },
            parameter: t,
            eigenvalues: ev,
            phase: phase_of(&e, EpOptions::default().class_tol)?,
        });
    }

    let opts = EpOptions::default();
    let mut brackets = Vec::new();
    for k in 0..sweep.n - 1 {
        let broken = |r: &SliceRow| r.phase == Phase::KBroken;
        if broken(&rows[k]) != broken(&rows[k + 1]) {
            brackets.push((params[k], params[k + 1]));
        }
    }
    for k in 0..sweep.n {
        let left = k == 0 || gaps[k] <= gaps[k - 1];
        let right = k + 1 == sweep.n || gaps[k] <= gaps[k + 1];
        if left && right {
            let (i, j) = (k.saturating_sub(1), (k + 1).min(sweep.n - 1));
            let (lo, hi) = (params[i], params[j]);
            let broken_ends = rows[i].phase == Phase::KBroken;
            if broken_ends == (rows[j].phase == Phase::KBroken) {
                if let Some(mid) = hidden_pocket(&family, lo, hi, broken_ends, opts.class_tol)? {
                    brackets.push((lo, mid));
                    brackets.push((mid, hi));
                    continue;
                }
            }
            brackets.push((lo, hi));
        }
    }

    let mut found: Vec<EPRecord> = Vec::new();
    for (lo, hi) in brackets {
        match ep_locate_1d(family, lo, hi, &opts) {
            Ok(mut rec) => {
                let t = rec.params[0];
                if found.iter().any(|f| (f.params[sweep.index] - t).abs() <= 1e2 * opts.tol.max(1e-10)) {
                    continue;
                }
                rec.params = coords(t).to_vec();
                found.push(rec);
            }
            Err(Error::NoPhaseChange { .. } | Error::BoundaryPlateau { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    found.sort_by(|a, b| a.params[sweep.index].total_cmp(&b.params[sweep.index]));
    Ok(SliceTable {
        fixed,
        sweep,
        rows,
        coalescences: found,
    })
}
