use nalgebra::Matrix3;
use serde::Serialize;

use super::eig::eigenvalues;
use super::report::{phase_of, scale_of, spectrum, Phase, SpectrumReport, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{bdot3, c, complexify3, line_sine, singular_values_ascending, CMatrix3, CVector3, C64};
use crate::serde_util;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointKind {
    EP,
    DP,
}

/// A located eigenvalue coalescence.
#[derive(Debug, Clone, Serialize)]
pub struct EPRecord {
    /// `[p]` for one-parameter families, `[a1, a2, a3]` on the simplex.
    pub params: Vec<f64>,
    #[serde(serialize_with = "serde_util::complex")]
    pub coalesced_eigenvalue: C64,
    pub order: usize,
    pub min_rigidity: f64,
    /// Sine of the angle between the coalescing eigenvectors.
    pub eigenvector_gap: f64,
    pub kind: PointKind,
    /// Real representative of the shared eigenvector line (EPs only).
    #[serde(serialize_with = "serde_util::complex_option_array")]
    pub coalesced_eigenvector: Option<[C64; 3]>,
    /// `order ≥ 2`, the Jordan-rank confirmation of a small eigenvector gap.
    pub order_confirmed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpOptions {
    /// Final bracket width in the family parameter.
    pub tol: f64,
    /// Phase classification tolerance (relative to `max(1, ‖E‖)`).
    pub class_tol: f64,
    /// Largest eigenvector gap still counted as an EP.
    pub gap_tol: f64,
    /// Singular-value threshold for the Jordan-rank test.
    pub order_tol: f64,
}

impl Default for EpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            class_tol: DEFAULT_TOL,
            gap_tol: 1e-4,
            order_tol: 1e-8,
        }
    }
}

/// Size of the largest Jordan block of `e` at `lambda`.
///
/// Nullities of `(E − λI)^k` are counted from singular values at or below
/// `tol·scale^k`; the algebraic multiplicity is the nullity at `k = 3`.
pub fn ep_order(e: &Matrix3<f64>, lambda: C64, tol: f64) -> Result<usize> {
    let scale = scale_of(e);
    let n = complexify3(e) - CMatrix3::identity() * lambda;
    let mut power = CMatrix3::identity();
    let mut nullity = [0usize; 3];
    for (k, slot) in nullity.iter_mut().enumerate() {
        power *= n;
        let thr = tol * scale.powi(k as i32 + 1);
        *slot = singular_values_ascending(&power)
            .iter()
            .filter(|&&s| s <= thr)
            .count();
    }
    if nullity[0] == 0 {
        return Err(Error::NotAnEigenvalue {
            value: format!("{lambda}"),
        });
    }
    let algebraic = nullity[2];
    Ok(nullity.iter().position(|&m| m == algebraic).unwrap() + 1)
}

/// Phase-aligned real part of `v`, normalized with its largest entry positive.
pub(crate) fn real_representative(v: &CVector3) -> [C64; 3] {
    let s = bdot3(v, v);
    let rot = if s.norm() > 0.0 {
        C64::from_polar(1.0, -s.arg() / 2.0)
    } else {
        c(1.0, 0.0)
    };
    let mut re = (v * rot).map(|z| z.re);
    let big = re.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if big < 0.0 {
        re = -re;
    }
    let n = re.norm();
    if n > 0.0 {
        re /= n;
    }
    [c(re.x, 0.0), c(re.y, 0.0), c(re.z, 0.0)]
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

fn closest_pair(ev: &[C64; 3], target: Option<C64>) -> (usize, usize) {
    let mut best = (0, 1);
    let mut best_score = f64::INFINITY;
    for i in 0..3 {
        for j in i + 1..3 {
            let score = match target {
                Some(t) => (ev[i] - t).norm().max((ev[j] - t).norm()),
                None => (ev[i] - ev[j]).norm(),
            };
            if score < best_score {
                best_score = score;
                best = (i, j);
            }
        }
    }
    best
}

const OFFSETS: [f64; 5] = [0.0, 1e-12, 1e-10, 1e-8, 1e-6];

/// Locates the phase change (or, failing that, an eigenvalue degeneracy) of a
/// one-parameter family `p ↦ E(p)` on `[lo, hi]`.
///
/// With different phases at the ends, the label "has a complex pair" is
/// bisected to width `opts.tol`. With equal phases, the smallest pairwise
/// eigenvalue gap is scanned on a grid and refined by golden-section search;
/// if it never closes, `NoPhaseChange` is returned.
pub fn ep_locate_1d<F>(family: F, lo: f64, hi: f64, opts: &EpOptions) -> Result<EPRecord>
where
    F: Fn(f64) -> Matrix3<f64>,
{
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
    }
    let label = |p: f64| phase_of(&family(p), opts.class_tol);
    let (l_lo, l_hi) = (label(lo)?, label(hi)?);
    if l_lo == Phase::Boundary && l_hi == Phase::Boundary {
        return Err(Error::NoPhaseChange { lo, hi });
    }
    let b_lo = l_lo == Phase::KBroken;
    let b_hi = l_hi == Phase::KBroken;
    if b_lo != b_hi {
        locate_phase_change(&family, lo, hi, b_lo, opts)
    } else {
        locate_degeneracy(&family, lo, hi, opts)
    }
}

fn locate_phase_change<F>(family: &F, lo: f64, hi: f64, b_lo: bool, opts: &EpOptions) -> Result<EPRecord>
where
    F: Fn(f64) -> Matrix3<f64>,
{
    let label = |p: f64| phase_of(&family(p), opts.class_tol);
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        if b - a <= opts.tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let ph = label(mid)?;
        if ph == Phase::Boundary
            && label((mid - opts.tol).max(lo))? == Phase::Boundary
            && label((mid + opts.tol).min(hi))? == Phase::Boundary
        {
            return Err(Error::BoundaryPlateau { at: mid });
        }
        if (ph == Phase::KBroken) == b_lo {
            a = mid;
        } else {
            b = mid;
        }
    }
    let p_star = 0.5 * (a + b);
    let (pb, dir) = if b_lo { (a, -1.0) } else { (b, 1.0) };
    let len = hi - lo;

    let mut diag: Option<(SpectrumReport, usize)> = None;
    for h in OFFSETS {
        let q = (pb + dir * h * len).clamp(lo, hi);
        let r = spectrum(&family(q), opts.class_tol)?;
        if r.phase != Phase::KBroken {
            continue;
        }
        let up = (0..3).max_by(|&i, &j| r.eigenvalues[i].im.total_cmp(&r.eigenvalues[j].im)).unwrap();
        let split = 2.0 * r.eigenvalues[up].im;
        let resolved = split > 1e-9 * r.scale;
        if resolved || diag.is_none() {
            diag = Some((r, up));
        }
        if resolved {
            break;
        }
    }
    let (r, up) = diag.ok_or_else(|| {
        Error::NoConvergence {
            reason: "no broken-phase point near the bracket".into(),
            best: vec![p_star],
            objective: f64::NAN,
        }
    })?;
    let v = r.right(up);
    let gap = line_sine(&v, &v.map(|z| z.conj()));
    let lambda = c(r.eigenvalues[up].re, 0.0);
    finish(family, p_star, lambda, gap, r.min_rigidity(), Some(&v), opts)
}

fn locate_degeneracy<F>(family: &F, lo: f64, hi: f64, opts: &EpOptions) -> Result<EPRecord>
where
    F: Fn(f64) -> Matrix3<f64>,
{
    const GRID: usize = 65;
    let gap_at = |p: f64| -> Result<f64> { Ok(min_gap(&eigenvalues(&family(p))?)) };
    let step = (hi - lo) / (GRID - 1) as f64;
    let mut best = (0usize, f64::INFINITY);
    for k in 0..GRID {
        let g = gap_at(lo + step * k as f64)?;
        if g < best.1 {
            best = (k, g);
        }
    }
    let mut a = lo + step * best.0.saturating_sub(1) as f64;
    let mut b = (lo + step * (best.0 + 1) as f64).min(hi);
    let mut p_star = lo + step * best.0 as f64;
    let mut g_star = best.1;
    if g_star > 0.0 {
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (gap_at(x1)?, gap_at(x2)?);
        for _ in 0..200 {
            if b - a <= opts.tol {
                break;
            }
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = gap_at(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = gap_at(x2)?;
            }
        }
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f < g_star {
                p_star = x;
                g_star = f;
            }
        }
    }
    let e_star = family(p_star);
    if g_star > 1e-8 * scale_of(&e_star) {
        return Err(Error::NoPhaseChange { lo, hi });
    }
    let r_star = spectrum(&e_star, opts.class_tol)?;
    let (i, j) = closest_pair(&r_star.eigenvalues, None);
    let lambda = (r_star.eigenvalues[i] + r_star.eigenvalues[j]) / 2.0;

    let len = hi - lo;
    let dir = if p_star + 1e-6 * len <= hi { 1.0 } else { -1.0 };
    let mut chosen = (r_star.clone(), i, j);
    for h in &OFFSETS[1..] {
        let q = p_star + dir * h * len;
        let r = spectrum(&family(q), opts.class_tol)?;
        let (a, b) = closest_pair(&r.eigenvalues, Some(lambda));
        if (r.eigenvalues[a] - r.eigenvalues[b]).norm() > 1e-9 * r.scale {
            chosen = (r, a, b);
            break;
        }
    }
    let (r, a, b) = chosen;
    let gap = line_sine(&r.right(a), &r.right(b));
    finish(family, p_star, lambda, gap, r.min_rigidity(), Some(&r.right(a)), opts)
}

fn finish<F>(
    family: &F,
    p_star: f64,
    lambda: C64,
    gap: f64,
    min_rigidity: f64,
    v: Option<&CVector3>,
    opts: &EpOptions,
) -> Result<EPRecord>
where
    F: Fn(f64) -> Matrix3<f64>,
{
    let order = ep_order(&family(p_star), lambda, opts.order_tol)?;
    let kind = if gap <= opts.gap_tol { PointKind::EP } else { PointKind::DP };
    Ok(EPRecord {
        params: vec![p_star],
        coalesced_eigenvalue: lambda,
        order,
        min_rigidity,
        eigenvector_gap: gap,
        kind,
        coalesced_eigenvector: match kind {
            PointKind::EP => v.map(real_representative),
            PointKind::DP => None,
        },
        order_confirmed: order >= 2,
    })
}
