use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::ep3::{ep3_search, Ep3Options};
use super::{SimplexPoint, Triple};
use crate::channel::SuperOperator;
use crate::error::{Error, Result};
use crate::spectral::{phase_of, spectrum, EPRecord, Phase, DEFAULT_TOL};

/// Bisection width along a lattice edge, in barycentric units.
const REFINE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Cell {
    pub point: SimplexPoint,
    pub phase: Phase,
    pub min_rigidity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseDiagram {
    pub resolution: usize,
    #[serde(skip)]
    pub cells: Vec<Cell>,
    /// Ordered boundary points between the K-broken and K-exact regions.
    pub ep_lines: Vec<Vec<SimplexPoint>>,
    pub ep3: Option<EPRecord>,
}

impl PhaseDiagram {
    /// Edge length of a lattice triangle in barycentric coordinates.
    pub fn cell_diameter(&self) -> f64 {
        std::f64::consts::SQRT_2 / self.resolution as f64
    }
}

/// Lattice vertex `(i, j)` ↦ `(i/R, j/R, (R − i − j)/R)`, stored row by row.
struct Lattice {
    r: usize,
}

impl Lattice {
    fn index(&self, i: usize, j: usize) -> usize {
        i * (self.r + 1) - i * (i.saturating_sub(1)) / 2 + j
    }

    fn len(&self) -> usize {
        (self.r + 1) * (self.r + 2) / 2
    }

    fn vertices(&self) -> Vec<(usize, usize)> {
        (0..=self.r).flat_map(|i| (0..=self.r - i).map(move |j| (i, j))).collect()
    }

    fn coords(&self, (i, j): (usize, usize)) -> [f64; 3] {
        let r = self.r as f64;
        let k = self.r - i - j;
        [i as f64 / r, j as f64 / r, k as f64 / r]
    }

    /// Up triangles `(i,j),(i+1,j),(i,j+1)` and down triangles `(i+1,j),(i,j+1),(i+1,j+1)`.
    fn triangles(&self) -> Vec<[(usize, usize); 3]> {
        let mut out = Vec::new();
        for i in 0..self.r {
            for j in 0..self.r - i {
                out.push([(i, j), (i + 1, j), (i, j + 1)]);
                if i + j + 2 <= self.r {
                    out.push([(i + 1, j), (i, j + 1), (i + 1, j + 1)]);
                }
            }
        }
        out
    }
}

fn lerp(a: &[f64; 3], b: &[f64; 3], t: f64) -> [f64; 3] {
    std::array::from_fn(|k| a[k] + t * (b[k] - a[k]))
}

/// Bisects the "has a complex pair" label between two points with different labels.
fn refine_edge(triple: &Triple, a: &[f64; 3], b: &[f64; 3], broken_a: bool) -> Result<SimplexPoint> {
    let len = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let (mut lo, mut hi) = (0.0, 1.0);
    while (hi - lo) * len > REFINE_TOL {
        let mid = 0.5 * (lo + hi);
        let broken = phase_of(&triple.at(&lerp(a, b, mid)), DEFAULT_TOL)? == Phase::KBroken;
        if broken == broken_a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SimplexPoint { a: lerp(a, b, 0.5 * (lo + hi)) })
}

/// Chains segments (pairs of crossing ids) into polylines: open chains first,
/// starting from their lowest-id end, then closed loops.
fn chain(n: usize, segments: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in segments {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut used = vec![false; n];
    let mut lines = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| {
        let mut line = vec![start];
        used[start] = true;
        let mut cur = start;
        while let Some(&next) = adj[cur].iter().find(|&&w| !used[w]) {
            used[next] = true;
            line.push(next);
            cur = next;
        }
        line
    };
    for s in 0..n {
        if !used[s] && adj[s].len() == 1 {
            lines.push(walk(s, &mut used));
        }
    }
    for s in 0..n {
        if !used[s] && !adj[s].is_empty() {
            let mut line = walk(s, &mut used);
            line.push(s);
            lines.push(line);
        }
    }
    lines
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|k| a[k] - b[k])
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(p: &[f64; 3], t: f64, d: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|k| p[k] + t * d[k])
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(&v, &v).sqrt();
    (n > 0.0).then(|| v.map(|x| x / n))
}

/// Both boundary crossings on the chord `c + u·n`, `|u| ≤ h`, if the chord
/// passes through the K-exact region.
fn cross_section(triple: &Triple, c: &[f64; 3], n: &[f64; 3], h: f64) -> Result<Option<[SimplexPoint; 2]>> {
    const SAMPLES: usize = 65;
    let disc = |u: f64| crate::spectral::DepressedCubic::of(&triple.at(&axpy(c, u, n))).discriminant();
    let du = 2.0 * h / (SAMPLES - 1) as f64;
    let best = (0..SAMPLES)
        .map(|k| -h + du * k as f64)
        .max_by(|x, y| disc(*x).total_cmp(&disc(*y)))
        .unwrap();
    let (mut lo, mut hi) = ((best - du).max(-h), (best + du).min(h));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..120 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if disc(x1) >= disc(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let u0 = 0.5 * (lo + hi);
    let inside = axpy(c, u0, n);
    if phase_of(&triple.at(&inside), DEFAULT_TOL)? != Phase::KExact {
        return Ok(None);
    }
    let minus = refine_edge(triple, &inside, &axpy(c, -h, n), false)?;
    let plus = refine_edge(triple, &inside, &axpy(c, h, n), false)?;
    Ok(Some([minus, plus]))
}

/// Splits the line through the EP3 `p` into two lines that both end at `p`.
///
/// Near an EP3 the K-exact region is a cusp narrower than the lattice, so
/// marching turns back before reaching it. In that case both branches are
/// continued into the tip with chords across the cusp axis, at distances from
/// `p` shrinking geometrically until they are within `reach`.
fn split_at_ep3(triple: &Triple, lines: Vec<Vec<SimplexPoint>>, p: &SimplexPoint, reach: f64) -> Result<Vec<Vec<SimplexPoint>>> {
    let nearest = lines
        .iter()
        .enumerate()
        .flat_map(|(l, line)| line.iter().enumerate().map(move |(k, q)| (l, k, q.distance(p))))
        .min_by(|a, b| a.2.total_cmp(&b.2));
    let Some((l, k, d0)) = nearest else {
        return Ok(lines);
    };
    let mut lines = lines;
    let line = lines.remove(l);
    let closed = line.len() > 2 && line.first() == line.last();
    let line = if closed {
        let body = &line[..line.len() - 1];
        let mut r = body[k..].to_vec();
        r.extend_from_slice(&body[..k]);
        r.push(body[k]);
        r
    } else {
        line
    };
    let k = if closed { 0 } else { k };

    let mut head = line[..k].to_vec();
    let mut tail = line[k + 1..].to_vec();
    let turn = line[k];
    let (mut head_tip, mut tail_tip) = (Vec::new(), Vec::new());
    if d0 <= reach {
        head.push(turn);
    } else if let (Some(a), Some(b)) = (head.last().copied(), tail.first().copied()) {
        let mid = lerp(&a.a, &b.a, 0.5);
        let axis = unit(sub(&mid, &p.a));
        let normal = axis.and_then(|ax| {
            let w = sub(&a.a, &b.a);
            unit(axpy(&w, -dot(&w, &ax), &ax))
        });
        if let (Some(ax), Some(n)) = (axis, normal) {
            let side = |q: &SimplexPoint| dot(&sub(&q.a, &p.a), &n) >= 0.0;
            if side(&turn) {
                head.push(turn);
            } else {
                tail.insert(0, turn);
            }
            let s0 = dot(&sub(&mid, &p.a), &ax);
            let mut s = s0 * 0.7;
            while s > 0.5 * reach {
                let c = axpy(&p.a, s, &ax);
                match cross_section(triple, &c, &n, s)? {
                    Some([minus, plus]) => {
                        head_tip.push(plus);
                        tail_tip.push(minus);
                    }
                    None => break,
                }
                s *= 0.7;
            }
        } else {
            head.push(turn);
        }
    } else {
        head.push(turn);
    }
    head.extend(head_tip);
    head.push(*p);
    tail_tip.reverse();
    let mut second = vec![*p];
    second.extend(tail_tip);
    second.extend(tail);
    for part in [head, second] {
        if part.len() >= 2 {
            lines.push(part);
        }
    }
    Ok(lines)
}

/// Phase diagram of `E(a) = Σ a_i E_i` on the barycentric lattice `a_i = k_i / R`.
///
/// Lattice edges whose endpoints disagree on "has a complex pair" are bisected
/// to 1e-8 and the crossings are joined triangle by triangle into polylines.
/// An EP3 found from the centroid splits the line through it into two.
pub fn phase_diagram(channels: &[SuperOperator; 3], resolution: usize) -> Result<PhaseDiagram> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!("resolution must be at least 2, got {resolution}")));
    }
    let triple = Triple::new(channels)?;
    let lat = Lattice { r: resolution };
    let verts = lat.vertices();
    debug_assert_eq!(verts.len(), lat.len());

    let cells: Vec<Cell> = verts
        .par_iter()
        .map(|&v| {
            let a = lat.coords(v);
            let rep = spectrum(&triple.at(&a), DEFAULT_TOL)?;
            Ok(Cell {
                point: SimplexPoint { a },
                phase: rep.phase,
                min_rigidity: rep.min_rigidity(),
            })
        })
        .collect::<Result<_>>()?;
    let broken = |v: (usize, usize)| cells[lat.index(v.0, v.1)].phase == Phase::KBroken;

    let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<((usize, usize), (usize, usize))> = Vec::new();
    let mut segments = Vec::new();
    for tri in lat.triangles() {
        let mut hits = Vec::with_capacity(2);
        for (u, w) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            if broken(u) == broken(w) {
                continue;
            }
            let key = {
                let (iu, iw) = (lat.index(u.0, u.1), lat.index(w.0, w.1));
                (iu.min(iw), iu.max(iw))
            };
            let id = *edge_ids.entry(key).or_insert_with(|| {
                edges.push((u, w));
                edges.len() - 1
            });
            hits.push(id);
        }
        if let [x, y] = hits[..] {
            segments.push((x, y));
        }
    }

    let crossings: Vec<SimplexPoint> = edges
        .par_iter()
        .map(|&(u, w)| refine_edge(&triple, &lat.coords(u), &lat.coords(w), broken(u)))
        .collect::<Result<_>>()?;

    let mut ep_lines: Vec<Vec<SimplexPoint>> = chain(crossings.len(), &segments)
        .into_iter()
        .map(|ids| {
            let mut line: Vec<SimplexPoint> = Vec::with_capacity(ids.len());
            for id in ids {
                let q = crossings[id];
                if line.last().is_none_or(|l| l.distance(&q) > REFINE_TOL) {
                    line.push(q);
                }
            }
            line
        })
        .collect();

    let ep3 = ep3_search(channels, &SimplexPoint::centroid(), &Ep3Options::default())
        .ok()
        .filter(|r| r.order == 3);
    let diameter = std::f64::consts::SQRT_2 / resolution as f64;
    if let Some(rec) = &ep3 {
        let p = SimplexPoint { a: [rec.params[0], rec.params[1], rec.params[2]] };
        ep_lines = split_at_ep3(&triple, ep_lines, &p, diameter)?;
    }
    Ok(PhaseDiagram {
        resolution,
        cells,
        ep_lines,
        ep3,
    })
}
