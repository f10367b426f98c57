//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qchannel_ep::channel::{check_cptp, mix, random_cptp, Fixture, SuperOperator};
use qchannel_ep::circuit::{decompose, verify_decomposition};
use qchannel_ep::linalg::{c, line_sine, C64, CVector3};
use qchannel_ep::simplex::{ep3_search, phase_diagram, slice_sweep, Ep3Options, SimplexPoint, Sweep};
use qchannel_ep::spectral::{
    eigenvalues, ep_locate_1d, ep_order, pair_family, EpOptions, PointKind,
};
use qchannel_ep::tomography::{full_pipeline, linear_inversion, Observations, PipelineOptions, ShotMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
/// Standard output plus every file written, by relative path.
type Capture = (Vec<u8>, Vec<(String, Vec<u8>)>);

fn fixtures() -> [SuperOperator; 3] {
    [Fixture::E1.superop(), Fixture::E2.superop(), Fixture::E3.superop()]
}

fn e_of_p(p: f64) -> SuperOperator {
    mix(&[Fixture::E1.superop(), Fixture::E2.superop()], &[1.0 - p, p]).unwrap()
}

fn closed_form(p: f64) -> [C64; 3] {
    let s = C64::from(p / 2.0 - 0.25).sqrt();
    [c(0.0, 0.0), s, -s]
}

/// Smallest total distance over the six pairings of two spectra.
fn matched_error(a: &[C64; 3], b: &[C64; 3]) -> f64 {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    PERMS
        .iter()
        .map(|p| (0..3).map(|k| (a[p[k]] - b[k]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

fn oracle_ep3() -> [f64; 3] {
    let raw = [10.0, 2.0 * 13f64.sqrt(), 3.0 * 3f64.sqrt()];
    let s: f64 = raw.iter().sum();
    raw.map(|x| x / s)
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, limit {limit:.0?}"))
    }
}

fn random_weights(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let w: [f64; 3] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
    let s: f64 = w.iter().sum();
    w.map(|x| x / s)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for k in 0..=100 {
        let p = k as f64 / 100.0;
        let e = e_of_p(p).to_affine().map_err(|e| e.to_string())?.distortion;
        let ev = eigenvalues(&e).map_err(|e| e.to_string())?;
        worst = worst.max(matched_error(&ev, &closed_form(p)));
    }
    within(t.elapsed(), Duration::from_secs(1))?;
    if worst <= 1e-10 {
        Ok(format!("max deviation {worst:.2e}"))
    } else {
        Err(format!("max deviation {worst:.2e} > 1e-10"))
    }
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let [a, b, _] = fixtures();
    let fam = pair_family(&a, &b).map_err(|e| e.to_string())?;
    let r = ep_locate_1d(fam, 0.0, 1.0, &EpOptions::default()).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(1))?;
    let p = r.params[0];
    let v = r.coalesced_eigenvector.ok_or("no eigenvector")?;
    let angle = line_sine(&CVector3::from(v), &CVector3::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0))).asin();
    let msg = format!("p = {p:.12}, order {}, kind {:?}, angle {angle:.2e}", r.order, r.kind);
    if (p - 0.5).abs() <= 1e-9 && r.order == 2 && r.kind == PointKind::EP && angle <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let e = e_of_p(0.5).to_affine().map_err(|e| e.to_string())?.distortion;
    let order = ep_order(&e, c(0.0, 0.0), 1e-8).map_err(|e| e.to_string())?;
    let rank = e.rank(1e-12);
    let square = (e * e).norm();
    within(t.elapsed(), Duration::from_secs(1))?;
    let msg = format!("ep_order {order}, rank(E) {rank}, ‖E²‖ {square:.1e}");
    if order == 2 && rank == 1 && square <= 1e-14 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let r = ep3_search(&fixtures(), &SimplexPoint::centroid(), &Ep3Options::default()).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(30))?;
    let target = oracle_ep3();
    let dist = (0..3).map(|k| (r.params[k] - target[k]).powi(2)).sum::<f64>().sqrt();
    let msg = format!(
        "a = ({:.5}, {:.5}, {:.5}), distance {dist:.1e}, order {}",
        r.params[0], r.params[1], r.params[2], r.order
    );
    if dist <= 2e-3 && r.order == 3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let d = phase_diagram(&fixtures(), 200).map_err(|e| e.to_string())?;
    within(t.elapsed(), Duration::from_secs(60))?;
    let ep3 = d.ep3.as_ref().ok_or("no EP3 found")?;
    let tip = SimplexPoint::new([ep3.params[0], ep3.params[1], ep3.params[2]]).map_err(|e| e.to_string())?;
    let ends: Vec<&SimplexPoint> = d.ep_lines.iter().flat_map(|l| [l.first().unwrap(), l.last().unwrap()]).collect();
    let meet = d.ep_lines.iter().all(|l| {
        l.first().unwrap().distance(&tip) <= 1e-9 || l.last().unwrap().distance(&tip) <= 1e-9
    });
    let edge: Vec<f64> = ends.iter().filter(|p| p.a[2].abs() <= 1e-12).map(|p| p.a[1]).collect();
    let msg = format!(
        "{} lines, meet at EP3: {meet}, a3 = 0 crossings at a2 = {edge:?}, {:.2?}",
        d.ep_lines.len(),
        t.elapsed()
    );
    if d.ep_lines.len() == 2 && meet && edge.len() == 1 && (edge[0] - 0.5).abs() <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for a2 in [0.362, 0.322, 0.282] {
        let hi = 1.0 - a2;
        let sweep = Sweep { index: 0, lo: 0.0, hi, n: (hi / 1e-3).ceil() as usize + 1 };
        let table = slice_sweep(&fixtures(), (1, a2), sweep).map_err(|e| e.to_string())?;
        let at: Vec<f64> = table.coalescences.iter().filter(|r| r.order == 2).map(|r| r.params[0]).collect();
        let pass = if a2 == 0.322 {
            !at.is_empty() && at.iter().all(|&x| (x - at[0]).abs() <= 1e-3)
        } else {
            at.len() == 2 && (at[1] - at[0]).abs() > 1e-3
        };
        ok &= pass;
        notes.push(format!("a2 = {a2}: EP2 at {at:.5?}"));
    }
    let msg = notes.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fx = fixtures();
    let mut channels = fx.to_vec();
    for _ in 0..50 {
        channels.push(mix(&fx, &random_weights(&mut rng)).map_err(|e| e.to_string())?);
    }
    let reports: Vec<_> = channels.iter().map(|s| check_cptp(s, 1e-10)).collect();
    let worst = reports.iter().map(|r| r.min_choi_eigenvalue).fold(f64::INFINITY, f64::min);
    let all = reports.iter().all(|r| r.is_cptp());
    let msg = format!("{} channels, min Choi eigenvalue {worst:.2e}", channels.len());
    if all && worst >= -1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let s = e_of_p(p);
        let d = decompose(&s, 1e-8).map_err(|e| format!("p = {p}: {e}"))?;
        let v = verify_decomposition(&s, &d);
        if !(v.q1.is_cptp() && v.q2.is_cptp()) {
            return Err(format!("p = {p}: circuit channel not CPTP"));
        }
        worst = worst.max(v.distance).max(d.residual);
    }
    within(t.elapsed(), Duration::from_secs(60))?;
    let msg = format!("max residual {worst:.2e}, {:.2?}", t.elapsed());
    if worst <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_9() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let s = random_cptp(seed);
        let obs = Observations::exact(&s).map_err(|e| e.to_string())?;
        worst = worst.max(linear_inversion(&obs).frobenius_distance(&s));
    }
    let msg = format!("max Frobenius error {worst:.2e}");
    if worst <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn criterion_10() -> Outcome {
    let t = Instant::now();
    let mut worst_fid = f64::INFINITY;
    let mut worst_eig: (f64, f64) = (0.0, 0.0);
    let mut worst_single: f64 = 0.0;
    let mut feasible = true;
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let s = e_of_p(p);
        let truth = closed_form(p);
        let mut fids = Vec::new();
        let mut errs = Vec::new();
        for seed in 0..20 {
            let opts = PipelineOptions { shots: ShotMode::Finite(4096), seed, ..PipelineOptions::default() };
            let r = full_pipeline(&s, &opts).map_err(|e| format!("p = {p}, seed {seed}: {e}"))?;
            feasible &= r.cptp.is_cptp();
            fids.push(r.fidelity);
            errs.push(matched_error(&r.eigenvalues, &truth));
        }
        worst_single = errs.iter().copied().fold(worst_single, f64::max);
        worst_fid = worst_fid.min(median(fids));
        let m = median(errs);
        if m > worst_eig.0 {
            worst_eig = (m, p);
        }
    }
    within(t.elapsed(), Duration::from_secs(300))?;
    let msg = format!(
        "worst median fidelity {worst_fid:.4}, worst median eigenvalue error {:.3} at p = {}, \
         largest single-run error {worst_single:.3}, all CPTP: {feasible}, {:.2?}",
        worst_eig.0,
        worst_eig.1,
        t.elapsed()
    );
    if worst_fid >= 0.99 && worst_eig.0 <= 0.05 && feasible {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_11() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..1000 {
        let e = random_cptp(10_000 + seed).to_affine().map_err(|e| e.to_string())?.distortion;
        let ev = eigenvalues(&e).map_err(|e| e.to_string())?;
        worst = ev.iter().map(|z| z.norm()).fold(worst, f64::max);
    }
    let msg = format!("largest modulus {worst:.12}");
    if worst <= 1.0 + 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn run_cli(args: &[&str], dir: &Path) -> Result<Capture, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qcep"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let mut files: Vec<(String, Vec<u8>)> = walk(dir)
        .into_iter()
        .map(|p| (p.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    Ok((out.stdout, files))
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

fn criterion_12() -> Outcome {
    let commands: [&[&str]; 8] = [
        &["channels", "list"],
        &["channels", "show", "E3", "--format", "json"],
        &["sweep", "--points", "11", "--tomography", "--shots", "512", "--seed", "3", "--out", "sweep.csv"],
        &["ep-find", "--pair", "E1,E2"],
        &["ep-find", "--triple", "E1,E2,E3"],
        &["phase-diagram", "--resolution", "30", "--out", "diagram.csv"],
        &["decompose", "interp:0.3", "--seed", "5", "--out", "circuits"],
        &["qpt", "E3", "--shots", "1000", "--seed", "11"],
    ];
    for args in commands {
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        let first = run_cli(args, a.path())?;
        let second = run_cli(args, b.path())?;
        if first != second {
            return Err(format!("outputs of {args:?} differ between runs"));
        }
    }
    Ok(format!("{} commands repeated byte-identically", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("closed-form spectrum", criterion_1),
        ("EP2 location", criterion_2),
        ("Jordan oracle", criterion_3),
        ("EP3 location", criterion_4),
        ("phase-diagram edge consistency", criterion_5),
        ("slices through the EP3", criterion_6),
        ("CPTP validation", criterion_7),
        ("decomposition round trip", criterion_8),
        ("exact tomography", criterion_9),
        ("statistical tomography", criterion_10),
        ("unit disk", criterion_11),
        ("determinism", criterion_12),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
