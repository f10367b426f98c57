use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use qchannel_ep::channel::{check_cptp, mix, ChannelFile, Fixture, SuperOperator, DEFAULT_CPTP_TOL};
use qchannel_ep::circuit::{decompose_with, verify_decomposition, Circuit, DecomposeOptions};
use qchannel_ep::linalg::C64;
use qchannel_ep::simplex::{ep3_search, phase_diagram, Ep3Options, SimplexPoint};
use qchannel_ep::spectral::{ep_locate_1d, pair_family, spectrum, EPRecord, EpOptions, DEFAULT_TOL};
use qchannel_ep::tomography::{full_pipeline, MleOptions, PipelineOptions, ShotMode};
use qchannel_ep::{Error, ErrorClass};

use crate::cli::{ChannelsCmd, Cli, Command, DecomposeArgs, EpFindArgs, Format, PhaseDiagramArgs, QptArgs, SweepArgs};
use crate::config::{pick, positive_tol, split_channels, ConfigError, RunConfig};
use crate::output::{csv_document, emit, num, Header};

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

pub fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e.class() {
            ErrorClass::Validation | ErrorClass::Io => EXIT_VALIDATION,
            ErrorClass::Precondition => EXIT_PRECONDITION,
            ErrorClass::Numerical => EXIT_NUMERICAL,
        };
    }
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_VALIDATION;
    }
    EXIT_VALIDATION
}

/// Global options after merging flags with the config file.
struct Globals {
    tol: Option<f64>,
    format: Option<Format>,
    out: Option<PathBuf>,
    seed: u64,
}

pub fn run(cli: &Cli) -> Result<u8> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let g = Globals {
        tol: cli.tol.or(cfg.tol).map(positive_tol).transpose()?,
        format: cli.format.or(cfg.format),
        out: cli.out.clone().or(cfg.out.clone()),
        seed: pick(cli.seed, &cfg.seed, 0),
    };
    match &cli.command {
        Command::Channels(ChannelsCmd::List) => channels_list(&g),
        Command::Channels(ChannelsCmd::Show { channel }) => channels_show(&g, channel),
        Command::Sweep(a) => sweep(&g, &cfg, a),
        Command::EpFind(a) => ep_find(&g, &cfg, a),
        Command::PhaseDiagram(a) => diagram(&g, &cfg, a),
        Command::Decompose(a) => decompose(&g, &cfg, a),
        Command::Qpt(a) => qpt(&g, &cfg, a),
    }
}

/// A fixture name, or else a channel file path.
fn load_channel(arg: &str) -> Result<(String, SuperOperator)> {
    match arg.parse::<Fixture>() {
        Ok(f) => Ok((f.name(), f.superop())),
        Err(Error::UnknownFixture(_)) if Path::new(arg).is_file() => {
            let file = ChannelFile::read(Path::new(arg)).with_context(|| format!("channel file {arg}"))?;
            Ok((file.name.clone(), file.superop()?))
        }
        Err(e) => Err(e.into()),
    }
}

fn load_list<const N: usize>(list: &str) -> Result<([String; N], [SuperOperator; N])> {
    let specs = split_channels(list);
    if specs.len() != N {
        return Err(Error::InvalidArgument(format!("expected {N} channels, got {} in `{list}`", specs.len())).into());
    }
    let mut names = Vec::with_capacity(N);
    let mut chans = Vec::with_capacity(N);
    for s in &specs {
        let (n, c) = load_channel(s)?;
        names.push(n);
        chans.push(c);
    }
    Ok((names.try_into().unwrap(), chans.try_into().unwrap()))
}

fn pair_json(z: &C64) -> Value {
    json!([z.re, z.im])
}

fn channels_list(g: &Globals) -> Result<u8> {
    let header = Header::new("channels list", json!({ "format": g.format }), g.seed);
    let fixed = [Fixture::E1, Fixture::E2, Fixture::E3, Fixture::Identity, Fixture::Reset];
    let rows: Vec<Value> = fixed
        .iter()
        .map(|f| {
            let rep = check_cptp(&f.superop(), DEFAULT_CPTP_TOL);
            json!({ "name": f.name(), "cptp": rep.is_cptp(), "has_kraus": f.kraus().is_some() })
        })
        .collect();
    let text = match g.format {
        Some(Format::Json) => header.json_document(json!({ "fixtures": rows, "parametric": &Fixture::NAMES[5..] }))?,
        Some(Format::Csv) => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r["name"].as_str().unwrap().to_string(), r["cptp"].to_string()])
                .collect();
            csv_document(&header, &["name", "cptp"], &body)?
        }
        None => {
            let mut s = header.comment_lines();
            for name in Fixture::NAMES {
                s += name;
                s.push('\n');
            }
            s
        }
    };
    emit(g.out.as_deref(), &text)?;
    Ok(0)
}

fn channels_show(g: &Globals, arg: &str) -> Result<u8> {
    let tol = g.tol.unwrap_or(DEFAULT_CPTP_TOL);
    let header = Header::new("channels show", json!({ "channel": arg, "tol": tol, "format": g.format }), g.seed);
    let (name, s) = load_channel(arg)?;
    let rep = check_cptp(&s, tol);
    let affine = s.to_affine();
    let text = match g.format {
        Some(Format::Json) | Some(Format::Csv) => {
            let file = match &affine {
                Ok(a) => serde_json::to_value(ChannelFile::from_affine(&name, a))?,
                Err(_) => serde_json::to_value(ChannelFile::from_superop(&name, &s))?,
            };
            header.json_document(json!({ "channel": file, "cptp": rep }))?
        }
        None => {
            let mut t = header.comment_lines();
            t += &format!("name: {name}\n");
            match &affine {
                Ok(a) => {
                    let v = |x: f64| format!("{x:>22.14e}");
                    t += "shift:\n";
                    t += &format!("  {}\n", a.shift.iter().map(|&x| v(x)).collect::<Vec<_>>().join(" "));
                    t += "distortion:\n";
                    for i in 0..3 {
                        t += &format!("  {}\n", (0..3).map(|j| v(a.distortion[(i, j)])).collect::<Vec<_>>().join(" "));
                    }
                }
                Err(e) => t += &format!("affine form unavailable: {e}\n"),
            }
            t += &format!(
                "is_cp: {}\nis_tp: {}\nmin_choi_eigenvalue: {:.15e}\ntp_residual: {:.15e}\n",
                rep.is_cp, rep.is_tp, rep.min_choi_eigenvalue, rep.tp_residual
            );
            t
        }
    };
    emit(g.out.as_deref(), &text)?;
    Ok(if rep.is_cptp() { 0 } else { EXIT_VALIDATION })
}

/// Permutation of `est` closest to `reference`.
fn match_eigenvalues(est: &[C64; 3], reference: &[C64; 3]) -> [C64; 3] {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let cost = |p: &[usize; 3]| -> f64 { (0..3).map(|k| (est[p[k]] - reference[k]).norm_sqr()).sum() };
    let best = PERMS.iter().min_by(|a, b| cost(a).total_cmp(&cost(b))).unwrap();
    best.map(|i| est[i])
}

fn sweep(g: &Globals, cfg: &RunConfig, a: &SweepArgs) -> Result<u8> {
    let pair = pick(a.pair.clone(), &cfg.pair, "E1,E2".into());
    let points = pick(a.points, &cfg.points, 101);
    let tomography = a.tomography || cfg.tomography.unwrap_or(false);
    let shots = pick(a.shots, &cfg.shots, 4096);
    let tol = g.tol.unwrap_or(DEFAULT_TOL);
    let format = g.format.unwrap_or(Format::Csv);
    let header = Header::new(
        "sweep",
        json!({ "pair": pair, "points": points, "tomography": tomography, "shots": shots, "tol": tol, "format": format }),
        g.seed,
    );
    if points < 2 {
        return Err(Error::InvalidArgument(format!("--points must be at least 2, got {points}")).into());
    }
    let (_, [ca, cb]) = load_list::<2>(&pair)?;
    let family = pair_family(&ca, &cb)?;

    let mut columns = vec!["p", "lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im", "lambda3_re", "lambda3_im", "phase", "min_rigidity"];
    if tomography {
        columns.extend(["est1_re", "est1_im", "est2_re", "est2_im", "est3_re", "est3_im", "fidelity", "estimate_cptp"]);
    }
    let mut rows = Vec::with_capacity(points);
    let mut records = Vec::with_capacity(points);
    for k in 0..points {
        let p = k as f64 / (points - 1) as f64;
        let rep = spectrum(&family(p), tol)?;
        let mut row = vec![num(p)];
        for z in &rep.eigenvalues {
            row.push(num(z.re));
            row.push(num(z.im));
        }
        row.push(rep.phase.to_string());
        row.push(num(rep.min_rigidity()));
        let mut rec = json!({
            "p": p,
            "eigenvalues": rep.eigenvalues.iter().map(pair_json).collect::<Vec<_>>(),
            "phase": rep.phase,
            "min_rigidity": rep.min_rigidity(),
        });
        if tomography {
            let s = mix(&[ca, cb], &[1.0 - p, p])?;
            let opts = PipelineOptions {
                shots: ShotMode::Finite(shots),
                seed: g.seed.wrapping_add(k as u64),
                ..PipelineOptions::default()
            };
            let r = full_pipeline(&s, &opts)?;
            let est = match_eigenvalues(&r.eigenvalues, &rep.eigenvalues);
            for z in &est {
                row.push(num(z.re));
                row.push(num(z.im));
            }
            row.push(num(r.fidelity));
            row.push(r.cptp.is_cptp().to_string());
            rec["estimated_eigenvalues"] = json!(est.iter().map(pair_json).collect::<Vec<_>>());
            rec["fidelity"] = json!(r.fidelity);
            rec["estimate_cptp"] = json!(r.cptp.is_cptp());
        }
        rows.push(row);
        records.push(rec);
    }
    let text = match format {
        Format::Csv => csv_document(&header, &columns, &rows)?,
        Format::Json => header.json_document(json!({ "rows": records }))?,
    };
    emit(g.out.as_deref(), &text)?;
    Ok(0)
}

fn record_csv(header: &Header, r: &EPRecord) -> Result<String> {
    let mut columns: Vec<String> = (1..=r.params.len()).map(|k| format!("param{k}")).collect();
    columns.extend(
        ["eigenvalue_re", "eigenvalue_im", "order", "kind", "min_rigidity", "eigenvector_gap"].map(String::from),
    );
    let mut row: Vec<String> = r.params.iter().map(|&x| num(x)).collect();
    row.extend([
        num(r.coalesced_eigenvalue.re),
        num(r.coalesced_eigenvalue.im),
        r.order.to_string(),
        format!("{:?}", r.kind),
        num(r.min_rigidity),
        num(r.eigenvector_gap),
    ]);
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    csv_document(header, &cols, &[row])
}

fn ep_find(g: &Globals, cfg: &RunConfig, a: &EpFindArgs) -> Result<u8> {
    let tol = g.tol.unwrap_or(1e-12);
    let format = g.format.unwrap_or(Format::Json);
    let (pair, triple) = match (&a.pair, &a.triple) {
        (Some(p), _) => (Some(p.clone()), None),
        (None, Some(t)) => (None, Some(t.clone())),
        (None, None) => (cfg.pair.clone(), cfg.triple.clone()),
    };
    let (header, record) = match (pair, triple) {
        (Some(_), Some(_)) => bail!(ConfigError("config sets both pair and triple".into())),
        (pair, None) => {
            let pair = pair.unwrap_or_else(|| "E1,E2".into());
            let header = Header::new("ep-find", json!({ "pair": pair, "tol": tol, "format": format }), g.seed);
            let (_, [ca, cb]) = load_list::<2>(&pair)?;
            let opts = EpOptions { tol, ..EpOptions::default() };
            (header, ep_locate_1d(pair_family(&ca, &cb)?, 0.0, 1.0, &opts)?)
        }
        (None, Some(triple)) => {
            let start = a.start.clone().or(cfg.start.clone());
            let header = Header::new(
                "ep-find",
                json!({ "triple": triple, "start": start, "tol": tol, "format": format }),
                g.seed,
            );
            let (_, chans) = load_list::<3>(&triple)?;
            let seed_point = match &start {
                Some(s) => {
                    let v = s
                        .split(',')
                        .map(|t| t.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| ConfigError(format!("--start: {e}")))?;
                    if v.len() != 3 {
                        bail!(ConfigError("--start needs three barycentric coordinates".into()));
                    }
                    SimplexPoint::new([v[0], v[1], v[2]])?
                }
                None => SimplexPoint::centroid(),
            };
            let opts = Ep3Options { residual_tol: tol, ..Ep3Options::default() };
            (header, ep3_search(&chans, &seed_point, &opts)?)
        }
    };
    let text = match format {
        Format::Json => header.json_document(&record)?,
        Format::Csv => record_csv(&header, &record)?,
    };
    emit(g.out.as_deref(), &text)?;
    Ok(0)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let p = out.with_extension("json");
    if p == out {
        out.with_extension("lines.json")
    } else {
        p
    }
}

fn diagram(g: &Globals, cfg: &RunConfig, a: &PhaseDiagramArgs) -> Result<u8> {
    let triple = pick(a.triple.clone(), &cfg.triple, "E1,E2,E3".into());
    let resolution = pick(a.resolution, &cfg.resolution, 200);
    let format = g.format.unwrap_or(Format::Csv);
    let header = Header::new(
        "phase-diagram",
        json!({ "triple": triple, "resolution": resolution, "format": format }),
        g.seed,
    );
    let (_, chans) = load_list::<3>(&triple)?;
    let d = phase_diagram(&chans, resolution)?;
    let lines = json!({ "resolution": d.resolution, "ep_lines": d.ep_lines, "ep3": d.ep3 });
    match format {
        Format::Json => {
            let cells: Vec<Value> = d
                .cells
                .iter()
                .map(|c| json!({ "a": c.point.a, "phase": c.phase, "min_rigidity": c.min_rigidity }))
                .collect();
            let mut doc = lines;
            doc["cells"] = json!(cells);
            emit(g.out.as_deref(), &header.json_document(doc)?)?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = d
                .cells
                .iter()
                .map(|c| {
                    vec![num(c.point.a[0]), num(c.point.a[1]), num(c.point.a[2]), c.phase.to_string(), num(c.min_rigidity)]
                })
                .collect();
            let text = csv_document(&header, &["a1", "a2", "a3", "phase", "min_rigidity"], &rows)?;
            emit(g.out.as_deref(), &text)?;
            if let Some(out) = &g.out {
                emit(Some(&sidecar_path(out)), &header.json_document(lines)?)?;
            }
        }
    }
    Ok(0)
}

fn circuit_file(header: &Header, label: &str, c: &Circuit) -> String {
    format!("{}# circuit: {label}\n{}", header.comment_lines(), c.to_text())
}

fn decompose(g: &Globals, cfg: &RunConfig, a: &DecomposeArgs) -> Result<u8> {
    let tol = g.tol.unwrap_or(1e-8);
    let starts = pick(a.starts, &cfg.starts, DecomposeOptions::default().starts);
    let header = Header::new(
        "decompose",
        json!({ "channel": a.channel, "tol": tol, "starts": starts }),
        g.seed,
    );
    let (_, s) = load_channel(&a.channel)?;
    let opts = DecomposeOptions {
        starts,
        seed: g.seed,
        ..DecomposeOptions::default()
    };
    let d = decompose_with(&s, tol, &opts)?;
    let v = verify_decomposition(&s, &d);
    let report = json!({ "residual": d.residual, "verification": v });
    match &g.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            emit(Some(&dir.join("q1.qc")), &circuit_file(&header, "q1", &d.q1))?;
            emit(Some(&dir.join("q2.qc")), &circuit_file(&header, "q2", &d.q2))?;
            let doc = header.json_document(&report)?;
            emit(Some(&dir.join("report.json")), &doc)?;
            emit(None, &doc)?;
        }
        None => {
            let mut doc = report;
            doc["q1"] = json!(d.q1.to_text());
            doc["q2"] = json!(d.q2.to_text());
            emit(None, &header.json_document(doc)?)?;
        }
    }
    Ok(0)
}

fn qpt(g: &Globals, cfg: &RunConfig, a: &QptArgs) -> Result<u8> {
    let exact = a.exact || cfg.exact.unwrap_or(false);
    let shots = pick(a.shots, &cfg.shots, 4096);
    let noise = pick(a.noise, &cfg.noise, 0.0);
    let tol = g.tol.unwrap_or(MleOptions::default().rel_tol);
    let header = Header::new(
        "qpt",
        json!({ "channel": a.channel, "exact": exact, "shots": shots, "noise": noise, "tol": tol }),
        g.seed,
    );
    let (name, s) = load_channel(&a.channel)?;
    let opts = PipelineOptions {
        shots: if exact { ShotMode::Exact } else { ShotMode::Finite(shots) },
        seed: g.seed,
        noise,
        mle: MleOptions { rel_tol: tol, ..MleOptions::default() },
    };
    let r = full_pipeline(&s, &opts)?;
    let estimate = ChannelFile::from_superop(&format!("{name} (estimate)"), &r.reconstruction.superop_estimate);
    let mut doc = serde_json::to_value(&r)?;
    doc["estimate"] = serde_json::to_value(estimate)?;
    emit(g.out.as_deref(), &header.json_document(doc)?)?;
    Ok(0)
}
