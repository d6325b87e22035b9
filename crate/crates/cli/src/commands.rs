use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use geolip::analysis::{
    distortion_scan, verify_theorems, EpsilonPairs, MetricKind, PairSampler, RandomPairs,
    ScanOptions, TheoremOptions,
};
use geolip::datagen::{
    gen_curriculum_dataset, gen_level_groups, gen_pair, read_ndjson, test_split_seed, write_ndjson,
    NoiseModel, PairSpec,
};
use geolip::matching::{match_pair, MatchOptions, MatchResult};
use geolip::metrics::{hgw_exact, pm_exact, wass_inf};
use geolip::models::{bilip_2d, bilip_general, wl1_forward, BiLipConfig, Symmetrizer, Wl1Config};
use geolip::rng::derive_seed;
use geolip::{MultiSet, Orientation, PointSet};

use crate::output::{self, RunConfig};
use crate::{
    DistortArgs, GenDataArgs, MatchBenchArgs, MetricArg, MetricArgs, MetricKindArg, ModelArg,
    NoiseArg, Outcome, PlotDataArgs, SamplerArg, VerifyArgs,
};

pub fn gen_data(a: &GenDataArgs) -> Result<Outcome> {
    ensure!(a.pairs > 0, "--pairs must be positive");
    let cfg = RunConfig::new("gen-data", a)?;
    let base = PairSpec {
        n: a.n,
        components: a.components,
        noise: match a.noise_model {
            NoiseArg::Fixed => NoiseModel::Fixed,
            NoiseArg::Gaussian => NoiseModel::Gaussian,
        },
        ..Default::default()
    };
    let seed = if a.test_split {
        test_split_seed(a.seed)
    } else {
        a.seed
    };
    let pairs = match &a.levels {
        Some(levels) => {
            ensure!(!levels.is_empty(), "--levels is empty");
            gen_level_groups(levels, a.pairs, seed, &base)?
        }
        None if a.pairs == 1 => vec![gen_pair(&PairSpec {
            noise_level: a.noise_start,
            seed: derive_seed(seed, 0),
            ..base
        })?],
        None => gen_curriculum_dataset(a.pairs, a.noise_start, a.noise_end, seed, &base)?,
    };
    let mut w = output::create(&a.out)?;
    write_ndjson(&mut w, &pairs, &cfg)?;
    println!(
        "wrote {} pairs (n = {}) to {}",
        pairs.len(),
        a.n,
        a.out.display()
    );
    Ok(Outcome::Pass)
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let cfg = RunConfig::new("verify-theorems", a)?;
    let report = verify_theorems(&TheoremOptions {
        pairs: a.pairs,
        n_min: a.nmin,
        n_max: a.nmax,
        dims: a.dims.clone(),
        seed: a.seed,
        sabotage: a.sabotage,
    })?;
    output::write_json(&a.out, &cfg, &report)?;
    if report.all_passed {
        println!("all {} pairs passed", report.records.len());
        return Ok(Outcome::Pass);
    }
    eprintln!(
        "{} violations in {} pairs; first offending pair:",
        report.violations.len(),
        report.records.len()
    );
    eprintln!("{}", serde_json::to_string(&report.violations[0])?);
    Ok(Outcome::CheckFailed)
}

#[derive(Serialize)]
struct PairOut {
    noise_level: f64,
    pair_id: usize,
    accuracy: f64,
    is_permutation: bool,
    sinkhorn_iters: usize,
}

#[derive(Serialize)]
struct LevelSummary {
    noise_level: f64,
    pairs: usize,
    accuracy: f64,
    permutation_rate: f64,
    mean_sinkhorn_iters: f64,
}

pub fn match_bench(a: &MatchBenchArgs) -> Result<Outcome> {
    let cfg = RunConfig::new("match-bench", a)?;
    let file = File::open(&a.data).with_context(|| format!("cannot open {}", a.data.display()))?;
    let pairs = read_ndjson(BufReader::new(file))
        .with_context(|| format!("cannot read dataset {}", a.data.display()))?;
    ensure!(!pairs.is_empty(), "dataset {} is empty", a.data.display());

    let mut models = BTreeMap::new();
    for p in &pairs {
        let key = (p.x.dim(), p.x.count());
        if let std::collections::btree_map::Entry::Vacant(e) = models.entry(key) {
            e.insert(BiLipConfig::new(key.0, key.1, a.seed)?);
        }
    }
    let opts = MatchOptions {
        reg: a.reg,
        max_iter: a.max_iter,
        tol: a.tol,
    };
    let results: Vec<MatchResult> = pairs
        .par_iter()
        .map(|p| {
            let model = &models[&(p.x.dim(), p.x.count())];
            match_pair(&p.x, &p.y, model, &opts, Some(&p.truth_perm))
        })
        .collect::<geolip::Result<_>>()?;

    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let mut w = output::create_with_header(&a.out.join("pairs.csv"), &cfg)?;
    {
        let mut csv = csv::Writer::from_writer(&mut w);
        for (id, (p, r)) in pairs.iter().zip(&results).enumerate() {
            csv.serialize(PairOut {
                noise_level: p.noise_level,
                pair_id: id,
                accuracy: r.accuracy.unwrap_or(f64::NAN),
                is_permutation: r.is_permutation,
                sinkhorn_iters: r.sinkhorn_iterations,
            })?;
        }
        csv.flush()?;
    }
    w.flush()?;

    let mut levels: Vec<f64> = pairs.iter().map(|p| p.noise_level).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let summary: Vec<LevelSummary> = levels
        .iter()
        .map(|&level| {
            let group: Vec<&MatchResult> = pairs
                .iter()
                .zip(&results)
                .filter(|(p, _)| p.noise_level == level)
                .map(|(_, r)| r)
                .collect();
            let k = group.len() as f64;
            LevelSummary {
                noise_level: level,
                pairs: group.len(),
                accuracy: group.iter().map(|r| r.accuracy.unwrap_or(0.0)).sum::<f64>() / k,
                permutation_rate: group.iter().filter(|r| r.is_permutation).count() as f64 / k,
                mean_sinkhorn_iters: group
                    .iter()
                    .map(|r| r.sinkhorn_iterations as f64)
                    .sum::<f64>()
                    / k,
            }
        })
        .collect();

    let mut w = output::create_with_header(&a.out.join("summary.csv"), &cfg)?;
    {
        let mut csv = csv::Writer::from_writer(&mut w);
        for row in &summary {
            csv.serialize(row)?;
        }
        csv.flush()?;
    }
    w.flush()?;

    println!(
        "{:>12} {:>6} {:>10} {:>10}",
        "noise_level", "pairs", "accuracy", "perm_rate"
    );
    for s in &summary {
        println!(
            "{:>12} {:>6} {:>10.4} {:>10.4}",
            s.noise_level, s.pairs, s.accuracy, s.permutation_rate
        );
    }
    if a.check_monotone {
        if let Some(w) = summary.windows(2).find(|w| w[1].accuracy > w[0].accuracy) {
            eprintln!(
                "accuracy rises from {:.4} at noise {} to {:.4} at noise {}",
                w[0].accuracy, w[0].noise_level, w[1].accuracy, w[1].noise_level
            );
            return Ok(Outcome::CheckFailed);
        }
    }
    Ok(Outcome::Pass)
}

enum Model {
    Wl1(Wl1Config),
    BiLip(BiLipConfig),
    Sym(BiLipConfig, Symmetrizer),
}

fn bilip(x: &PointSet, cfg: &BiLipConfig) -> geolip::Result<DVector<f64>> {
    if cfg.dim() == 2 {
        bilip_2d(x, cfg).map(|o| o.0)
    } else {
        bilip_general(x, cfg).map(|o| o.0)
    }
}

impl Model {
    fn build(a: &DistortArgs, n: usize) -> Result<Self> {
        let seed = derive_seed(a.seed, 1);
        let bilip_cfg = || -> Result<BiLipConfig> {
            let cfg = BiLipConfig::new(a.dim, n, seed)?;
            Ok(match a.phi_dim {
                Some(m) => cfg.with_phi_dim(m)?,
                None => cfg,
            })
        };
        Ok(match a.model {
            ModelArg::Wl1 => Model::Wl1(Wl1Config::new(seed, n, a.iterations, a.hidden)?),
            ModelArg::Bilip2d | ModelArg::Bilipgen => Model::BiLip(bilip_cfg()?),
            ModelArg::Sym => {
                let cfg = bilip_cfg()?;
                let sym = Symmetrizer::new(a.dim, cfg.output_dim(), derive_seed(a.seed, 2))?;
                Model::Sym(cfg, sym)
            }
        })
    }

    fn eval(&self, x: &PointSet) -> geolip::Result<DVector<f64>> {
        match self {
            Model::Wl1(cfg) => wl1_forward(x, cfg).map(|o| o.0),
            Model::BiLip(cfg) => bilip(x, cfg),
            Model::Sym(cfg, sym) => sym.apply(|z| bilip(z, cfg), x),
        }
    }
}

fn metric_kind(m: MetricArg) -> MetricKind {
    match m {
        MetricArg::Pm => MetricKind::Pm,
        MetricArg::PmProper => MetricKind::PmProper,
        MetricArg::Hgw => MetricKind::Hgw,
    }
}

pub fn distort(a: &DistortArgs) -> Result<Outcome> {
    if a.model == ModelArg::Bilip2d && a.dim != 2 {
        bail!("model bilip2d needs --dim 2, got {}", a.dim);
    }
    ensure!(a.n_min <= a.n_max, "--n-min exceeds --n-max");
    let cfg = RunConfig::new("distort", a)?;
    let counts: Vec<usize> = match a.sampler {
        SamplerArg::Random => (a.n_min..=a.n_max).collect(),
        SamplerArg::Epsilon => vec![a.n_max],
    };
    let mut models = BTreeMap::new();
    for &n in &counts {
        models.insert(n, Model::build(a, n)?);
    }
    let sampler: Box<dyn PairSampler> = match a.sampler {
        SamplerArg::Random => Box::new(RandomPairs {
            dim: a.dim,
            n_min: a.n_min,
            n_max: a.n_max,
            orientation: Orientation::Any,
        }),
        SamplerArg::Epsilon => {
            ensure!(!a.epsilons.is_empty(), "--epsilons is empty");
            Box::new(EpsilonPairs {
                n: a.n_max,
                dim: a.dim,
                epsilons: a.epsilons.clone(),
            })
        }
    };
    let kind = metric_kind(a.metric);
    let opts = ScanOptions {
        pairs: a.pairs,
        seed: a.seed,
        omega_c: a.omega_c,
        ..Default::default()
    };
    let report = distortion_scan(
        |x: &PointSet| models[&x.count()].eval(x),
        |x: &PointSet, y: &PointSet| kind.eval(x, y),
        sampler.as_ref(),
        &opts,
    )?;

    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    output::write_json(&a.out.join("report.json"), &cfg, &report)?;
    let mut w = output::create_with_header(&a.out.join("pairs.csv"), &cfg)?;
    report.write_csv(&mut w)?;
    w.flush()?;
    print!(
        "{} pairs ({} rejected): ratio_min {:.6e}, ratio_max {:.6e}",
        report.pairs_sampled, report.pairs_rejected, report.ratio_min, report.ratio_max
    );
    match &report.holder {
        Some(h) => println!(", log-log slope {:.3}", h.slope),
        None => println!(),
    }
    Ok(Outcome::Pass)
}

fn load_point_set(path: &Path) -> Result<PointSet> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "bin") {
        PointSet::from_bytes(&bytes)?
    } else {
        serde_json::from_slice(&bytes)?
    };
    Ok(parsed)
}

#[derive(Serialize)]
struct MetricOut {
    value: f64,
    witness_perm: Option<Vec<usize>>,
    exact: bool,
    wall_time_ms: f64,
}

pub fn metric(a: &MetricArgs) -> Result<Outcome> {
    let cfg = RunConfig::new("metric", a)?;
    let x = load_point_set(&a.x)?;
    let y = load_point_set(&a.y)?;
    let start = Instant::now();
    let r = match a.kind {
        MetricKindArg::Pm => pm_exact(&x, &y, false)?,
        MetricKindArg::PmProper => pm_exact(&x, &y, true)?,
        MetricKindArg::Hgw => hgw_exact(&x, &y)?,
        MetricKindArg::Winf => wass_inf(
            &MultiSet::from_columns(x.matrix())?,
            &MultiSet::from_columns(y.matrix())?,
        )?,
    };
    let out = MetricOut {
        value: r.value,
        witness_perm: r.witness.as_ref().map(|w| w.perm().as_slice().to_vec()),
        exact: r.exact,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    match &a.out {
        Some(path) => output::write_json(path, &cfg, &out)?,
        None => {
            let doc = json!({
                "format_version": output::FORMAT_VERSION,
                "run_config": cfg,
                "value": out.value,
                "witness_perm": out.witness_perm,
                "exact": out.exact,
                "wall_time_ms": out.wall_time_ms,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    Ok(Outcome::Pass)
}

fn num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => x.to_string(),
        None => "nan".into(),
    }
}

pub fn plot_data(a: &PlotDataArgs) -> Result<Outcome> {
    let cfg = RunConfig::new("plot-data", a)?;
    let is_csv = a.input.extension().is_some_and(|e| e == "csv");
    let mut w = output::create_with_header(&a.out, &cfg)?;
    if is_csv {
        let file =
            File::open(&a.input).with_context(|| format!("cannot open {}", a.input.display()))?;
        let mut body = String::new();
        for line in BufReader::new(file).lines() {
            let line = line?;
            match line.strip_prefix("# run_config: ") {
                Some(src) => writeln!(w, "# source_run_config: {src}")?,
                None if line.starts_with('#') => {}
                None => {
                    body.push_str(&line);
                    body.push('\n');
                }
            }
        }
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let headers = rdr.headers()?.clone();
        writeln!(w, "# {}", headers.iter().collect::<Vec<_>>().join(" "))?;
        for rec in rdr.records() {
            writeln!(w, "{}", rec?.iter().collect::<Vec<_>>().join(" "))?;
        }
    } else {
        let text = fs::read_to_string(&a.input)
            .with_context(|| format!("cannot read {}", a.input.display()))?;
        let doc: Value = serde_json::from_str(&text)
            .with_context(|| format!("{} is not JSON", a.input.display()))?;
        if let Some(src) = doc.get("run_config") {
            writeln!(w, "# source_run_config: {src}")?;
        }
        if let Some(rows) = doc.get("per_pair").and_then(Value::as_array) {
            writeln!(w, "# pair_id metric model_dist ratio")?;
            for r in rows {
                writeln!(
                    w,
                    "{} {} {} {}",
                    num(&r["pair_id"]),
                    num(&r["metric"]),
                    num(&r["model_dist"]),
                    num(&r["ratio"])
                )?;
            }
        } else if let Some(rows) = doc.get("records").and_then(Value::as_array) {
            writeln!(w, "# pair_id count pm hgw gram_lower gram_mid gram_upper")?;
            for r in rows {
                writeln!(
                    w,
                    "{} {} {} {} {} {} {}",
                    num(&r["pair_id"]),
                    num(&r["count"]),
                    num(&r["pm"]),
                    num(&r["hgw"]),
                    num(&r["gram"]["lower"]),
                    num(&r["gram"]["mid"]),
                    num(&r["gram"]["upper"])
                )?;
            }
        } else {
            bail!(
                "{} is neither a distortion nor a theorem report",
                a.input.display()
            );
        }
    }
    w.flush()?;
    println!("wrote {}", a.out.display());
    Ok(Outcome::Pass)
}
