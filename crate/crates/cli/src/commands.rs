use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use serde::Serialize;
use serde_json::json;
use sigreg::format::sig6;
use sigreg::metrics::Metric;
use sigreg::regression::{accuracy, cross_validate, fit, BandwidthGrid, CvCandidate, CvConfig};
use sigreg::sde_lab::{
    convergence_experiment, empirical_small_ball, sample_brownian, ConvergenceTable, ExperimentConfig,
    TEST_STREAM_OFFSET,
};
use sigreg::signature::{path_signature, time_augment};
use sigreg::tensor_algebra::free_lie_dim;
use sigreg::{Path, RngSpec, SdeConfig};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::records::{read_records, Series};
use crate::{
    ClassifyArgs, Cli, Command, CvArgs, DistArgs, NuArgs, SdeBenchArgs, SigArgs, SmallballArgs,
};

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Sig(a) => sig(a, stdout),
        Command::Dist(a) => dist(a, stdout),
        Command::SdeBench(a) => sde_bench(a, stdout),
        Command::Classify(a) => classify(a, stdout),
        Command::Smallball(a) => smallball(a, stdout),
        Command::Nu(a) => nu(a, stdout),
    }
}

fn emit(out: Option<&FsPath>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(FsPath::new("<stdout>"), e)),
    }
}

fn augmented(series: &[Series], augment: bool) -> Vec<Path> {
    series
        .iter()
        .map(|s| {
            if augment {
                time_augment(&s.path).into_path()
            } else {
                s.path.clone()
            }
        })
        .collect()
}

#[derive(Serialize)]
struct SignatureLine<'a> {
    id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<f64>,
    dim: usize,
    level: usize,
    signature: Vec<f64>,
}

fn sig(args: &SigArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.level == 0 {
        return Err(CliError::Usage("--level must be at least 1".into()));
    }
    let series = read_records(&args.input)?;
    let paths = augmented(&series, args.augment_time);
    let mut text = String::new();
    for (s, p) in series.iter().zip(&paths) {
        let sig = path_signature(p, args.level);
        let line = SignatureLine {
            id: &s.record.id,
            label: s.record.label.as_deref(),
            target: s.record.target,
            dim: p.dim(),
            level: args.level,
            signature: sig.to_flat(),
        };
        text.push_str(&serde_json::to_string(&line).expect("serializable"));
        text.push('\n');
    }
    emit(args.out.as_deref(), &text, stdout)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn dist(args: &DistArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut metric = Metric::new(args.metric);
    if args.augment_time {
        metric = metric.with_time_augmentation();
    }
    let rows = read_records(&args.input)?;
    let row_emb = metric.embed_all(&rows.iter().map(|s| s.path.clone()).collect::<Vec<_>>());
    let (cols, matrix) = match &args.other {
        None => {
            let m = metric.pairwise(&row_emb)?;
            (rows.clone(), m)
        }
        Some(other) => {
            let cols = read_records(other)?;
            let col_emb = metric.embed_all(&cols.iter().map(|s| s.path.clone()).collect::<Vec<_>>());
            let m = metric.cross(&row_emb, &col_emb)?;
            (cols, m)
        }
    };
    let mut text = String::from("id");
    for c in &cols {
        text.push(',');
        text.push_str(&csv_field(&c.record.id));
    }
    text.push('\n');
    for (i, r) in rows.iter().enumerate() {
        text.push_str(&csv_field(&r.record.id));
        for d in &matrix[i * cols.len()..(i + 1) * cols.len()] {
            text.push(',');
            text.push_str(&sig6(*d));
        }
        text.push('\n');
    }
    emit(args.out.as_deref(), &text, stdout)
}

fn cv_config(cv: &CvArgs, c_grid: Option<Vec<f64>>, a_grid: Option<Vec<f64>>, seed: u64) -> CvConfig {
    CvConfig {
        folds: cv.cv_folds,
        bandwidths: match &cv.grid_h {
            Some(h) => BandwidthGrid::Explicit(h.clone()),
            None => BandwidthGrid::default_relative(),
        },
        c_grid,
        a_grid,
        seed,
    }
}

fn bandwidths_json(cfg: &CvConfig) -> serde_json::Value {
    match &cfg.bandwidths {
        BandwidthGrid::Explicit(h) => json!({ "explicit": h }),
        BandwidthGrid::RelativeToMedian(m) => json!({ "relative_to_median": m }),
    }
}

fn candidate_json(c: &CvCandidate) -> serde_json::Value {
    json!({
        "bandwidth": c.bandwidth,
        "c": c.robust.map(|p| p.c()),
        "a": c.robust.map(|p| p.a()),
        "cv_score": c.score,
    })
}

/// `results.csv` becomes `results.<suffix>`.
fn sibling(out: &FsPath, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

fn sde_bench(args: &SdeBenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.replicates == 0 {
        return Err(CliError::Usage("--replicates must be at least 1".into()));
    }
    let sde = SdeConfig {
        z0: args.z0,
        horizon: args.horizon,
        steps: args.steps,
        ..SdeConfig::power_xcos(args.p)
    };
    let base = ExperimentConfig {
        m_values: args.m_values.clone(),
        metrics: args.metrics.clone(),
        sde,
        cv: cv_config(&args.cv, Some(args.grid_c.clone()), Some(args.grid_a.clone()), args.seed),
        kernel: args.cv.kernel,
        test_size: args.test_size,
        seed: args.seed,
        augment_time: !args.no_augment_time,
    };
    let timing_path = sibling(&args.out, "timing.csv");
    let manifest_path = sibling(&args.out, "manifest.json");
    let mut manifest = RunManifest::new(
        "sde-bench",
        Some(args.seed),
        json!({
            "m_values": base.m_values,
            "metrics": base.metrics.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "replicates": args.replicates,
            "seeds": (0..args.replicates).map(|r| args.seed + r).collect::<Vec<_>>(),
            "drift": base.sde.drift.to_string(),
            "diffusion": base.sde.diffusion.to_string(),
            "z0": base.sde.z0,
            "horizon": base.sde.horizon,
            "steps": base.sde.steps,
            "test_size": base.test_size,
            "cv_folds": base.cv.folds,
            "bandwidths": bandwidths_json(&base.cv),
            "grid_c": args.grid_c,
            "grid_a": args.grid_a,
            "kernel": base.kernel.to_string(),
            "augment_time": base.augment_time,
        }),
    );

    let mut tables = Vec::new();
    let mut selected = Vec::new();
    for r in 0..args.replicates {
        let seed = args.seed + r;
        let mut cfg = base.clone();
        cfg.seed = seed;
        cfg.cv.seed = seed;
        let table = convergence_experiment(&cfg)?;
        let mut rows = Vec::new();
        for (m, row) in table.m_values.iter().zip(&table.selected) {
            for (spec, cand) in table.metrics.iter().zip(row) {
                let mut entry = candidate_json(cand);
                entry["m"] = json!(m);
                entry["metric"] = json!(spec.to_string());
                rows.push(entry);
            }
        }
        selected.push(json!({ "seed": seed, "selected": rows }));
        tables.push(table);
    }
    let mean = ConvergenceTable::average(&tables)?;
    emit(Some(&args.out), &mean.rmse_csv(), stdout)?;
    emit(Some(&timing_path), &mean.timing_csv(), stdout)?;
    manifest.parameters["selected"] = json!(selected);
    manifest.outputs = vec![
        args.out.display().to_string(),
        timing_path.display().to_string(),
    ];
    manifest.finish();
    manifest.write(&manifest_path)
}

#[derive(Serialize)]
struct Prediction<'a> {
    id: &'a str,
    label: &'a str,
    predicted: String,
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    metric: String,
    selected_metric: String,
    kernel: String,
    augment_time: bool,
    bandwidth: f64,
    c: Option<f64>,
    a: Option<f64>,
    cv_folds: usize,
    cv_accuracy: f64,
    n_train: usize,
    n_test: usize,
    accuracy: f64,
    labels: Vec<String>,
    /// `confusion[true_label][predicted_label]`.
    confusion: BTreeMap<String, BTreeMap<String, usize>>,
    predictions: Vec<Prediction<'a>>,
}

fn labels_of(series: &[Series], file: &FsPath) -> Result<Vec<String>, CliError> {
    series
        .iter()
        .map(|s| {
            s.record.label.clone().ok_or_else(|| CliError::Record {
                file: file.display().to_string(),
                line: s.line,
                message: format!("record {:?} has no label", s.record.id),
            })
        })
        .collect()
}

fn classify(args: &ClassifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let train = read_records(&args.train)?;
    let test = read_records(&args.test)?;
    let train_y = labels_of(&train, &args.train)?;
    let test_y = labels_of(&test, &args.test)?;
    let mut metric = Metric::new(args.metric);
    if args.augment_time {
        metric = metric.with_time_augmentation();
    }
    let cv_cfg = cv_config(&args.cv, args.grid_c.clone(), args.grid_a.clone(), args.seed);
    let mut manifest = RunManifest::new(
        "classify",
        Some(args.seed),
        json!({
            "train": args.train.display().to_string(),
            "test": args.test.display().to_string(),
            "metric": args.metric.to_string(),
            "kernel": args.cv.kernel.to_string(),
            "cv_folds": cv_cfg.folds,
            "bandwidths": bandwidths_json(&cv_cfg),
            "grid_c": args.grid_c,
            "grid_a": args.grid_a,
            "augment_time": args.augment_time,
        }),
    );

    let train_x: Vec<Path> = train.iter().map(|s| s.path.clone()).collect();
    let test_x: Vec<Path> = test.iter().map(|s| s.path.clone()).collect();
    let cv = cross_validate(&cv_cfg, metric, args.cv.kernel, &train_x, &train_y)?;
    let tuned = cv.tuned_metric(metric);
    let model = fit(tuned, args.cv.kernel, cv.best.bandwidth, &train_x, &train_y)?;
    let predicted: Vec<String> = model
        .classify_batch(&test_x)?
        .into_iter()
        .map(|c| c.label)
        .collect();
    let acc = accuracy(&predicted, &test_y)?;

    let mut labels: Vec<String> = train_y.iter().chain(&test_y).chain(&predicted).cloned().collect();
    labels.sort();
    labels.dedup();
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = labels
        .iter()
        .map(|t| (t.clone(), labels.iter().map(|p| (p.clone(), 0)).collect()))
        .collect();
    for (t, p) in test_y.iter().zip(&predicted) {
        *confusion.get_mut(t).and_then(|row| row.get_mut(p)).expect("label registered") += 1;
    }
    let report = ClassifyReport {
        metric: args.metric.to_string(),
        selected_metric: tuned.spec.to_string(),
        kernel: args.cv.kernel.to_string(),
        augment_time: args.augment_time,
        bandwidth: cv.best.bandwidth,
        c: cv.best.robust.map(|p| p.c()),
        a: cv.best.robust.map(|p| p.a()),
        cv_folds: cv_cfg.folds,
        cv_accuracy: cv.best.score,
        n_train: train.len(),
        n_test: test.len(),
        accuracy: acc,
        labels,
        confusion,
        predictions: test
            .iter()
            .zip(&test_y)
            .zip(predicted)
            .map(|((s, label), predicted)| Prediction {
                id: &s.record.id,
                label,
                predicted,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(args.out.as_deref(), &text, stdout)?;
    if let Some(path) = &args.manifest {
        manifest.parameters["selected"] = candidate_json(&cv.best);
        manifest.outputs = args.out.iter().map(|p| p.display().to_string()).collect();
        manifest.finish();
        manifest.write(path)?;
    }
    Ok(())
}

fn smallball(args: &SmallballArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if args.dim == 0 {
        return Err(CliError::Usage("--dim must be at least 1".into()));
    }
    let rng = RngSpec::new(args.seed);
    let draw = |stream: u64| sample_brownian(args.steps, args.horizon, args.dim, &mut rng.stream(stream));
    let samples: Vec<Path> = (0..args.samples as u64).map(draw).collect::<Result<_, _>>()?;
    let centre = draw(TEST_STREAM_OFFSET)?;
    let mut metric = Metric::new(args.metric);
    if args.augment_time {
        metric = metric.with_time_augmentation();
    }
    let curve = empirical_small_ball(&samples, &centre, metric, &args.h_grid.0)?;
    let mut text = String::from("h,fraction\n");
    for (h, f) in curve {
        text.push_str(&format!("{},{}\n", sig6(h), sig6(f)));
    }
    emit(args.out.as_deref(), &text, stdout)
}

fn nu(args: &NuArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let value = free_lie_dim(args.d, args.n)?;
    emit(None, &format!("{value}\n"), stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a1"), "a1");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(FsPath::new("out/res.csv"), "timing.csv"), PathBuf::from("out/res.timing.csv"));
        assert_eq!(sibling(FsPath::new("res"), "manifest.json"), PathBuf::from("res.manifest.json"));
    }
}
