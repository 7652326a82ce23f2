mod args;
mod config;
mod manifest;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::Parser;

use ohmnet_core::eval::{
    cross_validate, project_2d, transfer_predict, EvalConfig, EvalReport, Representation,
    TransferConfig,
};
use ohmnet_core::io;
use ohmnet_core::synth::{self, SynthConfig};
use ohmnet_core::train::{train_collapsed, train_independent, train_with};
use ohmnet_core::walks::simulate_walks;
use ohmnet_core::{EmbeddingSet, ExecMode, MultiLayerNetwork, TrainConfig, WalkConfig};

use args::{Cli, Command, Common, EvalArgs, ProjectArgs, SynthArgs, TrainArgs, TransferArgs, WalkArgs, WalkOptions};
use manifest::RunManifest;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<()> {
    let argv = config::expand(std::env::args_os().collect())?;
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    match cli.command {
        Command::Synth(a) => synth_cmd(a),
        Command::Walk(a) => walk_cmd(a),
        Command::Train(a) => train_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Transfer(a) => transfer_cmd(a),
        Command::Project(a) => project_cmd(a),
    }
}

fn setup_threads(common: &Common) -> Result<ExecMode> {
    let mode = ExecMode::from(common.mode);
    if let Some(threads) = common.threads {
        ensure!(threads > 0, "--threads must be at least 1");
        if mode == ExecMode::Parallel {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .context("configuring the worker pool")?;
        }
    }
    Ok(mode)
}

fn walk_config(opts: &WalkOptions, seed: u64) -> WalkConfig {
    WalkConfig {
        walks_per_node: opts.walks_per_node,
        walk_length: opts.length,
        p: opts.p,
        q: opts.q,
        seed,
        ..WalkConfig::default()
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn load_network(path: &Path) -> Result<MultiLayerNetwork> {
    io::read_network(path).with_context(|| format!("loading layers from {}", path.display()))
}

/// Adds the manifest and every edge list it names.
fn record_layers<C: serde::Serialize>(m: &mut RunManifest<C>, path: &Path) -> Result<()> {
    m.input(path)?;
    for (_, file) in io::LayerManifest::read(path)?.entries {
        m.input(&file)?;
    }
    Ok(())
}

fn write_report(report: &EvalReport, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    report.write_tsv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn synth_cmd(a: SynthArgs) -> Result<()> {
    let config = SynthConfig {
        nodes_per_layer: a.nodes,
        layers: a.num_layers,
        hierarchy_depth: a.depth,
        communities: a.communities,
        p_in: a.p_in,
        p_out: a.p_out,
        divergence: a.divergence,
        seed: a.common.seed,
    };
    let bench = synth::generate(&config)?;
    create_dir(&a.out)?;
    let manifest_path = a.out.join("layers.tsv");
    io::write_network(&bench.network, &manifest_path, &a.out.join("edges"))?;
    io::write_hierarchy(&bench.hierarchy, &a.out.join("hierarchy.txt"))?;
    io::write_labels(&bench.labels, &bench.network, &a.out.join("labels.txt"))?;

    // Read everything back before declaring success.
    let net = load_network(&manifest_path)?;
    io::read_hierarchy(&a.out.join("hierarchy.txt"), &net.layer_names())?;
    io::read_labels(&a.out.join("labels.txt"), &net)?;
    log::info!(
        "{} layers, {} nodes, {} hierarchy elements",
        net.num_layers(),
        net.num_nodes(),
        bench.hierarchy.len()
    );
    RunManifest::new("synth", Some(a.common.seed), &a).write(&a.out)
}

fn walk_cmd(a: WalkArgs) -> Result<()> {
    let mode = setup_threads(&a.common)?;
    let net = load_network(&a.layers)?;
    let mut m = RunManifest::new("walk", Some(a.common.seed), &a);
    record_layers(&mut m, &a.layers)?;
    let corpus = simulate_walks(&net, &walk_config(&a.walk, a.common.seed), mode)?;
    create_dir(&a.out)?;
    io::write_walks(&corpus, &net, &a.out)?;
    let back = io::read_walks(&a.out, &net)?;
    ensure!(back.num_layers() == corpus.num_layers(), "walk files in {} did not read back", a.out.display());
    m.write(&a.out)
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let mode = setup_threads(&a.common)?;
    let net = load_network(&a.layers)?;
    let mut m = RunManifest::new("train", Some(a.common.seed), &a);
    record_layers(&mut m, &a.layers)?;
    let config = TrainConfig {
        dim: a.dim,
        lambda: a.lambda,
        negatives: a.negatives,
        window: a.window,
        alpha: a.alpha,
        outer_iters: a.outer_iters,
        tol: a.tol,
        seed: a.common.seed,
        mode,
    };
    config.validate()?;
    let walks = walk_config(&a.walk, a.common.seed);

    let set = if a.collapsed {
        train_collapsed(&net, &walks, &config)?
    } else {
        let corpus = match &a.walks_dir {
            Some(dir) => {
                m.input(dir)?;
                io::read_walks(dir, &net).with_context(|| format!("loading walks from {}", dir.display()))?
            }
            None => simulate_walks(&net, &walks, mode)?,
        };
        if a.independent {
            train_independent(&net, &corpus, &config)?
        } else {
            let Some(path) = &a.hierarchy else {
                bail!("--hierarchy is required unless --independent or --collapsed is given");
            };
            m.input(path)?;
            let hierarchy = io::read_hierarchy(path, &net.layer_names())
                .with_context(|| format!("loading hierarchy from {}", path.display()))?;
            train_with(&net, &hierarchy, &corpus, &config, |report, _| {
                log::info!(
                    "iteration {}: leaves {:.2?}, hierarchy {:.2?}",
                    report.iteration + 1,
                    report.leaf_time,
                    report.hierarchy_time
                );
                Ok(())
            })?
        }
    };

    create_dir(&a.out)?;
    if a.checkpoint {
        io::write_checkpoint(&set, &net, &a.out)?;
    } else {
        io::write_embeddings(&set, &net, &a.out)?;
    }
    verify_embeddings(&set, &net, &a.out)?;
    m.write(&a.out)
}

fn verify_embeddings(set: &EmbeddingSet, net: &MultiLayerNetwork, dir: &Path) -> Result<()> {
    let back = io::read_embeddings(dir, net)?;
    ensure!(back.len() == set.len(), "{} holds {} tables, expected {}", dir.display(), back.len(), set.len());
    for (written, read) in set.elements().iter().zip(back.elements()) {
        ensure!(
            written.name == read.name && written.layer == read.layer && written.input == read.input,
            "table `{}` in {} does not match what was trained",
            written.name,
            dir.display()
        );
    }
    Ok(())
}

fn representation<'a>(set: &'a EmbeddingSet, net: &MultiLayerNetwork) -> Result<Representation<'a>> {
    if set.len() == 1 && set.element(0).layer.is_none() {
        // Collapsed baseline: one table serves every layer.
        return Ok(Representation::shared(set.table(0), net.num_layers()));
    }
    Ok(Representation::per_layer(set, net.num_layers())?)
}

fn eval_cmd(a: EvalArgs) -> Result<()> {
    let mode = setup_threads(&a.common)?;
    let net = load_network(&a.layers)?;
    let mut m = RunManifest::new("eval", Some(a.common.seed), &a);
    record_layers(&mut m, &a.layers)?;
    m.input(&a.embeddings)?;
    m.input(&a.labels)?;
    let set = io::read_embeddings(&a.embeddings, &net)?;
    let labels = io::read_labels(&a.labels, &net)?;
    let config = EvalConfig {
        folds: a.folds,
        min_annotated: a.min_annotated,
        layers: None,
        classifier: a.classifier.config(),
        seed: a.common.seed,
        mode,
    };
    let mut report = cross_validate(&net, &representation(&set, &net)?, &labels, &config)?;
    report.method = a.embeddings.display().to_string();
    if report.is_empty() {
        log::warn!("no (layer, function) pair has {} positives", a.min_annotated);
    }
    create_dir(&a.out)?;
    write_report(&report, &a.out.join("report.tsv"))?;
    m.write(&a.out)
}

fn transfer_cmd(a: TransferArgs) -> Result<()> {
    let mode = setup_threads(&a.common)?;
    let net = load_network(&a.layers)?;
    let mut m = RunManifest::new("transfer", Some(a.common.seed), &a);
    record_layers(&mut m, &a.layers)?;
    m.input(&a.hierarchy)?;
    m.input(&a.embeddings)?;
    m.input(&a.labels)?;
    let hierarchy = io::read_hierarchy(&a.hierarchy, &net.layer_names())?;
    let set = io::read_embeddings(&a.embeddings, &net)?;
    let labels = io::read_labels(&a.labels, &net)?;
    let target = net
        .layer_by_name(&a.target)
        .with_context(|| format!("no layer named `{}`", a.target))?
        .id();
    let config = TransferConfig {
        weighting: a.weighting.into(),
        min_annotated: a.min_annotated,
        classifier: a.classifier.config(),
        seed: a.common.seed,
        mode,
    };
    let report = transfer_predict(&net, &representation(&set, &net)?, &labels, &hierarchy, target, &config)?;
    create_dir(&a.out)?;
    write_report(&report, &a.out.join("transfer.tsv"))?;
    m.write(&a.out)
}

fn project_cmd(a: ProjectArgs) -> Result<()> {
    let net = load_network(&a.layers)?;
    let mut m = RunManifest::new("project", None, &a);
    record_layers(&mut m, &a.layers)?;
    m.input(&a.embeddings)?;
    let set = io::read_embeddings(&a.embeddings, &net)?;
    let table = match set.by_name(&a.element) {
        Some(element) => &element.input,
        None => net
            .layer_by_name(&a.element)
            .and_then(|l| set.layer_table(l.id()))
            .with_context(|| format!("no element or layer named `{}` in {}", a.element, a.embeddings.display()))?,
    };
    let points = project_2d(table)?;
    create_dir(&a.out)?;
    let path = a.out.join("projection.tsv");
    let mut out = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(out, "node\tx\ty")?;
    for (u, x, y) in points {
        writeln!(out, "{}\t{x}\t{y}", net.registry().name(u))?;
    }
    out.flush()?;
    io::write_table(table, net.registry(), &a.out.join("vectors.emb"))?;
    m.write(&a.out)
}
