use std::io::Write;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use clap::Parser;

use netinterp::chain::{
    approx_limiting_distribution, empirical_hitting_time, expected_hitting_time, fit_rate, DistanceChain,
    LimitingDistribution,
};
use netinterp::generators::{erdos_renyi, extrapolate, extrapolate_sequence, random_edges, sbm, GrowthModel, SbmSpec};
use netinterp::io::{
    aggregate_snapshots, parse_author_lists, read_edge_list, read_graph, read_trace, stride_cutoffs,
    write_distribution_csv, write_graph, write_hitting_csv, write_trace,
};
use netinterp::spectral::{
    sbm_transition_experiment, write_linear_csv, write_spectrum_csv, write_transition_csv, ClusterOptions, Scenario,
    TransitionConfig,
};
use netinterp::stats::{stat_row, stats_along_trace, write_stats_csv, StatRow};
use netinterp::{edit_distance, interpolate_sequence, max_edit_distance, Graph, InterpolationConfig, StopMode};

use crate::plot::{line_chart, Series};
use crate::run::{read_manifest, RunDir};
use crate::*;

pub fn dispatch(cli: Cli, args: &[String]) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Interpolate(a) => cmd_interpolate(a, out, args),
        Command::HittingTime(a) => cmd_hitting_time(a, out, args),
        Command::LimitingDist(a) => cmd_limiting_dist(a, out, args),
        Command::FitRate(a) => cmd_fit_rate(a),
        Command::Baseline(a) => cmd_baseline(a, out, args),
        Command::Generate(a) => cmd_generate(a, out, args),
        Command::SbmExperiment(a) => cmd_sbm_experiment(a, out, args),
        Command::Stats(a) => cmd_stats(a, out, args),
        Command::Aggregate(a) => cmd_aggregate(a, out, args),
        Command::Replay(a) => cmd_replay(a, out),
    }
}

fn load_graph(run: &mut RunDir, p: &Path) -> Result<Graph> {
    run.input(p);
    read_graph(p).with_context(|| format!("reading graph {}", p.display()))
}

fn max_distance(d_m: Option<u64>, n: Option<usize>) -> Result<u64> {
    match (d_m, n) {
        (Some(d), _) => Ok(d),
        (None, Some(n)) => Ok(max_edit_distance(n, false)),
        (None, None) => bail!("give either --dm or --n"),
    }
}

fn finish(run: RunDir) -> Result<()> {
    let dir = run.finish()?;
    println!("output: {}", dir.display());
    Ok(())
}

fn stat_charts(run: &mut RunDir, rows: &[StatRow]) -> Result<()> {
    let pts = |f: fn(&StatRow) -> f64| rows.iter().map(|r| (r.step as f64, f(r))).collect::<Vec<_>>();
    run.write_text(
        "distance.svg",
        &line_chart("Edit distance to target", "step", "d", &[Series::new("d", pts(|r| r.distance as f64))]),
    )?;
    run.write_text(
        "clustering.svg",
        &line_chart(
            "Clustering coefficients",
            "step",
            "clustering",
            &[
                Series::new("mean", pts(|r| r.mean_cc)),
                Series::new("global", pts(|r| r.global_cc)),
            ],
        ),
    )
}

fn cmd_interpolate(a: &InterpolateArgs, out: Option<&Path>, args: &[String]) -> Result<()> {
    let mut run = RunDir::create(out, "interpolate", args, a, Some(a.seed))?;
    let snapshots = a
        .snapshots
        .iter()
        .map(|p| load_graph(&mut run, p))
        .collect::<Result<Vec<_>>>()?;
    let cfg = InterpolationConfig {
        rate: a.rate,
        target_distance: a.target_distance,
        stop: match a.mode {
            Mode::UntilTarget => StopMode::UntilTarget,
            Mode::UntilDistance => StopMode::UntilDistance,
            Mode::Fixed => StopMode::FixedSteps(a.steps.context("--mode fixed needs --steps")?),
        },
        allow_false_edges: !a.no_false_edges,
        seed: a.seed,
        stat_sample_every: a.stats_every,
        step_limit: a.step_limit,
    };
    let traces = interpolate_sequence(&snapshots, &cfg)?;
    let single = traces.len() == 1;
    let mut all_rows = Vec::new();
    let mut offset = 0;
    for (i, (trace, start)) in traces.iter().zip(&snapshots).enumerate() {
        let name = if single { "trace.txt".to_string() } else { format!("trace_{i:03}.txt") };
        write_trace(run.output(&name), trace)?;
        let every = cfg.stat_stride(start.n(), trace.len() as u64);
        let mut rows = stats_along_trace(start, trace, every)?;
        if i > 0 {
            rows.remove(0);
        }
        for r in &mut rows {
            r.step += offset;
            if !single {
                r.extra.insert("pair".into(), i as f64);
            }
        }
        offset += trace.len() as u64;
        all_rows.extend(rows);
        println!(
            "pair {i}: steps={} initial_distance={} final_distance={} fallbacks={}",
            trace.len(),
            trace.initial_distance,
            trace.final_distance(),
            trace.fallback_count()
        );
    }
    write_stats_csv(run.writer("stats.csv")?, &all_rows)?;
    stat_charts(&mut run, &all_rows)?;
    finish(run)
}

fn cmd_hitting_time(a: &HittingArgs, out: Option<&Path>, args: &[String]) -> Result<()> {
    if !a.empirical {
        let d_m = max_distance(a.d_m, a.n)?;
        let d_o = a.d_o.context("--do is required")?;
        let h = expected_hitting_time(d_o, a.d_t, d_m, a.rate, a.tol)?;
        println!("expected_steps={} terms_used={}", h.value, h.terms_used);
        return Ok(());
    }
    let mut run = RunDir::create(out, "hitting-time", args, a, Some(a.seed))?;
    let start = load_graph(&mut run, a.start.as_deref().context("--start is required")?)?;
    let target = load_graph(&mut run, a.target.as_deref().context("--target is required")?)?;
    let d_o = edit_distance(&start, &target)?;
    let d_m = start.max_edit_distance();
    let analytic = expected_hitting_time(d_o, a.d_t, d_m, a.rate, a.tol)?;
    let cfg = InterpolationConfig {
        rate: a.rate,
        target_distance: a.d_t,
        stop: StopMode::UntilDistance,
        seed: a.seed,
        ..InterpolationConfig::default()
    };
    let sample = empirical_hitting_time(&start, &target, &cfg, a.trials)?;
    write_hitting_csv(run.writer("hitting.csv")?, &sample)?;
    let summary = serde_json::json!({
        "d_o": d_o,
        "d_t": a.d_t,
        "d_m": d_m,
        "rate": a.rate,
        "trials": a.trials,
        "analytic": analytic.value,
        "terms_used": analytic.terms_used,
        "empirical_mean": sample.mean(),
        "empirical_variance": sample.variance(),
        "median": sample.quantile(0.5),
        "relative_error": (sample.mean() - analytic.value).abs() / analytic.value.max(f64::MIN_POSITIVE),
    });
    run.write_text("summary.json", &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    println!(
        "expected_steps={} terms_used={} empirical_mean={} trials={}",
        analytic.value,
        analytic.terms_used,
        sample.mean(),
        a.trials
    );
    finish(run)
}

fn distribution_series(name: &str, d: &LimitingDistribution) -> Series {
    Series::new(name, d.states().map(|(s, w)| (s as f64, w)).collect())
}

fn cmd_limiting_dist(a: &LimitingArgs, out: Option<&Path>, args: &[String]) -> Result<()> {
    let d_m = max_distance(a.d_m, a.n)?;
    ensure!(a.d_t <= d_m, "target distance {} exceeds the maximum distance {d_m}", a.d_t);
    let k_max = a.k_max.unwrap_or(a.d_t.saturating_sub(1));
    let mut run = RunDir::create(out, "limiting-dist", args, a, None)?;
    let mut series = Vec::new();
    let exact = (!a.approx).then(|| DistanceChain::new(a.rate, a.d_t, d_m).map(|c| c.exact_limiting_distribution()));
    let approx = (a.approx || a.compare).then(|| approx_limiting_distribution(a.d_t, a.rate, k_max, d_m));
    if let Some(exact) = exact {
        let exact = exact?;
        let name = if a.compare { "exact.csv" } else { "distribution.csv" };
        write_distribution_csv(run.writer(name)?, &exact)?;
        series.push(distribution_series("exact", &exact));
        if let Some(approx) = &approx {
            let approx = approx.as_ref().map_err(|e| anyhow::anyhow!("{e}"))?;
            let gap = approx
                .states()
                .map(|(s, w)| (w - exact.weight(s).unwrap_or(0.0)).abs())
                .fold(0.0, f64::max);
            println!("max_gap={gap} hypotheses_hold={}", approx.hypotheses_hold);
        }
    }
    if let Some(approx) = approx {
        let approx = approx?;
        let name = if a.compare { "approx.csv" } else { "distribution.csv" };
        write_distribution_csv(run.writer(name)?, &approx)?;
        if !approx.hypotheses_hold {
            eprintln!("warning: approximation outside its validity regime (needs d_m >= 2 d_t, d_t >= 2, k_max < d_t)");
        }
        series.push(distribution_series("approx", &approx));
    }
    run.write_text(
        "distribution.svg",
        &line_chart("Limiting distribution", "edit distance", "probability", &series),
    )?;
    finish(run)
}

fn cmd_fit_rate(a: &FitArgs) -> Result<()> {
    let d_m = max_distance(a.d_m, a.n)?;
    let s = fit_rate(a.d_o, a.d_t, d_m, a.steps, a.grid)?;
    let h = expected_hitting_time(a.d_o, a.d_t, d_m, s, f64::EPSILON)?;
    println!("rate={s} expected_steps={}", h.value);
    Ok(())
}

fn growth_model(a: &BaselineArgs) -> GrowthModel {
    match a.model {
        ModelKind::Uniform => GrowthModel::Uniform { m: a.m },
        ModelKind::Preferential => GrowthModel::Preferential { m: a.m },
        ModelKind::TriangleClosing => GrowthModel::TriangleClosing {
            m_r: a.m_r,
            p_r: a.p_r,
            m_n: a.m_n,
            p_n: a.p_n,
        },
    }
}

fn cmd_baseline(a: &BaselineArgs, out: Option<&Path>, args: &[String]) -> Result<()> {
    let mut run = RunDir::create(out, "baseline", args, a, Some(a.seed))?;
    let snapshots = a
        .snapshots
        .iter()
        .map(|p| load_graph(&mut run, p))
        .collect::<Result<Vec<_>>>()?;
    let model = growth_model(a);
    model.validate()?;
    let records = if snapshots.len() == 1 {
        let size = a.start_clique.unwrap_or_else(|| model.start_clique_size());
        vec![extrapolate(size, &model, &snapshots[0], a.seed)?]
    } else {
        extrapolate_sequence(&snapshots, &model, a.seed, a.every)?
    };
    let mut rows = Vec::new();
    let mut offset = 0;
    for (i, rec) in records.iter().enumerate() {
        if !rec.reached {
            eprintln!("warning: pair {i} stopped before reaching the target edge count");
        }
        for (j, r) in rec.rows.iter().enumerate() {
            if i > 0 && j == 0 {
                continue;
            }
            let mut r = r.clone();
            r.step += offset;
            r.extra.insert("pair".into(), i as f64);
            rows.push(r);
        }
        offset += rec.steps;
        let last = rec.rows.last().expect("records have a start row");
        println!(
            "pair {i}: model={} steps={} edges={} mean_cc={} global_cc={} reached={}",
            model.name(),
            rec.steps,
            last.edges,
            last.mean_cc,
            last.global_cc,
            rec.reached
        );
    }
    write_stats_csv(run.writer("stats.csv")?, &rows)?;
    stat_charts(&mut run, &rows)?;
    finish(run)
}

fn cmd_generate(a: &GenerateArgs, out: Option<&Path>, args: &[String]) -> Result<()> {
    let mut run = RunDir::create(out, "generate", args, a, Some(a.seed))?;
    let (g, labels) = match a.kind {
        GraphKind::Er => {
            ensure!((0.0..=1.0).contains(&a.p), "--p must lie in [0, 1]");
            (erdos_renyi(a.n.context("--n is required")?, a.p, a.seed), None)
        }
        GraphKind::Gnm => (
            random_edges(a.n.context("--n is required")?, a.m.context("--m is required")?, a.seed)?,
            None,
        ),
        GraphKind::Sbm => {
            let spec = SbmSpec::new(a.blocks.clone(), a.p, a.q)?;
            let (g, labels) = sbm(&spec, a.seed);
            (g, Some(labels))
        }
    };
    write_graph(run.output("graph.txt"), &g)?;
    if let Some(labels) = labels {
        let mut w = run.writer("labels.csv")?;
        writeln!(w, "vertex,block")?;
        for (v, l) in labels.iter().enumerate() {
            writeln!(w, "{v},{l}")?;
        }
        w.flush()?;
    }
    let pairs = g.max_edit_distance();
    let density = if pairs == 0 { 0.0 } else { g.edge_count() as f64 / pairs as f64 };
    println!("n={} edges={} density={density}", g.n(), g.edge_count());
    finish(run)
}

fn cmd_sbm_experiment(a: &SbmArgs, out: Option<&Path>, args: &[String]) -> Result<()> {
    let mut run = RunDir::create(out, "sbm-experiment", args, a, Some(a.seed))?;
    let cfg = TransitionConfig {
        n: a.n,
        p: a.p,
        q: a.q,
        rate: a.rate,
        target_distance: a.target_distance,
        seed: a.seed,
        stride: a.stride,
        k: a.k,
        linear_points: a.linear_points,
        cluster: ClusterOptions {
            restarts: a.restarts,
            seed: a.seed,
            ..ClusterOptions::default()
        },
    };
    let scenario = match a.scenario {
        ScenarioArg::Split => Scenario::Split,
        ScenarioArg::Independent => Scenario::Independent,
    };
    let res = sbm_transition_experiment(scenario, &cfg)?;
    write_graph(run.output("start.txt"), &res.start)?;
    write_graph(run.output("target.txt"), &res.target)?;
    write_transition_csv(run.writer("transition.csv")?, &res.rows, a.k)?;
    write_spectrum_csv(run.writer("spectrum.csv")?, &res.rows)?;
    write_linear_csv(run.writer("linear.csv")?, &res.linear)?;

    let steps = |f: &dyn Fn(&netinterp::spectral::TransitionRow) -> f64| {
        res.rows.iter().map(|r| (r.step as f64, f(r))).collect::<Vec<_>>()
    };
    run.write_text(
        "recovery.svg",
        &line_chart(
            "Recovery and subspace distance",
            "step",
            "value",
            &[
                Series::new("recovery", steps(&|r| r.recovery)),
                Series::new("subspace distance", steps(&|r| r.subspace_distance)),
            ],
        ),
    )?;
    let spectrum: Vec<Series> = (0..a.n)
        .map(|i| Series::new("", steps(&|r| r.eigenvalues[i])))
        .collect();
    run.write_text("spectrum.svg", &line_chart("Spectrum along the interpolation", "step", "eigenvalue", &spectrum))?;
    let linear: Vec<Series> = (0..a.n)
        .map(|i| Series::new("", res.linear.iter().map(|r| (r.t, r.eigenvalues[i])).collect()))
        .collect();
    run.write_text("linear.svg", &line_chart("Spectrum along the straight line", "t", "eigenvalue", &linear))?;

    let last = res.rows.last().expect("experiment rows are nonempty");
    println!(
        "scenario={} steps={} early_recovery={:.4} late_recovery={:.4} final_recovery={} final_subspace_distance={:e}",
        scenario.name(),
        res.total_steps,
        res.mean_recovery(0.0, 0.1),
        res.mean_recovery(0.9, 1.0),
        last.recovery,
        last.subspace_distance
    );
    finish(run)
}

fn cmd_stats(a: &StatsArgs, out: Option<&Path>, args: &[String]) -> Result<()> {
    let mut run = RunDir::create(out, "stats", args, a, None)?;
    let rows = if let Some(trace_path) = &a.trace {
        let start = load_graph(&mut run, a.start.as_deref().context("--start is required")?)?;
        run.input(trace_path);
        let trace = read_trace(trace_path).with_context(|| format!("reading trace {}", trace_path.display()))?;
        stats_along_trace(&start, &trace, a.every)?
    } else {
        ensure!(!a.graphs.is_empty(), "give graph files or --trace with --start");
        let graphs = a
            .graphs
            .iter()
            .map(|p| load_graph(&mut run, p))
            .collect::<Result<Vec<_>>>()?;
        let last = graphs.last().expect("nonempty");
        graphs
            .iter()
            .enumerate()
            .map(|(i, g)| Ok(stat_row(g, i as u64, edit_distance(g, last)?)))
            .collect::<Result<Vec<_>>>()?
    };
    for r in rows.iter().rev().take(1) {
        println!("rows={} last: edges={} mean_cc={} global_cc={}", rows.len(), r.edges, r.mean_cc, r.global_cc);
    }
    write_stats_csv(run.writer("stats.csv")?, &rows)?;
    stat_charts(&mut run, &rows)?;
    finish(run)
}

const DEFAULT_STRIDE: i64 = 100 * 86_400;

fn cmd_aggregate(a: &AggregateArgs, out: Option<&Path>, args: &[String]) -> Result<()> {
    let mut run = RunDir::create(out, "aggregate", args, a, None)?;
    run.input(&a.events);
    let ev = if a.authors {
        let file = std::fs::File::open(&a.events).with_context(|| format!("opening {}", a.events.display()))?;
        parse_author_lists(std::io::BufReader::new(file), &a.events, a.max_authors)?
    } else {
        read_edge_list(&a.events)?
    };
    let cutoffs = if a.cutoffs.is_empty() {
        stride_cutoffs(&ev, a.stride.unwrap_or(DEFAULT_STRIDE))?
    } else {
        a.cutoffs.clone()
    };
    let set = aggregate_snapshots(&ev, &cutoffs, a.directed)?;
    for (i, (g, cut)) in set.snapshots.iter().zip(&set.cutoffs).enumerate() {
        write_graph(run.output(&format!("snapshot_{i:03}.txt")), g)?;
        println!("snapshot {i}: cutoff={cut} edges={}", g.edge_count());
    }
    let mut w = run.writer("labels.csv")?;
    writeln!(w, "vertex,label")?;
    for (i, l) in ev.labels.iter().enumerate() {
        writeln!(w, "{i},{l}")?;
    }
    w.flush()?;
    finish(run)
}

fn cmd_replay(a: &ReplayArgs, out: Option<&Path>) -> Result<()> {
    let manifest = read_manifest(&a.manifest)?;
    let mut argv = vec!["netinterp".to_string()];
    argv.extend(manifest.args.iter().cloned());
    let mut cli = Cli::try_parse_from(&argv).context("manifest arguments no longer parse")?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!("refusing to replay a replay");
    }
    if out.is_some() {
        cli.out = out.map(Path::to_path_buf);
    }
    dispatch(cli, &manifest.args)
}
