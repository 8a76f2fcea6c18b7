use std::fmt::Display;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use sparsecut::curve::build_curve;
use sparsecut::partition::{tight_volume_params, LocalOutcome, SweepOutcome};
use sparsecut::testbed::{self, PlantedInstance};
use sparsecut::walk::{Masses, WalkSchedule, Walker};
use sparsecut::{
    certify_lower_bound, global_sparsest_cut, load_edge_list, local_partition, write_edge_list,
    EdgeList, GlobalParams, Graph, LocalParams,
};

use crate::{
    CertifyArgs, Command, CurveArgs, Failure, Family, GenerateArgs, GlobalArgs, GlobalTightArgs,
    GraphArg, LocalArgs, OracleArgs,
};

type Out<'a> = &'a mut dyn Write;

pub(crate) fn dispatch(command: Command, out: Out) -> Result<(), Failure> {
    match command {
        Command::Load(args) => load(args, out),
        Command::Generate(args) => generate(args, out),
        Command::Global(args) => global(args, out),
        Command::GlobalTight(args) => global_tight(args, out),
        Command::Local(args) => local(args, out),
        Command::Curve(args) => curve(args, out),
        Command::Walk(args) => walk(args, out),
        Command::Certify(args) => certify(args, out),
        Command::Oracle(args) => oracle(args, out),
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn field(out: Out, key: &str, value: impl Display) -> Result<(), Failure> {
    writeln!(out, "{key}\t{value}")?;
    Ok(())
}

fn read_graph(path: &Path) -> Result<EdgeList, Failure> {
    let file = File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))
        .map_err(Failure::Runtime)?;
    load_edge_list(BufReader::new(file))
        .with_context(|| format!("cannot load {}", path.display()))
        .map_err(Failure::Runtime)
}

fn vertex_of(edges: &EdgeList, label: u64) -> Result<usize, Failure> {
    edges
        .vertex(label)
        .ok_or_else(|| usage(anyhow!("vertex {label} does not occur in the graph")))
}

fn labels_of(edges: &EdgeList, members: &[usize]) -> Vec<u64> {
    let mut labels: Vec<u64> = members.iter().map(|&v| edges.label(v)).collect();
    labels.sort_unstable();
    labels
}

fn joined(labels: &[u64]) -> String {
    labels
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn load(args: GraphArg, out: Out) -> Result<(), Failure> {
    let edges = read_graph(&args.graph)?;
    let g = &edges.graph;
    field(out, "vertices", g.vertex_count())?;
    field(out, "edges", g.edge_count())?;
    field(out, "volume", g.total_volume())?;
    field(out, "duplicate_edges", edges.duplicate_edges)?;
    field(out, "connected", g.is_connected())?;
    field(out, "min_degree", g.degrees().min().unwrap_or(0))?;
    field(out, "max_degree", g.degrees().max().unwrap_or(0))
}

fn generate(args: GenerateArgs, out: Out) -> Result<(), Failure> {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| usage(anyhow!("{:?} needs --{flag}", args.family)))
    };
    let (name, params, graph, planted): (_, String, Graph, Option<PlantedInstance>) =
        match args.family {
            Family::RingOfCliques => {
                let (r, s) = (need(args.r, "r")?, need(args.s, "s")?);
                let inst = testbed::ring_of_cliques(r, s).map_err(usage)?;
                (
                    "ring-of-cliques",
                    format!("r={r} s={s}"),
                    inst.graph.clone(),
                    Some(inst),
                )
            }
            Family::Barbell => {
                let s = need(args.s, "s")?;
                let inst = testbed::barbell(s).map_err(usage)?;
                ("barbell", format!("s={s}"), inst.graph.clone(), Some(inst))
            }
            Family::Path => {
                let n = need(args.n, "n")?;
                (
                    "path",
                    format!("n={n}"),
                    testbed::path(n).map_err(usage)?,
                    None,
                )
            }
            Family::Complete => {
                let n = need(args.n, "n")?;
                (
                    "complete",
                    format!("n={n}"),
                    testbed::complete(n).map_err(usage)?,
                    None,
                )
            }
            Family::ErdosRenyi => {
                let n = need(args.n, "n")?;
                let p = args
                    .p
                    .ok_or_else(|| usage(anyhow!("ErdosRenyi needs --p")))?;
                let g = testbed::erdos_renyi(n, p, args.rng_seed).map_err(usage)?;
                let params = format!("n={n} p={p} rng_seed={}", args.rng_seed);
                ("erdos-renyi", params, g, None)
            }
            Family::Expander => {
                let n = need(args.n, "n")?;
                let g = testbed::expander(n, args.cycles, args.rng_seed).map_err(usage)?;
                let params = format!("n={n} cycles={} rng_seed={}", args.cycles, args.rng_seed);
                ("expander", params, g, None)
            }
        };

    let mut file = BufWriter::new(
        File::create(&args.out)
            .with_context(|| format!("cannot create {}", args.out.display()))
            .map_err(Failure::Runtime)?,
    );
    write_edge_list(&graph, &mut file)?;
    file.flush()?;

    let mut meta = Vec::new();
    field(&mut meta, "family", name)?;
    field(&mut meta, "params", &params)?;
    field(&mut meta, "vertices", graph.vertex_count())?;
    field(&mut meta, "edges", graph.edge_count())?;
    field(&mut meta, "connected", graph.is_connected())?;
    match &planted {
        Some(inst) => {
            let members: Vec<u64> = inst.planted.members().iter().map(|&v| v as u64).collect();
            field(&mut meta, "planted", joined(&members))?;
            field(&mut meta, "planted_volume", inst.planted.volume())?;
            field(&mut meta, "phi_planted", inst.phi_planted)?;
        }
        None => {
            field(&mut meta, "planted", "-")?;
            field(&mut meta, "planted_volume", "-")?;
            field(&mut meta, "phi_planted", "-")?;
        }
    }
    let meta_path = sidecar(&args.out);
    fs::write(&meta_path, &meta)
        .with_context(|| format!("cannot write {}", meta_path.display()))
        .map_err(Failure::Runtime)?;

    field(out, "graph", args.out.display())?;
    field(out, "metadata", meta_path.display())?;
    out.write_all(&meta)?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

/// Cut fields shared by `global`, `global-tight` and `local`.
fn cut_record(
    edges: &EdgeList,
    outcome: &SweepOutcome,
    members_out: Option<&Path>,
    out: Out,
) -> Result<(), Failure> {
    let cut = &outcome.best;
    let labels = labels_of(edges, cut.members());
    field(out, "size", cut.len())?;
    field(out, "volume", cut.volume())?;
    field(out, "boundary", cut.boundary())?;
    field(out, "conductance", cut.exact_conductance())?;
    field(out, "conductance_value", cut.conductance())?;
    let seed = outcome
        .origin
        .seed
        .map_or("-".to_string(), |v| edges.label(v).to_string());
    field(out, "origin_seed", seed)?;
    field(out, "origin_step", outcome.origin.step)?;
    field(out, "origin_prefix", outcome.origin.prefix)?;
    match members_out {
        Some(path) => {
            let mut text = String::new();
            for l in &labels {
                text.push_str(&format!("{l}\n"));
            }
            fs::write(path, text)
                .with_context(|| format!("cannot write {}", path.display()))
                .map_err(Failure::Runtime)?;
            field(out, "members_out", path.display())
        }
        None => field(out, "members", joined(&labels)),
    }
}

fn global_record(
    edges: &EdgeList,
    params: &GlobalParams,
    outcome: Option<SweepOutcome>,
    members_out: Option<&Path>,
    out: Out,
) -> Result<(), Failure> {
    field(out, "horizon", params.horizon())?;
    field(out, "volume_cap", params.volume_cap())?;
    field(out, "meets_hypothesis", params.meets_hypothesis())?;
    match outcome {
        Some(outcome) => {
            field(out, "status", "found")?;
            field(out, "work", outcome.work)?;
            cut_record(edges, &outcome, members_out, out)
        }
        None => field(out, "status", "empty"),
    }
}

fn global(args: GlobalArgs, out: Out) -> Result<(), Failure> {
    let mut params = GlobalParams::new(args.k, args.epsilon).map_err(usage)?;
    if let Some(h) = args.horizon {
        params = params.with_horizon(h);
    }
    let edges = read_graph(&args.graph)?;
    let outcome = global_sparsest_cut(&edges.graph, &params)?;
    field(out, "k", params.k())?;
    field(out, "epsilon", params.requested_epsilon())?;
    field(out, "epsilon_effective", params.epsilon())?;
    global_record(&edges, &params, outcome, args.members_out.as_deref(), out)
}

fn global_tight(args: GlobalTightArgs, out: Out) -> Result<(), Failure> {
    let params = tight_volume_params(args.k, args.epsilon).map_err(usage)?;
    let edges = read_graph(&args.graph)?;
    let outcome = global_sparsest_cut(&edges.graph, &params)?;
    field(out, "k", params.k())?;
    field(out, "epsilon", args.epsilon)?;
    field(out, "exponent", params.epsilon())?;
    global_record(&edges, &params, outcome, args.members_out.as_deref(), out)
}

fn local(args: LocalArgs, out: Out) -> Result<(), Failure> {
    let params = LocalParams::new(0, args.k, args.phi, args.epsilon).map_err(usage)?;
    let edges = read_graph(&args.graph)?;
    let params = params.with_seed(vertex_of(&edges, args.seed)?);
    let outcome = local_partition(&edges.graph, &params)?;
    field(out, "seed", args.seed)?;
    field(out, "k", args.k)?;
    field(out, "phi", args.phi)?;
    field(out, "epsilon", args.epsilon)?;
    field(out, "horizon", params.horizon())?;
    field(out, "truncation", params.truncation())?;
    field(out, "volume_cap", params.volume_cap())?;
    field(out, "threshold", params.threshold())?;
    field(out, "proven_regime", params.in_proven_regime())?;
    match outcome {
        LocalOutcome::Found(outcome) => {
            field(out, "status", "found")?;
            field(out, "work", outcome.work)?;
            cut_record(&edges, &outcome, args.members_out.as_deref(), out)
        }
        LocalOutcome::NotFound { best, work } => {
            field(out, "status", "not-found")?;
            field(out, "work", work)?;
            let best = best.map_or("-".to_string(), |o| o.best.exact_conductance().to_string());
            field(out, "best_conductance", best)
        }
    }
}

fn walker<'g>(
    edges: &'g EdgeList,
    args: &CurveArgs,
) -> Result<(WalkSchedule, Walker<'g>), Failure> {
    let schedule = WalkSchedule::new(args.steps, args.truncation).map_err(usage)?;
    let seed = vertex_of(edges, args.seed)?;
    let walker = Walker::new(&edges.graph, seed, schedule.truncation)?;
    Ok((schedule, walker))
}

fn curve(args: CurveArgs, out: Out) -> Result<(), Failure> {
    WalkSchedule::new(args.steps, args.truncation).map_err(usage)?;
    let edges = read_graph(&args.graph)?;
    let (schedule, mut walker) = walker(&edges, &args)?;
    while walker.step() < schedule.horizon {
        walker.advance();
    }
    let curve = build_curve(&edges.graph, walker.current());
    writeln!(out, "x\ty")?;
    for &(x, y) in curve.points() {
        writeln!(out, "{x}\t{y}")?;
    }
    Ok(())
}

fn walk(args: CurveArgs, out: Out) -> Result<(), Failure> {
    WalkSchedule::new(args.steps, args.truncation).map_err(usage)?;
    let edges = read_graph(&args.graph)?;
    let (schedule, mut walker) = walker(&edges, &args)?;
    writeln!(out, "t\tvertex\tmass")?;
    loop {
        for (v, m) in walker.current().entries() {
            if m != 0.0 {
                writeln!(out, "{}\t{}\t{m}", walker.step(), edges.label(v))?;
            }
        }
        if walker.step() == schedule.horizon {
            break;
        }
        walker.advance();
    }
    Ok(())
}

fn read_set(path: &Path, edges: &EdgeList) -> Result<Vec<usize>, Failure> {
    let file = File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))
        .map_err(Failure::Runtime)?;
    let mut members = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let label: u64 = text.parse().map_err(|_| {
            usage(anyhow!(
                "{}:{}: invalid vertex id {text:?}",
                path.display(),
                i + 1
            ))
        })?;
        members.push(vertex_of(edges, label)?);
    }
    Ok(members)
}

fn certify(args: CertifyArgs, out: Out) -> Result<(), Failure> {
    let edges = read_graph(&args.graph)?;
    let members = read_set(&args.set, &edges)?;
    let cert = certify_lower_bound(&edges.graph, &members, args.steps)?;
    field(out, "size", cert.eigenpair.subset.len())?;
    field(out, "lambda", cert.eigenpair.lambda)?;
    field(out, "phi", cert.conductance)?;
    field(out, "phi_value", cert.conductance.value())?;
    field(out, "iterations", cert.eigenpair.iterations)?;
    writeln!(out, "t\tretained\tbound\tmargin\tcomponent_margin")?;
    for s in &cert.steps {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            s.t, s.retained, s.bound, s.margin, s.component_margin
        )?;
    }
    Ok(())
}

fn oracle(args: OracleArgs, out: Out) -> Result<(), Failure> {
    if args.k == 0 {
        return Err(usage(anyhow!("--k must be positive")));
    }
    let edges = read_graph(&args.graph)?;
    let (phi, witness) = testbed::phi_k_oracle(&edges.graph, args.k)?;
    field(out, "k", args.k)?;
    field(out, "phi_k", phi)?;
    field(out, "phi_k_value", phi.value())?;
    field(out, "witness_volume", witness.volume())?;
    field(
        out,
        "witness",
        joined(&labels_of(&edges, witness.members())),
    )
}
