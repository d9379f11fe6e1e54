use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use regcover::covering::{check_certificate_text, verify_covering, CoverStatus};
use regcover::expansion::{
    enumerate_quotients, fast_paths, regular_cover, CoverError, CoverOptions, CoverStats,
    CoverVerdict,
};
use regcover::ivmatch::{
    brute_force, flow_feasibility, parse_instance, solve, SolveOptions, BRUTE_FORCE_BOUND,
};
use regcover::multigraph::{
    parse_certificate, parse_graph, serialize_certificate, serialize_graph, IsoOptions, Multigraph,
    VertexMapping,
};
use regcover::oracle::{Oracle, ORACLE_BOUND};
use regcover::planar::primitive_automorphisms;
use regcover::reduction::{dump_series, reduction_series, Catalog, SeriesMode};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "regcover", version, about = "Regular covering tests for planar multigraphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone, Copy)]
struct Common {
    /// Print a JSON summary instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Single-threaded and no timings, so equal inputs give equal output.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Worker threads for independent branches.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether G regularly covers H.
    Cover {
        g: PathBuf,
        h: PathBuf,
        /// Write the certificate of a yes answer here.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Only use the polynomial special cases; refuse otherwise.
        #[arg(long)]
        fast_paths_only: bool,
        /// Search node budget per candidate group.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[command(flatten)]
        common: Common,
    },
    /// List the regular quotients of G.
    Quotients {
        g: PathBuf,
        /// Report each quotient once up to isomorphism.
        #[arg(long)]
        dedup: bool,
        /// Only quotients of this fold number.
        #[arg(short)]
        k: Option<usize>,
        /// Write one file per quotient into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a certificate for G -> H.
    Verify {
        g: PathBuf,
        h: PathBuf,
        cert: PathBuf,
    },
    /// Automorphism group of G.
    Aut {
        g: PathBuf,
        /// Print only the order.
        #[arg(long)]
        order_only: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Print the reduction series of G.
    Reduce {
        g: PathBuf,
        /// Require a central block at every level, as the cover search does.
        #[arg(long)]
        cover_mode: bool,
    },
    /// Brute-force reference computations.
    Oracle {
        #[command(subcommand)]
        cmd: OracleCommand,
    },
    /// Solve an IV-matching instance file.
    Ivmatch {
        file: PathBuf,
        /// Use the reference search on the expanded graph.
        #[arg(long)]
        brute_force: bool,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Decide G -> H by trying every semiregular subgroup.
    Cover { g: PathBuf, h: PathBuf },
    /// All quotients of G up to isomorphism.
    Quotients { g: PathBuf },
    /// Order of the automorphism group.
    Aut { g: PathBuf },
}

/// Outcome of a command, mapped to the exit code.
enum Status {
    Yes,
    No,
    Refused,
}

impl Status {
    fn code(&self) -> ExitCode {
        match self {
            Status::Yes => ExitCode::from(0),
            Status::No => ExitCode::from(1),
            Status::Refused => ExitCode::from(2),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Status::Yes => "yes",
            Status::No => "no",
            Status::Refused => "refused",
        }
    }
}

#[derive(Serialize)]
struct Verdict {
    status: &'static str,
    k: Option<usize>,
    branches_tried: u64,
    cores_tried: usize,
    wall_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
}

fn read_graph(path: &Path) -> Result<Multigraph> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let g = parse_graph(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(g)
}

fn elapsed_ms(start: Instant, common: &Common) -> u64 {
    if common.deterministic {
        0
    } else {
        start.elapsed().as_millis() as u64
    }
}

fn perm_line(i: usize, m: &VertexMapping) -> String {
    let mut s = format!("g {}:", i + 1);
    for &y in &m.half {
        let _ = write!(s, " {}", y + 1);
    }
    s
}

fn cmd_cover(
    g: &Path,
    h: &Path,
    certificate: Option<&Path>,
    fast_only: bool,
    budget: u64,
    common: Common,
) -> Result<Status> {
    let (g, h) = (read_graph(g)?, read_graph(h)?);
    let opts = CoverOptions {
        budget,
        jobs: if common.deterministic { 1 } else { common.jobs.max(1) },
        ..CoverOptions::default()
    };
    let start = Instant::now();
    let res: Result<Option<(CoverVerdict, CoverStats)>, CoverError> = if fast_only {
        fast_paths(&g, &h, &opts)
    } else {
        regular_cover(&g, &h, &opts).map(Some)
    };
    let wall_ms = elapsed_ms(start, &common);
    let (status, k, stats, message) = match res {
        Ok(Some((CoverVerdict::Yes(cert), stats))) => {
            if let Some(path) = certificate {
                let perms: Vec<Vec<usize>> = cert.elements.iter().map(|m| m.half.clone()).collect();
                std::fs::write(path, serialize_certificate(&perms, &cert.projection))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            (Status::Yes, Some(cert.k), stats, None)
        }
        Ok(Some((CoverVerdict::No, stats))) => (Status::No, None, stats, None),
        Ok(None) => (
            Status::Refused,
            None,
            CoverStats::default(),
            Some("no polynomial special case applies".to_string()),
        ),
        Err(e @ CoverError::InvalidInput(_)) => return Err(e.into()),
        Err(e) => (Status::Refused, None, CoverStats::default(), Some(e.to_string())),
    };
    let v = Verdict {
        status: status.name(),
        k,
        branches_tried: stats.nodes,
        cores_tried: stats.candidate_groups,
        wall_ms,
        message,
    };
    if common.json {
        println!("{}", serde_json::to_string(&v)?);
    } else {
        match (&status, v.k, &v.message) {
            (Status::Yes, Some(k), _) => println!("yes k={k}"),
            (Status::Refused, _, Some(m)) => println!("refused: {m}"),
            _ => println!("{}", status.name()),
        }
    }
    Ok(status)
}

fn cmd_quotients(g: &Path, dedup: bool, k: Option<usize>, out: Option<&Path>, common: Common) -> Result<Status> {
    let g = read_graph(g)?;
    let opts = CoverOptions {
        jobs: 1,
        ..CoverOptions::default()
    };
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut count = 0usize;
    let mut io_err = None;
    let mut listed = Vec::new();
    enumerate_quotients(&g, &opts, dedup, &mut |q| {
        if k.is_some_and(|k| k != q.k) {
            return false;
        }
        count += 1;
        let text = serialize_graph(&q.graph);
        if let Some(dir) = out {
            let path = dir.join(format!("quotient_{count:03}_k{}.graph", q.k));
            if let Err(e) = std::fs::write(&path, format!("{text}\n")) {
                io_err = Some(anyhow::Error::new(e).context(format!("writing {}", path.display())));
                return true;
            }
        }
        if common.json {
            listed.push(serde_json::json!({ "k": q.k, "graph": text }));
        } else if out.is_none() {
            println!("# quotient {count} k={}\n{text}\n", q.k);
        }
        false
    })?;
    if let Some(e) = io_err {
        return Err(e);
    }
    if common.json {
        println!("{}", serde_json::json!({ "count": count, "quotients": listed }));
    } else {
        println!("# {count} quotients");
    }
    Ok(Status::Yes)
}

fn cmd_verify(g: &Path, h: &Path, cert: &Path) -> Result<Status> {
    let (g, h) = (read_graph(g)?, read_graph(h)?);
    let text = std::fs::read_to_string(cert).with_context(|| format!("reading {}", cert.display()))?;
    let cert = parse_certificate(&text).with_context(|| format!("parsing {}", cert.display()))?;
    match check_certificate_text(&g, &h, &cert) {
        Ok(elements) => {
            let mut phalf = vec![0; g.half_count()];
            for &(x, y) in &cert.projection {
                phalf[x] = y;
            }
            let regular = matches!(verify_covering(&g, &h, &phalf), CoverStatus::Regular { .. });
            println!("valid k={} regular={regular}", elements.len());
            Ok(Status::Yes)
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(Status::No)
        }
    }
}

fn cmd_aut(g: &Path, order_only: bool, common: Common) -> Result<Status> {
    let g = read_graph(g)?;
    let start = Instant::now();
    let auts = primitive_automorphisms(
        &g,
        IsoOptions {
            bound: ORACLE_BOUND.max(20),
            node_budget: 50_000_000,
        },
    )?;
    let wall_ms = elapsed_ms(start, &common);
    if common.json {
        println!("{}", serde_json::json!({ "order": auts.len(), "wall_ms": wall_ms }));
    } else {
        println!("order {}", auts.len());
        if !order_only {
            for (i, m) in auts.iter().enumerate() {
                println!("{}", perm_line(i, m));
            }
        }
    }
    Ok(Status::Yes)
}

fn cmd_reduce(g: &Path, cover_mode: bool) -> Result<Status> {
    let g = read_graph(g)?;
    let gn = g.normalize().graph;
    let mut catalog = Catalog::for_graphs(&[&gn]);
    let mode = if cover_mode { SeriesMode::Cover } else { SeriesMode::Plain };
    match reduction_series(&gn, &mut catalog, mode) {
        Ok(series) => {
            print!("{}", dump_series(&series, &catalog));
            Ok(Status::Yes)
        }
        Err(e) => {
            println!("stopped: {e}");
            Ok(Status::No)
        }
    }
}

fn cmd_oracle(cmd: &OracleCommand) -> Result<Status> {
    let o = Oracle::default();
    match cmd {
        OracleCommand::Cover { g, h } => {
            let (g, h) = (read_graph(g)?, read_graph(h)?);
            match o.regular_cover(&g, &h)? {
                Some(cert) => {
                    println!("yes k={}", cert.k);
                    Ok(Status::Yes)
                }
                None => {
                    println!("no");
                    Ok(Status::No)
                }
            }
        }
        OracleCommand::Quotients { g } => {
            let g = read_graph(g)?;
            let qs = o.quotient_set(&g)?;
            for (i, (k, q)) in qs.iter().enumerate() {
                println!("# quotient {} k={k}\n{}\n", i + 1, serialize_graph(q));
            }
            println!("# {} quotients", qs.len());
            Ok(Status::Yes)
        }
        OracleCommand::Aut { g } => {
            let g = read_graph(g)?;
            println!("order {}", o.aut(&g)?.len());
            Ok(Status::Yes)
        }
    }
}

fn cmd_ivmatch(file: &Path, brute: bool, budget: u64, common: Common) -> Result<Status> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let inst = parse_instance(&text).with_context(|| format!("parsing {}", file.display()))?;
    let counts = flow_feasibility(&inst);
    let (sub, nodes) = if brute {
        (brute_force(&inst, BRUTE_FORCE_BOUND)?, 0)
    } else {
        let (sub, stats) = solve(&inst, SolveOptions { node_budget: budget })?;
        (sub, stats.nodes)
    };
    let status = if sub.is_some() { Status::Yes } else { Status::No };
    if common.json {
        let edges: Vec<(usize, usize)> = sub
            .as_ref()
            .map(|s| s.edges.iter().map(|&(x, y)| (x + 1, y + 1)).collect())
            .unwrap_or_default();
        println!(
            "{}",
            serde_json::json!({
                "status": status.name(),
                "flow_feasible": counts.is_some(),
                "nodes": nodes,
                "edges": edges,
            })
        );
    } else {
        match &counts {
            Some(c) => println!("counts b={:?} b'={:?}", c.b, c.b_prime),
            None => println!("counts infeasible"),
        }
        match &sub {
            Some(s) => {
                println!("solvable");
                for &(x, y) in &s.edges {
                    println!("i {} {}", x + 1, y + 1);
                }
            }
            None => println!("unsolvable"),
        }
    }
    Ok(status)
}

fn run(cli: Cli) -> Result<Status> {
    match cli.cmd {
        Command::Cover {
            g,
            h,
            certificate,
            fast_paths_only,
            budget,
            common,
        } => cmd_cover(&g, &h, certificate.as_deref(), fast_paths_only, budget, common),
        Command::Quotients { g, dedup, k, out, common } => cmd_quotients(&g, dedup, k, out.as_deref(), common),
        Command::Verify { g, h, cert } => cmd_verify(&g, &h, &cert),
        Command::Aut { g, order_only, common } => cmd_aut(&g, order_only, common),
        Command::Reduce { g, cover_mode } => cmd_reduce(&g, cover_mode),
        Command::Oracle { cmd } => cmd_oracle(&cmd),
        Command::Ivmatch {
            file,
            brute_force,
            budget,
            common,
        } => cmd_ivmatch(&file, brute_force, budget, common),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
