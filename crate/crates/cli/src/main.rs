use std::error::Error;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use zerosum_core::bounds::{self, BoundsOptions, Shape};
use zerosum_core::constructions::ConstructionKind;
use zerosum_core::geometry::{cayley_menger_vd, greedy_reorder, Zonotope};
use zerosum_core::lattice::{GroundSet, LatticeVector};
use zerosum_core::optimize::{self, ObjectiveSpec};
use zerosum_core::primes;
use zerosum_core::support::{davenport_support_dp1, Dp1Options};
use zerosum_core::zerosum::{
    davenport_exact, davenport_support_k_small, is_minimal_zero_sum, SearchBudget, Strategy, ZsSequence,
};

type Res = Result<ExitCode, Box<dyn Error>>;

#[derive(Parser)]
#[command(name = "zsum", version, about = "Davenport constants of lattice boxes and balls")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Prime utilities.
    #[command(subcommand)]
    Primes(PrimesCmd),
    /// Exhaustive Davenport searches.
    #[command(subcommand)]
    Davenport(DavenportCmd),
    /// Check that a sequence file is a minimal zero-sum sequence over a ground set.
    Verify {
        file: PathBuf,
        #[arg(long)]
        ground: GroundSet,
    },
    /// Maximum length over supports of size d+1.
    SupkMax {
        ground: GroundSet,
        #[arg(long, default_value = "text")]
        report: String,
        #[arg(long, default_value_t = 6000)]
        max_points: usize,
    },
    /// Build and verify an explicit construction.
    Construct {
        name: ConstructionKind,
        m: i64,
        /// Write the sequence in text format.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Print the verification report as JSON.
        #[arg(long)]
        verify: bool,
    },
    #[command(subcommand)]
    Geometry(GeometryCmd),
    #[command(subcommand)]
    Optimize(OptimizeCmd),
    #[command(subcommand)]
    Report(ReportCmd),
}

#[derive(Subcommand)]
enum PrimesCmd {
    /// Smallest prime not dividing M.
    Q { m: u64 },
    /// Largest prime not exceeding X.
    Lpleq { x: u64 },
    /// Check q(m) <= 1 + 4 log m and q(m) < m on 2..=MAX.
    LemmaQq {
        #[arg(long, default_value_t = 1_000_000)]
        max: u64,
    },
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<u64>,
    #[arg(long)]
    json: bool,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        let mut b = SearchBudget::default();
        if let Some(n) = self.max_nodes {
            b.max_nodes = n;
        }
        b.max_time = self.timeout.map(Duration::from_secs);
        b
    }
}

#[derive(Subcommand)]
enum DavenportCmd {
    /// D(X) by exhaustive search.
    Exact {
        ground: GroundSet,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// D^(k)(X) by exhaustive search.
    Supk {
        ground: GroundSet,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Subcommand)]
enum GeometryCmd {
    /// Volume and lattice-point count of L for d+1 generators.
    CountHex {
        /// Generators separated by `;`, coordinates by spaces.
        #[arg(long)]
        gens: String,
        #[arg(long, default_value_t = 1)]
        dilate: i64,
        #[arg(long)]
        tiling_samples: Option<usize>,
    },
    /// Reorder a sequence so that every partial sum stays in L.
    Reorder { file: PathBuf },
    /// Regular simplex volume three ways.
    Vd {
        #[arg(long, default_value_t = 8)]
        max_d: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum OptimizeCmd {
    Hexagon {
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
    Dodeca {
        /// Optimize all five angles instead of the reduced pair.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    SimplexEvidence {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ReportCmd {
    Bounds {
        #[arg(long)]
        shape: Shape,
        #[arg(long)]
        d: usize,
        /// Range `a..b`, inclusive.
        #[arg(long, value_parser = parse_range)]
        m: (i64, i64),
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Skip support enumeration.
        #[arg(long)]
        no_enumerate: bool,
    },
    Evidence {
        #[arg(long, default_value_t = 8)]
        box2_max: i64,
        #[arg(long, default_value_t = 20)]
        disk_max: i64,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim_start_matches('=').parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

fn parse_gens(s: &str) -> Result<Vec<LatticeVector>, Box<dyn Error>> {
    s.split(';')
        .map(|row| {
            let coords = row.split_whitespace().map(str::parse).collect::<Result<Vec<i64>, _>>()?;
            Ok(LatticeVector::new(coords))
        })
        .collect()
}

fn read_sequence(path: &PathBuf) -> Result<ZsSequence, Box<dyn Error>> {
    Ok(ZsSequence::parse_text(&fs::read_to_string(path)?)?)
}

fn print_json(v: &impl serde::Serialize) -> Result<(), Box<dyn Error>> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn ok_if(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn primes_cmd(cmd: PrimesCmd) -> Res {
    match cmd {
        PrimesCmd::Q { m } => println!("{}", primes::q_of(m)?),
        PrimesCmd::Lpleq { x } => println!("{}", primes::largest_prime_leq(x)?),
        PrimesCmd::LemmaQq { max } => {
            let r = primes::check_lemma_qq(max);
            print_json(&r)?;
            return Ok(ok_if(r.passed()));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn davenport_cmd(cmd: DavenportCmd) -> Res {
    let (ground, k, args) = match cmd {
        DavenportCmd::Exact { ground, budget } => (ground, None, budget),
        DavenportCmd::Supk { ground, k, budget } => (ground, Some(k), budget),
    };
    let budget = args.budget();
    let (value, witness, nodes) = match k {
        None => {
            let r = davenport_exact(&ground, &budget)?;
            (r.value, Some(r.witness), r.nodes)
        }
        Some(k) => {
            let r = davenport_support_k_small(&ground, k, &budget)?;
            (r.value, r.witnesses.into_iter().next(), r.nodes)
        }
    };
    if args.json {
        print_json(&json!({"ground": ground.to_string(), "k": k, "value": value, "witness": witness, "nodes": nodes}))?;
    } else {
        println!("{value}");
        if let Some(w) = witness {
            print!("{}", w.to_text());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(file: PathBuf, ground: GroundSet) -> Res {
    let s = read_sequence(&file)?;
    let outside: Vec<String> = s
        .support()
        .iter()
        .filter(|v| !ground.contains(v).unwrap_or(false))
        .map(|v| v.to_string())
        .collect();
    let verdict = is_minimal_zero_sum(&s, Strategy::Auto)?;
    let valid = outside.is_empty() && verdict.minimal;
    println!("{}", if valid { "VALID" } else { "INVALID" });
    print_json(&json!({"length": s.len(), "outside_ground": outside, "verdict": verdict}))?;
    Ok(ok_if(valid))
}

fn supk_max_cmd(ground: GroundSet, report: &str, max_points: usize) -> Res {
    let r = davenport_support_dp1(&ground, &Dp1Options { max_points, ..Default::default() })?;
    let formula = match ground {
        GroundSet::Box { m, d: 2 } if m >= 2 => Some(4 * (m * m) as u64 - primes::q_of(m as u64)?),
        _ => None,
    };
    let m = match ground {
        GroundSet::Box { m, .. } | GroundSet::Ball { m, .. } => Some(m),
        GroundSet::Explicit { .. } => None,
    };
    if report == "json" {
        print_json(&json!({
            "m": m,
            "value": r.value,
            "formula_value": formula,
            "orbits": r.orbits,
            "certified": r.certified,
            "truncated": r.truncated,
        }))?;
    } else {
        println!("{}", r.value);
        for o in &r.orbits {
            let pts: Vec<String> = o.support.iter().map(|v| v.to_string()).collect();
            println!("{} : {:?}", pts.join(" "), o.mults);
        }
    }
    Ok(ok_if(r.certified))
}

fn construct_cmd(kind: ConstructionKind, m: i64, emit: Option<PathBuf>, verify: bool) -> Res {
    let c = kind.build(m)?;
    if let Some(path) = emit {
        fs::write(path, c.sequence.to_text())?;
    }
    if verify {
        print_json(&c)?;
    } else {
        println!(
            "{} {} m={} length={}",
            if c.is_valid() { "VALID" } else { "INVALID" },
            c.name,
            m,
            c.sequence.len()
        );
        for f in c.failed_conditions() {
            println!("failed: {f}");
        }
    }
    Ok(ok_if(c.is_valid()))
}

fn geometry_cmd(cmd: GeometryCmd) -> Res {
    match cmd {
        GeometryCmd::CountHex { gens, dilate, tiling_samples } => {
            let z = Zonotope::new(&parse_gens(&gens)?)?.dilate(dilate)?;
            let mut out = json!({"volume": z.volume(), "lattice_count": z.lattice_count()});
            if let Some(n) = tiling_samples {
                out["tiling"] = serde_json::to_value(z.tiling_check(n, 1))?;
            }
            print_json(&out)?;
        }
        GeometryCmd::Reorder { file } => {
            let s = read_sequence(&file)?;
            let r = greedy_reorder(&s)?;
            for (i, p) in r.order.iter().zip(&r.partial_sums) {
                println!("{} {}", s.support()[*i], p);
            }
        }
        GeometryCmd::Vd { max_d, json } => {
            let reports: Vec<_> = (1..=max_d).map(cayley_menger_vd).collect();
            if json {
                print_json(&reports)?;
            } else {
                for r in &reports {
                    println!(
                        "d={} V_d={:.12} d!V_d={:.12} max_discrepancy={:.3e}",
                        r.d, r.closed_form, r.d_factorial_vd, r.max_discrepancy
                    );
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn optimize_cmd(cmd: OptimizeCmd) -> Res {
    match cmd {
        OptimizeCmd::Hexagon { grid } => print_json(&optimize::maximize(&ObjectiveSpec::hexagon(), grid, 2000, 0))?,
        OptimizeCmd::Dodeca { full, grid, seed } => {
            let (spec, g) = if full {
                (ObjectiveSpec::dodeca_full(), grid.unwrap_or(12))
            } else {
                (ObjectiveSpec::dodeca_reduced(), grid.unwrap_or(256))
            };
            print_json(&optimize::maximize(&spec, g, 2000, seed))?;
        }
        OptimizeCmd::SimplexEvidence { d, trials, eps, seed } => {
            let r = optimize::simplex_local_max_evidence(d, trials, eps, seed);
            print_json(&r)?;
            return Ok(ok_if(r.passed));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn report_cmd(cmd: ReportCmd) -> Res {
    match cmd {
        ReportCmd::Bounds { shape, d, m, csv, json, no_enumerate } => {
            let opts = BoundsOptions { enumerate: !no_enumerate, ..Default::default() };
            let rows = bounds::evaluate_bounds(shape, d, m.0..=m.1, &opts)?;
            let text = bounds::to_csv(&rows);
            if let Some(path) = &csv {
                fs::write(path, &text)?;
            }
            if let Some(path) = &json {
                fs::write(path, serde_json::to_string_pretty(&bounds::to_json(&rows))?)?;
            }
            if csv.is_none() && json.is_none() {
                print!("{text}");
            }
            Ok(ok_if(rows.iter().all(|r| r.consistent())))
        }
        ReportCmd::Evidence { box2_max, disk_max } => {
            print_json(&bounds::conjecture_evidence(box2_max, disk_max, &SearchBudget::default()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run(cli: Cli) -> Res {
    match cli.cmd {
        Cmd::Primes(c) => primes_cmd(c),
        Cmd::Davenport(c) => davenport_cmd(c),
        Cmd::Verify { file, ground } => verify_cmd(file, ground),
        Cmd::SupkMax { ground, report, max_points } => supk_max_cmd(ground, &report, max_points),
        Cmd::Construct { name, m, emit, verify } => construct_cmd(name, m, emit, verify),
        Cmd::Geometry(c) => geometry_cmd(c),
        Cmd::Optimize(c) => optimize_cmd(c),
        Cmd::Report(c) => report_cmd(c),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
