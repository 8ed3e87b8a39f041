use anyhow::{Context, Result};
use cfguard::cfc::{cf_number, solve_cfc_with_stats};
use cfguard::decomposition::min_fill_decomposition;
use cfguard::graph::{degeneracy, random_graph, verify_conflict_free, verify_strong_conflict_free, Coloring, Graph};
use cfguard::oracle::{oracle_cfc, oracle_scfc};
use cfguard::report::{RunReport, SolveRecord};
use cfguard::scfc::{scf_number, solve_scfc_with_stats};
use cfguard::terrain::{
    cf_guard, onion_peeling, pipeline, random_terrain, strong_guard, to_svg, verify_guarding, GuardColoring,
    GuardMode, Terrain,
};
use cfguard::{Problem, Solution, Stats, Verdict};
use serde_json::{json, Value};

use crate::io::{self, colors_line, emit, parse_colors};
use crate::{Command, GenKind, ModeArg, ProblemArg, SolveArgs, TerrainArgs, TerrainOp, VerifyKind};

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Cfc => Problem::Cfc,
            ProblemArg::Scfc => Problem::Scfc,
        }
    }
}

impl From<ModeArg> for GuardMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Cf => GuardMode::ConflictFree,
            ModeArg::Strong => GuardMode::Strong,
        }
    }
}

pub fn run(command: Command) -> Result<bool> {
    match command {
        Command::Solve(args) => solve(args, false),
        Command::Oracle(args) => solve(args, true),
        Command::Terrain(args) => terrain(args),
        Command::Gen { kind } => gen(kind),
        Command::Verify { kind } => verify(kind),
    }
}

fn oracle_solution(g: &Graph, problem: Problem, k: usize) -> Result<Solution> {
    let start = std::time::Instant::now();
    let coloring = match problem {
        Problem::Cfc => oracle_cfc(g, k)?,
        Problem::Scfc => oracle_scfc(g, k)?,
    };
    Ok(Solution {
        k,
        coloring,
        stats: Stats {
            nodes: 0,
            states_evaluated: 0,
            millis: start.elapsed().as_millis() as u64,
        },
    })
}

fn solve(args: SolveArgs, oracle: bool) -> Result<bool> {
    let input = io::read(&args.graph)?;
    let g = Graph::parse(&input.text).with_context(|| format!("parsing {}", args.graph.display()))?;
    let problem = Problem::from(args.problem);
    let sol = match (oracle, args.k) {
        (false, Some(k)) => match problem {
            Problem::Cfc => solve_cfc_with_stats(&g, k)?,
            Problem::Scfc => solve_scfc_with_stats(&g, k)?,
        },
        (false, None) => match problem {
            Problem::Cfc => cf_number(&g)?,
            Problem::Scfc => scf_number(&g)?,
        },
        (true, Some(k)) => oracle_solution(&g, problem, k)?,
        (true, None) => {
            let bound = degeneracy(&g).0 + 1;
            let mut found = None;
            for k in 1..=bound {
                let sol = oracle_solution(&g, problem, k)?;
                if sol.coloring.is_some() {
                    found = Some(sol);
                    break;
                }
            }
            found.context("oracle found no coloring within degeneracy + 1 colors")?
        }
    };
    let record = SolveRecord::new(problem, g.n(), &sol);
    let mut report = RunReport::new(if oracle { "oracle" } else { "solve" });
    report.input_digest = Some(input.digest);
    report.parameters = match args.k {
        Some(k) => json!({"problem": problem.name(), "k": k}),
        None => json!({"problem": problem.name(), "min": true}),
    };
    report.decision = Some(record.decision);
    report.witness = sol.coloring.as_ref().map(|c| c.colors().to_vec());
    let mut stats = serde_json::to_value(sol.stats)?;
    if !oracle {
        stats["width"] = json!(min_fill_decomposition(&g).width());
    }
    report.stats = stats;
    report.result = serde_json::to_value(&record)?;
    if let (Some(path), Some(c)) = (&args.output.out, &sol.coloring) {
        io::write(path, &colors_line(c.colors()))?;
    }
    emit(&report, args.output.format);
    Ok(record.decision)
}

fn load_terrain(args: &TerrainArgs) -> Result<(Terrain, String)> {
    match &args.terrain {
        Some(path) => {
            let input = io::read(path)?;
            let t = Terrain::parse(&input.text).with_context(|| format!("parsing {}", path.display()))?;
            Ok((t, input.digest))
        }
        None => {
            let t = Terrain::reference();
            let d = io::digest(&t.to_text());
            Ok((t, d))
        }
    }
}

fn guard_json(p: usize, gc: &GuardColoring) -> String {
    let mut s = serde_json::to_string(&json!({"p": p, "K": gc.k, "colors": gc.colors})).expect("json");
    s.push('\n');
    s
}

fn terrain(args: TerrainArgs) -> Result<bool> {
    let (t, digest) = load_terrain(&args)?;
    let peel = onion_peeling(&t);
    let mut report = RunReport::new(match args.op {
        TerrainOp::VisGraph => "terrain vis-graph",
        TerrainOp::Peel => "terrain peel",
        TerrainOp::StrongGuard => "terrain strong-guard",
        TerrainOp::CfGuard => "terrain cf-guard",
        TerrainOp::Pipeline => "terrain pipeline",
    });
    report.input_digest = Some(digest);
    report.parameters = json!({"n": t.len(), "reference": args.terrain.is_none()});
    if let Some(path) = &args.dot {
        io::write(path, &t.visibility_graph().to_dot())?;
    }
    let mut guards: Option<GuardColoring> = None;
    let ok = match args.op {
        TerrainOp::VisGraph => {
            let g = t.visibility_graph();
            report.result = json!({"n": g.n(), "m": g.m()});
            if let Some(path) = &args.output.out {
                io::write(path, &g.to_text())?;
            }
            true
        }
        TerrainOp::Peel => {
            report.result = json!({"p": peel.p(), "layers": peel.layers});
            if let Some(path) = &args.output.out {
                io::write(path, &format!("{}\n", serde_json::to_string(&peel)?))?;
            }
            true
        }
        TerrainOp::StrongGuard | TerrainOp::CfGuard => {
            let (outcome, mode) = if args.op == TerrainOp::StrongGuard {
                (strong_guard(&t), GuardMode::Strong)
            } else {
                (cf_guard(&t), GuardMode::ConflictFree)
            };
            let verdict = verify_guarding(&t, &outcome.coloring, mode)?;
            report.decision = Some(verdict.is_ok());
            report.result = json!({
                "p": outcome.stats.p,
                "K": outcome.coloring.k,
                "colors": outcome.coloring.colors,
                "verdict": verdict_value(verdict),
            });
            report.witness = Some(outcome.coloring.colors.clone());
            report.stats = serde_json::to_value(outcome.stats)?;
            if let Some(path) = &args.output.out {
                io::write(path, &guard_json(outcome.stats.p, &outcome.coloring))?;
            }
            let ok = verdict.is_ok();
            guards = Some(outcome.coloring);
            ok
        }
        TerrainOp::Pipeline => {
            let problem = Problem::from(args.problem);
            let r = pipeline(&t, problem)?;
            let verdict = verify_guarding(&t, &r.coloring, problem.guard_mode())?;
            report.parameters["problem"] = json!(problem.name());
            report.decision = Some(verdict.is_ok());
            report.result = json!({
                "p": r.p,
                "k": r.k,
                "budget": r.budget,
                "K": r.coloring.k,
                "colors": r.coloring.colors,
                "verdict": verdict_value(verdict),
            });
            report.witness = Some(r.coloring.colors.clone());
            report.stats = json!({"width": r.width, "runs": r.runs});
            if let Some(path) = &args.output.out {
                io::write(path, &guard_json(r.p, &r.coloring))?;
            }
            guards = Some(r.coloring);
            verdict.is_ok()
        }
    };
    if let Some(path) = &args.svg {
        io::write(path, &to_svg(&t, &peel, guards.as_ref()))?;
    }
    emit(&report, args.output.format);
    Ok(ok)
}

fn verdict_value(v: Verdict) -> Value {
    match v {
        Verdict::Ok => json!("ok"),
        Verdict::Violation(w) => json!({"violation": w}),
    }
}

fn gen(kind: GenKind) -> Result<bool> {
    let (text, output, report) = match kind {
        GenKind::Graph { n, p, seed, output } => {
            let g = random_graph(n, p, seed)?;
            let mut report = RunReport::new("gen graph");
            report.seed = Some(seed);
            report.parameters = json!({"n": n, "p": p});
            report.result = json!({"n": g.n(), "m": g.m()});
            (g.to_text(), output, report)
        }
        GenKind::Terrain {
            n,
            y_min,
            y_max,
            seed,
            output,
        } => {
            let t = random_terrain(n, y_min, y_max, seed)?;
            let mut report = RunReport::new("gen terrain");
            report.seed = Some(seed);
            report.parameters = json!({"n": n, "y_min": y_min, "y_max": y_max});
            report.result = json!({"n": t.len(), "p": onion_peeling(&t).p()});
            (t.to_text(), output, report)
        }
    };
    match &output.out {
        Some(path) => {
            io::write(path, &text)?;
            let mut report = report;
            report.result["digest"] = json!(io::digest(&text));
            emit(&report, output.format);
        }
        None => print!("{text}"),
    }
    Ok(true)
}

fn verify(kind: VerifyKind) -> Result<bool> {
    let (report, ok, format) = match kind {
        VerifyKind::Coloring {
            graph,
            colors,
            mode,
            output,
        } => {
            let input = io::read(&graph)?;
            let g = Graph::parse(&input.text).with_context(|| format!("parsing {}", graph.display()))?;
            let col_input = io::read(&colors)?;
            let list = parse_colors(&col_input.text)?;
            let k = list.iter().copied().max().unwrap_or(0).max(1);
            let coloring = Coloring::new(k, list)?;
            let verdict = match GuardMode::from(mode) {
                GuardMode::Strong => verify_strong_conflict_free(&g, &coloring)?,
                GuardMode::ConflictFree => verify_conflict_free(&g, &coloring)?,
            };
            let mut report = RunReport::new("verify coloring");
            report.input_digest = Some(input.digest);
            report.parameters = json!({"mode": mode_name(mode), "colors_digest": col_input.digest});
            report.decision = Some(verdict.is_ok());
            report.result = json!({"verdict": verdict_value(verdict)});
            (report, verdict.is_ok(), output.format)
        }
        VerifyKind::Guarding {
            terrain,
            guards,
            mode,
            output,
        } => {
            let input = io::read(&terrain)?;
            let t = Terrain::parse(&input.text).with_context(|| format!("parsing {}", terrain.display()))?;
            let g_input = io::read(&guards)?;
            let gc = GuardColoring::new(parse_colors(&g_input.text)?);
            let verdict = verify_guarding(&t, &gc, GuardMode::from(mode))?;
            let mut report = RunReport::new("verify guarding");
            report.input_digest = Some(input.digest);
            report.parameters = json!({"mode": mode_name(mode), "guards_digest": g_input.digest});
            report.decision = Some(verdict.is_ok());
            report.result = json!({"verdict": verdict_value(verdict)});
            (report, verdict.is_ok(), output.format)
        }
    };
    emit(&report, format);
    Ok(ok)
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Cf => "cf",
        ModeArg::Strong => "strong",
    }
}
