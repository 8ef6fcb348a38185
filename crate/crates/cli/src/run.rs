use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use fpss::block::reconstruct_tblock;
use fpss::cut::{run_cut, CutConfig};
use fpss::hereditary::{self, HereditaryClass, HereditaryConfig};
use fpss::hitting::{self, EngineConfig};
use fpss::recognizers::ClassKind;
use fpss::solvers::classes::is_chordal;
use fpss::solvers::{Instance, SolveResult};
use fpss::stream::{materialize, parse_stream, Problem, Stream};

use crate::report::{join_ids, Report};
use crate::{parse_problem, read_file, CliError, ReportArgs};

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Stream file to read.
    pub stream: PathBuf,
    /// Problem to solve; defaults to the `prob` line of the stream.
    #[arg(long, value_parser = parse_problem)]
    pub problem: Option<Problem>,
    /// Deletion budget; defaults to the `k` line of the stream.
    #[arg(short)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Abort when a pipeline asks for more passes.
    #[arg(long)]
    pub passes_cap: Option<usize>,
    /// Abort when the space ledger goes above this many words.
    #[arg(long)]
    pub space_cap_words: Option<usize>,
    /// Separator size for block graph reconstruction; only 1 supports deletions.
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    /// Multiway cut: terminals may not be deleted.
    #[arg(long)]
    pub protect_terminals: bool,
    /// Worker threads for sketch batches and recognizers.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub out: ReportArgs,
}

struct Solved {
    result: SolveResult,
    passes: usize,
    lines: Vec<String>,
    /// Set when the dispatcher already checked the solution with a class-specific oracle.
    checked: bool,
}

fn dispatch(a: &RunArgs, problem: Problem, stream: &Stream, k: usize) -> Result<Solved, CliError> {
    let jobs = a.jobs.max(1);
    match problem {
        Problem::Fvst | Problem::Cvd | Problem::Svd | Problem::Tvd => {
            let kind = ClassKind::for_problem(problem).expect("class problem");
            let cfg = EngineConfig { seed: a.seed, jobs, passes_cap: a.passes_cap, space_cap: a.space_cap_words, ..Default::default() };
            let out = hitting::solve_stream(stream, kind, k, &cfg)?;
            Ok(Solved { passes: out.ledger.passes(), lines: out.report_lines(), result: out.result, checked: false })
        }
        Problem::Bvd if a.t != 1 => {
            if k > 0 {
                return Err(CliError::Usage(format!("deletions need --t 1; --t {} only recognizes t-block graphs", a.t)));
            }
            let (rec, ok) = reconstruct_tblock(stream, a.t, a.seed)?;
            // The class oracle for t > 1: the accepted reconstruction is the input, and it is chordal.
            if ok && (rec.to_graph() != materialize(stream) || !is_chordal(&rec.to_graph())) {
                return Err(CliError::BadSolution(Vec::new()));
            }
            let result = if ok { SolveResult::yes(Vec::new(), Default::default()) } else { SolveResult::no(Default::default()) };
            let lines = vec![format!("t={}", a.t), format!("tflow_accepted={}", rec.accepted()), format!("tblock={ok}")];
            Ok(Solved { result, passes: 1, lines, checked: true })
        }
        Problem::Bvd | Problem::Pivd => {
            let class = HereditaryClass::for_problem(problem)?;
            let cfg = HereditaryConfig { seed: a.seed, jobs, passes_cap: a.passes_cap, space_cap: a.space_cap_words };
            let out = hereditary::solve_stream(stream, class, k, &cfg)?;
            Ok(Solved { passes: out.passes, lines: out.report_lines(), result: out.result, checked: false })
        }
        Problem::Oct | Problem::Sfvs | Problem::Mwc => {
            let cfg = CutConfig {
                seed: a.seed,
                jobs,
                passes_cap: a.passes_cap,
                space_cap: a.space_cap_words,
                protect_terminals: a.protect_terminals,
                ..Default::default()
            };
            let out = run_cut(problem, stream, k, &cfg)?;
            Ok(Solved { passes: out.ledger.passes(), lines: out.report_lines(), result: out.result, checked: false })
        }
    }
}

/// Returns whether the answer is YES.
pub fn run(a: &RunArgs) -> Result<bool, CliError> {
    let stream = parse_stream(&read_file(&a.stream)?)?;
    let problem = a
        .problem
        .or(stream.header.problem)
        .ok_or_else(|| CliError::Usage("no --problem given and the stream has no `prob` line".into()))?;
    let k = a.k.unwrap_or(stream.header.k);
    let start = Instant::now();
    let solved = dispatch(a, problem, &stream, k)?;

    if let Some(sol) = solved.result.solution.as_ref().filter(|_| !solved.checked) {
        let mut inst = Instance::from_stream(problem, &stream);
        inst.protect_terminals = a.protect_terminals;
        if sol.len() > k || !inst.is_solution(sol) {
            return Err(CliError::BadSolution(sol.clone()));
        }
    }

    let yes = solved.result.is_yes();
    let mut r = Report::default();
    r.push("problem", problem);
    r.push("n", stream.n());
    r.push("k", k);
    r.push("seed", a.seed);
    r.push("decision", if yes { "YES" } else { "NO" });
    r.push("solution", solved.result.solution.as_deref().map(join_ids).unwrap_or_default());
    r.push("verified", solved.result.solution.is_some());
    r.push("passes_used", solved.passes);
    r.extend_lines(solved.lines);
    r.emit(&a.out)?;
    eprintln!("wall_ms={}", start.elapsed().as_millis());
    Ok(yes)
}
