use std::path::PathBuf;

use clap::Args;
use fpss::solvers::Instance;
use fpss::stream::{parse_stream, Problem};

use crate::report::{join_ids, Report};
use crate::{parse_problem, read_file, CliError, ReportArgs};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Stream file holding the instance.
    pub stream: PathBuf,
    /// Solution file: vertex ids separated by spaces, commas or newlines, or a
    /// report from `run` (its `solution=` line is used).
    pub solution: PathBuf,
    #[arg(long, value_parser = parse_problem)]
    pub problem: Option<Problem>,
    /// Budget to check the size against; defaults to the stream's `k`.
    #[arg(short)]
    pub k: Option<usize>,
    #[arg(long)]
    pub protect_terminals: bool,
    #[command(flatten)]
    pub out: ReportArgs,
}

/// Reads vertex ids, skipping `#` comments; in `key=value` files only `solution` counts.
pub fn parse_solution(text: &str) -> Result<Vec<usize>, CliError> {
    let mut ids = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        let body = match line.split_once('=') {
            Some(("solution", v)) => v,
            Some(_) => continue,
            None => line,
        };
        for tok in body.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            ids.push(tok.parse().map_err(|_| CliError::Usage(format!("bad vertex id `{tok}` in solution")))?);
        }
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

pub fn verify(a: &VerifyArgs) -> Result<bool, CliError> {
    let stream = parse_stream(&read_file(&a.stream)?)?;
    let problem = a
        .problem
        .or(stream.header.problem)
        .ok_or_else(|| CliError::Usage("no --problem given and the stream has no `prob` line".into()))?;
    let k = a.k.unwrap_or(stream.header.k);
    let sol = parse_solution(&read_file(&a.solution)?)?;
    if let Some(&v) = sol.iter().find(|&&v| v >= stream.n()) {
        return Err(CliError::Usage(format!("vertex {v} out of range for n={}", stream.n())));
    }
    let mut inst = Instance::from_stream(problem, &stream);
    inst.protect_terminals = a.protect_terminals;
    let property = inst.is_solution(&sol);
    let fits = sol.len() <= k;

    let mut r = Report::default();
    r.push("problem", problem);
    r.push("k", k);
    r.push("solution", join_ids(&sol));
    r.push("property_holds", property);
    r.push("valid", property && fits);
    if !fits {
        r.push("note", format!("SizeExceeded({} > {k})", sol.len()));
    }
    r.emit(&a.out)?;
    Ok(property && fits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solution_formats() {
        assert_eq!(parse_solution("3 1\n# comment\n2,1").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_solution("decision=YES\nsolution=4,0\npasses_used=1\n").unwrap(), vec![0, 4]);
        assert_eq!(parse_solution("solution=\n").unwrap(), Vec::<usize>::new());
        assert!(parse_solution("x").is_err());
    }
}
