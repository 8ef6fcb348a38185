use std::path::PathBuf;

use clap::Args;
use fpss::gen::*;
use fpss::stream::{Problem, Stream};
use fpss::util::rng_for;

use crate::report::join_ids;
use crate::{parse_problem, CliError};

/// Largest vertex count the generators accept.
pub const MAX_N: usize = 1 << 16;

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: Problem,
    #[arg(short)]
    pub n: usize,
    #[arg(short)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Extra edges inserted and deleted again, as a fraction of the final edge count.
    #[arg(long, default_value_t = 0.3)]
    pub churn: f64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

/// A planted instance: the stream and the vertices whose removal leaves the target class.
pub fn planted(problem: Problem, n: usize, k: usize, seed: u64, churn: f64) -> Result<(Stream, Vec<usize>), CliError> {
    if n == 0 || n > MAX_N {
        return Err(CliError::Usage(format!("n must be in 1..={MAX_N}, got {n}")));
    }
    if k > n {
        return Err(CliError::Usage(format!("k={k} exceeds n={n}")));
    }
    if !(0.0..=4.0).contains(&churn) {
        return Err(CliError::Usage(format!("churn must be in [0, 4], got {churn}")));
    }
    let mut rng = rng_for(seed, 0x6e6);
    let p = Some(problem);
    Ok(match problem {
        Problem::Fvst => {
            let (d, plant) = plant_tournament(&random_transitive_tournament(n, &mut rng), k, &mut rng);
            (turnstile_digraph_stream(&d, k, churn, &mut rng), plant)
        }
        Problem::Cvd | Problem::Svd | Problem::Tvd | Problem::Bvd | Problem::Pivd => {
            let base = match problem {
                Problem::Cvd => random_cluster(n, &mut rng),
                Problem::Svd => random_split(n, &mut rng),
                Problem::Tvd => random_threshold(n, &mut rng),
                Problem::Bvd => random_block_graph(n, &mut rng),
                _ => random_proper_interval(n, &mut rng),
            };
            let (g, plant) = plant(&base, k, 0.3, &mut rng);
            (turnstile_stream(&g, k, p, churn, &mut rng), plant)
        }
        Problem::Oct | Problem::Sfvs | Problem::Mwc => {
            let (g, terminals, plant) = planted_cut_instance(problem, n, k, &mut rng);
            let s = turnstile_stream(&g, k, p, churn, &mut rng);
            let s = if problem.has_terminals() { flag_terminals(s, &terminals) } else { s };
            (s, plant)
        }
    })
}

pub fn gen(a: &GenArgs) -> Result<(), CliError> {
    let (stream, plant) = planted(a.problem, a.n, a.k, a.seed, a.churn)?;
    let text = format!("# planted {}\n# seed {}\n{}", join_ids(&plant), a.seed, stream.to_text());
    match &a.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fpss::solvers::Instance;
    use fpss::stream::parse_stream;

    #[test]
    fn plants_are_solutions() {
        for problem in Problem::ALL {
            for seed in 0..5 {
                let (s, plant) = planted(problem, 12, 2, seed, 0.3).unwrap();
                assert_eq!(parse_stream(&s.to_text()).unwrap(), s);
                assert!(plant.len() <= 2);
                assert!(Instance::from_stream(problem, &s).is_solution(&plant), "{problem} seed {seed}");
            }
        }
    }

    #[test]
    fn parameters_are_checked() {
        assert!(planted(Problem::Cvd, 0, 0, 0, 0.3).is_err());
        assert!(planted(Problem::Cvd, 3, 4, 0, 0.3).is_err());
        assert!(planted(Problem::Cvd, 3, 1, 0, -1.0).is_err());
    }
}
