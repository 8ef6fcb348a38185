//! Peak sketch space of the OCT pipeline as n doubles.
//!
//! `cargo run --release -p fpss --example oct_scaling`

use fpss::cut::*;
use fpss::gen::*;
use fpss::util::rng_for;
use std::time::Instant;

fn main() {
    for n in [256usize, 512, 1024, 2048] {
        let mut rng = rng_for(1, n as u64);
        let base = random_bipartite(n, 8.0 / n as f64, &mut rng);
        let (g, _) = plant(&base, 2, 4.0 / n as f64, &mut rng);
        let s = turnstile_stream(&g, 2, None, 0.3, &mut rng);
        let t = Instant::now();
        let out = oct_pipeline(&s, 2, &CutConfig { jobs: 8, ..Default::default() }).unwrap();
        println!("n={n} m={} ell={} peak={} yes={} sparse={} t={:?}", g.m(), out.sample.as_ref().unwrap().ell, out.ledger.peak_total(), out.result.is_yes(), out.sparsified.as_ref().unwrap().edges.len(), t.elapsed());
    }
}
