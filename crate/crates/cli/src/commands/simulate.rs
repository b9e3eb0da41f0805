//! Per-step trajectory export.

use pdp_entropy::functionals::{delta_closed_form, eta_closed_form};
use pdp_entropy::{
    frequentist_functional, functional_a, global_max_entropy, global_min_entropy, kappa, mle_entropy,
    simulate_transitions, PdpParams, PosteriorEntropy, RngSeed,
};
use rayon::prelude::*;

use super::{open_output, output_error};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::records::StepRecord;

/// Rows for one replica; the generator is derived from `(seed, replica)`.
pub fn replica_records(params: &PdpParams, length: u64, seed: u64, replica: u64) -> Vec<StepRecord> {
    let mut rng = RngSeed::new(seed, replica).rng();
    let mut eval = PosteriorEntropy::new(*params);
    let mut rows = Vec::with_capacity(length as usize);
    simulate_transitions(params, length, &mut rng, |state, t| {
        let n = t.count_after();
        let ell = state.ell();
        rows.push(StepRecord {
            replica,
            ell,
            k: state.k(),
            last_count: n,
            is_discovery: t.is_discovery(),
            h_mle: mle_entropy(state).expect("ell >= 1"),
            h_pdp: eval.mean(state),
            h_max: global_max_entropy(ell, params),
            h_min: global_min_entropy(ell, params),
            a_value: functional_a(state, params),
            delta: delta_closed_form(n, params),
            eta: eta_closed_form(t.ell_before, n, params),
            a_f: frequentist_functional(state),
            delta_f: kappa(n),
        });
    });
    rows
}

/// All replicas, grouped by replica index.
pub fn simulate(cfg: &RunConfig) -> Vec<StepRecord> {
    (0..cfg.replicas)
        .into_par_iter()
        .map(|r| replica_records(&cfg.params, cfg.length, cfg.seed, r))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let rows = simulate(cfg);
    let path = cfg.output_path.as_deref();
    let mut out = open_output(path)?;
    let write = |out: &mut dyn std::io::Write| -> std::io::Result<()> {
        writeln!(out, "{}", StepRecord::HEADER)?;
        for r in &rows {
            r.write_csv(out)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| output_error(path, e))
}
