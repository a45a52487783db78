//! The structured matrices behind the mixed-pole question: the
//! Vandermonde determinant, and the elimination of simple-pole strengths
//! that leaves the bracket matrix similar to C.
//!
//!     cargo run --release --example eliminations

use pointsource::linalg::frobenius;
use pointsource::sampling::{sample_nodes, trial_rng, Sampler};
use pointsource::structured::{
    bracket_matrix, c_matrix, determinant, eliminate_first_block, eliminate_log_pole, log_pole_block,
    mixed_block_system, right_divide, vandermonde, vandermonde_product, BlockKind,
};

fn main() -> pointsource::Result<()> {
    let mut rng = trial_rng(5, 0);
    println!(
        "{:>3} {:>10} {:>10} {:>10} {:>10}",
        "n", "det", "G.R.G^-1", "log-pole", "sigma_min"
    );
    for n in 1..=8 {
        let nodes = sample_nodes(&mut rng, n, Sampler::Annulus, Sampler::Annulus.bounds())?;
        let g = vandermonde(&nodes, n)?.entries;
        let want = vandermonde_product(&nodes);
        let det_err = (determinant(&g) - want).norm() / want.norm();

        let system = mixed_block_system(&nodes, &[BlockKind::Pole(1), BlockKind::Pole(2)], 2 * n)?;
        let reduced = eliminate_first_block(&system)?.reduced;
        let c = c_matrix(&nodes)?;
        let similar = right_divide(&(&c.g * &reduced), &c.g)?;
        let sim_err = frobenius(&(similar - &c.c)) / frobenius(&c.c);

        let bracket = bracket_matrix(&nodes)?;
        let lp = eliminate_log_pole(&log_pole_block(&nodes)?)?.reduced;
        let lp_err = frobenius(&(lp - &bracket)) / frobenius(&bracket);
        println!(
            "{n:>3} {det_err:>10.1e} {sim_err:>10.1e} {lp_err:>10.1e} {:>10.3e}",
            c.sigma_min
        );
    }
    Ok(())
}
