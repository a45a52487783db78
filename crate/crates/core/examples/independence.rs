//! Seeded independence verdicts per basis kind, then a noisy coefficient
//! recovery on one configuration.
//!
//!     cargo run --release --example independence

use pointsource::independence::{
    random_coefficients, random_configuration, recover_coefficients, verify, BasisKind, Verdict, VerifyOptions,
};
use pointsource::sampling::{trial_rng, Sampler};

fn main() -> pointsource::Result<()> {
    let options = VerifyOptions::default();
    let kinds = [
        BasisKind::Log,
        BasisKind::Pole(1),
        BasisKind::Pole(2),
        BasisKind::Pole(4),
        BasisKind::Mass2,
        BasisKind::Dipole2,
        BasisKind::Multipole2(3),
        BasisKind::Mass3,
        BasisKind::Dipole3,
        BasisKind::Mixed12,
        BasisKind::LogPole,
    ];
    println!(
        "{:>11} {:>4} {:>12} {:>12} {:>10}  status",
        "kind", "n_k", "min moment", "min design", "flagged"
    );
    for kind in kinds {
        for n_k in [2, 5] {
            let verdicts = verify(kind, n_k, 20, 1, &options)?;
            let moment = verdicts
                .iter()
                .filter_map(|v| v.relative_moment)
                .fold(f64::INFINITY, f64::min);
            let design = verdicts.iter().map(|v| v.relative_gram).fold(f64::INFINITY, f64::min);
            let flagged = verdicts.iter().filter(|v| v.verdict == Verdict::Flagged).count();
            println!(
                "{:>11} {n_k:>4} {moment:>12.3e} {design:>12.3e} {flagged:>10}  {}",
                kind.to_string(),
                if kind.theorem_backed() { "theorem" } else { "open" }
            );
        }
    }

    // recovery degrades gracefully with noise
    let kind = BasisKind::Pole(2);
    let mut rng = trial_rng(42, 0);
    let config = random_configuration(&mut rng, kind, 4, Sampler::Annulus)?;
    let truth = random_coefficients(&mut rng, kind, 4);
    println!();
    for noise in [0.0, 1e-10, 1e-6, 1e-3] {
        let r = recover_coefficients(&config, kind, &truth, 128, 2.0, noise, &mut rng)?;
        println!(
            "noise {noise:.0e}: max error {:.2e} (design cond {:.2e})",
            r.max_error, r.cond
        );
    }
    Ok(())
}
