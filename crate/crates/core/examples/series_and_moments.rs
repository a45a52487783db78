//! A mixed log/pole expansion, its power series in 1/z, and the moment
//! matrices whose null spaces decide uniqueness.
//!
//!     cargo run --example series_and_moments

use num_complex::Complex64;
use pointsource::complex_basis::{
    eval_expansion, series_coefficients, sufficient_order, tail_bound, truncation_order, ComplexExpansionSpec, PoleTerm,
};
use pointsource::geometry::{validate_configuration, SourcePoint2};
use pointsource::independence::{moment_rank_test, BasisKind};

fn main() -> pointsource::Result<()> {
    let sources = validate_configuration(
        vec![
            SourcePoint2::new(0.3, 0.2),
            SourcePoint2::new(-0.4, 0.1),
            SourcePoint2::new(0.0, -0.6),
        ],
        0.05,
        0.95,
        1e-3,
    )?;
    let c = Complex64::new;
    let spec = ComplexExpansionSpec::new(
        sources.clone(),
        vec![c(1.0, 0.0), c(-0.5, 0.25), c(-0.5, -0.25)],
        vec![
            PoleTerm {
                k: 0,
                m: 1,
                strength: c(0.5, -0.1),
            },
            PoleTerm {
                k: 1,
                m: 2,
                strength: c(0.0, 0.3),
            },
            PoleTerm {
                k: 2,
                m: 3,
                strength: c(-0.2, 0.0),
            },
        ],
    )?;

    for z_abs in [1.5, 2.0, 5.0] {
        let z = Complex64::from_polar(z_abs, 0.7);
        let direct = eval_expansion(&spec, z)?;
        // the geometric order ignores the j^(m-1) growth of pole coefficients
        for n in [
            truncation_order(&spec, z_abs, 1e-14)?,
            sufficient_order(&spec, z_abs, 1e-14)?,
        ] {
            let err = (series_coefficients(&spec, n)?.evaluate(z) - direct).norm() / direct.norm();
            println!(
                "|z| = {z_abs}: {n:>3} terms, tail bound {:.1e}, relative error {err:.1e}",
                tail_bound(&spec, n, z_abs)
            );
        }
    }

    println!("\nmoment systems on the same nodes:");
    for kind in [
        BasisKind::Log,
        BasisKind::Pole(1),
        BasisKind::Pole(3),
        BasisKind::Mixed12,
        BasisKind::LogPole,
    ] {
        let s = moment_rank_test(&sources, kind)?;
        println!(
            "{:>9}: sigma_min {:.3e}  sigma_max {:.3e}  relative {:.3e}",
            kind.to_string(),
            s.sigma_min,
            s.sigma_max,
            s.relative_sigma_min()
        );
    }
    Ok(())
}
