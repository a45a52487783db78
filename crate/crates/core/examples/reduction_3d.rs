//! Integrating a balanced 3-D mass/dipole field along a generic axis gives
//! twice the planar logarithmic field of the projected sources.
//!
//!     cargo run --release --example reduction_3d

use pointsource::geometry::{validate_configuration, SourcePoint3};
use pointsource::real_basis::RealExpansionSpec3;
use pointsource::reduction::{line_integral_pm, reduce_dipole_r3, reduce_pm_r3, ReductionCheck, ReductionOptions};

fn main() -> pointsource::Result<()> {
    println!("closed-form line integral of 1/|X - X_k| minus 1/|X| against 2 ln(b/a):");
    for (a, b) in [(0.5, 3.0), (1.0, 1.0), (2.5, 0.7)] {
        let check = ReductionCheck::new(a, b, 1e4)?;
        println!(
            "  a={a} b={b}: closed {:+.12} limit {:+.12} quadrature {:+.12}",
            check.value_closed, check.value_limit, check.value_quadrature
        );
    }
    for l in [1e2, 1e3, 1e4, 1e5] {
        println!(
            "  L = {l:.0e}: tail {:.2e}",
            (line_integral_pm(0.5, 3.0, l)? - 2.0 * (3.0f64 / 0.5).ln()).abs()
        );
    }

    let sources = validate_configuration(
        vec![
            SourcePoint3::new(0.3, -0.2, 0.1),
            SourcePoint3::new(-0.25, 0.35, -0.15),
            SourcePoint3::new(0.1, 0.4, 0.5),
        ],
        0.05,
        0.95,
        1e-3,
    )?;
    let spec = RealExpansionSpec3::new(
        sources,
        vec![1.0, -0.6, -0.4],
        vec![[0.2, -0.1, 0.3], [0.0, 0.5, 0.1], [-0.3, 0.2, 0.0]],
    )?;
    let options = ReductionOptions::default();
    let mass = reduce_pm_r3(&spec, &options)?.report;
    let dipole = reduce_dipole_r3(&spec, &options)?;
    println!("\naxis {:?}", mass.axis);
    println!(
        "mass defect   {:.2e} (quadrature cross-check {:.2e})",
        mass.defect,
        mass.quadrature_defect.unwrap_or(f64::NAN)
    );
    println!(
        "dipole defect {:.2e} (unextrapolated {:.2e}, axial part {:.2e})",
        dipole.report.defect,
        dipole.report.raw_defect.unwrap_or(f64::NAN),
        dipole.report.axial.unwrap_or(f64::NAN)
    );
    println!("projected dipoles {:?}", dipole.spec2.dipoles);
    Ok(())
}
