//! A generic axis avoids every pairwise direction of the sources and every
//! dipole direction, so projection keeps points distinct and dipoles
//! nonzero.
//!
//!     cargo run --release --example generic_axis

use pointsource::geometry::{find_preferred_axis, pairwise_directions, project_to_plane, AxisOptions, DirectionSet};
use pointsource::sampling::{random_configuration3, random_unit3, trial_rng};

fn main() -> pointsource::Result<()> {
    for trial in 0..5 {
        let mut rng = trial_rng(9, trial);
        let n = 2 + trial as usize;
        let config = random_configuration3(&mut rng, n)?;
        let dipoles: Vec<[f64; 3]> = (0..n).map(|_| random_unit3(&mut rng)).collect();
        let pairwise = pairwise_directions(config.points())?;
        let axis = find_preferred_axis(
            config.points(),
            &DirectionSet::from_vectors(dipoles.clone()),
            AxisOptions::default(),
        )?;
        let p = project_to_plane(&config, axis, Some(&dipoles))?;
        let pts = p.config.points();
        let mut min_dist = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                min_dist = min_dist.min((pts[i].x - pts[j].x).hypot(pts[i].y - pts[j].y));
            }
        }
        let min_dipole = p.dipoles.iter().map(|d| d[0].hypot(d[1])).fold(f64::INFINITY, f64::min);
        println!(
            "n={n}: {} pairwise directions (at most {}), axis [{:+.3}, {:+.3}, {:+.3}], min gap {min_dist:.3e}, min dipole {min_dipole:.3e}",
            pairwise.len(),
            2 * n * (n - 1),
            axis[0],
            axis[1],
            axis[2]
        );
    }
    Ok(())
}
