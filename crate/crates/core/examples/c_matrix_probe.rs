//! Monte-Carlo probe of σ_min(C) over the three node samplers. Records go
//! to a JSON-lines log; the report is a pure fold over them.
//!
//!     cargo run --release --example c_matrix_probe

use pointsource::probe::{append_records, probe_c, read_records, ProbeOptions, ProbeReport};
use pointsource::sampling::Sampler;
use pointsource::structured::{b_matrix, eigenvalues};

fn main() -> pointsource::Result<()> {
    let options = ProbeOptions::default();
    let dir = std::env::temp_dir().join("pointsource-probe");
    std::fs::create_dir_all(&dir)?;
    let log = dir.join("records.jsonl");
    let _ = std::fs::remove_file(&log);

    for sampler in Sampler::ALL {
        for n_k in [2, 4, 6] {
            let run = probe_c(n_k, 2000, sampler, 17, &options)?;
            append_records(&log, &run.records)?;
            let r = &run.report;
            println!(
                "{sampler:>13} n_k={n_k}: min relative sigma_min {:.3e}, flagged {}, rechecked {}",
                r.min_relative_sigma_min.unwrap_or(f64::NAN),
                r.flagged_count,
                r.rechecked_count
            );
        }
    }

    let all = read_records(&log)?;
    let report = ProbeReport::from_records(&all);
    println!("\n{} records in {}", report.trials, log.display());
    print!("{}", report.render_histogram());

    // C = A + B where B has spectrum {1, …, N_k}
    let nodes = &all[0].nodes;
    let nodes: Vec<_> = nodes.iter().map(|p| num_complex::Complex64::new(p[0], p[1])).collect();
    let mut spectrum: Vec<f64> = eigenvalues(&b_matrix(&nodes)?)?.iter().map(|e| e.re).collect();
    spectrum.sort_by(f64::total_cmp);
    println!("\nspectrum of B for the first record: {spectrum:.6?}");
    Ok(())
}
