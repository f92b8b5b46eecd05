//! Track eigenvalues of the Gaussian-potential truncations across domain
//! sizes and classify each accumulation candidate against the symbol region.
//!
//! ```bash
//! cargo run --release --example pollution_report
//! ```

use num_complex::Complex64;
use specpol::classify::{classify, track, Verdict, DEFAULT_MARGIN, DEFAULT_RADIUS};
use specpol::numrange::ClipBox;
use specpol::operators::advdiff_gaussian;
use specpol::truncation1d::{essinf_potential, truncated_spectrum, truncation_we, TruncationSchedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let op = advdiff_gaussian();
    println!("ess inf of the Liouville potential: {:.4}", essinf_potential(&op, 10.0, 1e-3)?);

    let run = truncated_spectrum(&op, &TruncationSchedule::new(vec![6.0, 7.0, 8.0, 9.0])?, true)?;
    let levels: Vec<(f64, Vec<Complex64>)> = run.levels.iter().map(|l| (l.s, l.retained_values())).collect();
    let points = track(&levels, DEFAULT_RADIUS)?;
    let region = truncation_we(&op, ClipBox::new(-10.0, 100.0, -30.0, 30.0))?;
    let report = classify(&points, &region, "symbol hull", None, DEFAULT_MARGIN);

    let mut inside = 0;
    for p in &report.points {
        if p.verdict == Verdict::ApproximatedTrue {
            println!("true eigenvalue {:.8} (drift {:.1e})", Complex64::new(p.re, p.im), p.drift);
        } else {
            inside += 1;
        }
    }
    println!("{inside} further candidates lie inside the region and stay undecided");
    println!("{}", serde_json::to_string(&report.points[0])?);
    Ok(())
}
