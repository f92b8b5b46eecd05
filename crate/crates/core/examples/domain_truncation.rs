//! Dirichlet truncations of the advection-diffusion operator to [-s, s]:
//! the computed spectrum follows 1 + π²k²/(4s²) on the real axis, far from
//! the operator's spectrum.
//!
//! ```bash
//! cargo run --release --example domain_truncation
//! ```

use specpol::numrange::ClipBox;
use specpol::operators::advdiff_constant;
use specpol::truncation1d::{exact_constant_spectrum, truncated_spectrum, truncation_we, TruncationSchedule};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let op = advdiff_constant();
    let sched = TruncationSchedule::new(vec![5.0, 7.0, 9.0])?;
    let run = truncated_spectrum(&op, &sched, true)?;
    for level in &run.levels {
        let mut values = level.retained_values();
        values.sort_by(|a, b| a.re.total_cmp(&b.re));
        let exact = exact_constant_spectrum(level.s, 4);
        println!("s = {} ({} nodes, {} retained)", level.s, level.nodes, values.len());
        for (k, (z, e)) in values.iter().zip(&exact).enumerate() {
            println!("  k={}  computed {:.8}  formula {:.8}", k + 1, z.re, e);
        }
    }
    let region = truncation_we(&op, ClipBox::new(-10.0, 100.0, -30.0, 30.0))?;
    println!("symbol region: Re from {:?}, Im span {:?}", region.re_extent().map(|r| r.0), region.im_extent());
    Ok(())
}
