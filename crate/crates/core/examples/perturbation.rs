//! How the essential numerical range reacts to perturbations: unchanged by a
//! finite-rank patch, stable under the Ex1 off-diagonal term, moved by the
//! Ex2 term.
//!
//! ```bash
//! cargo run --release --example perturbation
//! ```

use num_complex::Complex64;
use specpol::essrange::{estimate_we, finite_rank_perturb, WindowSchedule};
use specpol::numrange::{hausdorff_clipped, ClipBox};
use specpol::operators::{delay_operator, ex1_models, ex2_models};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let clip = ClipBox::new(0.0, 30.0, -6.0, 6.0);
    let sched = WindowSchedule::blocks(&[5, 10, 20, 40], 20, clip)?;

    let a = delay_operator();
    let patches: Vec<(usize, usize, Complex64)> = (1..=4).map(|i| (i, 5 - i, Complex64::new(7.0, -3.0))).collect();
    let patched = finite_rank_perturb(&a, &patches);
    let d = hausdorff_clipped(&estimate_we(&a, &sched)?.limit, &estimate_we(&patched, &sched)?.limit, clip)?;
    println!("finite-rank patch (extent {:?}): estimates differ by {d:e}", patched.patch_extent());

    let (t, s) = ex1_models();
    let ts = t.plus(&s, "T+S");
    let (et, ets) = (estimate_we(&t, &sched)?, estimate_we(&ts, &sched)?);
    for (k, m) in [5, 10, 20, 40].iter().enumerate() {
        let lo = |e: &specpol::essrange::EssRangeEstimate| e.windows[k].region.re_extent().map_or(f64::NAN, |r| r.0);
        println!("Ex1 window from block {m:>2}: min Re T = {:.6}, T+S = {:.6}", lo(&et), lo(&ets));
    }

    let (t2, s2) = ex2_models();
    let ts2 = t2.plus(&s2, "T+S");
    let gap = hausdorff_clipped(&estimate_we(&t2, &sched)?.limit, &estimate_we(&ts2, &sched)?.limit, clip)?;
    println!("Ex2: estimates of T and T+S differ by {gap:.3}");
    Ok(())
}
