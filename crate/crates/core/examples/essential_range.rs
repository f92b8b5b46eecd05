//! Tail-window estimates of the essential numerical range: an empty set, a
//! selfadjoint interval, and the parabolic region of the delay operator.
//!
//! ```bash
//! cargo run --release --example essential_range
//! ```

use specpol::essrange::{estimate_we, parabola_e, selfadjoint_we, WindowSchedule};
use specpol::numrange::{hausdorff_clipped, ClipBox};
use specpol::operators::{delay_operator, diag_alternating, free_jacobi};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let square = ClipBox::new(-10.0, 10.0, -10.0, 10.0);
    let sched = WindowSchedule::new(vec![11, 21, 41, 81], 16, square)?;
    let est = estimate_we(&diag_alternating(), &sched)?;
    println!("diag(±k): empty = {}", est.empty);
    for (k, m) in sched.starts.iter().enumerate() {
        println!("  window from {m:>3}: min Re of tail hull = {}", est.tail_min_re(k));
    }

    let sched = WindowSchedule::geometric(64, 4, square)?;
    let interval = selfadjoint_we(&free_jacobi(), &sched)?;
    println!("free Jacobi: W_e = {:?}", interval.re_extent());

    let clip = ClipBox::new(0.0, 30.0, -6.0, 6.0);
    let sched = WindowSchedule::blocks(&[25, 50, 100, 200], 100, clip)?;
    let est = estimate_we(&delay_operator(), &sched)?;
    let e = parabola_e(720, clip);
    println!("delay operator: increments {:?}, stabilized {}", est.increments, est.stabilized);
    println!("  distance to Re z >= 3/4 + (Im z)^2: {:.2e}", hausdorff_clipped(&est.limit, &e, clip)?);
    Ok(())
}
