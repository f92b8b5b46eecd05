//! Two-bump test functions for the complex Airy operator -f'' + ixf whose
//! Rayleigh quotients land on any point of the open right half-plane.
//!
//! ```bash
//! cargo run --release --example airy_witness
//! ```

use num_complex::Complex64;
use specpol::operators::airy_witness;
use specpol::truncation1d::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for lambda in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 3.0), Complex64::new(0.5, -1.0), Complex64::new(0.1, 10.0)] {
        for n in [5usize, 20] {
            let reach = n as f64 + 2.0 * lambda.im.abs() + 4.0 / lambda.re.sqrt() + 2.0;
            let w = airy_witness(lambda, n, &Grid::with_step(-reach, reach, 1e-3))?;
            println!(
                "λ = {lambda}, n = {n:>2}: <Tf,f> = {:.6}, ‖f‖² = {:.6}, bumps at {:.1} and {:.1}, width {:.3}",
                w.rayleigh_value, w.norm_sq, w.centers.0, w.centers.1, w.width
            );
        }
    }
    Ok(())
}
