//! Boundary of the numerical range of small matrices, and inversion of the
//! Rayleigh map: a unit vector whose quotient hits a chosen interior point.
//!
//! ```bash
//! cargo run --release --example numerical_range
//! ```

use num_complex::Complex64;
use specpol::linalg::{rayleigh, ComplexMatrix};
use specpol::numrange::{attain, nr_boundary, ClipBox, ConvexRegion};
use specpol::operators::ellipse_block;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 1..=4 {
        let sf = nr_boundary(&ellipse_block(n), 720, 1e-10)?;
        let region = ConvexRegion::from_support(sf, ClipBox::new(-20.0, 40.0, -20.0, 20.0));
        let (lo, hi) = region.re_extent().unwrap_or((f64::NAN, f64::NAN));
        let (bottom, top) = region.im_extent().unwrap_or((f64::NAN, f64::NAN));
        println!("W([[1,0],[{n},{}]]): Re in [{lo:.4}, {hi:.4}], Im in [{bottom:.4}, {top:.4}]", n * n);
    }

    // A non-normal 3x3 matrix: Jordan block plus a complex diagonal entry.
    let m = ComplexMatrix::new(
        3,
        3,
        vec![
            Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0),
        ],
    )?;
    for z in [Complex64::new(0.5, 0.5), Complex64::new(-0.8, 0.1), Complex64::new(1.0, 0.9)] {
        match attain(&m, z, 1e-12) {
            Ok(x) => {
                let q = rayleigh(&m, &x)?;
                println!("target {z:.3}: <Mx,x> = {q:.12}, |error| = {:.1e}", (q - z).norm());
            }
            Err(e) => println!("target {z:.3}: {e}"),
        }
    }
    Ok(())
}
