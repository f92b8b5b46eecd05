//! Spurious eigenvalues on demand: one orthogonal witness per target turns
//! the Galerkin matrix of the delay operator block triangular with the
//! target as new eigenvalue.
//!
//! ```bash
//! cargo run --release --example galerkin_injection
//! ```

use num_complex::Complex64;
use specpol::galerkin::{fill_region, inject_spurious, verify_triangular, SubspaceBasis, WindowPolicy};
use specpol::linalg::general_eig;
use specpol::operators::delay_operator;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = delay_operator();
    let v = SubspaceBasis::blocks(10);
    let policy = WindowPolicy::default().resolved(&a)?;
    println!("dim V = {}, eigenvalues of A_V: 1 and k^2 for k <= 10", v.dim());

    for target in [Complex64::new(2.0, 0.0), Complex64::new(3.0, 1.0), Complex64::new(1.5, -0.5)] {
        let inj = inject_spurious(&a, &v, target, 1e-3, &policy)?;
        let t_h = v.with_witness(&inj.witness).compress(&a)?;
        println!(
            "target {target}: mu = {:.10}, window {:?}, orthogonality {:.1e}, triangular {}",
            inj.mu,
            inj.window,
            inj.orthogonality,
            verify_triangular(&t_h, (v.dim(), 1))
        );
    }

    match inject_spurious(&a, &v, Complex64::new(-5.0, 0.0), 1e-3, &policy) {
        Ok(_) => println!("-5 was injected"),
        Err(e) => println!("-5: {e}"),
    }

    let omega: Vec<Complex64> = (0..5).map(|k| Complex64::new(2.0 + k as f64, 0.5)).collect();
    let filled = fill_region(&a, &v, &omega, 4, &policy)?;
    let mut eig = general_eig(&filled.basis.compress(&a)?, 1e-12)?.values;
    eig.retain(|z| z.im.abs() > 1e-9);
    let eig: Vec<String> = eig.iter().map(|z| format!("{z:.3}")).collect();
    println!(
        "filled {} points with {} witnesses: sup distance {:.3}, non-real eigenvalues [{}]",
        omega.len(),
        filled.plan.achieved.len(),
        filled.sup_distance,
        eig.join(", ")
    );
    Ok(())
}
