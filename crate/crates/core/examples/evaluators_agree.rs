//! The README example: both m-function evaluators agree on a converted pair.

use num_complex::Complex64;
use spectral_cs::operator::JacobiCoefficients;
use spectral_cs::transform::jacobi_to_canonical;
use spectral_cs::weyl::{m_canonical, m_jacobi};

fn main() -> spectral_cs::Result<()> {
    // Free operator stored to depth 60, constant-extended to depth 500.
    let coeffs = JacobiCoefficients::free_schrodinger(60).extended(500);
    let phase = jacobi_to_canonical(&coeffs)?;

    let z = Complex64::new(0.3, 1.0);
    let recurrence = m_jacobi(&coeffs, z, 500)?;
    let propagated = m_canonical(&phase, z, 500)?;
    assert!((recurrence - propagated).norm() < 1e-8);
    println!("m({z}) = {recurrence} from the recurrence, {propagated} propagated");
    Ok(())
}
