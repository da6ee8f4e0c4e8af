//! Prints the six traces and the decomposition for a few parameter points.

use rf_theory::{decompose_error, psi_terms, ModelParams};

fn main() {
    for (psi1, lambda) in [(1.0, 1e-2), (2.0, 1e-2), (1.02, 1e-5), (5.0, 1e-5), (0.5, 1e-5)] {
        let p = ModelParams::new(psi1, 1.0, lambda).with_snr(1.0);
        let s = psi_terms(&p).unwrap();
        let d = decompose_error(&s, &p, 1).unwrap();
        println!("psi1={psi1} lambda={lambda} {s:?}");
        println!("    {d:?}");
    }
}
