//! Ladder exponents of a model and a numerical check of the product identity.

use num_complex::Complex64;
use reflectlab::model::presets;
use reflectlab::factorize;

fn main() -> reflectlab::Result<()> {
    let model = presets::two_sided();
    let f = factorize(&model)?;
    let show = |name: &str, r: &reflectlab::RationalBernstein| {
        println!(
            "{name}: zeros {:?} poles {:?} killing {:.6} drift {:.6}",
            r.zeros(),
            r.poles(),
            r.killing(),
            r.drift()
        );
        for j in r.jump_terms() {
            println!("    jump weight {:.6} at rate {:.6}", j.weight, j.pole);
        }
    };
    show("ascending ", &f.ascending);
    show("descending", &f.descending);
    println!("k = {:.6}  C_gamma = {:.6}  ell = {:.6}", f.k, f.c_gamma, f.ell);

    let worst = (1..=50)
        .map(|i| f.identity_residual(&model, Complex64::new(0.0, 0.2 * i as f64)))
        .fold(0.0, f64::max);
    println!("largest relative residual on the imaginary axis: {worst:.2e}");
    println!("phi(-gamma) = {:.2e}", f.phi(-f.gamma));
    Ok(())
}
