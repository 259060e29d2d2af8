//! Cramér root, Esscher tilt and closed-form checks for the reference models.

use reflectlab::model::presets;

fn main() -> reflectlab::Result<()> {
    for (name, model) in [
        ("CL-1", presets::cl1()),
        ("BM-1", presets::bm1()),
        ("KOU-1", presets::kou1()),
        ("two-sided", presets::two_sided()),
    ] {
        let c = model.cramer_gamma()?;
        let tilted = model.esscher_tilt(c.gamma)?;
        println!(
            "{name:<10} E[X(1)] = {:+.4}  gamma = {:.12}  psi'(gamma) = {:.4}  tilted mean = {:+.4}",
            c.mean_x1,
            c.gamma,
            c.psi_prime,
            tilted.mean_x1()
        );
    }
    // Closed forms: alpha - lambda/|drift| and -2 drift / sigma^2.
    println!("CL-1 closed form {}, BM-1 closed form {}", 1.0 - 1.0 / 2.0, 2.0 * 1.0 / 1.0);

    let upward = reflectlab::LevyModel::new(0.5, 1.0, None, None)?;
    match upward.cramer_gamma() {
        Err(e) => println!("positive drift: {e}"),
        Ok(c) => println!("unexpected root {}", c.gamma),
    }
    Ok(())
}
