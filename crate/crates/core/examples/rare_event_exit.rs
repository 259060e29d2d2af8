//! Two-sided exit probabilities far beyond the reach of plain Monte Carlo,
//! estimated under the Esscher tilt.

use reflectlab::model::presets;
use reflectlab::sim::{importance_sample_exit, plain_exit_probability};
use reflectlab::LimitLawSet;

fn main() -> reflectlab::Result<()> {
    let model = presets::cl1();
    let laws = LimitLawSet::from_model(&model, None)?;
    let z = 10.0;
    println!("   x   tilted estimate        rel. se   asymptotic");
    for x in [5.0, 10.0, 20.0, 40.0] {
        let (est, se) = importance_sample_exit(&model, x, z, 20_000, 1)?;
        println!(
            "{x:>4}   {est:.6e}   {:.4}    {:.6e}",
            se / est,
            laws.two_sided_exit_asym(x, z)
        );
    }
    let (p, se) = plain_exit_probability(&model, 5.0, z, 20_000, 2)?;
    println!("plain Monte Carlo at x = 5: {p:.6e} (se {se:.1e})");
    Ok(())
}
