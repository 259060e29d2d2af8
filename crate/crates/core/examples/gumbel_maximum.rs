//! Maximum of the reflected process along t = lambda exp(gamma x).

use reflectlab::model::presets;
use reflectlab::sim::{monte_carlo, SimConfig};
use reflectlab::stats::ks_distance;
use reflectlab::LimitLawSet;

fn main() -> reflectlab::Result<()> {
    let model = presets::cl1();
    let lambda = 4.0;
    let laws = LimitLawSet::from_model(&model, Some(lambda))?;
    println!("Gumbel intensity {:.4}", laws.gumbel_intensity()?);
    for x in [4.0, 6.0, 8.0, 10.0] {
        let t = lambda * (laws.gamma * x).exp();
        let cfg = SimConfig {
            t,
            x,
            y_offset: 0.0,
            n: 10_000,
            seed: 3,
            step: 1.0,
            horizon: t,
        };
        let r = monte_carlo(&model, &cfg, None)?;
        let ks = ks_distance(&r.m, |z| laws.gumbel_cdf(z).unwrap_or(f64::NAN));
        println!("x = {x:>4}  t = {t:>8.1}  KS = {ks:.4}");
    }
    Ok(())
}
