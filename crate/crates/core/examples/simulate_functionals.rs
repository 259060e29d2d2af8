//! Samples (Y(t), Z(x+y), M(t,x)) for CL-1 and compares the overshoot and
//! the stationary law with their limits.

use reflectlab::model::presets;
use reflectlab::sim::{monte_carlo, sample_functionals, SimConfig};
use reflectlab::stats::{dkw_radius, ks_distance};
use reflectlab::LimitLawSet;

fn main() -> reflectlab::Result<()> {
    let model = presets::cl1();
    let laws = LimitLawSet::from_model(&model, None)?;
    let cfg = SimConfig {
        t: 200.0,
        x: 6.0,
        y_offset: 2.0,
        n: 20_000,
        seed: 7,
        step: 1.0,
        horizon: 2_000.0,
    };
    println!("first sample: {:?}", sample_functionals(&model, &cfg, 0));

    let r = monte_carlo(&model, &cfg, None)?;
    let ks = ks_distance(&r.z, |x| laws.z_inf_cdf(x).unwrap_or(f64::NAN));
    println!(
        "overshoot: {} of {} passages observed, KS {ks:.4} (DKW 99% {:.4})",
        r.z.len(),
        r.n(),
        dkw_radius(r.z.len().max(1), 0.99)?
    );
    println!(
        "Y(t) atom at 0: {:.4} (limit {:.4})",
        r.y_t.atom_fraction(),
        laws.y_inf_atom()
    );
    Ok(())
}
