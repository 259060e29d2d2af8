//! Joint versus product frequencies of {Y(t) > a}, {Z > b}, {M <= c}, plus
//! the excursion straddling probability, along the coupled grid.

use reflectlab::model::presets;
use reflectlab::sim::{monte_carlo, straddle_probability, SimConfig};
use reflectlab::stats::{independence_gap, ThresholdGrid};

fn main() -> reflectlab::Result<()> {
    let model = presets::cl1();
    let gamma = model.cramer_gamma()?.gamma;
    let grid = ThresholdGrid::new(vec![0.5, 1.5, 3.0], vec![0.5, 1.0, 2.0], vec![-1.0, 0.5, 2.0])?;
    for x in [4.0, 6.0, 8.0] {
        let t = 4.0 * (gamma * x).exp();
        let cfg = SimConfig {
            t,
            x,
            y_offset: 3.0,
            n: 20_000,
            seed: 11,
            step: 1.0,
            horizon: 10.0 * t,
        };
        let r = monte_carlo(&model, &cfg, Some(&grid))?;
        let rep = independence_gap(r.counts.as_ref().expect("grid given"))?;
        let (p, _) = straddle_probability(&model, t, x, 20_000, 11)?;
        println!(
            "x = {x}: gap {:.4} pair gap {:.4} (n = {}, DKW {:.4}), straddle {p:.4}",
            rep.gap, rep.pair_gap, rep.n, rep.dkw_radius
        );
    }
    Ok(())
}
