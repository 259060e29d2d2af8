//! Limits of the overshoot, the stationary law and the maximum, compared
//! with numerical Laplace inversion.

use reflectlab::model::presets;
use reflectlab::LimitLawSet;

fn main() -> reflectlab::Result<()> {
    for (name, model) in [("CL-1", presets::cl1()), ("KOU-1", presets::kou1())] {
        let laws = LimitLawSet::from_model(&model, Some(4.0))?;
        println!(
            "{name}: overshoot atom {:.4}, stationary atom {:.4}, Gumbel intensity {:.4}",
            laws.z_inf_atom(),
            laws.y_inf_atom(),
            laws.gumbel_intensity()?
        );
        let xs = [0.25, 0.5, 1.0, 2.0, 4.0];
        let inverted = laws.z_inf_tail_inverted(&xs)?;
        println!("    x      P(Z > x)   inverted    P(Y > x)");
        for (x, inv) in xs.iter().zip(inverted) {
            println!(
                "    {x:<5}  {:.6}   {inv:.6}   {:.6}",
                laws.z_inf_tail(*x)?,
                laws.y_inf_tail(*x)
            );
        }
        let t = laws.triple_transform(0.5, 1.0, 0.3)?;
        println!("    joint transform at (0.5, 1.0, 0.3): {:.6} {:+.6}i", t.re, t.im);
    }
    Ok(())
}
