//! Trapping and extreme-poverty probabilities at the reference parameters,
//! next to a small Monte Carlo estimate.

use povtrap_core::capital_model::{LossDistribution, ModelParams, OmegaRate};
use povtrap_core::closed_form::{ep_probability_constant, ep_probability_exponential, trapping_probability};
use povtrap_core::monte_carlo::{estimate_ep, estimate_trapping};

fn main() -> Result<(), povtrap_core::Error> {
    let p = ModelParams::from_micro(0.1, 4.0, 0.4, 1.0, 0.8, 1.0, 2.0, 0.25)?;
    let loss = LossDistribution::beta(p.alpha())?;
    println!("r = {}, x** = {:.6}", p.r(), p.x_double_star());
    println!("{:>5} {:>10} {:>10} {:>11}   {:>22}", "x", "psi_P", "psi_EP", "psi_EP(b/x)", "MC psi_P (n=5000)");
    for x in [1.1, 1.5, 2.0, 3.0, 5.0] {
        let mc = estimate_trapping(&p, &loss, x, 5000, 400.0, 1)?;
        println!(
            "{x:>5} {:>10.6} {:>10.6} {:>11.6}   {:.4} [{:.4}, {:.4}]",
            trapping_probability(&p, x)?,
            ep_probability_constant(&p, 0.02, 0.0, x)?,
            ep_probability_exponential(&p, 0.02, x)?,
            mc.value,
            mc.ci_low,
            mc.ci_high
        );
    }
    let mc = estimate_ep(&p, &loss, &OmegaRate::Constant(0.02), 0.5, 5000, 400.0, 1)?;
    println!("from x = 0.5: psi_EP = {:.6}, MC {:.4} [{:.4}, {:.4}]", ep_probability_constant(&p, 0.02, 0.0, 0.5)?, mc.value, mc.ci_low, mc.ci_high);
    Ok(())
}
