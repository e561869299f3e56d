//! Optimal photoisomerization yields with and without coherence.

use thermoyield::model::PhotoswitchParams;
use thermoyield::yields::{optimal_yield, qy_single, YieldDefinition};
use thermoyield::ThermalContext;

fn main() -> thermoyield::Result<()> {
    let ctx = ThermalContext::new(1.0)?;
    for lam in [0.0, 0.02, 0.2, 0.35] {
        let params = PhotoswitchParams::rhodopsin(0.7, lam)?;
        let any = optimal_yield(YieldDefinition::Any, &params, ctx)?;
        let both = optimal_yield(YieldDefinition::Both, &params, ctx)?;
        println!("lambda = {lam:.2}: QY_any = {:.4}, QY_both = {:.4}", any.value, both.value);
    }
    println!("QY_single = {:.4}", qy_single(2.48, 1.39, 0.7, ctx)?.value);

    let report = optimal_yield(YieldDefinition::Both, &PhotoswitchParams::rhodopsin(0.7, 0.2)?, ctx)?;
    println!("{}", report.to_json());
    Ok(())
}
