//! Simulate an AR(1) dataset, search the Markov order by AIC, and estimate
//! the precision at the selected order.

use gmrf::{
    band_pattern, prec_sparse, select_markov_order, simulate_ar, ArProcessSpec, PrecisionOptions,
    StopRule,
};

fn main() -> gmrf::Result<()> {
    let spec = ArProcessSpec::new(vec![0.8], 100); // AR(1), T = 100
    let x = simulate_ar(&spec, 100, 7)?; // 100 realisations
    let g = band_pattern(100, 1)?; // first-order chain graph

    let trace = select_markov_order(&x, &g, 15, StopRule::Exhaustive)?;
    for eval in &trace.evaluations {
        println!("order {:2}  nll {:.4}  aic {:.4}", eval.order, eval.nll, eval.aic);
    }

    let prec = prec_sparse(
        &x,
        &g,
        &PrecisionOptions {
            markov_order: trace.selected,
            ..Default::default()
        },
    )?;
    println!("selected order {} with {} stored entries", trace.selected, prec.nnz());
    Ok(())
}
