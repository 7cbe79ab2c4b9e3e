//! The projection toolbox: ridge fits under the (1/n)-scaled loss, the
//! effective-degrees-of-freedom trace, AIC penalty selection, and the cap
//! operator.
//!
//! Run with: `cargo run --example ridge_projection`

use modelswitch::linalg::Matrix;
use modelswitch::numcore::{cap, effective_dof, predict, ridge_fit, select_ridge_aic, RidgeConfig};

fn main() {
    // a small design: intercept + two correlated columns
    let n = 40;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|t| {
            let x = (t as f64 / 7.0).sin();
            let z = x + 0.2 * ((t * t) as f64 / 11.0).cos();
            vec![1.0, x, z]
        })
        .collect();
    let x = Matrix::from_rows(rows).unwrap();
    let y: Vec<f64> = (0..n)
        .map(|t| {
            let s = (t as f64 / 7.0).sin();
            0.5 + 2.0 * s + 0.3 * ((t * 13 % 17) as f64 / 8.0 - 1.0)
        })
        .collect();

    println!("ridge path (intercept never shrunk):");
    println!(
        "{:>10} {:>10} {:>10} {:>10} {:>8}",
        "rho", "b0", "b1", "b2", "edof"
    );
    for rho in [0.0, 1e-3, 1e-2, 1e-1, 1.0, 10.0] {
        let cfg = RidgeConfig {
            rho,
            penalize_intercept: false,
            rho_grid: vec![],
        };
        let fit = ridge_fit(&x, &y, &cfg).unwrap();
        println!(
            "{:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>8.3}",
            rho, fit.coefficients[0], fit.coefficients[1], fit.coefficients[2], fit.effective_dof
        );
    }

    let aic_cfg = RidgeConfig {
        rho: 0.0,
        penalize_intercept: false,
        rho_grid: modelswitch::numcore::default_rho_grid(),
    };
    let (rho_star, best) = select_ridge_aic(&x, &y, &aic_cfg).unwrap();
    println!(
        "\nAIC-selected rho = {rho_star:.3e} (rss {:.4}, edof {:.3})",
        best.rss, best.effective_dof
    );

    println!("\neffective dof at rho = 0 equals the column count:");
    println!("  edof = {:.6}", effective_dof(&x, 0.0, true).unwrap());

    println!("\nthe cap operator clamps symmetric around zero:");
    for v in [-5.0, -1.2, 0.4, 3.7] {
        println!("  [{v:>5}]_2 = {}", cap(v, 2.0));
    }

    let capped = best.with_cap(1.0);
    let preds = predict(&capped, &x).unwrap();
    let bound = preds.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    println!("\ncapped predictions stay inside [-1, 1]: max |pred| = {bound:.4}");
}
