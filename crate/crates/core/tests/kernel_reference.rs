//! Distribution kernels against frozen high-precision reference values
//! (50-digit evaluations in common/kernel_refs.rs).

use pct_impact::stats::kernels::{normal_cdf, normal_quantile, t_cdf, t_quantile};

#[path = "common/kernel_refs.rs"]
mod kernel_refs;

use kernel_refs::{NORMAL_CDF, T_CDF, T_QUANTILE};

#[test]
fn normal_cdf_checkpoints() {
    for (x, want) in NORMAL_CDF {
        let got = normal_cdf(x);
        assert!((got - want).abs() < 1e-8, "x={x}: {got} vs {want}");
        assert!(
            (got - want).abs() <= 1e-13 * want.max(1e-300) + 1e-15,
            "x={x}: {got} vs {want}"
        );
    }
}

#[test]
fn t_cdf_checkpoints() {
    for (x, df, want) in T_CDF {
        let got = t_cdf(x, df).unwrap();
        assert!((got - want).abs() < 1e-8, "t={x}, df={df}: {got} vs {want}");
        assert!(
            (got - want).abs() <= 1e-10 * want + 1e-15,
            "t={x}, df={df}: {got} vs {want}"
        );
    }
}

#[test]
fn fifty_cdf_checkpoints() {
    assert_eq!(NORMAL_CDF.len() + T_CDF.len(), 50);
}

#[test]
fn t_quantile_checkpoints() {
    for (q, df, want) in T_QUANTILE {
        let got = t_quantile(q, df).unwrap();
        assert!(
            (got - want).abs() < 1e-9 * want.abs().max(1.0),
            "q={q}, df={df}: {got} vs {want}"
        );
    }
}

#[test]
fn large_df_quantile_is_normal() {
    for df in [1e5, 3e5, 1e6, 1e8] {
        assert!((t_quantile(0.975, df).unwrap() - 1.959964).abs() < 1e-4);
    }
    assert!((normal_quantile(0.975).unwrap() - 1.959963984540054).abs() < 1e-12);
}
