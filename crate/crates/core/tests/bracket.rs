use std::time::Instant;

use liecover_core::covering::{bracket_covering, BracketConfig, BracketStatus, RowRole};
use liecover_core::quadrature::haar_grid;
use liecover_core::symbol::make_symbol;
use liecover_core::{GroupId, SymbolFamily, TruncatedKernel};

#[test]
fn heat_sandwich_is_ordered_and_reproducible() {
    let kernel = TruncatedKernel::new(make_symbol(GroupId::Torus1, SymbolFamily::Heat { t: 1.0 }, 12.0).unwrap());
    let grid = haar_grid(GroupId::Torus1, 64).unwrap();
    let norm = liecover_core::rkhs::operator_norms(&kernel, 2.0).unwrap().q;
    let eps: Vec<f64> = [0.5, 0.4, 0.3].iter().map(|f| f * norm).collect();
    let cfg = BracketConfig { grid: &grid, cloud_size: 4096, seed: 17, slack: 1.0, params: None };
    let start = Instant::now();
    let a = bracket_covering(&kernel, 2.0, 4.0, &eps, &cfg).unwrap();
    let elapsed = start.elapsed();
    for r in &a.rows {
        println!("{:?} eps={:.4} lambda={} cover={} pack={} {:?}", r.role, r.eps, r.lambda, r.n_cover_est, r.n_pack_lower, r.bracket);
    }
    println!("elapsed {elapsed:?}");
    assert_eq!(a.violations(), 0);
    assert!(a.rows.iter().filter(|r| r.role == RowRole::Small).all(|r| r.bracket == BracketStatus::Ok));
    let b = bracket_covering(&kernel, 2.0, 4.0, &eps, &cfg).unwrap();
    assert_eq!(a, b);
}
