//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::{Duration, Instant};

use liecover::app::cover_step;
use liecover::report::Provenance;
use liecover::{config_hash, RunConfig};
use liecover_core::bounds::{
    det_lower_bound, lower_bound, maximize_g, minimize_h, upper_bound, BoundParameters, ConstantConvention, LowerConstants,
    UpperConstants,
};
use liecover_core::counting::{fit_weyl_exponent, geometric_grid, weighted_count, Side};
use liecover_core::covering::{
    bracket_covering, build_truncated_operator, greedy_cover, packing_lower, sample_ball_image, BracketConfig, CoveringReport,
    RowRole,
};
use liecover_core::group::enumerate_dual;
use liecover_core::linalg::{trace, CMatrix};
use liecover_core::oracle::{brute_cover_oracle, planar_image, volumetric_ln_bound, PlanarSet};
use liecover_core::quadrature::{haar_grid, sample_haar, verify_orthogonality};
use liecover_core::rkhs::{kernel_section, operator_norms, rkhs_eval, rkhs_inner, RkhsCoefficients};
use liecover_core::rng::{stream, StreamId};
use liecover_core::symbol::{check_hermitian_psd, custom_symbol_unchecked, make_symbol, symbol_from_fn, trace_norm};
use liecover_core::{Complex64, GroupId, SymbolFamily, TruncatedKernel};
use rand::Rng;

type Outcome = Result<String, String>;

fn heat(g: GroupId, t: f64, lam: f64) -> TruncatedKernel {
    TruncatedKernel::new(make_symbol(g, SymbolFamily::Heat { t }, lam).expect("heat symbol"))
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_reproducing() -> Outcome {
    let mut worst: f64 = 0.0;
    for (g, lam) in [(GroupId::Torus1, 10.0), (GroupId::Su2, 6.0)] {
        let k = heat(g, 0.5, lam);
        let pts = sample_haar(g, 20, 11);
        for (i, y) in pts.iter().enumerate() {
            let c = RkhsCoefficients::random(g, lam, 100 + i as u64).map_err(|e| e.to_string())?;
            let section = kernel_section(&k, y).map_err(|e| e.to_string())?;
            let lhs = rkhs_inner(&c, &section).map_err(|e| e.to_string())?;
            let rhs = rkhs_eval(&c, &k, y).map_err(|e| e.to_string())?;
            worst = worst.max((lhs - rhs).norm() / (1.0 + c.norm()));
        }
    }
    ensure(worst <= 1e-8, format!("max |<g,K_y> - g(y)|/(1+|C|) = {worst:.3e} (tol 1e-8)"))
}

fn c2_diagonal() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in [GroupId::Torus1, GroupId::Torus2, GroupId::Su2] {
        let k = heat(g, 0.5, 6.0);
        // direct sum over the support
        let partial: f64 = k.symbol().iter().map(|(l, m)| l.dim as f64 * trace(m).re).sum();
        for y in sample_haar(g, 10, 21) {
            let v = k.eval(&y, &y).map_err(|e| e.to_string())?;
            worst = worst.max((v - Complex64::new(partial, 0.0)).norm() / partial);
        }
    }
    ensure(worst <= 1e-10, format!("max relative |K(y,y) - sum d Tr sigma| = {worst:.3e} (tol 1e-10)"))
}

fn c3_orthogonality() -> Outcome {
    let t1 = enumerate_dual(GroupId::Torus1, 8.1).map_err(|e| e.to_string())?;
    let su2 = enumerate_dual(GroupId::Su2, 4.8).map_err(|e| e.to_string())?;
    let max_k = t1.iter().map(|l| match l.index {
        liecover_core::IrrepIndex::Circle(k) => k.abs(),
        _ => 0,
    });
    let max_m = su2.iter().map(|l| l.dim - 1).max().unwrap_or(0);
    if max_k.max().unwrap_or(0) != 8 || max_m != 8 {
        return Err("label sets do not reach |k| = 8 and m = 8".into());
    }
    let a = verify_orthogonality(GroupId::Torus1, &t1, &haar_grid(GroupId::Torus1, 32).unwrap()).map_err(|e| e.to_string())?;
    let b = verify_orthogonality(GroupId::Su2, &su2, &haar_grid(GroupId::Su2, 24).unwrap()).map_err(|e| e.to_string())?;
    ensure(a <= 1e-8 && b <= 1e-8, format!("T1 deviation {a:.3e}, SU(2) deviation {b:.3e} (tol 1e-8)"))
}

/// Independent lattice counts `Σ_{⟨ξ⟩≤λ} d²`.
fn brute_count(g: GroupId, lam: f64) -> f64 {
    let b = lam * lam;
    let r = lam.ceil() as i64 + 1;
    match g {
        GroupId::Torus1 => (-r..=r).filter(|k| 1.0 + (k * k) as f64 <= b).count() as f64,
        GroupId::Torus2 => (-r..=r)
            .flat_map(|a| (-r..=r).map(move |c| (a, c)))
            .filter(|(a, c)| 1.0 + (a * a + c * c) as f64 <= b)
            .count() as f64,
        GroupId::Su2 => (0..=4 * r)
            .filter(|m| 1.0 + (*m as f64) * (*m as f64 + 2.0) / 4.0 <= b)
            .map(|m| ((m + 1) * (m + 1)) as f64)
            .sum(),
    }
}

fn c4_weyl() -> Outcome {
    let grid = geometric_grid(8.0, 64.0, 12);
    let mut parts = Vec::new();
    let mut ok = true;
    for g in [GroupId::Torus1, GroupId::Torus2, GroupId::Su2] {
        for &l in &grid {
            let head = weighted_count(g, l, 0.0, Side::Head, 64.0).map_err(|e| e.to_string())?;
            if head != brute_count(g, l) {
                return Err(format!("{} head count at λ = {l}: {head} vs lattice count {}", g.name(), brute_count(g, l)));
            }
        }
        let fit = fit_weyl_exponent(g, 0.0, &grid).map_err(|e| e.to_string())?;
        let n = g.dimension() as f64;
        ok &= (fit.exponent - n).abs() <= 0.2;
        parts.push(format!("{} {:.4} (n={n})", g.name(), fit.exponent));
    }
    ensure(ok, format!("exponents {} (tol ±0.2)", parts.join(", ")))
}

fn c5_theta() -> Outcome {
    let (p, _) = trace_norm(heat(GroupId::Torus1, 1.0, 12.0).symbol()).map_err(|e| e.to_string())?;
    // long direct sum; terms beyond |k| = 40 are below 1e-690
    let oracle: f64 = (-40i64..=40).map(|k| (-((k * k) as f64)).exp()).sum();
    ensure((p - oracle).abs() <= 1e-6, format!("trace norm {p:.12} vs theta sum {oracle:.12}"))
}

fn upper_params(s1: f64, b: f64, kappa: f64, c_n: f64) -> BoundParameters {
    BoundParameters {
        n: 1,
        s1,
        convention: ConstantConvention::RelativeToTrace,
        upper: Some(UpperConstants { beta: 3.0, b, kappa, c_n }),
        lower: None,
    }
}

fn c6_upper_chain() -> Outcome {
    let worked = upper_bound(&upper_params(1.0, 1.0, 1.0, 1.0), 0.1).map_err(|e| e.to_string())?.ok_or("worked value invalid")?;
    let expect = 20.0 * 41f64.ln();
    if (worked - expect).abs() > 1e-9 * expect {
        return Err(format!("worked value {worked} vs 20 ln 41 = {expect}"));
    }
    let mut count = 0;
    for (s1, b, kappa, c_n) in [(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 1.5, 2.0), (0.7, 3.0, 0.2, 1.0), (5.0, 1.0, 1.0, 0.5)] {
        let p = upper_params(s1, b, kappa, c_n);
        let top = p.upper_validity();
        for f in [0.9, 0.5, 0.1, 0.01, 1e-3] {
            let eps = f * top;
            let m = minimize_h(&p, eps).map_err(|e| e.to_string())?;
            let u = upper_bound(&p, eps).map_err(|e| e.to_string())?.ok_or("upper invalid inside range")?;
            if !(m.ln_h_star <= m.ln_h_eps + 1e-12 * m.ln_h_eps.abs() && m.ln_h_eps <= u + 1e-12 * u.abs()) {
                return Err(format!("chain broken at ε = {eps}: {} ≤ {} ≤ {u}", m.ln_h_star, m.ln_h_eps));
            }
            count += 1;
        }
    }
    ensure(count == 20, format!("{count} grid points ordered; worked value {worked:.6} = 20 ln 41"))
}

fn c7_lower_exact() -> Outcome {
    let unit = BoundParameters {
        n: 1,
        s1: 1.0,
        convention: ConstantConvention::RelativeToTrace,
        upper: None,
        lower: Some(LowerConstants { gamma: 1.0, omega: 1.0, a: 1.0, mu: 1.0, c0: 1.0 }),
    };
    let e4 = (-4f64).exp();
    let w = lower_bound(&unit, e4).map_err(|e| e.to_string())?.ok_or("worked value invalid")?;
    if (w - 4.0).abs() > 1e-9 * 4.0 {
        return Err(format!("worked lower value {w} vs 4"));
    }
    let mut rng = stream(7, StreamId::Oracle);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = BoundParameters {
            n: rng.random_range(1..=3),
            s1: rng.random_range(0.5..3.0),
            convention: ConstantConvention::RelativeToTrace,
            upper: None,
            lower: Some(LowerConstants {
                gamma: rng.random_range(0.3..3.0),
                omega: rng.random_range(0.1..2.0),
                a: rng.random_range(0.5..2.0),
                mu: rng.random_range(0.2..2.0),
                c0: rng.random_range(0.2..2.0),
            }),
        };
        let top = p.lower_validity().map_err(|e| e.to_string())?;
        let eps = top * (-rng.random_range(0.5..30.0f64)).exp();
        let lb = lower_bound(&p, eps).map_err(|e| e.to_string())?.ok_or("lower invalid inside range")?;
        let g = maximize_g(&p, eps).map_err(|e| e.to_string())?;
        worst = worst.max((g.g_max - lb).abs() / lb.abs().max(f64::MIN_POSITIVE));
    }
    ensure(worst <= 1e-9, format!("max relative |max G - lower| = {worst:.3e} over 100 points; worked value {w}"))
}

fn check_report(r: &CoveringReport) -> Result<(), String> {
    for row in &r.rows {
        if row.n_pack_lower > row.n_cover_est {
            return Err(format!("packing {} > cover {} at ε = {}", row.n_pack_lower, row.n_cover_est, row.eps));
        }
    }
    for lam in [r.lambda_small, r.lambda_large] {
        let mut rows: Vec<_> = r.rows.iter().filter(|x| x.lambda == lam && (lam == r.lambda_small) != (x.role == RowRole::Large)).collect();
        rows.sort_by(|a, b| a.eps.total_cmp(&b.eps));
        for w in rows.windows(2) {
            if w[1].n_cover_est > w[0].n_cover_est {
                return Err(format!("cover count rises from {} to {} as ε grows at λ = {lam}", w[0].n_cover_est, w[1].n_cover_est));
            }
        }
    }
    Ok(())
}

fn c8_duality(reports: &[CoveringReport]) -> Outcome {
    for r in reports {
        check_report(r)?;
    }
    // property 4: ε at or above the operator norm needs a single center
    let mut singles = 0;
    for (g, res) in [(GroupId::Torus1, 32), (GroupId::Torus2, 12), (GroupId::Su2, 8)] {
        let k = heat(g, 0.5, 4.0);
        let grid = haar_grid(g, res).unwrap();
        let op = build_truncated_operator(&k, 2.5, &grid).map_err(|e| e.to_string())?;
        let cloud = sample_ball_image(&op, 600, 5);
        for f in [1.0, 1.2, 3.0] {
            let eps = f * op.norm_q_a();
            if greedy_cover(&cloud, eps).0 != 1 || packing_lower(&cloud, eps) != 1 {
                return Err(format!("{} at ε = {f}·|Q_A|: more than one center", g.name()));
            }
            singles += 1;
        }
    }
    let rows: usize = reports.iter().map(|r| r.rows.len()).sum();
    Ok(format!("{} reports, {rows} rows: packing ≤ cover, monotone in ε; {singles} single-center checks at ε ≥ |Q_A|", reports.len()))
}

fn c9_cn1() -> Outcome {
    let mut rng = stream(9, StreamId::Oracle);
    let mut checked = 0;
    let mut lines = Vec::new();
    for i in 0..10 {
        // instances: segments, ellipses, and discs realised as single-mode operators
        let (name, set, complex_bound): (String, PlanarSet, Option<(TruncatedKernel, f64)>) = match i % 3 {
            0 => {
                let h = rng.random_range(0.5..2.0);
                (format!("segment h={h:.3}"), PlanarSet::Segment { h }, None)
            }
            1 => {
                let (h1, h2) = (rng.random_range(0.4..1.5), rng.random_range(0.4..1.5));
                (format!("ellipse {h1:.3}x{h2:.3}"), PlanarSet::Ellipse { h1, h2 }, None)
            }
            _ => {
                let h: f64 = rng.random_range(0.5..2.0);
                let s = symbol_from_fn(GroupId::Torus1, 1.2, |_| CMatrix::from_element(1, 1, Complex64::new(h * h, 0.0)))
                    .map_err(|e| e.to_string())?;
                let k = TruncatedKernel::new(s);
                let grid = haar_grid(GroupId::Torus1, 8).unwrap();
                let op = build_truncated_operator(&k, 1.2, &grid).map_err(|e| e.to_string())?;
                let set = planar_image(&op).map_err(|e| e.to_string())?;
                (format!("single-mode disc h={h:.3}"), set, Some((k, 1.2)))
            }
        };
        let scale = match set {
            PlanarSet::Segment { h } => h,
            PlanarSet::Ellipse { h1, h2 } => (h1 * h2).sqrt(),
        };
        let mut n_eps = 0;
        for f in [0.9, 0.7, 0.55, 0.45] {
            let eps = f * scale;
            let oracle = brute_cover_oracle(&set, eps).map_err(|e| e.to_string())?;
            let ln_exact = (oracle.lower as f64).ln();
            let mut bounds = vec![volumetric_ln_bound(&set, eps)];
            if let Some((k, lam)) = &complex_bound {
                bounds.push(det_lower_bound(k.symbol(), *lam, eps).map_err(|e| e.to_string())?);
            }
            for b in bounds.into_iter().filter(|b| *b > 0.0) {
                if b > ln_exact + 1e-12 {
                    return Err(format!("{name}, ε = {eps}: ln bound {b} > ln oracle {ln_exact} ({oracle:?})"));
                }
                checked += 1;
                n_eps += 1;
            }
        }
        lines.push(format!("{name}: {n_eps}"));
    }
    ensure(checked > 0, format!("{checked} nonvacuous (instance, ε) comparisons [{}]", lines.join("; ")))
}

fn sandwich_config() -> (RunConfig, Vec<f64>) {
    let k = heat(GroupId::Torus1, 1.0, 12.0);
    let q = operator_norms(&k, 2.0).unwrap().q;
    let eps: Vec<f64> = [0.5, 0.4, 0.3].iter().map(|f| f * q).collect();
    let cfg = RunConfig {
        group: GroupId::Torus1,
        family: SymbolFamily::Heat { t: 1.0 },
        truncation: 12.0,
        grid_resolution: 64,
        lambda_sweep: vec![2.0, 4.0],
        eps_grid: eps.clone(),
        cloud_size: 4096,
        slack: 1.0,
        seed: 2024,
        output_dir: "unused".into(),
        convention: ConstantConvention::RelativeToTrace,
    };
    (cfg, eps)
}

fn c10_sandwich(report: &CoveringReport, bytes: (&[u8], &[u8])) -> Outcome {
    let bad = report.violations();
    let undefined = report.undefined();
    if bytes.0 != bytes.1 {
        return Err("covering CSV differs between identical runs".into());
    }
    let counts: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{:?}@{:.3}={}", r.role, r.eps, r.n_cover_est))
        .collect();
    ensure(bad == 0 && undefined == 0, format!("{bad} violations, {undefined} undefined; {}", counts.join(" ")))
}

fn c11_falsification() -> Outcome {
    // σ(k) = [1 + 0.5 i·sign(k)]: not Hermitian for k ≠ 0
    let labels = enumerate_dual(GroupId::Torus1, 3.0).unwrap();
    let mats: Vec<CMatrix> = labels
        .iter()
        .map(|l| {
            let k = match l.index {
                liecover_core::IrrepIndex::Circle(k) => k,
                _ => 0,
            };
            CMatrix::from_element(1, 1, Complex64::new(1.0, 0.5 * k.signum() as f64))
        })
        .collect();
    let s = custom_symbol_unchecked(GroupId::Torus1, 3.0, mats).map_err(|e| e.to_string())?;
    let diag = check_hermitian_psd(&s);
    if diag.certified {
        return Err("non-Hermitian symbol was certified".into());
    }
    let k = TruncatedKernel::new(s);
    let pts = sample_haar(GroupId::Torus1, 40, 31);
    let pairs: Vec<_> = pts.chunks(2).map(|c| (c[0], c[1])).collect();
    let defect = k.symmetry_defect(&pairs).map_err(|e| e.to_string())?;
    ensure(defect > 1e-3, format!("not certified (defect {:.3}); max |K(x,y) - conj K(y,x)| = {defect:.4}", diag.hermitian_defect))
}

fn timed(n: usize, name: &'static str, f: fn() -> Outcome) -> (usize, &'static str, Outcome, Duration) {
    let t = Instant::now();
    let r = f();
    (n, name, r, t.elapsed())
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome, Duration)> = vec![
        timed(1, "reproducing property", c1_reproducing),
        timed(2, "diagonal identity", c2_diagonal),
        timed(3, "Peter-Weyl orthogonality", c3_orthogonality),
        timed(4, "Weyl exponents", c4_weyl),
        timed(5, "theta-series oracle", c5_theta),
        timed(6, "upper-bound chain", c6_upper_chain),
        timed(7, "lower-bound exactness", c7_lower_exact),
    ];

    // truncation sandwich, run twice through the CSV writer
    let t10 = Instant::now();
    let (cfg, eps) = sandwich_config();
    let kernel = heat(GroupId::Torus1, 1.0, 12.0);
    let grid = haar_grid(GroupId::Torus1, 64).unwrap();
    let bc = BracketConfig { grid: &grid, cloud_size: 4096, seed: cfg.seed, slack: 1.0, params: None };
    let main_report = bracket_covering(&kernel, 2.0, 4.0, &eps, &bc).expect("bracket run");
    let prov = Provenance { config_hash: config_hash(&cfg), seed: cfg.seed };
    let render = || cover_step(&cfg).expect("cover step").tables[0].render(&prov).expect("render");
    let (a, b) = (render(), render());
    let sandwich = c10_sandwich(&main_report, (&a, &b));
    let d10 = t10.elapsed();

    let t8 = Instant::now();
    let mut reports = vec![main_report.clone()];
    for (g, res, lam, big) in [(GroupId::Torus2, 12, 2.0, 3.0), (GroupId::Su2, 8, 2.0, 3.0)] {
        let k = heat(g, 0.5, 4.0);
        let grid = haar_grid(g, res).unwrap();
        let q = operator_norms(&k, lam).unwrap().q;
        let eps: Vec<f64> = [1.05, 0.8, 0.6, 0.45].iter().map(|f| f * q).collect();
        let bc = BracketConfig { grid: &grid, cloud_size: 800, seed: 3, slack: 1.0, params: None };
        reports.push(bracket_covering(&k, lam, big, &eps, &bc).expect("bracket run"));
    }
    let duality = c8_duality(&reports);
    results.push((8, "covering duality and monotonicity", duality, t8.elapsed()));
    results.push(timed(9, "CN1 vs brute force", c9_cn1));
    results.push((10, "truncation sandwich", sandwich, d10));
    results.push(timed(11, "hypothesis falsification", c11_falsification));

    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, r, d) in &results {
        let (tag, detail) = match r {
            Ok(s) => ("PASS", s),
            Err(s) => {
                failed += 1;
                ("FAIL", s)
            }
        };
        println!("criterion {n:>2} {tag} [{name}] {detail} ({:.2} s)", d.as_secs_f64());
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
