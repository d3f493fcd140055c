//! Built-in verification suite.
//!
//! Each check pins one independently derived fact about the library: an
//! exact table, an algebraic law tested on random inputs, an oracle value
//! (`e - 1`), a measured convergence order, or an agreement between two
//! methods that share no intermediate results. Randomized checks draw from
//! a counter-based generator seeded per check, so a run is reproducible
//! from its seed alone and identical across thread counts.
//!
//! The same checks back the `selftest` CLI subcommand and the acceptance
//! test suite.

use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arithmetic::{natural_value_table, StructureTag};
use crate::calculus::{scaled_derivative, scaled_integral, transported_difference_quotient};
use crate::dirac::{
    gauge_transform, lagrangian_density, AnalyticSpinor, BField, BarConvention, GammaSet,
    GaugeConfig, SQRT_FINE_STRUCTURE,
};
use crate::expr::ComplexExpr;
use crate::field::{check_local_restriction, Axis, FieldSpec, Grid, MetricTag, Point, COORD_VARS};
use crate::geometry::{
    minimize_path, path_length, shoot_geodesic, solve_geodesic, AnalyticPath, Path,
};
use crate::linear::VectorStructure;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Knobs for a suite run. The fault injection perturbs one gamma matrix
/// entry so the algebra check must fail; it exists to prove the checks can
/// fail at all.
#[derive(Debug, Clone)]
pub struct SelftestOptions {
    pub seed: u64,
    pub inject_gamma_fault: bool,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions {
            seed: 0,
            inject_gamma_fault: false,
        }
    }
}

fn finish(
    name: &'static str,
    start: Instant,
    budget: Option<f64>,
    ok: bool,
    mut detail: String,
) -> CheckResult {
    let seconds = start.elapsed().as_secs_f64();
    let mut passed = ok;
    if let Some(limit) = budget {
        if seconds >= limit {
            passed = false;
            detail.push_str(&format!("; exceeded the {limit} s budget ({seconds:.2} s)"));
        }
    }
    CheckResult {
        name,
        passed,
        detail,
        seconds,
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

/// Magnitude in `[0.1, 10]` with a random sign.
fn signed_mag(rng: &mut ChaCha8Rng) -> f64 {
    let m = rng.gen_range(0.1..10.0);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

fn complex_mag(rng: &mut ChaCha8Rng) -> Complex<f64> {
    let m = rng.gen_range(0.1..10.0);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex::from_polar(m, phase)
}

fn rel(diff: f64, denom: f64) -> f64 {
    diff / denom.max(1e-300)
}

/// Least-squares slope of `ln(err)` against `ln(x)`.
fn log_slope(xs: &[f64], errs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = errs.iter().map(|e| e.max(1e-300).ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

/// The gamma matrices satisfy their anticommutation relations.
pub fn check_gamma_algebra(opts: &SelftestOptions) -> CheckResult {
    let start = Instant::now();
    let gammas = if opts.inject_gamma_fault {
        GammaSet::<f64>::dirac().with_fault(1e-3)
    } else {
        GammaSet::<f64>::dirac()
    };
    let defect = gammas.algebra_defect();
    let ok = defect <= 1e-12;
    let detail = format!("anticommutator defect {defect:.3e} (budget 1e-12)");
    finish("gamma-algebra", start, None, ok, detail)
}

/// The divisor table of 30 is exactly the eight expected rows.
pub fn check_value_table() -> CheckResult {
    let start = Instant::now();
    let expect: [(u64, u64); 8] = [
        (30, 1),
        (15, 2),
        (10, 3),
        (6, 5),
        (5, 6),
        (3, 10),
        (2, 15),
        (1, 30),
    ];
    let table = match natural_value_table(30) {
        Ok(t) => t,
        Err(e) => return finish("value-table-30", start, Some(1.0), false, e.to_string()),
    };
    let got: Vec<(u64, u64)> = table.iter().map(|e| (e.value, e.subset_index)).collect();
    let ok = got == expect;
    let detail = if ok {
        "8 rows, exact match".to_string()
    } else {
        format!("mismatch: {got:?}")
    };
    finish("value-table-30", start, Some(1.0), ok, detail)
}

/// Z and W maps compose as a commutative group and Z conserves bases.
pub fn check_group_laws(seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = rng_for(seed, 0x5a57);
    let mut max_rel = 0.0f64;
    let mut base_conserved = true;
    let cases = 10_000;
    for i in 0..cases {
        if i % 2 == 0 {
            let tag = StructureTag::new(signed_mag(&mut rng)).unwrap();
            let x = tag.number(signed_mag(&mut rng));
            let (s, t) = (signed_mag(&mut rng), signed_mag(&mut rng));
            let zz = x.z_map(&s).unwrap().z_map(&t).unwrap();
            let z = x.z_map(&(s * t)).unwrap();
            let swap = x.z_map(&t).unwrap().z_map(&s).unwrap();
            max_rel = max_rel
                .max(rel((zz.value() - z.value()).abs(), z.value().abs()))
                .max(rel((zz.value() - swap.value()).abs(), zz.value().abs()));
            base_conserved &= *zz.base() == *x.base() && *z.base() == *x.base();
            base_conserved &= zz.tag().order_reversed() == z.tag().order_reversed();
            let ww = x.w_map(&s).unwrap().w_map(&t).unwrap();
            let w = x.w_map(&(s * t)).unwrap();
            max_rel = max_rel
                .max(rel((ww.value() - x.value()).abs(), x.value().abs()))
                .max(rel((ww.base() - w.base()).abs(), w.base().abs()));
        } else {
            let tag = StructureTag::new(complex_mag(&mut rng)).unwrap();
            let x = tag.number(complex_mag(&mut rng));
            let (s, t) = (complex_mag(&mut rng), complex_mag(&mut rng));
            let zz = x.z_map(&s).unwrap().z_map(&t).unwrap();
            let z = x.z_map(&(s * t)).unwrap();
            let swap = x.z_map(&t).unwrap().z_map(&s).unwrap();
            max_rel = max_rel
                .max(rel((zz.value() - z.value()).norm(), z.value().norm()))
                .max(rel((zz.value() - swap.value()).norm(), zz.value().norm()));
            base_conserved &= *zz.base() == *x.base() && *z.base() == *x.base();
            base_conserved &= !zz.tag().order_reversed();
            let ww = x.w_map(&s).unwrap().w_map(&t).unwrap();
            let w = x.w_map(&(s * t)).unwrap();
            max_rel = max_rel
                .max(rel((ww.value() - x.value()).norm(), x.value().norm()))
                .max(rel((ww.base() - w.base()).norm(), w.base().norm()));
        }
    }
    let ok = max_rel <= 1e-12 && base_conserved;
    let detail = format!(
        "max relative error {max_rel:.2e} over {cases} compositions, bases conserved: {base_conserved} (budget 1e-12)"
    );
    finish("zw-group-laws", start, Some(5.0), ok, detail)
}

/// Identity, associativity and distributivity hold in scaled structures.
pub fn check_field_axioms(seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = rng_for(seed, 0xf1e1d);
    let mut max_rel = 0.0f64;
    let cases = 10_000;
    for i in 0..cases {
        if i % 2 == 0 {
            let tag = StructureTag::new(signed_mag(&mut rng)).unwrap();
            let x = tag.number(signed_mag(&mut rng));
            let y = tag.number(signed_mag(&mut rng));
            let z = tag.number(signed_mag(&mut rng));
            let one = tag.mul(&tag.one(), &x).unwrap();
            max_rel = max_rel.max(rel((one.value() - x.value()).abs(), x.value().abs()));
            let l = tag.mul(&tag.mul(&x, &y).unwrap(), &z).unwrap();
            let r = tag.mul(&x, &tag.mul(&y, &z).unwrap()).unwrap();
            max_rel = max_rel.max(rel((l.value() - r.value()).abs(), r.value().abs()));
            let dl = tag.mul(&x, &tag.add(&y, &z).unwrap()).unwrap();
            let dr = tag
                .add(&tag.mul(&x, &y).unwrap(), &tag.mul(&x, &z).unwrap())
                .unwrap();
            let den = (x.value() * y.value()).abs() + (x.value() * z.value()).abs();
            max_rel = max_rel.max(rel((dl.value() - dr.value()).abs(), den));
        } else {
            let tag = StructureTag::new(complex_mag(&mut rng)).unwrap();
            let x = tag.number(complex_mag(&mut rng));
            let y = tag.number(complex_mag(&mut rng));
            let z = tag.number(complex_mag(&mut rng));
            let one = tag.mul(&tag.one(), &x).unwrap();
            max_rel = max_rel.max(rel((one.value() - x.value()).norm(), x.value().norm()));
            let l = tag.mul(&tag.mul(&x, &y).unwrap(), &z).unwrap();
            let r = tag.mul(&x, &tag.mul(&y, &z).unwrap()).unwrap();
            max_rel = max_rel.max(rel((l.value() - r.value()).norm(), r.value().norm()));
            let dl = tag.mul(&x, &tag.add(&y, &z).unwrap()).unwrap();
            let dr = tag
                .add(&tag.mul(&x, &y).unwrap(), &tag.mul(&x, &z).unwrap())
                .unwrap();
            let den = (x.value() * y.value()).norm() + (x.value() * z.value()).norm();
            max_rel = max_rel.max(rel((dl.value() - dr.value()).norm(), den));
        }
    }
    let ok = max_rel <= 1e-12;
    let detail =
        format!("max relative error {max_rel:.2e} over {cases} structures (budget 1e-12)");
    finish("field-axioms", start, None, ok, detail)
}

/// Norm transport holds; the scalar-product transport gap is exactly the
/// ratio of the scaling factors.
pub fn check_norm_transport(seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = rng_for(seed, 0x0117);
    let mut max_rel = 0.0f64;
    let cases = 1_000;
    for _ in 0..cases {
        let r = rng.gen_range(0.1..10.0);
        let q = rng.gen_range(0.1..10.0);
        let space = VectorStructure::<Complex<f64>>::spinor(r).unwrap();
        let comps: Vec<Complex<f64>> = (0..4).map(|_| complex_mag(&mut rng)).collect();
        let other: Vec<Complex<f64>> = (0..4).map(|_| complex_mag(&mut rng)).collect();
        let psi = space.vector(&comps).unwrap();
        let phi = space.vector(&other).unwrap();

        // Transported norm vs norm of the transported vector.
        let lhs = (r / q) * space.norm(&psi).unwrap().value().re;
        let moved = psi.z_map(q / r).unwrap();
        let rhs = moved.structure().norm(&moved).unwrap().value().re;
        max_rel = max_rel.max(rel((lhs - rhs).abs(), rhs.abs()));

        // The scalar-product gap is the factor r/q.
        let (moved_product, product_of_moved) =
            space.scalar_product_transport_gap(q, &psi, &phi).unwrap();
        let gap = product_of_moved.value() / moved_product.value();
        let expect = Complex::new(r / q, 0.0);
        max_rel = max_rel.max(rel((gap - expect).norm(), expect.norm()));
    }
    let ok = max_rel <= 1e-12;
    let detail = format!(
        "max relative error {max_rel:.2e} over {cases} random (psi, r, q) (budget 1e-12)"
    );
    finish("norm-transport", start, None, ok, detail)
}

/// With a constant exponent every scaled quantity reduces to its plain
/// counterpart.
pub fn check_constant_alpha_reduction(seed: u64) -> CheckResult {
    let start = Instant::now();
    let mut rng = rng_for(seed, 0xa1fa);
    let trials = 100;
    let mut worst: [(f64, &str); 4] = [
        (0.0, "integral"),
        (0.0, "derivative"),
        (0.0, "density"),
        (0.0, "length"),
    ];

    // Integral: scaled value vs the plain midpoint sum of the section.
    let grid = Grid::new(
        [0.0; 4],
        [0.0, 1.0, 0.0, 1.0],
        [1, 12, 1, 12],
    )
    .unwrap();
    for _ in 0..trials {
        let c: f64 = rng.gen_range(-1.0..1.0);
        let spec = FieldSpec::constant(c);
        let a: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let a0: f64 = rng.gen_range(3.0..4.0);
        let b: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let b0: f64 = rng.gen_range(3.0..4.0);
        let psi = ComplexExpr::<f64>::parse(
            &format!("{a0} + {}*y1 + {}*sin(y1) + {}*cos(y3)", a[0], a[1], a[2]),
            &format!("{b0} + {}*y3 + {}*cos(y1) + {}*sin(y3)", b[0], b[1], b[2]),
            &COORD_VARS,
        )
        .unwrap();
        let scaled = scaled_integral(&spec, &psi, &grid, &Point::origin()).unwrap();
        let mut plain = Complex::new(0.0, 0.0);
        for y in grid.sample_points() {
            plain += psi.value(&y.coords());
        }
        plain *= grid.cell_measure();
        worst[0].0 = worst[0]
            .0
            .max(rel((scaled.value() - plain).norm(), plain.norm()));
    }

    // Derivative: the drag term vanishes, leaving the exact partial.
    for _ in 0..trials {
        let c: f64 = rng.gen_range(-1.0..1.0);
        let spec = FieldSpec::constant(c);
        let psi = ComplexExpr::<f64>::parse(
            &format!(
                "{} + {}*y0*y2 + sin({}*y1)",
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.5..1.5)
            ),
            &format!(
                "{}*y3 + cos({}*y0)",
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.5..1.5)
            ),
            &COORD_VARS,
        )
        .unwrap();
        let y = Point::new([
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ])
        .unwrap();
        for mu in Axis::ALL {
            let d = scaled_derivative(&spec, &psi, &y, mu).value;
            let reference = psi.partial(mu.index(), &y.coords());
            worst[1].0 = worst[1]
                .0
                .max(rel((d - reference).norm(), reference.norm().max(1.0)));
        }
    }

    // Density: constant exponent vs zero exponent, identical inputs.
    let gammas = GammaSet::<f64>::dirac();
    let flat = FieldSpec::constant(0.0);
    for _ in 0..trials {
        let c: f64 = rng.gen_range(-1.0..1.0);
        let spec = FieldSpec::constant(c);
        let mut comps = Vec::with_capacity(4);
        for _ in 0..4 {
            comps.push((
                format!(
                    "{} + {}*y1 + {}*sin(y0)",
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0)
                ),
                format!(
                    "{}*y3 + {}*cos(y2)",
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0)
                ),
            ));
        }
        let sources: [(String, String); 4] = comps.try_into().unwrap();
        let psi = AnalyticSpinor::parse(&sources).unwrap();
        let gauge = GaugeConfig::new(
            1.0,
            SQRT_FINE_STRUCTURE,
            rng.gen_range(0.0..2.0),
            BarConvention::Gamma5Conjugate,
            BField::parse(&[
                format!("{}*y1", rng.gen_range(-1.0..1.0)),
                "0".into(),
                format!("{}*y0", rng.gen_range(-1.0..1.0)),
                "0".into(),
            ])
            .unwrap(),
        )
        .unwrap();
        let y = Point::new([
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ])
        .unwrap();
        let scaled = lagrangian_density(&spec, &gauge, &gammas, &psi, &y).value;
        let reference = lagrangian_density(&flat, &gauge, &gammas, &psi, &y).value;
        worst[2].0 = worst[2]
            .0
            .max(rel((scaled - reference).norm(), reference.norm().max(1.0)));
    }

    // Path length: the exponent cancels against the reference fiber.
    let resolution = 2_000;
    for _ in 0..trials {
        let c: f64 = rng.gen_range(-1.0..1.0);
        let spec = FieldSpec::constant(c);
        let coeffs: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let path = AnalyticPath::<f64>::parse(&[
            "5*s".to_string(),
            format!("{}*s + {}*s^2", coeffs[0], coeffs[1]),
            format!("{}*s + {}*s^2", coeffs[2], coeffs[3]),
            format!("{}*s + {}*s^2", coeffs[4], coeffs[5]),
        ])
        .unwrap();
        let scaled = path_length(
            &spec,
            &Path::Analytic(path.clone()),
            &Point::origin(),
            MetricTag::Minkowski,
            resolution,
        )
        .unwrap();
        // Independent plain quadrature of the same speed function.
        let h = 1.0 / resolution as f64;
        let mut plain = 0.0;
        for j in 0..resolution {
            let s = (j as f64 + 0.5) * h;
            let v = path.velocity(s);
            plain += MetricTag::Minkowski.quad(&v).max(0.0).sqrt() * h;
        }
        worst[3].0 = worst[3]
            .0
            .max(rel((scaled.value() - plain).abs(), plain.abs()));
    }

    let max_rel = worst.iter().map(|w| w.0).fold(0.0, f64::max);
    let ok = max_rel <= 1e-10;
    let detail = format!(
        "max relative error: integral {:.2e}, derivative {:.2e}, density {:.2e}, length {:.2e} over {trials} inputs each (budget 1e-10)",
        worst[0].0, worst[1].0, worst[2].0, worst[3].0
    );
    finish("alpha-const-reduction", start, None, ok, detail)
}

/// The transported difference quotient converges to the scaled derivative
/// at first order, and the symbolic drag field matches finite differences.
pub fn check_derivative_oracle() -> CheckResult {
    let start = Instant::now();
    // The exponent is affine along every single axis and the section is a
    // positive exponential, so each term of the quotient's error series is
    // positive and the measured slope sits strictly above 1.
    let spec =
        FieldSpec::<f64>::parse("0.3*y0 + 0.25*y1 + 0.2*y2 + 0.15*y3 + 0.05*y1*y3").unwrap();
    let psi = ComplexExpr::<f64>::parse(
        "exp(0.4*y0 + 0.3*y1 + 0.25*y2 + 0.2*y3)",
        "0.5*exp(0.3*y0 + 0.35*y1 + 0.2*y2 + 0.25*y3)",
        &COORD_VARS,
    )
    .unwrap();
    let y = Point::new([0.3, -0.4, 0.7, 0.2]).unwrap();
    let hs = [1e-2, 1e-3, 1e-4];
    let mut errs = Vec::with_capacity(hs.len());
    for &h in &hs {
        let mut sq = 0.0;
        for mu in Axis::ALL {
            let exact = scaled_derivative(&spec, &psi, &y, mu).value;
            let approx = transported_difference_quotient(&spec, &psi, &y, mu, h);
            sq += (approx - exact).norm_sqr();
        }
        errs.push(sq.sqrt());
    }
    let slope = log_slope(&hs, &errs);

    // Symbolic gradient against central differences at probe points, on a
    // field that exercises the chain rule as well as products.
    let probe =
        FieldSpec::<f64>::parse("0.3*y0 + 0.25*y1 + 0.2*sin(y2) + 0.15*y3 + 0.1*y1*y3").unwrap();
    let mut max_rel = 0.0f64;
    let h = 1e-6;
    for k in 0..25 {
        let t = k as f64;
        let y = Point::new([
            (3.0 * t).sin() * 0.8,
            (5.0 * t).cos() * 0.8,
            (7.0 * t).sin() * 0.8,
            (2.0 * t).cos() * 0.8,
        ])
        .unwrap();
        let sym = probe.grad_alpha(&y);
        for mu in Axis::ALL {
            let fd = (probe.alpha(&y.offset(mu, h)) - probe.alpha(&y.offset(mu, -h))) / (2.0 * h);
            max_rel = max_rel.max(rel((sym[mu.index()] - fd).abs(), sym[mu.index()].abs()));
        }
    }

    let ok = slope >= 1.0 && max_rel <= 1e-6;
    let detail = format!(
        "quotient convergence slope {slope:.4} (need >= 1); symbolic vs central differences {max_rel:.2e} (budget 1e-6)"
    );
    finish("derivative-oracle", start, None, ok, detail)
}

/// The scaled integral reproduces `e - 1` and the midpoint rule shows its
/// second-order signature.
pub fn check_integral_oracle() -> CheckResult {
    let start = Instant::now();
    let spec = FieldSpec::<f64>::parse("y1").unwrap();
    let psi = ComplexExpr::<f64>::parse("1", "0", &COORD_VARS).unwrap();
    let exact = std::f64::consts::E - 1.0;
    let integral_with = |n: usize| {
        let grid = Grid::new([0.0; 4], [0.0, 1.0, 0.0, 0.0], [1, n, 1, 1]).unwrap();
        scaled_integral(&spec, &psi, &grid, &Point::origin())
            .unwrap()
            .value()
            .re
    };
    let coarse_err = (integral_with(10_000) - exact).abs();

    let ns = [8usize, 16, 32, 64, 128];
    let errs: Vec<f64> = ns
        .iter()
        .map(|&n| (integral_with(n) - exact).abs())
        .collect();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let order = -log_slope(&xs, &errs);

    let ok = coarse_err <= 1e-4 && (order - 2.0).abs() <= 0.2;
    let detail = format!(
        "e-1 error {coarse_err:.2e} at 10^4 cells (budget 1e-4); quadrature order {order:.3} (need 2 +- 0.2)"
    );
    finish("integral-oracle", start, None, ok, detail)
}

/// The density is invariant under a local phase rotation with the matching
/// photon shift, and the drag field stays bit-identical.
pub fn check_gauge_invariance() -> CheckResult {
    let start = Instant::now();
    let spec = FieldSpec::<f64>::parse("0.2*y1 + 0.1*y3 - 0.15*y0").unwrap();
    let gammas = GammaSet::<f64>::dirac();
    let psi = AnalyticSpinor::<f64>::parse(&[
        ("1 + 0.3*y0 + 0.2*sin(y1)".into(), "0.1*y2".into()),
        ("0.5*cos(y3)".into(), "0.2 + 0.1*y1".into()),
        ("0.3*y0*y2".into(), "0.4 - 0.2*y3".into()),
        ("0.25".into(), "0.15*sin(y0)".into()),
    ])
    .unwrap();
    let gauge = GaugeConfig::new(
        1.0,
        SQRT_FINE_STRUCTURE,
        1.0,
        BarConvention::Gamma5Conjugate,
        BField::parse(&[
            "0.2*y1".into(),
            "0.1*y0".into(),
            "-0.3*y3".into(),
            "0.15*y2".into(),
        ])
        .unwrap(),
    )
    .unwrap();
    let theta = crate::expr::parse_expr::<f64>("0.3*y1 - 0.2*y3 + 0.1*y0", &COORD_VARS).unwrap();

    let grid = Grid::new([0.0; 4], [1.0; 4], [4, 4, 4, 4]).unwrap();
    let before: Vec<[u64; 4]> = grid
        .sample_points()
        .map(|y| spec.grad_alpha(&y).map(f64::to_bits))
        .collect();

    let (psi2, b2) = gauge_transform(&psi, &gauge, &theta).unwrap();
    let gauge2 = GaugeConfig {
        b_field: b2,
        ..gauge.clone()
    };

    let mut max_site = 0.0f64;
    for y in grid.sample_points() {
        let l1 = lagrangian_density(&spec, &gauge, &gammas, &psi, &y).value;
        let l2 = lagrangian_density(&spec, &gauge2, &gammas, &psi2, &y).value;
        max_site = max_site.max((l2 - l1).norm());
    }

    let after: Vec<[u64; 4]> = grid
        .sample_points()
        .map(|y| spec.grad_alpha(&y).map(f64::to_bits))
        .collect();
    let bits_identical = before == after;

    let ok = max_site <= 1e-10 && bits_identical;
    let detail = format!(
        "max per-site density change {max_site:.2e} over 4^4 sites (budget 1e-10); drag field bit-identical: {bits_identical}"
    );
    finish("gauge-invariance", start, Some(30.0), ok, detail)
}

/// With no drag the geodesic is the affine line; with drag the integrator
/// halves its error sixteenfold per step refinement.
pub fn check_geodesic_straight_line() -> CheckResult {
    let start = Instant::now();
    let flat = FieldSpec::<f64>::constant(0.4);
    let v0 = [1.0, 0.3, -0.2, 0.1];
    let traj = match solve_geodesic(&flat, &Point::origin(), v0, 1.0, 1_000, MetricTag::Minkowski)
    {
        Ok(t) => t,
        Err(e) => {
            return finish("geodesic-straight-line", start, None, false, e.to_string())
        }
    };
    let mut max_dev = 0.0f64;
    for (k, p) in traj.positions.iter().enumerate() {
        let t = traj.tau[k];
        let c = p.coords();
        for i in 0..4 {
            max_dev = max_dev.max((c[i] - v0[i] * t).abs());
        }
    }

    let curved = FieldSpec::<f64>::parse("0.8*y1").unwrap();
    let run = |steps: usize| {
        solve_geodesic(
            &curved,
            &Point::origin(),
            [0.0, 0.4, 0.9, 0.0],
            1.0,
            steps,
            MetricTag::Euclidean,
        )
        .unwrap()
        .endpoint()
        .coords()
    };
    let reference = run(3_200);
    let err = |steps: usize| {
        let e = run(steps);
        (0..4)
            .map(|i| (e[i] - reference[i]).abs())
            .fold(0.0f64, f64::max)
    };
    let ratio = err(100) / err(200);

    let ok = max_dev <= 1e-10 && (12.0..=20.0).contains(&ratio);
    let detail = format!(
        "affine deviation {max_dev:.2e} over 10^3 steps (budget 1e-10); step-halving error ratio {ratio:.2} (need 12..20)"
    );
    finish("geodesic-straight-line", start, None, ok, detail)
}

/// Shooting and direct minimization, which share no intermediate results,
/// find paths of the same scaled length.
pub fn check_variational_cross() -> CheckResult {
    let start = Instant::now();
    let spec = FieldSpec::<f64>::parse("0.2*y1").unwrap();
    let y = Point::origin();
    let z = Point::new([0.0, 1.0, 1.0, 0.0]).unwrap();

    let shot = match shoot_geodesic(&spec, &y, &z, MetricTag::Euclidean, 400, 1e-10, 50) {
        Ok(t) => t,
        Err(e) => {
            return finish("variational-cross-check", start, Some(60.0), false, e.to_string())
        }
    };
    let shot_len = path_length(
        &spec,
        &Path::Polyline(shot.to_polyline()),
        &y,
        MetricTag::Euclidean,
        20_000,
    )
    .unwrap()
    .value();

    let min = match minimize_path(&spec, &y, &z, MetricTag::Euclidean, 64, 200_000) {
        Ok(m) => m,
        Err(e) => {
            return finish("variational-cross-check", start, Some(60.0), false, e.to_string())
        }
    };
    let min_len = path_length(
        &spec,
        &Path::Polyline(min.path.clone()),
        &y,
        MetricTag::Euclidean,
        20_000,
    )
    .unwrap()
    .value();

    let rel_gap = (shot_len - min_len).abs() / shot_len;
    let ok = rel_gap <= 1e-3;
    let detail = format!(
        "shooting length {shot_len:.9}, minimized length {min_len:.9}, relative gap {rel_gap:.2e} at 64 knots (budget 1e-3, {} descent iterations)",
        min.iterations
    );
    finish("variational-cross-check", start, Some(60.0), ok, detail)
}

/// The flatness validator passes a constant field at machine epsilon and
/// reports the exact sup of a linear drag field.
pub fn check_restriction_validator() -> CheckResult {
    let start = Instant::now();
    let region = Grid::new([0.0; 4], [0.0, 1.0, 0.0, 0.0], [1, 129, 1, 1]).unwrap();

    let flat = FieldSpec::<f64>::constant(0.7);
    let flat_report = match check_local_restriction(&flat, &region, 1e-15) {
        Ok(r) => r,
        Err(e) => return finish("restriction-validator", start, None, false, e.to_string()),
    };

    let linear = FieldSpec::<f64>::parse("0.5*y1").unwrap();
    let linear_report = match check_local_restriction(&linear, &region, 0.1) {
        Ok(r) => r,
        Err(e) => return finish("restriction-validator", start, None, false, e.to_string()),
    };

    let sup_err = (linear_report.max_norm - 0.5).abs();
    let ok = flat_report.pass && !linear_report.pass && sup_err <= 1e-9;
    let detail = format!(
        "constant field passes at 1e-15: {}; linear field fails at 0.1 with sup {} (need 0.5 +- 1e-9)",
        flat_report.pass, linear_report.max_norm
    );
    finish("restriction-validator", start, None, ok, detail)
}

/// Runs every check in order.
pub fn run_all(opts: &SelftestOptions) -> Vec<CheckResult> {
    vec![
        check_gamma_algebra(opts),
        check_value_table(),
        check_group_laws(opts.seed),
        check_field_axioms(opts.seed),
        check_norm_transport(opts.seed),
        check_constant_alpha_reduction(opts.seed),
        check_derivative_oracle(),
        check_integral_oracle(),
        check_gauge_invariance(),
        check_geodesic_straight_line(),
        check_variational_cross(),
        check_restriction_validator(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes_with_the_default_options() {
        for result in run_all(&SelftestOptions::default()) {
            assert!(
                result.passed,
                "{} failed: {}",
                result.name, result.detail
            );
        }
    }

    #[test]
    fn the_injected_fault_is_caught() {
        let opts = SelftestOptions {
            seed: 0,
            inject_gamma_fault: true,
        };
        let result = check_gamma_algebra(&opts);
        assert!(!result.passed, "fault was not detected: {}", result.detail);
    }

    #[test]
    fn randomized_checks_are_reproducible_from_the_seed() {
        let a = check_group_laws(42);
        let b = check_group_laws(42);
        assert_eq!(a.detail, b.detail);
        let c = check_group_laws(43);
        // Different draws, same verdict.
        assert!(c.passed);
    }
}
