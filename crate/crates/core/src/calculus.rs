//! Scaled integrals and derivatives of sections.
//!
//! A section assigns to each point a value in that point's fiber. Summing
//! or differencing sections therefore needs the connection: every sample is
//! dragged to the reference fiber first, which multiplies it by
//! `g(y) / g(x)`. Concretely,
//!
//! ```text
//! integral at x:   (1 / g(x)) * sum_y g(y) psi(y) dV      (midpoint rule)
//! derivative:      D_mu psi = (d_mu + A_mu) psi
//! ```
//!
//! The extra `A_mu psi` term is the derivative of the transport factor; the
//! transported one-sided difference quotient
//! `[g(y + h e) / g(y) * psi(y + h e) - psi(y)] / h` converges to `D_mu psi`
//! at first order. With constant `alpha` both operations reduce to their
//! ordinary forms.

use crate::arithmetic::ScaledNumber;
use crate::expr::ComplexExpr;
use crate::field::{Axis, FieldError, FieldSpec, Grid, Point};
use crate::linear::{ScaledVector, VectorStructure};
use crate::scalar::Real;
use crate::sweep;
use num_complex::Complex;

/// A partial derivative value plus how it was obtained. Sampled sections
/// fall back to one-sided differences on their boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partial<T: Real> {
    pub value: Complex<T>,
    pub one_sided: bool,
}

/// Complex scalar section: a value in the fiber over each point.
pub trait ScalarSection<T: Real> {
    fn value_at(&self, y: &Point<T>) -> Complex<T>;
    fn partial_at(&self, y: &Point<T>, mu: Axis) -> Partial<T>;
}

impl<T: Real> ScalarSection<T> for ComplexExpr<T> {
    fn value_at(&self, y: &Point<T>) -> Complex<T> {
        self.value(&y.coords())
    }

    fn partial_at(&self, y: &Point<T>, mu: Axis) -> Partial<T> {
        Partial {
            value: self.partial(mu.index(), &y.coords()),
            one_sided: false,
        }
    }
}

/// Section given by samples on a grid. Derivatives are central differences
/// away from the boundary and one-sided (flagged) on it; pinned axes have
/// zero derivative.
#[derive(Debug, Clone)]
pub struct SampledField<T: Real> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SampledField<T> {
    /// Samples `f` at every grid point.
    pub fn from_fn(
        grid: Grid<T>,
        f: impl Fn(&Point<T>) -> Complex<T>,
    ) -> Result<Self, FieldError> {
        let mut values = Vec::with_capacity(grid.len());
        for p in grid.sample_points() {
            let v = f(&p);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(FieldError::NonFiniteSample);
            }
            values.push(v);
        }
        Ok(SampledField { grid, values })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn value_at_index(&self, idx: [usize; 4]) -> Complex<T> {
        self.values[self.grid.flat_index(idx)]
    }
}

impl<T: Real> ScalarSection<T> for SampledField<T> {
    fn value_at(&self, y: &Point<T>) -> Complex<T> {
        self.value_at_index(self.grid.nearest_index(y))
    }

    fn partial_at(&self, y: &Point<T>, mu: Axis) -> Partial<T> {
        let axis = mu.index();
        if !self.grid.is_integrated(mu) {
            return Partial {
                value: Complex::new(T::zero(), T::zero()),
                one_sided: false,
            };
        }
        let idx = self.grid.nearest_index(y);
        let n = self.grid.points()[axis];
        let h = self.grid.spacing(mu);
        let at = |i: usize| {
            let mut j = idx;
            j[axis] = i;
            self.values[self.grid.flat_index(j)]
        };
        let i = idx[axis];
        if i > 0 && i + 1 < n {
            Partial {
                value: (at(i + 1) - at(i - 1)) / (h + h),
                one_sided: false,
            }
        } else if i + 1 < n {
            Partial {
                value: (at(i + 1) - at(i)) / h,
                one_sided: true,
            }
        } else {
            Partial {
                value: (at(i) - at(i - 1)) / h,
                one_sided: true,
            }
        }
    }
}

/// Scaled integral of a section over the grid, referred to the fiber at
/// `x`: every sample is dragged there before summing, so the result is a
/// number in the structure with factor `g(x)`.
pub fn scaled_integral<T: Real, F: ScalarSection<T> + Sync>(
    spec: &FieldSpec<T>,
    psi: &F,
    grid: &Grid<T>,
    x: &Point<T>,
) -> Result<ScaledNumber<Complex<T>>, FieldError> {
    let gx = spec.g_checked(x)?;
    let total = sweep::chunked_sum(grid.len(), |flat| {
        let y = grid.point(grid.index_from_flat(flat));
        let gy = spec.g(&y);
        psi.value_at(&y) * gy
    });
    let weighted = total * grid.cell_measure();
    if !weighted.re.is_finite() || !weighted.im.is_finite() {
        return Err(FieldError::NonFiniteSample);
    }
    let tag = spec
        .fiber_at(x, crate::field::BundleKind::Gauge)?
        .complex_tag();
    Ok(tag.number(weighted / gx))
}

/// Scaled integral of a vector-valued section, handled componentwise.
pub fn scaled_integral_vector<T: Real>(
    spec: &FieldSpec<T>,
    psi: impl Fn(&Point<T>) -> Vec<Complex<T>> + Sync,
    grid: &Grid<T>,
    x: &Point<T>,
) -> Result<ScaledVector<Complex<T>>, FieldError> {
    let gx = spec.g_checked(x)?;
    let dim = psi(&grid.point(grid.index_from_flat(0))).len();
    let mut values = Vec::with_capacity(dim);
    for comp in 0..dim {
        let total = sweep::chunked_sum(grid.len(), |flat| {
            let y = grid.point(grid.index_from_flat(flat));
            let v = psi(&y);
            debug_assert_eq!(v.len(), dim);
            v[comp] * spec.g(&y)
        });
        let weighted = total * grid.cell_measure();
        if !weighted.re.is_finite() || !weighted.im.is_finite() {
            return Err(FieldError::NonFiniteSample);
        }
        values.push(weighted / gx);
    }
    let space = VectorStructure::new(gx, dim)?;
    Ok(space.vector(&values)?)
}

/// The scaled derivative `D_mu psi = (d_mu + A_mu) psi` at `y`.
pub fn scaled_derivative<T: Real, F: ScalarSection<T>>(
    spec: &FieldSpec<T>,
    psi: &F,
    y: &Point<T>,
    mu: Axis,
) -> Partial<T> {
    let p = psi.partial_at(y, mu);
    let a = spec.grad_alpha_at(y, mu);
    Partial {
        value: p.value + psi.value_at(y) * a,
        one_sided: p.one_sided,
    }
}

/// The transported one-sided difference quotient
/// `[g(y + h e_mu) / g(y) * psi(y + h e_mu) - psi(y)] / h`,
/// which converges to `D_mu psi` as `h -> 0`.
pub fn transported_difference_quotient<T: Real, F: ScalarSection<T>>(
    spec: &FieldSpec<T>,
    psi: &F,
    y: &Point<T>,
    mu: Axis,
    h: T,
) -> Complex<T> {
    let yh = y.offset(mu, h);
    let carry = (spec.alpha(&yh) - spec.alpha(y)).exp();
    (psi.value_at(&yh) * carry - psi.value_at(y)) / h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::field::COORD_VARS;

    fn section(re: &str, im: &str) -> ComplexExpr<f64> {
        ComplexExpr::parse(re, im, &COORD_VARS).unwrap()
    }

    fn origin() -> Point<f64> {
        Point::origin()
    }

    #[test]
    fn integral_reproduces_the_exponential_weight() {
        // alpha = y1 and psi = 1 over [0,1]: the sum is the midpoint rule
        // for integral of e^t, and g(x) = 1 at the origin.
        let spec = FieldSpec::<f64>::parse("y1").unwrap();
        let grid = Grid::new([0.0; 4], [0.0, 1.0, 0.0, 0.0], [1, 10_000, 1, 1]).unwrap();
        let psi = section("1", "0");
        let n = scaled_integral(&spec, &psi, &grid, &origin()).unwrap();
        let expect = std::f64::consts::E - 1.0;
        assert!((n.value().re - expect).abs() < 1e-8);
        assert_eq!(n.value().im, 0.0);
        assert_eq!(*n.tag().scale(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn integral_is_linear_in_the_section() {
        let spec = FieldSpec::<f64>::parse("0.3*y1 + sin(y0)").unwrap();
        let grid = Grid::new(
            [0.0; 4],
            [1.0, 1.0, 0.0, 0.0],
            [16, 16, 1, 1],
        )
        .unwrap();
        let f = section("y0*y1", "cos(y1)");
        let g = section("exp(0.2*y0)", "y1 - 2");
        let sum = section("y0*y1 + exp(0.2*y0)", "cos(y1) + y1 - 2");
        let x = origin();
        let a = scaled_integral(&spec, &f, &grid, &x).unwrap().value();
        let b = scaled_integral(&spec, &g, &grid, &x).unwrap().value();
        let c = scaled_integral(&spec, &sum, &grid, &x).unwrap().value();
        assert!((a + b - c).norm() < 1e-12);
    }

    #[test]
    fn integral_referred_to_two_points_differs_by_the_connection() {
        let spec = FieldSpec::<f64>::parse("0.5*y1").unwrap();
        let grid = Grid::new([0.0; 4], [0.0, 1.0, 0.0, 0.0], [1, 64, 1, 1]).unwrap();
        let psi = section("y1 + 1", "0.5");
        let x1 = origin();
        let x2 = Point::new([0.0, 2.0, 0.0, 0.0]).unwrap();
        let i1 = scaled_integral(&spec, &psi, &grid, &x1).unwrap();
        let i2 = scaled_integral(&spec, &psi, &grid, &x2).unwrap();
        // Same base, different fiber: value ratio is g(x2)/g(x1).
        let ratio = spec.g(&x1) / spec.g(&x2);
        assert!((i2.value() - i1.value() * ratio).norm() < 1e-13);
        assert!((i1.base() - i2.base()).norm() < 1e-13);
    }

    #[test]
    fn constant_alpha_reduces_to_the_ordinary_midpoint_rule() {
        let spec = FieldSpec::<f64>::constant(0.7);
        let grid = Grid::new([0.0; 4], [0.0, 2.0, 0.0, 0.0], [1, 256, 1, 1]).unwrap();
        let psi = section("y1^2", "0");
        let n = scaled_integral(&spec, &psi, &grid, &origin()).unwrap();
        // Plain midpoint rule for the same integrand.
        let h = 2.0 / 256.0;
        let mut plain = 0.0;
        for i in 0..256 {
            let t: f64 = (i as f64 + 0.5) * h;
            plain += t * t * h;
        }
        assert!((n.value().re - plain).abs() < 1e-12 * plain);
    }

    #[test]
    fn scaled_derivative_adds_the_drag_term() {
        let spec = FieldSpec::<f64>::parse("0.5*y1").unwrap();
        let psi = section("y1^2", "y1");
        let y = Point::new([0.0, 2.0, 0.0, 0.0]).unwrap();
        let d = scaled_derivative(&spec, &psi, &y, Axis::Y1);
        // d psi = (4, 1); A_1 psi = 0.5 * (4, 2).
        assert!((d.value - Complex::new(6.0, 2.0)).norm() < 1e-13);
        assert!(!d.one_sided);
    }

    #[test]
    fn quotient_converges_to_the_scaled_derivative_at_first_order() {
        let spec = FieldSpec::<f64>::parse("0.4*y1 + 0.2*sin(y0)").unwrap();
        let psi = section("exp(0.3*y1)*cos(y0)", "y0*y1");
        let y = Point::new([0.4, 0.8, 0.0, 0.0]).unwrap();
        let exact = scaled_derivative(&spec, &psi, &y, Axis::Y1).value;
        let mut prev_err = f64::INFINITY;
        for k in 2..6 {
            let h = 10f64.powi(-k);
            let q = transported_difference_quotient(&spec, &psi, &y, Axis::Y1, h);
            let err = (q - exact).norm();
            assert!(err < prev_err, "error should shrink with h");
            prev_err = err;
        }
        // First order: err(1e-3)/err(1e-4) close to 10.
        let e3 = (transported_difference_quotient(&spec, &psi, &y, Axis::Y1, 1e-3) - exact).norm();
        let e4 = (transported_difference_quotient(&spec, &psi, &y, Axis::Y1, 1e-4) - exact).norm();
        let order = (e3 / e4).log10();
        assert!((order - 1.0).abs() < 0.2, "observed order {order}");
    }

    #[test]
    fn leibniz_rule_holds_for_the_scaled_derivative() {
        // D(fg) = (df)g + f(dg) + A f g, matching the product of sections.
        let spec = FieldSpec::<f64>::parse("0.3*y1 + 0.1*y0").unwrap();
        let f = section("y0 + y1^2", "0.5*y1");
        let g = section("sin(y1)", "y0");
        let prod = f.product(&g);
        let y = Point::new([0.7, 1.3, 0.0, 0.0]).unwrap();
        for mu in [Axis::Y0, Axis::Y1] {
            let lhs = scaled_derivative(&spec, &prod, &y, mu).value;
            let df = f.partial_at(&y, mu).value;
            let dg = g.partial_at(&y, mu).value;
            let a = spec.grad_alpha_at(&y, mu);
            let rhs =
                df * g.value_at(&y) + f.value_at(&y) * dg + f.value_at(&y) * g.value_at(&y) * a;
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn sampled_sections_flag_boundary_derivatives() {
        let grid = Grid::<f64>::new([0.0; 4], [0.0, 1.0, 0.0, 0.0], [1, 8, 1, 1]).unwrap();
        let field = SampledField::from_fn(grid.clone(), |p| {
            Complex::new(p.get(Axis::Y1).powi(2), 0.0)
        })
        .unwrap();
        let inner = grid.point([0, 4, 0, 0]);
        let d = field.partial_at(&inner, Axis::Y1);
        assert!(!d.one_sided);
        assert!((d.value.re - 2.0 * inner.get(Axis::Y1)).abs() < 1e-12);

        let edge = grid.point([0, 0, 0, 0]);
        let d = field.partial_at(&edge, Axis::Y1);
        assert!(d.one_sided);
        // Pinned axes differentiate to zero.
        let d = field.partial_at(&inner, Axis::Y2);
        assert_eq!(d.value, Complex::new(0.0, 0.0));
    }

    #[test]
    fn sampled_sections_reject_non_finite_samples() {
        let grid = Grid::new([0.0; 4], [0.0, 1.0, 0.0, 0.0], [1, 4, 1, 1]).unwrap();
        let err = SampledField::from_fn(grid, |p| {
            Complex::new(1.0 / (p.get(Axis::Y1) - p.get(Axis::Y1)), 0.0)
        })
        .unwrap_err();
        assert!(matches!(err, FieldError::NonFiniteSample));
    }

    #[test]
    fn vector_integrals_match_componentwise_scalar_integrals() {
        let spec = FieldSpec::<f64>::parse("0.2*y1").unwrap();
        let grid = Grid::new([0.0; 4], [0.0, 1.0, 0.0, 0.0], [1, 32, 1, 1]).unwrap();
        let x = origin();
        let comp0 = section("y1", "0");
        let comp1 = section("0", "cos(y1)");
        let vec_result = scaled_integral_vector(
            &spec,
            |p| {
                vec![
                    Complex::new(p.get(Axis::Y1), 0.0),
                    Complex::new(0.0, p.get(Axis::Y1).cos()),
                ]
            },
            &grid,
            &x,
        )
        .unwrap();
        let s0 = scaled_integral(&spec, &comp0, &grid, &x).unwrap().value();
        let s1 = scaled_integral(&spec, &comp1, &grid, &x).unwrap().value();
        let values = vec_result.values();
        assert!((values[0] - s0).norm() < 1e-14);
        assert!((values[1] - s1).norm() < 1e-14);
        assert_eq!(vec_result.scale(), spec.g(&x));
    }

    #[test]
    fn alpha_grid_parse_errors_surface_with_positions() {
        let err = parse_expr::<f64>("0.5 ** y1", &COORD_VARS).unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 6);
    }
}
