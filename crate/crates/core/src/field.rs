//! The scaling field `g` and the structures it attaches to spacetime.
//!
//! The field is entered as its exponent: `g(y) = exp(alpha(y))`, which keeps
//! `g` positive everywhere, and the vector field that drives every scaled
//! correction is the exact gradient `A = grad alpha = grad g / g`. Because
//! `A` is a gradient, the connection factor `g(y) / g(x)` between the fibers
//! at two points is independent of the path joining them.
//!
//! Fibers at a point carry scaled structures with factor `g(y)`: scalars and
//! spinor spaces for the gauge bundle, tangent charts with a flat metric for
//! the geometry bundle. [`check_local_restriction`] quantifies how close a
//! region is to the unscaled theory by the sup of `|A|` over a grid.

use crate::arithmetic::{ArithmeticError, ScaledNumber, StructureTag};
use crate::expr::{parse_expr, Expr, ParseError};
use crate::linear::VectorStructure;
use crate::scalar::{real, LinearScalar, Real};
use crate::sweep;
use thiserror::Error;

/// Variable table for field expressions.
pub const COORD_VARS: [&str; 4] = ["y0", "y1", "y2", "y3"];

#[derive(Debug, Error)]
pub enum FieldError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("point has a non-finite coordinate")]
    NonFinitePoint,
    #[error("scaling factor overflow at {point}: alpha = {alpha}")]
    Overflow { point: String, alpha: f64 },
    #[error("number carries {found}, but the field assigns factor {expected} at its point")]
    ScaleMismatch { expected: String, found: String },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("non-finite samples encountered during a grid sweep")]
    NonFiniteSample,
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// Spacetime axis. `Y0` is the time direction of the flat metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Y0,
    Y1,
    Y2,
    Y3,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::Y0, Axis::Y1, Axis::Y2, Axis::Y3];

    pub fn index(self) -> usize {
        match self {
            Axis::Y0 => 0,
            Axis::Y1 => 1,
            Axis::Y2 => 2,
            Axis::Y3 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        COORD_VARS[self.index()]
    }
}

/// Flat metric choice for chart structures and path functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricTag {
    /// Signature (+, -, -, -).
    Minkowski,
    /// Positive definite; useful for well-posed minimization tests.
    Euclidean,
}

impl MetricTag {
    /// Diagonal entries of `h_{mu nu}`.
    pub fn diagonal<T: Real>(self) -> [T; 4] {
        let one = T::one();
        match self {
            MetricTag::Minkowski => [one, -one, -one, -one],
            MetricTag::Euclidean => [one, one, one, one],
        }
    }

    /// Quadratic form `v h v`.
    pub fn quad<T: Real>(self, v: &[T; 4]) -> T {
        let d = self.diagonal::<T>();
        let mut acc = T::zero();
        for i in 0..4 {
            acc = acc + d[i] * v[i] * v[i];
        }
        acc
    }

    /// Index raising on a covector: `(h^{mu nu} a_nu)`. The flat metrics
    /// here are their own inverses up to the diagonal signs.
    pub fn raise<T: Real>(self, a: &[T; 4]) -> [T; 4] {
        let d = self.diagonal::<T>();
        [d[0] * a[0], d[1] * a[1], d[2] * a[2], d[3] * a[3]]
    }

    /// Lowering on a vector, same diagonal action.
    pub fn lower<T: Real>(self, v: &[T; 4]) -> [T; 4] {
        self.raise(v)
    }
}

/// A spacetime point with finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T: Real> {
    coords: [T; 4],
}

impl<T: Real> std::fmt::Display for Point<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.coords[0], self.coords[1], self.coords[2], self.coords[3]
        )
    }
}

impl<T: Real> Point<T> {
    pub fn new(coords: [T; 4]) -> Result<Self, FieldError> {
        if coords.iter().all(|c| c.is_finite()) {
            Ok(Point { coords })
        } else {
            Err(FieldError::NonFinitePoint)
        }
    }

    /// Construction from coordinates already known to be finite.
    pub(crate) fn new_unchecked(coords: [T; 4]) -> Self {
        Point { coords }
    }

    pub fn origin() -> Self {
        Point {
            coords: [T::zero(); 4],
        }
    }

    pub fn coords(&self) -> [T; 4] {
        self.coords
    }

    pub fn get(&self, axis: Axis) -> T {
        self.coords[axis.index()]
    }

    /// The point displaced by `h` along one axis.
    pub fn offset(&self, axis: Axis, h: T) -> Point<T> {
        let mut coords = self.coords;
        coords[axis.index()] = coords[axis.index()] + h;
        Point { coords }
    }
}

impl<T: Real> std::ops::Index<Axis> for Point<T> {
    type Output = T;
    fn index(&self, axis: Axis) -> &T {
        &self.coords[axis.index()]
    }
}

/// Axis-aligned evaluation grid with cell-centered sample points.
///
/// An axis with zero width is pinned: it holds exactly one sample at the
/// box coordinate and does not contribute to cell measures. An axis with
/// positive width needs at least two points. Iteration is row major with
/// `y3` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T: Real> {
    min: [T; 4],
    max: [T; 4],
    points: [usize; 4],
}

impl<T: Real> Grid<T> {
    pub fn new(min: [T; 4], max: [T; 4], points: [usize; 4]) -> Result<Self, FieldError> {
        for i in 0..4 {
            if !min[i].is_finite() || !max[i].is_finite() {
                return Err(FieldError::Grid("box coordinates must be finite".into()));
            }
            if max[i] < min[i] {
                return Err(FieldError::Grid(format!(
                    "axis {}: max {} is below min {}",
                    COORD_VARS[i], max[i], min[i]
                )));
            }
            let width = max[i] - min[i];
            if width.is_zero() {
                if points[i] != 1 {
                    return Err(FieldError::Grid(format!(
                        "axis {}: a zero-width axis is pinned and takes exactly 1 point, got {}",
                        COORD_VARS[i], points[i]
                    )));
                }
            } else if points[i] < 2 {
                return Err(FieldError::Grid(format!(
                    "axis {}: a positive-width axis needs at least 2 points, got {}",
                    COORD_VARS[i], points[i]
                )));
            }
        }
        let mut total = 1usize;
        for p in points {
            total = total
                .checked_mul(p)
                .ok_or_else(|| FieldError::Grid("grid size overflows".into()))?;
        }
        Ok(Grid { min, max, points })
    }

    pub fn min(&self) -> [T; 4] {
        self.min
    }

    pub fn max(&self) -> [T; 4] {
        self.max
    }

    pub fn points(&self) -> [usize; 4] {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor guarantees at least one point
    }

    /// True when the axis has positive width and participates in integrals.
    pub fn is_integrated(&self, axis: Axis) -> bool {
        let i = axis.index();
        !(self.max[i] - self.min[i]).is_zero()
    }

    /// Cell spacing along the axis; zero on pinned axes.
    pub fn spacing(&self, axis: Axis) -> T {
        let i = axis.index();
        let width = self.max[i] - self.min[i];
        if width.is_zero() {
            T::zero()
        } else {
            width / real(self.points[i] as f64)
        }
    }

    /// Product of spacings over the integrated axes; 1 when all are pinned.
    pub fn cell_measure(&self) -> T {
        let mut m = T::one();
        for axis in Axis::ALL {
            if self.is_integrated(axis) {
                m = m * self.spacing(axis);
            }
        }
        m
    }

    /// Cell-center coordinate `min + (i + 1/2) h`; the box coordinate on
    /// pinned axes.
    pub fn center(&self, axis: Axis, index: usize) -> T {
        let i = axis.index();
        let h = self.spacing(axis);
        self.min[i] + (real::<T>(index as f64) + real(0.5)) * h
    }

    pub fn point(&self, idx: [usize; 4]) -> Point<T> {
        let coords = [
            self.center(Axis::Y0, idx[0]),
            self.center(Axis::Y1, idx[1]),
            self.center(Axis::Y2, idx[2]),
            self.center(Axis::Y3, idx[3]),
        ];
        Point { coords }
    }

    /// Row-major flat index with `y3` fastest.
    pub fn flat_index(&self, idx: [usize; 4]) -> usize {
        ((idx[0] * self.points[1] + idx[1]) * self.points[2] + idx[2]) * self.points[3] + idx[3]
    }

    pub fn index_from_flat(&self, mut flat: usize) -> [usize; 4] {
        let mut idx = [0usize; 4];
        idx[3] = flat % self.points[3];
        flat /= self.points[3];
        idx[2] = flat % self.points[2];
        flat /= self.points[2];
        idx[1] = flat % self.points[1];
        flat /= self.points[1];
        idx[0] = flat;
        idx
    }

    /// All multi-indices in iteration order.
    pub fn indices(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        (0..self.len()).map(|flat| self.index_from_flat(flat))
    }

    /// All sample points in iteration order.
    pub fn sample_points(&self) -> impl Iterator<Item = Point<T>> + '_ {
        self.indices().map(|idx| self.point(idx))
    }

    /// Grid with every integrated axis at half resolution (at least 2
    /// points); pinned axes are untouched. Used for error estimates.
    pub fn coarsened(&self) -> Grid<T> {
        let mut points = self.points;
        for axis in Axis::ALL {
            if self.is_integrated(axis) {
                points[axis.index()] = (points[axis.index()] / 2).max(2);
            }
        }
        Grid {
            min: self.min,
            max: self.max,
            points,
        }
    }

    /// Index of the sample point nearest to `y`.
    pub fn nearest_index(&self, y: &Point<T>) -> [usize; 4] {
        let mut idx = [0usize; 4];
        for axis in Axis::ALL {
            let i = axis.index();
            if !self.is_integrated(axis) {
                continue;
            }
            let h = self.spacing(axis);
            let rel = (y.coords[i] - self.min[i]) / h - real(0.5);
            let rounded = rel.round().max(T::zero());
            let capped = (self.points[i] - 1) as f64;
            idx[i] = rounded.to_f64().unwrap_or(0.0).min(capped) as usize;
        }
        idx
    }
}

/// The scaling field, stored as its exponent `alpha` with the exact
/// gradient precomputed.
#[derive(Debug, Clone)]
pub struct FieldSpec<T: Real> {
    alpha: Expr<T>,
    grad: [Expr<T>; 4],
    source: String,
}

impl<T: Real> FieldSpec<T> {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let alpha = parse_expr(src, &COORD_VARS)?.simplified();
        Ok(Self::from_expr_with_source(alpha, src.to_string()))
    }

    pub fn from_expr(alpha: Expr<T>) -> Self {
        let source = alpha.to_text(&COORD_VARS);
        Self::from_expr_with_source(alpha.simplified(), source)
    }

    fn from_expr_with_source(alpha: Expr<T>, source: String) -> Self {
        let grad = [
            alpha.diff(0).simplified(),
            alpha.diff(1).simplified(),
            alpha.diff(2).simplified(),
            alpha.diff(3).simplified(),
        ];
        FieldSpec {
            alpha,
            grad,
            source,
        }
    }

    /// The unscaled theory: `alpha = c`, so `g` is constant and `A = 0`.
    pub fn constant(c: T) -> Self {
        Self::from_expr(Expr::Const(c))
    }

    /// The expression text this field was built from.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn alpha_expr(&self) -> &Expr<T> {
        &self.alpha
    }

    pub fn grad_expr(&self, axis: Axis) -> &Expr<T> {
        &self.grad[axis.index()]
    }

    pub fn alpha(&self, y: &Point<T>) -> T {
        self.alpha.eval(&y.coords)
    }

    /// `g(y) = exp(alpha(y))`, positive by construction.
    pub fn g(&self, y: &Point<T>) -> T {
        self.alpha(y).exp()
    }

    /// `g(y)` with overflow detection.
    pub fn g_checked(&self, y: &Point<T>) -> Result<T, FieldError> {
        let a = self.alpha(y);
        let g = a.exp();
        if !g.is_finite() || g.is_zero() {
            return Err(FieldError::Overflow {
                point: y.to_string(),
                alpha: a.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(g)
    }

    /// The drag field `A(y) = grad alpha(y)`, evaluated exactly.
    pub fn grad_alpha(&self, y: &Point<T>) -> [T; 4] {
        [
            self.grad[0].eval(&y.coords),
            self.grad[1].eval(&y.coords),
            self.grad[2].eval(&y.coords),
            self.grad[3].eval(&y.coords),
        ]
    }

    pub fn grad_alpha_at(&self, y: &Point<T>, axis: Axis) -> T {
        self.grad[axis.index()].eval(&y.coords)
    }

    /// Euclidean length of `A(y)`, the local deviation from flatness.
    pub fn a_len(&self, y: &Point<T>) -> T {
        let a = self.grad_alpha(y);
        (a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]).sqrt()
    }

    /// Moves a number from the fiber at `y` into the fiber at `x`. The base
    /// is untouched; the value picks up `g(y) / g(x)`. The number must carry
    /// the factor the field assigns at `y`.
    pub fn connect<S>(
        &self,
        x: &Point<T>,
        y: &Point<T>,
        n: &ScaledNumber<S>,
    ) -> Result<ScaledNumber<S>, FieldError>
    where
        S: LinearScalar<Real = T>,
    {
        let gy = self.g_checked(y)?;
        let expected = S::from_real(gy);
        if n.tag().scale() != &expected || n.tag().order_reversed() {
            return Err(FieldError::ScaleMismatch {
                expected: format!("structure[{gy}]"),
                found: n.tag().to_string(),
            });
        }
        let gx = self.g_checked(x)?;
        let tag = StructureTag::new(S::from_real(gx)).expect("g is positive");
        Ok(tag.from_base(n.base().clone()))
    }

    /// The fiber of the given bundle at `y`.
    pub fn fiber_at(&self, y: &Point<T>, kind: BundleKind) -> Result<Fiber<T>, FieldError> {
        let scale = self.g_checked(y)?;
        Ok(Fiber {
            point: *y,
            scale,
            kind,
        })
    }
}

/// Which associated bundle a fiber belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleKind {
    /// Scaled scalars and spinor spaces for matter fields.
    Gauge,
    /// Scaled tangent charts carrying a flat metric.
    Geometry,
}

/// The scaled structures attached to one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Fiber<T: Real> {
    point: Point<T>,
    scale: T,
    kind: BundleKind,
}

impl<T: Real> Fiber<T> {
    pub fn point(&self) -> &Point<T> {
        &self.point
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn kind(&self) -> BundleKind {
        self.kind
    }

    /// Scaled complex numbers with factor `g(y)`.
    pub fn complex_tag(&self) -> StructureTag<num_complex::Complex<T>> {
        StructureTag::new(num_complex::Complex::new(self.scale, T::zero()))
            .expect("g is positive")
    }

    /// Scaled reals with factor `g(y)`.
    pub fn real_tag(&self) -> StructureTag<T> {
        StructureTag::new(self.scale).expect("g is positive")
    }

    /// Scaled spinor space with factor `g(y)` (gauge bundle).
    pub fn spinor_space(&self) -> VectorStructure<num_complex::Complex<T>> {
        VectorStructure::spinor(self.scale).expect("g is positive")
    }

    /// Scaled tangent chart with factor `g(y)` (geometry bundle).
    pub fn chart(&self) -> VectorStructure<T> {
        VectorStructure::new(self.scale, 4).expect("g is positive")
    }

    /// The flat metric carried by geometry fibers.
    pub fn metric(&self) -> Option<MetricTag> {
        match self.kind {
            BundleKind::Geometry => Some(MetricTag::Minkowski),
            BundleKind::Gauge => None,
        }
    }
}

/// Result of the local-flatness check over a region.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionReport<T: Real> {
    pub max_norm: T,
    pub argmax: Point<T>,
    pub epsilon: T,
    pub pass: bool,
}

/// Sup of `|A|` over the region's sample grid, compared against `epsilon`.
///
/// The sweep is deterministic: ties keep the first point in iteration
/// order, independent of thread count.
pub fn check_local_restriction<T: Real>(
    spec: &FieldSpec<T>,
    region: &Grid<T>,
    epsilon: T,
) -> Result<RestrictionReport<T>, FieldError> {
    if !(epsilon > T::zero()) {
        return Err(FieldError::BadParameter(
            "epsilon must be a positive number".into(),
        ));
    }
    let (flat, max_norm) = sweep::chunked_argmax(region.len(), |i| {
        let y = region.point(region.index_from_flat(i));
        spec.a_len(&y)
    });
    if !max_norm.is_finite() {
        return Err(FieldError::NonFiniteSample);
    }
    let argmax = region.point(region.index_from_flat(flat));
    Ok(RestrictionReport {
        max_norm,
        argmax,
        epsilon,
        pass: max_norm < epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn pt(a: f64, b: f64, c: f64, d: f64) -> Point<f64> {
        Point::new([a, b, c, d]).unwrap()
    }

    #[test]
    fn alpha_and_g_evaluate_per_definition() {
        let spec = FieldSpec::<f64>::parse("y1").unwrap();
        let y = pt(0.0, 2.0, 0.0, 0.0);
        assert_eq!(spec.alpha(&y), 2.0);
        assert!((spec.g(&y) - 7.38905609893065).abs() < 1e-12);
    }

    #[test]
    fn gradient_is_exact_for_linear_alpha() {
        let spec = FieldSpec::<f64>::parse("0.5*y1").unwrap();
        let a = spec.grad_alpha(&pt(1.0, -2.0, 3.0, 4.0));
        assert_eq!(a, [0.0, 0.5, 0.0, 0.0]);
        assert_eq!(spec.a_len(&pt(0.0, 0.0, 0.0, 0.0)), 0.5);
    }

    #[test]
    fn overflow_is_reported_not_propagated() {
        let spec = FieldSpec::<f64>::parse("1000*y0").unwrap();
        let err = spec.g_checked(&pt(10.0, 0.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, FieldError::Overflow { .. }));
        // Far negative alpha underflows to zero, also an invalid factor.
        let err = spec.g_checked(&pt(-10.0, 0.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, FieldError::Overflow { .. }));
    }

    #[test]
    fn points_reject_non_finite_coordinates() {
        assert!(Point::new([f64::NAN, 0.0, 0.0, 0.0]).is_err());
        assert!(Point::new([0.0, f64::INFINITY, 0.0, 0.0]).is_err());
    }

    #[test]
    fn grid_shapes_are_validated() {
        let ok = Grid::new([0.0; 4], [0.0, 1.0, 0.0, 0.0], [1, 8, 1, 1]).unwrap();
        assert_eq!(ok.len(), 8);
        assert!(ok.is_integrated(Axis::Y1));
        assert!(!ok.is_integrated(Axis::Y0));
        assert_eq!(ok.spacing(Axis::Y1), 0.125);
        assert_eq!(ok.cell_measure(), 0.125);

        // Zero-width axis must take exactly one point.
        assert!(Grid::new([0.0; 4], [0.0; 4], [2, 1, 1, 1]).is_err());
        // Positive width needs at least two points.
        assert!(Grid::new([0.0; 4], [1.0, 0.0, 0.0, 0.0], [1, 1, 1, 1]).is_err());
        // Inverted boxes are rejected.
        assert!(Grid::new([1.0, 0.0, 0.0, 0.0], [0.0; 4], [2, 1, 1, 1]).is_err());
    }

    #[test]
    fn grid_iterates_row_major_with_y3_fastest() {
        let g = Grid::new(
            [0.0; 4],
            [0.0, 1.0, 0.0, 1.0],
            [1, 2, 1, 2],
        )
        .unwrap();
        let idx: Vec<[usize; 4]> = g.indices().collect();
        assert_eq!(
            idx,
            vec![
                [0, 0, 0, 0],
                [0, 0, 0, 1],
                [0, 1, 0, 0],
                [0, 1, 0, 1]
            ]
        );
        for (k, i) in g.indices().enumerate() {
            assert_eq!(g.flat_index(i), k);
        }
        // Cell centers, not box corners.
        assert_eq!(g.point([0, 0, 0, 0]).coords(), [0.0, 0.25, 0.0, 0.25]);
    }

    #[test]
    fn connect_moves_values_by_the_factor_ratio_and_checks_the_fiber() {
        let spec = FieldSpec::<f64>::parse("y1").unwrap();
        let x = pt(0.0, 0.0, 0.0, 0.0);
        let y = pt(0.0, 1.0, 0.0, 0.0);
        let gy = spec.g(&y);
        let fiber_y = spec.fiber_at(&y, BundleKind::Gauge).unwrap();
        let n = fiber_y.complex_tag().number(Complex::new(2.0, 1.0));

        let moved = spec.connect(&x, &y, &n).unwrap();
        assert_eq!(moved.base(), n.base());
        assert_eq!(*moved.tag().scale(), Complex::new(1.0, 0.0));
        let expect = Complex::new(2.0, 1.0) * gy; // value * g(y)/g(x), g(x)=1
        assert!((moved.value() - expect).norm() < 1e-12);

        // A number from the wrong fiber is rejected.
        let foreign = StructureTag::new(Complex::new(3.0, 0.0))
            .unwrap()
            .number(Complex::new(1.0, 0.0));
        assert!(matches!(
            spec.connect(&x, &y, &foreign).unwrap_err(),
            FieldError::ScaleMismatch { .. }
        ));
    }

    #[test]
    fn connection_is_path_independent() {
        // Chaining through any intermediate point composes to the same
        // factor because A is a gradient.
        let spec = FieldSpec::<f64>::parse("0.3*y0 + sin(y2)").unwrap();
        let x = pt(0.1, 0.0, -0.4, 0.0);
        let mid1 = pt(2.0, 1.0, 0.5, -1.0);
        let mid2 = pt(-1.0, 3.0, 0.2, 2.0);
        let y = pt(0.7, 0.2, 1.1, 0.0);
        let n = spec
            .fiber_at(&y, BundleKind::Gauge)
            .unwrap()
            .complex_tag()
            .number(Complex::new(1.5, -0.5));
        let via1 = spec
            .connect(&x, &mid1, &spec.connect(&mid1, &y, &n).unwrap())
            .unwrap();
        let via2 = spec
            .connect(&x, &mid2, &spec.connect(&mid2, &y, &n).unwrap())
            .unwrap();
        let direct = spec.connect(&x, &y, &n).unwrap();
        assert!((via1.value() - direct.value()).norm() < 1e-12);
        assert!((via2.value() - direct.value()).norm() < 1e-12);
    }

    #[test]
    fn fibers_expose_the_right_structures() {
        let spec = FieldSpec::<f64>::parse("y1").unwrap();
        let y = pt(0.0, 1.0, 0.0, 0.0);
        let gauge = spec.fiber_at(&y, BundleKind::Gauge).unwrap();
        assert_eq!(gauge.spinor_space().dim(), 4);
        assert_eq!(gauge.metric(), None);
        let geom = spec.fiber_at(&y, BundleKind::Geometry).unwrap();
        assert_eq!(geom.metric(), Some(MetricTag::Minkowski));
        assert_eq!(geom.chart().scale(), spec.g(&y));
    }

    #[test]
    fn restriction_check_reports_the_sup_and_its_location() {
        let spec = FieldSpec::<f64>::parse("0.5*y1").unwrap();
        let region = Grid::new([0.0; 4], [0.0, 1.0, 0.0, 0.0], [1, 16, 1, 1]).unwrap();
        let report = check_local_restriction(&spec, &region, 0.1).unwrap();
        assert_eq!(report.max_norm, 0.5);
        assert!(!report.pass);

        let flat = FieldSpec::<f64>::constant(2.5);
        let report = check_local_restriction(&flat, &region, 1e-15).unwrap();
        assert_eq!(report.max_norm, 0.0);
        assert!(report.pass);

        assert!(check_local_restriction(&spec, &region, 0.0).is_err());
    }

    #[test]
    fn gaussian_tails_pass_a_tight_restriction() {
        // Far from the bump the drag field is negligible.
        let spec = FieldSpec::<f64>::parse("gaussian(0, 1)").unwrap();
        let region = Grid::new(
            [0.0, 5.0, 0.0, 0.0],
            [0.0, 6.0, 0.0, 0.0],
            [1, 8, 1, 1],
        )
        .unwrap();
        let report = check_local_restriction(&spec, &region, 1e-9).unwrap();
        assert!(report.pass, "max |A| = {}", report.max_norm);
    }

    #[test]
    fn metric_tags_raise_and_quad_with_their_signature() {
        let v = [2.0, 1.0, -1.0, 0.5];
        assert_eq!(MetricTag::Minkowski.quad(&v), 4.0 - 1.0 - 1.0 - 0.25);
        assert_eq!(MetricTag::Euclidean.quad(&v), 4.0 + 1.0 + 1.0 + 0.25);
        assert_eq!(MetricTag::Minkowski.raise(&v), [2.0, -1.0, 1.0, -0.5]);
    }
}
