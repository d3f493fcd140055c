//! Gamma algebra and the scaled U(1) Dirac Lagrangian density.
//!
//! The scaling field enters the free Dirac Lagrangian through the same
//! mechanism as the photon field: both are value-changing connections, and
//! their combined parallel transport over a short step `h e_mu` is
//! `exp(alpha(y + h e_mu) - alpha(y)) * exp(i (phi(y + h e_mu) - phi(y)))`.
//! To first order that is `1 + h (A_mu + i B_mu)` with `A = grad alpha` and
//! `B = grad phi`, which puts the density into the form
//!
//! ```text
//! L = bar(psi) i gamma^mu (d_mu + a A_mu + i b B_mu) psi - m bar(psi) psi
//! ```
//!
//! with real couplings `a` and `b`. Under a local phase rotation
//! `psi -> exp(i theta) psi`, `B -> B - (1/b) grad theta`, the density is
//! unchanged and `A` does not transform at all: the scaling drag is not a
//! gauge degree of freedom.
//!
//! Two conventions for the row spinor are supported: the pairing via
//! `gamma^5 conj(psi)` and the conventional `gamma^0 conj(psi)` (both
//! symmetric matrices, applied to the componentwise conjugate).

use crate::expr::{parse_expr, ComplexExpr, Expr, ParseError};
use crate::field::{Axis, FieldSpec, Grid, Point, COORD_VARS};
use crate::scalar::{real, Real};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex;
use thiserror::Error;

/// Square root of the fine structure constant, the natural magnitude for
/// the photon coupling `b`.
pub const SQRT_FINE_STRUCTURE: f64 = 0.0854245432;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaugeError {
    #[error("the coupling b must be nonzero to perform gauge transformations")]
    ZeroCoupling,
    #[error("invalid gauge parameter: {0}")]
    InvalidParameter(String),
}

/// Spinor value at a point: four complex components.
pub type SpinorValue<T> = Vector4<Complex<T>>;

/// The four gamma matrices in the Dirac representation plus `gamma^5`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet<T: Real> {
    gamma: [Matrix4<Complex<T>>; 4],
    gamma5: Matrix4<Complex<T>>,
}

impl<T: Real> GammaSet<T> {
    /// Standard Dirac representation: `gamma^0 = diag(1, 1, -1, -1)`,
    /// spatial matrices off-diagonal with the Pauli blocks.
    pub fn dirac() -> Self {
        let o = Complex::new(T::zero(), T::zero());
        let l = Complex::new(T::one(), T::zero());
        let n = -l;
        let i = Complex::new(T::zero(), T::one());
        let mi = -i;
        #[rustfmt::skip]
        let g0 = Matrix4::new(
            l, o, o, o,
            o, l, o, o,
            o, o, n, o,
            o, o, o, n,
        );
        #[rustfmt::skip]
        let g1 = Matrix4::new(
            o, o, o, l,
            o, o, l, o,
            o, n, o, o,
            n, o, o, o,
        );
        #[rustfmt::skip]
        let g2 = Matrix4::new(
            o, o, o, mi,
            o, o, i, o,
            o, i, o, o,
            mi, o, o, o,
        );
        #[rustfmt::skip]
        let g3 = Matrix4::new(
            o, o, l, o,
            o, o, o, n,
            n, o, o, o,
            o, l, o, o,
        );
        #[rustfmt::skip]
        let g5 = Matrix4::new(
            o, o, l, o,
            o, o, o, l,
            l, o, o, o,
            o, l, o, o,
        );
        GammaSet {
            gamma: [g0, g1, g2, g3],
            gamma5: g5,
        }
    }

    pub fn gamma(&self, mu: Axis) -> &Matrix4<Complex<T>> {
        &self.gamma[mu.index()]
    }

    pub fn gamma5(&self) -> &Matrix4<Complex<T>> {
        &self.gamma5
    }

    /// Largest absolute entry of the defects of the defining relations:
    /// `{gamma^mu, gamma^nu} = 2 h^{mu nu} I` with `h = diag(1,-1,-1,-1)`,
    /// `{gamma^5, gamma^mu} = 0`, and `(gamma^5)^2 = I`.
    pub fn algebra_defect(&self) -> T {
        let mut worst = T::zero();
        let mut track = |m: &Matrix4<Complex<T>>| {
            for entry in m.iter() {
                let a = entry.norm();
                if a > worst {
                    worst = a;
                }
            }
        };
        let diag: [T; 4] = [T::one(), -T::one(), -T::one(), -T::one()];
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = self.gamma[mu] * self.gamma[nu] + self.gamma[nu] * self.gamma[mu];
                let expect = if mu == nu {
                    Matrix4::identity() * Complex::new(diag[mu] + diag[mu], T::zero())
                } else {
                    Matrix4::zeros()
                };
                track(&(anti - expect));
            }
        }
        for mu in 0..4 {
            let anti = self.gamma5 * self.gamma[mu] + self.gamma[mu] * self.gamma5;
            track(&anti);
        }
        track(&(self.gamma5 * self.gamma5 - Matrix4::identity()));
        worst
    }

    /// Deliberately broken copy for fault-injection tests: adds `epsilon`
    /// to one entry of `gamma^0`.
    pub fn with_fault(mut self, epsilon: T) -> Self {
        self.gamma[0][(0, 0)] += Complex::new(epsilon, T::zero());
        self
    }
}

/// How the row spinor is formed from the column spinor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarConvention {
    /// `bar(psi) = gamma^5 conj(psi)`.
    Gamma5Conjugate,
    /// `bar(psi) = gamma^0 conj(psi)`, the conventional Dirac adjoint
    /// (as a column; the pairing below contracts without conjugation).
    DaggerGamma0,
}

/// The row spinor under the chosen convention.
pub fn dirac_bar<T: Real>(
    gammas: &GammaSet<T>,
    convention: BarConvention,
    psi: &SpinorValue<T>,
) -> SpinorValue<T> {
    let conj = psi.map(|c| c.conj());
    match convention {
        BarConvention::Gamma5Conjugate => gammas.gamma5 * conj,
        BarConvention::DaggerGamma0 => gammas.gamma[0] * conj,
    }
}

/// Real-valued photon field `B_mu` given by four expression trees.
#[derive(Debug, Clone)]
pub struct BField<T: Real> {
    comps: [Expr<T>; 4],
}

impl<T: Real> BField<T> {
    pub fn zero() -> Self {
        BField {
            comps: [
                Expr::Const(T::zero()),
                Expr::Const(T::zero()),
                Expr::Const(T::zero()),
                Expr::Const(T::zero()),
            ],
        }
    }

    pub fn new(comps: [Expr<T>; 4]) -> Self {
        BField {
            comps: comps.map(|c| c.simplified()),
        }
    }

    pub fn parse(sources: &[String; 4]) -> Result<Self, ParseError> {
        Ok(BField::new([
            parse_expr(&sources[0], &COORD_VARS)?,
            parse_expr(&sources[1], &COORD_VARS)?,
            parse_expr(&sources[2], &COORD_VARS)?,
            parse_expr(&sources[3], &COORD_VARS)?,
        ]))
    }

    pub fn component(&self, mu: Axis) -> &Expr<T> {
        &self.comps[mu.index()]
    }

    pub fn value(&self, y: &Point<T>) -> [T; 4] {
        let c = y.coords();
        [
            self.comps[0].eval(&c),
            self.comps[1].eval(&c),
            self.comps[2].eval(&c),
            self.comps[3].eval(&c),
        ]
    }

    /// The gauge-transformed field `B - (1/b) grad theta`, built
    /// symbolically.
    pub fn transformed(&self, theta: &Expr<T>, b: T) -> BField<T> {
        let inv = T::one() / b;
        let comps = [0, 1, 2, 3].map(|mu| {
            Expr::Sub(
                Box::new(self.comps[mu].clone()),
                Box::new(Expr::Mul(
                    Box::new(Expr::Const(inv)),
                    Box::new(theta.diff(mu)),
                )),
            )
            .simplified()
        });
        BField { comps }
    }
}

/// Couplings, mass, row-spinor convention and photon field for the density.
#[derive(Debug, Clone)]
pub struct GaugeConfig<T: Real> {
    pub a: T,
    pub b: T,
    pub m: T,
    pub bar: BarConvention,
    pub b_field: BField<T>,
}

impl<T: Real> GaugeConfig<T> {
    pub fn new(
        a: T,
        b: T,
        m: T,
        bar: BarConvention,
        b_field: BField<T>,
    ) -> Result<Self, GaugeError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(GaugeError::InvalidParameter(
                "couplings a and b must be finite".into(),
            ));
        }
        if !(m >= T::zero()) || !m.is_finite() {
            return Err(GaugeError::InvalidParameter(
                "mass m must be finite and nonnegative".into(),
            ));
        }
        Ok(GaugeConfig {
            a,
            b,
            m,
            bar,
            b_field,
        })
    }

    /// Defaults: `a = 1`, `b = sqrt(fine structure)`, no photon field, the
    /// `gamma^5` pairing.
    pub fn minimal(m: T) -> Result<Self, GaugeError> {
        Self::new(
            T::one(),
            real(SQRT_FINE_STRUCTURE),
            m,
            BarConvention::Gamma5Conjugate,
            BField::zero(),
        )
    }
}

/// Spinor partial derivative plus the boundary flag of sampled sections.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorPartial<T: Real> {
    pub value: SpinorValue<T>,
    pub one_sided: bool,
}

/// Spinor-valued section over spacetime.
pub trait SpinorSection<T: Real> {
    fn value_at(&self, y: &Point<T>) -> SpinorValue<T>;
    fn partial_at(&self, y: &Point<T>, mu: Axis) -> SpinorPartial<T>;
}

/// Spinor whose components are closed-form expressions; derivatives are
/// exact.
#[derive(Debug, Clone)]
pub struct AnalyticSpinor<T: Real> {
    comps: [ComplexExpr<T>; 4],
}

impl<T: Real> AnalyticSpinor<T> {
    pub fn new(comps: [ComplexExpr<T>; 4]) -> Self {
        AnalyticSpinor { comps }
    }

    /// Parses four `(re, im)` component pairs.
    pub fn parse(sources: &[(String, String); 4]) -> Result<Self, ParseError> {
        let mut comps = Vec::with_capacity(4);
        for (re, im) in sources {
            comps.push(ComplexExpr::parse(re, im, &COORD_VARS)?);
        }
        Ok(AnalyticSpinor {
            comps: [
                comps.remove(0),
                comps.remove(0),
                comps.remove(0),
                comps.remove(0),
            ],
        })
    }

    pub fn component(&self, k: usize) -> &ComplexExpr<T> {
        &self.comps[k]
    }

    /// The spinor multiplied by the unit phase `exp(i theta)`, built
    /// symbolically.
    pub fn phase_rotated(&self, theta: &Expr<T>) -> Self {
        AnalyticSpinor {
            comps: [
                self.comps[0].phase_rotated(theta),
                self.comps[1].phase_rotated(theta),
                self.comps[2].phase_rotated(theta),
                self.comps[3].phase_rotated(theta),
            ],
        }
    }
}

impl<T: Real> SpinorSection<T> for AnalyticSpinor<T> {
    fn value_at(&self, y: &Point<T>) -> SpinorValue<T> {
        let c = y.coords();
        Vector4::new(
            self.comps[0].value(&c),
            self.comps[1].value(&c),
            self.comps[2].value(&c),
            self.comps[3].value(&c),
        )
    }

    fn partial_at(&self, y: &Point<T>, mu: Axis) -> SpinorPartial<T> {
        let c = y.coords();
        let v = mu.index();
        SpinorPartial {
            value: Vector4::new(
                self.comps[0].partial(v, &c),
                self.comps[1].partial(v, &c),
                self.comps[2].partial(v, &c),
                self.comps[3].partial(v, &c),
            ),
            one_sided: false,
        }
    }
}

/// Spinor section given by samples on a grid; derivatives are central in
/// the interior and one-sided (flagged) on the boundary.
#[derive(Debug, Clone)]
pub struct SampledSpinor<T: Real> {
    grid: Grid<T>,
    values: Vec<SpinorValue<T>>,
}

impl<T: Real> SampledSpinor<T> {
    pub fn from_fn(
        grid: Grid<T>,
        f: impl Fn(&Point<T>) -> SpinorValue<T>,
    ) -> Result<Self, crate::field::FieldError> {
        let mut values = Vec::with_capacity(grid.len());
        for p in grid.sample_points() {
            let v = f(&p);
            if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(crate::field::FieldError::NonFiniteSample);
            }
            values.push(v);
        }
        Ok(SampledSpinor { grid, values })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
}

impl<T: Real> SpinorSection<T> for SampledSpinor<T> {
    fn value_at(&self, y: &Point<T>) -> SpinorValue<T> {
        self.values[self.grid.flat_index(self.grid.nearest_index(y))]
    }

    fn partial_at(&self, y: &Point<T>, mu: Axis) -> SpinorPartial<T> {
        let axis = mu.index();
        if !self.grid.is_integrated(mu) {
            return SpinorPartial {
                value: Vector4::zeros(),
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
        let inv = Complex::new(T::one() / (h + h), T::zero());
        let inv1 = Complex::new(T::one() / h, T::zero());
        if i > 0 && i + 1 < n {
            SpinorPartial {
                value: (at(i + 1) - at(i - 1)) * inv,
                one_sided: false,
            }
        } else if i + 1 < n {
            SpinorPartial {
                value: (at(i + 1) - at(i)) * inv1,
                one_sided: true,
            }
        } else {
            SpinorPartial {
                value: (at(i) - at(i - 1)) * inv1,
                one_sided: true,
            }
        }
    }
}

/// Combined scaling plus phase transport factor across the step `h e_mu`:
/// `exp(alpha(y + h e_mu) - alpha(y)) * exp(i (phi(y + h e_mu) - phi(y)))`.
/// To first order in `h` this is `1 + h (A_mu + i d_mu phi)`.
pub fn combined_connection<T: Real>(
    spec: &FieldSpec<T>,
    phi: &Expr<T>,
    y: &Point<T>,
    mu: Axis,
    h: T,
) -> Complex<T> {
    let yh = y.offset(mu, h);
    let da = spec.alpha(&yh) - spec.alpha(y);
    let dphi = phi.eval(&yh.coords()) - phi.eval(&y.coords());
    Complex::from_polar(da.exp(), dphi)
}

/// The covariant derivative `D_mu psi = (d_mu + a A_mu + i b B_mu) psi`.
pub fn covariant_derivative<T: Real, S: SpinorSection<T>>(
    spec: &FieldSpec<T>,
    gauge: &GaugeConfig<T>,
    psi: &S,
    y: &Point<T>,
    mu: Axis,
) -> SpinorPartial<T> {
    let p = psi.partial_at(y, mu);
    let a_mu = spec.grad_alpha_at(y, mu);
    let b_mu = gauge.b_field.component(mu).eval(&y.coords());
    let factor = Complex::new(gauge.a * a_mu, gauge.b * b_mu);
    SpinorPartial {
        value: p.value + psi.value_at(y) * factor,
        one_sided: p.one_sided,
    }
}

/// Density value plus the boundary flag inherited from the section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density<T: Real> {
    pub value: Complex<T>,
    pub one_sided: bool,
}

/// The scaled U(1) Dirac Lagrangian density at `y`:
/// `bar(psi) i gamma^mu D_mu psi - m bar(psi) psi`.
pub fn lagrangian_density<T: Real, S: SpinorSection<T>>(
    spec: &FieldSpec<T>,
    gauge: &GaugeConfig<T>,
    gammas: &GammaSet<T>,
    psi: &S,
    y: &Point<T>,
) -> Density<T> {
    let bar = dirac_bar(gammas, gauge.bar, &psi.value_at(y));
    let i = Complex::new(T::zero(), T::one());
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut one_sided = false;
    for mu in Axis::ALL {
        let d = covariant_derivative(spec, gauge, psi, y, mu);
        one_sided |= d.one_sided;
        acc += bar.dot(&(gammas.gamma(mu) * d.value)) * i;
    }
    let mass_term = bar.dot(&psi.value_at(y)) * Complex::new(gauge.m, T::zero());
    Density {
        value: acc - mass_term,
        one_sided,
    }
}

/// Applies the local phase rotation `psi -> exp(i theta) psi` and the
/// matching photon shift `B -> B - (1/b) grad theta`. The scaling field is
/// not part of the transformation; its drag `A` is returned untouched by
/// construction since nothing here can write to it.
pub fn gauge_transform<T: Real>(
    psi: &AnalyticSpinor<T>,
    gauge: &GaugeConfig<T>,
    theta: &Expr<T>,
) -> Result<(AnalyticSpinor<T>, BField<T>), GaugeError> {
    if gauge.b.is_zero() {
        return Err(GaugeError::ZeroCoupling);
    }
    Ok((
        psi.phase_rotated(theta),
        gauge.b_field.transformed(theta, gauge.b),
    ))
}
