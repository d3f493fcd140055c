//! Scaled number structures and the maps between them.
//!
//! Every nonzero scalar `t` labels a structure in which a base-set element
//! `b` has value `b / t`. Inside one structure the value axioms are the
//! ordinary field axioms, which forces the compensating factors on the base
//! representation:
//!
//! ```text
//! add: base_x + base_y          (values add)
//! mul: base_x * base_y / t      (values multiply)
//! div: t * base_x / base_y      (values divide)
//! ```
//!
//! The multiplicative identity of the structure with factor `t` is the base
//! element `t` itself, and `0` is the one number shared by all structures.
//!
//! Two families of maps connect structures with factors `t` and `t*s`:
//!
//! * [`ScaledNumber::w_map`] rescales the base by `s`, preserving the value
//!   (number changing, value preserving);
//! * [`ScaledNumber::z_map`] keeps the base, so the value picks up `1/s`
//!   (number preserving, value changing).
//!
//! Both families compose as a commutative group in the map parameter. A
//! negative real parameter reverses the order relation of a real structure;
//! the `order_reversed` flag tracks the parity of such maps.

use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithmeticError {
    #[error("degenerate structure: the scaling factor must be nonzero")]
    DegenerateScale,
    #[error("structure mismatch: operand lives in {found}, expected {expected}")]
    StructureMismatch { expected: String, found: String },
    #[error("division by a number of value zero")]
    DivisionByZero,
    #[error("dimension mismatch: {left} components vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("0 is the same number in every structure and has no divisor table")]
    ZeroHasNoTable,
}

/// Label of one scaled structure: the scaling factor plus the parity of
/// order-reversing maps that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTag<S: Scalar> {
    scale: S,
    order_reversed: bool,
}

impl<S: Scalar> std::fmt::Display for StructureTag<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.order_reversed {
            write!(f, "structure[{}, order reversed]", self.scale)
        } else {
            write!(f, "structure[{}]", self.scale)
        }
    }
}

impl<S: Scalar> StructureTag<S> {
    /// Structure with the given nonzero scaling factor and natural order.
    pub fn new(scale: S) -> Result<Self, ArithmeticError> {
        if scale.is_zero() {
            return Err(ArithmeticError::DegenerateScale);
        }
        Ok(StructureTag {
            scale,
            order_reversed: false,
        })
    }

    /// The ordinary structure: factor one, numbers equal their values.
    pub fn diophantine() -> Self {
        StructureTag {
            scale: S::one(),
            order_reversed: false,
        }
    }

    pub fn scale(&self) -> &S {
        &self.scale
    }

    pub fn order_reversed(&self) -> bool {
        self.order_reversed
    }

    /// Tag of the structure reached by a map with parameter `s`.
    fn mapped(&self, s: &S) -> Result<Self, ArithmeticError> {
        if s.is_zero() {
            return Err(ArithmeticError::DegenerateScale);
        }
        Ok(StructureTag {
            scale: self.scale.clone() * s.clone(),
            order_reversed: self.order_reversed ^ s.flips_order(),
        })
    }

    /// The number of this structure with the given value.
    pub fn number(&self, value: S) -> ScaledNumber<S> {
        ScaledNumber {
            base: value * self.scale.clone(),
            tag: self.clone(),
        }
    }

    /// The number of this structure with the given base-set element.
    pub fn from_base(&self, base: S) -> ScaledNumber<S> {
        ScaledNumber {
            base,
            tag: self.clone(),
        }
    }

    /// 0, the number every structure shares.
    pub fn zero(&self) -> ScaledNumber<S> {
        self.from_base(S::zero())
    }

    /// The multiplicative identity: base equal to the scaling factor.
    pub fn one(&self) -> ScaledNumber<S> {
        self.from_base(self.scale.clone())
    }

    fn check(&self, n: &ScaledNumber<S>) -> Result<(), ArithmeticError> {
        if &n.tag == self {
            Ok(())
        } else {
            Err(ArithmeticError::StructureMismatch {
                expected: self.to_string(),
                found: n.tag.to_string(),
            })
        }
    }

    pub fn add(
        &self,
        x: &ScaledNumber<S>,
        y: &ScaledNumber<S>,
    ) -> Result<ScaledNumber<S>, ArithmeticError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.from_base(x.base.clone() + y.base.clone()))
    }

    pub fn sub(
        &self,
        x: &ScaledNumber<S>,
        y: &ScaledNumber<S>,
    ) -> Result<ScaledNumber<S>, ArithmeticError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.from_base(x.base.clone() - y.base.clone()))
    }

    pub fn neg(&self, x: &ScaledNumber<S>) -> Result<ScaledNumber<S>, ArithmeticError> {
        self.check(x)?;
        Ok(self.from_base(-x.base.clone()))
    }

    /// Scaled product: values multiply, so the base carries `1/scale`.
    pub fn mul(
        &self,
        x: &ScaledNumber<S>,
        y: &ScaledNumber<S>,
    ) -> Result<ScaledNumber<S>, ArithmeticError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.from_base(x.base.clone() * y.base.clone() / self.scale.clone()))
    }

    /// Scaled quotient: values divide, so the base carries `scale`.
    pub fn div(
        &self,
        x: &ScaledNumber<S>,
        y: &ScaledNumber<S>,
    ) -> Result<ScaledNumber<S>, ArithmeticError> {
        self.check(x)?;
        self.check(y)?;
        if y.base.is_zero() {
            return Err(ArithmeticError::DivisionByZero);
        }
        Ok(self.from_base(self.scale.clone() * x.base.clone() / y.base.clone()))
    }

    /// Conjugation inside this structure: the result is the number whose
    /// value is the conjugate of the operand's value. For complex scaling
    /// factors this does not commute with `z_map` transport; the two orders
    /// differ by `conjugate(ratio) / ratio` of the scale ratio.
    pub fn conj(&self, x: &ScaledNumber<S>) -> Result<ScaledNumber<S>, ArithmeticError> {
        self.check(x)?;
        Ok(self.number(x.value().conjugate()))
    }
}

impl<S: Scalar + PartialOrd> StructureTag<S> {
    /// Order relation on values, reversed when the structure was produced by
    /// an odd number of negative maps.
    pub fn lt(&self, x: &ScaledNumber<S>, y: &ScaledNumber<S>) -> Result<bool, ArithmeticError> {
        self.check(x)?;
        self.check(y)?;
        let forward = x.value() < y.value();
        Ok(if self.order_reversed {
            y.value() < x.value()
        } else {
            forward
        })
    }
}

/// A base-set element together with the structure it currently lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledNumber<S: Scalar> {
    base: S,
    tag: StructureTag<S>,
}

impl<S: Scalar> std::fmt::Display for ScaledNumber<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_{{{}}}", self.value(), self.tag.scale)
    }
}

impl<S: Scalar> ScaledNumber<S> {
    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn tag(&self) -> &StructureTag<S> {
        &self.tag
    }

    /// Value in the structure the number lives in: `base / scale`.
    pub fn value(&self) -> S {
        self.base.clone() / self.tag.scale.clone()
    }

    /// Value the same base-set element would have in another structure.
    pub fn value_in(&self, other: &StructureTag<S>) -> S {
        self.base.clone() / other.scale.clone()
    }

    /// Number changing, value preserving map into the structure with factor
    /// `scale * s`: the base is rescaled by `s` so the value is unchanged.
    pub fn w_map(&self, s: &S) -> Result<Self, ArithmeticError> {
        let tag = self.tag.mapped(s)?;
        Ok(ScaledNumber {
            base: self.base.clone() * s.clone(),
            tag,
        })
    }

    /// Number preserving, value changing map into the structure with factor
    /// `scale * s`: the base is untouched so the value becomes `value / s`.
    pub fn z_map(&self, s: &S) -> Result<Self, ArithmeticError> {
        let tag = self.tag.mapped(s)?;
        Ok(ScaledNumber {
            base: self.base.clone(),
            tag,
        })
    }
}

/// One row of the natural-number divisor table: the value a natural number
/// takes in the scaled subset where it lies, and that subset's index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NaturalValueEntry {
    pub value: u64,
    pub subset_index: u64,
}

/// All values a natural number `n >= 1` takes across the scaled copies of
/// the naturals: one entry `(n / d, d)` per divisor `d` of `n`, in ascending
/// subset order. `n = 0` is rejected; 0 has value 0 in every subset.
pub fn natural_value_table(n: u64) -> Result<Vec<NaturalValueEntry>, ArithmeticError> {
    if n == 0 {
        return Err(ArithmeticError::ZeroHasNoTable);
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    let divisors = small.into_iter().chain(large.into_iter().rev());
    Ok(divisors
        .map(|d| NaturalValueEntry {
            value: n / d,
            subset_index: d,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    type C = Complex<f64>;

    fn tag(s: f64) -> StructureTag<f64> {
        StructureTag::new(s).unwrap()
    }

    #[test]
    fn value_table_of_thirty_lists_every_divisor_pair() {
        let table = natural_value_table(30).unwrap();
        let expect = [
            (30, 1),
            (15, 2),
            (10, 3),
            (6, 5),
            (5, 6),
            (3, 10),
            (2, 15),
            (1, 30),
        ];
        assert_eq!(table.len(), expect.len());
        for (row, (v, d)) in table.iter().zip(expect) {
            assert_eq!((row.value, row.subset_index), (v, d));
            assert_eq!(row.value * row.subset_index, 30);
        }
    }

    #[test]
    fn value_table_rejects_zero_and_handles_primes() {
        assert_eq!(
            natural_value_table(0).unwrap_err(),
            ArithmeticError::ZeroHasNoTable
        );
        let table = natural_value_table(7).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!((table[0].value, table[0].subset_index), (7, 1));
        assert_eq!((table[1].value, table[1].subset_index), (1, 7));
        assert_eq!(natural_value_table(1).unwrap().len(), 1);
    }

    #[test]
    fn zero_scale_is_rejected_everywhere() {
        assert!(StructureTag::new(0.0).is_err());
        let t = tag(2.0);
        assert_eq!(
            t.number(1.0).w_map(&0.0).unwrap_err(),
            ArithmeticError::DegenerateScale
        );
        assert_eq!(
            t.number(1.0).z_map(&0.0).unwrap_err(),
            ArithmeticError::DegenerateScale
        );
    }

    #[test]
    fn identity_has_base_equal_to_the_scale_and_zero_is_shared() {
        let t = tag(3.0);
        assert_eq!(*t.one().base(), 3.0);
        assert_eq!(t.one().value(), 1.0);
        assert_eq!(*t.zero().base(), 0.0);
        // 0 keeps value 0 under both maps.
        let z = t.zero().z_map(&5.0).unwrap();
        assert_eq!(z.value(), 0.0);
        let w = t.zero().w_map(&5.0).unwrap();
        assert_eq!(w.value(), 0.0);
    }

    #[test]
    fn addition_and_multiplication_follow_the_base_formulas() {
        // Values 3 and 5 in the structure with factor 2.
        let t = tag(2.0);
        let x = t.number(3.0);
        let y = t.number(5.0);
        let sum = t.add(&x, &y).unwrap();
        assert_eq!(sum.value(), 8.0);
        assert_eq!(*sum.base(), 16.0);
        let prod = t.mul(&x, &y).unwrap();
        assert_eq!(prod.value(), 15.0);
        assert_eq!(*prod.base(), 30.0);
        let quot = t.div(&x, &y).unwrap();
        assert_eq!(quot.value(), 0.6);
        let err = t.div(&x, &t.zero()).unwrap_err();
        assert_eq!(err, ArithmeticError::DivisionByZero);
    }

    #[test]
    fn mixed_structure_operands_are_rejected() {
        let t = tag(2.0);
        let u = tag(3.0);
        let err = t.add(&t.number(1.0), &u.number(1.0)).unwrap_err();
        assert!(matches!(err, ArithmeticError::StructureMismatch { .. }));
    }

    #[test]
    fn w_map_preserves_values_and_z_map_divides_them() {
        let t = tag(3.0);
        let n = t.number(10.0); // base 30
        let w = n.w_map(&2.0).unwrap();
        assert_eq!(*w.tag().scale(), 6.0);
        assert_eq!(w.value(), 10.0);
        assert_eq!(*w.base(), 60.0);
        let z = n.z_map(&2.0).unwrap();
        assert_eq!(*z.tag().scale(), 6.0);
        assert_eq!(*z.base(), 30.0);
        assert_eq!(z.value(), 5.0);
        // The natural-number table rows are z-images of one another.
        assert_eq!(n.value_in(&tag(30.0)), 1.0);
    }

    #[test]
    fn maps_compose_as_a_commutative_group() {
        let n = tag(2.0).number(7.0);
        let a = n.z_map(&3.0).unwrap().z_map(&5.0).unwrap();
        let b = n.z_map(&15.0).unwrap();
        assert_eq!(a, b);
        let c = n.z_map(&5.0).unwrap().z_map(&3.0).unwrap();
        assert_eq!(a, c);
        // Inverse parameter returns to the start.
        let back = a.z_map(&(1.0 / 15.0)).unwrap();
        assert!((back.value() - 7.0).abs() < 1e-14);
        assert_eq!(*back.base(), *n.base());
    }

    #[test]
    fn negative_map_parameters_toggle_the_order_flag() {
        let t = tag(2.0);
        let n = t.number(1.0).w_map(&-3.0).unwrap();
        assert!(n.tag().order_reversed());
        let again = n.w_map(&-1.0).unwrap();
        assert!(!again.tag().order_reversed());
        // Complex parameters never toggle it.
        let c = StructureTag::new(C::new(2.0, 0.0)).unwrap();
        let m = c.number(C::new(1.0, 1.0)).z_map(&C::new(0.0, 1.0)).unwrap();
        assert!(!m.tag().order_reversed());
    }

    #[test]
    fn order_reversal_flips_comparisons() {
        let t = tag(1.0);
        let r = t.number(1.0).w_map(&-1.0).unwrap().tag().clone();
        let two = r.number(2.0);
        let five = r.number(5.0);
        assert!(!r.lt(&two, &five).unwrap());
        assert!(r.lt(&five, &two).unwrap());
        // Natural order in an un-reversed structure.
        assert!(t.lt(&t.number(2.0), &t.number(5.0)).unwrap());
    }

    #[test]
    fn conjugation_does_not_commute_with_complex_transport() {
        // Move from the structure with factor 1 to factor i, conjugating
        // before and after; the results differ by conj(ratio)/ratio = -1.
        let d = StructureTag::new(C::new(1.0, 0.0)).unwrap();
        let e = StructureTag::new(C::new(0.0, 1.0)).unwrap();
        let s = C::new(0.0, 1.0); // e = d * s
        let x = d.number(C::new(0.7, -0.4));

        let conj_then_move = d.conj(&x).unwrap().z_map(&s).unwrap();
        let move_then_conj = e.conj(&x.z_map(&s).unwrap()).unwrap();
        let lhs = conj_then_move.value();
        let rhs = move_then_conj.value();
        assert!((lhs + rhs).norm() < 1e-15, "expected a relative factor -1");
        assert!((lhs - rhs).norm() > 1e-3);
    }

    #[test]
    fn mul_identity_survives_transport() {
        // The image of 1_t under a map is the identity of the image
        // structure for w_map; z_map sends it to value 1/s.
        let t = tag(4.0);
        let one = t.one();
        let w = one.w_map(&2.5).unwrap();
        assert_eq!(w.value(), 1.0);
        assert_eq!(*w.base(), 10.0);
        let z = one.z_map(&2.5).unwrap();
        assert_eq!(z.value(), 0.4);
        // Representing the product of t-structure values inside the image
        // structure: transport, multiply with the compensating factor, and
        // the result is the transport of the product.
        let u = tag(4.0 * 2.5);
        let x = t.number(3.0);
        let y = t.number(7.0);
        let prod_then_move = t.mul(&x, &y).unwrap().z_map(&2.5).unwrap();
        let moved = u
            .mul(&x.z_map(&2.5).unwrap(), &y.z_map(&2.5).unwrap())
            .unwrap();
        // mul in u gives value (3/2.5)*(7/2.5); scaling by s=2.5 recovers
        // the transported product.
        let fixed = u.number(moved.value() * 2.5);
        assert!((fixed.value() - prod_then_move.value()).abs() < 1e-12);
    }
}
