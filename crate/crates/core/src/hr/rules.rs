//! Product and chain rules for the restricted HR operators, and the
//! reduction used for real-valued cost functions.

use crate::error::{Error, Result};
use crate::hr::gradient::{hr_from_real, left_from_real, right_from_real, HRGradient, RealGradient, Side};
use crate::hr::jacobian::{JacobianJ, QuatMatrix};
use crate::quaternion::{AxisUnit, Quaternion};

/// Relative tolerance of the real-valued symmetry test `d_ν = (d_1)^ν`.
pub const REAL_VALUED_TOLERANCE: f64 = 1e-10;

/// `∇_q(fg) = f ∇_q g + [(∇_r f) g] Jᴴ`.
pub fn product_rule_first(
    f_val: Quaternion,
    f_grad: &RealGradient,
    g_val: Quaternion,
    g_left: &HRGradient,
) -> Result<HRGradient> {
    g_left.expect_side(Side::Left)?;
    let correction = left_from_real(&f_grad.map(|df| df * g_val));
    let partials = std::array::from_fn(|nu| f_val * g_left.partials[nu] + correction.partials[nu]);
    Ok(HRGradient::new(partials, Side::Left))
}

/// `[∇ᴿ_q(fg)]ᵀ = [(∇ᴿ_q f) g]ᵀ + J*[f (∇_r g)ᵀ]`.
pub fn product_rule_first_right(
    f_right: &HRGradient,
    g_val: Quaternion,
    f_val: Quaternion,
    g_grad: &RealGradient,
) -> Result<HRGradient> {
    f_right.expect_side(Side::Right)?;
    let correction = right_from_real(&g_grad.map(|dg| f_val * dg));
    let partials = std::array::from_fn(|nu| f_right.partials[nu] * g_val + correction.partials[nu]);
    Ok(HRGradient::new(partials, Side::Right))
}

/// `M_{μν} = ∂g^μ/∂q^ν` for the given side, from the real gradient of `g`.
pub fn involution_chain_matrix(g_grad: &RealGradient, side: Side) -> QuatMatrix {
    QuatMatrix(AxisUnit::ALL.map(|mu| {
        hr_from_real(&g_grad.map(|p| p.involution(mu)), side).partials
    }))
}

/// `O_{φν} = ∂g_φ/∂q^ν`; each `g_φ` is real-valued so the side does not matter.
pub fn component_chain_matrix(g_grad: &RealGradient) -> QuatMatrix {
    let p = g_grad.component_matrix();
    QuatMatrix(p.map(|row| {
        left_from_real(&RealGradient { partials: row.map(Quaternion::real) }).partials
    }))
}

/// `4 J P Jᴴ` for a real component-Jacobian `P_{φβ} = ∂g_φ/∂q_β`.
pub fn chain_matrix_from_components(p: &[[f64; 4]; 4]) -> QuatMatrix {
    let j = JacobianJ::new().to_matrix();
    let jh = j.hermitian();
    (j * QuatMatrix::from_real(p) * jh).scale(4.0)
}

/// First chain rule: `∂f/∂q^ν = Σ_μ (∂f/∂g^μ)(∂g^μ/∂q^ν)`; the right operator
/// takes the factors in the opposite order.
///
/// `outer` holds the HR partials of `f` with respect to `(g, g^i, g^j, g^k)`
/// and `m` comes from [`involution_chain_matrix`] for the same side.
pub fn chain_rule_first(outer: &HRGradient, m: &QuatMatrix) -> HRGradient {
    let partials = std::array::from_fn(|nu| {
        (0..4)
            .map(|mu| match outer.side {
                Side::Left => outer.partials[mu] * m.0[mu][nu],
                Side::Right => m.0[mu][nu] * outer.partials[mu],
            })
            .sum()
    });
    HRGradient::new(partials, outer.side)
}

/// Second chain rule: `∂f/∂q^ν = Σ_φ (∂f/∂g_φ)(∂g_φ/∂q^ν)`.
pub fn chain_rule_second(outer_real: &RealGradient, o: &QuatMatrix, side: Side) -> HRGradient {
    let partials = std::array::from_fn(|nu| {
        (0..4)
            .map(|phi| match side {
                Side::Left => outer_real.partials[phi] * o.0[phi][nu],
                Side::Right => o.0[phi][nu] * outer_real.partials[phi],
            })
            .sum()
    });
    HRGradient::new(partials, side)
}

fn check_real_valued(h: &HRGradient) -> Result<()> {
    let residue = h.real_valued_residue();
    let tolerance = REAL_VALUED_TOLERANCE * h.d1().norm().max(1.0);
    if residue > tolerance {
        Err(Error::NotRealValued { residue, tolerance })
    } else {
        Ok(())
    }
}

/// Third chain rule for a real-valued intermediate `g`:
/// `∂f/∂q^ν = (∂f/∂g)(∂g/∂q^ν)` on the left, reversed on the right.
pub fn chain_rule_third(dfdg: Quaternion, g_hr: &HRGradient) -> Result<HRGradient> {
    check_real_valued(g_hr)?;
    let partials = g_hr.partials.map(|dg| match g_hr.side {
        Side::Left => dfdg * dg,
        Side::Right => dg * dfdg,
    });
    Ok(HRGradient::new(partials, g_hr.side))
}

/// For a real-valued `f` only `∂f/∂q` is independent; returns it.
///
/// The increment is then `df = 4 R((∂f/∂q) dq)` and the steepest descent
/// direction is [`steepest_descent`] of the returned value.
pub fn real_valued_reduce(h: &HRGradient) -> Result<Quaternion> {
    check_real_valued(h)?;
    Ok(h.d1())
}

/// `−(∂f/∂q)*`.
pub fn steepest_descent(d1: Quaternion) -> Quaternion {
    -d1.conj()
}

/// `4 R(d1 · dq)`.
pub fn real_valued_increment(d1: Quaternion, dq: Quaternion) -> f64 {
    4.0 * (d1 * dq).a
}
