//! Bessel functions of the first kind for the sideband-coupling math.
//!
//! Two complementary algorithms cover the modulation-index window |x| <= 30
//! to better than 1e-12: the ascending power series for |x| <= 12 (where its
//! alternating-term cancellation stays below a digit or two) and Miller's
//! downward recurrence, normalized by J0 + 2*sum J_{2k} = 1, for larger
//! arguments at any order.

use super::DynamicsError;

/// Largest |x| accepted by [`bessel_j`].
pub const BESSEL_MAX_ARG: f64 = 30.0;

/// J_n(x) for integer order n >= 0 and |x| <= 30, accurate to ~1e-13.
pub fn bessel_j(order: u32, x: f64) -> Result<f64, DynamicsError> {
    if !x.is_finite() || x.abs() > BESSEL_MAX_ARG {
        return Err(DynamicsError::BesselOutOfRange { x });
    }
    // J_n(-x) = (-1)^n J_n(x)
    let sign = if x < 0.0 && order % 2 == 1 { -1.0 } else { 1.0 };
    let x = x.abs();
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let value = if x <= 12.0 { ascending_series(order, x) } else { miller_downward(order, x) };
    Ok(sign * value)
}

/// Ascending power series with term-ratio truncation at 1e-16.
fn ascending_series(order: u32, x: f64) -> f64 {
    let half = x / 2.0;
    // leading term (x/2)^n / n!, built as a running product to avoid overflow
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
        if term == 0.0 {
            return 0.0; // underflow: the function value is below f64 resolution
        }
    }
    let mut sum = term;
    let mut m = 0u32;
    loop {
        m += 1;
        term *= -(half * half) / (m as f64 * (order as f64 + m as f64));
        sum += term;
        if term.abs() <= 1e-16 * sum.abs() || m > 400 {
            return sum;
        }
    }
}

/// Miller's algorithm: downward recurrence from a start order well above
/// both n and x, normalized with J0(x) + 2*sum_{k>=1} J_{2k}(x) = 1.
fn miller_downward(order: u32, x: f64) -> f64 {
    let start = (order.max(x.ceil() as u32) + 18 + (x as u32) / 2) | 1; // odd start
    let mut jp = 0.0f64; // J_{k+1}
    let mut j = 1e-30f64; // J_k (arbitrary scale)
    let mut result = 0.0f64;
    let mut norm = 0.0f64; // accumulates J0 + 2*sum J_{2k}
    for k in (0..=start).rev() {
        let jm = (2.0 * (k as f64 + 1.0) / x) * j - jp;
        jp = j;
        j = jm;
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
        if k == order {
            result = j;
        }
        if j.abs() > 1e250 {
            jp /= 1e250;
            j /= 1e250;
            norm /= 1e250;
            result /= 1e250;
        }
    }
    result / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// Quadrature oracle: J_n(x) = (1/pi) ∫_0^pi cos(n t - x sin t) dt,
    /// composite Simpson with 2^14 panels (~1e-15 for these arguments).
    fn bessel_oracle(order: u32, x: f64) -> f64 {
        let panels = 1usize << 14;
        let h = std::f64::consts::PI / panels as f64;
        let f = |t: f64| (order as f64 * t - x * t.sin()).cos();
        let mut sum = f(0.0) + f(std::f64::consts::PI);
        for k in 1..panels {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(k as f64 * h);
        }
        sum * h / (3.0 * std::f64::consts::PI)
    }

    #[test]
    fn reference_values() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        // frozen from a 40-digit mpmath evaluation
        assert!((bessel_j(1, 1.0).unwrap() - 0.44005058574493351596).abs() < 1e-13);
        assert!((bessel_j(2, 1.0).unwrap() - 0.11490348493190048047).abs() < 1e-13);
        assert!((bessel_j(0, 30.0).unwrap() - -0.086367983581040211336).abs() < 1e-13);
        assert!((bessel_j(3, 25.0).unwrap() - 0.10834308106150889528).abs() < 1e-13);
        assert!((bessel_j(5, 12.0).unwrap() - -0.073470963101658581266).abs() < 1e-13);
    }

    #[test]
    fn odd_orders_are_odd_functions() {
        assert_eq!(bessel_j(1, -1.0).unwrap(), -bessel_j(1, 1.0).unwrap());
        assert_eq!(bessel_j(2, -1.0).unwrap(), bessel_j(2, 1.0).unwrap());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(bessel_j(0, 30.5).is_err());
        assert!(bessel_j(0, f64::NAN).is_err());
        assert!(bessel_j(0, 30.0).is_ok());
    }

    #[test]
    fn matches_quadrature_oracle_across_domain() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..400 {
            let order = rng.random_range(0..=40u32);
            let x = (rng.random::<f64>() * 2.0 - 1.0) * 30.0;
            let got = bessel_j(order, x).unwrap();
            let want = {
                let v = bessel_oracle(order, x.abs());
                if x < 0.0 && order % 2 == 1 {
                    -v
                } else {
                    v
                }
            };
            assert!((got - want).abs() < 1e-12, "J_{order}({x}): {got} vs {want}");
        }
        // dense sweep of the low orders that drive the sideband couplings
        for order in 0..=4u32 {
            for k in 0..=300 {
                let x = k as f64 * 0.1;
                let got = bessel_j(order, x).unwrap();
                let want = bessel_oracle(order, x);
                assert!((got - want).abs() < 1e-12, "J_{order}({x}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn high_order_underflows_to_zero() {
        assert_eq!(bessel_j(400, 1.0).unwrap(), 0.0);
    }
}
