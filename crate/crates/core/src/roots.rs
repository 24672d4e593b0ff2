//! Closed-form real roots of cubic and quartic polynomials.

use std::f64::consts::PI;

fn newton_polish(coeffs: &[f64], mut x: f64) -> f64 {
    // coeffs are highest degree first
    for _ in 0..4 {
        let (mut p, mut dp) = (0.0, 0.0);
        for &c in coeffs {
            dp = dp * x + p;
            p = p * x + c;
        }
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let next = x - p / dp;
        if !next.is_finite() {
            break;
        }
        x = next;
    }
    x
}

/// Real roots of `a x^3 + b x^2 + c x + d`, ascending. `a` must be nonzero.
pub fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let (b, c, d) = (b / a, c / a, d / a);
    // x = y - b/3 gives y^3 + p y + q
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut roots = if p.abs() < 1e-300 {
        vec![(-q).cbrt()]
    } else if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt()]
    } else {
        // three real roots (some possibly repeated)
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3).map(|k| m * (phi - 2.0 * PI * k as f64 / 3.0).cos()).collect()
    };
    let coeffs = [1.0, b, c, d];
    for r in roots.iter_mut() {
        *r = newton_polish(&coeffs, *r - shift);
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn quadratic_real_roots(b: f64, c: f64, out: &mut Vec<f64>) {
    // x^2 + b x + c
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        return;
    }
    let s = disc.sqrt();
    let q = -0.5 * (b + b.signum() * s);
    if q != 0.0 {
        out.push(q);
        out.push(c / q);
    } else {
        out.push(-b / 2.0);
    }
}

/// Real roots of `a x^4 + b x^3 + c x^2 + d x + e` by Ferrari's method,
/// ascending. `a` must be nonzero.
pub fn quartic_real_roots(a: f64, b: f64, c: f64, d: f64, e: f64) -> Vec<f64> {
    let (b, c, d, e) = (b / a, c / a, d / a, e / a);
    // x = y - b/4 gives y^4 + p y^2 + q y + r
    let shift = b / 4.0;
    let p = c - 3.0 * b * b / 8.0;
    let q = d - b * c / 2.0 + b * b * b / 8.0;
    let r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b.powi(4) / 256.0;
    let scale = 1.0 + p.abs() + q.abs() + r.abs();

    let mut ys = Vec::with_capacity(4);
    if q.abs() <= 1e-14 * scale {
        // biquadratic in y^2
        let mut zs = Vec::new();
        quadratic_real_roots(p, r, &mut zs);
        for z in zs {
            if z >= 0.0 {
                ys.push(z.sqrt());
                ys.push(-z.sqrt());
            }
        }
    } else {
        // resolvent cubic m^3 + p m^2 + (p^2/4 - r) m - q^2/8; it has a
        // positive root whenever q != 0
        let m = cubic_real_roots(1.0, p, p * p / 4.0 - r, -q * q / 8.0)
            .into_iter()
            .filter(|m| *m > 0.0)
            .fold(f64::NAN, f64::max);
        if m.is_nan() {
            return Vec::new();
        }
        let s = (2.0 * m).sqrt();
        quadratic_real_roots(s, p / 2.0 + m - q / (2.0 * s), &mut ys);
        quadratic_real_roots(-s, p / 2.0 + m + q / (2.0 * s), &mut ys);
    }
    let coeffs = [1.0, b, c, d, e];
    let mut roots: Vec<f64> = ys.into_iter().map(|y| newton_polish(&coeffs, y - shift)).collect();
    roots.sort_by(f64::total_cmp);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9 * (1.0 + y.abs()))
    }

    #[test]
    fn cubic_three_real() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        assert!(close(&cubic_real_roots(1.0, 0.0, -7.0, 6.0), &[-3.0, 1.0, 2.0]));
    }

    #[test]
    fn cubic_one_real() {
        // (x - 2)(x^2 + 1)
        assert!(close(&cubic_real_roots(2.0, -4.0, 2.0, -4.0), &[2.0]));
    }

    #[test]
    fn quartic_four_real() {
        // (x-1)(x-2)(x-3)(x+4) = x^4 - 2x^3 - 13x^2 + 38x - 24
        let r = quartic_real_roots(1.0, -2.0, -13.0, 38.0, -24.0);
        assert!(close(&r, &[-4.0, 1.0, 2.0, 3.0]), "{r:?}");
    }

    #[test]
    fn quartic_two_real() {
        // (x^2 + 1)(x - 0.5)(x - 7)
        let r = quartic_real_roots(3.0, -22.5, 13.5, -22.5, 10.5);
        assert!(close(&r, &[0.5, 7.0]), "{r:?}");
    }

    #[test]
    fn quartic_biquadratic() {
        // (x^2 - 4)(x^2 - 9)
        let r = quartic_real_roots(1.0, 0.0, -13.0, 0.0, 36.0);
        assert!(close(&r, &[-3.0, -2.0, 2.0, 3.0]), "{r:?}");
    }

    #[test]
    fn quartic_no_real() {
        assert!(quartic_real_roots(1.0, 0.0, 2.0, 0.0, 5.0).is_empty());
    }
}
