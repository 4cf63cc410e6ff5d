//! Reference values computed without the discretization or LAPACK paths
//! they are used to check.

use num_complex::Complex64;

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;

/// `Ai(x)` and `Ai'(x)` from the Maclaurin series; accurate to ~1e-12 for
/// `|x| <= 8`.
pub fn airy_ai(x: f64) -> (f64, f64) {
    // f = sum a_k x^{3k}, g = sum b_k x^{3k+1}, Ai = Ai(0) f + Ai'(0) g
    let x3 = x * x * x;
    let (mut f, mut fp, mut g, mut gp) = (0.0, 0.0, 0.0, 0.0);
    let mut a = 1.0;
    let mut b = 1.0;
    let mut xp = 1.0; // x^{3k}
    for k in 0..200 {
        let kf = k as f64;
        f += a * xp;
        if k > 0 {
            fp += a * 3.0 * kf * xp / x;
        }
        g += b * xp * x;
        gp += b * (3.0 * kf + 1.0) * xp;
        // a_{k+1} = a_k / ((3k+2)(3k+3)), b_{k+1} = b_k / ((3k+3)(3k+4))
        a /= (3.0 * kf + 2.0) * (3.0 * kf + 3.0);
        b /= (3.0 * kf + 3.0) * (3.0 * kf + 4.0);
        xp *= x3;
        if (a * xp).abs() < 1e-30 && (b * xp * x).abs() < 1e-30 {
            break;
        }
    }
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

/// First `count` zeros of `Ai`, by Newton from the asymptotic guesses.
pub fn airy_zeros(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| {
            let t = 3.0 * std::f64::consts::PI * (4.0 * k as f64 - 1.0) / 8.0;
            let mut x = -t.powf(2.0 / 3.0);
            for _ in 0..50 {
                let (v, d) = airy_ai(x);
                let step = v / d;
                x -= step;
                if step.abs() < 1e-15 * x.abs() {
                    break;
                }
            }
            x
        })
        .collect()
}

/// Integrates `psi'' = (i x^3 - e) psi` by RK4 from `x0` to 0, starting
/// from the decaying WKB branch; returns `(psi(0), psi'(0))`.
fn shoot_cubic(e: Complex64, x0: f64, steps: usize) -> (Complex64, Complex64) {
    let q = |x: f64| Complex64::new(0.0, x * x * x) - e;
    let mut s = q(x0).sqrt();
    if s.re < 0.0 {
        s = -s;
    }
    // decaying away from the origin on either side
    let mut y = Complex64::new(1.0, 0.0);
    let mut yp = if x0 > 0.0 { -s } else { s };
    let h = -x0 / steps as f64;
    let mut x = x0;
    let rhs = |x: f64, y: Complex64, yp: Complex64| (yp, q(x) * y);
    for _ in 0..steps {
        let (k1, l1) = rhs(x, y, yp);
        let (k2, l2) = rhs(x + 0.5 * h, y + k1 * (0.5 * h), yp + l1 * (0.5 * h));
        let (k3, l3) = rhs(x + 0.5 * h, y + k2 * (0.5 * h), yp + l2 * (0.5 * h));
        let (k4, l4) = rhs(x + h, y + k3 * h, yp + l3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        yp += (l1 + l2 * 2.0 + l3 * 2.0 + l4) * (h / 6.0);
        x += h;
        // keep magnitudes bounded; only the ratio matters
        let n = y.norm().max(yp.norm());
        if n > 1e100 {
            y /= n;
            yp /= n;
        }
    }
    (y, yp)
}

fn cubic_mismatch(e: Complex64) -> Complex64 {
    let (yl, ypl) = shoot_cubic(e, -6.0, 30_000);
    let (yr, ypr) = shoot_cubic(e, 6.0, 30_000);
    // scale-free Wronskian
    (ypr * yl - ypl * yr) / (yl.norm() * yr.norm())
}

/// Ground state of `-d^2/dx^2 + i x^3` on the line, by shooting and secant.
pub fn cubic_ground_state() -> Complex64 {
    let mut e0 = Complex64::new(1.0, 0.0);
    let mut e1 = Complex64::new(1.3, 0.0);
    let mut f0 = cubic_mismatch(e0);
    let mut f1 = cubic_mismatch(e1);
    for _ in 0..60 {
        let e2 = e1 - f1 * (e1 - e0) / (f1 - f0);
        if (e2 - e1).norm() < 1e-13 {
            return e2;
        }
        e0 = e1;
        f0 = f1;
        e1 = e2;
        f1 = cubic_mismatch(e1);
    }
    e1
}

/// `int_a^b f` by tanh-sinh, refined until successive levels agree.
fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let pi2 = std::f64::consts::FRAC_PI_2;
    let mut h = 0.5;
    let mut prev = f64::NAN;
    for _ in 0..12 {
        let mut s = 0.0;
        let kmax = (6.0 / h) as i64;
        for k in -kmax..=kmax {
            let t = k as f64 * h;
            let u = pi2 * t.sinh();
            let w = pi2 * t.cosh() / u.cosh().powi(2);
            let x = u.tanh();
            // distance to the nearer endpoint, kept exact near the ends
            let d = 1.0 / (u.abs().exp() * u.cosh());
            let xx = if x > 0.0 { b - half * d } else { a + half * d };
            let v = f(xx);
            if v.is_finite() {
                s += w * v;
            }
        }
        let est = s * h * half;
        if (est - prev).abs() <= 1e-13 * est.abs() {
            return est;
        }
        prev = est;
        h *= 0.5;
    }
    prev
}

/// `int_{R^d} (1 + |xi|^2)^{-p} d xi` for `d` in {1, 2}, with `xi = tan theta`.
pub fn xi_integral_numeric(p: f64, d: usize) -> f64 {
    let surface = match d {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => panic!("only d = 1, 2"),
    };
    let dd = d as f64;
    surface
        * tanh_sinh(
            |t| t.sin().powf(dd - 1.0) * t.cos().powf(2.0 * p - dd - 1.0),
            0.0,
            std::f64::consts::FRAC_PI_2,
        )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_values() {
        let z = airy_zeros(3);
        assert!((z[0] + 2.338_107_410_459_767).abs() < 1e-10);
        assert!((z[1] + 4.087_949_444_130_97).abs() < 1e-10);
        assert!((z[2] + 5.520_559_828_095_551).abs() < 1e-9);
    }

    #[test]
    fn cubic_oracle() {
        let e = cubic_ground_state();
        assert!((e.re - 1.156_267_071_988_1).abs() < 1e-8, "{e}");
        assert!(e.im.abs() < 1e-8);
    }

    #[test]
    fn xi_closed_cases() {
        // d = 1, p = 1: pi; d = 2, p = 2: pi
        assert!((xi_integral_numeric(1.0, 1) - std::f64::consts::PI).abs() < 1e-12);
        assert!((xi_integral_numeric(2.0, 2) - std::f64::consts::PI).abs() < 1e-12);
    }
}
