use core::f64::consts::{FRAC_PI_2, PI};

use super::SmoothingKernel;

/// The Fejér kernel `f(x) = 2 (1 - cos x) / x^2`, whose transform is the
/// triangle `max(0, 1 - |t|)` on `[-1, 1]`. Nonnegative, symmetric, mass `2 pi`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Fejer;

pub fn fejer_kernel() -> Fejer {
    Fejer
}

impl SmoothingKernel for Fejer {
    #[inline]
    fn f(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax < 1e-4 {
            let x2 = x * x;
            1.0 - x2 / 12.0 + x2 * x2 / 360.0
        } else {
            // 2 (1 - cos x) = 4 sin^2(x / 2), without the cancellation.
            let s = (0.5 * x).sin() / x;
            4.0 * s * s
        }
    }

    fn fhat(&self, t: f64) -> f64 {
        (1.0 - t.abs()).max(0.0)
    }

    fn support(&self) -> f64 {
        1.0
    }

    fn mass(&self) -> f64 {
        2.0 * PI
    }

    /// `int_0^u f = 2 Si(u) - 2 (1 - cos u) / u`.
    fn primitive(&self, u: f64) -> f64 {
        if u.abs() < 1e-4 {
            let u2 = u * u;
            return u * (1.0 - u2 / 36.0 + u2 * u2 / 1800.0);
        }
        let s = (0.5 * u).sin();
        2.0 * sine_integral(u) - 4.0 * s * s / u
    }

    /// `cos(u0 + j du)` by rotation, resynchronized every 64 steps; the
    /// closed form is used only away from the origin, where `1 - cos u` has
    /// no cancellation.
    fn accumulate_progression(&self, u0: f64, du: f64, acc: &mut [f64]) {
        let (sd, cd) = du.sin_cos();
        let (mut s, mut c) = (0.0, 1.0);
        for (j, a) in acc.iter_mut().enumerate() {
            let u = u0 + j as f64 * du;
            if j % 64 == 0 {
                (s, c) = u.sin_cos();
            }
            *a += if u.abs() < 0.5 { self.f(u) } else { 2.0 * (1.0 - c) / (u * u) };
            (s, c) = (s * cd + c * sd, c * cd - s * sd);
        }
    }
}

/// `Si(x) = int_0^x sin(t)/t dt`.
///
/// Power series for `|x| <= 2`; beyond that the continued fraction for the
/// complex exponential integral `E1(ix)`, evaluated with the modified Lentz
/// method.
pub fn sine_integral(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= 2.0 {
        let x2 = ax * ax;
        let mut term = ax;
        let mut sum = ax;
        let mut k = 0.0;
        loop {
            // term_k = (-1)^k x^(2k+1) / (2k+1)!, sum += term_k / (2k+1)
            term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            let add = term / (2.0 * k + 3.0);
            sum += add;
            k += 1.0;
            if add.abs() < 1e-17 * sum.abs() {
                break sum;
            }
        }
    } else if ax.is_infinite() {
        FRAC_PI_2
    } else {
        // E1(ix) = exp(-ix) / (1 + ix - 1/(3 + ix - 4/(5 + ix - ...)))
        let tiny = 1e-300;
        let (mut b_re, b_im) = (1.0, ax);
        let (mut c_re, mut c_im) = (1.0 / tiny, 0.0);
        let (mut d_re, mut d_im) = cinv(b_re, b_im);
        let (mut h_re, mut h_im) = (d_re, d_im);
        for i in 2..1000 {
            let a = -((i - 1) * (i - 1)) as f64;
            b_re += 2.0;
            // d = 1 / (a d + b)
            let (den_re, den_im) = (a * d_re + b_re, a * d_im + b_im);
            let inv = cinv(den_re, den_im);
            d_re = inv.0;
            d_im = inv.1;
            // c = b + a / c
            let (q_re, q_im) = cinv(c_re, c_im);
            c_re = b_re + a * q_re;
            c_im = b_im + a * q_im;
            let del_re = c_re * d_re - c_im * d_im;
            let del_im = c_re * d_im + c_im * d_re;
            let new_re = h_re * del_re - h_im * del_im;
            h_im = h_re * del_im + h_im * del_re;
            h_re = new_re;
            if (del_re - 1.0).abs() + del_im.abs() < 1e-16 {
                break;
            }
        }
        let (s, c) = ax.sin_cos();
        // h * (cos x - i sin x)
        let im = h_im * c - h_re * s;
        FRAC_PI_2 + im
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

fn cinv(re: f64, im: f64) -> (f64, f64) {
    let n = re * re + im * im;
    (re / n, -im / n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn progression_matches_pointwise() {
        let k = Fejer;
        for (u0, du) in [(-40.3, 0.0565), (12.0, -5.654866776461628), (0.01, 0.001), (-3e4, 7.1)] {
            let mut acc = [0.0; 1000];
            k.accumulate_progression(u0, du, &mut acc);
            for (j, a) in acc.iter().enumerate() {
                let direct = k.f(u0 + j as f64 * du);
                assert!((a - direct).abs() <= 1e-12 * direct + 1e-15, "{u0} {du} {j}");
            }
        }
    }

    #[test]
    fn kernel_values() {
        let k = fejer_kernel();
        assert_eq!(k.f(0.0), 1.0);
        assert_eq!(k.fhat(0.5), 0.5);
        assert_eq!(k.fhat(1.5), 0.0);
        assert!((k.f(PI) - 4.0 / (PI * PI)).abs() < 1e-16);
        assert!((k.mass() - 2.0 * PI * k.fhat(0.0)).abs() < 1e-15);
        // Series and closed form agree across the switch.
        let x = 1e-4f64;
        let closed = 2.0 * (1.0 - x.cos()) / (x * x);
        assert!((k.f(x) - closed).abs() < 1e-8);
        assert!((k.f(1.0001e-4) - k.f(0.9999e-4)).abs() < 1e-12);
    }

    #[test]
    fn sine_integral_matches_reference_values() {
        // Reference values from an independent special-function library.
        let cases = [
            (1e-3, 0.0009999999444444462),
            (0.5, 0.49310741804306674),
            (1.0, 0.9460830703671831),
            (2.0, 1.605412976802695),
            (3.9, 1.7765013604478055),
            (4.0, 1.758203138949053),
            (5.0, 1.549931244944674),
            (10.0, 1.658347594218874),
            (37.5, 1.5448334540038942),
            (100.0, 1.5622254668890563),
            (1234.5, 1.5715976670275842),
        ];
        for (x, si) in cases {
            assert!((sine_integral(x) - si).abs() < 2e-15, "Si({x}) = {}", sine_integral(x));
            assert!((sine_integral(-x) + si).abs() < 2e-15);
        }
        // Continuity across the branch switch.
        assert!((sine_integral(2.0 + 1e-12) - sine_integral(2.0 - 1e-12)).abs() < 1e-12);
    }

    #[test]
    fn primitive_is_an_antiderivative() {
        let k = fejer_kernel();
        for &u in &[0.3, 1.7, 6.0, 25.0, 300.0] {
            let h = 1e-5;
            let deriv = (k.primitive(u + h) - k.primitive(u - h)) / (2.0 * h);
            assert!((deriv - k.f(u)).abs() < 1e-7, "u = {u}");
        }
        assert!((k.primitive(1e6) - PI).abs() < 1e-5);
        assert!((k.primitive(-2.0) + k.primitive(2.0)).abs() < 1e-15);
    }
}
