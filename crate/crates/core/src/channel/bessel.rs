//! Bessel function of the first kind, order one.

use std::f64::consts::PI;

/// First positive zero of `J1`.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512_3;

const SERIES_LIMIT: f64 = 12.0;

/// `J1(x)`: power series for `|x| <= 12`, Hankel asymptotic expansion
/// beyond.
pub fn bessel_j1(x: f64) -> f64 {
    if x < 0.0 {
        return -bessel_j1(-x);
    }
    if x <= SERIES_LIMIT {
        series(x)
    } else {
        asymptotic(x)
    }
}

fn series(x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h;
    let mut sum = term;
    for k in 1..200 {
        let k = k as f64;
        term *= -h2 / (k * (k + 1.0));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn asymptotic(x: f64) -> f64 {
    // Hankel expansion with mu = 4 nu^2 = 4.
    let mu = 4.0;
    let z8 = 8.0 * x;
    let (mut p, mut q) = (1.0, 0.0);
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * z8);
        if a.abs() >= prev {
            break;
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - 0.75 * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `J1(x) = (1/pi) int_0^pi cos(t - x sin t) dt`, trapezoid rule (the
    /// integrand is smooth and periodic so convergence is spectral).
    fn integral_j1(x: f64) -> f64 {
        let n = 4000;
        let h = PI / n as f64;
        let f = |t: f64| (t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(PI));
        for i in 1..n {
            s += f(i as f64 * h);
        }
        s * h / PI
    }

    #[test]
    fn tabulated_values() {
        assert!((bessel_j1(1.0) - 0.440_050_585_744_933_5).abs() < 1e-13);
        assert!((bessel_j1(2.0) - 0.576_724_807_756_873_4).abs() < 1e-13);
        assert!(bessel_j1(J1_FIRST_ZERO).abs() < 1e-13);
        assert_eq!(bessel_j1(0.0), 0.0);
        assert!((bessel_j1(-1.0) + bessel_j1(1.0)).abs() < 1e-16);
    }

    #[test]
    fn matches_integral_representation() {
        for i in 0..=80 {
            let x = i as f64 * 0.5;
            let d = (bessel_j1(x) - integral_j1(x)).abs();
            assert!(d < 1e-10, "x={x}: {d}");
        }
    }

    #[test]
    fn series_and_asymptotic_agree_at_the_switch() {
        for x in [11.0, 12.0, 13.0] {
            assert!((series(x) - asymptotic(x)).abs() < 1e-10, "x={x}");
        }
    }
}
