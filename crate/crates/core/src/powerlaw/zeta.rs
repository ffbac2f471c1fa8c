//! Hurwitz zeta function for real `s > 1`, `a > 0`.

/// Bernoulli numbers B2, B4, ..., B18.
const BERNOULLI: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

/// Terms summed explicitly until the argument reaches this value.
const DIRECT_UNTIL: f64 = 12.0;

/// `sum_{k>=0} (a + k)^-s`, by direct summation up to `a + N >= 12` followed
/// by an Euler-Maclaurin tail. Relative error is below 1e-15 for the
/// exponents used here.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0, "hurwitz_zeta({s}, {a})");
    let mut sum = 0.0;
    let mut x = a;
    while x < DIRECT_UNTIL {
        sum += x.powf(-s);
        x += 1.0;
    }
    let xs = x.powf(-s);
    let mut tail = x * xs / (s - 1.0) + 0.5 * xs;
    let inv_x2 = 1.0 / (x * x);
    let mut rising = s * xs / x;
    let mut factorial = 2.0;
    for (k, b) in BERNOULLI.iter().enumerate() {
        tail += b / factorial * rising;
        let m = 2.0 * (k as f64 + 1.0);
        rising *= (s + m - 1.0) * (s + m) * inv_x2;
        factorial *= (m + 1.0) * (m + 2.0);
    }
    sum + tail
}
