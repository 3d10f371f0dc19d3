//! Arithmetic-geometric mean and the complete elliptic integral of the first
//! kind.

/// AGM(a, b) for a, b >= 0, iterated to machine precision.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    for _ in 0..64 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() <= 2.0 * f64::EPSILON * an {
            return 0.5 * (an + bn);
        }
        a = an;
        b = bn;
    }
    0.5 * (a + b)
}

/// K(k) with modulus k in [0, 1). Uses K(k) = pi / (2 AGM(1, k')), with the
/// complementary modulus k' supplied directly when the caller has it, which
/// avoids the cancellation in sqrt(1 - k^2) near k = 1.
pub fn ellip_k_from_kprime(kp: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 / agm(1.0, kp)
}

pub fn ellip_k(k: f64) -> f64 {
    ellip_k_from_kprime(((1.0 - k) * (1.0 + k)).sqrt())
}
