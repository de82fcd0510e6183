//! Γ(x) for the positive arguments that show up in Laplace-method constants
//! (x = 1/n and d/n for small integer n, d). Lanczos approximation, g = 7.

const LANCZOS_G: f64 = 7.0;
const LANCZOS_C: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> f64 {
    assert!(x > 0.0, "gamma restricted to positive arguments, got {x}");
    if x < 0.5 {
        // Reflection: Γ(x)·Γ(1-x) = π/sin(πx).
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x));
    }
    let z = x - 1.0;
    let mut a = LANCZOS_C[0];
    for (i, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}
