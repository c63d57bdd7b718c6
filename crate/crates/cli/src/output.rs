use num_complex::Complex;
use monogenic::Quat64;

/// Six significant digits, `%g` style.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        format!("{:.*}", (5 - exp).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

pub fn fmt_complex(c: Complex<f64>) -> String {
    if c.im < 0.0 {
        format!("{}-{}i", fmt6(c.re), fmt6(-c.im))
    } else {
        format!("{}+{}i", fmt6(c.re), fmt6(c.im))
    }
}

pub fn fmt_quat(q: &Quat64) -> String {
    format!(
        "({}) e1 + ({}) e2 + ({}) e3 + ({}) e4",
        fmt_complex(q.q1),
        fmt_complex(q.q2),
        fmt_complex(q.q3),
        fmt_complex(q.q4)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digits() {
        assert_eq!(fmt6(0.0), "0");
        assert_eq!(fmt6(1.0), "1.00000");
        assert_eq!(fmt6(123.456789), "123.457");
        assert_eq!(fmt6(-0.00123456789), "-0.00123457");
        assert_eq!(fmt6(1.5e-9), "1.50000e-9");
        assert_eq!(fmt_complex(Complex::new(1.0, -2.0)), "1.00000-2.00000i");
    }
}
