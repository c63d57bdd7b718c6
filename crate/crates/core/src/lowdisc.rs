//! Deterministic low-discrepancy sampling (Halton sequence).

/// `index`-th element of the van der Corput sequence in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Halton points in `[0,1)³` (bases 2, 3, 5), starting after `skip`.
pub fn halton3(skip: u64) -> impl Iterator<Item = [f64; 3]> {
    (skip + 1..).map(|i| [radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput_base_two() {
        let v: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn halton_points_in_unit_cube() {
        for p in halton3(7).take(200) {
            assert!(p.iter().all(|v| (0.0..1.0).contains(v)));
        }
    }
}
