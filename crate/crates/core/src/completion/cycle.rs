use std::f64::consts::PI;

/// Signs ε ∈ {±1}ⁿ and k with |Σ ε_i ϑ_i − 2kπ| ≤ tol, if any.
///
/// Patterns are tried in binary order with bit i set meaning ε_i = −1, so
/// the all-plus pattern comes first.
pub fn cycle_gd2_decide(angles: &[f64], tol: f64) -> Option<(Vec<i8>, i64)> {
    let n = angles.len();
    assert!(n < 40, "sign enumeration over {n} angles");
    for mask in 0u64..(1u64 << n) {
        let s: f64 = angles
            .iter()
            .enumerate()
            .map(|(i, &t)| if mask >> i & 1 == 1 { -t } else { t })
            .sum();
        let k = (s / (2.0 * PI)).round();
        if (s - 2.0 * PI * k).abs() <= tol {
            let eps = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            return Some((eps, k as i64));
        }
    }
    None
}

/// As `cycle_gd2_decide`, with the tolerance taken on the entries cos ϑ_i:
/// each ϑ_i may move anywhere in {ϑ : |cos ϑ − cos ϑ_i| ≤ eta}.
pub fn cycle_gd2_decide_entries(angles: &[f64], eta: f64) -> Option<(Vec<i8>, i64)> {
    let n = angles.len();
    assert!(n < 40, "sign enumeration over {n} angles");
    let range: Vec<(f64, f64)> = angles
        .iter()
        .map(|&t| {
            let c = t.cos();
            ((c + eta).min(1.0).acos(), (c - eta).max(-1.0).acos())
        })
        .collect();
    for mask in 0u64..(1u64 << n) {
        let (mut lo, mut hi) = (0.0, 0.0);
        for (i, &(a, b)) in range.iter().enumerate() {
            if mask >> i & 1 == 1 {
                lo -= b;
                hi -= a;
            } else {
                lo += a;
                hi += b;
            }
        }
        let k = (lo / (2.0 * PI)).ceil();
        if 2.0 * PI * k <= hi {
            let eps = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            return Some((eps, k as i64));
        }
    }
    None
}
