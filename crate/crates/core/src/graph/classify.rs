use super::{has_minor, Graph, MinorPattern, MinorWitness};
use serde::{Deserialize, Serialize};

/// Least k ≤ 4 with gd ≤ k, or a K5/K222 minor showing gd ≥ 5.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GdBand {
    AtMost(usize),
    AtLeast5(MinorWitness),
}

impl GdBand {
    /// Position in the band order (≥5 ranks as 5).
    pub fn rank(&self) -> usize {
        match self {
            GdBand::AtMost(k) => *k,
            GdBand::AtLeast5(_) => 5,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GdBand::AtMost(k) => format!("<={k}"),
            GdBand::AtLeast5(_) => ">=5".to_string(),
        }
    }
}

pub fn classify_gram_dimension(g: &Graph) -> GdBand {
    if g.edge_count() == 0 {
        return GdBand::AtMost(1);
    }
    if has_minor(g, MinorPattern::K3).is_none() {
        return GdBand::AtMost(2);
    }
    if has_minor(g, MinorPattern::K4).is_none() {
        return GdBand::AtMost(3);
    }
    if let Some(w) = has_minor(g, MinorPattern::K5) {
        return GdBand::AtLeast5(w);
    }
    if let Some(w) = has_minor(g, MinorPattern::K222) {
        return GdBand::AtLeast5(w);
    }
    GdBand::AtMost(4)
}

/// ⌊(√(1+8(|V|+|E|))−1)/2⌋, computed in integers.
pub fn barvinok_bound(g: &Graph) -> usize {
    barvinok_for_constraints(g.n() + g.edge_count())
}

/// Largest k with k(k+1)/2 ≤ m.
pub fn barvinok_for_constraints(m: usize) -> usize {
    let mut k = 0;
    while (k + 1) * (k + 2) / 2 <= m {
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::super::named::*;
    use super::*;

    #[test]
    fn named_bands() {
        assert_eq!(classify_gram_dimension(&Graph::new(3)), GdBand::AtMost(1));
        assert_eq!(classify_gram_dimension(&path(3)), GdBand::AtMost(2));
        assert_eq!(classify_gram_dimension(&cycle(5)), GdBand::AtMost(3));
        assert_eq!(classify_gram_dimension(&complete(4)), GdBand::AtMost(4));
        assert_eq!(classify_gram_dimension(&v8()), GdBand::AtMost(4));
        assert_eq!(classify_gram_dimension(&c5xc2()), GdBand::AtMost(4));
        for g in [complete(5), k222(), petersen()] {
            match classify_gram_dimension(&g) {
                GdBand::AtLeast5(w) => assert!(w.verify(&g)),
                other => panic!("expected >=5, got {other:?}"),
            }
        }
    }

    #[test]
    fn barvinok_values() {
        for n in 1..12 {
            assert_eq!(barvinok_bound(&complete(n)), n);
        }
        assert_eq!(barvinok_bound(&cycle(4)), 3);
    }
}
