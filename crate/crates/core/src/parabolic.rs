//! Descent classes, minimal coset representatives and parabolic indices.

use crate::classify::{essential_subset, parabolic_order, Cardinality};
use crate::error::Result;
use crate::system::{CoxeterSystem, GenSubset};
use crate::words::{Element, Side};

/// Generators occurring in a reduced word of `w`; `w ∈ W_T` iff this is `⊆ T`.
pub fn support(w: &Element) -> GenSubset {
    w.support()
}

/// `w ∈ W^T`, i.e. the right descent set of `w` is exactly `T`.
pub fn in_descent_class(w: &Element, t: GenSubset) -> Result<bool> {
    w.system().check_subset(t)?;
    Ok(w.right_descents()? == t)
}

/// `w ∈ A_T`: no right descent of `w` lies in `T`.
pub fn in_a_t(w: &Element, t: GenSubset) -> Result<bool> {
    w.system().check_subset(t)?;
    Ok(w.right_descents()?.is_disjoint(t))
}

/// Writes `w = u·v` with `u ∈ A_T` and `v ∈ W_T`, lengths adding up.
///
/// Strips the least right descent lying in `T` until none remain.
pub fn coset_decompose(w: &Element, t: GenSubset) -> Result<(Element, Element)> {
    w.system().check_subset(t)?;
    let mut u = w.clone();
    let mut stripped = Vec::new();
    while let Some(s) = u.right_descents()?.intersection(t).first() {
        u = u.mul_gen(s, Side::Right)?;
        stripped.push(s);
    }
    stripped.reverse();
    let v = w.rep().from_word(&stripped)?;
    Ok((u, v))
}

/// `[W : W_T]`, infinite unless `S̃ ⊆ T`, otherwise `|W_{S∖S̃}| / |W_{T∖S̃}|`.
pub fn index(system: &CoxeterSystem, t: GenSubset) -> Result<Cardinality> {
    system.check_subset(t)?;
    let essential = essential_subset(system);
    if !essential.is_subset_of(t) {
        return Ok(Cardinality::Infinite);
    }
    let outer = parabolic_order(system, system.all().difference(essential))?;
    let inner = parabolic_order(system, t.difference(essential))?;
    match (outer, inner) {
        (Cardinality::Finite(a), Cardinality::Finite(b)) => {
            debug_assert_eq!(a % b, 0);
            Ok(Cardinality::Finite(a / b))
        }
        _ => unreachable!("components outside the essential subset are finite"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::parse_system;
    use crate::words::{enumerate_ball, enumerate_group, ReflectionRep};

    fn a2() -> std::sync::Arc<ReflectionRep> {
        ReflectionRep::new(parse_system("generators a b\nm a b 3\n").unwrap())
    }

    #[test]
    fn support_examples() {
        let r = a2();
        assert!(support(&r.identity()).is_empty());
        let aba = r.from_word(&[0, 1, 0]).unwrap();
        assert_eq!(support(&aba), GenSubset::from_mask(0b11));
        let ab = r.from_word(&[0, 1]).unwrap();
        assert_eq!(support(&ab), support(&ab.inverse().unwrap()));
    }

    #[test]
    fn descent_class_examples() {
        let r = a2();
        assert!(in_descent_class(&r.identity(), GenSubset::EMPTY).unwrap());
        let ab = r.from_word(&[0, 1]).unwrap();
        assert!(in_descent_class(&ab, GenSubset::singleton(1)).unwrap());
        assert!(!in_descent_class(&ab, GenSubset::singleton(0)).unwrap());
    }

    #[test]
    fn a_t_examples() {
        let r = a2();
        let group = enumerate_group(&r).unwrap();
        let b = GenSubset::singleton(1);
        let members: Vec<Vec<u8>> = group
            .elements()
            .iter()
            .filter(|w| in_a_t(w, b).unwrap())
            .map(|w| w.normal_form().to_vec())
            .collect();
        assert_eq!(members, vec![vec![], vec![0], vec![1, 0]]);
        for w in group.elements() {
            assert!(in_a_t(&r.identity(), GenSubset::from_mask(0b11)).unwrap());
            assert_eq!(in_a_t(w, GenSubset::from_mask(0b11)).unwrap(), w.is_identity());
        }
    }

    #[test]
    fn coset_decompose_examples() {
        let r = a2();
        let b = GenSubset::singleton(1);
        let ba = r.from_word(&[1, 0]).unwrap();
        let (u, v) = coset_decompose(&ba, b).unwrap();
        assert_eq!(u, ba);
        assert!(v.is_identity());

        let bb = r.generator(1).unwrap();
        let (u, v) = coset_decompose(&bb, b).unwrap();
        assert!(u.is_identity());
        assert_eq!(v, bb);

        // aba = ba·b with ba ∈ A_{b}.
        let aba = r.from_word(&[0, 1, 0]).unwrap();
        let (u, v) = coset_decompose(&aba, b).unwrap();
        assert_eq!(u.normal_form(), &[1, 0]);
        assert_eq!(v.normal_form(), &[1]);
    }

    #[test]
    fn coset_decompose_is_the_unique_factorization() {
        let r = a2();
        let group = enumerate_group(&r).unwrap();
        for mask in 0..4 {
            let t = GenSubset::from_mask(mask);
            for w in group.elements() {
                let pairs: Vec<(Vec<u8>, Vec<u8>)> = group
                    .elements()
                    .iter()
                    .flat_map(|u| group.elements().iter().map(move |v| (u, v)))
                    .filter(|(u, v)| {
                        in_a_t(u, t).unwrap()
                            && support(v).is_subset_of(t)
                            && u.mul(v).unwrap() == *w
                            && u.length() + v.length() == w.length()
                    })
                    .map(|(u, v)| (u.normal_form().to_vec(), v.normal_form().to_vec()))
                    .collect();
                assert_eq!(pairs.len(), 1);
                let (u, v) = coset_decompose(w, t).unwrap();
                assert_eq!(pairs[0], (u.normal_form().to_vec(), v.normal_form().to_vec()));
            }
        }
    }

    #[test]
    fn index_examples() {
        let a2 = parse_system("generators a b\nm a b 3\n").unwrap();
        assert_eq!(index(&a2, GenSubset::singleton(1)).unwrap(), Cardinality::Finite(3));

        let dxa = parse_system(include_str!("../../../fixtures/dinf-x-a1.cox")).unwrap();
        assert_eq!(index(&dxa, GenSubset::from_mask(0b011)).unwrap(), Cardinality::Finite(2));
        assert_eq!(index(&dxa, GenSubset::from_mask(0b101)).unwrap(), Cardinality::Infinite);

        let fig1 = parse_system(include_str!("../../../fixtures/fig1.cox")).unwrap();
        let t = fig1.parse_subset("s1,s4").unwrap();
        assert_eq!(index(&fig1, t).unwrap(), Cardinality::Infinite);
        assert_eq!(index(&fig1, fig1.all()).unwrap(), Cardinality::Finite(1));
    }

    #[test]
    fn partition_property_on_fig1_ball() {
        let r = ReflectionRep::new(parse_system(include_str!("../../../fixtures/fig1.cox")).unwrap());
        let ball = enumerate_ball(&r, 6).unwrap();
        for mask in 0..16 {
            let t = GenSubset::from_mask(mask);
            for w in ball.elements() {
                let (u, v) = coset_decompose(w, t).unwrap();
                assert!(in_a_t(&u, t).unwrap());
                assert!(support(&v).is_subset_of(t));
                assert_eq!(u.length() + v.length(), w.length());
                assert_eq!(u.mul(&v).unwrap(), *w);
                let classes = (0..16)
                    .filter(|&m| in_descent_class(w, GenSubset::from_mask(m)).unwrap())
                    .collect::<Vec<_>>();
                assert_eq!(classes.len(), 1);
                let disjoint_class = GenSubset::from_mask(classes[0]).is_disjoint(t);
                assert_eq!(in_a_t(w, t).unwrap(), disjoint_class);
            }
        }
    }
}
