use num_traits::Zero;
use proptest::prelude::*;

use perm_mobius::embeddings::{contains, count_embeddings, count_normal_embeddings};
use perm_mobius::mobius::{mu_chain, mu_recursive, MobiusCache};
use perm_mobius::{Permutation, Symmetry};

fn perm(max: usize) -> impl Strategy<Value = Permutation> {
    (1..=max)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_one_line(&v).unwrap())
}

/// A host together with one of its patterns.
fn pair(max: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    perm(max).prop_flat_map(|pi| {
        let n = pi.size();
        proptest::sample::subsequence((1..=n).collect::<Vec<_>>(), 1..=n)
            .prop_map(move |pos| (pi.pattern_at(&pos).unwrap(), pi.clone()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symmetries_preserve_containment(a in perm(5), b in perm(8)) {
        for kind in Symmetry::ALL {
            prop_assert_eq!(contains(&a, &b), contains(&a.symmetry(kind), &b.symmetry(kind)));
        }
    }

    #[test]
    fn symmetries_preserve_embedding_counts(a in perm(4), b in perm(8)) {
        for kind in Symmetry::ALL {
            prop_assert_eq!(count_embeddings(&a, &b), count_embeddings(&a.symmetry(kind), &b.symmetry(kind)));
        }
        prop_assert_eq!(
            count_normal_embeddings(&a, &b),
            count_normal_embeddings(&a.reverse_complement(), &b.reverse_complement())
        );
    }

    #[test]
    fn normal_embeddings_are_embeddings(a in perm(5), b in perm(9)) {
        prop_assert!(count_normal_embeddings(&a, &b) <= count_embeddings(&a, &b));
    }

    #[test]
    fn patterns_are_contained((s, pi) in pair(9)) {
        prop_assert!(contains(&s, &pi));
        prop_assert!(!count_embeddings(&s, &pi).is_zero());
    }

    #[test]
    fn containment_is_transitive((s, mid) in pair(5), host in perm(8)) {
        if contains(&mid, &host) {
            prop_assert!(contains(&s, &host));
        }
    }

    #[test]
    fn mobius_is_symmetry_invariant((s, pi) in pair(7)) {
        let cache = MobiusCache::new();
        let mu = mu_recursive(&s, &pi, &cache).unwrap();
        for kind in Symmetry::ALL {
            prop_assert_eq!(&mu, &mu_recursive(&s.symmetry(kind), &pi.symmetry(kind), &cache).unwrap());
        }
    }

    #[test]
    fn recursive_matches_chain((s, pi) in pair(8)) {
        prop_assert_eq!(mu_recursive(&s, &pi, &MobiusCache::new()).unwrap(), mu_chain(&s, &pi).unwrap());
    }

    #[test]
    fn roundtrip_text(pi in perm(12)) {
        let back: Permutation = pi.to_string().parse().unwrap();
        prop_assert_eq!(&back, &pi);
        let back: Permutation = pi.to_comma_string().parse().unwrap();
        prop_assert_eq!(&back, &pi);
    }
}
