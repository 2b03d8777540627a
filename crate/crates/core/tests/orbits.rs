use std::sync::Arc;

use proptest::prelude::*;
use tate_kappa::affine_weyl::{canonical_representative, orbit_stabilizer_order};
use tate_kappa::oracle::{alcove_points, naive_stabilizer};
use tate_kappa::{affine_orbit_reps, kappa_tau, load_root_datum, negative_level_basis, weyl_elements, Coweight, Twisting, Weight};

fn level(label: &str, k: i64) -> Twisting {
    Twisting::at_level(Arc::new(load_root_datum(label).unwrap()), k).unwrap()
}

#[test]
fn counts_match_alcove_enumeration() {
    for g in ["A1", "A2", "A3", "B2", "C2", "G2"] {
        for k in 1..=3 {
            let tw = level(g, k);
            let rd = tw.root_datum().unwrap();
            let reps: Vec<Weight> = affine_orbit_reps(&tw).unwrap().into_iter().map(|o| o.rep).collect();
            assert_eq!(reps, alcove_points(rd, k), "{g} k={k}");
        }
    }
}

#[test]
fn frozen_counts() {
    // (group, level, orbits, regular orbits)
    let table = [
        ("A1", 2, 3, 1),
        ("A2", 3, 10, 1),
        ("C2", 2, 6, 0),
        ("G2", 2, 4, 0),
        ("A2", 1, 3, 0),
    ];
    for (g, k, n, reg) in table {
        let reps = affine_orbit_reps(&level(g, k)).unwrap();
        assert_eq!(reps.len(), n, "{g} k={k}");
        assert_eq!(reps.iter().filter(|o| o.regular).count(), reg, "{g} k={k}");
    }
}

#[test]
fn shifted_basis_is_the_regular_part() {
    for g in ["A1", "A2", "B2", "G2"] {
        let rd = Arc::new(load_root_datum(g).unwrap());
        for k in 1..=3 {
            let neg = negative_level_basis(&rd, k).unwrap();
            assert_eq!(neg.len(), affine_orbit_reps(&level(g, k)).unwrap().len(), "{g} k={k}");
            assert!(neg.iter().all(|o| o.regular && o.stabilizer_order == 1));
        }
    }
}

#[test]
fn stabilizers_match_naive_count() {
    for g in ["A2", "C2", "G2"] {
        for k in 1..=3 {
            let tw = level(g, k);
            let rd = tw.root_datum().unwrap().clone();
            for o in affine_orbit_reps(&tw).unwrap() {
                assert_eq!(o.stabilizer_order, naive_stabilizer(&rd, k, &o.rep), "{g} k={k} {:?}", o.rep);
            }
        }
    }
}

#[test]
fn torus_orbits_are_cosets() {
    let tw = Twisting::torus(tate_kappa::IntMatrix::new(vec![vec![2, 1], vec![1, 3]])).unwrap();
    let reps = affine_orbit_reps(&tw).unwrap();
    assert_eq!(reps.len(), 5);
    assert!(reps.iter().all(|o| o.regular));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn representative_is_affine_weyl_invariant(
        g in prop::sample::select(vec!["A2", "B2", "G2"]),
        k in 1i64..=4,
        lam in prop::collection::vec(-12i64..=12, 2),
        p in prop::collection::vec(-3i64..=3, 2),
        wi in 0usize..12,
    ) {
        let tw = level(g, k);
        let rd = tw.root_datum().unwrap().clone();
        let weyl = weyl_elements(&rd).unwrap();
        let lam = Weight(lam);
        let image = weyl[wi % weyl.len()].act(&lam).add(&kappa_tau(&tw, &Coweight(p)));
        let rep = canonical_representative(&tw, &lam);
        prop_assert!(rep.is_dominant() && rd.level_of(&rep) <= k);
        prop_assert_eq!(canonical_representative(&tw, &image), rep.clone());
        prop_assert_eq!(
            orbit_stabilizer_order(&tw, &lam).unwrap(),
            orbit_stabilizer_order(&tw, &rep).unwrap()
        );
    }
}
