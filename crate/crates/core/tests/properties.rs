mod common;

fn assert_property(f: fn() -> Result<(), String>) {
    if let Err(e) = f() {
        panic!("{e}");
    }
}

#[test]
fn perm_is_an_involution_preserving_squares() {
    assert_property(common::perm_involution);
}

#[test]
fn shifting_n_times_is_the_identity() {
    assert_property(common::shift_identity);
}

#[test]
fn blow_down_then_augment_restores_the_system() {
    assert_property(common::blow_down_round_trip);
}

#[test]
fn first_kind_descends_along_augmentation() {
    assert_property(common::first_kind_descends);
}

#[test]
fn segment_sums_satisfy_the_square_identity() {
    assert_property(common::segment_identity);
}

#[test]
fn sum_of_left_orthogonal_pair() {
    assert_property(common::pair_equivalence);
}

#[test]
fn squares_sequences_are_admissible() {
    assert_property(common::squares_admissible);
}

#[test]
fn checker_paths_agree() {
    assert_property(common::fast_matches_general);
}

#[test]
fn first_kind_systems_are_weak_augmentations() {
    assert_property(common::first_kind_weak);
}

#[test]
fn pools_are_nonempty() {
    assert!(common::pool().len() > 1000);
    assert!(!common::low_pool().is_empty());
}
