mod common;

use common::laws;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ranking_ignores_monotone_transforms(pool in laws::pools()) {
        laws::monotone_invariance(&pool)?;
    }

    #[test]
    fn one_hot_profile_returns_dimension_index(pool in laws::pools()) {
        laws::one_hot_identity(&pool)?;
    }

    #[test]
    fn polarity_flip_reverses_order(scores in laws::distinct_scores()) {
        laws::polarity_reversal(&scores)?;
    }

    #[test]
    fn indices_lie_in_unit_interval(pool in laws::pools()) {
        laws::bounded_indices(&pool)?;
    }

    #[test]
    fn alpha_zero_sorts_by_mean_index(pool in laws::pools()) {
        laws::alpha_zero_sorts_by_mean(&pool)?;
    }
}
