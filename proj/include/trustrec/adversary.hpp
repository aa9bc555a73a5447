#pragma once

#include <cstddef>
#include <optional>

#include "trustrec/dataset.hpp"

namespace trustrec {

/// Fake-account rating suppression: `fake_count` new users link to the
/// celebrity (rank-th user by in-degree) and rate every item `fake_rating`.
struct AttackConfig {
    std::size_t fake_count = 150;
    std::size_t celebrity_rank = 10;         // 1-based
    std::optional<double> fake_rating;       // defaults to scale.min
    bool bidirectional = true;               // celebrity trusts the fakes back

    void validate(const RatingScale& scale) const;
    double rating_on(const RatingScale& scale) const { return fake_rating.value_or(scale.min()); }
};

/// rank-th user by in-degree, descending, ties to the smaller id.
/// Throws std::invalid_argument when rank is 0 or exceeds the user count.
UserId select_celebrity(const TrustGraph& g, std::size_t rank);

/// Copy of ds with the fake accounts appended (ids from ds.user_count()).
/// Existing users, edges and ratings are untouched; fakes have no edges
/// among themselves.
Dataset inject_fake_accounts(const Dataset& ds, const AttackConfig& cfg);

/// 100 · (adversarial - normal) / normal. Throws for normal_mae <= 0.
double reduction_pct(double normal_mae, double adversarial_mae);

}  // namespace trustrec
