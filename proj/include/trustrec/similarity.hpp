#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trustrec/ratings_table.hpp"
#include "trustrec/trust_graph.hpp"

namespace trustrec {

// User-user similarity metrics.
//
// Graph metrics use the undirected neighbourhood N(u). Item-based metrics use
// I(u), the items u rated. Every metric is 0 when its denominator would be 0.

/// |N(u) ∩ N(v)| / |N(u) ∪ N(v)|. Throws std::invalid_argument when u == v.
double jaccard(const TrustGraph& g, UserId u, UserId v);

/// jaccard plus 1/|N(u) ∪ N(v)| when u and v are adjacent, so linked users
/// with no common neighbour still score above zero.
double jaccard_modified(const TrustGraph& g, UserId u, UserId v);

/// |I(u) ∩ I(v)| / |I(u) ∪ I(v)|.
double jaccard_item(const RatingsTable& t, UserId u, UserId v);

/// 1 - mean |R(u,k) - R(v,k)| / span over co-rated items; 0 with none.
double rating_difference(const RatingsTable& t, UserId u, UserId v);

/// Co-rated items j weighted by J_II(target, j):
/// 1 - Σ w·|R(u,j) - R(v,j)| / (span · Σ w). 0 with no co-rated item or
/// all-zero weights. J_II(target, target) counts as 1.
double weighted_rating_difference(const RatingsTable& t, UserId u, UserId v, ItemId target);

// Item-item similarity.

/// |S(i) ∩ S(j)| / |S(i) ∪ S(j)| over the raters of each item; 1 for i == j.
double intra_item_jaccard(const RatingsTable& t, ItemId i, ItemId j);

/// Pearson correlation of co-ratings, each centred on the rater's mean over
/// all of their ratings, scaled by 1 / (1 + e^(-|S(i,j)|/2)) and clamped
/// below at 0. Needs at least two co-raters and non-zero variance on both
/// sides, otherwise 0. 1 for i == j.
double pearson_item_sim(const RatingsTable& t, ItemId i, ItemId j);

enum class UserMetric {
    Jaccard,
    JaccardModified,
    JaccardItem,
    RatingDifference,
    AdditiveCombo,           // α·J' + (1-α)·J_I
    MaxCombo,                // max(J', J_I)
    ProductCombo,            // J'·J_I
    AllCombinedUserSim,      // J' + J_I, range [0, 2]
    WeightedRatingDifference,
    JaccardPlusWeightedRatingDifference,  // J' + WR_D, range [0, 2]
};

struct UserSimilaritySpec {
    UserMetric metric = UserMetric::JaccardModified;
    std::optional<double> alpha;  // AdditiveCombo only

    /// Throws std::invalid_argument if alpha is missing, stray or outside [0, 1].
    void validate() const;
    /// Whether the metric reads the target item.
    bool needs_target() const;
    /// Whether the metric reads only the graph.
    bool graph_only() const;

    static UserSimilaritySpec of(UserMetric m) { return UserSimilaritySpec{m, std::nullopt}; }
    static UserSimilaritySpec additive(double alpha) { return UserSimilaritySpec{UserMetric::AdditiveCombo, alpha}; }

    friend bool operator==(const UserSimilaritySpec&, const UserSimilaritySpec&) = default;
};

enum class ItemMetric { IntraItemJaccard, PearsonSigmoid };

struct ItemSimilaritySpec {
    ItemMetric metric = ItemMetric::IntraItemJaccard;
    friend bool operator==(const ItemSimilaritySpec&, const ItemSimilaritySpec&) = default;
};

std::string to_string(UserMetric m);
std::string to_string(ItemMetric m);

/// Folds the two component scores of a combination metric.
double combine(const UserSimilaritySpec& spec, double jaccard_mod, double jaccard_item);

/// Dispatches on spec. `target` is required iff spec.needs_target().
double user_similarity(const UserSimilaritySpec& spec, const TrustGraph& g, const RatingsTable& t,
                       UserId u, UserId v, std::optional<ItemId> target = std::nullopt);

double item_similarity(const ItemSimilaritySpec& spec, const RatingsTable& t, ItemId i, ItemId j);

/// Memo of similarity values for one (graph, table) pair, confined to one
/// thread. Graph-only entries live as long as the cache; anything that reads
/// ratings is dropped as soon as the table's revision moves.
class SimilarityCache {
public:
    SimilarityCache(const TrustGraph& g, const RatingsTable& t) : graph_(&g), table_(&t) {}

    double user(const UserSimilaritySpec& spec, UserId u, UserId v,
                std::optional<ItemId> target = std::nullopt);
    double item(const ItemSimilaritySpec& spec, ItemId i, ItemId j);

    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    struct Key {
        std::uint32_t metric;
        std::uint64_t alpha_bits;
        std::uint32_t lo;
        std::uint32_t hi;
        std::uint32_t target;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };
    void sync_revision();

    const TrustGraph* graph_;
    const RatingsTable* table_;
    std::uint64_t revision_seen_ = 0;
    bool revision_valid_ = false;
    std::unordered_map<Key, double, KeyHash> structural_;
    std::unordered_map<Key, double, KeyHash> rating_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

/// Similarity of one fixed user u against every other user, for one table
/// state. Built by counting through neighbourhoods and rater lists instead of
/// pairwise set merges; each value is bit-identical to user_similarity(spec,
/// g, t, u, v, target) because the same integers are divided and the same
/// terms are summed in the same order.
class SimilarityRow {
public:
    SimilarityRow(const UserSimilaritySpec& spec, const TrustGraph& g, const RatingsTable& t, UserId u,
                  std::optional<ItemId> target = std::nullopt);

    /// Throws std::invalid_argument for v == u.
    double operator()(UserId v) const;

    /// Users with a possibly non-zero score (sorted). Everyone else scores 0.
    const std::vector<UserId>& support() const { return support_; }

private:
    double jaccard_mod_of(UserId v) const;
    double jaccard_item_of(UserId v) const;
    double weighted_rd_of(UserId v) const;

    UserSimilaritySpec spec_;
    const TrustGraph* graph_;
    const RatingsTable* table_;
    UserId user_;
    bool use_graph_ = false;
    bool use_items_ = false;
    bool use_diff_ = false;
    bool use_weighted_ = false;
    std::vector<std::uint32_t> common_neighbors_;
    std::vector<bool> adjacent_;
    std::vector<std::uint32_t> common_items_;
    std::vector<double> diff_sum_;
    std::vector<double> weighted_num_;
    std::vector<double> weighted_den_;
    std::vector<UserId> support_;
};

}  // namespace trustrec
