#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "trustrec/ratings_table.hpp"
#include "trustrec/rng.hpp"
#include "trustrec/similarity.hpp"
#include "trustrec/trust_graph.hpp"

namespace trustrec {

struct Prediction {
    double value;
    bool fallback;  // produced by the uniform-random fallback
};

enum class Algorithm {
    Random,
    UniversalRandom,
    NeighborMean,
    NeighborMedian,
    NeighborMode,
    JaccardWeightedNeighbors,
    MCRandomWalk,
    JaccardMCRandomWalk,
    MoM,
    WA,
    IntraItemWA,
    JaccardIntraItemWA,
    AllCombinedWA,
};

/// Declarative recommender choice. `name` is the roster name used in reports.
struct RecommenderSpec {
    std::string name;
    Algorithm algorithm = Algorithm::Random;
    std::size_t k_samples = 100;  // walk repetitions
    double alpha = 0.05;          // walk jump coefficient
    UserSimilaritySpec user_sim;  // MoM / WA
    ItemSimilaritySpec item_sim;  // IntraItemWA
    bool writeback = false;       // neighbour central tendencies only

    /// Throws std::invalid_argument on k_samples == 0, alpha outside [0, 1],
    /// writeback on a non-neighbour algorithm or an invalid user_sim.
    void validate() const;
};

/// Roster names accepted by named_recommender, in report order.
const std::vector<std::string>& algorithm_names();
/// Throws std::invalid_argument for an unknown name.
RecommenderSpec named_recommender(const std::string& name);

/// Per-node cumulative J' weights over out-neighbours, for the weighted
/// walk. Depends on the graph only, so one instance may be shared by all
/// threads working on the same graph.
class WalkCache {
public:
    explicit WalkCache(const TrustGraph& g) : graph_(&g) {}
    /// Cumulative weights aligned with g.out_neighbors(node).
    const std::vector<double>& cumulative(UserId node);

private:
    const TrustGraph* graph_;
    std::shared_mutex mutex_;
    std::unordered_map<std::uint32_t, std::vector<double>> weights_;
};

/// Read-only inputs of one prediction. `ratings` is the working table with
/// the held-out rating already removed.
struct PredictionContext {
    const TrustGraph& graph;
    const RatingsTable& ratings;
    WalkCache* walk_cache = nullptr;
};

/// Per-level similarity mass, the core of every mass-voting recommender.
class RatingBuckets {
public:
    explicit RatingBuckets(const RatingScale& scale);

    /// Adds weight to the level of `rating` (snapped to the nearest level).
    void add(double rating, double weight);
    double total() const;
    /// Mass-weighted mean rating, clamped to the range of levels holding
    /// mass; nullopt when the total mass is not positive.
    std::optional<double> weighted_average() const;
    /// Heaviest level, ties to the lower rating; nullopt when no mass.
    std::optional<double> argmax() const;
    const std::vector<double>& mass() const { return mass_; }

private:
    RatingScale scale_;
    std::vector<double> mass_;
};

Prediction uniform_fallback(const RatingScale& scale, Rng& rng);

/// Uniform over the discrete scale values.
Prediction predict_random(const RatingScale& scale, Rng& rng);

/// Draws from the item's current rating distribution, else from all ratings
/// in the table, else uniformly.
Prediction predict_universal_random(const RatingsTable& t, ItemId i, Rng& rng);

enum class CentralStat { Mean, Median, Mode };

/// Mean, median or mode of i's ratings among u's out-neighbours. No such
/// rating, or a tied mode, gives the uniform fallback.
Prediction predict_neighbor_central(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                                    CentralStat stat, Rng& rng);
/// Same, then writes the prediction (snapped to the scale) into `working`.
Prediction predict_neighbor_central(const TrustGraph& g, RatingsTable& working, UserId u, ItemId i,
                                    CentralStat stat, Rng& rng, bool writeback);

/// Out-neighbours vote for their rating of i with weight J'(u, v); the
/// heaviest rating wins, ties to the lower value.
Prediction predict_jaccard_weighted_neighbors(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                                              Rng& rng);

struct WalkParams {
    std::size_t samples = 100;
    double alpha = 0.05;
    bool jaccard_weighted = false;
};

/// Monte-Carlo random walk from u. Each sample walks out-edges until it
/// reaches a rater of i; at depth d it instead jumps to a uniformly chosen
/// rater with probability min(1, d·alpha). Dead ends, and walks longer than
/// 10·|V| steps, yield a uniform draw. Returns the sample mean.
Prediction predict_mc_random_walk(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                                  const WalkParams& params, Rng& rng, WalkCache* cache = nullptr);

/// Weighted average over every other rater v of i, each adding sim(u, v) to
/// the bucket of R(v, i). Zero total mass gives the uniform fallback.
Prediction predict_wa(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                      const UserSimilaritySpec& sim, Rng& rng);

/// Same buckets as predict_wa; returns the heaviest bucket (ties to lower).
Prediction predict_mom(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                       const UserSimilaritySpec& sim, Rng& rng);

/// For each out-neighbour v and each j in I(v), adds itemSim(i, j) to the
/// bucket of R(v, j) (weight 1 for j == i), then averages.
Prediction predict_intra_item_wa(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                                 const ItemSimilaritySpec& sim, Rng& rng);

/// Every other user v and each j in I(v) adds J'(u, v)·J_II(i, j).
Prediction predict_jaccard_intra_item_wa(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                                         Rng& rng);

/// Every other user v and each j in I(v) adds (J'(u, v) + J_I(u, v))·J_II(i, j).
Prediction predict_all_combined(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i, Rng& rng);

/// Dispatches on spec.algorithm. Never writes back; see the eval harness.
Prediction predict(const RecommenderSpec& spec, const PredictionContext& ctx, UserId u, ItemId i, Rng& rng);

}  // namespace trustrec
