#include "trustrec/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace trustrec {

void RecommenderSpec::validate() const {
    if (k_samples == 0) throw std::invalid_argument("recommender: k_samples must be at least 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("recommender: alpha must lie in [0, 1]");
    const bool neighbor = algorithm == Algorithm::NeighborMean || algorithm == Algorithm::NeighborMedian ||
                          algorithm == Algorithm::NeighborMode;
    if (writeback && !neighbor)
        throw std::invalid_argument("recommender: writeback is only defined for neighbour mean/median/mode");
    user_sim.validate();
}

namespace {

RecommenderSpec make(std::string name, Algorithm a) {
    RecommenderSpec s;
    s.name = std::move(name);
    s.algorithm = a;
    return s;
}

RecommenderSpec make_wa(std::string name, Algorithm a, UserSimilaritySpec sim) {
    auto s = make(std::move(name), a);
    s.user_sim = sim;
    return s;
}

const std::vector<RecommenderSpec>& roster() {
    static const std::vector<RecommenderSpec> specs = [] {
        using M = UserMetric;
        std::vector<RecommenderSpec> r;
        r.push_back(make("random", Algorithm::Random));
        r.push_back(make("universal_random", Algorithm::UniversalRandom));
        for (auto [name, alg] : {std::pair{"neighbor_mean", Algorithm::NeighborMean},
                                 std::pair{"neighbor_median", Algorithm::NeighborMedian},
                                 std::pair{"neighbor_mode", Algorithm::NeighborMode}}) {
            auto s = make(name, alg);
            s.writeback = true;
            r.push_back(s);
        }
        r.push_back(make("jaccard_weighted_neighbors", Algorithm::JaccardWeightedNeighbors));
        r.push_back(make("mc_random_walk", Algorithm::MCRandomWalk));
        r.push_back(make("jaccard_mc_random_walk", Algorithm::JaccardMCRandomWalk));
        r.push_back(make_wa("jmom", Algorithm::MoM, UserSimilaritySpec::of(M::JaccardModified)));
        r.push_back(make_wa("jaccard_wa", Algorithm::WA, UserSimilaritySpec::of(M::JaccardModified)));
        r.push_back(make_wa("item_jaccard_wa", Algorithm::WA, UserSimilaritySpec::of(M::JaccardItem)));
        r.push_back(make_wa("item_rating_difference_wa", Algorithm::WA, UserSimilaritySpec::of(M::RatingDifference)));
        {
            auto s = make("intra_item_wa", Algorithm::IntraItemWA);
            s.item_sim = ItemSimilaritySpec{ItemMetric::IntraItemJaccard};
            r.push_back(s);
            s.name = "intra_item_wa_pearson";
            s.item_sim = ItemSimilaritySpec{ItemMetric::PearsonSigmoid};
            r.push_back(s);
        }
        r.push_back(make("jaccard_intra_item_wa", Algorithm::JaccardIntraItemWA));
        r.push_back(make_wa("wird_wa", Algorithm::WA, UserSimilaritySpec::of(M::WeightedRatingDifference)));
        r.push_back(make_wa("jaccard_item_jaccard_wa_add", Algorithm::WA, UserSimilaritySpec::additive(0.5)));
        r.push_back(make_wa("jaccard_item_jaccard_wa_max", Algorithm::WA, UserSimilaritySpec::of(M::MaxCombo)));
        r.push_back(make_wa("jaccard_item_jaccard_wa_mul", Algorithm::WA, UserSimilaritySpec::of(M::ProductCombo)));
        r.push_back(make("all_combined_wa", Algorithm::AllCombinedWA));
        r.push_back(make_wa("jwird_wa", Algorithm::WA,
                            UserSimilaritySpec::of(M::JaccardPlusWeightedRatingDifference)));
        return r;
    }();
    return specs;
}

Prediction from(std::optional<double> v, const RatingScale& scale, Rng& rng) {
    if (v) return Prediction{*v, false};
    return uniform_fallback(scale, rng);
}

// Lazily evaluated itemSim(target, j) for one table state.
class ItemSimRow {
public:
    ItemSimRow(const ItemSimilaritySpec& spec, const RatingsTable& t, ItemId target)
        : spec_(spec), table_(t), target_(target),
          values_(t.item_count(), std::numeric_limits<double>::quiet_NaN()) {}

    double operator()(ItemId j) {
        double& v = values_[j.index()];
        if (std::isnan(v)) v = j == target_ ? 1.0 : item_similarity(spec_, table_, target_, j);
        return v;
    }

private:
    ItemSimilaritySpec spec_;
    const RatingsTable& table_;
    ItemId target_;
    std::vector<double> values_;
};

std::optional<double> draw_from_levels(const std::vector<std::size_t>& counts, const RatingScale& scale, Rng& rng) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) return std::nullopt;
    auto pick = rng.uniform_index(total);
    for (std::size_t l = 0; l < counts.size(); ++l) {
        if (pick < counts[l]) return scale.value_at(l);
        pick -= counts[l];
    }
    return std::nullopt;
}

}  // namespace

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& s : roster()) n.push_back(s.name);
        return n;
    }();
    return names;
}

RecommenderSpec named_recommender(const std::string& name) {
    for (const auto& s : roster())
        if (s.name == name) return s;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

const std::vector<double>& WalkCache::cumulative(UserId node) {
    {
        std::shared_lock lock(mutex_);
        if (auto it = weights_.find(node.value); it != weights_.end()) return it->second;
    }
    std::vector<double> cum;
    double acc = 0.0;
    for (UserId w : graph_->out_neighbors(node)) {
        acc += jaccard_modified(*graph_, node, w);
        cum.push_back(acc);
    }
    std::unique_lock lock(mutex_);
    return weights_.try_emplace(node.value, std::move(cum)).first->second;
}

RatingBuckets::RatingBuckets(const RatingScale& scale) : scale_(scale), mass_(scale.levels(), 0.0) {}

void RatingBuckets::add(double rating, double weight) {
    mass_[scale_.nearest_level(rating)] += weight;
}

double RatingBuckets::total() const {
    double t = 0.0;
    for (double m : mass_) t += m;
    return t;
}

std::optional<double> RatingBuckets::weighted_average() const {
    const double t = total();
    if (!(t > 0.0)) return std::nullopt;
    double acc = 0.0;
    std::size_t lo = mass_.size();
    std::size_t hi = 0;
    for (std::size_t l = 0; l < mass_.size(); ++l) {
        if (mass_[l] == 0.0) continue;
        acc += mass_[l] * scale_.value_at(l);
        lo = std::min(lo, l);
        hi = l;
    }
    // rounding can push the quotient a hair past the contributing range
    return std::clamp(acc / t, scale_.value_at(lo), scale_.value_at(hi));
}

std::optional<double> RatingBuckets::argmax() const {
    std::optional<std::size_t> best;
    for (std::size_t l = 0; l < mass_.size(); ++l)
        if (mass_[l] > 0.0 && (!best || mass_[l] > mass_[*best])) best = l;
    if (!best) return std::nullopt;
    return scale_.value_at(*best);
}

Prediction uniform_fallback(const RatingScale& scale, Rng& rng) {
    return Prediction{scale.value_at(rng.uniform_index(scale.levels())), true};
}

Prediction predict_random(const RatingScale& scale, Rng& rng) {
    return Prediction{scale.value_at(rng.uniform_index(scale.levels())), false};
}

Prediction predict_universal_random(const RatingsTable& t, ItemId i, Rng& rng) {
    const auto& scale = t.scale();
    std::vector<std::size_t> counts(scale.levels(), 0);
    for (const auto& r : t.raters_of(i)) ++counts[scale.nearest_level(r.value)];
    if (auto v = draw_from_levels(counts, scale, rng)) return Prediction{*v, false};

    for (std::size_t u = 0; u < t.user_count(); ++u)
        for (const auto& e : t.items_of(UserId{static_cast<std::uint32_t>(u)})) ++counts[scale.nearest_level(e.value)];
    if (auto v = draw_from_levels(counts, scale, rng)) return Prediction{*v, false};
    return uniform_fallback(scale, rng);
}

Prediction predict_neighbor_central(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                                    CentralStat stat, Rng& rng) {
    std::vector<double> values;
    for (UserId v : g.out_neighbors(u))
        if (auto r = t.rating(v, i)) values.push_back(*r);
    const auto& scale = t.scale();
    if (values.empty()) return uniform_fallback(scale, rng);

    switch (stat) {
        case CentralStat::Mean: {
            double sum = 0.0;
            for (double v : values) sum += v;
            return Prediction{sum / static_cast<double>(values.size()), false};
        }
        case CentralStat::Median: {
            std::sort(values.begin(), values.end());
            const auto n = values.size();
            const double m = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
            return Prediction{m, false};
        }
        case CentralStat::Mode: {
            std::vector<std::size_t> counts(scale.levels(), 0);
            for (double v : values) ++counts[scale.nearest_level(v)];
            const auto top = *std::max_element(counts.begin(), counts.end());
            if (std::count(counts.begin(), counts.end(), top) > 1) return uniform_fallback(scale, rng);
            const auto level = static_cast<std::size_t>(std::find(counts.begin(), counts.end(), top) - counts.begin());
            return Prediction{scale.value_at(level), false};
        }
    }
    throw std::logic_error("neighbor central: unhandled statistic");
}

Prediction predict_neighbor_central(const TrustGraph& g, RatingsTable& working, UserId u, ItemId i,
                                    CentralStat stat, Rng& rng, bool writeback) {
    const auto p = predict_neighbor_central(g, static_cast<const RatingsTable&>(working), u, i, stat, rng);
    if (writeback) working.insert(u, i, working.scale().snap(p.value));
    return p;
}

Prediction predict_jaccard_weighted_neighbors(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                                              Rng& rng) {
    RatingBuckets buckets(t.scale());
    for (UserId v : g.out_neighbors(u))
        if (auto r = t.rating(v, i)) buckets.add(*r, jaccard_modified(g, u, v));
    return from(buckets.argmax(), t.scale(), rng);
}

Prediction predict_mc_random_walk(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                                  const WalkParams& params, Rng& rng, WalkCache* cache) {
    if (params.samples == 0) throw std::invalid_argument("random walk: samples must be at least 1");
    if (!(params.alpha >= 0.0 && params.alpha <= 1.0)) throw std::invalid_argument("random walk: alpha outside [0, 1]");
    g.out_neighbors(u);  // id check

    const auto& scale = t.scale();
    const auto raters = t.raters_of(i);
    const std::size_t max_depth = 10 * g.node_count();

    std::unique_ptr<WalkCache> local;
    if (params.jaccard_weighted && !cache) {
        local = std::make_unique<WalkCache>(g);
        cache = local.get();
    }

    // One traversal; nullopt is a "none" sample.
    auto traverse = [&]() -> std::optional<double> {
        UserId current = u;
        for (std::size_t depth = 0;; ++depth) {
            if (auto r = t.rating(current, i)) return *r;
            const double jump = std::min(1.0, static_cast<double>(depth) * params.alpha);
            if (jump > 0.0 && (jump >= 1.0 || rng.uniform01() < jump)) {
                if (raters.empty()) return std::nullopt;
                return raters[rng.uniform_index(raters.size())].value;
            }
            const auto next = g.out_neighbors(current);
            if (next.empty() || depth >= max_depth) return std::nullopt;
            std::size_t pick = 0;
            if (params.jaccard_weighted) {
                const auto& cum = cache->cumulative(current);
                const double total = cum.back();
                if (total > 0.0) {
                    const double x = rng.uniform01() * total;
                    pick = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), x) - cum.begin());
                    pick = std::min(pick, next.size() - 1);
                } else {
                    pick = rng.uniform_index(next.size());
                }
            } else {
                pick = rng.uniform_index(next.size());
            }
            current = next[pick];
        }
    };

    double sum = 0.0;
    std::size_t replaced = 0;
    for (std::size_t k = 0; k < params.samples; ++k) {
        if (auto r = traverse()) {
            sum += *r;
        } else {
            sum += uniform_fallback(scale, rng).value;
            ++replaced;
        }
    }
    return Prediction{sum / static_cast<double>(params.samples), replaced == params.samples};
}

namespace {

RatingBuckets wa_buckets(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i, const UserSimilaritySpec& sim) {
    const SimilarityRow row(sim, g, t, u, i);
    RatingBuckets buckets(t.scale());
    for (const auto& r : t.raters_of(i)) {
        if (r.user == u) continue;
        buckets.add(r.value, row(r.user));
    }
    return buckets;
}

// Users v from `row.support()` (everyone else has zero similarity), each
// item j they rated adds sim(u, v) * J_II(i, j).
RatingBuckets cross_item_buckets(const SimilarityRow& row, const RatingsTable& t, ItemId i) {
    ItemSimRow item_sim(ItemSimilaritySpec{ItemMetric::IntraItemJaccard}, t, i);
    RatingBuckets buckets(t.scale());
    for (UserId v : row.support()) {
        const double user_weight = row(v);
        if (user_weight == 0.0) continue;
        for (const auto& e : t.items_of(v)) buckets.add(e.value, user_weight * item_sim(e.item));
    }
    return buckets;
}

}  // namespace

Prediction predict_wa(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i, const UserSimilaritySpec& sim,
                      Rng& rng) {
    return from(wa_buckets(g, t, u, i, sim).weighted_average(), t.scale(), rng);
}

Prediction predict_mom(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i, const UserSimilaritySpec& sim,
                       Rng& rng) {
    return from(wa_buckets(g, t, u, i, sim).argmax(), t.scale(), rng);
}

Prediction predict_intra_item_wa(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i,
                                 const ItemSimilaritySpec& sim, Rng& rng) {
    ItemSimRow item_sim(sim, t, i);
    RatingBuckets buckets(t.scale());
    for (UserId v : g.out_neighbors(u))
        for (const auto& e : t.items_of(v)) buckets.add(e.value, item_sim(e.item));
    return from(buckets.weighted_average(), t.scale(), rng);
}

Prediction predict_jaccard_intra_item_wa(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i, Rng& rng) {
    const SimilarityRow row(UserSimilaritySpec::of(UserMetric::JaccardModified), g, t, u);
    return from(cross_item_buckets(row, t, i).weighted_average(), t.scale(), rng);
}

Prediction predict_all_combined(const TrustGraph& g, const RatingsTable& t, UserId u, ItemId i, Rng& rng) {
    const SimilarityRow row(UserSimilaritySpec::of(UserMetric::AllCombinedUserSim), g, t, u);
    return from(cross_item_buckets(row, t, i).weighted_average(), t.scale(), rng);
}

Prediction predict(const RecommenderSpec& spec, const PredictionContext& ctx, UserId u, ItemId i, Rng& rng) {
    const auto& g = ctx.graph;
    const auto& t = ctx.ratings;
    switch (spec.algorithm) {
        case Algorithm::Random: return predict_random(t.scale(), rng);
        case Algorithm::UniversalRandom: return predict_universal_random(t, i, rng);
        case Algorithm::NeighborMean: return predict_neighbor_central(g, t, u, i, CentralStat::Mean, rng);
        case Algorithm::NeighborMedian: return predict_neighbor_central(g, t, u, i, CentralStat::Median, rng);
        case Algorithm::NeighborMode: return predict_neighbor_central(g, t, u, i, CentralStat::Mode, rng);
        case Algorithm::JaccardWeightedNeighbors: return predict_jaccard_weighted_neighbors(g, t, u, i, rng);
        case Algorithm::MCRandomWalk:
        case Algorithm::JaccardMCRandomWalk: {
            const WalkParams params{spec.k_samples, spec.alpha, spec.algorithm == Algorithm::JaccardMCRandomWalk};
            return predict_mc_random_walk(g, t, u, i, params, rng, ctx.walk_cache);
        }
        case Algorithm::MoM: return predict_mom(g, t, u, i, spec.user_sim, rng);
        case Algorithm::WA: return predict_wa(g, t, u, i, spec.user_sim, rng);
        case Algorithm::IntraItemWA: return predict_intra_item_wa(g, t, u, i, spec.item_sim, rng);
        case Algorithm::JaccardIntraItemWA: return predict_jaccard_intra_item_wa(g, t, u, i, rng);
        case Algorithm::AllCombinedWA: return predict_all_combined(g, t, u, i, rng);
    }
    throw std::logic_error("predict: unhandled algorithm");
}

}  // namespace trustrec
