#include "trustrec/similarity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace trustrec {

namespace {

void require_distinct(UserId u, UserId v, const char* what) {
    if (u == v) throw std::invalid_argument(std::string(what) + ": self-similarity is undefined");
}

template <class A, class B, class KeyA, class KeyB>
std::size_t intersection_size(const A& a, const B& b, KeyA ka, KeyB kb) {
    std::size_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ka(*ia) < kb(*ib)) ++ia;
        else if (kb(*ib) < ka(*ia)) ++ib;
        else {
            ++n;
            ++ia;
            ++ib;
        }
    }
    return n;
}

// count / union; both sides of every route go through here.
double ratio(std::size_t common, std::size_t size_a, std::size_t size_b) {
    const std::size_t uni = size_a + size_b - common;
    if (uni == 0) return 0.0;
    return static_cast<double>(common) / static_cast<double>(uni);
}

double add_adjacency_bonus(double j, bool adjacent, std::size_t common, std::size_t size_a, std::size_t size_b) {
    const std::size_t uni = size_a + size_b - common;
    if (adjacent && uni > 0) j += 1.0 / static_cast<double>(uni);
    return j;
}

double rd_value(double diff_sum, std::size_t common, double span) {
    if (common == 0) return 0.0;
    return 1.0 - diff_sum / (span * static_cast<double>(common));
}

double wrd_value(double num, double den, double span) {
    if (den == 0.0) return 0.0;
    return 1.0 - num / (span * den);
}

auto user_key = [](UserId x) { return x; };
auto item_key = [](const RatedItem& e) { return e.item; };
auto rater_key = [](const Rater& r) { return r.user; };

}  // namespace

double jaccard(const TrustGraph& g, UserId u, UserId v) {
    require_distinct(u, v, "jaccard");
    auto a = g.neighbors_undirected(u);
    auto b = g.neighbors_undirected(v);
    return ratio(intersection_size(a, b, user_key, user_key), a.size(), b.size());
}

double jaccard_modified(const TrustGraph& g, UserId u, UserId v) {
    require_distinct(u, v, "jaccard_modified");
    auto a = g.neighbors_undirected(u);
    auto b = g.neighbors_undirected(v);
    const auto common = intersection_size(a, b, user_key, user_key);
    return add_adjacency_bonus(ratio(common, a.size(), b.size()), g.adjacent_undirected(u, v), common,
                               a.size(), b.size());
}

double jaccard_item(const RatingsTable& t, UserId u, UserId v) {
    require_distinct(u, v, "jaccard_item");
    auto a = t.items_of(u);
    auto b = t.items_of(v);
    return ratio(intersection_size(a, b, item_key, item_key), a.size(), b.size());
}

double rating_difference(const RatingsTable& t, UserId u, UserId v) {
    require_distinct(u, v, "rating_difference");
    auto a = t.items_of(u);
    auto b = t.items_of(v);
    double sum = 0.0;
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->item < ib->item) ++ia;
        else if (ib->item < ia->item) ++ib;
        else {
            sum += std::abs(ia->value - ib->value);
            ++common;
            ++ia;
            ++ib;
        }
    }
    return rd_value(sum, common, t.scale().span());
}

double intra_item_jaccard(const RatingsTable& t, ItemId i, ItemId j) {
    if (i == j) {
        t.raters_of(i);  // id check
        return 1.0;
    }
    auto a = t.raters_of(i);
    auto b = t.raters_of(j);
    return ratio(intersection_size(a, b, rater_key, rater_key), a.size(), b.size());
}

double weighted_rating_difference(const RatingsTable& t, UserId u, UserId v, ItemId target) {
    require_distinct(u, v, "weighted_rating_difference");
    auto a = t.items_of(u);
    auto b = t.items_of(v);
    double num = 0.0;
    double den = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->item < ib->item) ++ia;
        else if (ib->item < ia->item) ++ib;
        else {
            const double w = intra_item_jaccard(t, target, ia->item);
            num += w * std::abs(ia->value - ib->value);
            den += w;
            ++ia;
            ++ib;
        }
    }
    return wrd_value(num, den, t.scale().span());
}

double pearson_item_sim(const RatingsTable& t, ItemId i, ItemId j) {
    if (i == j) {
        t.raters_of(i);
        return 1.0;
    }
    auto a = t.raters_of(i);
    auto b = t.raters_of(j);
    double cross = 0.0;
    double var_i = 0.0;
    double var_j = 0.0;
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->user < ib->user) ++ia;
        else if (ib->user < ia->user) ++ib;
        else {
            const double mean = *t.user_mean(ia->user);
            const double di = ia->value - mean;
            const double dj = ib->value - mean;
            cross += di * dj;
            var_i += di * di;
            var_j += dj * dj;
            ++common;
            ++ia;
            ++ib;
        }
    }
    if (common < 2 || var_i == 0.0 || var_j == 0.0) return 0.0;
    const double rho = cross / std::sqrt(var_i * var_j);
    const double confidence = 1.0 / (1.0 + std::exp(-static_cast<double>(common) / 2.0));
    return std::max(0.0, confidence * rho);
}

void UserSimilaritySpec::validate() const {
    if (metric == UserMetric::AdditiveCombo) {
        if (!alpha) throw std::invalid_argument("additive combination needs alpha");
        if (!(*alpha >= 0.0 && *alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    } else if (alpha) {
        throw std::invalid_argument("alpha only applies to the additive combination");
    }
}

bool UserSimilaritySpec::needs_target() const {
    return metric == UserMetric::WeightedRatingDifference ||
           metric == UserMetric::JaccardPlusWeightedRatingDifference;
}

bool UserSimilaritySpec::graph_only() const {
    return metric == UserMetric::Jaccard || metric == UserMetric::JaccardModified;
}

std::string to_string(UserMetric m) {
    switch (m) {
        case UserMetric::Jaccard: return "jaccard";
        case UserMetric::JaccardModified: return "jaccard_modified";
        case UserMetric::JaccardItem: return "jaccard_item";
        case UserMetric::RatingDifference: return "rating_difference";
        case UserMetric::AdditiveCombo: return "additive_combo";
        case UserMetric::MaxCombo: return "max_combo";
        case UserMetric::ProductCombo: return "product_combo";
        case UserMetric::AllCombinedUserSim: return "all_combined";
        case UserMetric::WeightedRatingDifference: return "weighted_rating_difference";
        case UserMetric::JaccardPlusWeightedRatingDifference: return "jaccard_plus_wrd";
    }
    return "?";
}

std::string to_string(ItemMetric m) {
    return m == ItemMetric::IntraItemJaccard ? "intra_item_jaccard" : "pearson_sigmoid";
}

double combine(const UserSimilaritySpec& spec, double jaccard_mod, double jaccard_item_score) {
    switch (spec.metric) {
        case UserMetric::AdditiveCombo: {
            const double a = spec.alpha.value();
            return a * jaccard_mod + (1.0 - a) * jaccard_item_score;
        }
        case UserMetric::MaxCombo: return std::max(jaccard_mod, jaccard_item_score);
        case UserMetric::ProductCombo: return jaccard_mod * jaccard_item_score;
        case UserMetric::AllCombinedUserSim: return jaccard_mod + jaccard_item_score;
        default: throw std::invalid_argument("combine: " + to_string(spec.metric) + " is not a combination");
    }
}

double user_similarity(const UserSimilaritySpec& spec, const TrustGraph& g, const RatingsTable& t, UserId u,
                       UserId v, std::optional<ItemId> target) {
    spec.validate();
    if (spec.needs_target() && !target) throw std::invalid_argument(to_string(spec.metric) + " needs a target item");
    switch (spec.metric) {
        case UserMetric::Jaccard: return jaccard(g, u, v);
        case UserMetric::JaccardModified: return jaccard_modified(g, u, v);
        case UserMetric::JaccardItem: return jaccard_item(t, u, v);
        case UserMetric::RatingDifference: return rating_difference(t, u, v);
        case UserMetric::AdditiveCombo:
        case UserMetric::MaxCombo:
        case UserMetric::ProductCombo:
        case UserMetric::AllCombinedUserSim:
            return combine(spec, jaccard_modified(g, u, v), jaccard_item(t, u, v));
        case UserMetric::WeightedRatingDifference: return weighted_rating_difference(t, u, v, *target);
        case UserMetric::JaccardPlusWeightedRatingDifference:
            return jaccard_modified(g, u, v) + weighted_rating_difference(t, u, v, *target);
    }
    throw std::logic_error("user_similarity: unhandled metric");
}

double item_similarity(const ItemSimilaritySpec& spec, const RatingsTable& t, ItemId i, ItemId j) {
    return spec.metric == ItemMetric::IntraItemJaccard ? intra_item_jaccard(t, i, j) : pearson_item_sim(t, i, j);
}

// --- SimilarityCache ---

std::size_t SimilarityCache::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::uint64_t x) {
        h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(k.metric);
    mix(k.alpha_bits);
    mix(k.lo);
    mix(k.hi);
    mix(k.target);
    return static_cast<std::size_t>(h);
}

void SimilarityCache::sync_revision() {
    if (!revision_valid_ || table_->revision() != revision_seen_) {
        rating_.clear();
        revision_seen_ = table_->revision();
        revision_valid_ = true;
    }
}

double SimilarityCache::user(const UserSimilaritySpec& spec, UserId u, UserId v, std::optional<ItemId> target) {
    const auto lo = std::min(u, v);
    const auto hi = std::max(u, v);
    const Key key{static_cast<std::uint32_t>(spec.metric),
                  spec.alpha ? std::bit_cast<std::uint64_t>(*spec.alpha) : 0ULL, lo.value, hi.value,
                  target ? target->value + 1 : 0U};
    auto& memo = spec.graph_only() ? structural_ : (sync_revision(), rating_);
    if (auto it = memo.find(key); it != memo.end()) {
        ++hits_;
        return it->second;
    }
    ++misses_;
    const double value = user_similarity(spec, *graph_, *table_, lo, hi, target);
    memo.emplace(key, value);
    return value;
}

double SimilarityCache::item(const ItemSimilaritySpec& spec, ItemId i, ItemId j) {
    sync_revision();
    const auto lo = std::min(i, j);
    const auto hi = std::max(i, j);
    const Key key{100U + static_cast<std::uint32_t>(spec.metric), 0ULL, lo.value, hi.value, 0U};
    if (auto it = rating_.find(key); it != rating_.end()) {
        ++hits_;
        return it->second;
    }
    ++misses_;
    const double value = item_similarity(spec, *table_, lo, hi);
    rating_.emplace(key, value);
    return value;
}

// --- SimilarityRow ---

SimilarityRow::SimilarityRow(const UserSimilaritySpec& spec, const TrustGraph& g, const RatingsTable& t, UserId u,
                             std::optional<ItemId> target)
    : spec_(spec), graph_(&g), table_(&t), user_(u) {
    spec_.validate();
    if (spec_.needs_target() && !target)
        throw std::invalid_argument(to_string(spec_.metric) + " needs a target item");
    switch (spec_.metric) {
        case UserMetric::Jaccard:
        case UserMetric::JaccardModified: use_graph_ = true; break;
        case UserMetric::JaccardItem: use_items_ = true; break;
        case UserMetric::RatingDifference: use_items_ = use_diff_ = true; break;
        case UserMetric::AdditiveCombo:
        case UserMetric::MaxCombo:
        case UserMetric::ProductCombo:
        case UserMetric::AllCombinedUserSim: use_graph_ = use_items_ = true; break;
        case UserMetric::WeightedRatingDifference: use_weighted_ = true; break;
        case UserMetric::JaccardPlusWeightedRatingDifference: use_graph_ = use_weighted_ = true; break;
    }

    const std::size_t n = g.node_count();
    std::vector<bool> touched(n, false);
    auto touch = [&touched](UserId x) { touched[x.index()] = true; };

    if (use_graph_) {
        common_neighbors_.assign(n, 0);
        adjacent_.assign(n, false);
        for (UserId w : g.neighbors_undirected(u)) {
            adjacent_[w.index()] = true;
            touch(w);
            for (UserId x : g.neighbors_undirected(w)) {
                ++common_neighbors_[x.index()];
                touch(x);
            }
        }
    }
    if (use_items_ || use_weighted_) {
        if (use_items_) common_items_.assign(n, 0);
        if (use_diff_) diff_sum_.assign(n, 0.0);
        if (use_weighted_) {
            weighted_num_.assign(n, 0.0);
            weighted_den_.assign(n, 0.0);
        }
        // Items of u ascending, raters of each item: per rater x the terms
        // arrive in ascending item order, as in the pairwise merge.
        for (const auto& mine : t.items_of(u)) {
            const double w = use_weighted_ ? intra_item_jaccard(t, *target, mine.item) : 0.0;
            for (const auto& other : t.raters_of(mine.item)) {
                const auto x = other.user.index();
                touch(other.user);
                const double diff = std::abs(mine.value - other.value);
                if (use_items_) ++common_items_[x];
                if (use_diff_) diff_sum_[x] += diff;
                if (use_weighted_) {
                    weighted_num_[x] += w * diff;
                    weighted_den_[x] += w;
                }
            }
        }
    }
    for (std::size_t x = 0; x < n; ++x)
        if (touched[x] && x != u.index()) support_.push_back(UserId{static_cast<std::uint32_t>(x)});
}

double SimilarityRow::jaccard_mod_of(UserId v) const {
    const auto common = common_neighbors_[v.index()];
    const auto a = graph_->neighbors_undirected(user_).size();
    const auto b = graph_->neighbors_undirected(v).size();
    const double j = ratio(common, a, b);
    if (spec_.metric == UserMetric::Jaccard) return j;
    return add_adjacency_bonus(j, adjacent_[v.index()], common, a, b);
}

double SimilarityRow::jaccard_item_of(UserId v) const {
    return ratio(common_items_[v.index()], table_->items_of(user_).size(), table_->items_of(v).size());
}

double SimilarityRow::weighted_rd_of(UserId v) const {
    return wrd_value(weighted_num_[v.index()], weighted_den_[v.index()], table_->scale().span());
}

double SimilarityRow::operator()(UserId v) const {
    require_distinct(user_, v, "similarity row");
    if (v.index() >= graph_->node_count()) throw std::out_of_range("similarity row: unknown user");
    switch (spec_.metric) {
        case UserMetric::Jaccard:
        case UserMetric::JaccardModified: return jaccard_mod_of(v);
        case UserMetric::JaccardItem: return jaccard_item_of(v);
        case UserMetric::RatingDifference:
            return rd_value(diff_sum_[v.index()], common_items_[v.index()], table_->scale().span());
        case UserMetric::AdditiveCombo:
        case UserMetric::MaxCombo:
        case UserMetric::ProductCombo:
        case UserMetric::AllCombinedUserSim: return combine(spec_, jaccard_mod_of(v), jaccard_item_of(v));
        case UserMetric::WeightedRatingDifference: return weighted_rd_of(v);
        case UserMetric::JaccardPlusWeightedRatingDifference: return jaccard_mod_of(v) + weighted_rd_of(v);
    }
    throw std::logic_error("similarity row: unhandled metric");
}

}  // namespace trustrec
