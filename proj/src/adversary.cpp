#include "trustrec/adversary.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace trustrec {

void AttackConfig::validate(const RatingScale& scale) const {
    if (celebrity_rank == 0) throw std::invalid_argument("attack: celebrity rank is 1-based");
    if (fake_rating && !scale.contains(*fake_rating))
        throw std::invalid_argument("attack: fake rating " + std::to_string(*fake_rating) + " is off-scale");
}

UserId select_celebrity(const TrustGraph& g, std::size_t rank) {
    const std::size_t n = g.node_count();
    if (rank == 0 || rank > n)
        throw std::invalid_argument("select_celebrity: rank " + std::to_string(rank) + " outside 1.." +
                                    std::to_string(n));
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    std::stable_sort(order.begin(), order.end(), [&g](std::uint32_t a, std::uint32_t b) {
        return g.in_degree(UserId{a}) > g.in_degree(UserId{b});
    });
    return UserId{order[rank - 1]};
}

Dataset inject_fake_accounts(const Dataset& ds, const AttackConfig& cfg) {
    cfg.validate(ds.ratings.scale());
    if (cfg.fake_count == 0) return ds;

    const UserId celebrity = select_celebrity(ds.graph, cfg.celebrity_rank);
    const std::size_t base = ds.user_count();
    const std::size_t total = base + cfg.fake_count;
    const double value = cfg.rating_on(ds.ratings.scale());

    auto edges = ds.graph.edges();
    RatingsTable ratings(ds.ratings.scale(), total, ds.item_count());
    for (std::size_t u = 0; u < base; ++u) {
        const UserId uid{static_cast<std::uint32_t>(u)};
        for (const auto& e : ds.ratings.items_of(uid)) ratings.insert(uid, e.item, e.value);
    }

    std::vector<std::string> names = ds.user_names;
    std::unordered_set<std::string> taken(names.begin(), names.end());
    for (std::size_t f = 0; f < cfg.fake_count; ++f) {
        const UserId fake{static_cast<std::uint32_t>(base + f)};
        edges.emplace_back(fake, celebrity);
        if (cfg.bidirectional) edges.emplace_back(celebrity, fake);
        for (std::size_t i = 0; i < ds.item_count(); ++i)
            ratings.insert(fake, ItemId{static_cast<std::uint32_t>(i)}, value);

        std::string name = "fake_" + std::to_string(f + 1);
        while (taken.contains(name)) name += "_";
        taken.insert(name);
        names.push_back(std::move(name));
    }

    return Dataset{ds.name, TrustGraph(total, edges), std::move(ratings), std::move(names), ds.item_names,
                   std::min(ds.first_synthetic_user, base)};
}

double reduction_pct(double normal_mae, double adversarial_mae) {
    if (!(normal_mae > 0.0)) throw std::invalid_argument("reduction_pct: normal MAE must be positive");
    return 100.0 * (adversarial_mae - normal_mae) / normal_mae;
}

}  // namespace trustrec
