#include "trustrec/dataset.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace trustrec {

namespace {
constexpr auto kDropped = std::numeric_limits<std::uint32_t>::max();
}

Dataset top_k_reduce(const Dataset& ds, std::size_t k) {
    if (k == 0) throw std::invalid_argument("top_k_reduce: k must be at least 1");
    const std::size_t items = ds.item_count();
    const std::size_t users = ds.user_count();

    std::vector<std::uint32_t> order(items);
    std::iota(order.begin(), order.end(), 0U);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return ds.ratings.raters_of(ItemId{a}).size() > ds.ratings.raters_of(ItemId{b}).size();
    });
    order.resize(std::min(k, items));

    std::vector<bool> keep_item(items, false);
    for (auto i : order) keep_item[i] = true;
    std::vector<std::uint32_t> item_map(items, kDropped);
    std::uint32_t next_item = 0;
    for (std::size_t i = 0; i < items; ++i)
        if (keep_item[i]) item_map[i] = next_item++;

    std::vector<bool> keep_user(users, false);
    for (std::size_t i = 0; i < items; ++i)
        if (keep_item[i])
            for (const auto& r : ds.ratings.raters_of(ItemId{static_cast<std::uint32_t>(i)}))
                keep_user[r.user.index()] = true;
    std::vector<std::uint32_t> user_map(users, kDropped);
    std::uint32_t next_user = 0;
    std::size_t first_synthetic = 0;
    for (std::size_t u = 0; u < users; ++u) {
        if (!keep_user[u]) continue;
        if (u < ds.first_synthetic_user) ++first_synthetic;
        user_map[u] = next_user++;
    }

    std::vector<Edge> edges;
    for (const auto& [from, to] : ds.graph.edges()) {
        if (user_map[from.index()] == kDropped || user_map[to.index()] == kDropped) continue;
        edges.emplace_back(UserId{user_map[from.index()]}, UserId{user_map[to.index()]});
    }

    RatingsTable ratings(ds.ratings.scale(), next_user, next_item);
    std::vector<std::string> user_names(next_user);
    std::vector<std::string> item_names(next_item);
    for (std::size_t u = 0; u < users; ++u) {
        if (user_map[u] == kDropped) continue;
        user_names[user_map[u]] = ds.user_names.at(u);
        for (const auto& e : ds.ratings.items_of(UserId{static_cast<std::uint32_t>(u)})) {
            const auto mapped = item_map[e.item.index()];
            if (mapped != kDropped) ratings.insert(UserId{user_map[u]}, ItemId{mapped}, e.value);
        }
    }
    for (std::size_t i = 0; i < items; ++i)
        if (item_map[i] != kDropped) item_names[item_map[i]] = ds.item_names.at(i);

    return Dataset{ds.name,
                   TrustGraph(next_user, edges),
                   std::move(ratings),
                   std::move(user_names),
                   std::move(item_names),
                   first_synthetic};
}

}  // namespace trustrec
