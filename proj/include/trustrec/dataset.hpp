#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "trustrec/ratings_table.hpp"
#include "trustrec/trust_graph.hpp"

namespace trustrec {

/// Trust graph + ratings over one user set, plus the dense-to-source id maps.
struct Dataset {
    std::string name;
    TrustGraph graph;
    RatingsTable ratings;
    std::vector<std::string> user_names;  // dense UserId -> source id
    std::vector<std::string> item_names;  // dense ItemId -> source id
    /// Users at or above this id were injected (fake accounts); equals the
    /// user count for an untouched dataset.
    std::size_t first_synthetic_user = 0;

    std::size_t user_count() const { return graph.node_count(); }
    std::size_t item_count() const { return ratings.item_count(); }
    bool is_synthetic(UserId u) const { return u.index() >= first_synthetic_user; }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Keeps the k items with most raters (ties: smaller ItemId), the users who
/// rated any of them, the graph induced on those users and the ratings on
/// kept items. Surviving ids are renumbered densely in their original order,
/// which makes the reduction idempotent. k >= item count keeps every item.
/// Throws std::invalid_argument for k == 0.
Dataset top_k_reduce(const Dataset& ds, std::size_t k);

}  // namespace trustrec
