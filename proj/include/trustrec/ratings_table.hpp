#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "trustrec/ids.hpp"
#include "trustrec/rating_scale.hpp"

namespace trustrec {

struct RatedItem {
    ItemId item;
    double value;
    friend bool operator==(const RatedItem&, const RatedItem&) = default;
};

struct Rater {
    UserId user;
    double value;
    friend bool operator==(const Rater&, const Rater&) = default;
};

/// Sparse (user, item) -> rating map with both directions indexed.
///
/// I(u) is `items_of(u)` and S(i) is `raters_of(i)`; both are kept sorted by
/// id and always describe exactly the same set of triples. Stored values are
/// the canonical scale values, so equality is exact.
class RatingsTable {
public:
    RatingsTable(RatingScale scale, std::size_t user_count, std::size_t item_count);

    const RatingScale& scale() const { return scale_; }
    std::size_t user_count() const { return by_user_.size(); }
    std::size_t item_count() const { return by_item_.size(); }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    std::optional<double> rating(UserId u, ItemId i) const;
    bool has(UserId u, ItemId i) const { return rating(u, i).has_value(); }

    std::span<const RatedItem> items_of(UserId u) const;
    std::span<const Rater> raters_of(ItemId i) const;

    /// Inserts or overwrites. Throws std::invalid_argument for an off-scale
    /// value and std::out_of_range for unknown ids.
    void insert(UserId u, ItemId i, double r);

    /// Removes and returns the rating. Throws std::out_of_range if absent.
    double remove(UserId u, ItemId i);

    /// Bumped on every mutation; lets caches notice the table changed.
    std::uint64_t revision() const { return revision_; }

    /// Mean of all of u's ratings; nullopt when u has none.
    std::optional<double> user_mean(UserId u) const;

    /// Content equality (revision is ignored).
    friend bool operator==(const RatingsTable& a, const RatingsTable& b) {
        return a.scale_ == b.scale_ && a.by_user_ == b.by_user_ && a.by_item_ == b.by_item_;
    }

private:
    friend struct RatingsTableTestAccess;

    void check(UserId u) const;
    void check(ItemId i) const;

    RatingScale scale_;
    std::vector<std::vector<RatedItem>> by_user_;
    std::vector<std::vector<Rater>> by_item_;
    std::size_t size_ = 0;
    std::uint64_t revision_ = 0;
};

}  // namespace trustrec
