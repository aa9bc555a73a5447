#include "trustrec/ratings_table.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace trustrec {

namespace {

ItemId key_of(const RatedItem& e) { return e.item; }
UserId key_of(const Rater& e) { return e.user; }

template <class Vec, class Id>
auto find_entry(Vec& vec, Id id) {
    return std::lower_bound(vec.begin(), vec.end(), id,
                            [](const auto& e, Id key) { return key_of(e) < key; });
}

}  // namespace

RatingsTable::RatingsTable(RatingScale scale, std::size_t user_count, std::size_t item_count)
    : scale_(scale), by_user_(user_count), by_item_(item_count) {}

void RatingsTable::check(UserId u) const {
    if (u.index() >= by_user_.size())
        throw std::out_of_range("ratings: unknown user " + std::to_string(u.value));
}

void RatingsTable::check(ItemId i) const {
    if (i.index() >= by_item_.size())
        throw std::out_of_range("ratings: unknown item " + std::to_string(i.value));
}

std::optional<double> RatingsTable::rating(UserId u, ItemId i) const {
    check(u);
    check(i);
    const auto& row = by_user_[u.index()];
    auto it = find_entry(row, i);
    if (it == row.end() || it->item != i) return std::nullopt;
    return it->value;
}

std::span<const RatedItem> RatingsTable::items_of(UserId u) const {
    check(u);
    return by_user_[u.index()];
}

std::span<const Rater> RatingsTable::raters_of(ItemId i) const {
    check(i);
    return by_item_[i.index()];
}

void RatingsTable::insert(UserId u, ItemId i, double r) {
    check(u);
    check(i);
    auto level = scale_.level_of(r);
    if (!level)
        throw std::invalid_argument("ratings: value " + std::to_string(r) + " is off-scale");
    const double value = scale_.value_at(*level);

    auto& row = by_user_[u.index()];
    auto& col = by_item_[i.index()];
    auto it = find_entry(row, i);
    if (it != row.end() && it->item == i) {
        it->value = value;
        find_entry(col, u)->value = value;
    } else {
        row.insert(it, RatedItem{i, value});
        col.insert(find_entry(col, u), Rater{u, value});
        ++size_;
    }
    ++revision_;
}

double RatingsTable::remove(UserId u, ItemId i) {
    check(u);
    check(i);
    auto& row = by_user_[u.index()];
    auto it = find_entry(row, i);
    if (it == row.end() || it->item != i)
        throw std::out_of_range("ratings: no rating for (" + std::to_string(u.value) + ", " +
                                std::to_string(i.value) + ")");
    const double value = it->value;
    row.erase(it);
    auto& col = by_item_[i.index()];
    col.erase(find_entry(col, u));
    --size_;
    ++revision_;
    return value;
}

std::optional<double> RatingsTable::user_mean(UserId u) const {
    auto row = items_of(u);
    if (row.empty()) return std::nullopt;
    double sum = 0;
    for (const auto& e : row) sum += e.value;
    return sum / static_cast<double>(row.size());
}

}  // namespace trustrec
