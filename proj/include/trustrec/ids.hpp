#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace trustrec {

/// Dense 0-based identifier. The tag keeps user and item ids from mixing.
template <class Tag>
struct DenseId {
    using value_type = std::uint32_t;
    value_type value = 0;

    constexpr DenseId() = default;
    constexpr explicit DenseId(value_type v) : value(v) {}

    constexpr std::size_t index() const { return value; }

    friend constexpr auto operator<=>(DenseId, DenseId) = default;
    friend std::ostream& operator<<(std::ostream& os, DenseId id) { return os << id.value; }
};

struct UserTag {};
struct ItemTag {};

using UserId = DenseId<UserTag>;
using ItemId = DenseId<ItemTag>;

}  // namespace trustrec

template <class Tag>
struct std::hash<trustrec::DenseId<Tag>> {
    std::size_t operator()(trustrec::DenseId<Tag> id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
