#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "trustrec/ids.hpp"

namespace trustrec {

using Edge = std::pair<UserId, UserId>;  // trustor -> trustee

/// Directed trust graph over users 0..N-1. Immutable after construction.
///
/// Adjacency lists are sorted ascending. The undirected view is the
/// deduplicated union of in- and out-neighbours and is what the similarity
/// metrics see; recommenders that "consult" neighbours walk out-edges.
class TrustGraph {
public:
    TrustGraph() = default;

    /// Throws std::invalid_argument on self-loops, duplicate edges or
    /// endpoints outside [0, node_count).
    TrustGraph(std::size_t node_count, std::span<const Edge> edges);

    std::size_t node_count() const { return out_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    /// All four throw std::out_of_range for an unknown user.
    std::span<const UserId> out_neighbors(UserId u) const;
    std::span<const UserId> in_neighbors(UserId u) const;
    std::span<const UserId> neighbors_undirected(UserId u) const;
    std::size_t in_degree(UserId u) const { return in_neighbors(u).size(); }

    bool has_edge(UserId from, UserId to) const;
    bool adjacent_undirected(UserId u, UserId v) const;

    /// Edges in (trustor, trustee) lexicographic order.
    std::vector<Edge> edges() const;

    friend bool operator==(const TrustGraph&, const TrustGraph&) = default;

private:
    void check(UserId u) const;

    std::vector<std::vector<UserId>> out_;
    std::vector<std::vector<UserId>> in_;
    std::vector<std::vector<UserId>> undirected_;
    std::size_t edge_count_ = 0;
};

}  // namespace trustrec
