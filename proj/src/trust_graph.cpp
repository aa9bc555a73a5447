#include "trustrec/trust_graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace trustrec {

TrustGraph::TrustGraph(std::size_t node_count, std::span<const Edge> edges)
    : out_(node_count), in_(node_count), undirected_(node_count), edge_count_(edges.size()) {
    for (const auto& [from, to] : edges) {
        if (from.index() >= node_count || to.index() >= node_count)
            throw std::invalid_argument("trust graph: edge endpoint out of range");
        if (from == to)
            throw std::invalid_argument("trust graph: self-loop on user " + std::to_string(from.value));
        out_[from.index()].push_back(to);
        in_[to.index()].push_back(from);
    }
    for (std::size_t u = 0; u < node_count; ++u) {
        auto& out = out_[u];
        std::sort(out.begin(), out.end());
        if (std::adjacent_find(out.begin(), out.end()) != out.end())
            throw std::invalid_argument("trust graph: duplicate edge from user " + std::to_string(u));
        std::sort(in_[u].begin(), in_[u].end());

        auto& und = undirected_[u];
        und.reserve(out.size() + in_[u].size());
        std::set_union(out.begin(), out.end(), in_[u].begin(), in_[u].end(), std::back_inserter(und));
    }
}

void TrustGraph::check(UserId u) const {
    if (u.index() >= out_.size())
        throw std::out_of_range("trust graph: unknown user " + std::to_string(u.value));
}

std::span<const UserId> TrustGraph::out_neighbors(UserId u) const {
    check(u);
    return out_[u.index()];
}

std::span<const UserId> TrustGraph::in_neighbors(UserId u) const {
    check(u);
    return in_[u.index()];
}

std::span<const UserId> TrustGraph::neighbors_undirected(UserId u) const {
    check(u);
    return undirected_[u.index()];
}

bool TrustGraph::has_edge(UserId from, UserId to) const {
    auto out = out_neighbors(from);
    return std::binary_search(out.begin(), out.end(), to);
}

bool TrustGraph::adjacent_undirected(UserId u, UserId v) const {
    auto und = neighbors_undirected(u);
    return std::binary_search(und.begin(), und.end(), v);
}

std::vector<Edge> TrustGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (std::size_t u = 0; u < out_.size(); ++u)
        for (UserId v : out_[u]) out.emplace_back(UserId{static_cast<UserId::value_type>(u)}, v);
    return out;
}

}  // namespace trustrec
