#include "trustrec/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <future>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "trustrec/io_util.hpp"

namespace trustrec {

namespace fs = std::filesystem;
using nlohmann::json;

void DatasetSpec::validate() const {
    if (trustor_col == trustee_col)
        throw std::invalid_argument("dataset spec: trustor and trustee columns coincide");
    if (user_col == item_col || user_col == rating_col || item_col == rating_col)
        throw std::invalid_argument("dataset spec: user, item and rating columns must differ");
}

DatasetSpec preset(const std::string& name) {
    DatasetSpec s;
    s.name = name;
    if (name == "epinions") {
        s.scale = RatingScale(1, 5, 1);
    } else if (name == "filmtrust") {
        s.scale = RatingScale(0.5, 4.0, 0.5);
    } else if (name == "ciaodvd") {
        // movie-ratings.txt: userID,movieID,genreID,reviewID,movieRating,date
        s.delimiter = ',';
        s.rating_col = 4;
        s.scale = RatingScale(1, 5, 1);
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return s;
}

std::vector<std::string> preset_names() { return {"epinions", "filmtrust", "ciaodvd"}; }

const char* to_string(SkipReason r) {
    switch (r) {
        case SkipReason::Malformed: return "malformed";
        case SkipReason::OffScale: return "off_scale";
        case SkipReason::SelfLoop: return "self_loop";
        case SkipReason::DuplicateEdge: return "duplicate_edge";
        case SkipReason::DuplicateRating: return "duplicate_rating";
    }
    return "?";
}

namespace {

constexpr SkipReason kAllReasons[] = {SkipReason::Malformed, SkipReason::OffScale,
                                      SkipReason::SelfLoop, SkipReason::DuplicateEdge,
                                      SkipReason::DuplicateRating};

}  // namespace

std::size_t FileReport::skipped_total() const {
    std::size_t n = 0;
    for (const auto& [reason, count] : skipped) n += count;
    return n;
}

std::size_t ParseReport::skipped(SkipReason r) const {
    auto get = [r](const FileReport& f) {
        auto it = f.skipped.find(r);
        return it == f.skipped.end() ? std::size_t{0} : it->second;
    };
    return get(trust) + get(rating);
}

std::string ParseReport::to_text() const {
    std::ostringstream os;
    os << "users: " << users << '\n'
       << "items: " << items << '\n'
       << "edges: " << edges << '\n'
       << "ratings: " << ratings << '\n'
       << "trust_lines: " << trust.lines << '\n'
       << "trust_accepted: " << trust.accepted << '\n'
       << "rating_lines: " << rating.lines << '\n'
       << "rating_accepted: " << rating.accepted << '\n';
    for (auto r : kAllReasons) os << "skipped." << to_string(r) << ": " << skipped(r) << '\n';
    return os.str();
}

json ParseReport::to_json() const {
    json skipped_obj = json::object();
    for (auto r : kAllReasons) skipped_obj[to_string(r)] = skipped(r);
    return json{{"users", users},
                {"items", items},
                {"edges", edges},
                {"ratings", ratings},
                {"skipped", skipped_obj},
                {"trust_file", {{"lines", trust.lines}, {"accepted", trust.accepted}}},
                {"ratings_file", {{"lines", rating.lines}, {"accepted", rating.accepted}}}};
}

namespace {

struct RawLine {
    std::size_t line_no;
    std::vector<std::string> fields;
};

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n\v\f";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view line, char delimiter) {
    std::vector<std::string> out;
    if (delimiter == '\0') {
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
            if (pos == line.size()) break;
            auto end = pos;
            while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
            out.emplace_back(line.substr(pos, end - pos));
            pos = end;
        }
    } else {
        std::size_t pos = 0;
        while (true) {
            auto end = line.find(delimiter, pos);
            out.emplace_back(trim(line.substr(pos, end == std::string_view::npos ? end : end - pos)));
            if (end == std::string_view::npos) break;
            pos = end + 1;
        }
    }
    return out;
}

// Returns the non-blank, non-comment lines after the header, tokenized.
std::vector<RawLine> read_lines(const fs::path& path, const DatasetSpec& spec) {
    std::ifstream in(path);
    if (!in) throw IngestError(IngestError::Kind::Unreadable, "cannot read '" + path.string() + "'");
    std::vector<RawLine> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no <= spec.header_lines) continue;
        auto body = trim(line);
        if (body.empty() || body.front() == '#' || body.front() == '%') continue;
        out.push_back(RawLine{line_no, split(body, spec.delimiter)});
    }
    if (in.bad()) throw IngestError(IngestError::Kind::Unreadable, "read error on '" + path.string() + "'");
    return out;
}

std::optional<double> parse_number(const std::string& s) {
    double v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return v;
}

[[noreturn]] void malformed(const fs::path& path, std::size_t line_no, const std::string& why) {
    throw IngestError(IngestError::Kind::Malformed,
                      path.string() + ":" + std::to_string(line_no) + ": " + why);
}

bool field_ok(const RawLine& l, std::size_t col) { return col < l.fields.size() && !l.fields[col].empty(); }

class NameIndex {
public:
    std::uint32_t intern(const std::string& name) {
        auto [it, fresh] = index_.try_emplace(name, static_cast<std::uint32_t>(names_.size()));
        if (fresh) names_.push_back(name);
        return it->second;
    }
    std::optional<std::uint32_t> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    std::vector<std::string> take() { return std::move(names_); }
    std::size_t size() const { return names_.size(); }

private:
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<std::string> names_;
};

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; }

}  // namespace

LoadResult load_dataset(const DatasetSpec& spec) {
    spec.validate();

    // Reading and tokenizing is independent per file; id assignment below is
    // sequential so first-appearance order stays deterministic.
    auto trust_future = std::async(std::launch::async, [&] { return read_lines(spec.trust_path, spec); });
    auto rating_lines = read_lines(spec.ratings_path, spec);
    auto trust_lines = trust_future.get();

    ParseReport report;
    NameIndex users;
    NameIndex items;

    std::vector<Edge> edges;
    std::unordered_set<std::uint64_t> edge_seen;
    auto skip = [](FileReport& f, SkipReason r) { ++f.skipped[r]; };

    report.trust.lines = trust_lines.size();
    for (const auto& l : trust_lines) {
        if (!field_ok(l, spec.trustor_col) || !field_ok(l, spec.trustee_col)) {
            if (spec.strict) malformed(spec.trust_path, l.line_no, "missing trust column");
            skip(report.trust, SkipReason::Malformed);
            continue;
        }
        const auto& a = l.fields[spec.trustor_col];
        const auto& b = l.fields[spec.trustee_col];
        if (a == b) {
            skip(report.trust, SkipReason::SelfLoop);
            continue;
        }
        auto ka = users.find(a);
        auto kb = users.find(b);
        if (ka && kb && edge_seen.contains(pair_key(*ka, *kb))) {
            skip(report.trust, SkipReason::DuplicateEdge);
            continue;
        }
        const auto from = users.intern(a);
        const auto to = users.intern(b);
        edge_seen.insert(pair_key(from, to));
        edges.emplace_back(UserId{from}, UserId{to});
        ++report.trust.accepted;
    }

    struct Accepted {
        std::uint32_t user;
        std::uint32_t item;
        double value;
    };
    std::vector<Accepted> accepted;
    std::unordered_map<std::uint64_t, std::size_t> rating_slot;

    report.rating.lines = rating_lines.size();
    for (const auto& l : rating_lines) {
        if (!field_ok(l, spec.user_col) || !field_ok(l, spec.item_col) || !field_ok(l, spec.rating_col)) {
            if (spec.strict) malformed(spec.ratings_path, l.line_no, "missing rating column");
            skip(report.rating, SkipReason::Malformed);
            continue;
        }
        auto value = parse_number(l.fields[spec.rating_col]);
        if (!value) {
            if (spec.strict) malformed(spec.ratings_path, l.line_no, "rating is not a number");
            skip(report.rating, SkipReason::Malformed);
            continue;
        }
        auto level = spec.scale.level_of(*value);
        if (!level) {
            skip(report.rating, SkipReason::OffScale);
            continue;
        }
        const auto u = users.intern(l.fields[spec.user_col]);
        const auto i = items.intern(l.fields[spec.item_col]);
        const double canonical = spec.scale.value_at(*level);
        auto [it, fresh] = rating_slot.try_emplace(pair_key(u, i), accepted.size());
        if (fresh) {
            accepted.push_back({u, i, canonical});
            ++report.rating.accepted;
        } else {
            accepted[it->second].value = canonical;  // keep-last
            skip(report.rating, SkipReason::DuplicateRating);
        }
    }

    if (users.size() == 0 || accepted.empty())
        throw IngestError(IngestError::Kind::Empty, "dataset '" + spec.name + "' has no usable ratings");

    const std::size_t user_count = users.size();
    const std::size_t item_count = items.size();
    RatingsTable table(spec.scale, user_count, item_count);
    for (const auto& a : accepted) table.insert(UserId{a.user}, ItemId{a.item}, a.value);

    report.users = user_count;
    report.items = item_count;
    report.edges = edges.size();
    report.ratings = table.size();

    Dataset ds{spec.name, TrustGraph(user_count, edges), std::move(table), users.take(), items.take(),
               user_count};
    return LoadResult{std::move(ds), report};
}

std::vector<std::string> validate(const Dataset& ds) {
    std::vector<std::string> out;
    auto say = [&out](std::string s) { out.push_back(std::move(s)); };
    const auto& g = ds.graph;
    const auto& t = ds.ratings;
    const std::size_t n = g.node_count();

    if (t.user_count() != n)
        say("dataset: ratings cover " + std::to_string(t.user_count()) + " users but graph has " +
            std::to_string(n));
    if (ds.user_names.size() != n) say("id map: user name count differs from user count");
    if (ds.item_names.size() != t.item_count()) say("id map: item name count differs from item count");
    if (ds.first_synthetic_user > n) say("dataset: first synthetic user beyond user count");
    {
        std::unordered_set<std::string> seen;
        for (std::size_t u = 0; u < ds.user_names.size(); ++u)
            if (!seen.insert(ds.user_names[u]).second)
                say("id map: user name '" + ds.user_names[u] + "' repeated at " + std::to_string(u));
        seen.clear();
        for (std::size_t i = 0; i < ds.item_names.size(); ++i)
            if (!seen.insert(ds.item_names[i]).second)
                say("id map: item name '" + ds.item_names[i] + "' repeated at " + std::to_string(i));
    }

    std::size_t edge_total = 0;
    std::vector<std::size_t> in_count(n, 0);
    for (std::size_t ui = 0; ui < n; ++ui) {
        const UserId u{static_cast<std::uint32_t>(ui)};
        auto out_adj = g.out_neighbors(u);
        edge_total += out_adj.size();
        for (std::size_t k = 0; k < out_adj.size(); ++k) {
            if (out_adj[k] == u) say("graph: self-loop on user " + std::to_string(ui));
            if (k > 0 && !(out_adj[k - 1] < out_adj[k]))
                say("graph: out-list of user " + std::to_string(ui) + " unsorted or duplicated");
            if (out_adj[k].index() < n) ++in_count[out_adj[k].index()];
        }
        for (UserId v : g.in_neighbors(u))
            if (!g.has_edge(v, u))
                say("graph: in-list of " + std::to_string(ui) + " names " + std::to_string(v.value) +
                    " without edge");
        for (UserId v : g.neighbors_undirected(u))
            if (!g.adjacent_undirected(v, u))
                say("graph: undirected view asymmetric for (" + std::to_string(ui) + ", " +
                    std::to_string(v.value) + ")");
    }
    for (std::size_t u = 0; u < n; ++u)
        if (g.in_degree(UserId{static_cast<std::uint32_t>(u)}) != in_count[u])
            say("graph: in-degree of user " + std::to_string(u) + " inconsistent");
    if (edge_total != g.edge_count()) say("graph: edge count inconsistent with adjacency");

    std::size_t by_user_total = 0;
    for (std::size_t ui = 0; ui < t.user_count(); ++ui) {
        const UserId u{static_cast<std::uint32_t>(ui)};
        auto row = t.items_of(u);
        by_user_total += row.size();
        for (std::size_t k = 0; k < row.size(); ++k) {
            const auto& e = row[k];
            const std::string where = "(" + std::to_string(ui) + ", " + std::to_string(e.item.value) + ")";
            if (k > 0 && !(row[k - 1].item < e.item)) say("ratings: user row unsorted at " + where);
            if (!t.scale().contains(e.value)) say("ratings: off-scale value at " + where);
            if (e.item.index() >= t.item_count()) {
                say("ratings: unknown item at " + where);
                continue;
            }
            auto col = t.raters_of(e.item);
            auto it = std::find_if(col.begin(), col.end(), [&](const Rater& r) { return r.user == u; });
            if (it == col.end() || it->value != e.value)
                say("ratings: index S(i) missing or disagreeing for " + where);
        }
    }
    std::size_t by_item_total = 0;
    for (std::size_t ii = 0; ii < t.item_count(); ++ii) {
        const ItemId i{static_cast<std::uint32_t>(ii)};
        auto col = t.raters_of(i);
        by_item_total += col.size();
        for (std::size_t k = 0; k < col.size(); ++k) {
            const auto& r = col[k];
            const std::string where = "(" + std::to_string(r.user.value) + ", " + std::to_string(ii) + ")";
            if (k > 0 && !(col[k - 1].user < r.user)) say("ratings: item column unsorted at " + where);
            if (r.user.index() >= t.user_count() || !t.has(r.user, i))
                say("ratings: index I(u) missing for " + where);
        }
    }
    if (by_user_total != t.size() || by_item_total != t.size())
        say("ratings: entry count inconsistent between map and indexes");
    return out;
}

namespace {

std::string format_value(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

void dump_dataset(const Dataset& ds, const fs::path& dir) {
    fs::create_directories(dir);

    // Trust lines. A line may introduce its trustor (trustee already known),
    // its trustee (trustor known), or both as consecutive ids.
    std::uint32_t next_user = 0;
    std::vector<Edge> edge_lines;
    {
        // Bucket edges by their larger endpoint; introducing id x needs an edge whose max is x (or x+1).
        auto all = ds.graph.edges();
        std::vector<std::vector<std::size_t>> by_max(ds.user_count());
        for (std::size_t k = 0; k < all.size(); ++k)
            by_max[std::max(all[k].first, all[k].second).index()].push_back(k);
        std::vector<bool> used(all.size(), false);
        const std::size_t n = ds.user_count();
        while (next_user < n) {
            bool placed = false;
            for (auto k : by_max[next_user]) {
                const auto& [a, b] = all[k];
                const auto other = a.value == next_user ? b : a;
                if (other.value < next_user) {
                    used[k] = true;
                    edge_lines.push_back(all[k]);
                    ++next_user;
                    placed = true;
                    break;
                }
            }
            if (placed) continue;
            if (next_user + 1 < n) {
                for (auto k : by_max[next_user + 1]) {
                    const auto& [a, b] = all[k];
                    if (a.value == next_user && b.value == next_user + 1) {
                        used[k] = true;
                        edge_lines.push_back(all[k]);
                        next_user += 2;
                        placed = true;
                        break;
                    }
                }
            }
            if (!placed) break;
        }
        for (std::size_t k = 0; k < all.size(); ++k)
            if (!used[k]) edge_lines.push_back(all[k]);
    }

    // Rating lines. Each may introduce the next user, the next item, or both.
    struct RatingLine {
        UserId user;
        ItemId item;
        double value;
    };
    std::vector<RatingLine> rating_lines;
    rating_lines.reserve(ds.ratings.size());
    std::unordered_set<std::uint64_t> emitted;
    {
        std::uint32_t nu = next_user;
        std::uint32_t ni = 0;
        const auto n = static_cast<std::uint32_t>(ds.user_count());
        const auto m = static_cast<std::uint32_t>(ds.item_count());
        auto emit = [&](UserId u, ItemId i, double v) {
            rating_lines.push_back({u, i, v});
            emitted.insert(pair_key(u.value, i.value));
        };
        while (nu < n || ni < m) {
            if (nu < n) {
                auto row = ds.ratings.items_of(UserId{nu});
                if (!row.empty() && row.front().item.value <= ni) {
                    emit(UserId{nu}, row.front().item, row.front().value);
                    if (row.front().item.value == ni) ++ni;
                    ++nu;
                    continue;
                }
            }
            if (ni < m) {
                auto col = ds.ratings.raters_of(ItemId{ni});
                if (!col.empty() && col.front().user.value < nu) {
                    emit(col.front().user, ItemId{ni}, col.front().value);
                    ++ni;
                    continue;
                }
            }
            break;
        }
        for (std::size_t u = 0; u < ds.user_count(); ++u) {
            const UserId uid{static_cast<std::uint32_t>(u)};
            for (const auto& e : ds.ratings.items_of(uid))
                if (!emitted.contains(pair_key(uid.value, e.item.value))) rating_lines.push_back({uid, e.item, e.value});
        }
    }

    std::ostringstream trust;
    for (const auto& [a, b] : edge_lines)
        trust << ds.user_names.at(a.index()) << ' ' << ds.user_names.at(b.index()) << '\n';
    std::ostringstream ratings;
    for (const auto& l : rating_lines)
        ratings << ds.user_names.at(l.user.index()) << ' ' << ds.item_names.at(l.item.index()) << ' '
                << format_value(l.value) << '\n';
    write_file_atomic(dir / "trust.txt", trust.str());
    write_file_atomic(dir / "ratings.txt", ratings.str());

    DatasetSpec spec;
    spec.name = ds.name;
    spec.trust_path = "trust.txt";
    spec.ratings_path = "ratings.txt";
    spec.scale = ds.ratings.scale();
    write_file_atomic(dir / "dataset.json", spec_to_json(spec).dump(2) + "\n");
}

json spec_to_json(const DatasetSpec& spec) {
    return json{{"name", spec.name},
                {"trust", spec.trust_path.string()},
                {"ratings", spec.ratings_path.string()},
                {"delimiter", spec.delimiter == '\0' ? std::string("whitespace") : std::string(1, spec.delimiter)},
                {"trust_cols", {spec.trustor_col, spec.trustee_col}},
                {"rating_cols", {spec.user_col, spec.item_col, spec.rating_col}},
                {"header_lines", spec.header_lines},
                {"scale", {{"min", spec.scale.min()}, {"max", spec.scale.max()}, {"step", spec.scale.step()}}},
                {"strict", spec.strict}};
}

DatasetSpec spec_from_json(const json& j, const fs::path& base) {
    DatasetSpec s;
    auto resolve = [&base](const std::string& p) {
        fs::path path(p);
        return path.is_relative() && !base.empty() ? base / path : path;
    };
    s.name = j.value("name", std::string{});
    s.trust_path = resolve(j.at("trust").get<std::string>());
    s.ratings_path = resolve(j.at("ratings").get<std::string>());
    const auto delim = j.value("delimiter", std::string("whitespace"));
    if (delim == "whitespace") s.delimiter = '\0';
    else if (delim.size() == 1) s.delimiter = delim[0];
    else throw std::invalid_argument("dataset spec: delimiter must be one character or 'whitespace'");
    if (j.contains("trust_cols")) {
        s.trustor_col = j["trust_cols"].at(0).get<std::size_t>();
        s.trustee_col = j["trust_cols"].at(1).get<std::size_t>();
    }
    if (j.contains("rating_cols")) {
        s.user_col = j["rating_cols"].at(0).get<std::size_t>();
        s.item_col = j["rating_cols"].at(1).get<std::size_t>();
        s.rating_col = j["rating_cols"].at(2).get<std::size_t>();
    }
    s.header_lines = j.value("header_lines", std::size_t{0});
    if (j.contains("scale")) {
        const auto& sc = j["scale"];
        s.scale = RatingScale(sc.at("min").get<double>(), sc.at("max").get<double>(), sc.at("step").get<double>());
    }
    s.strict = j.value("strict", false);
    s.validate();
    return s;
}

}  // namespace trustrec
