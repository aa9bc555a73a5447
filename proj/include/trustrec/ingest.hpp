#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "trustrec/dataset.hpp"

namespace trustrec {

/// How to read one dataset. A delimiter of '\0' means "any run of whitespace".
struct DatasetSpec {
    std::string name;
    std::filesystem::path trust_path;
    std::filesystem::path ratings_path;
    char delimiter = '\0';
    std::size_t trustor_col = 0;
    std::size_t trustee_col = 1;
    std::size_t user_col = 0;
    std::size_t item_col = 1;
    std::size_t rating_col = 2;
    std::size_t header_lines = 0;
    RatingScale scale{1, 5, 1};
    bool strict = false;

    /// Throws std::invalid_argument when column indices collide.
    void validate() const;
};

/// Built-in column/scale presets: "epinions", "filmtrust", "ciaodvd".
/// Paths are left empty. Throws std::invalid_argument for an unknown name.
DatasetSpec preset(const std::string& name);
std::vector<std::string> preset_names();

enum class SkipReason { Malformed, OffScale, SelfLoop, DuplicateEdge, DuplicateRating };
const char* to_string(SkipReason r);

struct FileReport {
    std::size_t lines = 0;     // non-blank lines after the header
    std::size_t accepted = 0;
    std::map<SkipReason, std::size_t> skipped;

    std::size_t skipped_total() const;
};

struct ParseReport {
    std::size_t users = 0;
    std::size_t items = 0;
    std::size_t edges = 0;
    std::size_t ratings = 0;
    FileReport trust;
    FileReport rating;

    std::size_t skipped(SkipReason r) const;
    std::string to_text() const;
    nlohmann::json to_json() const;
};

class IngestError : public std::runtime_error {
public:
    enum class Kind { Unreadable, Malformed, Empty };
    IngestError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct LoadResult {
    Dataset dataset;
    ParseReport report;
};

/// Parses the trust file then the ratings file. Dense ids follow first
/// appearance on accepted lines (trust file first). Skipped lines are counted
/// by reason; in strict mode a malformed line throws instead.
LoadResult load_dataset(const DatasetSpec& spec);

/// Every broken core-model invariant, one human-readable line each.
std::vector<std::string> validate(const Dataset& ds);

/// Writes trust.txt, ratings.txt and dataset.json (a whitespace-format
/// DatasetSpec pointing at them) into `dir`. For datasets produced by
/// load_dataset the line order is chosen so that reloading reproduces the
/// same dense ids.
void dump_dataset(const Dataset& ds, const std::filesystem::path& dir);

nlohmann::json spec_to_json(const DatasetSpec& spec);
/// Relative paths in the JSON resolve against `base`.
DatasetSpec spec_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});

}  // namespace trustrec
