#include "trustrec/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trustrec/adversary.hpp"
#include "trustrec/eval.hpp"
#include "trustrec/ingest.hpp"
#include "trustrec/io_util.hpp"
#include "trustrec/recommend.hpp"

namespace trustrec {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Bad flags or bad input files; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

template <class T>
T parse_number(const std::string& text, const std::string& flag) {
    T v{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw UsageError(flag + ": '" + text + "' is not a valid number");
    return v;
}

template <class T>
std::vector<T> parse_list(const std::string& text, std::size_t expected, const std::string& flag) {
    const auto parts = split(text, ',');
    if (parts.size() != expected)
        throw UsageError(flag + ": expected " + std::to_string(expected) + " comma-separated values, got '" + text +
                         "'");
    std::vector<T> out;
    for (const auto& p : parts) out.push_back(parse_number<T>(p, flag));
    return out;
}

std::string read_input(const fs::path& p) {
    try {
        return read_file(p);
    } catch (const std::runtime_error& e) {
        throw UsageError(e.what());
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

// ---------------------------------------------------------------- dataset

struct DatasetArgs {
    std::string preset;
    std::string trust;
    std::string ratings;
    std::string spec_file;
    std::string name;
    std::string delimiter;
    std::string trust_cols;
    std::string rating_cols;
    std::string scale;
    std::size_t skip_header = 0;
    CLI::Option* skip_header_opt = nullptr;
    bool strict = false;
};

void add_dataset_options(CLI::App& app, DatasetArgs& a) {
    std::string presets;
    for (const auto& p : preset_names()) presets += (presets.empty() ? "" : ", ") + p;
    app.add_option("--preset", a.preset, "Column and scale preset: " + presets);
    app.add_option("--trust", a.trust, "Trust edge file (trustor trustee ...)");
    app.add_option("--ratings", a.ratings, "Ratings file (user item rating ...)");
    app.add_option("--spec-file", a.spec_file, "dataset.json written by `ingest --dump`");
    app.add_option("--name", a.name, "Dataset name used in reports");
    app.add_option("--delimiter", a.delimiter, "Field delimiter: one character, 'tab' or 'whitespace'");
    app.add_option("--trust-cols", a.trust_cols, "0-based trustor,trustee columns");
    app.add_option("--rating-cols", a.rating_cols, "0-based user,item,rating columns");
    app.add_option("--scale", a.scale, "Rating scale min,max,step");
    a.skip_header_opt = app.add_option("--skip-header", a.skip_header, "Header lines to skip in both files");
    app.add_flag("--strict", a.strict, "Abort on the first malformed line");
}

DatasetSpec resolve_spec(const DatasetArgs& a) {
    DatasetSpec spec;
    if (!a.spec_file.empty()) {
        const fs::path p(a.spec_file);
        json j;
        try {
            j = json::parse(read_input(p));
        } catch (const json::exception& e) {
            throw UsageError("--spec-file " + p.string() + ": " + e.what());
        }
        spec = spec_from_json(j, p.parent_path());
    } else if (!a.preset.empty()) {
        spec = preset(a.preset);
    }
    if (spec.name.empty()) spec.name = a.preset.empty() ? "dataset" : a.preset;
    if (!a.name.empty()) spec.name = a.name;
    if (!a.trust.empty()) spec.trust_path = a.trust;
    if (!a.ratings.empty()) spec.ratings_path = a.ratings;
    if (!a.delimiter.empty()) {
        if (a.delimiter == "whitespace") spec.delimiter = '\0';
        else if (a.delimiter == "tab" || a.delimiter == "\\t") spec.delimiter = '\t';
        else if (a.delimiter.size() == 1) spec.delimiter = a.delimiter[0];
        else throw UsageError("--delimiter: expected one character, 'tab' or 'whitespace'");
    }
    if (!a.trust_cols.empty()) {
        const auto c = parse_list<std::size_t>(a.trust_cols, 2, "--trust-cols");
        spec.trustor_col = c[0];
        spec.trustee_col = c[1];
    }
    if (!a.rating_cols.empty()) {
        const auto c = parse_list<std::size_t>(a.rating_cols, 3, "--rating-cols");
        spec.user_col = c[0];
        spec.item_col = c[1];
        spec.rating_col = c[2];
    }
    if (!a.scale.empty()) {
        const auto s = parse_list<double>(a.scale, 3, "--scale");
        spec.scale = RatingScale(s[0], s[1], s[2]);
    }
    if (a.skip_header_opt && a.skip_header_opt->count() > 0) spec.header_lines = a.skip_header;
    if (a.strict) spec.strict = true;
    if (spec.trust_path.empty() || spec.ratings_path.empty())
        throw UsageError("both --trust and --ratings are required (or --spec-file)");
    spec.validate();
    return spec;
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
    std::size_t top_k = 10;
    double test_frac = 0.15;
    std::size_t repeats = 5;
    std::uint64_t seed = 1;
    std::string algorithms = "all";
    std::string out;
    std::string format = "csv";
    std::size_t threads = 1;
    std::optional<std::size_t> k_samples;
    std::optional<double> alpha;
};

struct AttackArgs {
    std::size_t fake_count = 150;
    std::size_t celebrity_rank = 10;
    std::optional<double> fake_rating;
    bool unidirectional = false;
};

void add_eval_options(CLI::App& app, EvalArgs& a) {
    std::string roster;
    for (const auto& n : algorithm_names()) roster += (roster.empty() ? "" : ", ") + n;
    app.add_option("--top-k", a.top_k, "Keep the k most-rated items")->capture_default_str();
    app.add_option("--test-frac", a.test_frac, "Fraction of rated users held out per run")->capture_default_str();
    app.add_option("--repeats", a.repeats, "Independent runs")->capture_default_str();
    app.add_option("--seed", a.seed, "Base seed")->capture_default_str();
    app.add_option("--algorithms", a.algorithms, "Comma-separated list or 'all'. Names: " + roster)
        ->capture_default_str();
    app.add_option("--out", a.out, "Output directory (default: $TRUSTREC_OUT_DIR or .)");
    app.add_option("--format", a.format, "Report format")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
    app.add_option("--threads", a.threads, "Prediction workers; 0 uses every core")->capture_default_str();
    app.add_option("--k-samples", a.k_samples, "Random-walk samples per prediction (default 100)");
    app.add_option("--alpha", a.alpha, "Random-walk jump coefficient (default 0.05)");
}

void add_attack_options(CLI::App& app, AttackArgs& a) {
    app.add_option("--fake-count", a.fake_count, "Fake accounts to inject")->capture_default_str();
    app.add_option("--celebrity-rank", a.celebrity_rank, "1-based in-degree rank of the linked user")
        ->capture_default_str();
    app.add_option("--fake-rating", a.fake_rating, "Rating every fake gives every item (default: scale minimum)");
    app.add_flag("--unidirectional", a.unidirectional, "Only fake -> celebrity edges");
}

std::vector<RecommenderSpec> build_recommenders(const EvalArgs& a) {
    std::vector<std::string> names;
    if (a.algorithms == "all") {
        names = algorithm_names();
    } else {
        names = split(a.algorithms, ',');
    }
    const auto& roster = algorithm_names();
    std::set<std::string> seen;
    std::vector<RecommenderSpec> specs;
    for (const auto& n : names) {
        if (std::find(roster.begin(), roster.end(), n) == roster.end()) {
            std::string valid;
            for (const auto& r : roster) valid += (valid.empty() ? "" : ", ") + r;
            throw UsageError("unknown algorithm '" + n + "'; valid names: " + valid);
        }
        if (!seen.insert(n).second) throw UsageError("algorithm '" + n + "' listed twice");
        auto spec = named_recommender(n);
        if (a.k_samples) spec.k_samples = *a.k_samples;
        if (a.alpha) spec.alpha = *a.alpha;
        spec.validate();
        specs.push_back(std::move(spec));
    }
    if (specs.empty()) throw UsageError("--algorithms selects nothing");
    return specs;
}

fs::path output_dir(const EvalArgs& a) {
    if (!a.out.empty()) return a.out;
    if (const char* env = std::getenv("TRUSTREC_OUT_DIR"); env && *env) return env;
    return ".";
}

json report_to_json(const EvalReport& r) {
    return json{{"algorithm", r.algorithm},     {"dataset", r.dataset},
                {"mu_mae", r.mu_mae},           {"sigma_mae", r.sigma_mae},
                {"binary_accuracy", r.binary_accuracy}, {"runs", r.runs},
                {"fallback_rate", r.fallback_rate},     {"run_mae", r.run_mae}};
}

EvalReport report_from_json(const json& j) {
    EvalReport r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.mu_mae = j.at("mu_mae").get<double>();
    r.sigma_mae = j.at("sigma_mae").get<double>();
    r.binary_accuracy = j.value("binary_accuracy", 0.0);
    r.runs = j.value("runs", std::size_t{0});
    r.fallback_rate = j.value("fallback_rate", 0.0);
    r.run_mae = j.value("run_mae", std::vector<double>{});
    return r;
}

constexpr const char* kReportHeader = "algorithm,dataset,mu_mae,sigma_mae,binary_accuracy,runs,fallback_rate";

std::string reports_csv(const std::vector<EvalReport>& reports) {
    std::string s = std::string(kReportHeader) + "\n";
    for (const auto& r : reports) {
        s += csv_field(r.algorithm) + "," + csv_field(r.dataset) + "," + format_fixed4(r.mu_mae) + "," +
             format_fixed4(r.sigma_mae) + "," + format_fixed4(r.binary_accuracy) + "," + std::to_string(r.runs) +
             "," + format_fixed4(r.fallback_rate) + "\n";
    }
    return s;
}

std::string attack_csv(const std::vector<AttackComparison>& rows) {
    std::string s =
        "algorithm,dataset,normal_mu_mae,normal_sigma_mae,adversarial_mu_mae,adversarial_sigma_mae,reduction_pct\n";
    for (const auto& c : rows) {
        s += csv_field(c.normal.algorithm) + "," + csv_field(c.normal.dataset) + "," + format_fixed4(c.normal.mu_mae) +
             "," + format_fixed4(c.normal.sigma_mae) + "," + format_fixed4(c.adversarial.mu_mae) + "," +
             format_fixed4(c.adversarial.sigma_mae) + "," + format_fixed4(c.reduction_pct) + "\n";
    }
    return s;
}

json manifest(const std::string& command, const DatasetSpec& spec, const EvalConfig& cfg,
              std::chrono::steady_clock::duration elapsed) {
    json algos = json::array();
    for (const auto& r : cfg.recommenders)
        algos.push_back({{"name", r.name}, {"k_samples", r.k_samples}, {"alpha", r.alpha}});
    json config{{"top_k", cfg.top_k},   {"test_fraction", cfg.test_fraction}, {"repeats", cfg.repeats},
                {"seed", cfg.seed},     {"threads", cfg.threads},             {"recommenders", algos}};
    if (cfg.attack) {
        config["attack"] = {{"fake_count", cfg.attack->fake_count},
                            {"celebrity_rank", cfg.attack->celebrity_rank},
                            {"fake_rating", cfg.attack->rating_on(spec.scale)},
                            {"bidirectional", cfg.attack->bidirectional}};
    }
    return json{{"tool", "trustrec"},
                {"version", kVersion},
                {"command", command},
                {"seed", cfg.seed},
                {"config", config},
                {"dataset", spec_to_json(spec)},
                {"checksums",
                 {{"trust", file_checksum(spec.trust_path)}, {"ratings", file_checksum(spec.ratings_path)}}},
                {"duration_seconds", std::chrono::duration<double>(elapsed).count()}};
}

int cmd_ingest(const DatasetArgs& da, const std::string& format, const std::string& dump, std::ostream& out) {
    const auto spec = resolve_spec(da);
    const auto loaded = load_dataset(spec);
    if (const auto problems = validate(loaded.dataset); !problems.empty()) {
        std::string msg = "loaded dataset violates invariants:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw std::logic_error(msg);
    }
    if (format == "json")
        out << loaded.report.to_json().dump(2) << "\n";
    else
        out << "dataset: " << spec.name << "\nscale: " << format_fixed4(spec.scale.min()) << " to "
            << format_fixed4(spec.scale.max()) << " step " << format_fixed4(spec.scale.step()) << "\n"
            << loaded.report.to_text();
    if (!dump.empty()) dump_dataset(loaded.dataset, dump);
    return 0;
}

EvalConfig make_config(const EvalArgs& a) {
    EvalConfig cfg;
    cfg.top_k = a.top_k;
    cfg.test_fraction = a.test_frac;
    cfg.repeats = a.repeats;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    cfg.recommenders = build_recommenders(a);
    cfg.validate();
    return cfg;
}

int cmd_eval(const DatasetArgs& da, const EvalArgs& ea, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const auto spec = resolve_spec(da);
    const auto cfg = make_config(ea);
    const auto loaded = load_dataset(spec);
    const auto result = run_experiment(loaded.dataset, cfg);

    const fs::path dir = output_dir(ea);
    fs::create_directories(dir);
    const auto csv = reports_csv(result.reports);
    if (ea.format != "json") write_file_atomic(dir / "report.csv", csv);
    if (ea.format != "csv") {
        json j{{"dataset", spec.name}, {"reports", json::array()}};
        for (const auto& r : result.reports) j["reports"].push_back(report_to_json(r));
        write_file_atomic(dir / "report.json", j.dump(2) + "\n");
    }
    write_file_atomic(dir / "manifest.json",
                      manifest("eval", spec, cfg, std::chrono::steady_clock::now() - start).dump(2) + "\n");
    out << csv;
    return 0;
}

int cmd_attack(const DatasetArgs& da, const EvalArgs& ea, const AttackArgs& aa, std::ostream& out) {
    const auto start = std::chrono::steady_clock::now();
    const auto spec = resolve_spec(da);
    auto cfg = make_config(ea);
    AttackConfig attack;
    attack.fake_count = aa.fake_count;
    attack.celebrity_rank = aa.celebrity_rank;
    attack.fake_rating = aa.fake_rating;
    attack.bidirectional = !aa.unidirectional;
    try {
        attack.validate(spec.scale);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    cfg.attack = attack;
    const auto loaded = load_dataset(spec);
    const auto result = run_experiment(loaded.dataset, cfg);

    const fs::path dir = output_dir(ea);
    fs::create_directories(dir);
    const auto csv = attack_csv(result.comparisons);
    if (ea.format != "json") write_file_atomic(dir / "attack.csv", csv);
    if (ea.format != "csv") {
        json rows = json::array();
        for (const auto& c : result.comparisons)
            rows.push_back({{"algorithm", c.normal.algorithm},
                            {"normal", report_to_json(c.normal)},
                            {"adversarial", report_to_json(c.adversarial)},
                            {"reduction_pct", c.reduction_pct}});
        write_file_atomic(dir / "attack.json",
                          json{{"dataset", spec.name}, {"comparisons", rows}}.dump(2) + "\n");
    }
    write_file_atomic(dir / "manifest.json",
                      manifest("attack", spec, cfg, std::chrono::steady_clock::now() - start).dump(2) + "\n");
    out << csv;
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_arg, std::ostream& out) {
    std::map<std::pair<std::string, std::string>, json> rows;
    std::vector<std::string> datasets;
    std::vector<std::string> algorithms;
    for (const auto& in : inputs) {
        json doc;
        try {
            doc = json::parse(read_input(in));
        } catch (const json::exception& e) {
            throw UsageError(in + ": " + e.what());
        }
        if (!doc.contains("reports") || !doc["reports"].is_array())
            throw UsageError(in + ": not an eval report (missing 'reports' array)");
        for (const auto& rj : doc["reports"]) {
            EvalReport r;
            try {
                r = report_from_json(rj);
            } catch (const json::exception& e) {
                throw UsageError(in + ": " + e.what());
            }
            const json canon = report_to_json(r);
            const auto key = std::make_pair(r.algorithm, r.dataset);
            if (const auto it = rows.find(key); it != rows.end()) {
                if (it->second != canon)
                    throw UsageError("conflicting reports for algorithm '" + r.algorithm + "' on dataset '" +
                                     r.dataset + "'");
                continue;
            }
            rows.emplace(key, canon);
            if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end())
                datasets.push_back(r.dataset);
            if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end())
                algorithms.push_back(r.algorithm);
        }
    }
    if (rows.empty()) throw UsageError("report: no rows in the given files");

    auto mu_on = [&rows](const std::string& alg, const std::string& ds) -> std::optional<double> {
        const auto it = rows.find({alg, ds});
        if (it == rows.end()) return std::nullopt;
        return it->second["mu_mae"].get<double>();
    };
    auto sort_key = [&](const std::string& alg) {
        for (const auto& ds : datasets)
            if (const auto mu = mu_on(alg, ds)) return std::make_tuple(&ds - datasets.data(), *mu, alg);
        return std::make_tuple(static_cast<std::ptrdiff_t>(datasets.size()), 0.0, alg);
    };
    std::sort(algorithms.begin(), algorithms.end(),
              [&](const std::string& a, const std::string& b) { return sort_key(a) < sort_key(b); });

    std::string merged = "algorithm";
    for (const auto& ds : datasets) merged += "," + csv_field(ds + "_mu_mae") + "," + csv_field(ds + "_sigma_mae");
    merged += "\n";
    std::string series = "algorithm,dataset,run,mae\n";
    for (const auto& alg : algorithms) {
        merged += csv_field(alg);
        for (const auto& ds : datasets) {
            const auto it = rows.find({alg, ds});
            if (it == rows.end()) {
                merged += ",,";
                continue;
            }
            merged += "," + format_fixed4(it->second["mu_mae"].get<double>()) + "," +
                      format_fixed4(it->second["sigma_mae"].get<double>());
            const auto runs = it->second["run_mae"].get<std::vector<double>>();
            for (std::size_t k = 0; k < runs.size(); ++k)
                series += csv_field(alg) + "," + csv_field(ds) + "," + std::to_string(k + 1) + "," +
                          format_fixed4(runs[k]) + "\n";
        }
        merged += "\n";
    }

    fs::path dir = out_arg;
    if (dir.empty()) {
        const char* env = std::getenv("TRUSTREC_OUT_DIR");
        dir = env && *env ? fs::path(env) : fs::path(".");
    }
    fs::create_directories(dir);
    write_file_atomic(dir / "merged.csv", merged);
    write_file_atomic(dir / "series.csv", series);
    out << merged;
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trust-graph recommender benchmark", "trustrec"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    DatasetArgs ingest_ds;
    std::string ingest_format = "text";
    std::string ingest_dump;
    auto* ingest = app.add_subcommand("ingest", "Parse a dataset and print its parse report");
    add_dataset_options(*ingest, ingest_ds);
    ingest->add_option("--format", ingest_format, "Report format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    ingest->add_option("--dump", ingest_dump, "Write a canonical copy of the dataset to this directory");

    DatasetArgs eval_ds;
    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Evaluate recommenders and write report files");
    add_dataset_options(*eval, eval_ds);
    add_eval_options(*eval, eval_args);

    DatasetArgs attack_ds;
    EvalArgs attack_eval;
    AttackArgs attack_args;
    auto* attack = app.add_subcommand("attack", "Evaluate with and without injected fake accounts");
    add_dataset_options(*attack, attack_ds);
    add_eval_options(*attack, attack_eval);
    add_attack_options(*attack, attack_args);

    std::vector<std::string> report_inputs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Merge report.json files into one comparison table");
    report->add_option("inputs", report_inputs, "report.json files")->required();
    report->add_option("--out", report_out, "Output directory (default: $TRUSTREC_OUT_DIR or .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) return cmd_ingest(ingest_ds, ingest_format, ingest_dump, out);
        if (*eval) return cmd_eval(eval_ds, eval_args, out);
        if (*attack) return cmd_attack(attack_ds, attack_eval, attack_args, out);
        if (*report) return cmd_report(report_inputs, report_out, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const IngestError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace trustrec
