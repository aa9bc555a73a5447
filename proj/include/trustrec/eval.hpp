#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trustrec/adversary.hpp"
#include "trustrec/dataset.hpp"
#include "trustrec/recommend.hpp"
#include "trustrec/rng.hpp"

namespace trustrec {

struct EvalConfig {
    std::size_t top_k = 10;
    double test_fraction = 0.15;
    std::size_t repeats = 5;
    std::uint64_t seed = 1;
    std::vector<RecommenderSpec> recommenders;
    std::optional<AttackConfig> attack;
    std::size_t threads = 1;  // 0 = hardware concurrency

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// One held-out (user, item) evaluation.
struct Trial {
    UserId user;
    ItemId item;
    double truth;
    double predicted;
    bool fallback;
};

struct RunRecord {
    std::size_t run = 0;
    std::vector<double> abs_errors;
    std::vector<bool> correct;
    std::size_t fallbacks = 0;

    double mae() const;
    double binary_accuracy() const;
};

struct EvalReport {
    std::string algorithm;
    std::string dataset;
    double mu_mae = 0.0;
    double sigma_mae = 0.0;
    double binary_accuracy = 0.0;  // mean over runs
    std::size_t runs = 0;
    double fallback_rate = 0.0;    // fallbacks / predictions, pooled
    std::vector<double> run_mae;
};

/// Paired normal / adversarial reports for one recommender.
struct AttackComparison {
    EvalReport normal;
    EvalReport adversarial;
    double reduction_pct = 0.0;
};

struct ExperimentResult {
    std::vector<EvalReport> reports;            // one per recommender
    std::vector<AttackComparison> comparisons;  // filled when an attack is configured
};

/// Uniform sample without replacement of round(fraction · n) (at least one)
/// among the n non-synthetic users holding a rating. Sorted ascending.
/// Throws std::invalid_argument unless 0 < fraction < 1.
std::vector<UserId> split_test_users(const Dataset& ds, double fraction, Rng& rng);

/// Leave-one-out over every rating of every test user, in (user, item)
/// order. Each prediction draws from Rng::derive(seed, {run, user, item}).
/// Non-writeback recommenders restore the held-out rating after each
/// prediction and may use `threads` workers; writeback recommenders keep
/// their snapped prediction in the working table and run sequentially.
std::vector<Trial> evaluate_trials(const Dataset& ds, const RecommenderSpec& spec,
                                   const std::vector<UserId>& test_users, std::uint64_t seed, std::size_t run,
                                   std::size_t threads = 1);

/// Sequential variant operating on a caller-owned working table. After a
/// non-writeback recommender the table equals its input again.
std::vector<Trial> evaluate_in_place(const TrustGraph& g, RatingsTable& working, const RecommenderSpec& spec,
                                     const std::vector<UserId>& test_users, std::uint64_t seed, std::size_t run);

RunRecord evaluate_once(const Dataset& ds, const RecommenderSpec& spec, const std::vector<UserId>& test_users,
                        std::uint64_t seed, std::size_t run, std::size_t threads = 1);

/// Sample mean and n-1 standard deviation of the per-run MAE (0 for one run).
/// Throws std::invalid_argument for an empty list.
EvalReport aggregate(const std::vector<RunRecord>& runs, const std::string& algorithm = "",
                     const std::string& dataset = "");

/// Reduces, optionally attacks, then evaluates every recommender on a fresh
/// split per run shared by all recommenders (and by the attacked copy).
ExperimentResult run_experiment(const Dataset& ds, const EvalConfig& cfg);

}  // namespace trustrec
