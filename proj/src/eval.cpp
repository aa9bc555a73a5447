#include "trustrec/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace trustrec {

void EvalConfig::validate() const {
    if (top_k == 0) throw std::invalid_argument("eval: top_k must be at least 1");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("eval: test fraction must lie strictly between 0 and 1");
    if (repeats == 0) throw std::invalid_argument("eval: repeats must be at least 1");
    for (const auto& r : recommenders) r.validate();
}

double RunRecord::mae() const {
    if (abs_errors.empty()) return 0.0;
    return std::accumulate(abs_errors.begin(), abs_errors.end(), 0.0) / static_cast<double>(abs_errors.size());
}

double RunRecord::binary_accuracy() const {
    if (correct.empty()) return 0.0;
    const auto hits = std::count(correct.begin(), correct.end(), true);
    return static_cast<double>(hits) / static_cast<double>(correct.size());
}

std::vector<UserId> split_test_users(const Dataset& ds, double fraction, Rng& rng) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split_test_users: fraction must lie strictly between 0 and 1");
    std::vector<UserId> pool;
    for (std::size_t u = 0; u < ds.user_count(); ++u) {
        const UserId uid{static_cast<std::uint32_t>(u)};
        if (!ds.is_synthetic(uid) && !ds.ratings.items_of(uid).empty()) pool.push_back(uid);
    }
    if (pool.empty()) return {};
    const auto want = static_cast<std::size_t>(std::round(fraction * static_cast<double>(pool.size())));
    const std::size_t take = std::clamp<std::size_t>(want, 1, pool.size());
    for (std::size_t k = 0; k < take; ++k) {
        const std::size_t j = k + rng.uniform_index(pool.size() - k);
        std::swap(pool[k], pool[j]);
    }
    pool.resize(take);
    std::sort(pool.begin(), pool.end());
    return pool;
}

namespace {

struct HeldOut {
    UserId user;
    ItemId item;
    double truth;
};

std::vector<HeldOut> held_out_list(const RatingsTable& t, const std::vector<UserId>& users) {
    std::vector<UserId> sorted = users;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<HeldOut> out;
    for (UserId u : sorted)
        for (const auto& e : t.items_of(u)) out.push_back({u, e.item, e.value});
    return out;
}

Trial run_one(const RecommenderSpec& spec, const TrustGraph& g, RatingsTable& working, WalkCache& cache,
              const HeldOut& h, std::uint64_t seed, std::size_t run) {
    working.remove(h.user, h.item);
    Rng rng = Rng::derive(seed, {run, h.user.value, h.item.value});
    const Prediction p = predict(spec, PredictionContext{g, working, &cache}, h.user, h.item, rng);
    if (spec.writeback)
        working.insert(h.user, h.item, working.scale().snap(p.value));
    else
        working.insert(h.user, h.item, h.truth);
    return Trial{h.user, h.item, h.truth, p.value, p.fallback};
}

}  // namespace

std::vector<Trial> evaluate_in_place(const TrustGraph& g, RatingsTable& working, const RecommenderSpec& spec,
                                     const std::vector<UserId>& test_users, std::uint64_t seed, std::size_t run) {
    spec.validate();
    const auto held = held_out_list(working, test_users);
    std::vector<Trial> trials;
    trials.reserve(held.size());
    WalkCache cache(g);
    for (const auto& h : held) trials.push_back(run_one(spec, g, working, cache, h, seed, run));
    return trials;
}

std::vector<Trial> evaluate_trials(const Dataset& ds, const RecommenderSpec& spec,
                                   const std::vector<UserId>& test_users, std::uint64_t seed, std::size_t run,
                                   std::size_t threads) {
    spec.validate();
    const auto held = held_out_list(ds.ratings, test_users);
    std::vector<Trial> trials(held.size());
    WalkCache cache(ds.graph);

    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(1, held.size()));

    if (spec.writeback || threads <= 1) {
        RatingsTable working = ds.ratings;
        return evaluate_in_place(ds.graph, working, spec, test_users, seed, run);
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            RatingsTable working = ds.ratings;
            for (std::size_t k = next++; k < held.size(); k = next++)
                trials[k] = run_one(spec, ds.graph, working, cache, held[k], seed, run);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = held.size();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return trials;
}

RunRecord evaluate_once(const Dataset& ds, const RecommenderSpec& spec, const std::vector<UserId>& test_users,
                        std::uint64_t seed, std::size_t run, std::size_t threads) {
    const auto trials = evaluate_trials(ds, spec, test_users, seed, run, threads);
    const auto& scale = ds.ratings.scale();
    RunRecord rec;
    rec.run = run;
    rec.abs_errors.reserve(trials.size());
    rec.correct.reserve(trials.size());
    for (const auto& t : trials) {
        rec.abs_errors.push_back(std::abs(t.predicted - t.truth));
        rec.correct.push_back(scale.snap(t.predicted) == t.truth);
        if (t.fallback) ++rec.fallbacks;
    }
    return rec;
}

EvalReport aggregate(const std::vector<RunRecord>& runs, const std::string& algorithm, const std::string& dataset) {
    if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
    EvalReport r;
    r.algorithm = algorithm;
    r.dataset = dataset;
    r.runs = runs.size();
    std::size_t predictions = 0, fallbacks = 0;
    double acc = 0.0;
    for (const auto& run : runs) {
        r.run_mae.push_back(run.mae());
        acc += run.binary_accuracy();
        predictions += run.abs_errors.size();
        fallbacks += run.fallbacks;
    }
    const double n = static_cast<double>(runs.size());
    r.mu_mae = std::accumulate(r.run_mae.begin(), r.run_mae.end(), 0.0) / n;
    if (runs.size() > 1) {
        double ss = 0.0;
        for (double m : r.run_mae) ss += (m - r.mu_mae) * (m - r.mu_mae);
        r.sigma_mae = std::sqrt(ss / (n - 1.0));
    }
    r.binary_accuracy = acc / n;
    r.fallback_rate = predictions ? static_cast<double>(fallbacks) / static_cast<double>(predictions) : 0.0;
    return r;
}

ExperimentResult run_experiment(const Dataset& ds, const EvalConfig& cfg) {
    cfg.validate();
    const Dataset reduced = top_k_reduce(ds, cfg.top_k);
    std::optional<Dataset> attacked;
    if (cfg.attack) attacked = inject_fake_accounts(reduced, *cfg.attack);

    const std::size_t n_rec = cfg.recommenders.size();
    std::vector<std::vector<RunRecord>> normal(n_rec), adversarial(n_rec);
    for (std::size_t r = 1; r <= cfg.repeats; ++r) {
        Rng split_rng = Rng::derive(cfg.seed, {r});
        const auto users = split_test_users(reduced, cfg.test_fraction, split_rng);
        for (std::size_t k = 0; k < n_rec; ++k) {
            normal[k].push_back(evaluate_once(reduced, cfg.recommenders[k], users, cfg.seed, r, cfg.threads));
            if (attacked)
                adversarial[k].push_back(
                    evaluate_once(*attacked, cfg.recommenders[k], users, cfg.seed, r, cfg.threads));
        }
    }

    ExperimentResult out;
    for (std::size_t k = 0; k < n_rec; ++k) {
        const auto& name = cfg.recommenders[k].name;
        out.reports.push_back(aggregate(normal[k], name, reduced.name));
        if (attacked) {
            AttackComparison c{out.reports.back(), aggregate(adversarial[k], name, reduced.name), 0.0};
            c.reduction_pct = c.normal.mu_mae > 0.0 ? reduction_pct(c.normal.mu_mae, c.adversarial.mu_mae) : 0.0;
            out.comparisons.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace trustrec
