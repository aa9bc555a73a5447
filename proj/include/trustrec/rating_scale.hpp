#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace trustrec {

/// Discrete rating domain {min, min+step, ..., max}.
class RatingScale {
public:
    /// Throws std::invalid_argument unless min < max, step > 0 and the span is a
    /// whole number of steps.
    RatingScale(double min, double max, double step);

    double min() const { return min_; }
    double max() const { return max_; }
    double step() const { return step_; }
    double span() const { return max_ - min_; }

    std::size_t levels() const { return levels_; }
    double value_at(std::size_t level) const;
    std::vector<double> values() const;

    /// Level of an exactly on-scale value (within 1e-9 steps), nullopt otherwise.
    std::optional<std::size_t> level_of(double r) const;
    bool contains(double r) const { return level_of(r).has_value(); }

    /// Nearest level, ties half away from zero, clamped to the scale.
    std::size_t nearest_level(double r) const;
    double snap(double r) const { return value_at(nearest_level(r)); }

    friend bool operator==(const RatingScale&, const RatingScale&) = default;

private:
    double min_;
    double max_;
    double step_;
    std::size_t levels_;
};

}  // namespace trustrec
