#include "trustrec/rating_scale.hpp"

#include <cmath>
#include <stdexcept>

namespace trustrec {

namespace {
constexpr double kLevelTolerance = 1e-9;
}

RatingScale::RatingScale(double min, double max, double step)
    : min_(min), max_(max), step_(step), levels_(0) {
    if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step))
        throw std::invalid_argument("rating scale: non-finite bound");
    if (!(min < max)) throw std::invalid_argument("rating scale: min must be below max");
    if (!(step > 0)) throw std::invalid_argument("rating scale: step must be positive");
    const double steps = (max - min) / step;
    const double whole = std::round(steps);
    if (std::abs(steps - whole) > kLevelTolerance)
        throw std::invalid_argument("rating scale: span is not a multiple of step");
    levels_ = static_cast<std::size_t>(whole) + 1;
}

double RatingScale::value_at(std::size_t level) const {
    if (level >= levels_) throw std::out_of_range("rating scale: level out of range");
    if (level + 1 == levels_) return max_;
    return min_ + static_cast<double>(level) * step_;
}

std::vector<double> RatingScale::values() const {
    std::vector<double> out;
    out.reserve(levels_);
    for (std::size_t l = 0; l < levels_; ++l) out.push_back(value_at(l));
    return out;
}

std::optional<std::size_t> RatingScale::level_of(double r) const {
    if (!std::isfinite(r)) return std::nullopt;
    const double pos = (r - min_) / step_;
    const double whole = std::round(pos);
    if (std::abs(pos - whole) > kLevelTolerance) return std::nullopt;
    if (whole < 0 || whole > static_cast<double>(levels_ - 1)) return std::nullopt;
    return static_cast<std::size_t>(whole);
}

std::size_t RatingScale::nearest_level(double r) const {
    if (std::isnan(r)) throw std::invalid_argument("rating scale: cannot snap NaN");
    // std::round is half away from zero
    const double pos = std::round((r - min_) / step_);
    if (pos <= 0) return 0;
    if (pos >= static_cast<double>(levels_ - 1)) return levels_ - 1;
    return static_cast<std::size_t>(pos);
}

}  // namespace trustrec
