#include "ptgame/pt_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ptgame {

namespace {

double interpolate(const std::vector<std::pair<double, double>>& knots, double x) {
  auto hi = std::upper_bound(knots.begin(), knots.end(), x,
                             [](double v, const auto& k) { return v < k.first; });
  if (hi == knots.begin()) hi = std::next(hi);
  if (hi == knots.end()) hi = std::prev(hi);
  const auto lo = std::prev(hi);
  const double slope = (hi->second - lo->second) / (hi->first - lo->first);
  return lo->second + slope * (x - lo->first);
}

void require_increasing(const std::vector<std::pair<double, double>>& knots, const char* what) {
  if (knots.size() < 2) throw std::invalid_argument(std::string(what) + ": need at least two knots");
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k].first > knots[k - 1].first)) {
      throw std::invalid_argument(std::string(what) + ": knot abscissae must be strictly increasing");
    }
  }
  for (const auto& [x, y] : knots) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw std::invalid_argument(std::string(what) + ": knots must be finite");
    }
  }
}

}  // namespace

WeightingFunction WeightingFunction::identity() { return {}; }

WeightingFunction WeightingFunction::prelec(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("prelec weighting needs alpha in (0,1]");
  }
  WeightingFunction w;
  w.kind_ = Kind::prelec;
  w.alpha_ = alpha;
  return w;
}

WeightingFunction WeightingFunction::power_complement(double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("power_complement weighting needs alpha > 1");
  }
  WeightingFunction w;
  w.kind_ = Kind::power_complement;
  w.alpha_ = alpha;
  return w;
}

WeightingFunction WeightingFunction::table(std::vector<std::pair<double, double>> knots) {
  require_increasing(knots, "weighting table");
  if (knots.front() != std::pair{0.0, 0.0} || knots.back() != std::pair{1.0, 1.0}) {
    throw std::invalid_argument("weighting table must start at (0,0) and end at (1,1)");
  }
  for (const auto& [y, v] : knots) {
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("weighting table values must lie in [0,1]");
  }
  WeightingFunction w;
  w.kind_ = Kind::table;
  w.knots_ = std::move(knots);
  return w;
}

double WeightingFunction::operator()(double y) const {
  if (!(y >= 0.0 && y <= 1.0)) {
    throw std::domain_error("weighting argument " + std::to_string(y) + " outside [0,1]");
  }
  return eval(y);
}

double WeightingFunction::eval_clamped(double y) const { return eval(std::clamp(y, 0.0, 1.0)); }

double WeightingFunction::eval(double y) const {
  switch (kind_) {
    case Kind::identity:
      return y;
    case Kind::prelec:
      if (y <= 0.0) return 0.0;
      if (y >= 1.0) return 1.0;
      return std::exp(-std::pow(-std::log(y), alpha_));
    case Kind::power_complement:
      return 1.0 - std::pow(1.0 - y, alpha_);
    case Kind::table:
      return std::clamp(interpolate(knots_, y), 0.0, 1.0);
  }
  return y;
}

std::optional<double> WeightingFunction::lipschitz_constant() const {
  switch (kind_) {
    case Kind::identity:
      return 1.0;
    case Kind::prelec:
      if (alpha_ == 1.0) return 1.0;
      return std::nullopt;
    case Kind::power_complement:
      // derivative alpha (1-y)^(alpha-1) peaks at y = 0
      return alpha_;
    case Kind::table: {
      double c = 0.0;
      for (std::size_t k = 1; k < knots_.size(); ++k) {
        const double slope = std::abs((knots_[k].second - knots_[k - 1].second) /
                                      (knots_[k].first - knots_[k - 1].first));
        c = std::max(c, slope);
      }
      return c;
    }
  }
  return std::nullopt;
}

ValuationFunction ValuationFunction::identity() { return {}; }

ValuationFunction ValuationFunction::piecewise_power(double c1, double c2, double c3) {
  if (!(c1 > 0.0 && c2 > 0.0 && c3 > 0.0)) {
    throw std::invalid_argument("piecewise_power valuation needs c1, c2, c3 > 0");
  }
  ValuationFunction v;
  v.kind_ = Kind::piecewise_power;
  v.c1_ = c1;
  v.c2_ = c2;
  v.c3_ = c3;
  return v;
}

ValuationFunction ValuationFunction::table(std::vector<std::pair<double, double>> knots) {
  require_increasing(knots, "valuation table");
  ValuationFunction v;
  v.kind_ = Kind::table;
  v.knots_ = std::move(knots);
  return v;
}

double ValuationFunction::operator()(double y) const {
  switch (kind_) {
    case Kind::identity:
      return y;
    case Kind::piecewise_power:
      if (y >= 0.0) return std::pow(y, c1_);
      return -c2_ * std::pow(-y, c3_);
    case Kind::table:
      return interpolate(knots_, y);
  }
  return y;
}

}  // namespace ptgame
