#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace ptgame {

// Probability weighting w : [0,1] -> [0,1] applied to the joint probability
// of the opponents' state-action tuple.
class WeightingFunction {
 public:
  enum class Kind { identity, prelec, power_complement, table };

  WeightingFunction() = default;

  static WeightingFunction identity();
  // w(y) = exp(-(-ln y)^alpha), alpha in (0,1]; w(0) := 0.
  static WeightingFunction prelec(double alpha);
  // w(y) = 1 - (1 - y)^alpha, alpha > 1.
  static WeightingFunction power_complement(double alpha);
  // Linear interpolation between (y, w) knots. Knots must start at (0,0),
  // end at (1,1), have strictly increasing y and values in [0,1].
  static WeightingFunction table(std::vector<std::pair<double, double>> knots);

  // Throws std::domain_error for y outside [0,1].
  double operator()(double y) const;
  // Same as operator() but clamps y into [0,1] first. Used on products of
  // probabilities that may drift past 1 by an ulp.
  double eval_clamped(double y) const;

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  // Smallest C with |w(y) - w(z)| <= C |y - z| on [0,1], or nullopt when w is
  // not Lipschitz there (prelec with alpha < 1 has infinite slope at 0).
  std::optional<double> lipschitz_constant() const;

 private:
  double eval(double y) const;

  Kind kind_ = Kind::identity;
  double alpha_ = 1.0;
  std::vector<std::pair<double, double>> knots_;
};

// Valuation v : R -> R of realized payoffs.
class ValuationFunction {
 public:
  enum class Kind { identity, piecewise_power, table };

  ValuationFunction() = default;

  static ValuationFunction identity();
  // v(y) = y^c1 for y >= 0, -c2 (-y)^c3 for y < 0; c1, c2, c3 > 0.
  static ValuationFunction piecewise_power(double c1, double c2, double c3);
  // Piecewise linear through the knots, extrapolated linearly past the ends.
  // Needs at least two knots with strictly increasing x.
  static ValuationFunction table(std::vector<std::pair<double, double>> knots);

  double operator()(double y) const;

  Kind kind() const { return kind_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double c3() const { return c3_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  Kind kind_ = Kind::identity;
  double c1_ = 1.0;
  double c2_ = 1.0;
  double c3_ = 1.0;
  std::vector<std::pair<double, double>> knots_;
};

}  // namespace ptgame
