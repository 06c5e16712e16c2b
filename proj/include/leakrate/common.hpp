#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace leakrate {

inline constexpr double kLn2 = 0.69314718055994530941723212145818;

// Constraint value lies outside the attainable range of its problem.
// feasible_max() reports the attainable extreme (xi_max or gamma_max).
class infeasible_error : public std::domain_error {
 public:
  infeasible_error(const std::string& what, double feasible_max)
      : std::domain_error(what), feasible_max_(feasible_max) {}

  double feasible_max() const noexcept { return feasible_max_; }

 private:
  double feasible_max_;
};

}  // namespace leakrate
