#pragma once

namespace sonarfusion {

/// Area-based occupancy prior. `k` is the slope per unit area; `c` is only
/// used by the exponential variant.
struct PriorParams {
  double p_min = 0.3;
  double p_max = 0.8;
  double k = (0.8 - 0.3) / 500.0;
  double c = 0.01;

  void validate() const;
};

/// P(region occupied) = min(p_min + k * area, p_max). Throws ModelError for
/// area <= 0.
double prior_occupancy(double area, const PriorParams& prior);

/// P(region occupied) = 1 - exp(-c * area), the only area-based prior that
/// stays consistent when independent regions are split.
double exponential_prior(double area, double c);

}  // namespace sonarfusion
