#pragma once

#include <cstddef>
#include <vector>

namespace sonarfusion {

/// Nonnegative table over binary variables. `vars` is strictly ascending and
/// bit j of a table index is the state of vars[j].
class Factor {
 public:
  Factor() : table_{1.0} {}
  Factor(std::vector<int> vars, std::vector<double> table);

  const std::vector<int>& vars() const { return vars_; }
  const std::vector<double>& table() const { return table_; }
  std::size_t arity() const { return vars_.size(); }
  bool contains(int var) const;
  /// Valid only for zero-arity factors.
  double scalar() const { return table_.front(); }

  friend Factor operator*(const Factor& a, const Factor& b);

  Factor sum_out(int var) const;
  /// Restricts `var` to `state` and drops it from the scope.
  Factor reduce(int var, bool state) const;
  /// Sums out everything except `var`; returns the unnormalized pair.
  std::pair<double, double> marginal(int var) const;

 private:
  std::vector<int> vars_;
  std::vector<double> table_;
};

}  // namespace sonarfusion
