#include "sonarfusion/factor.hpp"

#include <algorithm>
#include <bit>

#include "sonarfusion/error.hpp"

namespace sonarfusion {

Factor::Factor(std::vector<int> vars, std::vector<double> table)
    : vars_(std::move(vars)), table_(std::move(table)) {
  if (!std::is_sorted(vars_.begin(), vars_.end()) ||
      std::adjacent_find(vars_.begin(), vars_.end()) != vars_.end()) {
    throw ModelError("factor: variables must be strictly ascending");
  }
  if (table_.size() != (std::size_t{1} << vars_.size())) {
    throw ModelError("factor: table size must be 2^arity");
  }
}

bool Factor::contains(int var) const {
  return std::binary_search(vars_.begin(), vars_.end(), var);
}

namespace {

std::size_t position(const std::vector<int>& vars, int var) {
  return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), var) - vars.begin());
}

}  // namespace

Factor operator*(const Factor& a, const Factor& b) {
  std::vector<int> vars;
  std::set_union(a.vars_.begin(), a.vars_.end(), b.vars_.begin(), b.vars_.end(),
                 std::back_inserter(vars));
  const std::size_t n = vars.size();
  // Odometer walk over the union: when index u increments, the lowest
  // `countr_one(u)` bits reset and the next one sets, so each operand's index
  // moves by a precomputed delta.
  std::vector<std::ptrdiff_t> delta_a(n + 1, 0), delta_b(n + 1, 0);
  std::ptrdiff_t low_a = 0, low_b = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::ptrdiff_t sa =
        a.contains(vars[k]) ? std::ptrdiff_t{1} << position(a.vars_, vars[k]) : 0;
    const std::ptrdiff_t sb =
        b.contains(vars[k]) ? std::ptrdiff_t{1} << position(b.vars_, vars[k]) : 0;
    delta_a[k] = sa - low_a;
    delta_b[k] = sb - low_b;
    low_a += sa;
    low_b += sb;
  }
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> table(size);
  std::ptrdiff_t ia = 0, ib = 0;
  for (std::size_t u = 0; u < size; ++u) {
    table[u] = a.table_[static_cast<std::size_t>(ia)] * b.table_[static_cast<std::size_t>(ib)];
    const auto k = static_cast<std::size_t>(std::countr_one(u));
    ia += delta_a[k];
    ib += delta_b[k];
  }
  return Factor(std::move(vars), std::move(table));
}

Factor Factor::sum_out(int var) const {
  if (!contains(var)) {
    return *this;
  }
  const std::size_t pos = position(vars_, var);
  std::vector<int> vars = vars_;
  vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(pos));
  const std::size_t low = (std::size_t{1} << pos) - 1;
  std::vector<double> table(table_.size() / 2);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::size_t base = ((i & ~low) << 1) | (i & low);
    table[i] = table_[base] + table_[base | (std::size_t{1} << pos)];
  }
  return Factor(std::move(vars), std::move(table));
}

Factor Factor::reduce(int var, bool state) const {
  if (!contains(var)) {
    return *this;
  }
  const std::size_t pos = position(vars_, var);
  std::vector<int> vars = vars_;
  vars.erase(vars.begin() + static_cast<std::ptrdiff_t>(pos));
  const std::size_t low = (std::size_t{1} << pos) - 1;
  const std::size_t bit = state ? std::size_t{1} << pos : 0;
  std::vector<double> table(table_.size() / 2);
  for (std::size_t i = 0; i < table.size(); ++i) {
    table[i] = table_[((i & ~low) << 1) | (i & low) | bit];
  }
  return Factor(std::move(vars), std::move(table));
}

std::pair<double, double> Factor::marginal(int var) const {
  const std::size_t pos = position(vars_, var);
  if (pos >= vars_.size() || vars_[pos] != var) {
    throw ModelError("factor: marginal of a variable outside the scope");
  }
  double off = 0.0, on = 0.0;
  const std::size_t bit = std::size_t{1} << pos;
  for (std::size_t i = 0; i < table_.size(); ++i) {
    (i & bit ? on : off) += table_[i];
  }
  return {off, on};
}

}  // namespace sonarfusion
