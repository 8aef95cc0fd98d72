#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sonarfusion/network.hpp"

namespace sonarfusion {

/// Observed states of reading leaves (true = the observed value). Leaves
/// absent from the map are unobserved.
struct Evidence {
  std::map<NodeId, bool> leaves;

  /// Every reading leaf set to its observed value.
  static Evidence all_observed(const BayesNetwork& net);
};

enum class Method : std::uint8_t { Enumeration, VariableElimination, LikelihoodWeighting };

const char* method_name(Method m);

struct Posterior {
  /// Region id -> P(occupied | evidence).
  std::map<int, double> occupied;
  /// Per node P(true | evidence); NaN for leaves (observed or barren).
  std::vector<double> node_true;
  double evidence_probability = 0.0;
  Method method = Method::Enumeration;
  int induced_width = -1;
  std::size_t samples = 0;
  double elapsed_ms = 0.0;

  /// key=value lines: method, induced_width, samples, evidence_prob, elapsed_ms.
  std::string trace() const;
};

/// Sums the joint over all 2^roots assignments. Reference oracle; throws
/// InferenceError above `max_roots` roots or for zero-probability evidence.
Posterior enumerate_posterior(const BayesNetwork& net, const Evidence& evidence, int max_roots = 24);

struct EliminationPlan {
  std::vector<NodeId> order;
  int induced_width = 0;  // largest cluster size minus one
};

/// Greedy min-fill order (ties to the lowest node id) over the moral graph of
/// the network with barren leaves removed and evidence instantiated.
EliminationPlan plan_elimination(const BayesNetwork& net, const Evidence& evidence);

/// Exact marginals by variable elimination with a backward pass over the
/// clusters it creates, so every marginal costs one sweep in each direction.
/// `query` restricts the returned region map (empty = all regions). Throws
/// InferenceError when the plan's induced width exceeds `max_width`.
Posterior variable_elimination(const BayesNetwork& net, const Evidence& evidence,
                               const std::vector<int>& query = {}, int max_width = 24);

/// Forward-samples roots and OR-nodes, weighting each sample by the evidence
/// likelihood. Samples are drawn in fixed chunks with per-chunk seeds, so the
/// result does not depend on `threads`.
Posterior likelihood_weighting(const BayesNetwork& net, const Evidence& evidence,
                               std::size_t n_samples, std::uint64_t seed, unsigned threads = 1);

enum class Strategy : std::uint8_t { Exact, Sampling, Auto };

struct InferenceOptions {
  Strategy strategy = Strategy::Auto;
  int width_cap = 20;        // auto uses exact inference up to this induced width
  int max_exact_width = 24;  // forced exact inference aborts beyond this
  std::size_t samples = 200000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

Posterior infer(const BayesNetwork& net, const Evidence& evidence, const InferenceOptions& options);

}  // namespace sonarfusion
