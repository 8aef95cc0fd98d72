#include "sonarfusion/inference.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "sonarfusion/error.hpp"
#include "sonarfusion/factor.hpp"
#include "sonarfusion/rng.hpp"

namespace sonarfusion {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_evidence(const BayesNetwork& net, const Evidence& evidence) {
  for (const auto& [id, state] : evidence.leaves) {
    if (id < 0 || static_cast<std::size_t>(id) >= net.size() ||
        net.node(id).kind != NodeKind::ReadingLeaf) {
      throw InferenceError("evidence may only be set on reading leaves");
    }
  }
}

bool is_observed(const Evidence& evidence, NodeId id) { return evidence.leaves.contains(id); }

/// Leaves are either instantiated or barren; everything else is a variable.
bool is_variable(const BayesNetwork& net, NodeId id) {
  return net.node(id).kind != NodeKind::ReadingLeaf;
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

void fill_region_map(const BayesNetwork& net, Posterior& post, const std::vector<int>& query) {
  if (query.empty()) {
    for (const auto& [region, node] : net.region_index()) {
      post.occupied[region] = post.node_true[static_cast<std::size_t>(node)];
    }
  } else {
    for (int region : query) {
      post.occupied[region] = post.node_true[static_cast<std::size_t>(net.region_node(region))];
    }
  }
}

Factor cpt_factor(const BayesNetwork& net, NodeId id) {
  const Node& node = net.node(id);
  std::vector<int> vars = node.parents;
  vars.push_back(id);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  auto bit_of = [&](int var) {
    return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), var) - vars.begin());
  };
  const std::size_t self = bit_of(id);
  std::vector<std::size_t> parent_bits;
  for (NodeId p : node.parents) {
    parent_bits.push_back(bit_of(p));
  }
  std::vector<double> table(std::size_t{1} << vars.size());
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    std::size_t row = 0;
    for (std::size_t j = 0; j < parent_bits.size(); ++j) {
      row |= ((idx >> parent_bits[j]) & 1U) << j;
    }
    const double p = node.cpt[row];
    table[idx] = (idx >> self) & 1U ? p : 1.0 - p;
  }
  return Factor(std::move(vars), std::move(table));
}

}  // namespace

Evidence Evidence::all_observed(const BayesNetwork& net) {
  Evidence e;
  for (const auto& [reading, nodes] : net.reading_index()) {
    e.leaves[nodes.leaf] = true;
  }
  return e;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Enumeration:
      return "enumeration";
    case Method::VariableElimination:
      return "exact";
    case Method::LikelihoodWeighting:
      return "sampling";
  }
  return "?";
}

std::string Posterior::trace() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "method=%s\ninduced_width=%d\nsamples=%zu\nevidence_prob=%.17g\nelapsed_ms=%.3f\n",
                method_name(method), induced_width, samples, evidence_probability, elapsed_ms);
  return buf;
}

// ---------------------------------------------------------------------------
// Enumeration

Posterior enumerate_posterior(const BayesNetwork& net, const Evidence& evidence, int max_roots) {
  const auto start = Clock::now();
  check_evidence(net, evidence);
  std::vector<NodeId> roots;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (net.node(static_cast<NodeId>(i)).kind == NodeKind::RegionRoot) {
      roots.push_back(static_cast<NodeId>(i));
    }
  }
  if (static_cast<int>(roots.size()) > max_roots) {
    throw InferenceError("enumeration: " + std::to_string(roots.size()) +
                         " roots exceed the limit of " + std::to_string(max_roots));
  }
  const std::vector<NodeId> order = net.topological_order();
  const std::size_t n = net.size();
  std::vector<char> state(n, 0);
  std::vector<double> mass_true(n, 0.0);
  double total = 0.0;

  const std::uint64_t assignments = std::uint64_t{1} << roots.size();
  for (std::uint64_t a = 0; a < assignments; ++a) {
    for (std::size_t r = 0; r < roots.size(); ++r) {
      state[static_cast<std::size_t>(roots[r])] = static_cast<char>((a >> r) & 1U);
    }
    double weight = 1.0;
    for (NodeId id : order) {
      const Node& node = net.node(id);
      const auto i = static_cast<std::size_t>(id);
      switch (node.kind) {
        case NodeKind::RegionRoot:
          weight *= state[i] ? node.cpt[0] : 1.0 - node.cpt[0];
          break;
        case NodeKind::OrNode: {
          std::size_t row = 0;
          for (std::size_t j = 0; j < node.parents.size(); ++j) {
            row |= static_cast<std::size_t>(state[static_cast<std::size_t>(node.parents[j])]) << j;
          }
          // OR-nodes are deterministic, but honour whatever table is present.
          state[i] = node.cpt[row] >= 0.5 ? 1 : 0;
          weight *= state[i] ? node.cpt[row] : 1.0 - node.cpt[row];
          break;
        }
        case NodeKind::ReadingLeaf: {
          auto it = evidence.leaves.find(id);
          if (it == evidence.leaves.end()) {
            break;
          }
          std::size_t row = 0;
          for (std::size_t j = 0; j < node.parents.size(); ++j) {
            row |= static_cast<std::size_t>(state[static_cast<std::size_t>(node.parents[j])]) << j;
          }
          weight *= it->second ? node.cpt[row] : 1.0 - node.cpt[row];
          break;
        }
      }
      if (weight == 0.0) {
        break;
      }
    }
    if (weight == 0.0) {
      continue;
    }
    total += weight;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i]) {
        mass_true[i] += weight;
      }
    }
  }
  if (!(total > 0.0)) {
    throw InferenceError("impossible evidence");
  }
  Posterior post;
  post.method = Method::Enumeration;
  post.evidence_probability = total;
  post.node_true.assign(n, kNaN);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_variable(net, static_cast<NodeId>(i))) {
      post.node_true[i] = clamp01(mass_true[i] / total);
    }
  }
  fill_region_map(net, post, {});
  post.elapsed_ms = ms_since(start);
  return post;
}

// ---------------------------------------------------------------------------
// Variable elimination

namespace {

struct InteractionGraph {
  std::vector<NodeId> vars;            // compact index -> node id
  std::vector<int> index;              // node id -> compact index or -1
  std::vector<std::vector<char>> adj;  // adjacency matrix
  std::vector<std::vector<int>> nbrs;

  void connect(int a, int b) {
    if (a == b || adj[a][b]) {
      return;
    }
    adj[a][b] = adj[b][a] = 1;
    nbrs[a].push_back(b);
    nbrs[b].push_back(a);
  }
};

InteractionGraph interaction_graph(const BayesNetwork& net, const Evidence& evidence) {
  InteractionGraph g;
  g.index.assign(net.size(), -1);
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (is_variable(net, static_cast<NodeId>(i))) {
      g.index[i] = static_cast<int>(g.vars.size());
      g.vars.push_back(static_cast<NodeId>(i));
    }
  }
  const std::size_t m = g.vars.size();
  g.adj.assign(m, std::vector<char>(m, 0));
  g.nbrs.assign(m, {});
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto id = static_cast<NodeId>(i);
    const Node& node = net.node(id);
    if (node.kind == NodeKind::ReadingLeaf && !is_observed(evidence, id)) {
      continue;
    }
    std::vector<int> scope;
    for (NodeId p : node.parents) {
      scope.push_back(g.index[static_cast<std::size_t>(p)]);
    }
    if (g.index[i] >= 0) {
      scope.push_back(g.index[i]);
    }
    for (std::size_t a = 0; a < scope.size(); ++a) {
      for (std::size_t b = a + 1; b < scope.size(); ++b) {
        g.connect(scope[a], scope[b]);
      }
    }
  }
  return g;
}

}  // namespace

EliminationPlan plan_elimination(const BayesNetwork& net, const Evidence& evidence) {
  check_evidence(net, evidence);
  InteractionGraph g = interaction_graph(net, evidence);
  const std::size_t m = g.vars.size();
  std::vector<char> done(m, 0);
  std::vector<long> fill(m, 0);
  std::vector<char> dirty(m, 1);

  auto live_neighbors = [&](int v) {
    std::vector<int> out;
    for (int u : g.nbrs[v]) {
      if (!done[u]) {
        out.push_back(u);
      }
    }
    return out;
  };
  auto fill_of = [&](int v) {
    const std::vector<int> nb = live_neighbors(v);
    long missing = 0;
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        missing += g.adj[nb[a]][nb[b]] ? 0 : 1;
      }
    }
    return missing;
  };

  EliminationPlan plan;
  plan.order.reserve(m);
  for (std::size_t step = 0; step < m; ++step) {
    int best = -1;
    for (std::size_t v = 0; v < m; ++v) {
      if (done[v]) {
        continue;
      }
      if (dirty[v]) {
        fill[v] = fill_of(static_cast<int>(v));
        dirty[v] = 0;
      }
      // Compact indices ascend with node ids, so the first minimum wins ties.
      if (best < 0 || fill[v] < fill[static_cast<std::size_t>(best)]) {
        best = static_cast<int>(v);
      }
    }
    const std::vector<int> nb = live_neighbors(best);
    plan.induced_width = std::max(plan.induced_width, static_cast<int>(nb.size()));
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        g.connect(nb[a], nb[b]);
      }
    }
    done[static_cast<std::size_t>(best)] = 1;
    plan.order.push_back(g.vars[static_cast<std::size_t>(best)]);
    for (int u : nb) {
      dirty[static_cast<std::size_t>(u)] = 1;
      for (int w : g.nbrs[u]) {
        dirty[static_cast<std::size_t>(w)] = 1;
      }
    }
  }
  return plan;
}

Posterior variable_elimination(const BayesNetwork& net, const Evidence& evidence,
                               const std::vector<int>& query, int max_width) {
  const auto start = Clock::now();
  const EliminationPlan plan = plan_elimination(net, evidence);
  if (plan.induced_width > max_width) {
    throw InferenceError("exact inference budget exceeded: induced width " +
                         std::to_string(plan.induced_width) + " > " + std::to_string(max_width));
  }

  struct PoolItem {
    Factor factor;
    int source = -1;  // producing cluster, -1 for CPT factors
    bool used = false;
  };
  std::vector<PoolItem> pool;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto id = static_cast<NodeId>(i);
    const Node& node = net.node(id);
    if (node.kind == NodeKind::ReadingLeaf) {
      auto it = evidence.leaves.find(id);
      if (it == evidence.leaves.end()) {
        continue;  // barren
      }
      pool.push_back({cpt_factor(net, id).reduce(id, it->second)});
    } else {
      pool.push_back({cpt_factor(net, id)});
    }
  }

  // Upward sweep: cluster t eliminates plan.order[t].
  struct Cluster {
    NodeId var;
    Factor local;               // product of the CPT factors it absorbed
    std::vector<int> children;  // clusters whose messages it absorbed
    Factor message;             // sent to the parent, scope = separator
    int parent = -1;
  };
  std::vector<Cluster> clusters(plan.order.size());
  for (std::size_t t = 0; t < plan.order.size(); ++t) {
    Cluster& c = clusters[t];
    c.var = plan.order[t];
    Factor product;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      PoolItem& item = pool[k];
      if (item.used || !item.factor.contains(c.var)) {
        continue;
      }
      item.used = true;
      if (item.source < 0) {
        c.local = c.local * item.factor;
      } else {
        c.children.push_back(item.source);
        clusters[static_cast<std::size_t>(item.source)].parent = static_cast<int>(t);
      }
      product = product * item.factor;
    }
    c.message = product.sum_out(c.var);
    pool.push_back({c.message, static_cast<int>(t)});
  }

  double z = 1.0;
  for (const PoolItem& item : pool) {
    if (!item.used) {
      z *= item.factor.scalar();
    }
  }
  if (!(z > 0.0)) {
    throw InferenceError("impossible evidence");
  }

  // Downward sweep, parents before children.
  Posterior post;
  post.method = Method::VariableElimination;
  post.induced_width = plan.induced_width;
  post.evidence_probability = z;
  post.node_true.assign(net.size(), kNaN);
  std::vector<Factor> down(clusters.size());
  for (std::size_t t = clusters.size(); t-- > 0;) {
    const Cluster& c = clusters[t];
    const Factor base = c.local * down[t];
    const std::size_t k = c.children.size();
    // prefix[i] = product of the first i child messages; suffix likewise.
    std::vector<Factor> prefix(k + 1), suffix(k + 1);
    for (std::size_t i = 0; i < k; ++i) {
      prefix[i + 1] = prefix[i] * clusters[static_cast<std::size_t>(c.children[i])].message;
    }
    for (std::size_t i = k; i-- > 0;) {
      suffix[i] = suffix[i + 1] * clusters[static_cast<std::size_t>(c.children[i])].message;
    }
    const Factor belief = base * prefix[k];
    const auto [off, on] = belief.marginal(c.var);
    if (!(off + on > 0.0)) {
      throw InferenceError("impossible evidence");
    }
    post.node_true[static_cast<std::size_t>(c.var)] = clamp01(on / (off + on));

    for (std::size_t i = 0; i < k; ++i) {
      const auto child = static_cast<std::size_t>(c.children[i]);
      Factor msg = base * prefix[i] * suffix[i + 1];
      const std::vector<int>& keep = clusters[child].message.vars();
      for (int v : std::vector<int>(msg.vars())) {
        if (!std::binary_search(keep.begin(), keep.end(), v)) {
          msg = msg.sum_out(v);
        }
      }
      down[child] = std::move(msg);
    }
  }
  fill_region_map(net, post, query);
  post.elapsed_ms = ms_since(start);
  return post;
}

// ---------------------------------------------------------------------------
// Likelihood weighting

namespace {

constexpr std::size_t kChunk = 8192;

struct ChunkTally {
  double weight = 0.0;
  std::vector<double> mass_true;
};

ChunkTally sample_chunk(const BayesNetwork& net, const std::vector<NodeId>& order,
                        const Evidence& evidence, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = net.size();
  ChunkTally tally;
  tally.mass_true.assign(n, 0.0);
  std::vector<char> state(n, 0);
  for (std::size_t s = 0; s < count; ++s) {
    double w = 1.0;
    for (NodeId id : order) {
      const Node& node = net.node(id);
      const auto i = static_cast<std::size_t>(id);
      std::size_t row = 0;
      for (std::size_t j = 0; j < node.parents.size(); ++j) {
        row |= static_cast<std::size_t>(state[static_cast<std::size_t>(node.parents[j])]) << j;
      }
      const double p = node.cpt[row];
      if (node.kind == NodeKind::ReadingLeaf) {
        auto it = evidence.leaves.find(id);
        if (it != evidence.leaves.end()) {
          w *= it->second ? p : 1.0 - p;
        }
        continue;
      }
      if (p <= 0.0) {
        state[i] = 0;
      } else if (p >= 1.0) {
        state[i] = 1;
      } else {
        state[i] = uniform01(rng) < p ? 1 : 0;
      }
    }
    if (w == 0.0) {
      continue;
    }
    tally.weight += w;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i]) {
        tally.mass_true[i] += w;
      }
    }
  }
  return tally;
}

}  // namespace

Posterior likelihood_weighting(const BayesNetwork& net, const Evidence& evidence,
                               std::size_t n_samples, std::uint64_t seed, unsigned threads) {
  const auto start = Clock::now();
  if (n_samples < 1) {
    throw InferenceError("likelihood weighting needs at least one sample");
  }
  check_evidence(net, evidence);
  const std::vector<NodeId> order = net.topological_order();
  const std::size_t chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<ChunkTally> tallies(chunks);
  auto run = [&](std::size_t c) {
    const std::size_t count = std::min(kChunk, n_samples - c * kChunk);
    tallies[c] = sample_chunk(net, order, evidence, count, derive_seed(seed, c));
  };

  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      run(c);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
          run(c);
        }
      });
    }
    for (auto& w : workers) {
      w.join();
    }
  }

  const std::size_t n = net.size();
  double total = 0.0;
  std::vector<double> mass(n, 0.0);
  for (const ChunkTally& t : tallies) {
    total += t.weight;
    for (std::size_t i = 0; i < n; ++i) {
      mass[i] += t.mass_true[i];
    }
  }
  if (!(total > 0.0)) {
    throw InferenceError("degenerate weights");
  }
  Posterior post;
  post.method = Method::LikelihoodWeighting;
  post.samples = n_samples;
  post.evidence_probability = total / static_cast<double>(n_samples);
  post.node_true.assign(n, kNaN);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_variable(net, static_cast<NodeId>(i))) {
      post.node_true[i] = clamp01(mass[i] / total);
    }
  }
  fill_region_map(net, post, {});
  post.elapsed_ms = ms_since(start);
  return post;
}

Posterior infer(const BayesNetwork& net, const Evidence& evidence, const InferenceOptions& options) {
  switch (options.strategy) {
    case Strategy::Exact:
      return variable_elimination(net, evidence, {}, options.max_exact_width);
    case Strategy::Sampling:
      return likelihood_weighting(net, evidence, options.samples, options.seed, options.threads);
    case Strategy::Auto:
      break;
  }
  const EliminationPlan plan = plan_elimination(net, evidence);
  if (plan.induced_width <= options.width_cap) {
    return variable_elimination(net, evidence, {}, options.width_cap);
  }
  Posterior post =
      likelihood_weighting(net, evidence, options.samples, options.seed, options.threads);
  post.induced_width = plan.induced_width;
  return post;
}

}  // namespace sonarfusion
