#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sonarfusion/partition.hpp"
#include "sonarfusion/world.hpp"

namespace sonarfusion {

using NodeId = int;

enum class NodeKind : std::uint8_t { RegionRoot, OrNode, ReadingLeaf };
enum class Polarity : std::uint8_t { None, Pro, Con };

/// Binary node. `cpt[row]` is P(node = true | parents), where bit j of `row`
/// is the state of parents[j]. Region roots' "true" means occupied; reading
/// leaves' "true" means the observed value.
struct Node {
  NodeKind kind = NodeKind::RegionRoot;
  Polarity polarity = Polarity::None;
  std::vector<NodeId> parents;
  std::vector<double> cpt;
  int region_id = -1;
  int reading_id = -1;
};

struct ReadingNodes {
  NodeId leaf = -1;
  NodeId pro = -1;  // head of the pro OR chain
  NodeId con = -1;  // head of the con OR chain
};

/// Three-level network: region roots feed per-reading pro/con OR chains, which
/// feed binary reading leaves. Fan-in never exceeds 2.
class BayesNetwork {
 public:
  /// Root with P(occupied) = prior_occupied. `label_by_reading` records the
  /// region's A/S/E symbol for each reading id; missing ids mean exterior.
  NodeId add_region(int region_id, double prior_occupied, std::map<int, Symbol> label_by_reading);

  /// Convenience overload pulling label and prior from a partition region.
  NodeId add_region(const Region& region, const RegionPartition& partition);

  /// Leaf plus empty pro and con OR-nodes. Leaf CPT: p_dropout when con,
  /// p_true when pro and not con, otherwise p_spurious.
  NodeId add_reading(const SonarReading& reading, const SensorParams& sensor);

  /// Attaches a region under the reading's pro (arc) or con (sector) chain,
  /// splicing a new OR-node on top when the head already has two parents.
  void add_cause(int region_id, int reading_id, Polarity polarity);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<Node>& nodes() const { return nodes_; }

  NodeId region_node(int region_id) const;
  const ReadingNodes& reading_nodes(int reading_id) const;
  const std::map<int, NodeId>& region_index() const { return region_nodes_; }
  const std::map<int, ReadingNodes>& reading_index() const { return reading_nodes_; }

  std::size_t region_count() const { return region_nodes_.size(); }
  std::size_t reading_count() const { return reading_nodes_.size(); }
  /// Number of add_cause calls.
  std::size_t support_arcs() const { return support_arcs_; }

  /// Node ids ordered parents-first.
  std::vector<NodeId> topological_order() const;

  /// Throws ModelError unless acyclic, fan-in <= 2, CPT rows well-formed.
  void check_invariants() const;

  /// One node per line: id, kind, polarity, owner, parents, CPT.
  std::string dump() const;
  static BayesNetwork parse_dump(std::string_view text);

 private:
  NodeId push(Node node);
  static std::vector<double> or_table(std::size_t fan_in);

  std::vector<Node> nodes_;
  std::map<int, NodeId> region_nodes_;
  std::map<int, ReadingNodes> reading_nodes_;
  std::map<int, std::map<int, Symbol>> region_labels_;
  std::size_t support_arcs_ = 0;
};

/// Adds every reading, then every region, then one cause per (region,
/// reading) pair labeled A (pro) or S (con).
BayesNetwork build_network(const RegionPartition& partition);

}  // namespace sonarfusion
