#include "sonarfusion/network.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "sonarfusion/error.hpp"

namespace sonarfusion {

namespace {

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::RegionRoot:
      return "region";
    case NodeKind::OrNode:
      return "or";
    case NodeKind::ReadingLeaf:
      return "reading";
  }
  return "?";
}

const char* polarity_name(Polarity p) {
  switch (p) {
    case Polarity::Pro:
      return "pro";
    case Polarity::Con:
      return "con";
    case Polarity::None:
      break;
  }
  return "-";
}

}  // namespace

std::vector<double> BayesNetwork::or_table(std::size_t fan_in) {
  std::vector<double> cpt(std::size_t{1} << fan_in, 1.0);
  cpt[0] = 0.0;  // parentless OR-nodes are fixed false
  return cpt;
}

NodeId BayesNetwork::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId BayesNetwork::add_region(int region_id, double prior_occupied,
                                std::map<int, Symbol> label_by_reading) {
  if (region_nodes_.contains(region_id)) {
    throw ModelError("add_region: duplicate region id " + std::to_string(region_id));
  }
  if (!(prior_occupied >= 0.0 && prior_occupied <= 1.0)) {
    throw ModelError("add_region: prior must lie in [0, 1]");
  }
  Node n;
  n.kind = NodeKind::RegionRoot;
  n.region_id = region_id;
  n.cpt = {prior_occupied};
  const NodeId id = push(std::move(n));
  region_nodes_[region_id] = id;
  region_labels_[region_id] = std::move(label_by_reading);
  return id;
}

NodeId BayesNetwork::add_region(const Region& region, const RegionPartition& partition) {
  std::map<int, Symbol> labels;
  const auto readings = partition.readings();
  for (std::size_t i = 0; i < readings.size(); ++i) {
    labels[readings[i].id] = region.label.at(i);
  }
  return add_region(region.id, region.prior_occupied, std::move(labels));
}

NodeId BayesNetwork::add_reading(const SonarReading& reading, const SensorParams& sensor) {
  if (reading_nodes_.contains(reading.id)) {
    throw ModelError("add_reading: duplicate reading id " + std::to_string(reading.id));
  }
  ReadingNodes rn;
  for (Polarity pol : {Polarity::Pro, Polarity::Con}) {
    Node n;
    n.kind = NodeKind::OrNode;
    n.polarity = pol;
    n.reading_id = reading.id;
    n.cpt = or_table(0);
    (pol == Polarity::Pro ? rn.pro : rn.con) = push(std::move(n));
  }
  Node leaf;
  leaf.kind = NodeKind::ReadingLeaf;
  leaf.reading_id = reading.id;
  leaf.parents = {rn.pro, rn.con};
  // Rows: bit 0 = pro, bit 1 = con. The dropout probability is not divided by
  // the number of possible readings. Max-range readings have no arc, so their
  // pro chain stays empty and only the first and last rows matter.
  leaf.cpt = {sensor.p_spurious, sensor.p_true, sensor.p_dropout, sensor.p_dropout};
  rn.leaf = push(std::move(leaf));
  reading_nodes_[reading.id] = rn;
  return rn.leaf;
}

void BayesNetwork::add_cause(int region_id, int reading_id, Polarity polarity) {
  auto region_it = region_nodes_.find(region_id);
  if (region_it == region_nodes_.end()) {
    throw ModelError("add_cause: unknown region id " + std::to_string(region_id));
  }
  auto reading_it = reading_nodes_.find(reading_id);
  if (reading_it == reading_nodes_.end()) {
    throw ModelError("add_cause: unknown reading id " + std::to_string(reading_id));
  }
  if (polarity == Polarity::None) {
    throw ModelError("add_cause: polarity must be pro or con");
  }
  const auto& labels = region_labels_.at(region_id);
  auto label_it = labels.find(reading_id);
  const Symbol label = label_it == labels.end() ? Symbol::Exterior : label_it->second;
  const Symbol expected = polarity == Polarity::Pro ? Symbol::Arc : Symbol::Sector;
  if (label != expected) {
    throw ModelError("add_cause: region " + std::to_string(region_id) + " is labeled " +
                     symbol_char(label) + " for reading " + std::to_string(reading_id) +
                     ", inconsistent with polarity " + polarity_name(polarity));
  }

  ReadingNodes& rn = reading_it->second;
  NodeId& head = polarity == Polarity::Pro ? rn.pro : rn.con;
  const NodeId region_node = region_it->second;
  if (nodes_[static_cast<std::size_t>(head)].parents.size() < 2) {
    Node& h = nodes_[static_cast<std::size_t>(head)];
    h.parents.push_back(region_node);
    h.cpt = or_table(h.parents.size());
  } else {
    Node n;
    n.kind = NodeKind::OrNode;
    n.polarity = polarity;
    n.reading_id = reading_id;
    n.parents = {head, region_node};
    n.cpt = or_table(2);
    const NodeId fresh = push(std::move(n));
    Node& leaf = nodes_[static_cast<std::size_t>(rn.leaf)];
    leaf.parents[polarity == Polarity::Pro ? 0 : 1] = fresh;
    head = fresh;
  }
  ++support_arcs_;
}

NodeId BayesNetwork::region_node(int region_id) const {
  auto it = region_nodes_.find(region_id);
  if (it == region_nodes_.end()) {
    throw ModelError("unknown region id " + std::to_string(region_id));
  }
  return it->second;
}

const ReadingNodes& BayesNetwork::reading_nodes(int reading_id) const {
  auto it = reading_nodes_.find(reading_id);
  if (it == reading_nodes_.end()) {
    throw ModelError("unknown reading id " + std::to_string(reading_id));
  }
  return it->second;
}

std::vector<NodeId> BayesNetwork::topological_order() const {
  const std::size_t n = nodes_.size();
  std::vector<int> pending(n, 0);
  std::vector<std::vector<NodeId>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = static_cast<int>(nodes_[i].parents.size());
    for (NodeId p : nodes_[i].parents) {
      children[static_cast<std::size_t>(p)].push_back(static_cast<NodeId>(i));
    }
  }
  std::vector<NodeId> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) {
      order.push_back(static_cast<NodeId>(i));
    }
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (NodeId c : children[static_cast<std::size_t>(order[head])]) {
      if (--pending[static_cast<std::size_t>(c)] == 0) {
        order.push_back(c);
      }
    }
  }
  if (order.size() != n) {
    throw ModelError("network: cycle detected");
  }
  return order;
}

void BayesNetwork::check_invariants() const {
  (void)topological_order();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const std::string where = "network: node " + std::to_string(i);
    if (n.parents.size() > 2) {
      throw ModelError(where + " has fan-in " + std::to_string(n.parents.size()));
    }
    if (n.cpt.size() != (std::size_t{1} << n.parents.size())) {
      throw ModelError(where + " has a malformed CPT");
    }
    for (double p : n.cpt) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ModelError(where + " has a CPT entry outside [0, 1]");
      }
    }
    switch (n.kind) {
      case NodeKind::RegionRoot:
        if (!n.parents.empty()) {
          throw ModelError(where + ": region roots take no parents");
        }
        break;
      case NodeKind::ReadingLeaf:
        if (n.parents.size() != 2) {
          throw ModelError(where + ": reading leaves need pro and con parents");
        }
        break;
      case NodeKind::OrNode:
        if (n.cpt != or_table(n.parents.size())) {
          throw ModelError(where + ": OR-node table is not a deterministic OR");
        }
        for (NodeId p : n.parents) {
          if (nodes_[static_cast<std::size_t>(p)].kind == NodeKind::ReadingLeaf) {
            throw ModelError(where + ": reading leaves cannot feed OR-nodes");
          }
        }
        break;
    }
  }
}

std::string BayesNetwork::dump() const {
  std::ostringstream out;
  out << "support_arcs " << support_arcs_ << '\n';
  char buf[32];
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    out << i << ' ' << kind_name(n.kind) << ' ' << polarity_name(n.polarity) << ' '
        << (n.kind == NodeKind::RegionRoot ? n.region_id : n.reading_id) << " parents=";
    if (n.parents.empty()) {
      out << '-';
    }
    for (std::size_t j = 0; j < n.parents.size(); ++j) {
      out << (j ? "," : "") << n.parents[j];
    }
    out << " cpt=";
    for (std::size_t j = 0; j < n.cpt.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", n.cpt[j]);
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

BayesNetwork BayesNetwork::parse_dump(std::string_view text) {
  BayesNetwork net;
  std::istringstream in{std::string(text)};
  std::string line;
  auto bad = [](const std::string& l) -> ModelError {
    return ModelError("parse_dump: malformed line: " + l);
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
      parts.push_back(item);
    }
    return parts;
  };
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "support_arcs") {
      ls >> net.support_arcs_;
      continue;
    }
    std::string kind, pol, parents, cpt;
    int owner = -1;
    if (!(ls >> kind >> pol >> owner >> parents >> cpt) || parents.rfind("parents=", 0) != 0 ||
        cpt.rfind("cpt=", 0) != 0 || std::stoul(first) != net.nodes_.size()) {
      throw bad(line);
    }
    Node n;
    if (kind == "region") {
      n.kind = NodeKind::RegionRoot;
      n.region_id = owner;
    } else if (kind == "or") {
      n.kind = NodeKind::OrNode;
      n.reading_id = owner;
    } else if (kind == "reading") {
      n.kind = NodeKind::ReadingLeaf;
      n.reading_id = owner;
    } else {
      throw bad(line);
    }
    n.polarity = pol == "pro" ? Polarity::Pro : pol == "con" ? Polarity::Con : Polarity::None;
    if (parents != "parents=-") {
      for (const auto& p : split(parents.substr(8))) {
        n.parents.push_back(std::stoi(p));
      }
    }
    for (const auto& v : split(cpt.substr(4))) {
      n.cpt.push_back(std::stod(v));
    }
    const NodeId id = net.push(n);
    if (n.kind == NodeKind::RegionRoot) {
      net.region_nodes_[n.region_id] = id;
      net.region_labels_[n.region_id];
    } else if (n.kind == NodeKind::ReadingLeaf) {
      if (n.parents.size() != 2) {
        throw bad(line);
      }
      net.reading_nodes_[n.reading_id] = {id, n.parents[0], n.parents[1]};
    }
  }
  net.check_invariants();
  return net;
}

BayesNetwork build_network(const RegionPartition& partition) {
  BayesNetwork net;
  for (const SonarReading& r : partition.readings()) {
    net.add_reading(r, partition.sensor());
  }
  for (const Region& region : partition.regions()) {
    net.add_region(region, partition);
  }
  const auto readings = partition.readings();
  for (const Region& region : partition.regions()) {
    for (std::size_t i = 0; i < readings.size(); ++i) {
      if (region.label[i] == Symbol::Arc) {
        net.add_cause(region.id, readings[i].id, Polarity::Pro);
      } else if (region.label[i] == Symbol::Sector) {
        net.add_cause(region.id, readings[i].id, Polarity::Con);
      }
    }
  }
  return net;
}

}  // namespace sonarfusion
