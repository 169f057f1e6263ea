#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gaifman/kb.hpp"

namespace gaifman {

// Undirected entity co-occurrence graph. Nodes are all KB entities; an edge
// joins a and b iff some fact mentions both. Immutable after build; queries
// are pure and safe to run concurrently.
class GaifmanGraph {
 public:
  // Target-predicate facts are excluded from edge construction by default so
  // the link under prediction does not appear in its own neighborhood.
  static GaifmanGraph build(const KnowledgeBase& kb, bool exclude_target = true);

  std::size_t num_nodes() const { return adj_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  const std::vector<EntityId>& neighbors(EntityId a) const;

  // Shortest hop count; 0 iff a == b, nullopt for disconnected pairs.
  std::optional<int> hop_distance(EntityId a, EntityId b) const;

  // All nodes within distance r of a, excluding a itself. Sorted.
  std::vector<EntityId> r_neighborhood(EntityId a, int r) const;

  // `a<TAB>b` per edge, symbols sorted within and across lines.
  std::string edge_list(const KnowledgeBase& kb) const;

  // hist[d] = number of nodes with degree d.
  std::vector<std::size_t> degree_histogram() const;

 private:
  std::vector<std::vector<EntityId>> adj_;
  std::size_t num_edges_ = 0;

  void check_node(EntityId a) const;
};

// One of the w sampled neighborhoods for a query tuple: per tuple entity at
// most k nodes drawn uniformly from its r-neighborhood, unioned.
struct NeighborhoodSample {
  std::vector<EntityId> tuple;
  std::vector<EntityId> members;  // sorted, unique
  int r = 1;
  int k = 1;
  int index = 0;

  bool contains(EntityId e) const;
};

// w independent draws; draw i uses seed^i. Tuple entities missing from the
// graph contribute an empty member set (with a warning) rather than failing.
std::vector<NeighborhoodSample> generate_neighborhoods(const GaifmanGraph& g,
                                                       const std::vector<EntityId>& tuple,
                                                       int r, int k, int w,
                                                       std::uint64_t seed);

}  // namespace gaifman
