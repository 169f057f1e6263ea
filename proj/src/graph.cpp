#include "gaifman/graph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace gaifman {

GaifmanGraph GaifmanGraph::build(const KnowledgeBase& kb, bool exclude_target) {
  GaifmanGraph g;
  g.adj_.assign(kb.num_entities(), {});
  for (const GroundAtom& f : kb.facts()) {
    if (exclude_target && kb.has_target() && f.predicate == kb.target_id()) continue;
    for (std::size_t i = 0; i < f.args.size(); ++i)
      for (std::size_t j = i + 1; j < f.args.size(); ++j) {
        EntityId a = f.args[i], b = f.args[j];
        if (a == b) continue;
        g.adj_[a].push_back(b);
        g.adj_[b].push_back(a);
      }
  }
  for (auto& nbrs : g.adj_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    g.num_edges_ += nbrs.size();
  }
  g.num_edges_ /= 2;
  return g;
}

void GaifmanGraph::check_node(EntityId a) const {
  if (a >= adj_.size())
    throw std::out_of_range("unknown entity id " + std::to_string(a) + " in Gaifman graph");
}

const std::vector<EntityId>& GaifmanGraph::neighbors(EntityId a) const {
  check_node(a);
  return adj_[a];
}

std::optional<int> GaifmanGraph::hop_distance(EntityId a, EntityId b) const {
  check_node(a);
  check_node(b);
  if (a == b) return 0;
  std::vector<int> dist(adj_.size(), -1);
  std::deque<EntityId> queue{a};
  dist[a] = 0;
  while (!queue.empty()) {
    EntityId u = queue.front();
    queue.pop_front();
    for (EntityId v : adj_[u]) {
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      if (v == b) return dist[v];
      queue.push_back(v);
    }
  }
  return std::nullopt;
}

std::vector<EntityId> GaifmanGraph::r_neighborhood(EntityId a, int r) const {
  check_node(a);
  std::vector<int> dist(adj_.size(), -1);
  std::deque<EntityId> queue{a};
  dist[a] = 0;
  std::vector<EntityId> out;
  while (!queue.empty()) {
    EntityId u = queue.front();
    queue.pop_front();
    if (dist[u] >= r) continue;
    for (EntityId v : adj_[u]) {
      if (dist[v] >= 0) continue;
      dist[v] = dist[u] + 1;
      out.push_back(v);
      queue.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string GaifmanGraph::edge_list(const KnowledgeBase& kb) const {
  std::vector<std::string> lines;
  for (EntityId a = 0; a < adj_.size(); ++a)
    for (EntityId b : adj_[a]) {
      if (a >= b) continue;
      const std::string& sa = kb.entity_symbol(a);
      const std::string& sb = kb.entity_symbol(b);
      lines.push_back(sa <= sb ? sa + "\t" + sb : sb + "\t" + sa);
    }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::vector<std::size_t> GaifmanGraph::degree_histogram() const {
  std::size_t max_deg = 0;
  for (const auto& nbrs : adj_) max_deg = std::max(max_deg, nbrs.size());
  std::vector<std::size_t> hist(max_deg + 1, 0);
  for (const auto& nbrs : adj_) ++hist[nbrs.size()];
  return hist;
}

bool NeighborhoodSample::contains(EntityId e) const {
  return std::binary_search(members.begin(), members.end(), e);
}

std::vector<NeighborhoodSample> generate_neighborhoods(const GaifmanGraph& g,
                                                       const std::vector<EntityId>& tuple,
                                                       int r, int k, int w,
                                                       std::uint64_t seed) {
  if (r < 1 || k < 1 || w < 1)
    throw std::invalid_argument("generate_neighborhoods requires r, k, w >= 1");

  // N_r per tuple entity is draw-independent; compute once.
  std::vector<std::vector<EntityId>> reach;
  for (EntityId e : tuple) {
    if (e >= g.num_nodes()) {
      warn("tuple entity id " + std::to_string(e) + " not in graph; empty neighborhood");
      reach.push_back({});
    } else {
      reach.push_back(g.r_neighborhood(e, r));
    }
  }

  std::vector<NeighborhoodSample> out;
  out.reserve(w);
  for (int i = 0; i < w; ++i) {
    Rng rng(seed ^ static_cast<std::uint64_t>(i));
    std::set<EntityId> members;
    for (const auto& nr : reach) {
      if (static_cast<int>(nr.size()) <= k) {
        members.insert(nr.begin(), nr.end());
      } else {
        for (std::size_t idx : rng.sample_indices(nr.size(), k)) members.insert(nr[idx]);
      }
    }
    NeighborhoodSample s;
    s.tuple = tuple;
    s.members.assign(members.begin(), members.end());
    s.r = r;
    s.k = k;
    s.index = i;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gaifman
