#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace resim {

/// Weighted directed graph. Edge (j, i) means agent i receives from j.
/// Weights satisfy a_ij in [gamma, 1) with gamma > 0, and every row sum
/// of the adjacency matrix is at most one.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(int n, double gamma = 0.0);

  /// Adds edge (j, i) with weight w. Rejects self-loops and w outside (0, 1).
  void add_edge(int j, int i, double w);
  void remove_edge(int j, int i);

  /// Enforces the full invariant set (weight bounds, row sums <= 1).
  /// A gamma of zero is replaced by the smallest weight present (or 1/n).
  void validate();

  int n() const { return n_; }
  double gamma() const { return gamma_; }
  void set_gamma(double g) { gamma_ = g; }

  bool has_edge(int j, int i) const;
  double weight(int j, int i) const;
  int edge_count() const;
  int in_degree(int i) const { return static_cast<int>(in_[i].size()); }

  /// In-neighbors of i with weights, sorted by neighbor index.
  const std::vector<std::pair<int, double>>& in_edges(int i) const { return in_[i]; }
  std::vector<int> in_neighbors(int i) const;

  Eigen::MatrixXd adjacency_matrix() const;
  /// L with l_ii = sum_j a_ij and l_ij = -a_ij; every row sums to zero.
  Eigen::MatrixXd laplacian() const;

  void check_node(int i) const;

 private:
  int n_ = 0;
  double gamma_ = 0.0;
  std::vector<std::vector<std::pair<int, double>>> in_;
};

/// Verdict of the (r, s)-robustness decision procedure. When the property
/// fails, `witness` holds the first pair of nonempty disjoint subsets (in
/// canonical enumeration order) for which none of the three conditions holds.
struct RobustnessReport {
  int r = 0;
  int s = 1;
  bool holds = false;
  std::optional<std::pair<std::vector<int>, std::vector<int>>> witness;
};

/// Time-indexed list of digraphs over a common node set.
struct GraphSequence {
  std::vector<Digraph> graphs;
  int n() const { return graphs.empty() ? 0 : graphs.front().n(); }
  std::size_t size() const { return graphs.size(); }
};

inline constexpr int kDefaultEnumGuard = 20;

/// X^r_S: the nodes of S with at least r in-neighbors outside S.
std::vector<int> reachable_set(const Digraph& g, const std::vector<int>& s, int r);

/// Exhaustive (r, s)-robustness decision over all unordered pairs of
/// nonempty disjoint subsets. Cost grows as 3^n; graphs larger than `guard`
/// nodes are refused.
RobustnessReport is_rs_robust(const Digraph& g, int r, int s, int guard = kDefaultEnumGuard);

/// r-robustness is (r, 1)-robustness.
RobustnessReport is_r_robust(const Digraph& g, int r, int guard = kDefaultEnumGuard);

/// True iff the edge union of every h consecutive graphs is r-robust.
bool is_jointly_robust(const GraphSequence& seq, int r, int h, int guard = kDefaultEnumGuard);

/// True iff some node has a directed path to every other node.
bool has_directed_spanning_tree(const Digraph& g);

/// Structural edge union over [first, last]; weights are reset to 1/n since
/// robustness does not depend on them.
Digraph union_graph(const GraphSequence& seq, std::size_t first, std::size_t last);

/// Complete digraph with uniform weights (gamma = weight). The default
/// weight 1/n keeps row sums at most one for every degree; a custom weight
/// must satisfy weight * (n-1) <= 1.
Digraph build_complete(int n, std::optional<double> weight = std::nullopt);

/// The four-block family used to separate 2f-robustness from resilience
/// under delayed asynchronous updates: a complete core of 4f nodes feeding
/// three complete f-node blocks, plus return edges from every outer block
/// into the core. Deterministic lowest-index attachment.
///
/// Block layout (0-based): core = [0, 4f), B2 = [4f, 5f), B3 = [5f, 6f),
/// B4 = [6f, 7f). Each B2 node receives from core nodes [0, 2f); each B3
/// node from core nodes [0, f) and all of B2; each B4 node from core nodes
/// [f, 2f) and all of B2; every outer-block node feeds every core node.
Digraph build_proposition_graph(int f);

/// Constraints for find_rs_robust_example.
struct GraphSearchConstraints {
  std::map<int, int> exact_in_degree;                 // node -> required in-degree
  std::vector<std::pair<int, int>> required_edges;    // (j, i) must be present
  std::vector<std::pair<int, int>> forbidden_edges;   // (j, i) must be absent
  std::optional<int> reach_all_from;                  // node with paths to all others
  bool strongly_connected = false;
  bool edge_minimal = false;    // removing any single edge destroys (r, s)-robustness
  bool not_complete = false;
};

/// Searches n-node digraphs (exhaustively, in canonical order) for one that
/// is (r, s)-robust but not (r+1)-robust and satisfies the constraints.
/// Returns the first hit; absent when none exists or n > 8 or r, s are not
/// both below n. Found graphs carry uniform weights 1/n.
std::optional<Digraph> find_rs_robust_example(int n, int r, int s,
                                              const GraphSearchConstraints& constraints = {});

/// The shipped five-node example graph: strongly connected, (2,2)-robust,
/// not 3-robust, and removing any single edge destroys (2,2)-robustness.
/// Frozen from the constrained search plus scenario screening; tests
/// re-verify every claim with the checker and the engines.
Digraph example_graph_5();

// Edge-list text format: first line `n`, then one `j i weight` line per
// edge, 1-indexed.
Digraph parse_edge_list(std::istream& in);
Digraph load_edge_list(const std::string& path);
void write_edge_list(const Digraph& g, std::ostream& out);
std::string to_dot(const Digraph& g);

}  // namespace resim
