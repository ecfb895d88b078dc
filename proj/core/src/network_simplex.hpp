#pragma once

// Primal network simplex for the transportation problem on a complete
// bipartite graph (uncapacitated arcs, balanced supplies).
//
// The tree bookkeeping (thread / reverse-thread / successor counts) and the
// block-search pivot follow the classic LEMON design. Anti-cycling comes from
// keeping the spanning tree strongly feasible: the artificial root start is
// strongly feasible and the leaving-arc rule (first blocking arc on the
// source side, last on the target side) preserves that property.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace measure_pca::detail {

template <typename Flow>
class BipartiteNetworkSimplex {
 public:
  /// `cost` is row-major, n_src x n_dst. Supplies and demands must be
  /// positive with equal totals.
  BipartiteNetworkSimplex(std::span<const Flow> supply, std::span<const Flow> demand,
                          std::span<const double> cost, double tolerance)
      : n_src_(static_cast<int>(supply.size())),
        n_dst_(static_cast<int>(demand.size())),
        node_num_(n_src_ + n_dst_),
        arc_num_(n_src_ * n_dst_),
        tolerance_(tolerance) {
    const int all_nodes = node_num_ + 1;
    const int all_arcs = arc_num_ + node_num_;
    root_ = node_num_;

    source_.resize(all_arcs);
    target_.resize(all_arcs);
    cost_.resize(all_arcs);
    flow_.assign(all_arcs, Flow{0});
    state_.assign(all_arcs, kStateLower);

    double max_cost = 0.0;
    for (int i = 0, e = 0; i < n_src_; ++i) {
      for (int j = 0; j < n_dst_; ++j, ++e) {
        source_[e] = i;
        target_[e] = n_src_ + j;
        cost_[e] = cost[static_cast<std::size_t>(e)];
        max_cost = std::max(max_cost, std::abs(cost_[e]));
      }
    }
    const double art_cost = (max_cost + 1.0) * static_cast<double>(node_num_);

    parent_.resize(all_nodes);
    pred_.resize(all_nodes);
    pred_dir_.resize(all_nodes);
    thread_.resize(all_nodes);
    rev_thread_.resize(all_nodes);
    succ_num_.resize(all_nodes);
    last_succ_.resize(all_nodes);
    pi_.resize(all_nodes);

    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = all_nodes;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;

    for (int u = 0, e = arc_num_; u < node_num_; ++u, ++e) {
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kStateTree;
      if (u < n_src_) {
        pred_dir_[u] = kDirUp;
        pi_[u] = 0.0;
        source_[e] = u;
        target_[e] = root_;
        flow_[e] = supply[static_cast<std::size_t>(u)];
        cost_[e] = 0.0;
      } else {
        pred_dir_[u] = kDirDown;
        pi_[u] = art_cost;
        source_[e] = root_;
        target_[e] = u;
        flow_[e] = demand[static_cast<std::size_t>(u - n_src_)];
        cost_[e] = art_cost;
      }
    }

    block_size_ = std::max(10, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(arc_num_)))));
    next_arc_ = 0;
  }

  /// Runs pivots until no arc has reduced cost below -tolerance. Returns the
  /// largest flow left on an artificial arc (zero for balanced input).
  Flow run() {
    while (find_entering_arc()) {
      find_join_node();
      find_leaving_arc();
      change_flow();
      update_tree_structure();
      update_potential();
      ++pivots_;
    }
    Flow residual{0};
    for (int e = arc_num_; e < arc_num_ + node_num_; ++e) residual = std::max(residual, flow_[e]);
    return residual;
  }

  long long pivots() const noexcept { return pivots_; }

  int arc_count() const noexcept { return arc_num_; }
  int source_node(int e) const noexcept { return source_[e]; }
  int target_node(int e) const noexcept { return target_[e] - n_src_; }
  Flow flow(int e) const noexcept { return flow_[e]; }
  double potential(int node) const noexcept { return pi_[node]; }
  double reduced_cost(int e) const noexcept { return cost_[e] + pi_[source_[e]] - pi_[target_[e]]; }

 private:
  static constexpr signed char kStateTree = 0;
  static constexpr signed char kStateLower = 1;
  static constexpr signed char kDirUp = 1;
  static constexpr signed char kDirDown = -1;

  bool find_entering_arc() {
    double min = 0.0;
    int cnt = block_size_;
    int e = next_arc_;
    for (; e != arc_num_; ++e) {
      const double c = state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
      if (c < min) {
        min = c;
        in_arc_ = e;
      }
      if (--cnt == 0) {
        if (min < -tolerance_) {
          next_arc_ = e + 1;
          return true;
        }
        cnt = block_size_;
      }
    }
    for (e = 0; e != next_arc_; ++e) {
      const double c = state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
      if (c < min) {
        min = c;
        in_arc_ = e;
      }
      if (--cnt == 0) {
        if (min < -tolerance_) {
          next_arc_ = e + 1;
          return true;
        }
        cnt = block_size_;
      }
    }
    if (min < -tolerance_) {
      next_arc_ = e;
      return true;
    }
    return false;
  }

  void find_join_node() {
    int u = source_[in_arc_];
    int v = target_[in_arc_];
    while (u != v) {
      if (succ_num_[u] < succ_num_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    join_ = u;
  }

  // Entering arcs are always at their lower bound (no finite capacities).
  void find_leaving_arc() {
    const int first = source_[in_arc_];
    const int second = target_[in_arc_];
    delta_ = std::numeric_limits<Flow>::max();
    int result = 0;

    for (int u = first; u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kDirDown) continue;
      const Flow d = flow_[pred_[u]];
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (int u = second; u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kDirUp) continue;
      const Flow d = flow_[pred_[u]];
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
  }

  void change_flow() {
    if (delta_ > Flow{0}) {
      const Flow val = delta_;
      flow_[in_arc_] += val;
      for (int u = source_[in_arc_]; u != join_; u = parent_[u]) {
        flow_[pred_[u]] -= pred_dir_[u] * val;
      }
      for (int u = target_[in_arc_]; u != join_; u = parent_[u]) {
        flow_[pred_[u]] += pred_dir_[u] * val;
      }
    }
    state_[in_arc_] = kStateTree;
    state_[pred_[u_out_]] = kStateLower;
  }

  void update_tree_structure() {
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;

      if (thread_[v_in_] != u_out_) {
        int after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      // When old_rev_thread == v_in, join and v_out coincide.
      const int thread_continue =
          old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

      // Re-hang the stem (nodes from u_in up to u_out) below v_in.
      int stem = u_in_;
      int par_stem = v_in_;
      int last = last_succ_[u_in_];
      int after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        const int next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_revs_.push_back(last);

        const int before = rev_thread_[stem];
        thread_[before] = after;
        rev_thread_[after] = before;

        parent_[stem] = par_stem;
        par_stem = stem;
        stem = next_stem;

        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
        after = thread_[last];
      }
      parent_[u_out_] = par_stem;
      thread_[last] = thread_continue;
      rev_thread_[thread_continue] = last;
      last_succ_[u_out_] = last;

      if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }

      for (const int u : dirty_revs_) rev_thread_[thread_[u]] = u;

      int tmp_sc = 0;
      const int tmp_ls = last_succ_[u_out_];
      for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        pred_dir_[u] = static_cast<signed char>(-pred_dir_[p]);
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
      succ_num_[u_in_] = old_succ_num;
    }

    const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const int last_succ_out = last_succ_[u_out_];
    for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) {
      last_succ_[u] = last_succ_out;
    }

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = old_rev_thread;
      }
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = last_succ_out;
      }
    }

    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  int n_src_;
  int n_dst_;
  int node_num_;
  int arc_num_;
  double tolerance_;
  int root_ = 0;

  std::vector<int> source_;
  std::vector<int> target_;
  std::vector<double> cost_;
  std::vector<Flow> flow_;
  std::vector<signed char> state_;

  std::vector<int> parent_;
  std::vector<int> pred_;
  std::vector<signed char> pred_dir_;
  std::vector<int> thread_;
  std::vector<int> rev_thread_;
  std::vector<int> succ_num_;
  std::vector<int> last_succ_;
  std::vector<double> pi_;
  std::vector<int> dirty_revs_;

  int block_size_ = 10;
  int next_arc_ = 0;
  int in_arc_ = 0;
  int join_ = 0;
  int u_in_ = 0;
  int v_in_ = 0;
  int u_out_ = 0;
  int v_out_ = 0;
  Flow delta_{};
  long long pivots_ = 0;
};

}  // namespace measure_pca::detail
