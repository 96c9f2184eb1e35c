#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "otaform/error.hpp"
#include "otaform/rng.hpp"
#include "otaform/stochastic_matrix.hpp"

namespace otaform {

using Vec2 = Eigen::Vector2d;

/// Directed graph on nodes 0..n-1. An arc (from, to) means `from` transmits to
/// `to`, so the in-neighborhood of i is { j : (j, i) is an arc }.
/// Every node carries a self-loop.
class DirectedGraph {
 public:
  explicit DirectedGraph(std::size_t n) : n_(n), adj_(n * n, 0) {
    if (n == 0) throw ValidationError("graph needs at least one node");
    for (std::size_t i = 0; i < n; ++i) adj_[i * n + i] = 1;
  }

  std::size_t size() const { return n_; }

  void add_arc(std::size_t from, std::size_t to) {
    check(from);
    check(to);
    adj_[from * n_ + to] = 1;
  }

  bool has_arc(std::size_t from, std::size_t to) const { return adj_[from * n_ + to] != 0; }

  std::vector<std::size_t> in_neighbors(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n_; ++j) {
      if (has_arc(j, i)) out.push_back(j);
    }
    return out;
  }

  /// Arcs excluding self-loops.
  std::size_t link_count() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) count += (i != j && has_arc(i, j)) ? 1 : 0;
    }
    return count;
  }

  bool strongly_connected() const { return reaches_all(false) && reaches_all(true); }

 private:
  void check(std::size_t i) const {
    if (i >= n_) throw ValidationError("node " + std::to_string(i) + " out of range");
  }

  bool reaches_all(bool reversed) const {
    std::vector<char> seen(n_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n_; ++v) {
        const bool arc = reversed ? has_arc(v, u) : has_arc(u, v);
        if (arc && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  }

  std::size_t n_;
  std::vector<char> adj_;
};

/// Graph plus the unknown channel gains at one communication instant.
/// xi(i, j) is the gain seen by receiver i for transmitter j; it lies in
/// (0, 1] on arcs (j, i) and is zero elsewhere.
class ChannelRealization {
 public:
  ChannelRealization(DirectedGraph graph, Eigen::MatrixXd xi, std::size_t instant)
      : graph_(std::move(graph)), xi_(std::move(xi)), instant_(instant) {
    const auto n = static_cast<Eigen::Index>(graph_.size());
    if (xi_.rows() != n || xi_.cols() != n) throw ValidationError("coefficient matrix has wrong shape");
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double c = xi_(i, j);
        const bool arc = graph_.has_arc(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
        if (arc && !(c > 0.0 && c <= 1.0)) {
          throw ValidationError("channel coefficient xi(" + std::to_string(i) + "," +
                                std::to_string(j) + ") = " + std::to_string(c) +
                                " outside (0, 1]");
        }
        if (!arc && c != 0.0) {
          throw ValidationError("channel coefficient set on a missing arc (" + std::to_string(j) +
                                " -> " + std::to_string(i) + ")");
        }
      }
    }
  }

  const DirectedGraph& graph() const { return graph_; }
  std::size_t size() const { return graph_.size(); }
  std::size_t instant() const { return instant_; }
  double xi(std::size_t receiver, std::size_t transmitter) const {
    return xi_(static_cast<Eigen::Index>(receiver), static_cast<Eigen::Index>(transmitter));
  }
  const Eigen::MatrixXd& coefficients() const { return xi_; }

 private:
  DirectedGraph graph_;
  Eigen::MatrixXd xi_;
  std::size_t instant_;
};

/// What receiver `receiver` hears when every agent j simultaneously broadcasts
/// payload[j] on a single channel: sum over in-neighbors of xi_ij * payload_j.
inline double superpose(const ChannelRealization& real, std::size_t receiver,
                        std::span<const double> payload) {
  if (payload.size() != real.size()) {
    throw ValidationError("superpose: payload has " + std::to_string(payload.size()) +
                          " entries for " + std::to_string(real.size()) + " agents");
  }
  double y = 0.0;
  for (std::size_t j = 0; j < real.size(); ++j) {
    if (real.graph().has_arc(j, receiver)) y += real.xi(receiver, j) * payload[j];
  }
  return y;
}

/// Receiver-side normalized aggregate of planar payloads. Each coordinate goes
/// out on its own orthogonal channel, plus one channel carrying the constant 1;
/// the gains are the same on all three. Dividing by the normalization channel
/// cancels the unknown gains' scale and yields a convex combination.
inline Vec2 normalized_aggregate(const ChannelRealization& real, std::size_t receiver,
                                 std::span<const Vec2> payload) {
  const std::size_t n = real.size();
  if (payload.size() != n) throw ValidationError("normalized_aggregate: payload size mismatch");
  std::vector<double> xs(n), ys(n), ones(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    xs[j] = payload[j].x();
    ys[j] = payload[j].y();
  }
  const double nu_x = superpose(real, receiver, xs);
  const double nu_y = superpose(real, receiver, ys);
  const double nu_norm = superpose(real, receiver, ones);  // > 0 thanks to the self-loop
  return {nu_x / nu_norm, nu_y / nu_norm};
}

/// H_k with [H_k]_ij = xi_ij / sum_j xi_ij over in-neighbors.
inline RowStochasticMatrix effective_matrix(const ChannelRealization& real) {
  Eigen::MatrixXd h = real.coefficients();
  for (Eigen::Index i = 0; i < h.rows(); ++i) h.row(i) /= h.row(i).sum();
  return RowStochasticMatrix(std::move(h));
}

struct TopologyParams {
  double edge_probability = 0.2;  // extra arcs beyond the backbone
  double xi_min = 0.1;            // gains ~ U[xi_min, 1]
  bool cycle_backbone = true;     // random Hamiltonian cycle guarantees strong connectivity
  std::size_t max_attempts = 10000;  // rejection budget when cycle_backbone is off

  void validate() const {
    if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) {
      throw ConfigError("topology.edge_probability", "must lie in [0, 1]");
    }
    if (!(xi_min > 0.0 && xi_min <= 1.0)) throw ConfigError("topology.xi_min", "must lie in (0, 1]");
    if (!cycle_backbone && edge_probability == 0.0) {
      throw ConfigError("topology.edge_probability",
                        "0 with cycle_backbone disabled can never be strongly connected");
    }
  }
};

/// Seeded sequence of strongly connected realizations. Graph structure and
/// channel gains draw from separate sub-streams of `seed`.
inline std::vector<ChannelRealization> generate_topology_sequence(std::size_t n, std::size_t instants,
                                                                  const TopologyParams& params,
                                                                  std::uint64_t seed) {
  if (n < 2) throw ConfigError("n", "topology generation needs at least 2 agents");
  if (instants < 1) throw ConfigError("instants", "need at least one communication instant");
  params.validate();

  Rng graph_rng(derive_seed(seed, "topology"));
  Rng gain_rng(derive_seed(seed, "channel"));

  std::vector<ChannelRealization> out;
  out.reserve(instants);
  for (std::size_t k = 0; k < instants; ++k) {
    DirectedGraph g(n);
    std::size_t attempts = 0;
    for (;;) {
      g = DirectedGraph(n);
      if (params.cycle_backbone) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[graph_rng.index(i + 1)]);
        for (std::size_t i = 0; i < n; ++i) g.add_arc(perm[i], perm[(i + 1) % n]);
      }
      for (std::size_t from = 0; from < n; ++from) {
        for (std::size_t to = 0; to < n; ++to) {
          if (from == to || g.has_arc(from, to)) continue;
          if (graph_rng.bernoulli(params.edge_probability)) g.add_arc(from, to);
        }
      }
      if (g.strongly_connected()) break;
      if (++attempts >= params.max_attempts) {
        throw ConfigError("topology.edge_probability",
                          "no strongly connected graph after " + std::to_string(attempts) +
                              " draws; raise the probability or enable cycle_backbone");
      }
    }
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (g.has_arc(j, i)) {
          xi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              gain_rng.uniform_closed(params.xi_min, 1.0);
        }
      }
    }
    out.emplace_back(std::move(g), std::move(xi), k);
  }
  return out;
}

/// Orthogonal-channel bookkeeping. The over-the-air scheme spends
/// payload_dim + 1 channels per instant regardless of topology; a
/// node-to-node scheme spends two per directed link (self-loops are free).
struct TransmissionLedger {
  std::uint64_t ota_count = 0;
  std::uint64_t n2n_count = 0;
  std::uint64_t instants = 0;
};

inline TransmissionLedger record_instant(TransmissionLedger ledger, const ChannelRealization& real,
                                         std::size_t payload_dim) {
  if (payload_dim < 1) throw ValidationError("payload dimension must be at least 1");
  ledger.ota_count += payload_dim + 1;
  ledger.n2n_count += 2 * real.graph().link_count();
  ledger.instants += 1;
  return ledger;
}

}  // namespace otaform
