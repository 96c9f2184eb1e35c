#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "otaform/error.hpp"
#include "otaform/topology_channel.hpp"

namespace otaform {

/// Desired offsets d_i of each agent from the (emergent) formation centroid.
struct FormationSpec {
  std::vector<Vec2> displacements;

  std::size_t size() const { return displacements.size(); }

  /// d_i = radius (cos(2 pi i / n), sin(2 pi i / n)), i = 0..n-1.
  static FormationSpec regular_polygon(std::size_t n, double radius) {
    FormationSpec spec;
    spec.displacements.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      spec.displacements.emplace_back(radius * std::cos(angle), radius * std::sin(angle));
    }
    return spec;
  }
};

/// References held constant over the flow interval that starts at `valid_from`.
struct ReferenceState {
  std::vector<Vec2> refs;
  std::size_t valid_from = 0;
};

/// Communication-instant update. Every agent broadcasts p_i - d_i over the
/// shared channel; each receiver adds its own d_i back to the normalized
/// aggregate. Positions are untouched.
inline ReferenceState jump_update(std::span<const Vec2> positions, const FormationSpec& spec,
                                  const ChannelRealization& real) {
  const std::size_t n = positions.size();
  if (spec.size() != n || real.size() != n) {
    throw ValidationError("jump_update: positions, formation and channel disagree on agent count");
  }
  std::vector<Vec2> payload(n);
  for (std::size_t i = 0; i < n; ++i) payload[i] = positions[i] - spec.displacements[i];

  ReferenceState out;
  out.valid_from = real.instant();
  out.refs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.refs.push_back(spec.displacements[i] + normalized_aggregate(real, i, payload));
  }
  return out;
}

/// Stacked displacement-shifted vector [p_1 - d_1; ...; p_n - d_n].
inline Eigen::VectorXd shifted_state(std::span<const Vec2> positions, const FormationSpec& spec) {
  if (spec.size() != positions.size()) throw ValidationError("shifted_state: size mismatch");
  Eigen::VectorXd out(2 * static_cast<Eigen::Index>(positions.size()));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out.segment<2>(2 * static_cast<Eigen::Index>(i)) = positions[i] - spec.displacements[i];
  }
  return out;
}

/// (A kron I_2) x for a stacked planar vector.
inline Eigen::VectorXd apply_kron_i2(const Eigen::MatrixXd& a, const Eigen::VectorXd& stacked) {
  const Eigen::Index n = a.rows();
  if (stacked.size() != 2 * n) throw ValidationError("apply_kron_i2: size mismatch");
  const auto points = Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic>>(stacked.data(), 2, n);
  Eigen::VectorXd out(2 * n);
  Eigen::Map<Eigen::Matrix<double, 2, Eigen::Dynamic>>(out.data(), 2, n) = points * a.transpose();
  return out;
}

}  // namespace otaform
