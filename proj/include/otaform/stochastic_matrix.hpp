#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "otaform/error.hpp"

namespace otaform {

inline constexpr double kRowSumTolerance = 1e-12;

/// Nonnegative square matrix whose rows sum to one.
///
/// Construction validates the input. Rows whose sums are within
/// kRowSumTolerance of one are renormalized (unless already exact to rounding
/// level); anything further off is rejected.
/// Instances are immutable.
class RowStochasticMatrix {
 public:
  explicit RowStochasticMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
      throw ValidationError("row-stochastic matrix must be square and non-empty, got " +
                            std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
    }
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < m_.cols(); ++j) {
        const double a = m_(i, j);
        if (!std::isfinite(a) || a < 0.0) {
          throw ValidationError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                ") = " + std::to_string(a) + " is negative or non-finite");
        }
        sum += a;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw ValidationError("row " + std::to_string(i) + " sums to " + std::to_string(sum) +
                              ", not 1");
      }
      // Rows already normalized to rounding level are left alone so that
      // construction is idempotent.
      if (std::abs(sum - 1.0) > 16.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(m_.cols())) {
        m_.row(i) /= sum;
      }
    }
  }

  static RowStochasticMatrix identity(std::size_t n) {
    return RowStochasticMatrix(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                         static_cast<Eigen::Index>(n)));
  }

  /// (1/n) 1 1^T
  static RowStochasticMatrix uniform(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    return RowStochasticMatrix(Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& matrix() const { return m_; }

  /// this * rhs. The product of stochastic matrices is stochastic.
  RowStochasticMatrix operator*(const RowStochasticMatrix& rhs) const {
    if (rhs.size() != size()) throw ValidationError("dimension mismatch in product");
    return RowStochasticMatrix(Eigen::MatrixXd(m_ * rhs.m_));
  }

 private:
  Eigen::MatrixXd m_;
};

/// Coefficient of ergodicity: half the largest L1 distance between two rows.
inline double tau1(const RowStochasticMatrix& a) {
  const auto& m = a.matrix();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.rows(); ++j) {
      worst = std::max(worst, (m.row(i) - m.row(j)).cwiseAbs().sum());
    }
  }
  return std::min(1.0, 0.5 * worst);
}

/// Same coefficient through the row-overlap identity
/// tau1(A) = 1 - min_{i,j} sum_s min(A_is, A_js).
inline double tau1_overlap(const RowStochasticMatrix& a) {
  const auto& m = a.matrix();
  double min_overlap = 1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.rows(); ++j) {
      min_overlap = std::min(min_overlap, m.row(i).cwiseMin(m.row(j)).sum());
    }
  }
  return std::clamp(1.0 - min_overlap, 0.0, 1.0);
}

// Raw-matrix entry points validate first and throw ValidationError.
inline double tau1(const Eigen::MatrixXd& a) { return tau1(RowStochasticMatrix(a)); }
inline double tau1_overlap(const Eigen::MatrixXd& a) { return tau1_overlap(RowStochasticMatrix(a)); }

/// Ordered product H_{k+L-1} ... H_{k+1} H_k: later matrices multiply on the
/// left. An empty window (L = 0) is the identity.
inline RowStochasticMatrix window_product(std::span<const RowStochasticMatrix> seq, std::size_t k,
                                          std::size_t length) {
  if (seq.empty()) throw ValidationError("window_product needs a non-empty sequence");
  if (k + length > seq.size()) {
    throw ValidationError("window [" + std::to_string(k) + ", " + std::to_string(k + length) +
                          ") exceeds sequence length " + std::to_string(seq.size()));
  }
  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(seq.front().matrix().rows(),
                                                      seq.front().matrix().cols());
  for (std::size_t j = k; j < k + length; ++j) {
    if (seq[j].size() != seq.front().size()) throw ValidationError("mixed matrix sizes in sequence");
    product = seq[j].matrix() * product;
  }
  return RowStochasticMatrix(std::move(product));
}

/// Per-agent, per-instant segment fractions sigma_{i,k} in (0, 1].
class SigmaSchedule {
 public:
  /// values[k][i] is the fraction of agent i at instant k.
  explicit SigmaSchedule(std::vector<std::vector<double>> values) : values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("sigma schedule is empty");
    sigma_min_ = 1.0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (values_[k].size() != values_.front().size()) {
        throw ValidationError("sigma schedule rows have different agent counts");
      }
      for (double s : values_[k]) {
        if (!(s > 0.0 && s <= 1.0)) {
          throw ValidationError("sigma " + std::to_string(s) + " at instant " + std::to_string(k) +
                                " outside (0, 1]");
        }
        sigma_min_ = std::min(sigma_min_, s);
      }
    }
  }

  std::size_t instants() const { return values_.size(); }
  std::size_t agents() const { return values_.front().size(); }
  double at(std::size_t k, std::size_t i) const { return values_.at(k).at(i); }
  std::span<const double> instant(std::size_t k) const { return values_.at(k); }
  double sigma_min() const { return sigma_min_; }

 private:
  std::vector<std::vector<double>> values_;
  double sigma_min_ = 1.0;
};

/// I - Sigma + Sigma H, each row a convex combination of the identity row and
/// the row of H.
inline RowStochasticMatrix sigma_modify(const RowStochasticMatrix& h, std::span<const double> sigmas) {
  if (sigmas.size() != h.size()) {
    throw ValidationError("sigma_modify: " + std::to_string(sigmas.size()) + " sigmas for " +
                          std::to_string(h.size()) + " agents");
  }
  Eigen::MatrixXd out = h.matrix();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double s = sigmas[static_cast<std::size_t>(i)];
    if (!(s > 0.0 && s <= 1.0)) {
      throw ValidationError("sigma_modify: sigma " + std::to_string(s) + " outside (0, 1]");
    }
    out.row(i) *= s;
    out(i, i) += 1.0 - s;
  }
  return RowStochasticMatrix(std::move(out));
}

/// Result of scanning every length-L window of a realized sequence.
/// certified() is false when some window fails to contract (margin <= 0);
/// that is a negative finding, not an error.
struct MixingCertificate {
  std::size_t window_length = 0;
  double contraction_margin = 0.0;  // mu = 1 - max_k tau1(window product)
  std::size_t worst_window = 0;     // start index attaining the max

  bool certified() const { return contraction_margin > 0.0; }
};

inline MixingCertificate certify_mixing(std::span<const RowStochasticMatrix> seq, std::size_t length) {
  if (length == 0) throw ValidationError("certify_mixing: window length must be positive");
  if (seq.size() < length) {
    throw ValidationError("certify_mixing: sequence of " + std::to_string(seq.size()) +
                          " matrices is shorter than window " + std::to_string(length));
  }
  MixingCertificate cert{length, 1.0, 0};
  double worst = -1.0;
  for (std::size_t k = 0; k + length <= seq.size(); ++k) {
    const double t = tau1(window_product(seq, k, length));
    if (t > worst) {
      worst = t;
      cert.worst_window = k;
    }
  }
  cert.contraction_margin = 1.0 - worst;
  return cert;
}

/// Default window n - 1 (at least 1).
inline std::size_t default_mixing_window(std::size_t n) { return n > 1 ? n - 1 : 1; }

inline MixingCertificate certify_mixing(std::span<const RowStochasticMatrix> seq) {
  if (seq.empty()) throw ValidationError("certify_mixing: empty sequence");
  return certify_mixing(seq, default_mixing_window(seq.front().size()));
}

}  // namespace otaform
