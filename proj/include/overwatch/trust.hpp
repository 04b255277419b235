#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "overwatch/terrain.hpp"

namespace overwatch::trust {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

struct TrustBelief {
  double mean = 0.0;
  double var = 0.0;
  bool operator==(const TrustBelief&) const = default;
};

/// Weights are ordered [self, traversability, line of sight].
struct TrustParams {
  Vec3 beta_mean{};
  Mat3 beta_cov{};
  double residual_var = 0.0;
  TrustBelief tau0{0.5, 0.01};

  /// Throws ValidationError unless beta_cov is symmetric PSD (to 1e-12),
  /// residual_var >= 0, and all entries are finite.
  void validate() const;
};

bool is_psd(const Mat3& m, double tol = 1e-12);

/// Symmetrizes and clips negative eigenvalues to zero.
Mat3 nearest_psd(const Mat3& m);

/// Closed-form moments of beta . z + gamma with independent Gaussian beta
/// and z = [prev, g, los]:
///   mean = mu . zbar
///   var  = mu' Sz mu + zbar' Sb zbar + tr(Sb Sz) + xi^2
TrustBelief propagate_trust(const TrustBelief& prev, const terrain::CellStats& cell, const TrustParams& p);

/// Monte-Carlo estimate of the same moments from n samples (n >= 1000).
TrustBelief mc_trust(const TrustBelief& prev, const terrain::CellStats& cell, const TrustParams& p, std::size_t n,
                     std::uint64_t seed);

/// Beliefs after each cell of the path, starting from p.tau0.
std::vector<TrustBelief> path_trust(std::span<const terrain::Cell> cells, const terrain::CellGrid& grid,
                                    const TrustParams& p);

/// Columns: step,mean,var (steps numbered from 1).
std::string timeline_csv(std::span<const TrustBelief> beliefs);

}  // namespace overwatch::trust
