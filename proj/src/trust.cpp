#include "overwatch/trust.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <random>

#include "overwatch/error.hpp"

namespace overwatch::trust {

namespace {

Eigen::Matrix3d to_eigen(const Mat3& m) {
  Eigen::Matrix3d e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return e;
}

Mat3 from_eigen(const Eigen::Matrix3d& e) {
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = e(i, j);
  return m;
}

Eigen::Vector3d to_eigen(const Vec3& v) { return {v[0], v[1], v[2]}; }

struct Moments {
  Eigen::Vector3d zbar;
  Eigen::Vector3d zvar;
};

Moments inputs(const TrustBelief& prev, const terrain::CellStats& cell) {
  return {{prev.mean, cell.g_mean, cell.los_mean}, {prev.var, cell.g_var, cell.los_var}};
}

}  // namespace

bool is_psd(const Mat3& m, double tol) {
  Eigen::Matrix3d e = to_eigen(m);
  if (!e.allFinite()) return false;
  if ((e - e.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::LLT<Eigen::Matrix3d> llt(e + tol * Eigen::Matrix3d::Identity());
  return llt.info() == Eigen::Success;
}

Mat3 nearest_psd(const Mat3& m) {
  Eigen::Matrix3d e = to_eigen(m);
  Eigen::Matrix3d sym = 0.5 * (e + e.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(sym);
  Eigen::Vector3d lambda = es.eigenvalues().cwiseMax(0.0);
  Eigen::Matrix3d out = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
  return from_eigen(0.5 * (out + out.transpose()));
}

void TrustParams::validate() const {
  for (double b : beta_mean)
    if (!std::isfinite(b)) throw ValidationError("trust beta_mean must be finite");
  if (!is_psd(beta_cov)) throw ValidationError("trust beta_cov must be symmetric positive semidefinite");
  if (!std::isfinite(residual_var) || residual_var < 0.0) throw ValidationError("trust residual_var must be >= 0");
  if (!std::isfinite(tau0.mean) || !std::isfinite(tau0.var) || tau0.var < 0.0)
    throw ValidationError("trust tau0 must be finite with nonnegative variance");
}

TrustBelief propagate_trust(const TrustBelief& prev, const terrain::CellStats& cell, const TrustParams& p) {
  if (!is_psd(p.beta_cov)) throw ValidationError("trust beta_cov must be symmetric positive semidefinite");
  const Eigen::Vector3d mu = to_eigen(p.beta_mean);
  const Eigen::Matrix3d sb = to_eigen(p.beta_cov);
  const auto [zbar, zvar] = inputs(prev, cell);
  const Eigen::Matrix3d sz = zvar.asDiagonal();
  TrustBelief out;
  out.mean = mu.dot(zbar);
  out.var = mu.dot(sz * mu) + zbar.dot(sb * zbar) + (sb * sz).trace() + p.residual_var;
  out.var = std::max(out.var, 0.0);
  return out;
}

TrustBelief mc_trust(const TrustBelief& prev, const terrain::CellStats& cell, const TrustParams& p, std::size_t n,
                     std::uint64_t seed) {
  if (n < 1000) throw ValidationError("mc_trust needs at least 1000 samples");
  const Eigen::Vector3d mu = to_eigen(p.beta_mean);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(to_eigen(nearest_psd(p.beta_cov)));
  const Eigen::Matrix3d root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const auto [zbar, zvar] = inputs(prev, cell);
  const Eigen::Vector3d zsd = zvar.cwiseMax(0.0).cwiseSqrt();
  const double xi = std::sqrt(std::max(p.residual_var, 0.0));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Welford accumulation
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3d e(normal(rng), normal(rng), normal(rng));
    Eigen::Vector3d beta = mu + root * e;
    Eigen::Vector3d z(zbar[0] + zsd[0] * normal(rng), zbar[1] + zsd[1] * normal(rng), zbar[2] + zsd[2] * normal(rng));
    double gamma = xi * normal(rng);
    double tau = beta.dot(z) + gamma;
    double delta = tau - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (tau - mean);
  }
  return {mean, m2 / static_cast<double>(n - 1)};
}

std::vector<TrustBelief> path_trust(std::span<const terrain::Cell> cells, const terrain::CellGrid& grid,
                                    const TrustParams& p) {
  std::vector<TrustBelief> out;
  out.reserve(cells.size());
  TrustBelief belief = p.tau0;
  for (const auto& c : cells) {
    if (!grid.in_bounds(c)) throw ValidationError("path cell out of bounds");
    if (grid.at(c).nogo)
      throw ValidationError("path enters no-go cell (" + std::to_string(c.row) + "," + std::to_string(c.col) + ")");
    belief = propagate_trust(belief, grid.at(c), p);
    out.push_back(belief);
  }
  return out;
}

std::string timeline_csv(std::span<const TrustBelief> beliefs) {
  std::string out = "step,mean,var\n";
  char buf[128];
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", i + 1, beliefs[i].mean, beliefs[i].var);
    out += buf;
  }
  return out;
}

}  // namespace overwatch::trust
