#pragma once

// Eigen-decomposition of real Jacobians with a canonical ordering and phase,
// plus the eigencycle prediction built from the oscillatory eigenvector.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "gdc/error.hpp"
#include "gdc/game.hpp"

namespace gdc {

/// Eigenpairs of a real matrix. Column k of `vectors` belongs to `values(k)`.
///
/// Order: descending |Re|, conjugate pairs adjacent with the positive
/// imaginary member first. Every vector has unit norm. A real eigenvector
/// has its largest-modulus component positive; a complex eigenvector has
/// its first nonzero component on the positive real axis.
struct EigenSystem {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;

  int n() const { return static_cast<int>(values.size()); }
};

struct OscillatoryMode {
  std::complex<double> eigenvalue;  // Im > 0
  Eigen::VectorXcd eta;
  int pair_count = 0;  // number of conjugate pairs in the spectrum
};

/// One value per two-strategy subspace (m, n), m < n, lexicographic.
struct EigencycleSet {
  std::vector<std::pair<int, int>> pairs;  // zero-based
  Eigen::VectorXd values;
  bool normalized = false;
};

/// "x1x2" style label for a zero-based pair.
inline std::string pair_label(const std::pair<int, int>& p) {
  return "x" + std::to_string(p.first + 1) + "x" + std::to_string(p.second + 1);
}

inline std::vector<std::pair<int, int>> subspace_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (int m = 0; m < n; ++m) {
    for (int k = m + 1; k < n; ++k) out.emplace_back(m, k);
  }
  return out;
}

namespace internal {

inline double imag_tolerance(const Eigen::VectorXcd& values) {
  double scale = 1.0;
  for (const auto& v : values) scale = std::max(scale, std::abs(v));
  return 1e-10 * scale;
}

inline Eigen::VectorXcd canonical_phase(Eigen::VectorXcd v, bool real_mode) {
  const double norm = v.norm();
  if (norm == 0.0) return v;
  v /= norm;
  if (real_mode) {
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    const std::complex<double> lead = v(arg);
    // Rotate onto the real axis, then fix the sign.
    v *= std::abs(lead) / lead;
    for (auto& c : v) c = {c.real(), 0.0};
    v /= v.norm();
  } else {
    const double cutoff = 1e-12;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > cutoff) {
        v *= std::abs(v(i)) / v(i);
        v(i) = {std::abs(v(i)), 0.0};
        break;
      }
    }
  }
  return v;
}

}  // namespace internal

inline EigenSystem eigen_decompose(const Eigen::MatrixXd& jac) {
  if (jac.rows() != jac.cols()) {
    throw ValidationError("eigen_decompose needs a square matrix");
  }
  if (jac.rows() < 1 || jac.rows() > kMaxStrategies) {
    throw ValidationError("eigen_decompose supports 1 <= n <= 16");
  }
  if (!jac.allFinite()) {
    throw ValidationError("matrix has non-finite entries");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration did not converge");
  }
  const Eigen::VectorXcd raw_values = solver.eigenvalues();
  const Eigen::MatrixXcd raw_vectors = solver.eigenvectors();
  if (!raw_values.allFinite() || !raw_vectors.allFinite()) {
    throw NumericalError("eigen decomposition produced non-finite values");
  }

  const int n = static_cast<int>(jac.rows());
  const double tol = internal::imag_tolerance(raw_values);

  // Group conjugate pairs into units so the sort keeps them adjacent.
  struct Unit {
    int first;
    int second;  // -1 for a real eigenvalue
  };
  std::vector<Unit> units;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (std::abs(raw_values(i).imag()) <= tol) {
      units.push_back({i, -1});
      continue;
    }
    int partner = -1;
    double best = 0.0;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(raw_values(j) - std::conj(raw_values(i)));
      if (partner < 0 || d < best) {
        partner = j;
        best = d;
      }
    }
    if (partner < 0 || best > 1e-6 * std::max(1.0, std::abs(raw_values(i)))) {
      throw NumericalError("complex eigenvalue without a conjugate partner");
    }
    used[partner] = true;
    if (raw_values(i).imag() > 0) {
      units.push_back({i, partner});
    } else {
      units.push_back({partner, i});
    }
  }
  std::stable_sort(units.begin(), units.end(), [&](const Unit& a, const Unit& b) {
    const auto va = raw_values(a.first);
    const auto vb = raw_values(b.first);
    if (std::abs(va.real()) != std::abs(vb.real())) {
      return std::abs(va.real()) > std::abs(vb.real());
    }
    if (va.real() != vb.real()) return va.real() > vb.real();
    return std::abs(va.imag()) > std::abs(vb.imag());
  });

  EigenSystem es;
  es.values.resize(n);
  es.vectors.resize(n, n);
  int k = 0;
  for (const Unit& u : units) {
    if (u.second < 0) {
      es.values(k) = {raw_values(u.first).real(), 0.0};
      es.vectors.col(k) = internal::canonical_phase(raw_vectors.col(u.first), true);
      ++k;
    } else {
      const Eigen::VectorXcd v =
          internal::canonical_phase(raw_vectors.col(u.first), false);
      es.values(k) = raw_values(u.first);
      es.vectors.col(k) = v;
      es.values(k + 1) = std::conj(raw_values(u.first));
      es.vectors.col(k + 1) = v.conjugate();
      k += 2;
    }
  }

  const double scale = jac.norm();
  const Eigen::MatrixXcd jc = jac.cast<std::complex<double>>();
  for (int i = 0; i < n; ++i) {
    const double residual =
        (jc * es.vectors.col(i) - es.values(i) * es.vectors.col(i)).norm();
    if (residual > 1e-8 * scale) {
      throw NumericalError("eigenpair residual " + std::to_string(residual) +
                           " exceeds tolerance");
    }
  }
  return es;
}

/// The member with positive imaginary part of the conjugate pair with the
/// largest imaginary part. Ties go to the smaller real part.
inline OscillatoryMode select_oscillatory_pair(const EigenSystem& es) {
  const double tol = internal::imag_tolerance(es.values);
  OscillatoryMode mode;
  int best = -1;
  for (int i = 0; i < es.n(); ++i) {
    const auto v = es.values(i);
    if (v.imag() <= tol) continue;
    ++mode.pair_count;
    if (best < 0) {
      best = i;
      continue;
    }
    const auto cur = es.values(best);
    const double tie = 1e-12 * std::max(1.0, std::abs(cur.imag()));
    if (v.imag() > cur.imag() + tie ||
        (std::abs(v.imag() - cur.imag()) <= tie && v.real() < cur.real())) {
      best = i;
    }
  }
  if (best < 0) throw ValidationError("no oscillatory mode");
  mode.eigenvalue = es.values(best);
  mode.eta = es.vectors.col(best);
  return mode;
}

/// Signed area of the (m, k) projection of the eigenmode's orbit:
///   pi |eta_m| |eta_k| sin(arg eta_m - arg eta_k).
inline double eigencycle(const Eigen::VectorXcd& eta, int m, int k) {
  return std::numbers::pi * std::abs(eta(m)) * std::abs(eta(k)) *
         std::sin(std::arg(eta(m)) - std::arg(eta(k)));
}

/// Eigencycles of every two-strategy subspace. With `normalized`, the value
/// vector is scaled to unit Euclidean norm; an all-zero set (real eta)
/// cannot be normalized and is returned with `normalized == false`.
inline EigencycleSet eigencycles(const Eigen::VectorXcd& eta, bool normalized) {
  if (eta.size() < 2 || eta.norm() == 0.0 || !eta.allFinite()) {
    throw ValidationError("eigencycles need a nonzero vector of length >= 2");
  }
  EigencycleSet set;
  set.pairs = subspace_pairs(static_cast<int>(eta.size()));
  set.values.resize(static_cast<Eigen::Index>(set.pairs.size()));
  for (std::size_t p = 0; p < set.pairs.size(); ++p) {
    set.values(static_cast<Eigen::Index>(p)) =
        eigencycle(eta, set.pairs[p].first, set.pairs[p].second);
  }
  if (normalized) {
    // Rounding noise from a real vector is not a cycle.
    const double norm = set.values.norm();
    if (norm > 1e-12 * eta.squaredNorm()) {
      set.values /= norm;
      set.normalized = true;
    } else {
      set.values.setZero();
    }
  }
  return set;
}

}  // namespace gdc
