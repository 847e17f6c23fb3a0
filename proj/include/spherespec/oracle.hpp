#pragma once

// Brute-force Nystrom check on S^2: a Gauss-Legendre x uniform-azimuth grid,
// the symmetrized matrix sqrt(w_i w_j) K(x_i . x_j) / (4 pi), and a dense
// symmetric eigensolver. Everything here is binary64 and independent of the
// extended-precision quadrature in harmonics.hpp.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "spherespec/errors.hpp"
#include "spherespec/kernels.hpp"
#include "spherespec/spectra.hpp"

namespace spherespec {

struct SphereGrid {
  std::vector<std::array<double, 3>> points;  // index i * n_azimuthal + a
  std::vector<double> weights;                // sum to 4 pi
  unsigned n_polar = 0;
  unsigned n_azimuthal = 0;
  std::vector<double> polar_nodes;  // cos(theta), ascending
  std::vector<double> polar_weights;
};

namespace detail {

/// Classical Gauss-Legendre nodes and weights on [-1, 1], binary64.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(unsigned n) {
  std::vector<double> x(n), w(n);
  for (unsigned k = 0; k < n; ++k) {
    double t = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (unsigned j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[n - 1 - k] = t;
    w[n - 1 - k] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

}  // namespace detail

inline SphereGrid build_grid(unsigned n_polar, unsigned n_azimuthal) {
  if (n_polar < 2) throw DomainError("build_grid: n_polar must be >= 2");
  if (n_azimuthal < 4) throw DomainError("build_grid: n_azimuthal must be >= 4");
  SphereGrid g;
  g.n_polar = n_polar;
  g.n_azimuthal = n_azimuthal;
  std::tie(g.polar_nodes, g.polar_weights) = detail::gauss_legendre(n_polar);
  const double dphi = 2.0 * std::numbers::pi / n_azimuthal;
  g.points.reserve(std::size_t{n_polar} * n_azimuthal);
  for (unsigned i = 0; i < n_polar; ++i) {
    const double z = g.polar_nodes[i];
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (unsigned a = 0; a < n_azimuthal; ++a) {
      const double phi = dphi * a;
      g.points.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
      g.weights.push_back(g.polar_weights[i] * dphi);
    }
  }
  return g;
}

/// Dense symmetric matrix; set() writes both triangles so symmetry is exact.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t order) : n_(order), a_(order * order, 0.0) {}

  [[nodiscard]] std::size_t order() const { return n_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
  }
  [[nodiscard]] double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += a_[i * n_ + i];
    return t;
  }
  [[nodiscard]] double frobenius() const {
    double s = 0.0;
    for (const double v : a_) s += v * v;
    return std::sqrt(s);
  }
  [[nodiscard]] const std::vector<double>& data() const { return a_; }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

using ZonalFunction = std::function<double(double)>;

/// Binary64 evaluator of K(t) on S^2. Gaussian and multiquadric use their
/// closed pointwise forms; coefficient-only families sum their condensed
/// expansion to `levels` with the classical Legendre recurrence; pointwise
/// zonal functions are evaluated at 64 bits.
inline ZonalFunction zonal_evaluator(const KernelSpec& spec, unsigned long levels = 60) {
  validate(spec);
  if (const auto* g = std::get_if<Gaussian>(&spec)) {
    const double r = g->r.to_double();
    return [r](double t) { return std::exp(2.0 * t / r); };
  }
  if (const auto* mq = std::get_if<Multiquadric>(&spec)) {
    const double s = mq->sigma.to_double(), d = mq->delta.to_double();
    return [s, d](double t) { return s * s * (1.0 - d) / std::sqrt(1.0 + d * d - 2.0 * d * t); };
  }
  if (const auto* z = std::get_if<PointwiseZonal>(&spec)) {
    const auto f = z->f;
    return [f](double t) { return f(Real(t, Precision{64})).to_double(); };
  }
  if (const auto* dp = std::get_if<DotProduct>(&spec)) {
    std::vector<double> b;
    const unsigned long last = dp->degree ? *dp->degree : 399;
    for (unsigned long n = 0; n <= last; ++n) {
      b.push_back(dp->b(n, Precision{64}).to_double());
      if (n > 8 && b.back() < 1e-18 * b.front()) break;
    }
    return [b](double t) {
      double acc = 0.0;
      for (std::size_t n = b.size(); n-- > 0;) acc = acc * t + b[n];
      return acc;
    };
  }
  std::vector<double> c;
  for (const auto& v : expand(spec, 2, levels, Precision{64}).coefficients()) c.push_back(v.to_double());
  return [c](double t) {
    double p0 = 1.0, p1 = t, acc = c[0];
    if (c.size() > 1) acc += c[1] * t;
    for (std::size_t n = 2; n < c.size(); ++n) {
      const double p2 = ((2.0 * n - 1) * t * p1 - (n - 1.0) * p0) / n;
      acc += c[n] * p2;
      p0 = p1;
      p1 = p2;
    }
    return acc;
  };
}

/// A_ij = sqrt(w_i w_j) K(x_i . x_j) / (4 pi). The product grid has only
/// n_polar^2 * n_azimuthal distinct dot products, so K is evaluated once per
/// (polar i, polar j, azimuth offset).
inline SymmetricMatrix assemble(const ZonalFunction& k, const SphereGrid& grid) {
  const unsigned P = grid.n_polar, A = grid.n_azimuthal;
  const double four_pi = 4.0 * std::numbers::pi;
  std::vector<double> cosd(A);
  for (unsigned d = 0; d < A; ++d) cosd[d] = std::cos(2.0 * std::numbers::pi * d / A);
  std::vector<double> rho(P);
  for (unsigned i = 0; i < P; ++i) rho[i] = std::sqrt(std::max(0.0, 1.0 - grid.polar_nodes[i] * grid.polar_nodes[i]));

  SymmetricMatrix M(std::size_t{P} * A);
  std::vector<double> table(A);
  for (unsigned i = 0; i < P; ++i) {
    for (unsigned j = i; j < P; ++j) {
      const double zz = grid.polar_nodes[i] * grid.polar_nodes[j], rr = rho[i] * rho[j];
      for (unsigned d = 0; d < A; ++d) table[d] = k(std::clamp(zz + rr * cosd[d], -1.0, 1.0));
      for (unsigned a = 0; a < A; ++a) {
        const std::size_t row = std::size_t{i} * A + a;
        for (unsigned b = 0; b < A; ++b) {
          const std::size_t col = std::size_t{j} * A + b;
          if (col < row) continue;
          const double w = std::sqrt(grid.weights[row] * grid.weights[col]);
          M.set(row, col, w * table[(b + A - a) % A] / four_pi);
        }
      }
    }
  }
  return M;
}

enum class EigenMethod { automatic, jacobi, householder_qr };

namespace detail {

inline std::vector<double> jacobi_eigenvalues(const SymmetricMatrix& A, double tol) {
  const std::size_t n = A.order();
  std::vector<double> a = A.data();
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  const double fro = A.frobenius();
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) s += at(i, j) * at(i, j);
      }
    }
    return std::sqrt(s);
  };
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps && off_norm() >= tol * fro && fro > 0.0; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = 0.0;
        at(q, p) = 0.0;
      }
    }
  }
  if (fro > 0.0 && off_norm() >= tol * fro) {
    throw ConvergenceError("eigs_symmetric: Jacobi sweeps exhausted", sweep);
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(i, i);
  return out;
}

}  // namespace detail

/// All eigenvalues, non-increasing. Cyclic Jacobi (off-diagonal Frobenius norm
/// driven below tol * ||A||_F) for orders up to 200; Householder
/// tridiagonalization plus implicit QR beyond that.
inline std::vector<double> eigs_symmetric(const SymmetricMatrix& A, double tol = 1e-14,
                                          EigenMethod method = EigenMethod::automatic) {
  if (!(tol > 0.0)) throw DomainError("eigs_symmetric: tol must be > 0");
  if (method == EigenMethod::automatic) method = A.order() <= 200 ? EigenMethod::jacobi : EigenMethod::householder_qr;
  std::vector<double> out;
  if (method == EigenMethod::jacobi) {
    out = detail::jacobi_eigenvalues(A, tol);
  } else {
    const auto n = static_cast<Eigen::Index>(A.order());
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(A.data().data(),
                                                                                                       n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw ConvergenceError("eigs_symmetric: QR iteration failed", 0);
    out.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

struct ComparedEigenvalue {
  std::size_t index = 0;  // 1-based
  double numeric = 0.0;
  double analytic = 0.0;
  double relative_error = 0.0;
};

struct Cluster {
  std::size_t first_index = 0;  // 1-based
  std::size_t size = 0;
  std::size_t expected = 0;  // analytic multiplicity within the compared range
  unsigned long level = 0;
  bool matches = false;
};

struct SpectrumComparison {
  std::size_t k = 0;
  std::vector<ComparedEigenvalue> rows;
  std::vector<Cluster> clusters;
  double max_relative_error = 0.0;
  bool clusters_match = false;
};

/// Top-k numeric eigenvalues against the sorted analytic spectrum, plus a
/// multiplicity check: numeric values within cluster_tol (relative) of a
/// cluster's first value are grouped and compared with d_n^m.
inline SpectrumComparison compare_spectra(const std::vector<double>& numeric, const Spectrum& analytic, std::size_t k,
                                          double cluster_tol = 1e-6) {
  if (k < 1) throw DomainError("compare_spectra: k must be >= 1");
  if (k > numeric.size()) throw DomainError("compare_spectra: k exceeds the numeric eigenvalue count");
  if (analytic.size() < k) {
    throw DomainError("compare_spectra: k = " + std::to_string(k) + " beyond analytic truncation (size " +
                      analytic.size().get_str() + ")");
  }
  SpectrumComparison out;
  out.k = k;
  for (std::size_t i = 1; i <= k; ++i) {
    const double a = analytic.at(BigInt(static_cast<unsigned long>(i)), Ordering::sorted).to_double();
    const double v = numeric[i - 1];
    const double err = a != 0.0 ? std::abs(v - a) / std::abs(a) : std::abs(v);
    out.rows.push_back({i, v, a, err});
    out.max_relative_error = std::max(out.max_relative_error, err);
  }

  auto close = [cluster_tol](double x, double y) {
    return std::abs(x - y) <= cluster_tol * std::max(std::abs(x), std::abs(y));
  };
  // Analytic groups: sorted runs merged when their values coincide.
  struct Group {
    std::size_t count;
    unsigned long level;
    double value;
  };
  std::vector<Group> expected;
  std::size_t seen = 0;
  for (const auto& run : analytic.runs(Ordering::sorted)) {
    if (seen >= k) break;
    const std::size_t take = run.count > static_cast<unsigned long>(k - seen) ? k - seen : run.count.get_ui();
    const double v = run.value.to_double();
    if (!expected.empty() && close(expected.back().value, v)) {
      expected.back().count += take;
    } else {
      expected.push_back({take, run.level, v});
    }
    seen += take;
  }
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i + 1;
    while (j < k && close(numeric[i], numeric[j])) ++j;
    out.clusters.push_back({i + 1, j - i, 0, 0, false});
    i = j;
  }
  out.clusters_match = out.clusters.size() == expected.size();
  for (std::size_t c = 0; c < out.clusters.size(); ++c) {
    if (c < expected.size()) {
      out.clusters[c].expected = expected[c].count;
      out.clusters[c].level = expected[c].level;
      out.clusters[c].matches = out.clusters[c].size == expected[c].count;
    }
    out.clusters_match = out.clusters_match && out.clusters[c].matches;
  }
  return out;
}

struct OracleReport {
  unsigned n_polar = 0;
  unsigned n_azimuthal = 0;
  SpectrumComparison comparison;
  double trace_numeric = 0.0;
  double trace_analytic = 0.0;  // sum_n c_n = K(1)
  double trace_relative_error = 0.0;
  double frobenius_numeric = 0.0;
  double frobenius_analytic = 0.0;  // hs_norm
  double frobenius_relative_error = 0.0;
  double min_eigenvalue = 0.0;
  /// Smallest eigenvalue >= -1e-10 ||A||_F.
  bool positivity = false;
};

/// Full cross-check of an expansion (m = 2) against the Nystrom matrix of k.
inline OracleReport oracle_check(const ZonalFunction& k, const LegendreExpansion& e, unsigned n_polar,
                                 unsigned n_azimuthal, std::size_t top_k) {
  if (e.m() != 2) throw DomainError("oracle_check: the Nystrom oracle is fixed to m = 2");
  const SphereGrid grid = build_grid(n_polar, n_azimuthal);
  const SymmetricMatrix A = assemble(k, grid);
  const auto eigs = eigs_symmetric(A);
  const Spectrum spectrum = eigenvalue_blocks(e);

  OracleReport rep;
  rep.n_polar = n_polar;
  rep.n_azimuthal = n_azimuthal;
  rep.comparison = compare_spectra(eigs, spectrum, top_k);
  rep.trace_numeric = A.trace();
  Real sum_c(e.precision());
  for (const auto& c : e.coefficients()) sum_c += c;
  rep.trace_analytic = sum_c.to_double();
  rep.trace_relative_error = std::abs(rep.trace_numeric - rep.trace_analytic) / std::abs(rep.trace_analytic);
  rep.frobenius_numeric = A.frobenius();
  rep.frobenius_analytic = hs_norm(e).to_double();
  rep.frobenius_relative_error =
      std::abs(rep.frobenius_numeric - rep.frobenius_analytic) / std::abs(rep.frobenius_analytic);
  rep.min_eigenvalue = eigs.back();
  rep.positivity = rep.min_eigenvalue >= -1e-10 * rep.frobenius_numeric;
  return rep;
}

}  // namespace spherespec
