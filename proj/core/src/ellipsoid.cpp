#include "sparse_bandit/ellipsoid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sparse_bandit/errors.hpp"

namespace sparse_bandit {

namespace {

// Eigenvalues within this relative distance of λ_min share its eigenspace.
constexpr double kEigenspaceGap = 1e-10;

std::string condition_report(const Eigen::VectorXd& eigenvalues) {
  std::ostringstream os;
  os << "eigenvalue range [" << eigenvalues.minCoeff() << ", "
     << eigenvalues.maxCoeff() << "]";
  return os.str();
}

}  // namespace

void canonicalize_sign(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = v.size() - 1; i >= 0; --i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

SubproblemSolution max_norm_in_ellipsoid(const Matrix& A, const Vector& center,
                                         double beta,
                                         const SubproblemOptions& options) {
  const Eigen::Index d = center.size();
  if (A.rows() != d || A.cols() != d) {
    throw InputError("ellipsoid matrix must be d x d with d = center length");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InputError("beta must be finite and nonnegative");
  }
  if (!A.allFinite() || !center.allFinite()) {
    throw NumericError("ellipsoid data is not finite");
  }
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
    throw NumericError("ellipsoid matrix is not symmetric");
  }

  SubproblemSolution sol;
  if (d == 0) {
    sol.nu_star = center;
    return sol;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
  if (eig.info() != Eigen::Success) {
    throw NumericError("eigendecomposition of ellipsoid matrix failed");
  }
  const Vector& lambda = eig.eigenvalues();  // ascending
  const double lambda_min = lambda[0];
  if (!(lambda_min > 0.0)) {
    throw NumericError("ellipsoid matrix is not positive definite: " +
                       condition_report(lambda));
  }
  Matrix Q = eig.eigenvectors();
  for (Eigen::Index i = 0; i < d; ++i) canonicalize_sign(Q.col(i));

  if (beta == 0.0) {
    sol.nu_star = center;
    sol.value = center.norm();
    return sol;
  }

  // Eigen coordinates; ratio r_i = λ_i / λ_min and gap_i = r_i − 1 ≥ 0.
  const Vector c = Q.transpose() * center;
  Vector ratio(d), gap(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    ratio[i] = lambda[i] / lambda_min;
    gap[i] = ratio[i] - 1.0;
    if (gap[i] <= kEigenspaceGap) gap[i] = 0.0;
  }

  // Σ λ_i v_i² with v_i = c_i / (s r_i + gap_i).
  auto secular = [&](double s) {
    double g = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double denom = s * ratio[i] + gap[i];
      if (c[i] == 0.0) continue;
      const double v = c[i] / denom;
      g += lambda[i] * v * v;
    }
    return g;
  };

  double c_min_sq = 0.0;
  double g0 = 0.0;  // secular value at s → 0 over the non-minimal directions
  for (Eigen::Index i = 0; i < d; ++i) {
    if (gap[i] == 0.0) {
      c_min_sq += c[i] * c[i];
    } else {
      const double v = c[i] / gap[i];
      g0 += lambda[i] * v * v;
    }
  }
  const double c_sq = c.squaredNorm();

  Vector v(d);
  if (c_min_sq == 0.0 && g0 <= beta) {
    // Hard case: μ = 1/λ_min; fill the remaining budget along the first
    // minimal eigenvector.
    for (Eigen::Index i = 0; i < d; ++i) {
      v[i] = gap[i] == 0.0 ? 0.0 : c[i] / gap[i];
    }
    v[0] = std::sqrt(std::max(0.0, beta - g0) / lambda_min);
    sol.hard_case = true;
  } else {
    double lo = c_min_sq > 0.0 ? std::sqrt(lambda_min * c_min_sq / beta) : 0.0;
    double hi = std::sqrt(lambda_min * c_sq / beta);
    // lo may exceed hi by rounding when c lies in the minimal eigenspace.
    if (lo > hi) std::swap(lo, hi);
    const double s_tol = options.tolerance * lambda_min;  // |Δμ| = |Δs|/λ_min
    int it = 0;
    while (it < options.max_iterations && hi - lo > s_tol) {
      const double mid =
          (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (secular(mid) > beta) {
        lo = mid;
      } else {
        hi = mid;
      }
      ++it;
    }
    sol.iterations = it;
    // hi keeps the iterate feasible (secular(hi) ≤ β).
    const double s = hi;
    for (Eigen::Index i = 0; i < d; ++i) {
      v[i] = c[i] == 0.0 ? 0.0 : c[i] / (s * ratio[i] + gap[i]);
    }
  }

  sol.nu_star = center + Q * v;
  sol.value = sol.nu_star.norm();
  return sol;
}

}  // namespace sparse_bandit
