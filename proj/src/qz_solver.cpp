#include "bnk/qz_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <lapacke.h>

#include "bnk/errors.hpp"

namespace bnk {

namespace {

// Roots within this distance of the unit circle count as unstable.
constexpr double kUnitCircleMargin = 1e-10;

lapack_logical is_stable(const double* alphar, const double* alphai, const double* beta) {
  const double modulus = std::hypot(*alphar, *alphai);
  return modulus < (1.0 - kUnitCircleMargin) * std::abs(*beta) ? 1 : 0;
}

}  // namespace

ReSolution solve_qz(const LinearReSystem& sys) {
  const int n = static_cast<int>(sys.A.rows());
  const int nk = sys.n_predetermined;
  const int nu = n - nk;
  if (sys.A.cols() != n || sys.B.rows() != n || sys.B.cols() != n || nk < 0 || nk > n) {
    throw InputError("solve_qz: A and B must be square of equal size");
  }

  // Dynamics roots lambda solve det(B - lambda A) = 0, i.e. the pencil (B, A).
  Eigen::MatrixXd S = sys.B;
  Eigen::MatrixXd T = sys.A;
  Eigen::MatrixXd Q(n, n);
  Eigen::MatrixXd Z(n, n);
  Eigen::VectorXd alphar(n), alphai(n), beta(n);
  lapack_int sdim = 0;
  const lapack_int info =
      LAPACKE_dgges(LAPACK_COL_MAJOR, 'V', 'V', 'S', is_stable, n, S.data(), n, T.data(), n,
                    &sdim, alphar.data(), alphai.data(), beta.data(), Q.data(), n, Z.data(), n);
  if (info != 0) {
    std::ostringstream msg;
    msg << "solve_qz: LAPACK dgges failed (info = " << info << ")";
    throw SingularityError(msg.str());
  }

  ReSolution out;
  out.roots.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (beta(i) == 0.0) {
      out.roots.emplace_back(std::numeric_limits<double>::infinity(), 0.0);
    } else {
      out.roots.emplace_back(alphar(i) / beta(i), alphai(i) / beta(i));
    }
  }

  const int n_unstable = n - static_cast<int>(sdim);
  if (n_unstable != nu) {
    std::ostringstream msg;
    msg << (n_unstable < nu ? "indeterminacy" : "no stable solution") << ": " << n_unstable
        << " unstable roots for " << nu << " forward-looking variables";
    throw DeterminacyError(msg.str(), n_unstable, nu);
  }

  // (B, A) = (Q S Z', Q T Z'); with y = Z' w the unstable block must vanish,
  // so w = Z(:, 0:nk) y1 on the stable manifold.
  const Eigen::MatrixXd z11 = Z.topLeftCorner(nk, nk);
  const Eigen::MatrixXd z21 = Z.bottomLeftCorner(nu, nk);
  Eigen::FullPivLU<Eigen::MatrixXd> z11_lu(z11);
  if (nk > 0 && (!z11_lu.isInvertible() || z11_lu.rcond() < 1e-12)) {
    throw SingularityError("solve_qz: stable block does not span the predetermined variables");
  }
  if (nk == 0) {
    out.policy = Eigen::MatrixXd::Zero(nu, 0);
    out.transition = Eigen::MatrixXd::Zero(0, 0);
    return out;
  }
  const Eigen::MatrixXd z11_inv = z11_lu.inverse();
  const Eigen::MatrixXd s11 = S.topLeftCorner(nk, nk);
  const Eigen::MatrixXd t11 = T.topLeftCorner(nk, nk);
  out.policy = z21 * z11_inv;
  out.transition = z11 * t11.triangularView<Eigen::Upper>().solve(s11) * z11_inv;
  return out;
}

}  // namespace bnk
