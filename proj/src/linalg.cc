#include "d2dsec/linalg.h"

#include <cmath>

namespace d2dsec {

namespace {

Eigen::LLT<CMat> factor(const CMat& A, const char* who) {
  Eigen::LLT<CMat> llt(hermitian_part(A));
  if (llt.info() != Eigen::Success)
    throw std::domain_error(std::string(who) + ": matrix is not positive definite");
  return llt;
}

}  // namespace

double log2det_hpd(const CMat& A) {
  if (A.size() == 0) return 0.0;
  const auto llt = factor(A, "log2det_hpd");
  const CMat& L = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    const double d = L(i, i).real();
    if (!(d > 0.0)) throw std::domain_error("log2det_hpd: singular matrix");
    acc += std::log2(d);
  }
  return 2.0 * acc;
}

CMat solve_hpd(const CMat& A, const CMat& B) {
  return factor(A, "solve_hpd").solve(B);
}

CMat inverse_hpd(const CMat& A) {
  const CMat inv = solve_hpd(A, CMat::Identity(A.rows(), A.cols()));
  return hermitian_part(inv);
}

double min_eigenvalue(const CMat& A) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(A), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace d2dsec
