#pragma once

#include "d2dsec/types.h"

namespace d2dsec {

inline constexpr double kLn2 = 0.69314718055994530942;

/// log2 det of a Hermitian positive definite matrix via Cholesky.
/// Throws std::domain_error if the factorization fails.
double log2det_hpd(const CMat& A);

/// Solves A X = B for Hermitian positive definite A.
CMat solve_hpd(const CMat& A, const CMat& B);

/// Inverse of a Hermitian PD matrix, symmetrized.
CMat inverse_hpd(const CMat& A);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMat& A);

inline CMat hermitian_part(const CMat& A) {
  return 0.5 * (A + A.adjoint());
}

}  // namespace d2dsec
