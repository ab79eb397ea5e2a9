#pragma once

#include "qline/types.hpp"

#include <vector>

namespace qline {

/// One diagonal pivot block of a symmetric indefinite factorization.
struct PivotBlock {
  Eigen::Index start = 0;
  Eigen::Index size = 1;  // 1 or 2
};

/// Spectral decomposition of a block-diagonal matrix, computed blockwise.
struct BlockSpectrum {
  Matrix eigenvectors;  // Q, orthogonal, block diagonal
  Vector eigenvalues;   // Lambda, in block order
};

/// P A P^T = L B L^T with unit lower-triangular L and B built from 1x1 and 2x2
/// blocks (Bunch-Kaufman partial pivoting).
struct FactorizationBundle {
  /// Row i of P A P^T is row permutation[i] of A.
  std::vector<Eigen::Index> permutation;
  Matrix lower;
  Matrix block_diagonal;
  std::vector<PivotBlock> blocks;
  Matrix block_eigenvectors;
  Vector block_eigenvalues;

  Eigen::Index size() const { return lower.rows(); }
  Matrix permutation_matrix() const;

  /// Solves A x = b through the factors. Throws NumericFailure when B is
  /// numerically singular.
  Vector solve(const Vector& b) const;

  /// Counts of (positive, negative, zero) block eigenvalues.
  struct Inertia {
    int positive = 0;
    int negative = 0;
    int zero = 0;
  };
  Inertia inertia(double zero_tolerance = 0.0) const;
};

/// Symmetric indefinite factorization with Bunch-Kaufman pivoting,
/// alpha = (1 + sqrt(17)) / 8. The input is symmetrized first; an asymmetry
/// above 1e-10 * ||A||_inf is rejected.
FactorizationBundle ldl_factor(const Matrix& a);

/// Closed-form eigendecomposition of each 1x1 / 2x2 block. Eigenvalues of a
/// coupled 2x2 block are returned in descending order.
BlockSpectrum block_spectral(const Matrix& block_diagonal,
                             const std::vector<PivotBlock>& blocks);

/// Positive-definite modification A_bar = A + E with
/// P (A + E) P^T = L (B + F) L^T and F = Q diag(tau) Q^T,
/// tau_i = max(0, delta - lambda_i).
struct PsdModification {
  Matrix modified_matrix;
  Matrix shift;                 // F, block diagonal
  Vector shifts;                // tau_i
  Vector modified_eigenvalues;  // lambda_i + tau_i
  double delta = 0.0;
  double modification_frobenius = 0.0;
  FactorizationBundle factorization;

  /// Solves A_bar x = b with the modified factors (two triangular solves and a
  /// blockwise solve); never forms an inverse.
  Vector solve(const Vector& b) const;

  /// max |lambda_i + tau_i| / min |lambda_i + tau_i| over the block spectrum.
  double block_condition() const;
};

/// sqrt(machine epsilon) * max(1, ||A||_inf).
double default_delta(const Matrix& a);

PsdModification psd_modify(const Matrix& a, double delta);
PsdModification psd_modify(const Matrix& a);

/// Infinity (max row sum) norm.
double inf_norm(const Matrix& a);

}  // namespace qline
