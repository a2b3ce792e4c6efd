#pragma once

#include "ntklab/linalg.hpp"

namespace ntk {

struct EigenResult {
  Vec values;      // ascending
  Matrix vectors;  // column k pairs with values[k]
  int sweeps = 0;
};

/// Cyclic Jacobi on a dense symmetric matrix. Sweeps until the off-diagonal
/// Frobenius norm drops below `tol`. Rejects inputs asymmetric beyond 1e-8.
EigenResult jacobi_eigen(const Matrix& a, double tol = 1e-11, int max_sweeps = 100);

/// Smallest eigenvalue of a symmetric matrix.
double smallest_eigenvalue(const Matrix& a);

}  // namespace ntk
