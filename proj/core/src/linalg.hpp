#pragma once

#include "schurlab/matrix.hpp"

namespace schurlab::detail {

// Smallest eigenvalue of a symmetric matrix (Householder tridiagonalization
// followed by implicit symmetric QR).
double min_eigenvalue_symmetric(const Matrix& m);

// Largest singular value by a full two-sided Jacobi SVD.
double max_singular_value_svd(const Matrix& m);

}  // namespace schurlab::detail
