// Copyright 2026 The entop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace entop {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kReconstructionTol = 1e-9;

/// Throws InvalidArgument if the matrix is empty or holds a NaN/Inf entry.
void require_valid(const ComplexMatrix& a, const char* what = "matrix");

/// Kronecker product. Entry (i*b.rows()+k, j*b.cols()+l) = a(i,j)*b(k,l), so
/// the left factor is the most significant index.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix tensor_product(std::span<const ComplexMatrix> factors);
ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b);

ComplexMatrix dagger(const ComplexMatrix& a);

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol);
ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// Hilbert-Schmidt inner product Tr(a^dagger b).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);
double hs_norm(const ComplexMatrix& a);

struct EigenDecomposition {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // column j pairs with values[j]
};

/// Spectral decomposition of a Hermitian matrix. Throws NotHermitian when
/// max|a - a^dagger| exceeds `tol`; the Hermitian part is decomposed.
EigenDecomposition hermitian_eig(const ComplexMatrix& a,
                                 double tol = kHermitianTol);

struct SingularValueDecomposition {
  ComplexMatrix u;        // rows x k, orthonormal columns
  std::vector<double> s;  // k = min(rows, cols), descending, non-negative
  ComplexMatrix v;        // cols x k, orthonormal columns
};

/// Thin SVD with a = u * diag(s) * v^dagger.
SingularValueDecomposition svd(const ComplexMatrix& a);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-1e-10, 0) are clipped to zero; anything more negative is NotPSD.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& a);

/// Operator realignment for a bipartition A|B. With (i,j) the row/column of
/// the A factor and (k,l) of the B factor, R[i*dimA+j, k*dimB+l] =
/// o[i*dimB+k, j*dimB+l]. The singular values of R are the operator-Schmidt
/// coefficients of o.
ComplexMatrix realign(const ComplexMatrix& o, std::size_t dimA,
                      std::size_t dimB);
/// Inverse of realign.
ComplexMatrix unrealign(const ComplexMatrix& r, std::size_t dimA,
                        std::size_t dimB);

/// Row-major vectorisation and its inverse (vec(A)[i*cols+j] = A(i,j)).
ComplexVector vec_row_major(const ComplexMatrix& a);
ComplexMatrix unvec_row_major(const ComplexVector& v, std::size_t rows,
                              std::size_t cols);

/// |Tr(a^dagger b)| / (|a| |b|); equals 1 iff b = e^{i theta} a.
double global_phase_overlap(const ComplexMatrix& a, const ComplexMatrix& b);
bool equal_up_to_global_phase(const ComplexMatrix& a, const ComplexMatrix& b,
                              double tol = 1e-12);

/// Half the trace norm of a - b for Hermitian arguments.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix identity(std::size_t dim);
ComplexMatrix projector(const ComplexVector& psi);
ComplexVector basis_ket(std::size_t dim, std::size_t index);

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
/// Pauli matrix by index 0..3 = I, X, Y, Z.
ComplexMatrix by_index(int index);
}  // namespace pauli

}  // namespace entop
