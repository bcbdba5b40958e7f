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

#include "entop/opalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "entop/errors.hpp"

namespace entop {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::MismatchedParties: return "MismatchedParties";
    case ErrorKind::EmptyTermList: return "EmptyTermList";
    case ErrorKind::Annihilated: return "Annihilated";
    case ErrorKind::ZeroSuccess: return "ZeroSuccess";
    case ErrorKind::NotDiagonal: return "NotDiagonal";
    case ErrorKind::NotInformationallyComplete:
      return "NotInformationallyComplete";
    case ErrorKind::InputSetDegenerate: return "InputSetDegenerate";
    case ErrorKind::BasisMismatch: return "BasisMismatch";
    case ErrorKind::WrongDimension: return "WrongDimension";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Config: return "ConfigError";
  }
  return "Error";
}

void require_valid(const ComplexMatrix& a, const char* what) {
  if (a.size() == 0) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " is empty");
  }
  if (!a.allFinite()) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + " has non-finite entries");
  }
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_valid(a, "tensor_product lhs");
  require_valid(b, "tensor_product rhs");
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix tensor_product(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) {
    throw Error(ErrorKind::InvalidArgument, "tensor_product of no factors");
  }
  ComplexMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    out = tensor_product(out, factors[k]);
  }
  return out;
}

ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "max_abs_diff shapes differ");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && max_abs_diff(a, a.adjoint()) <= tol;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "hs_inner shapes differ");
  }
  return (a.conjugate().cwiseProduct(b)).sum();
}

double hs_norm(const ComplexMatrix& a) { return a.norm(); }

EigenDecomposition hermitian_eig(const ComplexMatrix& a, double tol) {
  require_valid(a, "hermitian_eig input");
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "hermitian_eig needs a square matrix");
  }
  if (max_abs_diff(a, a.adjoint()) > tol) {
    throw Error(ErrorKind::NotHermitian,
                "max|a - a^dagger| exceeds " + std::to_string(tol));
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  const auto n = a.rows();
  EigenDecomposition out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  // Eigen sorts ascending.
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values[static_cast<std::size_t>(j)] = solver.eigenvalues()(n - 1 - j);
    out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
  }
  return out;
}

SingularValueDecomposition svd(const ComplexMatrix& a) {
  require_valid(a, "svd input");
  Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularValueDecomposition out;
  out.u = solver.matrixU();
  out.v = solver.matrixV();
  const auto& s = solver.singularValues();
  out.s.assign(s.data(), s.data() + s.size());
  return out;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& a) {
  const auto eig = hermitian_eig(a);
  Eigen::VectorXd root(static_cast<Eigen::Index>(eig.values.size()));
  for (std::size_t j = 0; j < eig.values.size(); ++j) {
    const double lambda = eig.values[j];
    if (lambda < -kHermitianTol) {
      throw Error(ErrorKind::NotPSD,
                  "eigenvalue " + std::to_string(lambda) + " below -1e-10");
    }
    root(static_cast<Eigen::Index>(j)) = std::sqrt(std::max(lambda, 0.0));
  }
  ComplexMatrix r = eig.vectors * root.asDiagonal() * eig.vectors.adjoint();
  return hermitian_part(r);
}

namespace {

void check_bipartition(const ComplexMatrix& o, std::size_t dimA,
                       std::size_t dimB) {
  const auto d = static_cast<Eigen::Index>(dimA * dimB);
  if (dimA == 0 || dimB == 0 || o.rows() != d || o.cols() != d) {
    throw Error(ErrorKind::DimensionMismatch,
                "operator is not (" + std::to_string(dimA) + "*" +
                    std::to_string(dimB) + ") square");
  }
}

}  // namespace

ComplexMatrix realign(const ComplexMatrix& o, std::size_t dimA,
                      std::size_t dimB) {
  check_bipartition(o, dimA, dimB);
  const auto a = static_cast<Eigen::Index>(dimA);
  const auto b = static_cast<Eigen::Index>(dimB);
  ComplexMatrix r(a * a, b * b);
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index j = 0; j < a; ++j)
      for (Eigen::Index k = 0; k < b; ++k)
        for (Eigen::Index l = 0; l < b; ++l)
          r(i * a + j, k * b + l) = o(i * b + k, j * b + l);
  return r;
}

ComplexMatrix unrealign(const ComplexMatrix& r, std::size_t dimA,
                        std::size_t dimB) {
  const auto a = static_cast<Eigen::Index>(dimA);
  const auto b = static_cast<Eigen::Index>(dimB);
  if (dimA == 0 || dimB == 0 || r.rows() != a * a || r.cols() != b * b) {
    throw Error(ErrorKind::DimensionMismatch, "realigned matrix has wrong shape");
  }
  ComplexMatrix o(a * b, a * b);
  for (Eigen::Index i = 0; i < a; ++i)
    for (Eigen::Index j = 0; j < a; ++j)
      for (Eigen::Index k = 0; k < b; ++k)
        for (Eigen::Index l = 0; l < b; ++l)
          o(i * b + k, j * b + l) = r(i * a + j, k * b + l);
  return o;
}

ComplexVector vec_row_major(const ComplexMatrix& a) {
  ComplexVector v(a.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

ComplexMatrix unvec_row_major(const ComplexVector& v, std::size_t rows,
                              std::size_t cols) {
  if (static_cast<std::size_t>(v.size()) != rows * cols) {
    throw Error(ErrorKind::DimensionMismatch, "unvec size mismatch");
  }
  ComplexMatrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = v(i * a.cols() + j);
  return a;
}

double global_phase_overlap(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double na = hs_norm(a);
  const double nb = hs_norm(b);
  if (na == 0.0 || nb == 0.0) return (na == nb) ? 1.0 : 0.0;
  return std::abs(hs_inner(a, b)) / (na * nb);
}

bool equal_up_to_global_phase(const ComplexMatrix& a, const ComplexMatrix& b,
                              double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (std::abs(hs_norm(a) - hs_norm(b)) > tol) return false;
  // Align the phase and compare entrywise; the overlap alone is too coarse
  // (1 - overlap is quadratic in the deviation).
  const Complex inner = hs_inner(a, b);
  const Complex phase = std::abs(inner) > 0.0 ? inner / std::abs(inner) : 1.0;
  return max_abs_diff(phase * a, b) <= tol;
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto eig = hermitian_eig(hermitian_part(a - b));
  double sum = 0.0;
  for (double v : eig.values) sum += std::abs(v);
  return 0.5 * sum;
}

ComplexMatrix identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return ComplexMatrix::Identity(d, d);
}

ComplexMatrix projector(const ComplexVector& psi) {
  return psi * psi.adjoint();
}

ComplexVector basis_ket(std::size_t dim, std::size_t index) {
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

namespace pauli {

ComplexMatrix I() { return ComplexMatrix::Identity(2, 2); }

ComplexMatrix X() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix Y() {
  const Complex i{0.0, 1.0};
  ComplexMatrix m(2, 2);
  m << 0.0, -i, i, 0.0;
  return m;
}

ComplexMatrix Z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ComplexMatrix by_index(int index) {
  switch (index) {
    case 0: return I();
    case 1: return X();
    case 2: return Y();
    case 3: return Z();
    default:
      throw Error(ErrorKind::InvalidArgument, "Pauli index out of range");
  }
}

}  // namespace pauli

}  // namespace entop
