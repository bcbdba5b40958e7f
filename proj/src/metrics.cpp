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

#include "entop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "entop/errors.hpp"
#include "entop/tomography.hpp"

namespace entop {

namespace {

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

// PSD square root that treats eigenvalues at the rounding floor as zero. A
// plain sqrt would turn 1e-17 noise into 3e-9 spurious weight.
ComplexMatrix metric_root(const ComplexMatrix& a) {
  const auto eig = hermitian_eig(hermitian_part(a));
  if (eig.values.back() < -1e-10) {
    throw Error(ErrorKind::NotPSD, "metric argument is not positive semidefinite");
  }
  const double floor = 1e-14 * std::max(std::abs(eig.values.front()), 1e-300);
  Eigen::VectorXd r(static_cast<Eigen::Index>(eig.values.size()));
  for (std::size_t j = 0; j < eig.values.size(); ++j) {
    const double v = eig.values[j];
    r(static_cast<Eigen::Index>(j)) = v > floor ? std::sqrt(v) : 0.0;
  }
  return eig.vectors * r.asDiagonal() * eig.vectors.adjoint();
}

double nuclear_norm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

}  // namespace

double state_fidelity(const ComplexMatrix& rho, const ComplexVector& psi) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size()) {
    throw Error(ErrorKind::DimensionMismatch, "state and target dimensions differ");
  }
  return clamp_unit((psi.adjoint() * rho * psi)(0, 0).real());
}

double uhlmann_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "fidelity arguments differ in shape");
  }
  // sqrt(F) is the trace norm of sqrt(rho) sqrt(sigma); singular values avoid
  // square roots of near-zero eigenvalues.
  const double root = nuclear_norm(metric_root(rho) * metric_root(sigma));
  return clamp_unit(root * root);
}

double process_fidelity(const ProcessMatrix& chiExp, const ProcessMatrix& chiIdeal) {
  if (chiExp.basisLabels != chiIdeal.basisLabels) {
    throw Error(ErrorKind::BasisMismatch, "process matrices use different bases");
  }
  return uhlmann_fidelity(chiExp.chi, chiIdeal.chi);
}

double concurrence(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw Error(ErrorKind::WrongDimension, "concurrence needs a two-qubit state");
  }
  const ComplexMatrix yy = tensor_product(pauli::Y(), pauli::Y());
  // The lambdas are the singular values of sqrt(rho) sqrt(flipped), and
  // sqrt(flipped) = YY conj(sqrt(rho)) YY.
  const ComplexMatrix root = metric_root(rho);
  Eigen::JacobiSVD<ComplexMatrix> svd(root * yy * root.conjugate() * yy);
  std::vector<double> lambda(svd.singularValues().data(),
                             svd.singularValues().data() + svd.singularValues().size());
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return clamp_unit(lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

double purity(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "purity needs a square matrix");
  }
  return clamp_unit((rho * rho).trace().real());
}

}  // namespace entop
