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

#include "entop/operators.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

#include "entop/errors.hpp"

namespace entop {

namespace local {

namespace {

LocalOperator named(const char* label, ComplexMatrix m) {
  return LocalOperator{std::string(label), std::move(m)};
}

std::string angle_label(const char* prefix, double theta) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s(%.12g)", prefix, theta);
  return buf;
}

}  // namespace

LocalOperator I() { return named("I", pauli::I()); }
LocalOperator X() { return named("X", pauli::X()); }
LocalOperator Y() { return named("Y", pauli::Y()); }
LocalOperator Z() { return named("Z", pauli::Z()); }

LocalOperator P0() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  return named("P0", std::move(m));
}

LocalOperator P1() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 1) = 1.0;
  return named("P1", std::move(m));
}

LocalOperator half_wave_plate(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  ComplexMatrix m(2, 2);
  m << c, s, s, -c;
  return LocalOperator{angle_label("H", theta), std::move(m)};
}

LocalOperator quarter_wave_plate(double theta) {
  const Complex i{0.0, 1.0};
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  ComplexMatrix m(2, 2);
  m << c * c + i * s * s, (1.0 - i) * s * c,
       (1.0 - i) * s * c, s * s + i * c * c;
  return LocalOperator{angle_label("Q", theta), std::move(m)};
}

LocalOperator custom(ComplexMatrix m, std::optional<std::string> label) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw Error(ErrorKind::InvalidArgument, "local operators must be 2x2");
  }
  require_valid(m, "local operator");
  return LocalOperator{std::move(label), std::move(m)};
}

}  // namespace local

BranchSuperposition build_superposition(std::vector<BranchTerm> terms) {
  if (terms.empty()) {
    throw Error(ErrorKind::EmptyTermList, "superposition needs at least one term");
  }
  const std::size_t parties = terms.front().factors.size();
  if (parties == 0) {
    throw Error(ErrorKind::MismatchedParties, "terms must act on at least one party");
  }
  double norm2 = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& term = terms[k];
    if (term.factors.size() != parties) {
      throw Error(ErrorKind::MismatchedParties,
                  "term " + std::to_string(k) + " has " +
                      std::to_string(term.factors.size()) + " factors, expected " +
                      std::to_string(parties));
    }
    for (const auto& f : term.factors) {
      if (f.matrix.rows() != 2 || f.matrix.cols() != 2) {
        throw Error(ErrorKind::InvalidArgument, "local operators must be 2x2");
      }
      require_valid(f.matrix, "local operator");
    }
    if (!std::isfinite(term.coefficient.real()) ||
        !std::isfinite(term.coefficient.imag())) {
      throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
    }
    norm2 += std::norm(term.coefficient);
  }
  if (norm2 == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "all coefficients are zero");
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& term : terms) term.coefficient *= scale;
  return BranchSuperposition{parties, std::move(terms)};
}

ComplexMatrix to_matrix(const BranchSuperposition& s) {
  const auto d = static_cast<Eigen::Index>(s.dimension());
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  std::vector<ComplexMatrix> mats;
  for (const auto& term : s.terms) {
    mats.clear();
    for (const auto& f : term.factors) mats.push_back(f.matrix);
    out += term.coefficient * tensor_product(mats);
  }
  return out;
}

StateAction apply_to_state(const ComplexMatrix& o, const ComplexVector& psi) {
  if (o.cols() != psi.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "operator dimension " + std::to_string(o.cols()) +
                    " does not match state dimension " + std::to_string(psi.size()));
  }
  const ComplexVector out = o * psi;
  const double weight = out.squaredNorm();
  if (weight < 1e-14) {
    throw Error(ErrorKind::Annihilated, "operator maps the input state to zero");
  }
  return StateAction{out / std::sqrt(weight), weight};
}

StateAction apply_to_state(const BranchSuperposition& s,
                           const ComplexVector& psi) {
  return apply_to_state(to_matrix(s), psi);
}

ComplexMatrix SchmidtDecomposition::reconstruct() const {
  const auto d = static_cast<Eigen::Index>(dimA * dimB);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    out += coefficients[k] * tensor_product(leftFactors[k], rightFactors[k]);
  }
  return out;
}

SchmidtDecomposition schmidt_decompose(const ComplexMatrix& o,
                                       std::size_t dimA, std::size_t dimB) {
  require_valid(o, "schmidt_decompose input");
  const ComplexMatrix r = realign(o, dimA, dimB);
  const auto dec = svd(r);
  SchmidtDecomposition out;
  out.dimA = dimA;
  out.dimB = dimB;
  out.coefficients = dec.s;
  for (std::size_t k = 0; k < dec.s.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    // R = sum_k s_k u_k v_k^dagger, so vec(L_k) = u_k and vec(R_k) = conj(v_k).
    out.leftFactors.push_back(unvec_row_major(dec.u.col(col), dimA, dimA));
    out.rightFactors.push_back(
        unvec_row_major(dec.v.col(col).conjugate(), dimB, dimB));
  }
  return out;
}

std::size_t schmidt_number(const SchmidtDecomposition& d, double tol) {
  if (d.coefficients.empty()) return 0;
  double largest = 0.0;
  for (double c : d.coefficients) largest = std::max(largest, c);
  if (largest == 0.0) return 0;
  std::size_t count = 0;
  for (double c : d.coefficients) {
    if (c > tol * largest) ++count;
  }
  return count;
}

bool is_unitary(const ComplexMatrix& o, double tol) {
  if (o.rows() != o.cols() || o.size() == 0) return false;
  return max_abs_diff(o.adjoint() * o, identity(static_cast<std::size_t>(o.rows()))) <= tol;
}

BranchSuperposition schmidt2_unitary(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "p must lie in [0, 1]");
  }
  const Complex i{0.0, 1.0};
  return build_superposition({
      BranchTerm{std::sqrt(1.0 - p), {local::I(), local::I()}},
      BranchTerm{i * std::sqrt(p), {local::X(), local::X()}},
  });
}

ComplexMatrix ising_xx(double theta) {
  const Complex i{0.0, 1.0};
  return std::cos(theta) * identity(4) -
         i * std::sin(theta) * tensor_product(pauli::X(), pauli::X());
}

BranchSuperposition controlled_unitary(const LocalOperator& u) {
  const LocalOperator target = local::custom(u.matrix, u.label.value_or("U"));
  return build_superposition({
      BranchTerm{1.0, {local::P0(), local::I()}},
      BranchTerm{1.0, {local::P1(), target}},
  });
}

BranchSuperposition entanglement_filter() {
  return build_superposition({
      BranchTerm{1.0, {local::P0(), local::P0()}},
      BranchTerm{1.0, {local::P1(), local::P1()}},
  });
}

BranchSuperposition swap_operator() {
  return build_superposition({
      BranchTerm{1.0, {local::I(), local::I()}},
      BranchTerm{1.0, {local::X(), local::X()}},
      BranchTerm{1.0, {local::Y(), local::Y()}},
      BranchTerm{1.0, {local::Z(), local::Z()}},
  });
}

BranchSuperposition ghz_operator() {
  return build_superposition({
      BranchTerm{1.0, {local::I(), local::I(), local::I()}},
      BranchTerm{1.0, {local::X(), local::X(), local::X()}},
  });
}

BranchSuperposition w_operator() {
  return build_superposition({
      BranchTerm{1.0, {local::I(), local::I(), local::X()}},
      BranchTerm{1.0, {local::I(), local::X(), local::I()}},
      BranchTerm{1.0, {local::X(), local::I(), local::I()}},
  });
}

BranchSuperposition ccu(const LocalOperator& u) {
  const LocalOperator target = local::custom(u.matrix, u.label.value_or("U"));
  return build_superposition({
      BranchTerm{1.0, {local::P0(), local::P0(), local::I()}},
      BranchTerm{1.0, {local::P0(), local::P1(), local::I()}},
      BranchTerm{1.0, {local::P1(), local::P0(), local::I()}},
      BranchTerm{1.0, {local::P1(), local::P1(), target}},
  });
}

ComplexVector polarization_ket(char token) {
  const Complex i{0.0, 1.0};
  const double h = 1.0 / std::numbers::sqrt2;
  ComplexVector v(2);
  switch (token) {
    case 'H': case '0': v << 1.0, 0.0; break;
    case 'V': case '1': v << 0.0, 1.0; break;
    case 'D': v << h, h; break;
    case 'A': v << h, -h; break;
    case 'R': v << h, i * h; break;
    case 'L': v << h, -i * h; break;
    default:
      throw ParseError(0, std::string("unknown polarisation token '") + token + "'");
  }
  return v;
}

ComplexVector product_ket(const std::string& tokens) {
  if (tokens.empty()) throw ParseError(0, "empty ket token string");
  ComplexVector out(1);
  out(0) = 1.0;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    try {
      out = tensor_product(out, polarization_ket(tokens[k]));
    } catch (const ParseError&) {
      throw ParseError(k, std::string("unknown polarisation token '") + tokens[k] + "'");
    }
  }
  return out;
}

}  // namespace entop
