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

#include <doctest.h>

#include <filesystem>

#include "entop/errors.hpp"
#include "entop/matrix_io.hpp"
#include "entop/operators.hpp"
#include "entop/tomography.hpp"
#include "test_support.hpp"

using namespace entop;

TEST_CASE("matrix CSV round trip") {
  Rng rng = make_stream(61, 0);
  for (Eigen::Index dim : {2, 4, 16}) {
    const ComplexMatrix m = testing::random_matrix(rng, dim, dim) * 1e-3;
    const auto labels = dim == 16 ? pauli_labels(2) : polarization_labels(dim == 2 ? 1 : 2);
    const auto parsed = parse_matrix_csv(emit_matrix_csv(m, labels));
    CHECK(parsed.labels == labels);
    CHECK(max_abs_diff(parsed.matrix, m) < 1e-12);
    CHECK(max_abs_diff(parsed.matrix, m) == 0.0);
  }
}

TEST_CASE("matrix CSV layout") {
  ComplexMatrix m(2, 2);
  m << Complex(1, 2), Complex(0.5, 0), Complex(0, -1), Complex(0.25, 0.125);
  const std::string text = emit_matrix_csv(m, {"H", "V"});
  CHECK(text ==
        "block,row,H,V\n"
        "re,H,1,0.5\n"
        "re,V,0,0.25\n"
        "im,H,2,0\n"
        "im,V,-1,0.125\n");
  CHECK(polarization_labels(2) == std::vector<std::string>{"HH", "HV", "VH", "VV"});
}

TEST_CASE("matrix CSV errors") {
  CHECK_THROWS_AS(parse_matrix_csv(""), ParseError);
  CHECK_THROWS_AS(parse_matrix_csv("row,block,H\n"), ParseError);
  CHECK_THROWS_AS(parse_matrix_csv("block,row,H\nre,H,1\n"), ParseError);
  CHECK_THROWS_AS(parse_matrix_csv("block,row,H\nre,H,x\nim,H,0\n"), ParseError);
  CHECK_THROWS_AS(emit_matrix_csv(identity(2), {"H"}), Error);
}

TEST_CASE("counts CSV round trip") {
  const auto counts = simulate_counts(projector(product_ket("HD")), standard_settings(2), 1234, 5, true);
  const std::string text = emit_counts_csv(counts);
  CHECK(text.rfind("setting_label,count,exposure\n", 0) == 0);
  const auto parsed = parse_counts_csv(text);
  REQUIRE(parsed.size() == counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    CHECK(parsed[k].setting.label == counts[k].setting.label);
    CHECK(parsed[k].count == counts[k].count);
    CHECK(parsed[k].exposure == counts[k].exposure);
    CHECK(max_abs_diff(parsed[k].setting.projector, counts[k].setting.projector) == 0.0);
  }
  CHECK_THROWS_AS(parse_counts_csv("label,count\n"), ParseError);
  CHECK_THROWS_AS(parse_counts_csv("setting_label,count,exposure\nHH,-1,10\n"), ParseError);
  CHECK_THROWS_AS(parse_counts_csv("setting_label,count,exposure\nHQ,1,10\n"), ParseError);
}

TEST_CASE("text files") {
  const auto dir = std::filesystem::temp_directory_path() / "entop_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "x.txt").string();
  write_text_file(path, "abc\n");
  CHECK(read_text_file(path) == "abc\n");
  CHECK_THROWS_AS(read_text_file((dir / "missing.txt").string()), Error);
}
