/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <doctest.h>

#include "../oracles.hpp"
#include "qtb/tensor.hpp"

using namespace qtb;

TEST_CASE("kron matches the entry-wise definition") {
  std::mt19937_64 rng(1);
  const ComplexMatrix a = oracle::random_hermitian(2, rng), b = oracle::random_hermitian(3, rng);
  CHECK((kron(a, b) - oracle::kron(a, b)).norm() < 1e-14);
  CHECK((kron_power(a, 3) - oracle::kron(oracle::kron(a, a), a)).norm() < 1e-12);
}

TEST_CASE("partial trace over either factor") {
  std::mt19937_64 rng(2);
  const SubsystemLayout layout({{"A", 2}, {"B", 3}});
  const ComplexMatrix m = oracle::random_hermitian(6, rng);
  const Reduced rb = partial_trace(m, layout, {"B"});
  const Reduced ra = partial_trace(m, layout, {"A"});
  CHECK((rb.matrix - oracle::trace_second(m, 2, 3)).norm() < 1e-13);
  CHECK((ra.matrix - oracle::trace_first(m, 2, 3)).norm() < 1e-13);
  CHECK(rb.layout.size() == 1);
  CHECK(rb.layout.factors()[0].label == "A");
  CHECK(std::abs(partial_trace(m, layout, {"A", "B"}).matrix(0, 0) - m.trace()) < 1e-13);
}

TEST_CASE("partial trace on a middle factor") {
  std::mt19937_64 rng(3);
  const SubsystemLayout layout({{"A", 2}, {"B", 2}, {"C", 2}});
  const ComplexMatrix a = oracle::random_state(2, rng), b = oracle::random_state(2, rng),
                      c = oracle::random_state(2, rng);
  const ComplexMatrix m = oracle::kron(oracle::kron(a, b), c);
  CHECK((partial_trace(m, layout, {"B"}).matrix - oracle::kron(a, c)).norm() < 1e-13);
}

TEST_CASE("trace-and-replace is an idempotent trace-preserving map") {
  std::mt19937_64 rng(4);
  const SubsystemLayout layout = SubsystemLayout::canonical(2, 2, 2);
  const ComplexMatrix m = oracle::random_hermitian(16, rng);
  const ComplexMatrix once = trace_and_replace(m, layout, {"O1", "I2"});
  CHECK(std::abs(once.trace() - m.trace()) < 1e-12);
  CHECK((trace_and_replace(once, layout, {"O1", "I2"}) - once).norm() < 1e-12);
  // Replacing the last factor equals tr_B(m) (x) I / d by direct construction.
  const ComplexMatrix last = trace_and_replace(m, layout, {"O2"});
  CHECK((last - oracle::kron(oracle::trace_second(m, 8, 2), ComplexMatrix::Identity(2, 2) / 2.0)).norm() < 1e-12);
}

TEST_CASE("superoperator words compose literals") {
  std::mt19937_64 rng(5);
  const SubsystemLayout layout = SubsystemLayout::canonical(2, 2, 2);
  const ComplexMatrix m = oracle::random_hermitian(16, rng);
  const SuperopWord w({Literal::replace({"O2"}), Literal::complement({"I1"})});
  const ComplexMatrix direct = trace_and_replace(m, layout, {"O2"}) -
                               trace_and_replace(trace_and_replace(m, layout, {"O2"}), layout, {"I1"});
  CHECK((apply_word(w, m, layout) - direct).norm() < 1e-12);
  CHECK_THROWS_AS(SuperopWord({Literal::replace({"O2"}), Literal::complement({"O2"})}), ContractError);
}

TEST_CASE("permutation operators") {
  const ComplexMatrix swap = permutation_operator(2, 3, {1, 0});
  CHECK((swap * swap - ComplexMatrix::Identity(9, 9)).norm() < 1e-14);
  std::mt19937_64 rng(6);
  const ComplexMatrix a = oracle::random_hermitian(3, rng), b = oracle::random_hermitian(3, rng);
  CHECK((swap * oracle::kron(a, b) * swap.adjoint() - oracle::kron(b, a)).norm() < 1e-13);
  const ComplexMatrix cyc = permutation_operator(3, 2, {1, 2, 0});
  CHECK((cyc.adjoint() * cyc - ComplexMatrix::Identity(8, 8)).norm() < 1e-14);
  const auto map = permutation_index_map(3, 2, {1, 2, 0});
  for (long k = 0; k < 8; ++k) CHECK(std::abs(cyc(map[k], k) - 1.0) < 1e-14);
}

TEST_CASE("layout errors") {
  const SubsystemLayout layout = SubsystemLayout::canonical(1, 2, 2);
  CHECK(layout.total_dim() == 4);
  CHECK_THROWS_AS(layout.index_of("O7"), DimensionError);
  CHECK_THROWS_AS(SubsystemLayout({{"A", 2}, {"A", 2}}), DimensionError);
  CHECK_THROWS_AS(partial_trace(ComplexMatrix::Identity(3, 3), layout, {"I1"}), DimensionError);
}

TEST_CASE("spectral helpers") {
  ComplexMatrix m = ComplexMatrix::Identity(3, 3);
  m(2, 2) = -0.5;
  CHECK(is_hermitian(m));
  CHECK_FALSE(is_psd(m));
  CHECK(min_eigenvalue(m) == doctest::Approx(-0.5));
  const ComplexMatrix r = random_hermitian(5, 9);
  CHECK(is_hermitian(r, 1e-14));
  CHECK((r - random_hermitian(5, 9)).norm() == 0.0);
}
