/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <array>

#include <doctest.h>

#include "../oracles.hpp"
#include "qtb/bounds.hpp"

using namespace qtb;

namespace {

std::array<double, 3> random_theta(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("Choi operator matches the column-wise construction") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    const auto th = random_theta(rng);
    const double gamma = 0.2 * rep;
    const auto fam = magnetic_field_family(0.7, gamma);
    const KrausPoint kp = fam.at(th);
    const ChoiOperator e = choi_from_kraus(kp.channel);
    CHECK((e.matrix - oracle::choi(oracle::field_kraus(th.data(), 0.7, gamma))).norm() < 1e-12);
  }
}

TEST_CASE("Choi marginals of CPTP maps") {
  std::mt19937_64 rng(12);
  for (double gamma : {0.0, 0.3, 0.9}) {
    const auto th = random_theta(rng);
    const ChoiOperator e = choi_from_kraus(magnetic_field_family(1.3, gamma).at(th).channel);
    CHECK(e.marginal_residual() < 1e-12);
    CHECK((oracle::trace_second(e.matrix, 2, 2) - ComplexMatrix::Identity(2, 2)).norm() < 1e-12);
    CHECK(oracle::min_eig(e.matrix) > -1e-12);
    const ChoiWithDerivatives c2 = choi_n_fold(e, {}, 2);
    CHECK(c2.choi.marginal_residual() < 1e-12);
    CHECK(std::abs(c2.choi.matrix.trace().real() - 4.0) < 1e-12);
  }
}

TEST_CASE("n-fold Choi operator is the ordered tensor power") {
  std::mt19937_64 rng(13);
  const auto th = random_theta(rng);
  const ChoiOperator e = choi_from_kraus(magnetic_field_family(0.5, 0.4).at(th).channel);
  const ChoiWithDerivatives c = choi_n_fold(e, {}, 2);
  CHECK((c.choi.matrix - oracle::kron(e.matrix, e.matrix)).norm() < 1e-12);
  CHECK(c.choi.layout == SubsystemLayout::canonical(2, 2, 2));
}

TEST_CASE("process derivatives agree with central differences over 20 random points") {
  std::mt19937_64 rng(14);
  const auto fam = magnetic_field_family(0.9, 0.35);
  const double h = 1e-5;
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto th = random_theta(rng);
    const ProcessData pd = process_data(fam, th, 2);
    for (int j = 0; j < 3; ++j) {
      auto plus = th, minus = th;
      plus[j] += h;
      minus[j] -= h;
      const oracle::CMat ep = oracle::choi(oracle::field_kraus(plus.data(), 0.9, 0.35));
      const oracle::CMat em = oracle::choi(oracle::field_kraus(minus.data(), 0.9, 0.35));
      const oracle::CMat fd = (oracle::kron(ep, ep) - oracle::kron(em, em)) / (2.0 * h);
      worst = std::max(worst, (pd.dc[j] - fd).norm() / std::max(1e-3, fd.norm()));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("Frechet derivative of the evolution operator") {
  std::mt19937_64 rng(15);
  const oracle::CMat hm = oracle::random_hermitian(3, rng), dm = oracle::random_hermitian(3, rng);
  const double t = 0.8, eps = 1e-6;
  const oracle::CMat fd = ((oracle::cplx(0, -t) * (hm + eps * dm)).exp() - (oracle::cplx(0, -t) * (hm - eps * dm)).exp()) / (2 * eps);
  CHECK((frechet_exp_derivative(hm, dm, t) - fd).norm() < 1e-8);
  CHECK((unitary_evolution(hm, t) - (oracle::cplx(0, -t) * hm).exp()).norm() < 1e-12);
}

TEST_CASE("degenerate generators keep finite derivatives") {
  // theta = 0 makes the Hamiltonian vanish; divided differences fall back to the derivative limit.
  const std::array<double, 3> zero{0.0, 0.0, 0.0};
  const ProcessData pd = process_data(magnetic_field_family(1.0, 0.0), zero, 1);
  for (const auto& d : pd.dc) CHECK(d.allFinite());
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    std::array<double, 3> p = zero, m = zero;
    p[j] = h;
    m[j] = -h;
    const oracle::CMat fd = (oracle::choi(oracle::field_kraus(p.data(), 1.0, 0.0)) -
                             oracle::choi(oracle::field_kraus(m.data(), 1.0, 0.0))) / (2 * h);
    CHECK((pd.dc[j] - fd).norm() < 1e-6);
  }
}

TEST_CASE("Kraus completeness is enforced") {
  KrausChannel bad;
  bad.d_in = bad.d_out = 2;
  bad.kraus = {ComplexMatrix::Identity(2, 2) * 0.9};
  CHECK(bad.completeness_residual() > 0.1);
  CHECK_THROWS_AS(bad.check_complete(), ContractError);
}

TEST_CASE("channel from JSON text") {
  // Dephasing channel with one derivative direction.
  const std::string text = R"({"d_in": 2, "d_out": 2,
    "kraus": [[[0.8,0],[0,0],[0,0],[0.8,0]], [[0.6,0],[0,0],[0,0],[-0.6,0]]],
    "derivatives": [[[[0,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[0,0]]]]})";
  const ParamChannelFamily fam = channel_from_json_text(text);
  CHECK(fam.num_params == 1);
  const double th[1] = {0.0};
  const KrausPoint kp = fam.at(th);
  CHECK(kp.channel.completeness_residual() < 1e-14);
  CHECK_THROWS(channel_from_json_text(R"({"d_in": 2, "d_out": 2, "kraus": [[[0.5,0],[0,0],[0,0],[0.5,0]]]})"));
}
