/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "qtb/channels.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace qtb {

double KrausChannel::completeness_residual() const {
  ComplexMatrix acc = ComplexMatrix::Zero(d_in, d_in);
  for (const auto& k : kraus) acc += k.adjoint() * k;
  return (acc - ComplexMatrix::Identity(d_in, d_in)).norm();
}

void KrausChannel::check_complete(double tol) const {
  for (const auto& k : kraus)
    if (k.rows() != d_out || k.cols() != d_in)
      throw DimensionError("Kraus operator shape does not match (d_out, d_in)");
  const double r = completeness_residual();
  if (!(r <= tol)) {
    std::ostringstream os;
    os << "Kraus operators are not trace preserving: ||sum K^dag K - I||_F = " << r;
    throw ContractError(os.str());
  }
}

KrausPoint ParamChannelFamily::at(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != num_params)
    throw DimensionError("family '" + name + "' expects " + std::to_string(num_params) +
                         " parameters, got " + std::to_string(theta.size()));
  return builder(theta);
}

LabelSet ChoiOperator::output_labels() const {
  LabelSet out;
  for (const auto& f : layout.factors())
    if (!f.label.empty() && f.label[0] == 'O') out.insert(f.label);
  return out;
}

double ChoiOperator::marginal_residual() const {
  const auto red = partial_trace(matrix, layout, output_labels());
  return (red.matrix - ComplexMatrix::Identity(red.matrix.rows(), red.matrix.cols())).norm();
}

namespace {

// |K>> as a vector on (I, O): component (j, o) = K(o, j).
Eigen::VectorXcd vectorize(const ComplexMatrix& k) {
  const long d_out = k.rows(), d_in = k.cols();
  Eigen::VectorXcd v(d_in * d_out);
  for (long j = 0; j < d_in; ++j)
    for (long o = 0; o < d_out; ++o) v(j * d_out + o) = k(o, j);
  return v;
}

}  // namespace

ChoiOperator choi_from_kraus(const KrausChannel& ch) {
  ch.check_complete();
  const long dim = static_cast<long>(ch.d_in) * ch.d_out;
  ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
  for (const auto& k : ch.kraus) {
    const Eigen::VectorXcd v = vectorize(k);
    e.noalias() += v * v.adjoint();
  }
  return {std::move(e), SubsystemLayout({{"I", ch.d_in}, {"O", ch.d_out}})};
}

ChoiWithDerivatives choi_derivatives(const ParamChannelFamily& fam, std::span<const double> theta) {
  const KrausPoint pt = fam.at(theta);
  ChoiWithDerivatives out{choi_from_kraus(pt.channel), {}};
  if (static_cast<int>(pt.derivatives.size()) != fam.num_params)
    throw DimensionError("family '" + fam.name + "' returned the wrong number of derivative sets");
  const long dim = out.choi.matrix.rows();
  for (const auto& dk : pt.derivatives) {
    if (dk.size() != pt.channel.kraus.size())
      throw DimensionError("derivative Kraus list does not match the Kraus list");
    ComplexMatrix de = ComplexMatrix::Zero(dim, dim);
    for (std::size_t l = 0; l < dk.size(); ++l) {
      const Eigen::VectorXcd v = vectorize(pt.channel.kraus[l]);
      const Eigen::VectorXcd dv = vectorize(dk[l]);
      de.noalias() += dv * v.adjoint();
    }
    out.derivatives.push_back(de + de.adjoint().eval());
  }
  return out;
}

ChoiWithDerivatives choi_n_fold(const ChoiOperator& e, const std::vector<ComplexMatrix>& de, int n) {
  if (n < 1) throw ContractError("number of channel uses must be at least 1");
  if (e.layout.size() != 2) throw DimensionError("single-use Choi operator expected on (I, O)");
  const int d_in = e.layout.factors()[0].dim, d_out = e.layout.factors()[1].dim;

  // powers[k] = E^{(x)k}
  std::vector<ComplexMatrix> powers{ComplexMatrix::Identity(1, 1)};
  for (int k = 1; k <= n; ++k) powers.push_back(kron(powers.back(), e.matrix));

  ChoiWithDerivatives out{{powers[n], SubsystemLayout::canonical(n, d_in, d_out)}, {}};
  for (const auto& dej : de) {
    ComplexMatrix acc = ComplexMatrix::Zero(powers[n].rows(), powers[n].cols());
    for (int k = 1; k <= n; ++k) acc += kron(kron(powers[k - 1], dej), powers[n - k]);
    out.derivatives.push_back(std::move(acc));
  }
  return out;
}

ComplexMatrix unitary_evolution(const ComplexMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  const auto& lam = es.eigenvalues();
  Eigen::VectorXcd phase(lam.size());
  for (Eigen::Index a = 0; a < lam.size(); ++a) phase(a) = std::exp(cplx(0.0, -lam(a) * t));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix frechet_exp_derivative(const ComplexMatrix& h, const ComplexMatrix& d, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  const ComplexMatrix& v = es.eigenvectors();
  const auto& lam = es.eigenvalues();
  const long n = lam.size();
  ComplexMatrix m = v.adjoint() * d * v;
  for (long b = 0; b < n; ++b)
    for (long a = 0; a < n; ++a) {
      const cplx ea = std::exp(cplx(0.0, -lam(a) * t));
      cplx phi;
      if (std::abs(lam(a) - lam(b)) < 1e-10)
        phi = cplx(0.0, -t) * ea;
      else
        phi = (ea - std::exp(cplx(0.0, -lam(b) * t))) / (lam(a) - lam(b));
      m(a, b) *= phi;
    }
  return v * m * v.adjoint();
}

ComplexMatrix pauli(int k) {
  ComplexMatrix s(2, 2);
  switch (k) {
    case 0: s << 1, 0, 0, 1; break;
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: throw std::out_of_range("pauli index must be 0..3");
  }
  return s;
}

ParamChannelFamily hamiltonian_family(std::vector<ComplexMatrix> generators, double t, double gamma,
                                      std::string name) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ContractError("damping strength must lie in [0, 1]");
  if (!(t > 0.0)) throw ContractError("evolution time must be positive");
  if (generators.empty()) throw ContractError("at least one generator is required");
  const long d = generators.front().rows();
  for (const auto& g : generators)
    if (g.rows() != d || g.cols() != d || !is_hermitian(g, 1e-12))
      throw ContractError("generators must be Hermitian and share one dimension");
  if (d != 2 && gamma != 0.0) throw ContractError("amplitude damping is defined for qubits only");

  std::vector<ComplexMatrix> noise;
  if (d == 2) {
    ComplexMatrix k1 = ComplexMatrix::Zero(2, 2), k2 = ComplexMatrix::Zero(2, 2);
    k1(0, 0) = 1.0;
    k1(1, 1) = std::sqrt(1.0 - gamma);
    k2(0, 1) = std::sqrt(gamma);
    noise = {k1, k2};  // K2 stays as an explicit zero matrix when gamma = 0
  } else {
    noise = {ComplexMatrix::Identity(d, d)};
  }

  ParamChannelFamily fam;
  fam.name = std::move(name);
  fam.num_params = static_cast<int>(generators.size());
  fam.builder = [generators = std::move(generators), noise = std::move(noise), t,
                 d](std::span<const double> theta) {
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j < theta.size(); ++j) h += theta[j] * generators[j];
    const ComplexMatrix u = unitary_evolution(h, t);
    KrausPoint pt;
    pt.channel.d_in = pt.channel.d_out = static_cast<int>(d);
    for (const auto& k : noise) pt.channel.kraus.push_back(k * u);
    for (const auto& g : generators) {
      const ComplexMatrix du = frechet_exp_derivative(h, g, t);
      std::vector<ComplexMatrix> dk;
      for (const auto& k : noise) dk.push_back(k * du);
      pt.derivatives.push_back(std::move(dk));
    }
    return pt;
  };
  return fam;
}

ParamChannelFamily magnetic_field_family(double t, double gamma) {
  return hamiltonian_family({pauli(1), pauli(2), pauli(3)}, t, gamma, "magnetic_field");
}

// ---------------------------------------------------------------------------
// JSON channel description

namespace {

ComplexMatrix matrix_from_pairs(const nlohmann::json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    throw DimensionError("expected " + std::to_string(rows * cols) + " [re, im] pairs");
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const auto& e = j[r * cols + c];
      if (!e.is_array() || e.size() != 2) throw DimensionError("matrix entries must be [re, im] pairs");
      m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  return m;
}

}  // namespace

ParamChannelFamily channel_from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int d_in = j.at("d_in").get<int>();
  const int d_out = j.at("d_out").get<int>();
  KrausPoint pt;
  pt.channel.d_in = d_in;
  pt.channel.d_out = d_out;
  for (const auto& k : j.at("kraus")) pt.channel.kraus.push_back(matrix_from_pairs(k, d_out, d_in));
  for (const auto& per_param : j.at("derivatives")) {
    std::vector<ComplexMatrix> dk;
    for (const auto& k : per_param) dk.push_back(matrix_from_pairs(k, d_out, d_in));
    if (dk.size() != pt.channel.kraus.size())
      throw DimensionError("each derivative set must list one matrix per Kraus operator");
    pt.derivatives.push_back(std::move(dk));
  }
  pt.channel.check_complete();

  ParamChannelFamily fam;
  fam.name = j.value("name", std::string("custom"));
  fam.num_params = static_cast<int>(pt.derivatives.size());
  if (fam.num_params < 1) throw ContractError("custom channel lists no parameter derivatives");
  fam.builder = [pt](std::span<const double>) { return pt; };
  return fam;
}

ParamChannelFamily load_channel_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open channel file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return channel_from_json_text(ss.str());
}

}  // namespace qtb
