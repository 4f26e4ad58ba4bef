/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qtb/tensor.hpp"

namespace qtb {

/// Channel in Kraus form, rho -> sum_l K_l rho K_l^dagger. Each K_l is d_out x d_in.
struct KrausChannel {
  std::vector<ComplexMatrix> kraus;
  int d_in = 0;
  int d_out = 0;

  /// Frobenius norm of sum_l K_l^dagger K_l - I.
  double completeness_residual() const;
  /// Throws ContractError when the residual exceeds `tol`.
  void check_complete(double tol = 1e-10) const;
};

/// A channel together with the derivatives of its Kraus operators at one parameter point.
/// derivatives[j][l] = d K_l / d theta_j.
struct KrausPoint {
  KrausChannel channel;
  std::vector<std::vector<ComplexMatrix>> derivatives;
};

/// theta -> (Kraus operators, their parameter derivatives).
struct ParamChannelFamily {
  std::string name;
  int num_params = 0;
  std::function<KrausPoint(std::span<const double>)> builder;

  KrausPoint at(std::span<const double> theta) const;
};

/// Choi-Jamiolkowski operator with its factor layout.
struct ChoiOperator {
  ComplexMatrix matrix;
  SubsystemLayout layout;

  /// Labels of all output factors (those starting with 'O').
  LabelSet output_labels() const;
  /// || tr_O(E) - I_in ||_F.
  double marginal_residual() const;
};

struct ChoiWithDerivatives {
  ChoiOperator choi;
  std::vector<ComplexMatrix> derivatives;  // one Hermitian matrix per parameter
};

/// E = sum_l |K_l>><<K_l| with |K>> = sum_j |j> (x) K|j>, factor order (I, O).
ChoiOperator choi_from_kraus(const KrausChannel& ch);

ChoiWithDerivatives choi_derivatives(const ParamChannelFamily& fam, std::span<const double> theta);

/// C = E^{(x)n} on I_1,O_1,...,I_n,O_n with the product-rule derivatives.
ChoiWithDerivatives choi_n_fold(const ChoiOperator& e, const std::vector<ComplexMatrix>& de, int n);

/// Derivative of exp(-i h t) in direction d (divided-difference formula).
ComplexMatrix frechet_exp_derivative(const ComplexMatrix& h, const ComplexMatrix& d, double t);

/// exp(-i h t) for Hermitian h.
ComplexMatrix unitary_evolution(const ComplexMatrix& h, double t);

ComplexMatrix pauli(int k);  // k = 0 (identity), 1, 2, 3

/// H = sum_j theta_j G_j, U = exp(-iHt), followed by amplitude damping of strength gamma.
ParamChannelFamily hamiltonian_family(std::vector<ComplexMatrix> generators, double t, double gamma,
                                      std::string name = "hamiltonian");

/// Qubit rotation family H = theta_1 s1 + theta_2 s2 + theta_3 s3 with amplitude damping.
ParamChannelFamily magnetic_field_family(double t, double gamma);

/// Fixed channel read from JSON: Kraus matrices and per-parameter derivative Kraus matrices,
/// each a flat row-major list of [re, im] pairs. The family ignores theta.
ParamChannelFamily load_channel_json(const std::string& path);
ParamChannelFamily channel_from_json_text(const std::string& text);

}  // namespace qtb
