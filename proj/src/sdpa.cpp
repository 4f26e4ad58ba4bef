/*
 * Copyright 2026 The tester-bounds authors.
 *
 * Licensed under the Apache License, Version 2.0. See the LICENSE file in the
 * root directory of this source tree or http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <iomanip>
#include <ostream>

#include "qtb/conic.hpp"
#include "qtb/ipm.hpp"

namespace qtb {

void write_sdpa(const ConicProgram& p, std::ostream& os) {
  const ConicProgram q = real_embed(p);
  const sdp::LoweredProgram low = sdp::lower_program(q);
  const sdp::SdpData& d = low.data;

  os << "* tester-bounds SDPA export: max <F0, Y> s.t. <F_i, Y> = c_i, Y >= 0\n";
  os << "* F0 is the negated objective; optimum equals minus the program objective\n";
  for (std::size_t v = 0; v < q.variables().size(); ++v) {
    os << "* variable " << q.variables()[v].name << " ->";
    for (const auto& [blk, sgn] : low.var_blocks[v]) os << " block " << blk + 1 << (sgn < 0 ? " (-)" : "");
    os << '\n';
  }
  os << d.num_rows() << "\n" << d.blocks.size() << "\n";
  for (std::size_t b = 0; b < d.blocks.size(); ++b) os << (b ? " " : "") << d.blocks[b].dim;
  os << "\n" << std::setprecision(17);
  for (int k = 0; k < d.num_rows(); ++k) os << (k ? " " : "") << d.b(k);
  os << "\n";
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    const RealMatrix& c = d.blocks[b].c;
    for (long j = 0; j < c.cols(); ++j)
      for (long i = 0; i <= j; ++i)
        if (c(i, j) != 0.0) os << 0 << ' ' << b + 1 << ' ' << i + 1 << ' ' << j + 1 << ' ' << -c(i, j) << '\n';
  }
  for (std::size_t b = 0; b < d.blocks.size(); ++b)
    for (const auto& t : d.blocks[b].terms) {
      const auto& a = d.coeffs[t.coeff];
      for (std::size_t e = 0; e < a.vals.size(); ++e)
        if (a.rows[e] <= a.cols[e])
          os << t.row + 1 << ' ' << b + 1 << ' ' << a.rows[e] + 1 << ' ' << a.cols[e] + 1 << ' '
             << t.scale * a.vals[e] << '\n';
    }
}

}  // namespace qtb
