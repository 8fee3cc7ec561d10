#pragma once

#include "shellcir/core_model.hpp"

namespace shellcir::test {

// Small truncation for fast unit tests. The relative grid keeps origin
// layers so the a0 = 0.53 molecular state stays resolved.
inline Truncation small_truncation() {
  Truncation t;
  t.n_rel_max = 8;
  t.n_com_max = 8;
  t.l_max = 2;
  t.k_max = 4;
  t.rel_grid = GridSpec{12.0, 12, 8, 3};
  t.com_grid = GridSpec{0.0, 10, 8, 0};
  return t;
}

inline ModelParams params_at(double a0, double r0 = 0.0) {
  ModelParams p;
  p.scattering = ScatteringLength::from_length(a0);
  p.r0 = r0;
  return p;
}

}  // namespace shellcir::test
