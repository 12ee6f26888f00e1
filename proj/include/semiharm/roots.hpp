#pragma once

#include <span>
#include <vector>

#include "semiharm/types.hpp"

namespace semiharm {

struct RootSolverOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;
};

/// Roots of the monic polynomial w^k + c[k-1] w^(k-1) + ... + c[0], with repetition,
/// in lexicographic (Re, Im) order.
///
/// Simultaneous (Durand-Kerner) iteration seeded on a perturbed circle, or on `seeds`
/// when given (warm start along a path). Falls back to companion-matrix eigenvalues
/// if the iteration does not settle; throws SolverDivergence if that fails too.
std::vector<cplx> monic_roots(std::span<const cplx> c, std::span<const cplx> seeds = {},
                              const RootSolverOptions& opts = {});

/// Companion-matrix eigenvalues, Newton-polished. Exposed for the fallback path and tests.
std::vector<cplx> companion_roots(std::span<const cplx> c);

/// Horner evaluation of the monic polynomial.
cplx monic_eval(std::span<const cplx> c, cplx w);

void sort_lexicographic(std::vector<cplx>& roots);

}  // namespace semiharm
