#pragma once

#include <span>

#include "semiharm/covering.hpp"
#include "semiharm/field.hpp"

namespace semiharm {

/// Chart at a regular point: holomorphic slope of the sheet through (z, w).
Chart chart_at(const CoveringMap& cov, const BasePoint& z, cplx w);

/// Real partials (d/dx1, d/dy1, ...) of f at x. Uses analytic partials when the field has
/// them, else centered differences with branch continuation.
Gradient gradient(const CoveringMap& cov, const ScalarField& f, const CoverPoint& x);
/// Same, with the full fiber over z already known (saves a root solve inside loops).
Gradient gradient_at(const CoveringMap& cov, const ScalarField& f, const BasePoint& z, cplx w,
                     std::span<const cplx> fiber);
/// Centered differences regardless of analytic partials.
Gradient fd_gradient(const CoveringMap& cov, const ScalarField& f, const BasePoint& z, cplx w,
                     std::span<const cplx> fiber);

/// Pulled-back Euclidean Laplacian by second differences with one Richardson step
/// (h = 1e-3 * base radius and h/2).
cplx laplacian(const CoveringMap& cov, const ScalarField& f, const BasePoint& z, cplx w,
               std::span<const cplx> fiber);
cplx laplacian(const CoveringMap& cov, const ScalarField& f, const CoverPoint& x);

/// d/dp_j and d/dp_j-bar from real partials.
cplx wirtinger(const Gradient& g, int j);
cplx wirtinger_bar(const Gradient& g, int j);

/// Sum over j of (x_j - a_j) df/dx_j + (y_j - a_j) df/dy_j, divided by ||p(x) - p(a)||.
cplx radial_derivative(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, const CoverPoint& x);
cplx radial_derivative(const Gradient& g, const BasePoint& a, const BasePoint& z, int m);

/// E_g f = 2 sum g_{pbar_k} f_{p_k}.
cplx euler_apply(const CoveringMap& cov, const ScalarField& g, const ScalarField& f, const CoverPoint& x);
/// Ebar_g f = 2 sum g_{p_k} f_{pbar_k}.
cplx euler_bar_apply(const CoveringMap& cov, const ScalarField& g, const ScalarField& f, const CoverPoint& x);
/// d_{grad g} f = sum g_x f_x + g_y f_y (no conjugation).
cplx directional_gradient(const CoveringMap& cov, const ScalarField& g, const ScalarField& f, const CoverPoint& x);
cplx directional_gradient(const Gradient& g, const Gradient& f, int m);
/// nabla_k g applied to f: 2 (g_{p_k} f_{pbar_k} + g_{pbar_k} f_{p_k}).
cplx partial_gradient(const CoveringMap& cov, const ScalarField& g, const ScalarField& f, int k, const CoverPoint& x);

/// sum (p_j - a_j) df/dp_j.
cplx euler_d_apply(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, const CoverPoint& x);
/// sum (pbar_j - abar_j) df/dpbar_j.
cplx euler_dbar_apply(const CoveringMap& cov, const ScalarField& f, const CoverPoint& a, const CoverPoint& x);

/// 2 sum rho_j df/dpbar_j with rho_j = (d rho/d p_j) / ||grad rho||, at a boundary point.
cplx dbar_neumann(const CoveringMap& cov, const ScalarField& f, const DefiningFunction& rho, const CoverPoint& x);
/// grad f . grad rho / ||grad rho||, at a boundary point.
cplx normal_derivative(const CoveringMap& cov, const ScalarField& f, const DefiningFunction& rho,
                       const CoverPoint& x);

/// Largest relative gap between analytic partials and centered differences over `samples`
/// seeded random regular points of the base ball. Zero if f has no analytic partials.
double validate_partials(const CoveringMap& cov, const ScalarField& f, int samples = 20);

}  // namespace semiharm
