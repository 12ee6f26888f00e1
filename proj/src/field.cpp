#include "semiharm/field.hpp"

#include "semiharm/expr.hpp"

namespace semiharm {

ScalarField::ScalarField(std::string label, EvalFn eval, PartialsFn partials, double fd_step)
    : label_(std::move(label)), eval_(std::move(eval)), partials_(std::move(partials)), fd_step_(fd_step) {}

ScalarField ScalarField::from_expression(const std::string& text, int m, std::string label) {
  auto prog = std::make_shared<const FieldProgram>(FieldProgram::parse(text, m));
  return ScalarField(
      label.empty() ? text : std::move(label),
      [prog](const BasePoint& z, cplx w) { return prog->eval(z, w); },
      [prog](const Chart& c) { return prog->eval_dual(c.z, c.w, c.dw).d; });
}

ScalarField ScalarField::constant(cplx c) {
  return ScalarField(format_complex(c), [c](const BasePoint&, cplx) { return c; },
                     [](const Chart&) { return Gradient{}; });
}

ScalarField ScalarField::pullback(std::string label, std::function<cplx(const BasePoint&)> g,
                                  std::function<Gradient(const BasePoint&)> dg) {
  PartialsFn partials;
  if (dg) partials = [dg](const Chart& c) { return dg(c.z); };
  return ScalarField(std::move(label), [g](const BasePoint& z, cplx) { return g(z); }, std::move(partials));
}

ScalarField ScalarField::norm2_from(const BasePoint& a, int m) {
  return pullback(
      "||p - a||^2", [a, m](const BasePoint& z) { return cplx(norm2({z[0] - a[0], z[1] - a[1]}, m)); },
      [a, m](const BasePoint& z) {
        Gradient g{};
        for (int j = 0; j < m; ++j) {
          g[2 * j] = 2.0 * (z[j] - a[j]).real();
          g[2 * j + 1] = 2.0 * (z[j] - a[j]).imag();
        }
        return g;
      });
}

ScalarField ScalarField::scaled(cplx lambda) const {
  auto f = eval_;
  PartialsFn p;
  if (partials_)
    p = [q = partials_, lambda](const Chart& c) {
      Gradient g = q(c);
      for (auto& x : g) x *= lambda;
      return g;
    };
  return ScalarField(format_complex(lambda) + "*(" + label_ + ")",
                     [f, lambda](const BasePoint& z, cplx w) { return lambda * f(z, w); }, std::move(p), fd_step_);
}

ScalarField ScalarField::shifted(cplx c) const {
  auto f = eval_;
  return ScalarField("(" + label_ + ")+" + format_complex(c),
                     [f, c](const BasePoint& z, cplx w) { return f(z, w) + c; }, partials_, fd_step_);
}

ScalarField ScalarField::without_partials() const { return ScalarField(label_, eval_, {}, fd_step_); }

DefiningFunction DefiningFunction::sphere(const BasePoint& center, double r, int m) {
  ScalarField n2 = ScalarField::norm2_from(center, m);
  return {ScalarField("||p - c||^2 - r^2", [n2, r](const BasePoint& z, cplx w) { return n2(z, w) - r * r; },
                      [n2](const Chart& c) { return n2.partials(c); })};
}

}  // namespace semiharm
