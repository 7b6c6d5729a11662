#include "wkam/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wkam/errors.hpp"

namespace wkam {

namespace {

constexpr double kPi = std::numbers::pi;

// Potentials below are written for d <= 2 and read x[1] == 0 when d == 1,
// which contributes nothing to the sums.

Point zero_gradient(const Point&, const Point&) { return {0.0, 0.0}; }

template <typename Fn>
void for_each_lattice_point(int dim, double vmax, int nv, Fn&& fn) {
  const double step = 2.0 * vmax / (nv - 1);
  if (dim == 1) {
    for (int i = 0; i < nv; ++i) fn(Point{-vmax + i * step, 0.0});
  } else {
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) fn(Point{-vmax + i * step, -vmax + j * step});
  }
}

}  // namespace

Potential sin2pi_potential() {
  return {"sin2pi",
          [](const Point& x) {
            const double a = std::sin(kPi * x[0]);
            const double b = std::sin(kPi * x[1]);
            return a * a + b * b;
          },
          2.0};
}

Potential twowell_potential() {
  return {"twowell",
          [](const Point& x) { return 0.5 * (1.0 - std::cos(4.0 * kPi * x[0])) + 0.5 * (1.0 - std::cos(4.0 * kPi * x[1])); },
          2.0};
}

Potential table_potential(const TorusGrid& grid, std::vector<double> values) {
  if (values.size() != grid.size()) throw ShapeError("table potential needs one value per grid point");
  double sup = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw EvaluationError("table potential contains a non-finite value");
    sup = std::max(sup, std::abs(v));
  }
  return {"table", [grid, values = std::move(values)](const Point& x) { return values[grid.nearest(x)]; }, sup};
}

Potential constant_potential(double value) {
  return {"constant", [value](const Point&) { return value; }, std::abs(value)};
}

Potential shifted(Potential base, double offset) {
  return {base.kind + "+shift", [f = base.eval, offset](const Point& x) { return f(x) + offset; },
          base.sup_abs + std::abs(offset)};
}

LagrangianModel::LagrangianModel(std::string name, int dim, Eval eval, Gradient grad_v, Gradient grad_x)
    : name_(std::move(name)), dim_(dim), eval_(std::move(eval)), grad_v_(std::move(grad_v)), grad_x_(std::move(grad_x)) {}

LagrangianModel quadratic_lagrangian(int dim) {
  return LagrangianModel(
      "quadratic", dim, [](const Point&, const Point& v) { return 0.5 * (v[0] * v[0] + v[1] * v[1]); },
      [](const Point&, const Point& v) { return v; }, zero_gradient);
}

LagrangianModel mechanical_lagrangian(int dim, Potential potential) {
  auto g = potential.eval;
  auto grad = [g](const Point& x, const Point&) {
    constexpr double step = 1e-6;
    Point out{0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
      Point lo = x, hi = x;
      lo[a] -= step;
      hi[a] += step;
      out[a] = (g(hi) - g(lo)) / (2.0 * step);
    }
    return out;
  };
  return LagrangianModel(
      "mechanical", dim, [g](const Point& x, const Point& v) { return 0.5 * (v[0] * v[0] + v[1] * v[1]) + g(x); },
      [](const Point&, const Point& v) { return v; }, grad);
}

CouplingModel::CouplingModel(std::string name, Eval eval, double lipschitz_in_m, double sup_bound)
    : name_(std::move(name)), eval_(std::move(eval)), lipschitz_(lipschitz_in_m), sup_(sup_bound) {
  if (lipschitz_in_m < 0.0 || sup_bound < 0.0) throw InvalidSpecError("coupling bounds must be nonnegative");
}

CouplingModel additive_coupling(double f_const, Potential g) {
  return CouplingModel(
      "additive", [f_const, fn = g.eval](const Point& x, const GridMeasure&) { return f_const + fn(x); }, 0.0,
      std::abs(f_const) + g.sup_abs);
}

CouplingModel convolution_coupling(Potential g, double eps) {
  auto eval = [eps, fn = g.eval](const Point& x, const GridMeasure& m) {
    const TorusGrid& grid = m.grid();
    const int dim = grid.dim();
    double conv = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0.0) continue;
      const Point y = grid.point(i);
      double k = 0.0;
      for (int a = 0; a < dim; ++a) k += std::cos(2.0 * kPi * (x[a] - y[a]));
      conv += m[i] * k / dim;
    }
    return fn(x) + eps * conv;
  };
  return CouplingModel("convolution", eval, 2.0 * kPi * std::abs(eps), g.sup_abs + std::abs(eps));
}

EffectiveLagrangian::EffectiveLagrangian(LagrangianModel base, CouplingModel coupling, GridMeasure measure)
    : base_(std::move(base)), coupling_(std::move(coupling)), measure_(std::move(measure)) {}

double legendre_hamiltonian(const LagrangianModel& lagrangian, const Point& x, const Point& p, double vmax, int nv) {
  const Point v = legendre_maximizer(lagrangian, x, p, vmax, nv);
  return p[0] * v[0] + p[1] * v[1] - lagrangian.eval(x, v);
}

Point legendre_maximizer(const LagrangianModel& lagrangian, const Point& x, const Point& p, double vmax, int nv) {
  if (nv < 3) throw InvalidSpecError("legendre transform needs nv >= 3");
  if (!(vmax > 0.0)) throw InvalidSpecError("legendre transform needs vmax > 0");
  double best = -std::numeric_limits<double>::infinity();
  Point arg{0.0, 0.0};
  for_each_lattice_point(lagrangian.dim(), vmax, nv, [&](const Point& v) {
    const double l = lagrangian.eval(x, v);
    if (!std::isfinite(l)) {
      std::ostringstream msg;
      msg << "Lagrangian is not finite at x=(" << x[0] << "," << x[1] << "), v=(" << v[0] << "," << v[1] << ")";
      throw EvaluationError(msg.str());
    }
    const double value = p[0] * v[0] + p[1] * v[1] - l;
    if (value > best) {
      best = value;
      arg = v;
    }
  });
  return arg;
}

std::pair<LagrangianModel, CouplingModel> appendix_b_model(int dim, double f_const, Potential g) {
  return {quadratic_lagrangian(dim), additive_coupling(f_const, std::move(g))};
}

}  // namespace wkam
