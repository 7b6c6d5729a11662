#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wkam/grid.hpp"
#include "wkam/measures.hpp"

namespace wkam {

using ScalarField = std::function<double(const Point&)>;

/// Potential g(x) together with what the couplings need to know about it.
struct Potential {
  std::string kind;
  ScalarField eval;
  double sup_abs = 0.0;
};

/// g(x) = sum_a sin^2(pi x_a). Single well at the origin.
Potential sin2pi_potential();
/// g(x) = sum_a (1 - cos(4 pi x_a)) / 2. Wells at 0 and 1/2 on each axis.
Potential twowell_potential();
/// Nearest-grid-point lookup into tabulated values.
Potential table_potential(const TorusGrid& grid, std::vector<double> values);
Potential constant_potential(double value);
Potential shifted(Potential base, double offset);

/// Tonelli Lagrangian L(x, v) with its partial gradients.
class LagrangianModel {
 public:
  using Eval = std::function<double(const Point& x, const Point& v)>;
  using Gradient = std::function<Point(const Point& x, const Point& v)>;

  LagrangianModel(std::string name, int dim, Eval eval, Gradient grad_v, Gradient grad_x);

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }
  double eval(const Point& x, const Point& v) const { return eval_(x, v); }
  double operator()(const Point& x, const Point& v) const { return eval_(x, v); }
  Point grad_v(const Point& x, const Point& v) const { return grad_v_(x, v); }
  Point grad_x(const Point& x, const Point& v) const { return grad_x_(x, v); }

 private:
  std::string name_;
  int dim_;
  Eval eval_;
  Gradient grad_v_;
  Gradient grad_x_;
};

/// L(x, v) = |v|^2 / 2.
LagrangianModel quadratic_lagrangian(int dim);
/// L(x, v) = |v|^2 / 2 + V(x).
LagrangianModel mechanical_lagrangian(int dim, Potential potential);

/// Mean-field coupling F(x, m) with its declared bounds.
class CouplingModel {
 public:
  using Eval = std::function<double(const Point& x, const GridMeasure& m)>;

  CouplingModel(std::string name, Eval eval, double lipschitz_in_m, double sup_bound);

  const std::string& name() const noexcept { return name_; }
  double eval(const Point& x, const GridMeasure& m) const { return eval_(x, m); }
  double lipschitz_in_m() const noexcept { return lipschitz_; }
  double sup_bound() const noexcept { return sup_; }
  bool depends_on_measure() const noexcept { return lipschitz_ > 0.0; }

 private:
  std::string name_;
  Eval eval_;
  double lipschitz_;
  double sup_;
};

/// F(x, m) = f + g(x); independent of m.
CouplingModel additive_coupling(double f_const, Potential g);

/// F(x, m) = g(x) + eps * sum_y k(x - y) m(y), k(z) = mean_a cos(2 pi z_a).
/// Declared Lip(F) = 2 pi |eps|.
CouplingModel convolution_coupling(Potential g, double eps);

/// L_m(x, v) = L(x, v) + F(x, m) with m frozen at construction.
class EffectiveLagrangian {
 public:
  EffectiveLagrangian(LagrangianModel base, CouplingModel coupling, GridMeasure measure);

  const LagrangianModel& base() const noexcept { return base_; }
  const CouplingModel& coupling() const noexcept { return coupling_; }
  const GridMeasure& measure() const noexcept { return measure_; }
  int dim() const noexcept { return base_.dim(); }

  double potential(const Point& x) const { return coupling_.eval(x, measure_); }
  double eval(const Point& x, const Point& v) const { return base_.eval(x, v) + coupling_.eval(x, measure_); }
  double operator()(const Point& x, const Point& v) const { return eval(x, v); }

 private:
  LagrangianModel base_;
  CouplingModel coupling_;
  GridMeasure measure_;
};

/// H(x, p) = max over the uniform lattice [-vmax, vmax]^d (nv points per
/// axis) of <p, v> - L(x, v).
double legendre_hamiltonian(const LagrangianModel& lagrangian, const Point& x, const Point& p, double vmax, int nv);

/// Lattice maximizer of <p, v> - L(x, v); ties go to the first lattice point.
Point legendre_maximizer(const LagrangianModel& lagrangian, const Point& x, const Point& p, double vmax, int nv);

/// The example family H = |p|^2 / 2, F(x, m) = f + g(x).
std::pair<LagrangianModel, CouplingModel> appendix_b_model(int dim, double f_const, Potential g);

}  // namespace wkam
