#include "reachdec/error.hpp"
#include "reachdec/oracle.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>

namespace reachdec {

std::vector<Vector> simulate(const ContinuousSystem& sys, const Vector& x0, const Vector& u,
                             const std::vector<double>& times) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;

  const int n = sys.dim();
  if (x0.size() != n) throw Error("oracle", "dimension", "initial state has the wrong dimension");
  if (u.size() != sys.input_dim()) throw Error("oracle", "dimension", "input vector has the wrong dimension");
  const double slack = 1e-9 * (1.0 + x0.cwiseAbs().maxCoeff());
  if (!satisfies_supports(sys.x0, x0, Matrix(n, 0), slack)) {
    throw Error("oracle", "input", "initial state is outside X0");
  }
  if (!satisfies_supports(sys.u.at(0), u, Matrix(u.size(), 0), 1e-9 * (1.0 + u.cwiseAbs().maxCoeff()))) {
    throw Error("oracle", "input", "input is outside U");
  }
  if (times.empty()) return {};
  if (times.front() < 0.0 || !std::is_sorted(times.begin(), times.end())) {
    throw Error("oracle", "invalid", "simulation times must be nonnegative and increasing");
  }

  const Vector bu = sys.b ? sys.b->apply(u) : u;
  auto rhs = [&](const State& x, State& dx, double /*t*/) {
    const Vector dxv = sys.a.apply(Eigen::Map<const Vector>(x.data(), n)) + bu;
    std::copy(dxv.data(), dxv.data() + n, dx.begin());
  };

  std::vector<Vector> out;
  out.reserve(times.size());
  std::vector<double> grid;
  grid.reserve(times.size() + 1);
  if (times.front() > 0.0) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());
  const std::size_t skip = grid.size() - times.size();
  std::size_t seen = 0;
  auto observer = [&](const State& x, double /*t*/) {
    if (seen++ >= skip) out.emplace_back(Eigen::Map<const Vector>(x.data(), n));
  };

  State x(x0.data(), x0.data() + n);
  auto stepper = odeint::make_dense_output(1e-10, 1e-10, odeint::runge_kutta_dopri5<State>());
  const double span = grid.back() - grid.front();
  const double dt = span > 0.0 ? span / 1000.0 : 1e-3;
  odeint::integrate_times(stepper, rhs, x, grid.begin(), grid.end(), dt, observer);
  if (out.size() != times.size()) throw Error("oracle", "nonconvergence", "integrator returned too few states");
  for (const auto& s : out) {
    if (!s.allFinite()) throw Error("oracle", "nonfinite", "trajectory diverged");
  }
  return out;
}

}  // namespace reachdec
