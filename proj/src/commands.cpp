#include "reachdec/commands.hpp"

#include "reachdec/emit.hpp"
#include "reachdec/error.hpp"
#include "reachdec/matrix_market.hpp"
#include "reachdec/oracle.hpp"
#include "reachdec/property.hpp"
#include "reachdec/reach.hpp"
#include "reachdec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <new>
#include <ostream>
#include <random>
#include <sstream>

namespace reachdec {

namespace {

constexpr int kSphereDirections = 256;
constexpr int kRandomDirections = 256;
// Absolute slack for "empirical <= bound", covering roundoff in support sums.
constexpr double kBoundSlack = 1e-9;

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cli", "io", "cannot create '" + dir + "': " + ec.message());
  return std::filesystem::path(dir);
}

std::ofstream open_file(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error("cli", "io", "cannot write '" + path.string() + "'");
  return f;
}

std::string block_list(const std::vector<int>& blocks) {
  std::string s;
  for (std::size_t i = 0; i < blocks.size(); ++i) s += (i ? "," : "") + std::to_string(blocks[i] + 1);
  return s;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

void write_box_rows(std::ostream& out, const std::string& prefix, const LazySet& set) {
  const Hyperrectangle h = overapproximate_box(set);
  for (Eigen::Index i = 0; i < h.center().size(); ++i) {
    out << prefix << i + 1 << ',' << format_double(h.low()[i]) << ',' << format_double(h.high()[i]) << '\n';
  }
}

Matrix comparison_directions(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix a = sphere_directions(n, kSphereDirections);
  const Matrix b = random_directions(n, kRandomDirections, rng);
  Matrix d(n, a.cols() + b.cols());
  d << a, b;
  return d;
}

/// Per step, max over directions of (rho_tube - rho_oracle) / |l|_1, an
/// estimate of the inf-norm Hausdorff distance. Negative gaps mean the tube
/// misses reachable states.
std::vector<double> tube_gaps(const ReachTube& tube, const Matrix& oracle, const Matrix& dirs) {
  std::vector<double> gaps;
  for (int k = 0; k < tube.steps(); ++k) {
    const LazySet x = tube.product(k);
    double worst = 0.0;
    for (Eigen::Index c = 0; c < dirs.cols(); ++c) {
      const Vector d = dirs.col(c);
      const double mine = support_function(x, d);
      const double ref = oracle(k, c);
      const double gap = (mine - ref) / d.lpNorm<1>();
      if (gap < -1e-9 * (1.0 + std::abs(ref))) {
        throw Error("oracle", "containment",
                    "decomposed set misses the reference set at step " + std::to_string(k) + " by " + sci(-gap));
      }
      worst = std::max(worst, gap);
    }
    gaps.push_back(worst);
  }
  return gaps;
}

std::uint64_t seed_of(const Scenario& s, const CommandOptions& o) { return o.seed.value_or(s.seed); }

// ---------------------------------------------------------------------------

int cmd_discretize(const Scenario& s, const CommandOptions& o, std::ostream& out) {
  const DiscreteSystem sys = discretize(s);
  const auto dir = prepare_dir(o.out_dir);
  out << "n=" << sys.dim() << " delta=" << format_double(s.delta) << " model=" << to_string(s.model) << '\n';
  if (sys.phi.is_explicit()) {
    auto f = open_file(dir / "phi.mtx");
    write_matrix_market(f, sys.phi.matrix().dense());
    out << "wrote " << (dir / "phi.mtx").string() << '\n';
  } else {
    out << "phi is held lazily; phi.mtx not written\n";
  }
  {
    auto f = open_file(dir / "x_init_bounds.csv");
    f << "var,lo,hi\n";
    write_box_rows(f, "", sys.x_init);
    out << "wrote " << (dir / "x_init_bounds.csv").string() << '\n';
  }
  {
    auto f = open_file(dir / "v_bounds.csv");
    f << "k,var,lo,hi\n";
    const std::size_t count = sys.v.is_constant() ? 1 : sys.v.length();
    for (std::size_t k = 0; k < count; ++k) write_box_rows(f, std::to_string(k) + ",", sys.v.at(k));
    out << "wrote " << (dir / "v_bounds.csv").string() << '\n';
  }
  return kExitOk;
}

int cmd_reach(const Scenario& s, const CommandOptions& o, std::ostream& out) {
  const DiscreteSystem sys = discretize(s);
  const BlockStructure blocks(sys.dim());
  ReachOptions options;
  options.scheme = s.scheme;
  const ReachTube tube = reach(sys, s.steps, blocks, s.tracked, options);
  const bool csv = o.format != OutputFormat::Svg;
  const bool svg = o.format != OutputFormat::Csv;
  const auto written = emit_tube(tube, o.out_dir, csv, svg);
  out << "N=" << s.steps << " blocks=" << block_list(s.tracked) << " rows=" << tube.steps() * tube.tracked.size()
      << '\n';
  for (const auto& p : written) out << "wrote " << p << '\n';

  if (s.c && !s.d && s.c->rows() <= 2) {
    try {
      const auto ys = project_output(tube, *s.c, s.scheme);
      const auto path = prepare_dir(o.out_dir) / "output.csv";
      auto f = open_file(path);
      f << "k,t_lo,t_hi,y_lo_1,y_hi_1,y_lo_2,y_hi_2\n";
      for (int k = 0; k < tube.steps(); ++k) {
        const Hyperrectangle h = overapproximate_box(ys[static_cast<std::size_t>(k)]);
        f << k << ',' << format_double(tube.time_lo(k)) << ',' << format_double(tube.time_hi(k));
        for (Eigen::Index i = 0; i < 2; ++i) {
          if (i < h.center().size()) f << ',' << format_double(h.low()[i]) << ',' << format_double(h.high()[i]);
          else f << ",,";
        }
        f << '\n';
      }
      out << "wrote " << path.string() << '\n';
    } catch (const Error& e) {
      if (e.kind() != "untracked") throw;
      out << "output.csv not written: " << e.what() << '\n';
    }
  }
  return kExitOk;
}

int cmd_check(const Scenario& s, const CommandOptions&, std::ostream& out) {
  if (!s.property) throw Error("cli", "schema", "$.property: the check command needs a property");
  const DiscreteSystem sys = discretize(s);
  const SafetyProperty prop = parse_property(*s.property, sys.dim(), s.c, s.d);
  const CheckResult r = check_property(sys, prop, s.steps, BlockStructure(sys.dim()), s.scheme);
  if (r.verified) {
    out << "verified N=" << s.steps << '\n';
    return kExitOk;
  }
  out << "violated k=" << r.violated_step << " atom=\"" << r.atom_text << "\" support=" << format_double(r.support)
      << " bound=" << format_double(r.bound) << '\n';
  return kExitNotCertified;
}

int cmd_compare(const Scenario& s, const CommandOptions& o, std::ostream& out) {
  const DiscreteSystem sys = discretize(s);
  const BlockStructure blocks(sys.dim());
  const std::vector<int> all = blocks.all_blocks();
  const Matrix dirs = comparison_directions(sys.dim(), seed_of(s, o));
  const Matrix oracle = reach_nondecomposed(sys, s.steps, dirs);

  ReachOptions lazy;
  lazy.scheme = s.scheme;
  lazy.collapse_inputs = false;
  lazy.collapse_states = false;
  ReachOptions collapsed;
  collapsed.scheme = s.scheme;
  const ReachTube lazy_tube = reach(sys, s.steps, blocks, all, lazy);
  const ReachTube tube = reach(sys, s.steps, blocks, all, collapsed);
  const std::vector<double> dec_gap = tube_gaps(lazy_tube, oracle, dirs);
  const std::vector<double> tube_gap = tube_gaps(tube, oracle, dirs);

  const auto path = prepare_dir(o.out_dir) / "compare.csv";
  auto f = open_file(path);
  f << "k,t_lo,t_hi,decomposition_gap,tube_gap\n";
  for (int k = 0; k < s.steps; ++k) {
    const auto i = static_cast<std::size_t>(k);
    f << k << ',' << format_double(tube.time_lo(k)) << ',' << format_double(tube.time_hi(k)) << ','
      << format_double(dec_gap[i]) << ',' << format_double(tube_gap[i]) << '\n';
  }
  out << "directions=" << dirs.cols() << " N=" << s.steps << '\n';
  out << "max_decomposition_gap=" << sci(*std::max_element(dec_gap.begin(), dec_gap.end())) << '\n';
  out << "max_tube_gap=" << sci(*std::max_element(tube_gap.begin(), tube_gap.end())) << '\n';
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

/// Largest Hausdorff gap between each block projection of x and its block set.
double approximation_error(const LazySet& x, const std::vector<LazySet>& parts, const BlockStructure& blocks) {
  double worst = 0.0;
  const Matrix circle = circle_directions(4096);
  Matrix line(1, 2);
  line << 1.0, -1.0;
  for (int i = 0; i < blocks.count(); ++i) {
    const LazySet proj = linear_map(blocks.projection(i), x);
    const Matrix& dirs = blocks[i].size == 2 ? circle : line;
    worst = std::max(worst, hausdorff_estimate(proj, parts[static_cast<std::size_t>(i)], Norm::Inf, dirs));
  }
  return worst;
}

int cmd_bounds(const Scenario& s, const CommandOptions& o, std::ostream& out) {
  const DiscreteSystem sys = discretize(s);
  if (!sys.v.is_constant()) throw Error("cli", "unsupported", "bounds needs a constant input set");
  const BlockMatrix& phi = sys.phi.matrix();
  const BlockStructure blocks(sys.dim());
  const std::vector<LazySet> x_blocks = decompose(sys.x_init, blocks, s.scheme);
  const std::vector<LazySet> v_blocks = decompose(sys.v.at(0), blocks, s.scheme);
  const double eps_x = approximation_error(sys.x_init, x_blocks, blocks);
  const double eps_v = approximation_error(sys.v.at(0), v_blocks, blocks);
  const Matrix dirs = comparison_directions(sys.dim(), seed_of(s, o));

  const double map_bound = decomposed_map_error_bound(phi, x_blocks, eps_x);
  const double map_gap = hausdorff_estimate(linear_map(phi.dense(), sys.x_init),
                                            cartesian_product(decomposed_image(phi, x_blocks)), Norm::Inf, dirs);

  const DecompositionErrorReport report = error_report(phi, x_blocks, v_blocks, eps_x, eps_v);
  ReachOptions options;
  options.scheme = s.scheme;
  const ReachTube tube = reach(sys, s.steps, blocks, blocks.all_blocks(), options);
  const std::vector<double> gaps = tube_gaps(tube, reach_nondecomposed(sys, s.steps, dirs), dirs);

  const auto path = prepare_dir(o.out_dir) / "bounds.csv";
  auto f = open_file(path);
  f << "k,bound,empirical_gap\n";
  bool holds = map_gap <= map_bound + kBoundSlack;
  for (int k = 0; k < s.steps; ++k) {
    const double bound = recurrence_error_bound(report, k);
    const double gap = gaps[static_cast<std::size_t>(k)];
    holds = holds && gap <= bound + kBoundSlack;
    f << k << ',' << format_double(bound) << ',' << format_double(gap) << '\n';
  }
  out << "eps_x=" << sci(eps_x) << " eps_v=" << sci(eps_v) << " norm_phi=" << sci(report.alpha_phi) << '\n';
  out << "single_map bound=" << sci(map_bound) << " empirical=" << sci(map_gap) << '\n';
  out << "recurrence bound(N-1)=" << sci(recurrence_error_bound(report, s.steps - 1))
      << " max_empirical=" << sci(*std::max_element(gaps.begin(), gaps.end())) << '\n';
  if (const auto u = uniform_error_bound(report)) out << "uniform bound=" << sci(*u) << '\n';
  else out << "uniform bound=none (norm of phi >= 1)\n";
  out << "bounds_hold=" << (holds ? "yes" : "no") << '\n';
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_command(const std::string& command, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    using Handler = int (*)(const Scenario&, const CommandOptions&, std::ostream&);
    Handler handler = nullptr;
    if (command == "discretize") handler = cmd_discretize;
    else if (command == "reach") handler = cmd_reach;
    else if (command == "check") handler = cmd_check;
    else if (command == "compare") handler = cmd_compare;
    else if (command == "bounds") handler = cmd_bounds;
    else throw Error("cli", "usage", "unknown command '" + command + "'");

    Scenario scenario = parse_scenario_file(options.scenario);
    if (options.scheme) {
      try {
        scenario.scheme = ApproxScheme::parse(*options.scheme);
      } catch (const Error& e) {
        throw Error("cli", "usage", std::string("--scheme: ") + e.what());
      }
    }
    return handler(scenario, options, out);
  } catch (const Error& e) {
    err << "error:" << e.module() << ':' << e.kind() << ": " << e.what() << std::endl;
    return e.is_numerical() ? kExitNumerical : kExitInputError;
  } catch (const std::bad_alloc&) {
    err << "error:cli:memory: out of memory" << std::endl;
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error:cli:internal: " << e.what() << std::endl;
    return kExitNumerical;
  }
}

}  // namespace reachdec
