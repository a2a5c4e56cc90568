#include "reachdec/scenario.hpp"

#include "reachdec/error.hpp"
#include "reachdec/matrix_market.hpp"
#include "reachdec/property.hpp"
#include "reachdec/reach.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace reachdec {

namespace {

using Json = nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error("cli", "schema", path + ": " + what);
}

std::string type_name(const Json& j) { return j.type_name(); }

void allow_only(const Json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) schema_error(path + "." + key, "unknown field");
  }
}

const Json& field(const Json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "required field is missing");
  return *it;
}

void expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object, got " + type_name(j));
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number, got " + type_name(j));
  return j.get<double>();
}

Vector vector_of(const Json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers, got " + type_name(j));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix dense_rows(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) schema_error(path, "expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    const Vector row = vector_of(j[r], rp);
    if (static_cast<std::size_t>(row.size()) != cols) schema_error(rp, "rows have different lengths");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

std::string resolve(const std::string& base_dir, const std::string& file) {
  const std::filesystem::path p(file);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (std::filesystem::path(base_dir) / p).string();
}

SparseMatrix load_matrix(const Json& j, const std::string& path, const std::string& base_dir) {
  if (!j.is_string()) schema_error(path, "expected a MatrixMarket file name, got " + type_name(j));
  try {
    return read_matrix_market_file(resolve(base_dir, j.get<std::string>()));
  } catch (const Error& e) {
    throw Error("cli", e.kind(), path + ": " + e.what());
  }
}

Matrix matrix_field(const Json& j, const std::string& path, const std::string& base_dir) {
  if (j.is_string()) return Matrix(load_matrix(j, path, base_dir));
  return dense_rows(j, path);
}

Norm norm_of(const Json& j, const std::string& path) {
  if (j.is_string() && (j == "inf" || j == "Inf")) return Norm::Inf;
  if (j.is_number()) {
    const double p = j.get<double>();
    if (p == 1.0) return Norm::One;
    if (p == 2.0) return Norm::Two;
  }
  schema_error(path, "p must be 1, 2 or \"inf\"");
}

LazySet parse_set(const Json& j, const std::string& path) {
  expect_object(j, path);
  if (j.size() != 1) schema_error(path, "a set has exactly one of box, intervals, point, ball, polygon");
  const std::string kind = j.begin().key();
  const Json& body = j.begin().value();
  const std::string bp = path + "." + kind;
  try {
    if (kind == "box") {
      expect_object(body, bp);
      if (body.contains("low") || body.contains("high")) {
        allow_only(body, bp, {"low", "high"});
        const Vector lo = vector_of(field(body, bp, "low"), bp + ".low");
        const Vector hi = vector_of(field(body, bp, "high"), bp + ".high");
        return Hyperrectangle::from_bounds(lo, hi);
      }
      allow_only(body, bp, {"center", "radius"});
      return Hyperrectangle(vector_of(field(body, bp, "center"), bp + ".center"),
                            vector_of(field(body, bp, "radius"), bp + ".radius"));
    }
    if (kind == "intervals") {
      if (!body.is_array() || body.empty()) schema_error(bp, "expected a nonempty array of [lo, hi] pairs");
      Vector lo(static_cast<Eigen::Index>(body.size())), hi(lo.size());
      for (std::size_t i = 0; i < body.size(); ++i) {
        const std::string ip = bp + "[" + std::to_string(i) + "]";
        const Vector pair = vector_of(body[i], ip);
        if (pair.size() != 2) schema_error(ip, "expected [lo, hi]");
        lo[static_cast<Eigen::Index>(i)] = pair[0];
        hi[static_cast<Eigen::Index>(i)] = pair[1];
      }
      return Hyperrectangle::from_bounds(lo, hi);
    }
    if (kind == "point") return Singleton(vector_of(body, bp));
    if (kind == "ball") {
      expect_object(body, bp);
      allow_only(body, bp, {"center", "radius", "p"});
      const Norm p = body.contains("p") ? norm_of(body["p"], bp + ".p") : Norm::Two;
      return BallP(vector_of(field(body, bp, "center"), bp + ".center"), number(field(body, bp, "radius"), bp + ".radius"),
                   p);
    }
    if (kind == "polygon") {
      if (!body.is_array()) schema_error(bp, "expected an array of constraints");
      std::vector<HPolygon::Constraint> cs;
      for (std::size_t i = 0; i < body.size(); ++i) {
        const std::string ip = bp + "[" + std::to_string(i) + "]";
        expect_object(body[i], ip);
        allow_only(body[i], ip, {"a", "b"});
        const Vector a = vector_of(field(body[i], ip, "a"), ip + ".a");
        if (a.size() != 2) schema_error(ip + ".a", "polygon normals are 2D");
        cs.push_back({Vector2(a[0], a[1]), number(field(body[i], ip, "b"), ip + ".b")});
      }
      return HPolygon(std::move(cs));
    }
  } catch (const Error& e) {
    if (e.module() == "cli") throw;
    throw Error("cli", e.kind(), bp + ": " + e.what());
  }
  schema_error(bp, "unknown set kind");
}

Json read_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error("cli", "json", source + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cli", "io", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

InputSpec parse_inputs(const Json& j, const std::string& path, const std::string& base_dir) {
  if (j.is_object() && j.size() == 1 && j.contains("sequence")) {
    const Json& seq = j["sequence"];
    if (!seq.is_array() || seq.empty()) schema_error(path + ".sequence", "expected a nonempty array of sets");
    std::vector<LazySet> sets;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      sets.push_back(parse_set(seq[i], path + ".sequence[" + std::to_string(i) + "]"));
    }
    return InputSpec::sequence(std::move(sets));
  }
  if (j.is_object() && j.size() == 1 && j.contains("sequence_file")) {
    const std::string fp = path + ".sequence_file";
    if (!j["sequence_file"].is_string()) schema_error(fp, "expected a file name");
    const std::string file = resolve(base_dir, j["sequence_file"].get<std::string>());
    const Json seq = read_json(read_file(file), file);
    if (!seq.is_array() || seq.empty()) schema_error(file, "expected a nonempty array of sets");
    std::vector<LazySet> sets;
    for (std::size_t i = 0; i < seq.size(); ++i) sets.push_back(parse_set(seq[i], file + "$[" + std::to_string(i) + "]"));
    return InputSpec::sequence(std::move(sets));
  }
  return InputSpec::constant(parse_set(j, path));
}

std::vector<int> index_list(const Json& j, const std::string& path, int upper) {
  if (!j.is_array() || j.empty()) schema_error(path, "expected a nonempty array of 1-based indices");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ip = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_number_integer()) schema_error(ip, "expected an integer");
    const int v = j[i].get<int>();
    if (v < 1 || v > upper) schema_error(ip, "index " + std::to_string(v) + " out of range 1.." + std::to_string(upper));
    out.push_back(v - 1);
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir) {
  const Json root = read_json(json_text, "scenario");
  const std::string r = "$";
  expect_object(root, r);
  allow_only(root, r,
             {"A", "B", "X0", "U", "delta", "N", "model", "exponential", "blocks", "variables", "property", "C", "D",
              "scheme", "seed"});

  BlockMatrix a(load_matrix(field(root, r, "A"), "$.A", base_dir));
  if (a.rows() != a.cols()) {
    schema_error("$.A", "matrix must be square, got " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  const int n = static_cast<int>(a.rows());
  std::optional<BlockMatrix> b;
  if (root.contains("B")) {
    b.emplace(load_matrix(root["B"], "$.B", base_dir));
    if (b->rows() != n) {
      throw Error("cli", "dimension",
                  "$.B: B has " + std::to_string(b->rows()) + " rows but A is " + std::to_string(n) + "x" +
                      std::to_string(n));
    }
  }
  const LazySet x0 = parse_set(field(root, r, "X0"), "$.X0");
  if (x0.dim() != n) {
    throw Error("cli", "dimension",
                "$.X0: A is " + std::to_string(n) + "x" + std::to_string(n) + " but X0 has dimension " +
                    std::to_string(x0.dim()));
  }
  std::optional<InputSpec> u;
  if (root.contains("U")) {
    u.emplace(parse_inputs(root["U"], "$.U", base_dir));
    const int m = b ? static_cast<int>(b->cols()) : n;
    if (u->dim() != m) {
      throw Error("cli", "dimension",
                  "$.U: input sets have dimension " + std::to_string(u->dim()) + " but " +
                      (b ? "B has " + std::to_string(m) + " columns" : "A is " + std::to_string(n) + "x" + std::to_string(n)));
    }
  }

  const double delta = number(field(root, r, "delta"), "$.delta");
  if (!(delta > 0.0) || !std::isfinite(delta)) schema_error("$.delta", "must be positive and finite");
  const Json& nj = field(root, r, "N");
  if (!nj.is_number_integer() || nj.get<long>() < 1) schema_error("$.N", "must be a positive integer");
  const int steps = nj.get<int>();

  const Json& mj = field(root, r, "model");
  TimeModel model;
  if (mj == "dense") {
    model = TimeModel::DenseTime;
  } else if (mj == "discrete") {
    model = TimeModel::DiscreteTime;
  } else {
    schema_error("$.model", "expected \"dense\" or \"discrete\"");
  }

  ExponentialMode exponential = ExponentialMode::Explicit;
  if (root.contains("exponential")) {
    const Json& ej = root["exponential"];
    if (ej == "lazy") {
      exponential = ExponentialMode::Lazy;
    } else if (ej != "explicit") {
      schema_error("$.exponential", "expected \"explicit\" or \"lazy\"");
    }
    if (exponential == ExponentialMode::Lazy && model == TimeModel::DenseTime) {
      schema_error("$.exponential", "the lazy exponential is only available for the discrete model");
    }
  }

  if (u && !u->is_constant() && u->length() < static_cast<std::size_t>(steps)) {
    throw Error("cli", "dimension",
                "$.U.sequence: " + std::to_string(u->length()) + " input sets for N = " + std::to_string(steps) +
                    " steps");
  }

  std::optional<Matrix> c, d;
  if (root.contains("C")) {
    c = matrix_field(root["C"], "$.C", base_dir);
    if (c->cols() != n) {
      throw Error("cli", "dimension",
                  "$.C: C has " + std::to_string(c->cols()) + " columns but the state dimension is " + std::to_string(n));
    }
  }
  if (root.contains("D")) {
    if (!c) schema_error("$.D", "D requires C");
    d = matrix_field(root["D"], "$.D", base_dir);
    const int m = b ? static_cast<int>(b->cols()) : n;
    if (d->rows() != c->rows() || d->cols() != m) {
      throw Error("cli", "dimension",
                  "$.D: expected " + std::to_string(c->rows()) + "x" + std::to_string(m) + ", got " +
                      std::to_string(d->rows()) + "x" + std::to_string(d->cols()));
    }
  }

  std::optional<std::string> property;
  std::vector<int> property_vars;
  if (root.contains("property")) {
    if (!root["property"].is_string()) schema_error("$.property", "expected a formula string");
    property = root["property"].get<std::string>();
    try {
      property_vars = parse_property(*property, n, c, d).variables();
    } catch (const Error& e) {
      throw Error("cli", e.kind(), std::string("$.property: ") + e.what());
    }
  }

  const BlockStructure blocks(n);
  std::vector<int> tracked;
  if (root.contains("blocks") && root.contains("variables")) schema_error("$", "give either blocks or variables");
  if (root.contains("blocks")) {
    tracked = index_list(root["blocks"], "$.blocks", blocks.count());
  } else if (root.contains("variables")) {
    tracked = blocks_for_variables(blocks, index_list(root["variables"], "$.variables", n));
  } else if (property) {
    tracked = blocks_for_variables(blocks, property_vars);
  }
  if (tracked.empty()) tracked = blocks.all_blocks();
  std::sort(tracked.begin(), tracked.end());
  tracked.erase(std::unique(tracked.begin(), tracked.end()), tracked.end());

  ApproxScheme scheme;
  if (root.contains("scheme")) {
    if (!root["scheme"].is_string()) schema_error("$.scheme", "expected \"box\" or \"eps:<value>\"");
    try {
      scheme = ApproxScheme::parse(root["scheme"].get<std::string>());
    } catch (const Error& e) {
      throw Error("cli", "schema", std::string("$.scheme: ") + e.what());
    }
  }
  std::uint64_t seed = 0;
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) schema_error("$.seed", "expected a nonnegative integer");
    seed = root["seed"].get<std::uint64_t>();
  }

  ContinuousSystem system(std::move(a), std::move(b), x0, std::move(u));
  return Scenario{std::move(system), delta, steps, model, exponential, std::move(tracked), std::move(property),
                  std::move(c), std::move(d), scheme, seed};
}

Scenario parse_scenario_file(const std::string& path) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_scenario(read_file(path), dir);
}

DiscreteSystem discretize(const Scenario& s) {
  if (s.model == TimeModel::DenseTime) return discretize_dense(s.system, s.delta);
  return discretize_discrete(s.system, s.delta, s.exponential);
}

}  // namespace reachdec
