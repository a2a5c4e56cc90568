#include "reachdec/error.hpp"
#include "reachdec/expm.hpp"
#include "reachdec/oracle.hpp"
#include "reachdec/property.hpp"
#include "reachdec/reach.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace reachdec;
using namespace testing_support;

namespace {

DiscreteSystem recurrence(const Matrix& phi, const LazySet& x0, const InputSpec& v) {
  return DiscreteSystem{Transition(BlockMatrix(phi)), x0, v, 1.0, TimeModel::DiscreteTime, v};
}

DiscreteSystem recurrence(const Matrix& phi, const LazySet& x0, const LazySet& v) {
  return recurrence(phi, x0, InputSpec::constant(v));
}

LazySet interval(double lo, double hi) { return Hyperrectangle::from_bounds(Vector::Constant(1, lo), Vector::Constant(1, hi)); }

Matrix block_diagonal(std::mt19937_64& rng, int n) {
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; i += 2) {
    const int s = std::min(2, n - i);
    m.block(i, i, s, s) = random_matrix(rng, s, s);
  }
  return m;
}

}  // namespace

TEST(Reach, IdentityAtRest) {
  const LazySet x0 = Hyperrectangle(Vector::Zero(4), Vector::Ones(4));
  const DiscreteSystem sys = recurrence(Matrix::Identity(4, 4), x0, Singleton(Vector::Zero(4)));
  const BlockStructure bs(4);
  const ReachTube tube = reach(sys, 6, bs, bs.all_blocks());
  ASSERT_EQ(tube.steps(), 6);
  for (int k = 0; k < 6; ++k) {
    for (int i = 0; i < 2; ++i) {
      const Hyperrectangle h = overapproximate_box(tube.block_set(k, i));
      EXPECT_EQ(h.center(), Vector2(0, 0));
      EXPECT_EQ(h.radius(), Vector2(1, 1));
    }
  }
}

TEST(Reach, BlockDiagonalMatchesOracleInBlockDirections) {
  std::mt19937_64 rng(61);
  const Matrix phi = block_diagonal(rng, 6);
  const DiscreteSystem sys = recurrence(phi, random_box(rng, 6), Singleton(Vector::Zero(6)));
  const BlockStructure bs(6);
  ReachOptions lazy;
  lazy.collapse_inputs = lazy.collapse_states = false;
  const ReachTube tube = reach(sys, 8, bs, bs.all_blocks(), lazy);
  const Matrix dirs = sphere_directions(6, 200);
  const Matrix oracle = reach_nondecomposed(sys, 8, dirs);
  for (int k = 0; k < 8; ++k) {
    const LazySet x = tube.product(k);
    for (Eigen::Index c = 0; c < dirs.cols(); ++c) {
      EXPECT_NEAR(support_function(x, Vector(dirs.col(c))), oracle(k, c), 1e-9);
    }
  }
}

TEST(Reach, SoundAgainstOracle) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 4 + 2 * (trial % 2) + (trial == 4);  // includes an odd dimension
    const DiscreteSystem sys = recurrence(random_with_inf_norm(rng, n, 0.95), random_box(rng, n),
                                          random_box(rng, n, 0.1, 0.1));
    const BlockStructure bs(n);
    const ReachTube tube = reach(sys, 20, bs, bs.all_blocks());
    const Matrix dirs = random_directions(n, 300, rng);
    const Matrix oracle = reach_nondecomposed(sys, 20, dirs);
    for (int k = 0; k < 20; ++k) {
      const LazySet x = tube.product(k);
      for (Eigen::Index c = 0; c < dirs.cols(); ++c) {
        EXPECT_LE(oracle(k, c), support_function(x, Vector(dirs.col(c))) + 1e-9);
      }
    }
  }
}

TEST(Reach, StepInIsolationIsBitwiseIdentical) {
  std::mt19937_64 rng(63);
  const DiscreteSystem sys =
      recurrence(random_with_inf_norm(rng, 6, 0.9), random_box(rng, 6), random_box(rng, 6, 0.1, 0.1));
  const BlockStructure bs(6);
  const ReachTube tube = reach(sys, 12, bs, {1});
  for (int k : {0, 1, 5, 11}) {
    const Hyperrectangle a = overapproximate_box(tube.block_set(k, 1));
    const Hyperrectangle b = overapproximate_box(step_block(sys, k, bs, 1));
    EXPECT_EQ(a.center(), b.center()) << k;
    EXPECT_EQ(a.radius(), b.radius()) << k;
  }
}

TEST(Reach, TrackedSubsetEqualsFullRun) {
  std::mt19937_64 rng(64);
  const DiscreteSystem sys =
      recurrence(random_with_inf_norm(rng, 8, 0.9), random_box(rng, 8), random_box(rng, 8, 0.1, 0.1));
  const BlockStructure bs(8);
  const ReachTube all = reach(sys, 10, bs, bs.all_blocks());
  const ReachTube some = reach(sys, 10, bs, {2, 0});
  EXPECT_EQ(some.tracked, (std::vector<int>{0, 2}));
  EXPECT_FALSE(some.tracks(1));
  for (int k = 0; k < 10; ++k) {
    for (int i : {0, 2}) {
      const Hyperrectangle a = overapproximate_box(all.block_set(k, i));
      const Hyperrectangle b = overapproximate_box(some.block_set(k, i));
      EXPECT_LT((a.center() - b.center()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((a.radius() - b.radius()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
  EXPECT_THROW(some.product(0), Error);
}

TEST(Reach, SparseAndDensePathsAgree) {
  std::mt19937_64 rng(65);
  const Matrix phi = Matrix(random_sparse(rng, 10, 1, 0.3)) + 0.5 * Matrix::Identity(10, 10);
  const LazySet x0 = random_box(rng, 10);
  const LazySet v = random_box(rng, 10, 0.1, 0.1);
  const DiscreteSystem d = recurrence(phi, x0, v);
  DiscreteSystem s = d;
  s.phi = Transition(BlockMatrix(SparseMatrix(phi.sparseView())));
  const BlockStructure bs(10);
  const ReachTube a = reach(d, 15, bs, bs.all_blocks());
  const ReachTube b = reach(s, 15, bs, bs.all_blocks());
  for (int k = 0; k < 15; ++k) {
    for (int i = 0; i < 5; ++i) {
      const Hyperrectangle ha = overapproximate_box(a.block_set(k, i));
      const Hyperrectangle hb = overapproximate_box(b.block_set(k, i));
      EXPECT_LT((ha.low() - hb.low()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((ha.high() - hb.high()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Reach, PowerStrategiesAgree) {
  std::mt19937_64 rng(66);
  const DiscreteSystem sys =
      recurrence(random_with_inf_norm(rng, 6, 0.9), random_box(rng, 6), random_box(rng, 6, 0.1, 0.1));
  const BlockStructure bs(6);
  ReachOptions rows, full;
  rows.powers = PowerStrategy::RowBlocks;
  full.powers = PowerStrategy::FullPowers;
  const ReachTube a = reach(sys, 10, bs, bs.all_blocks(), rows);
  const ReachTube b = reach(sys, 10, bs, bs.all_blocks(), full);
  for (int k = 0; k < 10; ++k) {
    for (int i = 0; i < 3; ++i) {
      const Hyperrectangle ha = overapproximate_box(a.block_set(k, i));
      const Hyperrectangle hb = overapproximate_box(b.block_set(k, i));
      EXPECT_LT((ha.high() - hb.high()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Reach, LazyTransitionMatchesExplicit) {
  std::mt19937_64 rng(67);
  const SparseMatrix a = random_sparse(rng, 12, 2, 1.0);
  const LazySet x0 = random_box(rng, 12);
  const LazySet v = random_box(rng, 12, 0.1, 0.1);
  const DiscreteSystem eager = recurrence(expm(Matrix(0.1 * Matrix(a))), x0, v);
  DiscreteSystem lazy = eager;
  lazy.phi = Transition::lazy_exponential(a, 0.1);
  const BlockStructure bs(12);
  const ReachTube ta = reach(eager, 10, bs, {3});
  const ReachTube tb = reach(lazy, 10, bs, {3});
  for (int k = 0; k < 10; ++k) {
    const Hyperrectangle ha = overapproximate_box(ta.block_set(k, 3));
    const Hyperrectangle hb = overapproximate_box(tb.block_set(k, 3));
    EXPECT_LT((ha.high() - hb.high()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((ha.low() - hb.low()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Varying, ZeroInputsMatchConstant) {
  std::mt19937_64 rng(68);
  const Matrix phi = random_with_inf_norm(rng, 4, 0.9);
  const LazySet x0 = random_box(rng, 4);
  const LazySet zero = Singleton(Vector::Zero(4));
  const DiscreteSystem c = recurrence(phi, x0, zero);
  const DiscreteSystem v = recurrence(phi, x0, InputSpec::sequence(std::vector<LazySet>(10, zero)));
  const BlockStructure bs(4);
  const ReachTube a = reach_decomposed(c, 10, bs, bs.all_blocks());
  const ReachTube b = reach_decomposed_varying(v, 10, bs, bs.all_blocks());
  for (int k = 0; k < 10; ++k) {
    for (int i = 0; i < 2; ++i) {
      const Hyperrectangle ha = overapproximate_box(a.block_set(k, i));
      const Hyperrectangle hb = overapproximate_box(b.block_set(k, i));
      EXPECT_LT((ha.high() - hb.high()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LT((ha.low() - hb.low()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Varying, ConstantSequenceIsNeverTighter) {
  std::mt19937_64 rng(69);
  const Matrix phi = random_with_inf_norm(rng, 6, 0.9);
  const LazySet x0 = random_box(rng, 6);
  const LazySet w = random_box(rng, 6, 0.1, 0.1);
  const BlockStructure bs(6);
  const ReachTube a = reach(recurrence(phi, x0, w), 15, bs, bs.all_blocks());
  const ReachTube b =
      reach(recurrence(phi, x0, InputSpec::sequence(std::vector<LazySet>(15, w))), 15, bs, {1});
  for (int k = 0; k < 15; ++k) {
    for (int t = 0; t < 20; ++t) {
      const Vector l = random_vector(rng, 2);
      EXPECT_LE(support_function(a.block_set(k, 1), l), support_function(b.block_set(k, 1), l) + 1e-9);
    }
  }
}

TEST(Varying, ScalarHandRecursion) {
  std::vector<LazySet> seq;
  for (int k = 0; k < 6; ++k) seq.push_back(interval(0.0, std::ldexp(1.0, -k)));
  const DiscreteSystem sys = recurrence(Matrix::Constant(1, 1, 0.5), Singleton(Vector::Zero(1)),
                                        InputSpec::sequence(seq));
  const ReachTube tube = reach(sys, 6, BlockStructure(1), {0});
  for (int k = 1; k <= 5; ++k) {
    double expected = 0.0;
    for (int s = 0; s < k; ++s) expected += std::pow(0.5, k - 1 - s) * std::ldexp(1.0, -s);
    EXPECT_NEAR(support_function(tube.block_set(k, 0), Vector::Ones(1)), expected, 1e-14) << k;
  }
}

TEST(Varying, ShortSequenceAndLazyTransitionRejected) {
  const DiscreteSystem sys = recurrence(Matrix::Identity(2, 2), Singleton(Vector::Zero(2)),
                                        InputSpec::sequence({Singleton(Vector::Zero(2))}));
  EXPECT_THROW(reach(sys, 5, BlockStructure(2), {0}), Error);
  DiscreteSystem lazy = recurrence(Matrix::Identity(2, 2), Singleton(Vector::Zero(2)),
                                   InputSpec::sequence(std::vector<LazySet>(5, Singleton(Vector::Zero(2)))));
  lazy.phi = Transition::lazy_exponential(SparseMatrix(2, 2), 0.1);
  EXPECT_THROW(reach(lazy, 5, BlockStructure(2), {0}), Error);
}

TEST(Check, RestSystem) {
  const LazySet x0 = Hyperrectangle(Vector::Zero(3), Vector::Ones(3));
  const DiscreteSystem sys = recurrence(Matrix::Identity(3, 3), x0, Singleton(Vector::Zero(3)));
  const CheckResult ok = check_property(sys, parse_property("x1 < 2", 3), 10, BlockStructure(3));
  EXPECT_TRUE(ok.verified);
  const CheckResult bad = check_property(sys, parse_property("x1 < 0.5", 3), 10, BlockStructure(3));
  EXPECT_FALSE(bad.verified);
  EXPECT_EQ(bad.violated_step, 0);
  EXPECT_DOUBLE_EQ(bad.support, 1.0);
}

TEST(Check, UnstableScalarViolatesAtSix) {
  const DiscreteSystem sys = recurrence(Matrix::Constant(1, 1, std::exp(0.1)), interval(1.0, 1.1),
                                        Singleton(Vector::Zero(1)));
  const CheckResult r = check_property(sys, parse_property("x1 < 2", 1), 20, BlockStructure(1));
  EXPECT_FALSE(r.verified);
  EXPECT_EQ(r.violated_step, 6);
  EXPECT_NEAR(r.support, 1.1 * std::exp(0.6), 1e-12);
}

TEST(Check, DisjunctionAndConjunction) {
  const LazySet x0 = Hyperrectangle(Vector::Zero(2), Vector::Ones(2));
  const DiscreteSystem sys = recurrence(Matrix::Identity(2, 2), x0, Singleton(Vector::Zero(2)));
  const BlockStructure bs(2);
  EXPECT_TRUE(check_property(sys, parse_property("x1 < 0.5 || x1 + x2 <= 2", 2), 3, bs).verified);
  EXPECT_FALSE(check_property(sys, parse_property("x1 <= 1 && x2 > 0", 2), 3, bs).verified);
}

TEST(Check, VerifiedImpliesOracleSatisfies) {
  std::mt19937_64 rng(70);
  for (int t = 0; t < 10; ++t) {
    const DiscreteSystem sys =
        recurrence(random_with_inf_norm(rng, 4, 0.9), random_box(rng, 4), random_box(rng, 4, 0.1, 0.1));
    const double bound = uniform(rng, 1.0, 4.0);
    const SafetyProperty prop = parse_property("x1 - 2*x3 < " + std::to_string(bound), 4);
    const CheckResult r = check_property(sys, prop, 15, BlockStructure(4));
    Matrix dir(4, 1);
    dir << 1, 0, -2, 0;
    const Matrix oracle = reach_nondecomposed(sys, 15, dir);
    const int certified = r.verified ? 15 : r.violated_step;
    for (int k = 0; k < certified; ++k) EXPECT_LT(oracle(k, 0), bound + 1e-12);
  }
}

TEST(Check, FeedthroughUsesInputSet) {
  Matrix c(1, 1), d(1, 1);
  c << 1;
  d << 2;
  DiscreteSystem sys = recurrence(Matrix::Identity(1, 1), interval(0.0, 1.0), Singleton(Vector::Zero(1)));
  sys.u = InputSpec::constant(interval(-1.0, 0.5));
  const BlockStructure bs(1);
  EXPECT_FALSE(check_property(sys, parse_property("y1 < 1.9", 1, c, d), 3, bs).verified);
  EXPECT_TRUE(check_property(sys, parse_property("y1 < 2.1", 1, c, d), 3, bs).verified);
}

TEST(Property, Parsing) {
  const SafetyProperty p = parse_property("2*x1 - 3x5 < 10 && (x2 >= -1 || x4 <= 4)", 6);
  EXPECT_EQ(p.atoms.size(), 3u);
  EXPECT_EQ(p.variables(), (std::vector<int>{0, 1, 3, 4}));
  EXPECT_DOUBLE_EQ(p.atoms[0].state[4], -3.0);
  EXPECT_DOUBLE_EQ(p.atoms[1].state[1], -1.0);  // x2 >= -1 becomes -x2 <= 1
  EXPECT_DOUBLE_EQ(p.atoms[1].bound, 1.0);
  EXPECT_EQ(parse_property("x1 + 1 < x2 - 2", 2).atoms[0].bound, -3.0);
  for (const char* bad : {"x7 < 1", "x1 <", "y1 < 2", "x1 < 2 &&", "(x1 < 2", "x1 * x2 < 1"}) {
    try {
      parse_property(bad, 6);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), "property") << bad;
    }
  }
}

TEST(Output, ProjectionExamples) {
  const LazySet x0 = Hyperrectangle(Vector::Zero(4), Vector::Ones(4));
  const DiscreteSystem sys = recurrence(Matrix::Identity(4, 4), x0, Singleton(Vector::Zero(4)));
  const BlockStructure bs(4);
  const ReachTube tube = reach(sys, 2, bs, bs.all_blocks());
  Matrix m(1, 4);
  m << 1, 0, 1, 0;
  const auto ys = project_output(tube, m, ApproxScheme::box());
  EXPECT_DOUBLE_EQ(support_function(ys[0], Vector::Ones(1)), 2.0);
  EXPECT_DOUBLE_EQ(support_function(ys[0], -Vector::Ones(1)), 2.0);
  const auto proj = project_output(tube, bs.projection(1), ApproxScheme::box());
  EXPECT_EQ(&proj[1].node(), &tube.block_set(1, 1).node());

  const ReachTube partial = reach(sys, 2, bs, {0});
  try {
    project_output(partial, m, ApproxScheme::box());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "untracked");
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(Output, RandomMapMatchesVertexEnumeration) {
  std::mt19937_64 rng(71);
  const Hyperrectangle x0 = random_box(rng, 4);
  const DiscreteSystem sys = recurrence(Matrix::Identity(4, 4), x0, Singleton(Vector::Zero(4)));
  const BlockStructure bs(4);
  const ReachTube tube = reach(sys, 1, bs, bs.all_blocks());
  const Matrix m = random_matrix(rng, 1, 4);
  const auto ys = project_output(tube, m, ApproxScheme::box());
  double hi = -1e300, lo = 1e300;
  for (int mask = 0; mask < 16; ++mask) {
    Vector v = x0.center();
    for (int i = 0; i < 4; ++i) v[i] += ((mask >> i) & 1 ? 1 : -1) * x0.radius()[i];
    hi = std::max(hi, (m * v)(0));
    lo = std::min(lo, (m * v)(0));
  }
  EXPECT_NEAR(support_function(ys[0], Vector::Ones(1)), hi, 1e-12);
  EXPECT_NEAR(-support_function(ys[0], -Vector::Ones(1)), lo, 1e-12);
}
