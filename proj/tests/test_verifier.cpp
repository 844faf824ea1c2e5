#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kbilip/contact.hpp"
#include "kbilip/verifier.hpp"
#include "support.hpp"

using namespace kbilip;
using testing::scalar;
using testing::small_scheme;

namespace {

PolyGerm lin(double c = 1.0) { return scalar(1, {{{1}, c}}); }
PolyGerm sq(double c = 1.0) { return scalar(1, {{{2}, c}}); }

PiecewiseHomeo plus(PolyGerm f, PolyGerm g, CoordChange h = CoordChange::identity(1)) {
  return PiecewiseHomeo(std::move(f), std::move(g), std::move(h), SignBranch::Plus);
}

Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// theta scaled by `factor`, with the inverse dropped.
EvaluableMap scaled_theta(const PiecewiseHomeo& H, double factor) {
  EvaluableMap base = as_map(H);
  const int n = H.n();
  return {base.dim, [base, n, factor](std::span<const double> in, std::span<double> out) {
            base.forward(in, out);
            out[n] *= factor;
          }};
}

// theta + delta * (F - y): unchanged on the graph, moved off it.
EvaluableMap shifted_zero_section(const PiecewiseHomeo& H, double delta) {
  EvaluableMap base = as_map(H);
  const int n = H.n();
  return {base.dim, [base, H, n, delta](std::span<const double> in, std::span<double> out) {
            base.forward(in, out);
            out[n] += delta * (H.f_at(in.first(n)) - in[n]);
          }};
}

bool failed_have_witness(const CheckBundle& b) {
  for (const auto& c : b.checks)
    if (!c.pass && !c.witness) return false;
  return true;
}

}  // namespace

TEST_CASE("identity estimate is exactly one") {
  auto cloud = sample_punctured_ball(small_scheme(6, 32), 2);
  auto e = estimate_lipschitz(identity_map(2), cloud);
  CHECK(e.L_forward == 1.0);
  CHECK(e.L_inverse == 1.0);
  CHECK(e.num_pairs > 0);
}

TEST_CASE("diagonal linear map") {
  auto cloud = sample_punctured_ball(small_scheme(4, 256), 2);
  auto e = estimate_lipschitz(linear_map(diag2(2.0, 0.5)), cloud);
  CHECK(std::abs(e.L_forward - 2.0) <= 1e-6);
  CHECK(std::abs(e.L_inverse - 2.0) <= 1e-6);
  CHECK(e.L_forward * e.L_inverse >= 1.0 - 1e-9);
  CHECK(e.witness_pair_forward[0].size() == 2);
}

TEST_CASE("estimate stable under doubled sampling") {
  auto H = as_map(plus(sq(), sq(2.0)));
  auto coarse = estimate_lipschitz(H, fiber_cloud(sq(), small_scheme(12, 64)));
  auto fine = estimate_lipschitz(H, fiber_cloud(sq(), small_scheme(12, 128)));
  CHECK(std::abs(fine.L_forward - coarse.L_forward) <= 0.05 * coarse.L_forward);
  CHECK(std::abs(fine.L_inverse - coarse.L_inverse) <= 0.05 * coarse.L_inverse);
}

TEST_CASE("estimates never drop when samples are added") {
  auto f = scalar(2, {{{2, 0}, 1.0}, {{0, 2}, -1.0}});
  auto g = PolyGerm(f).scaled(3.0);
  auto H = as_map(PiecewiseHomeo(f, g, CoordChange::identity(2), SignBranch::Plus));
  double prev_f = 0.0, prev_i = 0.0;
  for (int dirs : {16, 32, 64}) {
    auto e = estimate_lipschitz(H, sample_punctured_ball(small_scheme(5, dirs), 3));
    CHECK(e.L_forward >= prev_f);
    CHECK(e.L_inverse >= prev_i);
    prev_f = e.L_forward;
    prev_i = e.L_inverse;
  }
}

TEST_CASE("pair construction") {
  auto cloud = fiber_cloud(sq(), small_scheme(3, 8));
  auto pairs = build_pairs(cloud, {});
  for (const auto& [a, b] : pairs) CHECK(a != b);
  PairingPolicy capped;
  capped.max_pairs = 10;
  CHECK(build_pairs(cloud, capped).size() <= pairs.size());
}

TEST_CASE("graph mapping") {
  auto scheme = small_scheme(6, 32);
  auto xs = sample_punctured_ball(scheme, 1);
  auto id = CoordChange::identity(1);
  auto same = check_graph_mapping(identity_map(2), sq(), sq(), id, xs, 1e-9);
  CHECK(same.pass);
  CHECK(same.max_violation == 0.0);

  auto H = plus(sq(), sq(2.0));
  CHECK(check_graph_mapping(as_map(H), sq(), sq(2.0), id, xs, 1e-9).pass);

  auto bad = check_graph_mapping(scaled_theta(H, 1.01), sq(), sq(2.0), id, xs, 1e-9);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.witness);
  CHECK(bad.witness->size() == 1);
}

TEST_CASE("subspace invariance") {
  auto cloud = sample_punctured_ball(small_scheme(4, 32), 3);
  for (auto mask : {std::vector<bool>{true, false}, std::vector<bool>{false, true},
                    std::vector<bool>{true, true}})
    CHECK(check_subspace_invariance(identity_map(3), 1, mask, cloud, 0.0).pass);

  auto M = assemble_multi({plus(lin(), lin(2.0)), plus(sq(), sq(4.0))});
  CHECK(check_subspace_invariance(as_map(M), 1, {true, true}, cloud, 1e-12).pass);
  for (const auto& r : check_all_subspaces(as_map(M), 1, 2, cloud, 1e-12)) CHECK(r.pass);

  EvaluableMap shift{2, [](std::span<const double> in, std::span<double> out) {
                       out[0] = in[0];
                       out[1] = in[1] + 0.01;
                     }};
  auto planar = sample_punctured_ball(small_scheme(4, 32), 2);
  auto r = check_subspace_invariance(shift, 1, {true}, planar, 1e-9);
  CHECK_FALSE(r.pass);
  REQUIRE(r.witness);
  CHECK((*r.witness)[1] == 0.0);
}

TEST_CASE("halfspace behavior") {
  auto cloud = sample_punctured_ball(small_scheme(4, 64), 2);
  auto keep = check_halfspace_behavior(identity_map(2), 1, 0, cloud);
  CHECK(keep.behavior == HalfspaceBehavior::Preserves);
  CHECK(keep.report.pass);

  auto flip = check_halfspace_behavior(linear_map(diag2(1.0, -1.0)), 1, 0, cloud);
  CHECK(flip.behavior == HalfspaceBehavior::Swaps);
  CHECK(flip.report.pass);

  auto wrong = check_halfspace_behavior(linear_map(diag2(1.0, -1.0)), 1, 0, cloud, 1e-6,
                                        HalfspaceBehavior::Preserves);
  CHECK_FALSE(wrong.report.pass);
  CHECK(wrong.report.witness);

  EvaluableMap fold{2, [](std::span<const double> in, std::span<double> out) {
                      out[0] = in[0];
                      out[1] = in[0] > 0 ? in[1] : -in[1];
                    }};
  auto mixed = check_halfspace_behavior(fold, 1, 0, cloud);
  CHECK(mixed.behavior == HalfspaceBehavior::Mixed);
  CHECK_FALSE(mixed.report.pass);
  CHECK(mixed.report.witness);

  auto M = assemble_multi({plus(sq(), sq(3.0)),
                           PiecewiseHomeo(lin(), lin(-1.0), CoordChange::identity(1),
                                          SignBranch::Minus)});
  auto cloud3 = fiber_cloud(testing::vec(1, 2, {testing::poly(1, {{{2}, 1.0}}),
                                                testing::poly(1, {{{1}, 1.0}})}),
                            small_scheme(5, 32));
  CHECK(check_halfspace_behavior(as_map(M), 1, 0, cloud3).behavior ==
        HalfspaceBehavior::Preserves);
  CHECK(check_halfspace_behavior(as_map(M), 1, 1, cloud3).behavior == HalfspaceBehavior::Swaps);
}

TEST_CASE("fiber partials") {
  auto id = plus(sq(), sq());
  std::vector<double> x{0.3};
  for (double y : {-0.5, 0.05, 0.2}) {
    auto d = fiber_partials(id, x, y, 1e-6);
    REQUIRE(d.size() == 2);
    CHECK(std::abs(d[0]) <= 1e-6);
    CHECK(std::abs(d[1] - 1.0) <= 1e-6);
  }
  auto H = plus(sq(), sq(2.0));
  auto inner = fiber_partials(H, x, 0.04, 1e-6);
  CHECK(std::abs(inner[1] - 2.0) <= 1e-6);
}

TEST_CASE("bounded partials") {
  auto H = plus(sq(), sq(2.0));
  SampleScheme s;
  s.r0 = 1e-2;
  s.rho = 0.1;
  s.num_radii = 3;
  s.dirs_per_radius = 16;
  auto res = check_bounded_partials(H, fiber_cloud(sq(), s));
  CHECK(res.report.pass);
  REQUIRE(res.max_per_shell.size() == 3);
  CHECK(std::abs(res.max_per_shell[2] - res.max_per_shell[0]) <= 0.1 * res.max_per_shell[0]);
  CHECK(std::abs(res.bound - 2.0) <= 1e-6);

  auto lin_case = check_bounded_partials(plus(lin(), lin(5.0)), fiber_cloud(lin(), s));
  CHECK(lin_case.report.pass);
}

TEST_CASE("fiber construction checks") {
  auto scheme = small_scheme(6, 32);
  auto good = verify_fiber_construction(plus(sq(), sq(2.0)), scheme);
  CHECK(good.pass());
  for (const char* name : {"graph_mapping", "zero_section_exact", "case_continuity",
                           "fiber_monotonicity"})
    CHECK(good.find(name) != nullptr);

  auto xs = sample_punctured_ball(scheme, 1);
  auto neg = PiecewiseHomeo(sq(), sq(-2.0), CoordChange::identity(1), SignBranch::Minus);
  auto mono = check_fiber_monotonicity(neg, xs);
  CHECK(mono.pass);
  CHECK(mono.detail.find("decreasing") != std::string::npos);
  CHECK(check_zero_section_exact(neg, xs).pass);
  CHECK(check_case_continuity(neg, xs, 1e-12).pass);
}

TEST_CASE("bilipschitz check") {
  ToleranceConfig tol;
  BiLipEstimate e;
  e.L_forward = 2.0;
  e.L_inverse = 0.4;
  e.num_pairs = 5;
  e.witness_pair_forward = {std::vector<double>{1, 0}, std::vector<double>{0, 1}};
  e.witness_pair_inverse = e.witness_pair_forward;
  auto r = check_bilipschitz("bilipschitz_H", e, tol);
  CHECK_FALSE(r.pass);
  CHECK(r.witness);
  e.L_inverse = 0.6;
  CHECK(check_bilipschitz("bilipschitz_H", e, tol).pass);
  e.L_forward = INFINITY;
  CHECK_FALSE(check_bilipschitz("bilipschitz_H", e, tol).pass);
  e.L_forward = 2.0;
  e.num_pairs = 0;
  CHECK_FALSE(check_bilipschitz("bilipschitz_H", e, tol).pass);
}

TEST_CASE("K-equivalence bundle") {
  auto scheme = small_scheme(6, 32);
  auto id = CoordChange::identity(1);
  auto trivial = verify_K_equivalence(sq(), sq(), identity_map(2), id, scheme);
  CHECK(trivial.pass());
  REQUIRE(trivial.map_estimate);
  CHECK(trivial.map_estimate->L_forward == 1.0);

  auto v = same_contact(lin(), lin(3.0), scheme);
  auto H = synth_single(lin(), lin(3.0), id, v);
  auto bundle = verify_K_equivalence(lin(), lin(3.0), as_map(H), id, scheme);
  CHECK(bundle.pass());
  for (const char* name : {"graph_mapping", "zero_section_invariance", "bilipschitz_H",
                           "bilipschitz_h", "commutativity"})
    CHECK(bundle.find(name) != nullptr);

  auto broken = verify_K_equivalence(lin(), lin(3.0), shifted_zero_section(H, 0.01), id, scheme);
  CHECK(broken.failed() == std::vector<std::string>{"zero_section_invariance"});
  CHECK(failed_have_witness(broken));

  auto off_graph = verify_K_equivalence(sq(), sq(2.0), scaled_theta(plus(sq(), sq(2.0)), 1.01),
                                        id, scheme);
  CHECK_FALSE(off_graph.pass());
  REQUIRE(off_graph.find("graph_mapping"));
  CHECK_FALSE(off_graph.find("graph_mapping")->pass);
  CHECK(failed_have_witness(off_graph));
}

TEST_CASE("multi bundle") {
  auto scheme = small_scheme(6, 32);
  auto id = CoordChange::identity(1);
  auto H = plus(sq(), sq(2.0));
  auto single = verify_multiK(sq(), sq(2.0), assemble_multi({H}), scheme);
  auto direct = verify_K_equivalence(sq(), sq(2.0), as_map(H), id, scheme);
  CHECK(single.pass() == direct.pass());
  CHECK(single.pass());

  auto f = testing::vec(1, 2, {testing::poly(1, {{{1}, 1.0}}), testing::poly(1, {{{2}, 1.0}})});
  auto g = testing::vec(1, 2, {testing::poly(1, {{{1}, 2.0}}), testing::poly(1, {{{2}, -1.0}})});
  auto M = assemble_multi(
      {plus(lin(), lin(2.0)),
       PiecewiseHomeo(sq(), sq(-1.0), id, SignBranch::Minus)});
  auto ok = verify_multiK(f, g, M, scheme);
  CHECK(ok.pass());
  CHECK(ok.find("component_zero_section[1]") != nullptr);
  CHECK(ok.find("component_commutativity[0]") != nullptr);

  auto x1x2 = scalar(2, {{{1, 1}, 1.0}});
  auto swap = CoordChange::permutation({1, 0});
  auto forced = MultiHomeo::assemble_unchecked(
      CoordChange::identity(2),
      {PiecewiseHomeo(x1x2, x1x2, swap, SignBranch::Plus)});
  auto bad = verify_multiK(x1x2, x1x2, forced, scheme);
  CHECK_FALSE(bad.pass());
  REQUIRE(bad.find("component_commutativity[0]"));
  CHECK_FALSE(bad.find("component_commutativity[0]")->pass);
  CHECK(failed_have_witness(bad));
}

TEST_CASE("report serialization") {
  auto bundle = verify_K_equivalence(sq(), sq(), identity_map(2), CoordChange::identity(1),
                                     small_scheme(4, 16));
  auto j = bundle_to_json(bundle);
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() == bundle.checks.size());
  CHECK(j["checks"][0].contains("name"));
  auto e = estimate_to_json(*bundle.map_estimate);
  CHECK(e["L_forward"] == 1.0);
  CHECK(e.contains("num_pairs"));
}
