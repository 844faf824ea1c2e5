#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <omp.h>

#include "kbilip/kernels.hpp"
#include "kbilip/verifier.hpp"
#include "support.hpp"

using namespace kbilip;
using namespace kbilip::kernels;

namespace {

void bumpy(std::span<const double> in, std::span<double> out) {
  out[0] = std::sin(3.0 * in[0]) + in[1] * in[2];
  out[1] = in[1] - std::cos(in[0] * in[2]);
  out[2] = std::exp(-in[2]) * in[0];
}

PointCloud cloud3() { return sample_punctured_ball(testing::small_scheme(12, 500, 3), 3); }

}  // namespace

TEST_CASE("map_points agrees bit for bit") {
  auto c = cloud3();
  auto s = map_points_serial(bumpy, c, 3);
  for (int threads : {1, 2, 4, 8}) {
    omp_set_num_threads(threads);
    CHECK(map_points_parallel(bumpy, c, 3) == s);
  }
  CHECK(map_points(bumpy, c, 3, Exec::Serial) == s);
  CHECK(s.size() == 3 * c.size());
}

TEST_CASE("max_pair_ratio agrees bit for bit") {
  auto c = cloud3();
  auto img = map_points_serial(bumpy, c, 3);
  auto pairs = build_pairs(c, {});
  REQUIRE(pairs.size() > 1000);
  auto s = max_pair_ratio_serial(c.coords(), 3, img, 3, pairs);
  CHECK(s.index >= 0);
  CHECK(s.counted == pairs.size());
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    CHECK(max_pair_ratio_parallel(c.coords(), 3, img, 3, pairs) == s);
  }
}

TEST_CASE("ties resolve to the lowest index") {
  std::vector<double> dom{0, 1, 2, 3, 4, 5};
  std::vector<double> img{0, 2, 4, 6, 8, 10};
  std::vector<IndexPair> pairs{{0, 1}, {2, 3}, {4, 5}, {1, 0}};
  auto s = max_pair_ratio_serial(dom, 1, img, 1, pairs);
  CHECK(s.ratio == 2.0);
  CHECK(s.index == 0);
  CHECK(max_pair_ratio_parallel(dom, 1, img, 1, pairs) == s);

  std::vector<double> a{1, 1, 1}, b{2, 2, 2};
  CHECK(max_block_distance_serial(a, b, 1).index == 0);
  CHECK(max_block_distance_parallel(a, b, 1).index == 0);
}

TEST_CASE("degenerate inputs") {
  std::vector<double> dom{1, 1};
  std::vector<IndexPair> pairs{{0, 1}};
  auto s = max_pair_ratio_serial(dom, 1, dom, 1, pairs);
  CHECK(s.index == -1);
  CHECK(s.counted == 0);
  CHECK(max_pair_ratio_parallel(dom, 1, dom, 1, pairs) == s);
  CHECK(max_pair_ratio_parallel(dom, 1, dom, 1, {}) == PairMax{});
  CHECK(max_block_distance_parallel({}, {}, 2) == BlockMax{});
}

TEST_CASE("max_block_distance agrees bit for bit") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d;
  std::vector<double> a(3 * 20000), b(a.size());
  for (auto& v : a) v = d(rng);
  for (auto& v : b) v = d(rng);
  auto s = max_block_distance_serial(a, b, 3);
  for (int threads : {2, 5, 8}) {
    omp_set_num_threads(threads);
    CHECK(max_block_distance_parallel(a, b, 3) == s);
  }
  CHECK(max_threads() >= 1);
}
