#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kbilip/sampling.hpp"

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP variant; the two return bit-identical results (reductions break ties
// on the lowest index), which the kernel tests check directly.
namespace kbilip::kernels {

enum class Exec { Serial, Parallel };

// Maps a point of dimension in_dim to out_dim values written into `out`.
using PointMap = std::function<void(std::span<const double> in, std::span<double> out)>;

std::vector<double> map_points_serial(const PointMap& f, const PointCloud& cloud, int out_dim);
std::vector<double> map_points_parallel(const PointMap& f, const PointCloud& cloud, int out_dim);
std::vector<double> map_points(const PointMap& f, const PointCloud& cloud, int out_dim,
                               Exec exec = Exec::Parallel);

struct IndexPair {
  std::uint32_t a, b;
  bool operator==(const IndexPair&) const = default;
};

// Largest ||img(a) - img(b)|| / ||dom(a) - dom(b)|| over the pairs; pairs
// with coincident domain points are skipped. index = position in `pairs`
// of the maximizer, or -1 when no pair counted.
struct PairMax {
  double ratio = 0.0;
  std::int64_t index = -1;
  std::size_t counted = 0;
  bool operator==(const PairMax&) const = default;
};

PairMax max_pair_ratio_serial(std::span<const double> dom, int dom_dim,
                              std::span<const double> img, int img_dim,
                              std::span<const IndexPair> pairs);
PairMax max_pair_ratio_parallel(std::span<const double> dom, int dom_dim,
                                std::span<const double> img, int img_dim,
                                std::span<const IndexPair> pairs);
PairMax max_pair_ratio(std::span<const double> dom, int dom_dim, std::span<const double> img,
                       int img_dim, std::span<const IndexPair> pairs, Exec exec = Exec::Parallel);

// Largest |a_i - b_i| (Euclidean over blocks of `dim`) with its block index.
struct BlockMax {
  double value = 0.0;
  std::int64_t index = -1;
  bool operator==(const BlockMax&) const = default;
};
BlockMax max_block_distance_serial(std::span<const double> a, std::span<const double> b, int dim);
BlockMax max_block_distance_parallel(std::span<const double> a, std::span<const double> b,
                                     int dim);

int max_threads();

}  // namespace kbilip::kernels
