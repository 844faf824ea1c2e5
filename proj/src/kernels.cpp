#include "kbilip/kernels.hpp"

#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kbilip::kernels {

namespace {

inline double block_distance(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Candidate (value, index) wins if strictly larger, or equal with a smaller
// index. NaN ratios are propagated as +inf so a broken map is never hidden.
inline bool better(double v, std::int64_t i, double best_v, std::int64_t best_i) {
  if (best_i < 0) return true;
  if (v > best_v) return true;
  return v == best_v && i < best_i;
}

inline double pair_ratio(std::span<const double> dom, int dom_dim, std::span<const double> img,
                         int img_dim, IndexPair p, bool& counted) {
  const double dd = block_distance(dom.data() + std::size_t(p.a) * dom_dim,
                                   dom.data() + std::size_t(p.b) * dom_dim, dom_dim);
  counted = dd > 0.0;
  if (!counted) return 0.0;
  const double di = block_distance(img.data() + std::size_t(p.a) * img_dim,
                                   img.data() + std::size_t(p.b) * img_dim, img_dim);
  const double r = di / dd;
  return std::isnan(r) ? INFINITY : r;
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<double> map_points_serial(const PointMap& f, const PointCloud& cloud, int out_dim) {
  std::vector<double> out(cloud.size() * out_dim);
  for (std::size_t i = 0; i < cloud.size(); ++i)
    f(cloud.point(i), std::span<double>(out.data() + i * out_dim, out_dim));
  return out;
}

std::vector<double> map_points_parallel(const PointMap& f, const PointCloud& cloud, int out_dim) {
  std::vector<double> out(cloud.size() * out_dim);
  const auto n = static_cast<std::int64_t>(cloud.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      f(cloud.point(i), std::span<double>(out.data() + i * out_dim, out_dim));
    } catch (...) {
#pragma omp critical(kbilip_map_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<double> map_points(const PointMap& f, const PointCloud& cloud, int out_dim,
                               Exec exec) {
  return exec == Exec::Serial ? map_points_serial(f, cloud, out_dim)
                              : map_points_parallel(f, cloud, out_dim);
}

PairMax max_pair_ratio_serial(std::span<const double> dom, int dom_dim,
                              std::span<const double> img, int img_dim,
                              std::span<const IndexPair> pairs) {
  PairMax best;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    bool counted = false;
    const double r = pair_ratio(dom, dom_dim, img, img_dim, pairs[i], counted);
    if (!counted) continue;
    ++best.counted;
    if (better(r, static_cast<std::int64_t>(i), best.ratio, best.index)) {
      best.ratio = r;
      best.index = static_cast<std::int64_t>(i);
    }
  }
  return best;
}

PairMax max_pair_ratio_parallel(std::span<const double> dom, int dom_dim,
                                std::span<const double> img, int img_dim,
                                std::span<const IndexPair> pairs) {
  PairMax best;
  const auto n = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel
  {
    PairMax local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      bool counted = false;
      const double r = pair_ratio(dom, dom_dim, img, img_dim, pairs[i], counted);
      if (!counted) continue;
      ++local.counted;
      if (better(r, i, local.ratio, local.index)) {
        local.ratio = r;
        local.index = i;
      }
    }
#pragma omp critical(kbilip_pair_max)
    {
      best.counted += local.counted;
      if (local.index >= 0 && better(local.ratio, local.index, best.ratio, best.index)) {
        best.ratio = local.ratio;
        best.index = local.index;
      }
    }
  }
  return best;
}

PairMax max_pair_ratio(std::span<const double> dom, int dom_dim, std::span<const double> img,
                       int img_dim, std::span<const IndexPair> pairs, Exec exec) {
  return exec == Exec::Serial ? max_pair_ratio_serial(dom, dom_dim, img, img_dim, pairs)
                              : max_pair_ratio_parallel(dom, dom_dim, img, img_dim, pairs);
}

BlockMax max_block_distance_serial(std::span<const double> a, std::span<const double> b,
                                   int dim) {
  BlockMax best;
  const std::size_t blocks = a.size() / dim;
  for (std::size_t i = 0; i < blocks; ++i) {
    double d = block_distance(a.data() + i * dim, b.data() + i * dim, dim);
    if (std::isnan(d)) d = INFINITY;
    if (better(d, static_cast<std::int64_t>(i), best.value, best.index)) {
      best.value = d;
      best.index = static_cast<std::int64_t>(i);
    }
  }
  return best;
}

BlockMax max_block_distance_parallel(std::span<const double> a, std::span<const double> b,
                                     int dim) {
  BlockMax best;
  const auto blocks = static_cast<std::int64_t>(a.size() / dim);
#pragma omp parallel
  {
    BlockMax local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < blocks; ++i) {
      double d = block_distance(a.data() + i * dim, b.data() + i * dim, dim);
      if (std::isnan(d)) d = INFINITY;
      if (better(d, i, local.value, local.index)) {
        local.value = d;
        local.index = i;
      }
    }
#pragma omp critical(kbilip_block_max)
    if (local.index >= 0 && better(local.value, local.index, best.value, best.index)) {
      best = local;
    }
  }
  return best;
}

}  // namespace kbilip::kernels
