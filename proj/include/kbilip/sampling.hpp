#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace kbilip {

// Punctured-ball sampling plan: radii r_j = r0 * rho^j, j = 0..num_radii-1,
// and one seeded set of unit directions reused at every radius, so samples
// lie on rays through the origin.
struct SampleScheme {
  double r0 = 0.1;
  double rho = 0.5;
  int num_radii = 12;
  int dirs_per_radius = 64;
  std::uint64_t seed = 0;

  void validate() const;
  double radius(int j) const;
  double min_radius() const { return radius(num_radii - 1); }

  bool operator==(const SampleScheme&) const = default;
};

nlohmann::json scheme_to_json(const SampleScheme& s);
SampleScheme scheme_from_json(const nlohmann::json& doc, SampleScheme defaults = {});

// Points stored row-major, with the radius shell and ray each point came from.
// `group` ties together points that share a source point x (fiber samples);
// -1 means ungrouped.
class PointCloud {
 public:
  explicit PointCloud(int dim) : dim_(dim) {}

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return shell_.size(); }
  bool empty() const noexcept { return shell_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
  }
  int shell(std::size_t i) const { return shell_[i]; }
  int ray(std::size_t i) const { return ray_[i]; }
  int group(std::size_t i) const { return group_[i]; }
  double radius(std::size_t i) const { return radius_[i]; }

  void add(std::span<const double> x, int shell, int ray, double radius, int group = -1);

  const std::vector<double>& coords() const noexcept { return coords_; }

 private:
  int dim_;
  std::vector<double> coords_;
  std::vector<int> shell_, ray_, group_;
  std::vector<double> radius_;
};

// `count` unit vectors in R^n from normalized Gaussian draws. The stream is
// prefix-stable: the first m vectors of a request for count >= m are the
// same for a given seed.
std::vector<std::vector<double>> unit_directions(int n, int count, std::uint64_t seed);

// num_radii x dirs_per_radius points x = r_j * d, radius-major order.
PointCloud sample_punctured_ball(const SampleScheme& scheme, int n);

double norm(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);

}  // namespace kbilip
