#include "kbilip/sampling.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace kbilip {

void SampleScheme::validate() const {
  if (!(r0 > 0.0)) throw std::invalid_argument("scheme: r0 must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("scheme: rho must lie in (0,1)");
  if (num_radii < 0) throw std::invalid_argument("scheme: num_radii must be >= 0");
  if (dirs_per_radius < 0) throw std::invalid_argument("scheme: dirs_per_radius must be >= 0");
}

double SampleScheme::radius(int j) const { return r0 * std::pow(rho, j); }

nlohmann::json scheme_to_json(const SampleScheme& s) {
  return {{"r0", s.r0},
          {"rho", s.rho},
          {"num_radii", s.num_radii},
          {"dirs_per_radius", s.dirs_per_radius},
          {"seed", s.seed}};
}

SampleScheme scheme_from_json(const nlohmann::json& doc, SampleScheme s) {
  if (doc.contains("r0")) s.r0 = doc.at("r0").get<double>();
  if (doc.contains("rho")) s.rho = doc.at("rho").get<double>();
  if (doc.contains("num_radii")) s.num_radii = doc.at("num_radii").get<int>();
  if (doc.contains("dirs_per_radius")) s.dirs_per_radius = doc.at("dirs_per_radius").get<int>();
  if (doc.contains("seed")) s.seed = doc.at("seed").get<std::uint64_t>();
  s.validate();
  return s;
}

void PointCloud::add(std::span<const double> x, int shell, int ray, double radius, int group) {
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("PointCloud::add: dimension " + std::to_string(x.size()) +
                                " != " + std::to_string(dim_));
  coords_.insert(coords_.end(), x.begin(), x.end());
  shell_.push_back(shell);
  ray_.push_back(ray);
  radius_.push_back(radius);
  group_.push_back(group);
}

std::vector<std::vector<double>> unit_directions(int n, int count, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("unit_directions: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> dirs;
  dirs.reserve(count);
  while (static_cast<int>(dirs.size()) < count) {
    std::vector<double> d(n);
    for (double& c : d) c = gauss(rng);
    const double len = norm(d);
    if (len < 1e-12) continue;
    for (double& c : d) c /= len;
    dirs.push_back(std::move(d));
  }
  return dirs;
}

PointCloud sample_punctured_ball(const SampleScheme& scheme, int n) {
  scheme.validate();
  if (n < 1) throw std::invalid_argument("sample_punctured_ball: n must be >= 1");
  PointCloud cloud(n);
  const auto dirs = unit_directions(n, scheme.dirs_per_radius, scheme.seed);
  std::vector<double> x(n);
  for (int j = 0; j < scheme.num_radii; ++j) {
    const double r = scheme.radius(j);
    for (int d = 0; d < scheme.dirs_per_radius; ++d) {
      for (int i = 0; i < n; ++i) x[i] = r * dirs[d][i];
      cloud.add(x, j, d, r);
    }
  }
  return cloud;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace kbilip
