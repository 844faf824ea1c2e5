#include "kbilip/coord_change.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace kbilip {

namespace {

double largest_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// cos/sin of multiples of pi/2 come out as 6e-17 instead of 0; snap them.
double snap(double v) {
  for (double target : {-1.0, 0.0, 1.0})
    if (std::abs(v - target) < 1e-15) return target;
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

int parse_int(const std::string& s, const std::string& label) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw CatalogError("coordinate change '" + label + "': bad integer '" + s + "'");
  }
}

}  // namespace

CoordChange::CoordChange(Kind kind, Eigen::MatrixXd forward, Eigen::MatrixXd inverse,
                         std::string label)
    : kind_(kind),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      label_(std::move(label)),
      lip_forward_(largest_singular_value(forward_)),
      lip_inverse_(largest_singular_value(inverse_)) {}

CoordChange CoordChange::identity(int n) {
  if (n < 1) throw CatalogError("identity: n must be >= 1");
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  return CoordChange(Kind::Identity, id, id, "id");
}

CoordChange CoordChange::sign_flip(const std::vector<bool>& negate) {
  const int n = static_cast<int>(negate.size());
  if (n < 1) throw CatalogError("sign flip: empty mask");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  std::string label = "sign:";
  for (int i = 0; i < n; ++i) {
    if (negate[i]) m(i, i) = -1.0;
    label += negate[i] ? '-' : '+';
  }
  return CoordChange(Kind::SignFlip, m, m, label);
}

CoordChange CoordChange::permutation(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i)
    if (sorted[i] != i) throw CatalogError("permutation: not a permutation of 0..n-1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  std::string label = "perm:";
  for (int i = 0; i < n; ++i) {
    m(i, perm[i]) = 1.0;
    if (i) label += ',';
    label += std::to_string(perm[i]);
  }
  return CoordChange(Kind::Permutation, m, m.transpose(), label);
}

CoordChange CoordChange::rotation(int n, int i, int j, int a, int steps) {
  if (steps < 1 || i < 0 || j < 0 || i >= n || j >= n || i == j)
    throw CatalogError("rotation: bad plane or step count");
  const double t = 2.0 * std::numbers::pi * a / steps;
  const double c = snap(std::cos(t)), s = snap(std::sin(t));
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  m(i, i) = c;
  m(i, j) = -s;
  m(j, i) = s;
  m(j, j) = c;
  std::string label = "rot:" + std::to_string(i) + "," + std::to_string(j) + ":" +
                      std::to_string(a) + "/" + std::to_string(steps);
  return CoordChange(Kind::Linear, m, m.transpose(), label);
}

CoordChange CoordChange::scaling(int n, double c) {
  if (!(std::isfinite(c) && c != 0.0))
    throw CatalogError("scaling: factor must be finite and nonzero");
  std::ostringstream label;
  label.precision(17);
  label << "scale:" << c;
  return CoordChange(Kind::Linear, c * Eigen::MatrixXd::Identity(n, n),
                     (1.0 / c) * Eigen::MatrixXd::Identity(n, n), label.str());
}

CoordChange CoordChange::random_linear(int n, std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(n)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  auto random_orthogonal = [&] {
    Eigen::MatrixXd g(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) g(r, c) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return Eigen::MatrixXd(qr.householderQ());
  };
  Eigen::MatrixXd q1 = random_orthogonal();
  Eigen::MatrixXd q2 = random_orthogonal();
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s(i) = scale(rng);
  Eigen::MatrixXd m = q1 * s.asDiagonal() * q2;
  Eigen::MatrixXd inv = q2.transpose() * s.cwiseInverse().asDiagonal() * q1.transpose();
  return CoordChange(Kind::Linear, m, inv,
                     "linear:" + std::to_string(seed) + ":" + std::to_string(index));
}

CoordChange CoordChange::from_label(const std::string& label, int n) {
  if (label == "id") return identity(n);
  const auto colon = label.find(':');
  if (colon == std::string::npos) throw CatalogError("unknown coordinate change '" + label + "'");
  const std::string head = label.substr(0, colon);
  const std::string body = label.substr(colon + 1);
  if (head == "sign") {
    if (static_cast<int>(body.size()) != n)
      throw CatalogError("'" + label + "': sign mask length differs from n");
    std::vector<bool> mask;
    for (char ch : body) {
      if (ch != '+' && ch != '-') throw CatalogError("'" + label + "': sign mask uses + and -");
      mask.push_back(ch == '-');
    }
    return sign_flip(mask);
  }
  if (head == "perm") {
    std::vector<int> perm;
    for (const auto& part : split(body, ',')) perm.push_back(parse_int(part, label));
    if (static_cast<int>(perm.size()) != n)
      throw CatalogError("'" + label + "': permutation length differs from n");
    return permutation(perm);
  }
  if (head == "rot") {
    const auto parts = split(body, ':');
    if (parts.size() != 2) throw CatalogError("'" + label + "': expected rot:i,j:a/N");
    const auto plane = split(parts[0], ',');
    const auto frac = split(parts[1], '/');
    if (plane.size() != 2 || frac.size() != 2)
      throw CatalogError("'" + label + "': expected rot:i,j:a/N");
    return rotation(n, parse_int(plane[0], label), parse_int(plane[1], label),
                    parse_int(frac[0], label), parse_int(frac[1], label));
  }
  if (head == "scale") {
    double c = 0.0;
    try {
      std::size_t used = 0;
      c = std::stod(body, &used);
      if (used != body.size()) throw std::invalid_argument(body);
    } catch (const std::exception&) {
      throw CatalogError("'" + label + "': bad scale factor");
    }
    return scaling(n, c);
  }
  if (head == "linear") {
    const auto parts = split(body, ':');
    if (parts.size() != 2) throw CatalogError("'" + label + "': expected linear:SEED:IDX");
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(parts[0]);
    } catch (const std::exception&) {
      throw CatalogError("'" + label + "': bad seed");
    }
    return random_linear(n, seed, parse_int(parts[1], label));
  }
  throw CatalogError("unknown coordinate change '" + label + "'");
}

void CoordChange::apply(std::span<const double> x, std::span<double> out) const {
  const int n = dim();
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += forward_(i, j) * x[j];
    out[i] = s;
  }
}

std::vector<double> CoordChange::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("coordinate change: dimension mismatch");
  std::vector<double> out(dim());
  apply(x, out);
  return out;
}

void CoordChange::apply_inverse(std::span<const double> u, std::span<double> out) const {
  const int n = dim();
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += inverse_(i, j) * u[j];
    out[i] = s;
  }
}

std::vector<double> CoordChange::apply_inverse(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim())
    throw std::invalid_argument("coordinate change: dimension mismatch");
  std::vector<double> out(dim());
  apply_inverse(u, out);
  return out;
}

CoordChange CoordChange::inverse() const {
  return CoordChange(kind_, inverse_, forward_, label_ == "id" ? "id" : "inv(" + label_ + ")");
}

bool CoordChange::operator==(const CoordChange& other) const {
  return label_ == other.label_ && forward_.rows() == other.forward_.rows() &&
         forward_ == other.forward_ && inverse_ == other.inverse_;
}

std::vector<CoordChange> build_catalog(const std::string& spec, int n, std::uint64_t seed) {
  std::vector<CoordChange> out{CoordChange::identity(n)};
  auto push = [&](CoordChange c) {
    for (const auto& existing : out)
      if (existing.matrix() == c.matrix()) return;
    out.push_back(std::move(c));
  };
  for (std::string item : split(spec, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty() || item == "id") continue;
    if (item == "signs") {
      for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<bool> neg(n);
        for (int i = 0; i < n; ++i) neg[i] = (mask >> i) & 1u;
        push(CoordChange::sign_flip(neg));
      }
    } else if (item == "perms") {
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      while (std::next_permutation(perm.begin(), perm.end())) push(CoordChange::permutation(perm));
    } else if (item.rfind("rot:", 0) == 0) {
      const int steps = parse_int(item.substr(4), item);
      if (steps < 1) throw CatalogError("rot:N needs N >= 1");
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int a = 1; a < steps; ++a) push(CoordChange::rotation(n, i, j, a, steps));
    } else if (item.rfind("linear:", 0) == 0) {
      const int count = parse_int(item.substr(7), item);
      if (count < 0) throw CatalogError("linear:N needs N >= 0");
      for (int idx = 0; idx < count; ++idx) push(CoordChange::random_linear(n, seed, idx));
    } else {
      throw CatalogError("unknown catalog entry '" + item + "'");
    }
  }
  return out;
}

}  // namespace kbilip
