#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kbilip {

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Source coordinate change h : (R^n, 0) -> (R^n, 0) from a fixed catalog of
// linear maps, carrying its exact inverse and Lipschitz constants.
//
// Labels are self-describing so a change can be rebuilt from a report:
//   id                      identity
//   sign:+-+                negate the variables marked '-'
//   perm:2,0,1              h(x)_i = x_{perm[i]}
//   rot:i,j:a/N             rotation by 2*pi*a/N in the (x_i, x_j) plane
//   scale:c                 x -> c x
//   linear:SEED:IDX         seeded well-conditioned random linear map
class CoordChange {
 public:
  enum class Kind { Identity, SignFlip, Permutation, Linear };

  static CoordChange identity(int n);
  static CoordChange sign_flip(const std::vector<bool>& negate);
  static CoordChange permutation(const std::vector<int>& perm);
  static CoordChange rotation(int n, int i, int j, int a, int steps);
  static CoordChange scaling(int n, double c);
  static CoordChange random_linear(int n, std::uint64_t seed, int index);
  static CoordChange from_label(const std::string& label, int n);

  Kind kind() const noexcept { return kind_; }
  int dim() const noexcept { return static_cast<int>(forward_.rows()); }
  const std::string& label() const noexcept { return label_; }
  const Eigen::MatrixXd& matrix() const noexcept { return forward_; }
  const Eigen::MatrixXd& inverse_matrix() const noexcept { return inverse_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;
  void apply_inverse(std::span<const double> u, std::span<double> out) const;
  std::vector<double> apply_inverse(std::span<const double> u) const;

  // Largest singular values of the forward and inverse matrices.
  double lipschitz() const noexcept { return lip_forward_; }
  double inverse_lipschitz() const noexcept { return lip_inverse_; }

  CoordChange inverse() const;

  // Bit-equal matrices and equal labels.
  bool operator==(const CoordChange& other) const;

 private:
  CoordChange(Kind kind, Eigen::MatrixXd forward, Eigen::MatrixXd inverse, std::string label);

  Kind kind_;
  Eigen::MatrixXd forward_;
  Eigen::MatrixXd inverse_;
  std::string label_;
  double lip_forward_;
  double lip_inverse_;
};

// Comma-separated catalog spec: "id", "signs", "perms", "rot:N", "linear:N".
// The identity is always the first entry; duplicates (same matrix) are dropped.
std::vector<CoordChange> build_catalog(const std::string& spec, int n,
                                       std::uint64_t seed = 0);

}  // namespace kbilip
