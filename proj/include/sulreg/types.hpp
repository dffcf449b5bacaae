#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sulreg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Index = std::size_t;

/// Ascending, duplicate-free list of correspondence indices.
using IndexSet = std::vector<Index>;

/// Seeded generator shared by every stochastic step of a run.
using Rng = std::mt19937_64;

using PointCloud = std::vector<Vec3>;

/// Proper rigid motion p -> rotation * p + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 operator()(const Vec3& p) const { return rotation * p + translation; }

  /// this ∘ other
  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  bool operator==(const RigidTransform& o) const {
    return rotation == o.rotation && translation == o.translation;
  }
};

/// A putative source/target match plus the per-correspondence state the
/// registration loop carries across rounds.
struct Correspondence {
  Vec3 source = Vec3::Zero();
  Vec3 target = Vec3::Zero();
  std::optional<Vec3> source_normal;
  std::optional<Vec3> target_normal;
  std::uint32_t weight = 0;
  std::optional<double> prev_residual;
  std::optional<double> curr_residual;

  Correspondence() = default;
  Correspondence(Vec3 s, Vec3 t) : source(std::move(s)), target(std::move(t)) {}
};

using CorrespondenceSet = std::vector<Correspondence>;

enum class ErrorCode {
  InvalidArgument,
  DegenerateInput,
  EmptyCloud,
  DegenerateNeighborhood,
  MissingNormals,
  DegenerateDistribution,
  EmptyResult,
  TooFewCorrespondences,
  MissingResidual,
  ParseError,
  UnsupportedFormat,
  IndexOutOfRange,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace sulreg

namespace sulreg {

/// Difference vectors between two correspondences i < j (indices into the
/// full correspondence set) and their length ratio |v_source| / |v_target|.
struct LineVector {
  Index i = 0;
  Index j = 0;
  Vec3 v_source = Vec3::Zero();
  Vec3 v_target = Vec3::Zero();
  double scale_ratio = 1.0;
};

using LineVectorSet = std::vector<LineVector>;

}  // namespace sulreg
