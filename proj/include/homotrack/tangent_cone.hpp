#pragma once

// Branch directions at a singular point z_b = (u_b, p_b). With A = [F_u, F_p] of
// corank one, null(A) = span{(Q1; q1), (Q2; q2)} and Lambda spans null(A^T). The
// restricted scalar map g(a) = Lambda^T F(z_b + a1 (Q1; q1) + a2 (Q2; q2)) has a
// quadratic leading part whose real zero lines are the tangent cone.

#include <optional>
#include <vector>

#include "homotrack/model.hpp"
#include "homotrack/pse_endgame.hpp"
#include "homotrack/types.hpp"

namespace homotrack {

struct TangentFrame {
  DenseMatrix A;
  Vector Q1;
  Vector Q2;
  double q1 = 0.0;
  double q2 = 0.0;
  Vector Lambda;
  /// dim null(A). 1 means a regular (or fold) point: only (Q1; q1) is meaningful.
  std::size_t null_dim = 2;
  Vector singular_values;
};

struct FrameOptions {
  /// The smallest singular value counts as zero when it is below gap * the next one.
  double rank_gap = 1e-2;
  /// Absolute cutoff used when A has a single row (no gap to measure against).
  double scalar_cutoff = 1e-5;
};

/// Throws UnsupportedCorank when more than one singular value collapses. A regular
/// point returns a frame with null_dim = 1 (callers treat it as NotABifurcation).
[[nodiscard]] TangentFrame build_frame(const ParametricSystem& sys, const Vector& u_b, double p_b,
                                       const FrameOptions& options = {});

struct QuadraticModel {
  Eigen::Matrix2d H;
  double g0 = 0.0;
  Eigen::Vector2d gradient;
  double step = 0.0;
};

/// Nine-point central differences of g with step 1e-4 * max(1, ||u_b||) unless given.
[[nodiscard]] QuadraticModel quadratic_model(const ParametricSystem& sys, const TangentFrame& frame,
                                             const Vector& u_b, double p_b, double step = 0.0);

struct TangentDirection {
  Eigen::Vector2d a;
  Vector delta_u;
  double delta_p = 0.0;

  [[nodiscard]] Vector stacked() const;
};

enum class ConeKind { TwoLines, OneLine, Complex, Degenerate };

[[nodiscard]] const char* to_string(ConeKind kind) noexcept;

struct ConeResult {
  ConeKind kind = ConeKind::Complex;
  std::vector<TangentDirection> directions;  ///< unit (du, dp), +/- pairs, line by line
};

[[nodiscard]] ConeResult cone_directions(const Eigen::Matrix2d& H, const TangentFrame& frame);

struct BranchSeed {
  PathPoint point;
  TangentDirection direction;
};

struct SeedOptions {
  double h_branch = 0.1;
  /// Secant pointing from z_b back toward the previous path sample; directions within
  /// `back_angle_deg` of it are dropped. Empty -> nothing is dropped.
  Vector back_secant;
  double back_angle_deg = 10.0;
};

/// Predictor z_b + h d corrected on [F(z); d^T (z - z_b) - h] (inflated Newton as fallback).
/// Throws NoBranchFound when no direction yields a corrected point.
[[nodiscard]] std::vector<BranchSeed> seed_branches(const ParametricSystem& sys, const BifurcationRecord& record,
                                                    const std::vector<TangentDirection>& directions,
                                                    const SeedOptions& options, const TrackerConfig& config);

/// Angle in degrees between two (n+1)-vectors.
[[nodiscard]] double angle_deg(const Vector& a, const Vector& b);

}  // namespace homotrack
