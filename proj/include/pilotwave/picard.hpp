#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pilotwave/errors.hpp"

namespace pilotwave {

/// Right-hand side of x(t) = x0 + integral F(s, x(s)) ds, together with
/// the caller-declared contract the fixed-point machinery relies on:
/// a sup-norm bound K and a Lipschitz constant c in x. F may be
/// discontinuous in t; declaring the jump times lets the quadrature mesh
/// align with them so nothing is smeared across a jump.
struct ForceField {
  int dim = 1;
  std::function<void(double, std::span<const double>, std::span<double>)> eval;
  double bound = 0.0;      // K: sup |F| over the domain of interest
  double lipschitz = 0.0;  // c: |F(t,x)-F(t,y)| <= c |x-y|
  bool discontinuous_in_t = false;
  std::vector<double> jump_times;
};

enum class PicardNorm { Sup, L2 };

struct PicardConfig {
  /// Segment length is gamma / c, so the declared contraction factor per
  /// segment is alpha = gamma.
  double gamma = 0.5;
  double tolerance = 1e-10;
  int max_iterations = 60;
  double mesh_dt = 1e-3;
  PicardNorm norm = PicardNorm::Sup;
  /// Check |F| <= K at every quadrature evaluation.
  bool probe_bound = true;
};

struct PicardSegment {
  double t0 = 0.0, t1 = 0.0;
  int iterations = 0;
  double final_residual = 0.0;          // |G(x) - x| after convergence
  std::vector<double> diff_norms;       // successive-iterate distances
  std::size_t mesh_begin = 0, mesh_end = 0;  // [begin, end) into the mesh
};

struct PicardSolution {
  int dim = 1;
  double alpha = 0.0;  // declared contraction factor per segment
  std::vector<double> t;
  std::vector<double> x;  // mesh x dim
  std::vector<int> segment_of;
  std::vector<PicardSegment> segments;

  double at(std::size_t k, int d) const { return x[k * dim + d]; }
};

/// Picard iteration of the integral map on contraction segments of length
/// gamma / c (one segment when c = 0), composite-trapezoid quadrature on a
/// uniform sub-mesh with declared jump times inserted as nodes. Segment
/// endpoints chain as initial values. Throws NumericError when an iteration
/// fails to contract within the budget and ContractError when a declared
/// bound is violated.
PicardSolution picard_solve(const ForceField& field, std::span<const double> x0,
                            double t0, double T, const PicardConfig& cfg = {});

struct ContractionReport {
  struct Segment {
    int index = 0;
    int iterations = 0;
    double max_ratio = 0.0;  // successive-difference quotient
  };
  double alpha = 0.0;
  bool within_bound = true;  // every ratio <= 1.1 * alpha
  std::vector<Segment> segments;
};

/// Empirical convergence ratios of a finished solve, checked against the
/// declared contraction factor.
ContractionReport contraction_diagnostics(const PicardSolution& solution);

/// First-order lift of m q'' = f + g: x = (q, p), q' = p / m, p' = f + g.
/// The price components of the solution are C1 even when f + g jumps in t;
/// the momentum components are merely continuous. The lift declares
/// lipschitz = max(1/min m, c of f+g); the bound stays caller-declared
/// because |p| has no a-priori bound.
ForceField phase_space_lift(
    std::function<void(double, std::span<const double>, std::span<double>)>
        classical_force,
    std::function<void(double, std::span<const double>, std::span<double>)>
        quantum_force,
    std::span<const double> masses, double bound, double force_lipschitz,
    bool discontinuous_in_t = false, std::vector<double> jump_times = {});

}  // namespace pilotwave
