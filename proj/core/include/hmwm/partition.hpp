#pragma once

#include <vector>

#include "hmwm/plant.hpp"

namespace hmwm {

// Closed polyhedron {x : H x <= h}. An empty H matches everything.
struct PolyhedralCell {
  Matrix H;
  Vector h;
  bool contains(const Vector& x) const {
    return H.rows() == 0 || ((H * x - h).array() <= 0.0).all();
  }
};

// Covering family of cells in the coordinates of the unobservable filter
// state. Adjacent cells share boundaries; classify() breaks ties toward the
// lowest index, so membership is a total function.
struct Partition {
  int dim = 0;
  std::vector<PolyhedralCell> cells;
  Vector mean;      // anchor of the construction
  Matrix whitener;  // inverse square root of the covariance used to build it
  int size() const { return static_cast<int>(cells.size()); }
};

// 1-based index of the first cell containing x. The construction covers the
// whole space; if rounding ever leaves a point outside every closed cell, the
// cell with the smallest worst violation is returned instead.
int classify(const Partition& partition, const Vector& x);

// Stationary first and second moments of the loop signals feeding the
// watermark selector. The recursions treat the estimation error as zero-mean
// and the plant output as white when propagated into the unobservable block;
// both fixed points are plugged back and checked to 1e-10.
struct SteadyStats {
  Vector mean_xp, mean_yp, mean_xu;
  Matrix cov_xp, cov_yp, cov_xu, cov_e;
};

SteadyStats steady_stats(const PlantModel& plant, const ControllerConfig& cfg,
                         const Matrix& A_u, const Matrix& B_u);

// Equal-probability partition of a Gaussian into `cells` pieces.
//   dim 1: quantile slabs.
//   dim 2: equal-angle sectors around the mean in whitened coordinates, each
//          sector the intersection of at most two half-planes.
// Other dimensions are not supported.
Partition build_partition(const Vector& mean, const Matrix& cov, int cells);
Partition build_partition(const SteadyStats& stats, int cells);

}  // namespace hmwm
