#pragma once

#include "mixedreg/core/errors.hpp"
#include "mixedreg/geometry/segment_set.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

namespace mixedreg::geometry {

struct RatioSample {
  Point2 center;
  double radius;
  double ratio;
};

/// Two-sided estimate of the constants in c1 r^l <= ρ(B(x,r) ∩ F) <= c2 r^l.
struct RegularityReport {
  int l = 1;
  double c1_hat = 0.0;
  double c2_hat = 0.0;
  std::vector<RatioSample> samples;
};

/// Measures ρ(F ∩ B(x, r)) / r exactly by segment-disc clipping. F is first
/// rescaled to unit diameter; radii are interpreted in the rescaled units and
/// must lie in ]0, 1[.
inline RegularityReport ahlfors_regularity(const SegmentSet& set, std::span<const Point2> centers,
                                           std::span<const double> radii) {
  require(!set.empty(), "ahlfors_regularity: empty set");
  require(set.total_length() > 0.0, "ahlfors_regularity: set carries no arclength");
  require(!centers.empty() && !radii.empty(), "ahlfors_regularity: need centers and radii");
  const double diam = set.diameter();
  const Point2 shift = set.bounding_box().center();
  const SegmentSet unit = set.transformed(shift, 1.0 / diam);

  RegularityReport report;
  report.c1_hat = std::numeric_limits<double>::infinity();
  report.c2_hat = 0.0;
  for (const Point2& c : centers) {
    const Point2 cu = (c - shift) / diam;
    require(dist_to_set(cu, unit) <= 1e-9, "ahlfors_regularity: center off the set");
    for (double r : radii) {
      require(r > 0.0 && r < 1.0, "ahlfors_regularity: radius outside ]0,1[");
      const double ratio = unit.measure_in_disc(cu, r) / r;
      report.samples.push_back({c, r, ratio});
      report.c1_hat = std::min(report.c1_hat, ratio);
      report.c2_hat = std::max(report.c2_hat, ratio);
    }
  }
  return report;
}

}  // namespace mixedreg::geometry
