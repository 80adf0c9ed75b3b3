#pragma once

#include <algorithm>

namespace pontryagin {

// Every numerical threshold the library uses lives here.
struct Tolerances {
  // dense_spectra
  double hermitian_check = 1e-12;      // relative to ||C||_max
  double real_snap = 1e-10;            // |Im l| <= real_snap * (1 + ||X||_max) snaps to the axis

  // indefinite_core
  double nonpositive = 1e-8;           // [v,v]_H <= this for unit v
  double cluster_abs = 1e-6;
  double cluster_rel = 1e-8;           // cluster radius = max(abs, rel * ||X||_max)
  double cluster_growth = 10.0;        // radius factor per retry when the candidate is not unique
  int cluster_levels = 3;
  double resolvent_gap = 1e-12;        // min distance of z to the spectrum, relative to ||X||_max

  // nevanlinna
  double root_rel = 1e-10;             // |Q(z0)| <= root_rel * (1 + scale)
  double interior_im = 1e-8;           // Im z0 >= this to accept an interior GZNT
  double limit_spread = 0.1;           // relative spread allowed in the nontangential limit

  double cluster_radius(double x_norm) const { return std::max(cluster_abs, cluster_rel * x_norm); }
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace pontryagin
