#pragma once

#include <utility>
#include <vector>

#include "vefs/constitutive.hpp"
#include "vefs/field.hpp"

namespace vefs {

/// Kinetic and elastic energy of a state.  The elastic part is the
/// nonnegative proxy (s/2) * integral of tr c; it differs from the signed
/// stress-trace form by an additive constant (noted in every output header).
struct EnergyPair {
  double kinetic = 0.0;
  double elastic = 0.0;
};

EnergyPair energy(const VectorFieldR& u, const TensorFieldR& c, const ModelParams& p);

/// Pointwise FENE-P S-tensor S = c / (1 - tr c / l2).
/// Throws CutoffExceeded (with the offending point) where tr c >= l2.
TensorFieldR s_tensor(const TensorFieldR& c, double l2);

/// L1 comparison of a coarse field against a finer reference, which is
/// spectrally restricted down to the coarse grid first.  `relative` is false
/// only when the reference L1 norm vanishes, in which case `value` holds the
/// absolute L1 norm of the difference.
struct L1Error {
  double value = 0.0;
  bool relative = true;
};

L1Error l1_rel_error(const TensorFieldR& coarse, const TensorFieldR& exact);

/// One point of an error profile along the compression axis.
struct ProfilePoint {
  double y = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
};

/// Absolute and relative error of one tensor component along the x = 0
/// column (the compression axis through the origin stagnation point).
/// component: 0 = xx, 1 = xy, 2 = yy.
std::vector<ProfilePoint> pointwise_error_profile(const TensorFieldR& coarse,
                                                  const TensorFieldR& exact,
                                                  int component);

/// Relative accuracy improvement |err_c - err_b2| / |err_c|.
/// Throws DegenerateDenominator when err_c is zero.
double improvement(double err_c, double err_b2);

/// Grid scan of conformation positivity and magnitude.
struct SpdScan {
  double min_eig = 0.0;
  double max_tr = 0.0;
  int argmin_ix = 0;
  int argmin_iy = 0;
};

enum class TensorMeaning { conformation, square_root };

/// Scans min eigenvalue and max trace of c over the grid; when the stored
/// field is the square root b, c = b*b is formed pointwise and min_eig is
/// nonnegative by construction.
SpdScan spd_monitor(const TensorFieldR& q, TensorMeaning meaning);

}  // namespace vefs
