#pragma once

#include <stdexcept>
#include <string>

namespace vefs {

/// Base class for all solver errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A matrix required to be SPD has a non-positive eigenvalue or determinant.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(double min_eig)
      : Error("matrix is not positive definite (min eigenvalue/determinant " +
              std::to_string(min_eig) + ")"),
        min_eig(min_eig) {}
  double min_eig;
};

/// trace(b) fell below the degeneracy threshold in the 2D symmetrizer solve.
class DegenerateTrace : public Error {
 public:
  explicit DegenerateTrace(double trace)
      : Error("degenerate trace in symmetrizer solve: " + std::to_string(trace)),
        trace(trace) {}
  double trace;
};

/// det((tr b)I - b) fell below the degeneracy threshold in the 3D symmetrizer.
class DegenerateSystem : public Error {
 public:
  explicit DegenerateSystem(double det)
      : Error("degenerate symmetrizer system: det = " + std::to_string(det)),
        det(det) {}
  double det;
};

/// Pivoted linear solve hit a pivot below tolerance.
class SingularSystem : public Error {
 public:
  explicit SingularSystem(double pivot)
      : Error("singular linear system: pivot = " + std::to_string(pivot)),
        pivot(pivot) {}
  double pivot;
};

/// FENE-P Peterlin factor blew up: tr c reached the extensibility cutoff l2.
class CutoffExceeded : public Error {
 public:
  CutoffExceeded(double trace, double l2, int ix = -1, int iy = -1)
      : Error("FENE-P cutoff exceeded: tr c = " + std::to_string(trace) +
              " >= l2 = " + std::to_string(l2) +
              (ix >= 0 ? " at grid point (" + std::to_string(ix) + ", " +
                             std::to_string(iy) + ")"
                       : "")),
        trace(trace),
        l2(l2),
        ix(ix),
        iy(iy) {}
  double trace;
  double l2;
  int ix;
  int iy;
};

/// Fields or grids of incompatible sizes were combined.
class SizeMismatch : public Error {
 public:
  explicit SizeMismatch(const std::string& what) : Error("size mismatch: " + what) {}
};

/// Initial perturbation makes b(x,0) lose positive definiteness somewhere.
class PerturbationTooLarge : public Error {
 public:
  explicit PerturbationTooLarge(double min_eig)
      : Error("initial perturbation too large: min eigenvalue of b(x,0) = " +
              std::to_string(min_eig)),
        min_eig(min_eig) {}
  double min_eig;
};

/// Relative-improvement metric with a zero baseline error.
class DegenerateDenominator : public Error {
 public:
  DegenerateDenominator() : Error("improvement metric undefined: baseline error is zero") {}
};

/// Bad key or value in a run configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

/// Filesystem-level failure while reading or writing artifacts.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

/// No snapshot exists at the requested time.
class MissingSnapshot : public Error {
 public:
  explicit MissingSnapshot(const std::string& what) : Error("missing snapshot: " + what) {}
};

/// Unsupported export quantity (or one missing a required parameter).
class UnknownQuantity : public Error {
 public:
  explicit UnknownQuantity(const std::string& what) : Error("unknown quantity: " + what) {}
};

}  // namespace vefs
