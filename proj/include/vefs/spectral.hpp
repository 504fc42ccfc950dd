#pragma once

#include "vefs/field.hpp"

namespace vefs {

enum class Axis { x, y };

/// High-order exponential filter profile rho(theta) = exp(-36 theta^36),
/// theta = 2|k|/N per axis: identity at the mean mode, machine-zero at the
/// Nyquist mode, below-roundoff attenuation for |k| <= N/4.
double filter_rho(double theta);

/// Per-axis filter factor for mode index m of an N-point dimension.
double filter_factor(int signed_k, int n);

/// Multiplies every mode by rho(2|kx|/N) * rho(2|ky|/N).
void smooth_filter_inplace(SpecField& f);
SpecField smooth_filter(SpecField f);

/// Spectral derivative: multiply by i*k along the axis; the Nyquist mode's
/// derivative is set to zero.
SpecField deriv(const SpecField& f, Axis axis);

/// Fourier-space Stokes solve: for every k != 0,
/// u = (I - k k^T/|k|^2) rhs / |k|^2, and the mean mode is pinned to zero.
/// The result is divergence-free by construction.
VectorFieldS stokes_solve(const VectorFieldS& rhs);

/// max over modes of |k . u_hat|, the spectral divergence magnitude.
double spectral_divergence_max(const VectorFieldS& u);

/// max over modes of |u_hat| (for relative divergence checks).
double spectral_max_abs(const VectorFieldS& u);

/// u . grad f with filtered factors: filter u_hat and the spectral
/// derivatives of f, multiply pointwise in physical space, transform back.
SpecField advect(const SpecField& f, const VectorFieldS& u);

/// Physical-space advection term from an already filtered physical velocity;
/// the building block advect() and the time stepper share.
RealField advect_phys(const VectorFieldR& u_phys, const SpecField& f);

/// Spectral truncation onto a coarser grid: keep |kx|,|ky| <= Nc/2 (the two
/// halves of a Nyquist pair combine onto the coarse Nyquist mode, which is
/// exactly evaluation of the truncated series on the coarse points).
SpecField restrict_to(const SpecField& fine, Grid2 coarse);

}  // namespace vefs
