#pragma once

#include <array>

#include "nsstab/field.hpp"

namespace nsstab {

/// Precomputed per-box wavenumber tables (flattened, x-fastest like the
/// coefficient arrays). Shared, immutable after construction.
struct WavenumberTable {
    RealArray k[3];      // Nyquist-zeroed signed wavenumbers per axis
    RealArray k2;        // kx^2 + ky^2 + kz^2 (same convention)
    RealArray k2_full;   // |k|^2 with the Nyquist mode kept (viscous factor)
    RealArray inv_k2;    // 1/k2 where k2 > 0, else 0
    RealArray dealias;   // 1 inside the 2/3-rule band, 0 outside

    static const WavenumberTable& get(const BoxSpec& box);
};

/// Spectral derivative along one axis: coefficients multiplied by i*k_axis,
/// Nyquist mode zeroed (odd-derivative convention keeps real fields real).
SpectralVectorField derivative(const SpectralVectorField& fh, Axis axis);
ComplexArray derivative_scalar(const ComplexArray& fh, const BoxSpec& box, Axis axis);

/// curl(f), spectrally.
SpectralVectorField curl(const SpectralVectorField& fh);

/// Leray projection onto divergence-free fields: u <- u - k (k.u)/|k|^2 for
/// k != 0; the zero mode (and pure-Nyquist content, which carries no
/// resolvable divergence) passes through unchanged.
SpectralVectorField leray_project(const SpectralVectorField& fh);

/// 2/3-rule truncation: zero every coefficient with |mt_axis| > N_axis/3.
SpectralVectorField dealias(const SpectralVectorField& fh);

/// All nine physical derivative arrays d_a f_c (a = axis, c = component).
/// grad[a][c] = d/dx_a f_c sampled on the grid.
std::array<std::array<RealArray, 3>, 3> gradient_physical(const SpectralVectorField& fh);

/// Largest retained wavenumber magnitude per axis (2/3 band if dealiased).
double max_retained_wavenumber(const BoxSpec& box, bool dealiased);

/// Energy fraction carried by modes in the top third of the retained band
/// (max-norm shells); the resolution-health indicator.
double spectral_tail_ratio(const SpectralVectorField& fh);

}  // namespace nsstab
