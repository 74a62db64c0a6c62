#pragma once

#include "nsstab/field.hpp"

namespace nsstab {

/// Forward FFT of a real vector field. Coefficients are normalized so the
/// zero mode equals the spatial mean of f. Rejects non-finite input, naming
/// the first offending sample.
SpectralVectorField forward_transform(const PhysicalVectorField& f);

/// Inverse FFT back to physical samples. The coefficients must be Hermitian
/// to 1e-10 relative (checked unless check_symmetry is false); rounding-level
/// imaginary residue is discarded.
PhysicalVectorField inverse_transform(const SpectralVectorField& fh, bool check_symmetry = true);

/// Scalar (single component) transforms used by diagnostics and tests.
ComplexArray forward_transform_scalar(const RealArray& f, const BoxSpec& box);
RealArray inverse_transform_scalar(const ComplexArray& fh, const BoxSpec& box);

}  // namespace nsstab
