#pragma once

#include <limits>
#include <vector>

#include "nsstab/field.hpp"

namespace nsstab {

constexpr double inf = std::numeric_limits<double>::infinity();

/// Exponent pair for an anisotropic norm: p_xy over the (x,y) plane applied
/// to the r_z norm of each z-column. Supported: p_xy in {2, 4, inf},
/// r_z in {2, inf}.
struct MixedNormSpec {
    double p_xy = 2.0;
    double r_z = inf;
};

/// Equal-weight quadrature Lp norm of the pointwise Euclidean magnitude,
/// (sum |f|^p dV)^(1/p); p = inf is the grid max. Exact for trig polynomials
/// below the quadrature band. Rejects p < 1.
double lp_norm(const PhysicalVectorField& f, double p);
double lp_norm_scalar(const RealArray& values, const BoxSpec& box, double p);

/// Mixed norm per MixedNormSpec: inner z-norm per (x,y) column (l2 with dz
/// weight, or column max), then the p_xy norm over the plane with dA weight.
double mixed_norm(const PhysicalVectorField& f, const MixedNormSpec& spec);
double mixed_norm_scalar(const RealArray& magnitude, const BoxSpec& box, const MixedNormSpec& spec);

/// L2-type norms evaluated spectrally (Parseval); exact matches of the grid
/// quadrature for the same field.
double l2_norm(const SpectralVectorField& fh);
double l2_norm_sq(const SpectralVectorField& fh);
/// ||grad f||_L2^2 = V sum |k|^2 |f(k)|^2 (Nyquist-zeroed convention).
double grad_l2_sq(const SpectralVectorField& fh);
/// ||d/dx_a f||_L2^2.
double directional_grad_l2_sq(const SpectralVectorField& fh, Axis axis);
/// ||grad d/dz f||_L2^2.
double grad_dz_l2_sq(const SpectralVectorField& fh);

/// 2D scalar- or vector-valued field on an (x,y) grid, x-fastest storage.
struct PlaneField {
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    std::vector<RealArray> comp;  // 1 (scalar) to 3 components

    double cell_area() const { return lx * ly / (static_cast<double>(nx) * ny); }
    double area() const { return lx * ly; }
    RealArray magnitude() const;
};

double plane_lp_norm(const PlaneField& g, double p);
/// ||grad g||_L2 via 2D spectral differentiation.
double plane_grad_l2(const PlaneField& g);
double plane_mean(const RealArray& values);

/// 2D transforms (x-fastest layout), zero mode = spatial mean.
ComplexArray plane_fft_forward(const RealArray& g, int nx, int ny);
RealArray plane_fft_inverse(const ComplexArray& gh, int nx, int ny);

/// Ladyzhenskaya ratio ||g||_L4^2 / (||g||_L2 ||grad g||_L2) for a mean-free
/// 2D field (the mean is subtracted here; the torus inequality needs it).
/// Rejects the zero field (0/0).
double ladyzhenskaya_ratio(const PlaneField& g);

/// Directional embedding ratio ||f||_L6 / prod_a ||d_a f||_L2^(1/3) for a
/// mean-free 3D field. Rejects any vanishing directional derivative (the
/// torus inequality degenerates for fields constant in one direction).
double embedding_l6_ratio(const PhysicalVectorField& f);

}  // namespace nsstab
