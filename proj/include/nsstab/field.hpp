#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>

#include "nsstab/box.hpp"

namespace nsstab {

using RealArray = Eigen::ArrayXd;
using ComplexArray = Eigen::ArrayXcd;
using Complex = std::complex<double>;

/// Real-valued 3-component vector field sampled on the periodic grid,
/// x-fastest flat storage (idx = i + Nx*(j + Ny*k)).
struct PhysicalVectorField {
    BoxSpec box;
    std::array<RealArray, 3> comp;

    PhysicalVectorField() = default;
    explicit PhysicalVectorField(const BoxSpec& b) : box(b) {
        const auto n = static_cast<Eigen::Index>(b.point_count());
        for (auto& c : comp) c = RealArray::Zero(n);
    }

    RealArray& operator[](int c) { return comp[static_cast<std::size_t>(c)]; }
    const RealArray& operator[](int c) const { return comp[static_cast<std::size_t>(c)]; }

    bool all_finite() const {
        for (const auto& c : comp)
            if (!c.allFinite()) return false;
        return true;
    }

    /// Pointwise Euclidean magnitude |f|(x) as a flat array.
    RealArray magnitude() const {
        return (comp[0].square() + comp[1].square() + comp[2].square()).sqrt();
    }

    /// First non-finite sample, as "component c, index (i,j,k)"; empty if none.
    std::string first_non_finite() const;
};

/// Fourier coefficients of a real 3-component field, full complex cube per
/// component, same x-fastest layout over mode indices. The zero mode equals
/// the spatial mean. Hermitian symmetry (coef at -k conjugate of coef at k)
/// is the representation invariant for real fields.
struct SpectralVectorField {
    BoxSpec box;
    std::array<ComplexArray, 3> comp;

    SpectralVectorField() = default;
    explicit SpectralVectorField(const BoxSpec& b) : box(b) {
        const auto n = static_cast<Eigen::Index>(b.point_count());
        for (auto& c : comp) c = ComplexArray::Zero(n);
    }

    ComplexArray& operator[](int c) { return comp[static_cast<std::size_t>(c)]; }
    const ComplexArray& operator[](int c) const { return comp[static_cast<std::size_t>(c)]; }

    double max_coefficient_magnitude() const {
        double m = 0.0;
        for (const auto& c : comp) m = std::max(m, c.abs().maxCoeff());
        return m;
    }

    bool all_finite() const {
        for (const auto& c : comp)
            if (!c.allFinite()) return false;
        return true;
    }

    SpectralVectorField& operator+=(const SpectralVectorField& o) {
        for (int c = 0; c < 3; ++c) comp[c] += o.comp[c];
        return *this;
    }
    SpectralVectorField& operator-=(const SpectralVectorField& o) {
        for (int c = 0; c < 3; ++c) comp[c] -= o.comp[c];
        return *this;
    }
    SpectralVectorField& operator*=(double s) {
        for (auto& c : comp) c *= s;
        return *this;
    }

    friend SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) {
        a += b;
        return a;
    }
    friend SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) {
        a -= b;
        return a;
    }
    friend SpectralVectorField operator*(double s, SpectralVectorField a) {
        a *= s;
        return a;
    }
};

/// Largest Hermitian-symmetry defect max|f(-k) - conj(f(k))| relative to the
/// largest coefficient magnitude. 0 for exactly real-representable data.
double hermitian_defect(const SpectralVectorField& fh);

/// max_k |k . u(k)| / max_k |u(k)| with the Nyquist-zeroed wavenumbers.
double divergence_rel(const SpectralVectorField& fh);

}  // namespace nsstab
