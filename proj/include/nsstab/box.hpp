#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace nsstab {

enum class Axis : int { X = 0, Y = 1, Z = 2 };

/// Periodic box geometry: side lengths and grid resolution per axis.
/// Wavenumber for index m along an axis of length L is k = 2*pi*mt/L,
/// where mt is the signed alias of m (mt in [-N/2, N/2)).
struct BoxSpec {
    std::array<double, 3> lengths{};
    std::array<int, 3> resolution{};

    BoxSpec() = default;
    BoxSpec(double lx, double ly, double lz, int nx, int ny, int nz)
        : lengths{lx, ly, lz}, resolution{nx, ny, nz} {
        validate();
    }

    static BoxSpec cube(double side, int n) { return BoxSpec(side, side, side, n, n, n); }

    void validate() const {
        for (int a = 0; a < 3; ++a) {
            if (!(lengths[a] > 0.0))
                throw std::invalid_argument("BoxSpec: lengths must be strictly positive (axis " +
                                            std::to_string(a) + ")");
            if (resolution[a] < 8 || resolution[a] % 2 != 0)
                throw std::invalid_argument("BoxSpec: resolution must be even and >= 8 (axis " +
                                            std::to_string(a) + ")");
        }
    }

    int nx() const { return resolution[0]; }
    int ny() const { return resolution[1]; }
    int nz() const { return resolution[2]; }
    double lx() const { return lengths[0]; }
    double ly() const { return lengths[1]; }
    double lz() const { return lengths[2]; }

    std::size_t point_count() const {
        return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny()) *
               static_cast<std::size_t>(nz());
    }
    double volume() const { return lx() * ly() * lz(); }
    double cell_volume() const { return volume() / static_cast<double>(point_count()); }

    /// Flat index, x fastest: idx = i + Nx*(j + Ny*k).
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(nx()) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny()) * k);
    }

    /// Signed alias of grid index m for an axis with n points: result in [-n/2, n/2).
    static int signed_alias(int m, int n) { return (m < n / 2) ? m : m - n; }

    /// Wavenumber component for index m on the given axis, Nyquist (mt = -n/2) zeroed.
    /// This is the single convention used by every spectral multiplier here.
    double wavenumber(Axis axis, int m) const {
        const int a = static_cast<int>(axis);
        const int n = resolution[a];
        const int mt = signed_alias(m, n);
        if (mt == -n / 2) return 0.0;
        return 2.0 * 3.14159265358979323846 * static_cast<double>(mt) / lengths[a];
    }

    bool operator==(const BoxSpec& o) const {
        return lengths == o.lengths && resolution == o.resolution;
    }
    bool operator!=(const BoxSpec& o) const { return !(*this == o); }
};

constexpr double pi = 3.14159265358979323846;

}  // namespace nsstab
