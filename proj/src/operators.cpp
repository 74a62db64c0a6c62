#include "nsstab/operators.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "nsstab/transform.hpp"

namespace nsstab {

namespace {

using TableKey = std::tuple<std::array<int, 3>, std::array<double, 3>>;

}  // namespace

const WavenumberTable& WavenumberTable::get(const BoxSpec& box) {
    static std::mutex mtx;
    static std::map<TableKey, WavenumberTable> cache;
    std::lock_guard<std::mutex> lock(mtx);
    TableKey key{box.resolution, box.lengths};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    WavenumberTable t;
    const auto n = static_cast<Eigen::Index>(box.point_count());
    for (auto& ka : t.k) ka = RealArray::Zero(n);
    t.k2_full = RealArray::Zero(n);
    t.dealias = RealArray::Ones(n);

    const int nx = box.nx(), ny = box.ny(), nz = box.nz();
    for (int k = 0; k < nz; ++k) {
        const int mz = BoxSpec::signed_alias(k, nz);
        const double kz = box.wavenumber(Axis::Z, k);
        const double kz_full = 2.0 * pi * mz / box.lz();
        for (int j = 0; j < ny; ++j) {
            const int my = BoxSpec::signed_alias(j, ny);
            const double ky = box.wavenumber(Axis::Y, j);
            const double ky_full = 2.0 * pi * my / box.ly();
            for (int i = 0; i < nx; ++i) {
                const int mx = BoxSpec::signed_alias(i, nx);
                const double kx = box.wavenumber(Axis::X, i);
                const double kx_full = 2.0 * pi * mx / box.lx();
                const auto idx = static_cast<Eigen::Index>(box.index(i, j, k));
                t.k[0][idx] = kx;
                t.k[1][idx] = ky;
                t.k[2][idx] = kz;
                t.k2_full[idx] = kx_full * kx_full + ky_full * ky_full + kz_full * kz_full;
                const bool outside = 3 * std::abs(mx) > nx || 3 * std::abs(my) > ny ||
                                     3 * std::abs(mz) > nz;
                if (outside) t.dealias[idx] = 0.0;
            }
        }
    }
    t.k2 = t.k[0].square() + t.k[1].square() + t.k[2].square();
    t.inv_k2 = (t.k2 > 0.0).select(t.k2.inverse(), RealArray::Zero(n));
    return cache.emplace(std::move(key), std::move(t)).first->second;
}

SpectralVectorField derivative(const SpectralVectorField& fh, Axis axis) {
    const int a = static_cast<int>(axis);
    if (a < 0 || a > 2) throw std::invalid_argument("derivative: invalid axis");
    const WavenumberTable& t = WavenumberTable::get(fh.box);
    SpectralVectorField out(fh.box);
    const Complex iu(0.0, 1.0);
    for (int c = 0; c < 3; ++c) out[c] = iu * t.k[a].cast<Complex>() * fh[c];
    return out;
}

ComplexArray derivative_scalar(const ComplexArray& fh, const BoxSpec& box, Axis axis) {
    const WavenumberTable& t = WavenumberTable::get(box);
    return Complex(0.0, 1.0) * t.k[static_cast<int>(axis)].cast<Complex>() * fh;
}

SpectralVectorField curl(const SpectralVectorField& fh) {
    const WavenumberTable& t = WavenumberTable::get(fh.box);
    SpectralVectorField out(fh.box);
    const Complex iu(0.0, 1.0);
    const auto kx = t.k[0].cast<Complex>(), ky = t.k[1].cast<Complex>(), kz = t.k[2].cast<Complex>();
    out[0] = iu * (ky * fh[2] - kz * fh[1]);
    out[1] = iu * (kz * fh[0] - kx * fh[2]);
    out[2] = iu * (kx * fh[1] - ky * fh[0]);
    return out;
}

SpectralVectorField leray_project(const SpectralVectorField& fh) {
    const WavenumberTable& t = WavenumberTable::get(fh.box);
    SpectralVectorField out(fh.box);
    ComplexArray kdotu = t.k[0].cast<Complex>() * fh[0] + t.k[1].cast<Complex>() * fh[1] +
                         t.k[2].cast<Complex>() * fh[2];
    kdotu *= t.inv_k2.cast<Complex>();
    for (int c = 0; c < 3; ++c) out[c] = fh[c] - t.k[c].cast<Complex>() * kdotu;
    return out;
}

SpectralVectorField dealias(const SpectralVectorField& fh) {
    const WavenumberTable& t = WavenumberTable::get(fh.box);
    SpectralVectorField out(fh.box);
    for (int c = 0; c < 3; ++c) out[c] = fh[c] * t.dealias.cast<Complex>();
    return out;
}

std::array<std::array<RealArray, 3>, 3> gradient_physical(const SpectralVectorField& fh) {
    std::array<std::array<RealArray, 3>, 3> grad;
    for (int a = 0; a < 3; ++a) {
        const SpectralVectorField d = derivative(fh, static_cast<Axis>(a));
        const PhysicalVectorField dp = inverse_transform(d, false);
        for (int c = 0; c < 3; ++c) grad[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = dp[c];
    }
    return grad;
}

double max_retained_wavenumber(const BoxSpec& box, bool dealiased) {
    double kmax = 0.0;
    for (int a = 0; a < 3; ++a) {
        const int n = box.resolution[static_cast<std::size_t>(a)];
        const int band = dealiased ? n / 3 : n / 2 - 1;
        kmax = std::max(kmax, 2.0 * pi * band / box.lengths[static_cast<std::size_t>(a)]);
    }
    return kmax;
}

double spectral_tail_ratio(const SpectralVectorField& fh) {
    const BoxSpec& box = fh.box;
    const int nx = box.nx(), ny = box.ny(), nz = box.nz();
    const int bx = nx / 3, by = ny / 3, bz = nz / 3;
    double total = 0.0, tail = 0.0;
    for (int k = 0; k < nz; ++k) {
        const int mz = std::abs(BoxSpec::signed_alias(k, nz));
        for (int j = 0; j < ny; ++j) {
            const int my = std::abs(BoxSpec::signed_alias(j, ny));
            for (int i = 0; i < nx; ++i) {
                const int mx = std::abs(BoxSpec::signed_alias(i, nx));
                const auto idx = static_cast<Eigen::Index>(box.index(i, j, k));
                double e = 0.0;
                for (int c = 0; c < 3; ++c) e += std::norm(fh[c][idx]);
                total += e;
                // top third of the retained band, in per-axis max-norm shells
                if (3 * mx > 2 * bx || 3 * my > 2 * by || 3 * mz > 2 * bz) tail += e;
            }
        }
    }
    return total > 0.0 ? tail / total : 0.0;
}

}  // namespace nsstab
