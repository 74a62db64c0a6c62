#include "nsstab/norms.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "nsstab/operators.hpp"
#include "nsstab/transform.hpp"

namespace nsstab {

namespace {

double lp_of_magnitude(const RealArray& mag, double cell_measure, double p) {
    if (p == inf) return mag.maxCoeff();
    if (p == 2.0) return std::sqrt((mag.square() * cell_measure).sum());
    return std::pow((mag.pow(p) * cell_measure).sum(), 1.0 / p);
}

void check_exponent(double p, const char* who) {
    if (!(p >= 1.0))
        throw std::invalid_argument(std::string(who) + ": exponent p must satisfy p >= 1");
}

}  // namespace

double lp_norm(const PhysicalVectorField& f, double p) {
    check_exponent(p, "lp_norm");
    if (!f.all_finite())
        throw std::domain_error("lp_norm: non-finite sample at " + f.first_non_finite());
    return lp_of_magnitude(f.magnitude(), f.box.cell_volume(), p);
}

double lp_norm_scalar(const RealArray& values, const BoxSpec& box, double p) {
    check_exponent(p, "lp_norm_scalar");
    return lp_of_magnitude(values.abs(), box.cell_volume(), p);
}

double mixed_norm_scalar(const RealArray& magnitude, const BoxSpec& box,
                         const MixedNormSpec& spec) {
    const bool pxy_ok = spec.p_xy == 2.0 || spec.p_xy == 4.0 || spec.p_xy == inf;
    const bool rz_ok = spec.r_z == 2.0 || spec.r_z == inf;
    if (!pxy_ok || !rz_ok)
        throw std::invalid_argument("mixed_norm: unsupported exponent combination");

    const int nx = box.nx(), ny = box.ny(), nz = box.nz();
    const double dz = box.lz() / nz;
    const double da = box.lx() * box.ly() / (static_cast<double>(nx) * ny);

    RealArray column(static_cast<Eigen::Index>(nx) * ny);
    column.setZero();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const auto col = static_cast<Eigen::Index>(i) + static_cast<Eigen::Index>(nx) * j;
            double acc = 0.0;
            for (int k = 0; k < nz; ++k) {
                const double v = magnitude[static_cast<Eigen::Index>(box.index(i, j, k))];
                if (spec.r_z == inf)
                    acc = std::max(acc, v);
                else
                    acc += v * v * dz;
            }
            column[col] = (spec.r_z == inf) ? acc : std::sqrt(acc);
        }
    }
    if (spec.p_xy == inf) return column.maxCoeff();
    if (spec.p_xy == 2.0) return std::sqrt((column.square() * da).sum());
    return std::pow((column.pow(4.0) * da).sum(), 0.25);
}

double mixed_norm(const PhysicalVectorField& f, const MixedNormSpec& spec) {
    if (!f.all_finite())
        throw std::domain_error("mixed_norm: non-finite sample at " + f.first_non_finite());
    return mixed_norm_scalar(f.magnitude(), f.box, spec);
}

double l2_norm_sq(const SpectralVectorField& fh) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += fh[c].abs2().sum();
    return s * fh.box.volume();
}

double l2_norm(const SpectralVectorField& fh) { return std::sqrt(l2_norm_sq(fh)); }

double grad_l2_sq(const SpectralVectorField& fh) {
    const WavenumberTable& t = WavenumberTable::get(fh.box);
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += (t.k2 * fh[c].abs2()).sum();
    return s * fh.box.volume();
}

double directional_grad_l2_sq(const SpectralVectorField& fh, Axis axis) {
    const WavenumberTable& t = WavenumberTable::get(fh.box);
    const RealArray& ka = t.k[static_cast<int>(axis)];
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += (ka.square() * fh[c].abs2()).sum();
    return s * fh.box.volume();
}

double grad_dz_l2_sq(const SpectralVectorField& fh) {
    const WavenumberTable& t = WavenumberTable::get(fh.box);
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += (t.k2 * t.k[2].square() * fh[c].abs2()).sum();
    return s * fh.box.volume();
}

// ---------------------------------------------------------------------------
// 2D plane machinery (Ladyzhenskaya checks, 2D field generation in tests)
// ---------------------------------------------------------------------------

namespace {

struct Plan2D {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

const Plan2D& plan2d_for(int nx, int ny) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, Plan2D> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(nx, ny);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(nx) * ny);
    Plan2D p;
    p.fwd = fftw_plan_dft_2d(ny, nx, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_2d(ny, nx, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p.fwd || !p.bwd) throw std::runtime_error("FFTW 2D plan creation failed");
    return cache.emplace(key, p).first->second;
}

ComplexArray plane_fft(const RealArray& g, int nx, int ny) {
    ComplexArray work = g.cast<Complex>();
    auto* ptr = reinterpret_cast<fftw_complex*>(work.data());
    fftw_execute_dft(plan2d_for(nx, ny).fwd, ptr, ptr);
    work /= static_cast<double>(static_cast<std::size_t>(nx) * ny);
    return work;
}

}  // namespace

ComplexArray plane_fft_forward(const RealArray& g, int nx, int ny) {
    return plane_fft(g, nx, ny);
}

RealArray plane_fft_inverse(const ComplexArray& gh, int nx, int ny) {
    ComplexArray work = gh;
    auto* ptr = reinterpret_cast<fftw_complex*>(work.data());
    fftw_execute_dft(plan2d_for(nx, ny).bwd, ptr, ptr);
    return work.real();
}

RealArray PlaneField::magnitude() const {
    RealArray m = comp[0].square();
    for (std::size_t c = 1; c < comp.size(); ++c) m += comp[c].square();
    return m.sqrt();
}

double plane_mean(const RealArray& values) { return values.mean(); }

double plane_lp_norm(const PlaneField& g, double p) {
    check_exponent(p, "plane_lp_norm");
    return lp_of_magnitude(g.magnitude(), g.cell_area(), p);
}

double plane_grad_l2(const PlaneField& g) {
    double s = 0.0;
    for (const RealArray& c : g.comp) {
        const ComplexArray gh = plane_fft(c, g.nx, g.ny);
        for (int j = 0; j < g.ny; ++j) {
            const int my = BoxSpec::signed_alias(j, g.ny);
            const double ky = (my == -g.ny / 2) ? 0.0 : 2.0 * pi * my / g.ly;
            for (int i = 0; i < g.nx; ++i) {
                const int mx = BoxSpec::signed_alias(i, g.nx);
                const double kx = (mx == -g.nx / 2) ? 0.0 : 2.0 * pi * mx / g.lx;
                const auto idx = static_cast<Eigen::Index>(i) + static_cast<Eigen::Index>(g.nx) * j;
                s += (kx * kx + ky * ky) * std::norm(gh[idx]);
            }
        }
    }
    return std::sqrt(s * g.area());
}

double ladyzhenskaya_ratio(const PlaneField& g) {
    PlaneField centered = g;
    for (RealArray& c : centered.comp) c -= c.mean();
    const double l2 = plane_lp_norm(centered, 2.0);
    if (l2 == 0.0) throw std::domain_error("ladyzhenskaya_ratio: zero field (0/0)");
    const double l4 = plane_lp_norm(centered, 4.0);
    const double h1 = plane_grad_l2(centered);
    if (h1 == 0.0) throw std::domain_error("ladyzhenskaya_ratio: constant field (0/0)");
    return l4 * l4 / (l2 * h1);
}

double embedding_l6_ratio(const PhysicalVectorField& f) {
    const SpectralVectorField fh = forward_transform(f);
    double denom = 1.0;
    const char* names[3] = {"x", "y", "z"};
    const double scale = l2_norm(fh);
    if (scale == 0.0) throw std::domain_error("embedding_l6_ratio: zero field");
    for (int a = 0; a < 3; ++a) {
        const double da = std::sqrt(directional_grad_l2_sq(fh, static_cast<Axis>(a)));
        if (da <= 1e-14 * scale)
            throw std::domain_error(std::string("embedding_l6_ratio: vanishing ") + names[a] +
                                    "-derivative (ratio undefined on the torus)");
        denom *= std::cbrt(da);
    }
    // mean-free part only; the zero mode does not belong in the inequality
    PhysicalVectorField centered = f;
    for (int c = 0; c < 3; ++c) centered[c] -= centered[c].mean();
    return lp_norm(centered, 6.0) / denom;
}

}  // namespace nsstab
