#include "nsstab/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace nsstab {

namespace {

// One c2c plan pair per grid size, created once under a lock (the FFTW
// planner is not thread-safe; execution via fftw_execute_dft is). Plans are
// created with FFTW_UNALIGNED so they run on any caller buffer, and
// FFTW_ESTIMATE so plan choice is deterministic across runs.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

PlanPair& plans_for(const BoxSpec& box) {
    static std::mutex mtx;
    static std::map<std::array<int, 3>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = box.resolution;
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const std::size_t n = box.point_count();
    fftw_complex* buf = fftw_alloc_complex(n);
    if (!buf) throw std::bad_alloc();
    PlanPair p;
    // x-fastest storage means x is the last (fastest) FFTW dimension.
    p.fwd = fftw_plan_dft_3d(box.nz(), box.ny(), box.nx(), buf, buf, FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.bwd = fftw_plan_dft_3d(box.nz(), box.ny(), box.nx(), buf, buf, FFTW_BACKWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p.fwd || !p.bwd) throw std::runtime_error("FFTW plan creation failed");
    return cache.emplace(key, p).first->second;
}

ComplexArray run_fft(const ComplexArray& in, const BoxSpec& box, bool forward) {
    ComplexArray work = in;  // in-place transform on a private copy
    auto* ptr = reinterpret_cast<fftw_complex*>(work.data());
    const PlanPair& p = plans_for(box);
    fftw_execute_dft(forward ? p.fwd : p.bwd, ptr, ptr);
    return work;
}

}  // namespace

std::string PhysicalVectorField::first_non_finite() const {
    for (int c = 0; c < 3; ++c) {
        const RealArray& a = comp[static_cast<std::size_t>(c)];
        for (Eigen::Index n = 0; n < a.size(); ++n) {
            if (!std::isfinite(a[n])) {
                const auto i = static_cast<int>(n % box.nx());
                const auto j = static_cast<int>((n / box.nx()) % box.ny());
                const auto k = static_cast<int>(n / (static_cast<std::size_t>(box.nx()) * box.ny()));
                std::ostringstream os;
                os << "component " << c << ", index (" << i << "," << j << "," << k << ")";
                return os.str();
            }
        }
    }
    return {};
}

SpectralVectorField forward_transform(const PhysicalVectorField& f) {
    if (!f.all_finite())
        throw std::domain_error("forward_transform: non-finite sample at " + f.first_non_finite());
    SpectralVectorField out(f.box);
    const double scale = 1.0 / static_cast<double>(f.box.point_count());
    for (int c = 0; c < 3; ++c) {
        ComplexArray in = f.comp[static_cast<std::size_t>(c)].cast<Complex>();
        out.comp[static_cast<std::size_t>(c)] = run_fft(in, f.box, true) * scale;
    }
    return out;
}

PhysicalVectorField inverse_transform(const SpectralVectorField& fh, bool check_symmetry) {
    if (check_symmetry) {
        const double defect = hermitian_defect(fh);
        if (defect > 1e-10) {
            std::ostringstream os;
            os << "inverse_transform: Hermitian symmetry violated (relative defect " << defect
               << " > 1e-10)";
            throw std::domain_error(os.str());
        }
    }
    PhysicalVectorField out(fh.box);
    for (int c = 0; c < 3; ++c)
        out.comp[static_cast<std::size_t>(c)] = run_fft(fh.comp[static_cast<std::size_t>(c)], fh.box, false).real();
    return out;
}

ComplexArray forward_transform_scalar(const RealArray& f, const BoxSpec& box) {
    if (!f.allFinite()) throw std::domain_error("forward_transform_scalar: non-finite sample");
    const double scale = 1.0 / static_cast<double>(box.point_count());
    return run_fft(f.cast<Complex>(), box, true) * scale;
}

RealArray inverse_transform_scalar(const ComplexArray& fh, const BoxSpec& box) {
    return run_fft(fh, box, false).real();
}

double hermitian_defect(const SpectralVectorField& fh) {
    const BoxSpec& box = fh.box;
    const int nx = box.nx(), ny = box.ny(), nz = box.nz();
    double max_defect = 0.0;
    for (int c = 0; c < 3; ++c) {
        const ComplexArray& a = fh.comp[static_cast<std::size_t>(c)];
        for (int k = 0; k < nz; ++k) {
            const int km = (nz - k) % nz;
            for (int j = 0; j < ny; ++j) {
                const int jm = (ny - j) % ny;
                for (int i = 0; i < nx; ++i) {
                    const int im = (nx - i) % nx;
                    const Complex d =
                        a[static_cast<Eigen::Index>(box.index(im, jm, km))] -
                        std::conj(a[static_cast<Eigen::Index>(box.index(i, j, k))]);
                    max_defect = std::max(max_defect, std::abs(d));
                }
            }
        }
    }
    const double scale = fh.max_coefficient_magnitude();
    return scale > 0.0 ? max_defect / scale : 0.0;
}

double divergence_rel(const SpectralVectorField& fh) {
    const BoxSpec& box = fh.box;
    const int nx = box.nx(), ny = box.ny(), nz = box.nz();
    double max_div = 0.0;
    for (int k = 0; k < nz; ++k) {
        const double kz = box.wavenumber(Axis::Z, k);
        for (int j = 0; j < ny; ++j) {
            const double ky = box.wavenumber(Axis::Y, j);
            for (int i = 0; i < nx; ++i) {
                const double kx = box.wavenumber(Axis::X, i);
                const auto n = static_cast<Eigen::Index>(box.index(i, j, k));
                const Complex d = kx * fh.comp[0][n] + ky * fh.comp[1][n] + kz * fh.comp[2][n];
                max_div = std::max(max_div, std::abs(d));
            }
        }
    }
    const double scale = fh.max_coefficient_magnitude();
    return scale > 0.0 ? max_div / scale : 0.0;
}

}  // namespace nsstab
