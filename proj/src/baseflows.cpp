#include "nsstab/baseflows.hpp"

#include <cmath>
#include <stdexcept>

#include "nsstab/norms.hpp"
#include "nsstab/operators.hpp"
#include "nsstab/rng.hpp"
#include "nsstab/transform.hpp"

namespace nsstab {

namespace {

std::uint64_t counter_of(int m) { return static_cast<std::uint64_t>(m + (1 << 20)); }

/// Band of admissible signed mode magnitudes for generated fields: 1..N/4
/// per axis (kept well inside the 2/3 band so runs stay resolved).
int band_limit(const BoxSpec& box) {
    int n = box.nx();
    n = std::min(n, box.ny());
    n = std::min(n, box.nz());
    return std::max(1, n / 4);
}

/// Random solenoidal 2D field (kz = 0 modes only) from a hashed stream
/// function: u = (d_y psi, -d_x psi, 0). Per-mode energy ~ |k|^slope.
SpectralVectorField random_2d_field(const BoxSpec& box, const CounterRng& rng, double slope) {
    SpectralVectorField out(box);
    const int band = band_limit(box);
    const int nx = box.nx(), ny = box.ny();
    for (int mx = -band; mx <= band; ++mx) {
        for (int my = -band; my <= band; ++my) {
            if (mx == 0 && my == 0) continue;
            const bool canonical = (mx > 0) || (mx == 0 && my > 0);
            if (!canonical) continue;
            const double kx = 2.0 * pi * mx / box.lx();
            const double ky = 2.0 * pi * my / box.ly();
            const double k2 = kx * kx + ky * ky;
            // |u| ~ k^(slope/2)  =>  |psi| ~ k^(slope/2 - 1)
            const double rho = std::pow(k2, 0.25 * slope - 0.5);
            const double phase = 2.0 * pi * rng.uniform(counter_of(mx), counter_of(my), 17);
            const Complex psi = rho * Complex(std::cos(phase), std::sin(phase));

            const int i = (mx + nx) % nx;
            const int j = (my + ny) % ny;
            const int im = (nx - i) % nx;
            const int jm = (ny - j) % ny;
            const Complex ux = Complex(0.0, ky) * psi;
            const Complex uy = Complex(0.0, -kx) * psi;
            out[0][static_cast<Eigen::Index>(box.index(i, j, 0))] = ux;
            out[1][static_cast<Eigen::Index>(box.index(i, j, 0))] = uy;
            out[0][static_cast<Eigen::Index>(box.index(im, jm, 0))] = std::conj(ux);
            out[1][static_cast<Eigen::Index>(box.index(im, jm, 0))] = std::conj(uy);
        }
    }
    return out;
}

/// Random solenoidal 3D field u = i k x A from a hashed vector potential on
/// the band; z_only restricts to modes with |m_z| >= 1 so the whole field is
/// seen by d/dz.
SpectralVectorField random_3d_field(const BoxSpec& box, const CounterRng& rng, bool z_only) {
    SpectralVectorField out(box);
    const int band = band_limit(box);
    const int nx = box.nx(), ny = box.ny(), nz = box.nz();
    for (int mx = -band; mx <= band; ++mx) {
        for (int my = -band; my <= band; ++my) {
            for (int mz = -band; mz <= band; ++mz) {
                if (mx == 0 && my == 0 && mz == 0) continue;
                if (z_only && mz == 0) continue;
                const bool canonical =
                    (mx > 0) || (mx == 0 && my > 0) || (mx == 0 && my == 0 && mz > 0);
                if (!canonical) continue;
                const double kx = 2.0 * pi * mx / box.lx();
                const double ky = 2.0 * pi * my / box.ly();
                const double kz = 2.0 * pi * mz / box.lz();
                const double k2 = kx * kx + ky * ky + kz * kz;
                // steep potential spectrum (shell energy ~ k^-4 after the
                // curl): the band edge carries negligible mass, so measured
                // constants stay put under refinement and the budget
                // trapezoids resolve the dissipation transient
                const double rho = std::pow(k2, -2.0);
                Complex a[3];
                for (int c = 0; c < 3; ++c) {
                    const double phase = 2.0 * pi * rng.uniform(counter_of(mx), counter_of(my),
                                                                8 * counter_of(mz) + c);
                    a[c] = rho * Complex(std::cos(phase), std::sin(phase));
                }
                const Complex ux = Complex(0.0, 1.0) * (ky * a[2] - kz * a[1]);
                const Complex uy = Complex(0.0, 1.0) * (kz * a[0] - kx * a[2]);
                const Complex uz = Complex(0.0, 1.0) * (kx * a[1] - ky * a[0]);
                const int i = (mx + nx) % nx, j = (my + ny) % ny, k = (mz + nz) % nz;
                const int im = (nx - i) % nx, jm = (ny - j) % ny, km = (nz - k) % nz;
                const auto idx = static_cast<Eigen::Index>(box.index(i, j, k));
                const auto idxm = static_cast<Eigen::Index>(box.index(im, jm, km));
                out[0][idx] = ux;
                out[1][idx] = uy;
                out[2][idx] = uz;
                out[0][idxm] = std::conj(ux);
                out[1][idxm] = std::conj(uy);
                out[2][idxm] = std::conj(uz);
            }
        }
    }
    return out;
}

void rescale_to_l2(SpectralVectorField& f, double target) {
    const double norm = l2_norm(f);
    if (norm == 0.0) {
        if (target != 0.0)
            throw std::runtime_error("rescale_to_l2: zero field cannot hit a nonzero norm");
        return;
    }
    f *= target / norm;
}

SpectralVectorField taylor_green(const BoxSpec& box, double amplitude) {
    const double k1 = 2.0 * pi / box.lx();
    const double k2 = 2.0 * pi / box.ly();
    PhysicalVectorField w(box);
    for (int k = 0; k < box.nz(); ++k) {
        for (int j = 0; j < box.ny(); ++j) {
            const double y = box.ly() * j / box.ny();
            for (int i = 0; i < box.nx(); ++i) {
                const double x = box.lx() * i / box.nx();
                const auto idx = static_cast<Eigen::Index>(box.index(i, j, k));
                w[0][idx] = amplitude * std::sin(k1 * x) * std::cos(k2 * y);
                w[1][idx] = -amplitude * (k1 / k2) * std::cos(k1 * x) * std::sin(k2 * y);
            }
        }
    }
    return forward_transform(w);
}

}  // namespace

void BaseFlowSpec::validate() const {
    // amplitude 0 is the zero base flow (the w = 0 setting)
    if (!(amplitude >= 0.0))
        throw std::invalid_argument("BaseFlowSpec: amplitude must be nonnegative");
    if (forcing_amplitude < 0.0)
        throw std::invalid_argument("BaseFlowSpec: forcing_amplitude must be nonnegative");
    if (kind != Kind::forced_2d && forcing_amplitude > 0.0)
        throw std::invalid_argument("BaseFlowSpec: forcing_amplitude requires kind forced_2d");
}

void PerturbationSpec::validate() const {
    if (epsilon < 0.0) throw std::invalid_argument("PerturbationSpec: epsilon must be nonnegative");
    if (bulk_amplitude < 0.0)
        throw std::invalid_argument("PerturbationSpec: bulk_amplitude must be nonnegative");
    if (kase == Case::i && bulk_amplitude > 0.0)
        throw std::invalid_argument("PerturbationSpec: bulk_amplitude applies to case ii only");
}

SpectralVectorField make_base_flow(const BaseFlowSpec& spec, const BoxSpec& box) {
    box.validate();
    spec.validate();
    if (spec.amplitude == 0.0) return SpectralVectorField(box);
    if (spec.kind == BaseFlowSpec::Kind::taylor_green_2d) return taylor_green(box, spec.amplitude);
    SpectralVectorField w = random_2d_field(box, CounterRng(spec.seed), spec.spectrum_slope);
    rescale_to_l2(w, spec.amplitude);
    return w;
}

Forcing make_base_forcing(const BaseFlowSpec& spec, const BoxSpec& box) {
    if (spec.kind != BaseFlowSpec::Kind::forced_2d || spec.forcing_amplitude == 0.0)
        return Forcing::none();
    SpectralVectorField f =
        random_2d_field(box, CounterRng(spec.seed ^ 0xf0f0f0f0f0f0f0f0ULL), spec.spectrum_slope);
    rescale_to_l2(f, spec.forcing_amplitude);
    return Forcing::steady(f);
}

SpectralVectorField make_perturbation(const PerturbationSpec& spec, const BoxSpec& box) {
    box.validate();
    spec.validate();
    const CounterRng rng(spec.seed);

    if (spec.kase == PerturbationSpec::Case::i) {
        SpectralVectorField u(box);
        if (spec.epsilon > 0.0) {
            u = random_3d_field(box, rng, false);
            rescale_to_l2(u, spec.epsilon);
        }
        return u;
    }

    SpectralVectorField u(box);
    if (spec.bulk_amplitude > 0.0) {
        u = random_2d_field(box, CounterRng(spec.seed ^ 0x5a5a5a5a5a5a5a5aULL), -5.0);
        rescale_to_l2(u, spec.bulk_amplitude);
    }
    if (spec.epsilon > 0.0) {
        SpectralVectorField zpart = random_3d_field(box, rng, true);
        const double dz_norm = std::sqrt(directional_grad_l2_sq(zpart, Axis::Z));
        if (dz_norm == 0.0) throw std::runtime_error("make_perturbation: empty z-band");
        zpart *= spec.epsilon / dz_norm;
        u += zpart;
    }
    return u;
}

std::pair<double, double> make_extra_condition_report(const DiagnosticSeries& w_trajectory) {
    if (w_trajectory.empty())
        throw std::invalid_argument("make_extra_condition_report: empty trajectory");
    auto wz5 = w_trajectory.column("z_l5");
    auto gz52 = w_trajectory.column("grad_z_l52");
    for (auto& v : wz5) v = std::pow(v, 5.0);
    for (auto& v : gz52) v = std::pow(v, 2.5);
    const double n5 = std::pow(trapezoid(w_trajectory.times, wz5), 1.0 / 5.0);
    const double n52 = std::pow(trapezoid(w_trajectory.times, gz52), 2.0 / 5.0);
    return {n5, n52};
}

}  // namespace nsstab
