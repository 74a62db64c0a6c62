#pragma once

#include <cstdint>
#include <utility>

#include "nsstab/diagnostics.hpp"
#include "nsstab/field.hpp"
#include "nsstab/solver.hpp"

namespace nsstab {

/// Recipe for a 2D (z-independent) base flow. Random kinds build a solenoidal
/// field from a seeded stream function on a band-limited spectrum (mode
/// magnitudes 1..N/4, per-mode energy ~ k^spectrum_slope), rescaled so
/// ||w||_L2 equals amplitude exactly.
struct BaseFlowSpec {
    enum class Kind { taylor_green_2d, random_2d, forced_2d };
    Kind kind = Kind::taylor_green_2d;
    double amplitude = 1.0;
    std::uint64_t seed = 0;
    double spectrum_slope = -2.0;
    double forcing_amplitude = 0.0;

    void validate() const;
};

/// Recipe for the 3D initial perturbation. Case i: random solenoidal field
/// with ||u0||_L2 = epsilon. Case ii: a large z-independent solenoidal bulk
/// (||.||_L2 = bulk_amplitude) plus a z-dependent part rescaled so
/// ||d_z u0||_L2 = epsilon; the two live on disjoint mode sets.
struct PerturbationSpec {
    enum class Case { i, ii };
    Case kase = Case::i;
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    double bulk_amplitude = 0.0;

    void validate() const;
};

/// z-independent, divergence-free, zero-mean base flow.
SpectralVectorField make_base_flow(const BaseFlowSpec& spec, const BoxSpec& box);

/// Steady solenoidal forcing for the forced_2d kind (zero otherwise).
Forcing make_base_forcing(const BaseFlowSpec& spec, const BoxSpec& box);

/// Divergence-free, zero-mean initial perturbation hitting its target norm
/// to rounding.
SpectralVectorField make_perturbation(const PerturbationSpec& spec, const BoxSpec& box);

/// Space-time norms ( ||w_z||_L5(box x (0,T)), ||grad w_z||_L5/2 ) from a
/// recorded base-flow trajectory; both vanish for 2D bases.
std::pair<double, double> make_extra_condition_report(const DiagnosticSeries& w_trajectory);

}  // namespace nsstab
