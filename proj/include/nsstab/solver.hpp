#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "nsstab/diagnostics.hpp"
#include "nsstab/field.hpp"

namespace nsstab {

/// External force descriptor: zero, a steady spectral field, or a
/// cosine-modulated spectral field. The field is projected and dealiased at
/// construction so forcing never injects divergence or aliased modes.
struct Forcing {
    enum class Kind { zero, steady, modulated };
    Kind kind = Kind::zero;
    SpectralVectorField field;
    double omega = 0.0;

    static Forcing none() { return {}; }
    static Forcing steady(const SpectralVectorField& fh);
    static Forcing modulated(const SpectralVectorField& fh, double omega);

    bool is_zero() const { return kind == Kind::zero; }
    double scale_at(double t) const {
        if (kind == Kind::zero) return 0.0;
        if (kind == Kind::steady) return 1.0;
        return std::cos(omega * t);
    }
};

struct SolverConfig {
    double nu = 0.0;          // viscosity, > 0
    double dt = 0.0;          // fixed step; ignored when dt_auto
    bool dt_auto = true;      // advective CFL against max |v| each step
    double t_end = 0.0;
    double cfl = 0.4;         // in (0, 1]
    int record_every = 1;     // diagnostic sampling stride, in steps
    bool dealias = true;

    void validate() const;
};

struct SolverState {
    double t = 0.0;
    long step_count = 0;
    SpectralVectorField v_hat;
};

/// Thrown when NaN appears in the march (growth past representable range).
class SolverAbort : public std::runtime_error {
  public:
    explicit SolverAbort(double t_detected);
    SolverAbort();
    double t;
};

/// Projected, dealiased convective term -P[(v.grad)v], computed
/// pseudo-spectrally in rotational form: the gradient half of
/// (v.grad)v = omega x v + grad(|v|^2/2) is absorbed by the projection, so
/// only -P[omega x v] survives. Discretely skew-symmetric against any
/// band-limited divergence-free v.
SpectralVectorField nonlinear_term(const SpectralVectorField& v_hat, bool apply_dealias = true);

/// Max pointwise velocity magnitude (3 inverse transforms).
double max_velocity(const SpectralVectorField& v_hat);

/// Advective CFL step: cfl / (kmax * vmax), where kmax is the largest
/// retained wavenumber. Fixed-dt configs return config.dt.
double choose_dt(const SolverState& state, const SolverConfig& config);

/// Clamp a candidate step against the horizon, absorbing rounding-level
/// remainders into the final step so the march never takes a degenerate
/// micro-step at t_end.
inline double clamp_to_horizon(double dt, double t, double t_end) {
    const double remaining = t_end - t;
    if (dt >= remaining) return remaining;
    if (remaining - dt <= 1e-9 * std::max(1.0, t_end)) return remaining;
    return dt;
}

/// One explicit RK4 step with the viscous term integrated exactly per mode
/// (integrating factor exp(-nu |k|^2 dt)); the result is re-projected.
SolverState step(const SolverState& state, const SolverConfig& config, const Forcing& forcing,
                 double dt);

using Observer =
    std::function<void(double t, const SpectralVectorField& v_hat, const FieldSample& sample)>;

struct RunResult {
    DiagnosticSeries series;
    SolverState final_state;
    bool aborted = false;
    std::string abort_reason;
};

/// March from v0 to t_end, sampling diagnostics at t = 0, every record_every
/// steps, and at t_end. A non-solenoidal v0 is projected first (with a
/// warning). On abort the partial series is returned. The gronwall_weight
/// column accumulates int ||grad v||_inf ds of the evolved field itself.
RunResult run(const SpectralVectorField& v0, const SolverConfig& config, const Forcing& forcing,
              const Observer& observer = nullptr);

}  // namespace nsstab
