#include "nsstab/solver.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "nsstab/operators.hpp"
#include "nsstab/transform.hpp"

namespace nsstab {

namespace {

std::string abort_message(double t) {
    std::ostringstream os;
    os << "blow-up or instability detected";
    if (std::isfinite(t)) os << " at t=" << t;
    return os.str();
}

}  // namespace

SolverAbort::SolverAbort(double t_detected)
    : std::runtime_error(abort_message(t_detected)), t(t_detected) {}

SolverAbort::SolverAbort() : SolverAbort(std::numeric_limits<double>::quiet_NaN()) {}

Forcing Forcing::steady(const SpectralVectorField& fh) {
    Forcing f;
    f.kind = Kind::steady;
    f.field = leray_project(dealias(fh));
    return f;
}

Forcing Forcing::modulated(const SpectralVectorField& fh, double omega) {
    Forcing f;
    f.kind = Kind::modulated;
    f.field = leray_project(dealias(fh));
    f.omega = omega;
    return f;
}

void SolverConfig::validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("SolverConfig: nu must be positive");
    if (!dt_auto && !(dt > 0.0))
        throw std::invalid_argument("SolverConfig: dt must be positive (or auto)");
    if (!(t_end >= 0.0)) throw std::invalid_argument("SolverConfig: t_end must be nonnegative");
    if (!(cfl > 0.0 && cfl <= 1.0))
        throw std::invalid_argument("SolverConfig: cfl must lie in (0, 1]");
    if (record_every < 1)
        throw std::invalid_argument("SolverConfig: record_every must be a positive integer");
}

SpectralVectorField nonlinear_term(const SpectralVectorField& v_hat, bool apply_dealias) {
    const PhysicalVectorField v = inverse_transform(v_hat, false);
    const PhysicalVectorField w = inverse_transform(curl(v_hat), false);

    PhysicalVectorField m(v_hat.box);
    m[0] = w[1] * v[2] - w[2] * v[1];
    m[1] = w[2] * v[0] - w[0] * v[2];
    m[2] = w[0] * v[1] - w[1] * v[0];
    if (!m.all_finite()) throw SolverAbort();

    SpectralVectorField mh = forward_transform(m);
    if (apply_dealias) mh = dealias(mh);
    mh = leray_project(mh);
    for (int c = 0; c < 3; ++c) mh[c] = -mh[c];
    return mh;
}

double max_velocity(const SpectralVectorField& v_hat) {
    const PhysicalVectorField v = inverse_transform(v_hat, false);
    return v.magnitude().maxCoeff();
}

double choose_dt(const SolverState& state, const SolverConfig& config) {
    if (!config.dt_auto) return config.dt;
    const double kmax = max_retained_wavenumber(state.v_hat.box, config.dealias);
    const double vmax = max_velocity(state.v_hat);
    if (!(vmax > 0.0) || !(kmax > 0.0)) return config.t_end > 0.0 ? config.t_end : 1.0;
    return config.cfl / (kmax * vmax);
}

SolverState step(const SolverState& state, const SolverConfig& config, const Forcing& forcing,
                 double dt) {
    const BoxSpec& box = state.v_hat.box;
    const WavenumberTable& tab = WavenumberTable::get(box);
    const RealArray half = (-0.5 * config.nu * dt * tab.k2_full).exp();
    const RealArray full = half.square();

    const bool forced = !forcing.is_zero();
    auto add_force = [&](SpectralVectorField& k, double t_stage) {
        if (!forced) return;
        const double s = forcing.scale_at(t_stage);
        for (int c = 0; c < 3; ++c) k[c] += s * forcing.field[c];
    };
    auto damp = [&](const SpectralVectorField& f, const RealArray& e) {
        SpectralVectorField out(box);
        for (int c = 0; c < 3; ++c) out[c] = f[c] * e.cast<Complex>();
        return out;
    };

    const double t = state.t;
    try {
        // classic integrating-factor RK4 on dv/dt = -nu|k|^2 v + N(v) + F(t)
        SpectralVectorField k1 = nonlinear_term(state.v_hat, config.dealias);
        add_force(k1, t);

        SpectralVectorField stage(box);
        for (int c = 0; c < 3; ++c)
            stage[c] = (state.v_hat[c] + (0.5 * dt) * k1[c]) * half.cast<Complex>();
        SpectralVectorField k2 = nonlinear_term(stage, config.dealias);
        add_force(k2, t + 0.5 * dt);

        const SpectralVectorField v_half = damp(state.v_hat, half);
        for (int c = 0; c < 3; ++c) stage[c] = v_half[c] + (0.5 * dt) * k2[c];
        SpectralVectorField k3 = nonlinear_term(stage, config.dealias);
        add_force(k3, t + 0.5 * dt);

        const SpectralVectorField v_full = damp(state.v_hat, full);
        for (int c = 0; c < 3; ++c) stage[c] = v_full[c] + dt * (k3[c] * half.cast<Complex>());
        SpectralVectorField k4 = nonlinear_term(stage, config.dealias);
        add_force(k4, t + dt);

        SolverState next;
        next.v_hat = SpectralVectorField(box);
        for (int c = 0; c < 3; ++c)
            next.v_hat[c] = v_full[c] + (dt / 6.0) * (k1[c] * full.cast<Complex>() +
                                                      2.0 * (k2[c] + k3[c]) * half.cast<Complex>() +
                                                      k4[c]);
        next.v_hat = leray_project(next.v_hat);
        if (!next.v_hat.all_finite()) throw SolverAbort(t + dt);
        next.t = t + dt;
        next.step_count = state.step_count + 1;
        return next;
    } catch (const SolverAbort& a) {
        throw std::isfinite(a.t) ? a : SolverAbort(t);
    }
}

RunResult run(const SpectralVectorField& v0, const SolverConfig& config, const Forcing& forcing,
              const Observer& observer) {
    config.validate();
    RunResult result;
    SolverState state;
    state.v_hat = config.dealias ? dealias(v0) : v0;
    if (divergence_rel(state.v_hat) > 1e-12) {
        std::cerr << "nsstab::run: initial field is not divergence-free; projecting\n";
        state.v_hat = leray_project(state.v_hat);
    }

    double prev_grad_linf = 0.0, prev_sample_t = 0.0, gronwall = 0.0;
    auto record = [&](const SolverState& s) {
        try {
            const FieldSample sample(s.v_hat, true);
            auto rec = standard_record(s.v_hat, sample);
            for (const auto& [key, v] : rec) {
                (void)key;
                if (!std::isfinite(v)) throw SolverAbort(s.t);
            }
            if (!result.series.empty())
                gronwall += 0.5 * (rec["grad_linf"] + prev_grad_linf) * (s.t - prev_sample_t);
            rec["gronwall_weight"] = gronwall;
            prev_grad_linf = rec["grad_linf"];
            prev_sample_t = s.t;
            result.series.append(s.t, rec);
            if (observer) observer(s.t, s.v_hat, sample);
        } catch (const std::domain_error&) {
            // overflow in the diagnostics: the march has already blown up
            throw SolverAbort(s.t);
        }
    };

    try {
        record(state);
        const double t_end = config.t_end;
        while (state.t < t_end && t_end - state.t > 1e-14 * std::max(1.0, t_end)) {
            const double dt = clamp_to_horizon(choose_dt(state, config), state.t, t_end);
            state = step(state, config, forcing, dt);
            const bool last = !(state.t < t_end && t_end - state.t > 1e-14 * std::max(1.0, t_end));
            if (state.step_count % config.record_every == 0 || last) record(state);
        }
    } catch (const SolverAbort& a) {
        result.aborted = true;
        result.abort_reason = a.what();
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace nsstab
