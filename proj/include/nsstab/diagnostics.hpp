#pragma once

#include <map>
#include <string>
#include <vector>

#include "nsstab/field.hpp"
#include "nsstab/norms.hpp"

namespace nsstab {

/// Time-indexed record of named scalar diagnostics. Append-only, strictly
/// increasing sample times, every record carries the same key set.
struct DiagnosticSeries {
    std::vector<double> times;
    std::vector<std::map<std::string, double>> records;

    void append(double t, std::map<std::string, double> record);
    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    bool has(const std::string& key) const;
    std::vector<double> column(const std::string& key) const;
    double value(std::size_t sample, const std::string& key) const;
};

/// CSV export: one row per sample, header mandatory, 17 significant digits.
void write_csv(const DiagnosticSeries& series, const std::string& path);

/// Trapezoid rule over the sample times; cumulative version returns the
/// integral over [t0, t_n] for every n.
double trapezoid(const std::vector<double>& times, const std::vector<double>& values);
std::vector<double> trapezoid_cumulative(const std::vector<double>& times,
                                         const std::vector<double>& values);

/// The sup-in-time / space-time quantities of the estimates under test.
/// I is the literal sum sup_t ||u|| + (int ||grad u||^2 dt)^(1/2).
/// J, K, L are running sups of the energy functionals their differential
/// inequalities bound:
///   J(t)^2 = ||u_z(t)||^2        + 2 nu int_0^t ||grad u_z||^2,
///   K(t)^2 = ||u(t)||^2          + 2 nu int_0^t ||grad u||^2,
///   L(t)^2 = e^-G ||u_z(t)||^2   + 2 nu int_0^t e^-G ||grad u_z||^2,
/// with G(t) = int_0^t ||grad w||_inf ds the base-flow Groenwall weight.
/// J0/K0/L0 are read from the first sample.
struct PaperQuantities {
    double I = 0.0, J = 0.0, K = 0.0, L = 0.0;
    double J0 = 0.0, K0 = 0.0, L0 = 0.0;
};

/// Accumulate the quantities from a recorded series (keys: energy,
/// dissipation, z_energy, z_dissipation, gronwall_weight). Rejects an empty
/// series.
PaperQuantities accumulate_paper_quantities(const DiagnosticSeries& series, double nu);

/// Plain-sum forms of I and J over the horizon ending at sample n
/// (sup-norm plus unweighted space-time gradient norm); these are the
/// combinations the mixed-norm and trilinear estimates are stated with.
double plain_I(const DiagnosticSeries& series, std::size_t n);
double plain_J(const DiagnosticSeries& series, std::size_t n);

/// Measured constant of the mixed-norm estimate:
/// ||grad u||_{L2_t L2_xy Linf_z} / (I^(1/2) J^(1/2)), full horizon.
double mixed_norm_estimate_constant(const DiagnosticSeries& series);

/// Measured constant of the anisotropic interpolation estimate:
/// ||u_z||_{L4_{xy,t} L2_z} / J, full horizon. Rejects J = 0.
double anisotropic_interp_check(const DiagnosticSeries& series);

/// Largest ratio over sample horizons of the trilinear chain:
/// int int |u_z|^2 |grad u| <= C I^(1/2) J^(1/2) J^2.
double trilinear_chain_constant(const DiagnosticSeries& series);

/// Physical-space views of one spectral snapshot used to assemble a record:
/// samples, the nine gradient arrays, optionally the nine d_a d_z arrays.
struct FieldSample {
    PhysicalVectorField phys;
    std::array<std::array<RealArray, 3>, 3> grad;    // grad[a][c] = d_a f_c
    bool has_grad_z = false;
    std::array<std::array<RealArray, 3>, 3> grad_z;  // grad_z[a][c] = d_a d_z f_c

    FieldSample(const SpectralVectorField& fh, bool extended);
    RealArray grad_frobenius() const;
    RealArray dz_magnitude() const;
    RealArray grad_z_frobenius() const;
};

/// Standard per-sample diagnostics of a velocity snapshot. Keys: energy,
/// dissipation, x_energy, y_energy, z_energy, z_dissipation, grad_linf,
/// grad_mixed_l2xy_linfz, z_mixed_l4xy_l2z, trilinear_t13, l3, l4, l6,
/// div_rel, tail_ratio, and (extended) z_l5, grad_z_l52.
std::map<std::string, double> standard_record(const SpectralVectorField& fh,
                                              const FieldSample& sample);

}  // namespace nsstab
