#include "nsstab/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "nsstab/operators.hpp"
#include "nsstab/transform.hpp"

namespace nsstab {

void DiagnosticSeries::append(double t, std::map<std::string, double> record) {
    if (!times.empty() && !(t > times.back()))
        throw std::invalid_argument("DiagnosticSeries: sample times must be strictly increasing");
    for (const auto& [key, v] : record)
        if (!std::isfinite(v))
            throw std::invalid_argument("DiagnosticSeries: non-finite value for '" + key + "'");
    if (!records.empty()) {
        const auto& first = records.front();
        if (first.size() != record.size())
            throw std::invalid_argument("DiagnosticSeries: record key set changed");
        for (const auto& [key, v] : first) {
            (void)v;
            if (record.find(key) == record.end())
                throw std::invalid_argument("DiagnosticSeries: missing key '" + key + "'");
        }
    }
    times.push_back(t);
    records.push_back(std::move(record));
}

bool DiagnosticSeries::has(const std::string& key) const {
    return !records.empty() && records.front().count(key) > 0;
}

std::vector<double> DiagnosticSeries::column(const std::string& key) const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        auto it = r.find(key);
        if (it == r.end()) throw std::out_of_range("DiagnosticSeries: no column '" + key + "'");
        out.push_back(it->second);
    }
    return out;
}

double DiagnosticSeries::value(std::size_t sample, const std::string& key) const {
    const auto& r = records.at(sample);
    auto it = r.find(key);
    if (it == r.end()) throw std::out_of_range("DiagnosticSeries: no column '" + key + "'");
    return it->second;
}

void write_csv(const DiagnosticSeries& series, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    os << "time";
    if (!series.records.empty())
        for (const auto& [key, v] : series.records.front()) {
            (void)v;
            os << "," << key;
        }
    os << "\n";
    char buf[40];
    for (std::size_t n = 0; n < series.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%.17g", series.times[n]);
        os << buf;
        for (const auto& [key, v] : series.records[n]) {
            (void)key;
            std::snprintf(buf, sizeof buf, "%.17g", v);
            os << "," << buf;
        }
        os << "\n";
    }
}

double trapezoid(const std::vector<double>& times, const std::vector<double>& values) {
    double acc = 0.0;
    for (std::size_t n = 1; n < times.size(); ++n)
        acc += 0.5 * (values[n] + values[n - 1]) * (times[n] - times[n - 1]);
    return acc;
}

std::vector<double> trapezoid_cumulative(const std::vector<double>& times,
                                         const std::vector<double>& values) {
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t n = 1; n < times.size(); ++n)
        out[n] = out[n - 1] + 0.5 * (values[n] + values[n - 1]) * (times[n] - times[n - 1]);
    return out;
}

PaperQuantities accumulate_paper_quantities(const DiagnosticSeries& series, double nu) {
    if (series.empty())
        throw std::invalid_argument("accumulate_paper_quantities: empty series");
    const auto energy = series.column("energy");
    const auto dissipation = series.column("dissipation");
    const auto z_energy = series.column("z_energy");
    const auto z_dissipation = series.column("z_dissipation");
    std::vector<double> weight(series.size(), 0.0);
    if (series.has("gronwall_weight")) weight = series.column("gronwall_weight");

    const auto cum_d = trapezoid_cumulative(series.times, dissipation);
    const auto cum_zd = trapezoid_cumulative(series.times, z_dissipation);
    std::vector<double> weighted_ze(series.size()), weighted_zd(series.size());
    for (std::size_t n = 0; n < series.size(); ++n) {
        weighted_ze[n] = std::exp(-weight[n]) * z_energy[n];
        weighted_zd[n] = std::exp(-weight[n]) * z_dissipation[n];
    }
    const auto cum_wzd = trapezoid_cumulative(series.times, weighted_zd);

    PaperQuantities q;
    q.J0 = std::sqrt(z_energy.front());
    q.K0 = std::sqrt(energy.front());
    q.L0 = q.J0;
    double sup_e = 0.0;
    for (std::size_t n = 0; n < series.size(); ++n) {
        sup_e = std::max(sup_e, energy[n]);
        q.J = std::max(q.J, std::sqrt(z_energy[n] + 2.0 * nu * cum_zd[n]));
        q.K = std::max(q.K, std::sqrt(energy[n] + 2.0 * nu * cum_d[n]));
        q.L = std::max(q.L, std::sqrt(weighted_ze[n] + 2.0 * nu * cum_wzd[n]));
    }
    q.I = std::sqrt(sup_e) + std::sqrt(cum_d.back());
    return q;
}

namespace {

struct PlainAccumulators {
    std::vector<double> sup_e, sup_ze, cum_d, cum_zd;
};

PlainAccumulators plain_accumulators(const DiagnosticSeries& series) {
    PlainAccumulators a;
    const auto energy = series.column("energy");
    const auto z_energy = series.column("z_energy");
    a.cum_d = trapezoid_cumulative(series.times, series.column("dissipation"));
    a.cum_zd = trapezoid_cumulative(series.times, series.column("z_dissipation"));
    a.sup_e.resize(series.size());
    a.sup_ze.resize(series.size());
    double se = 0.0, sz = 0.0;
    for (std::size_t n = 0; n < series.size(); ++n) {
        se = std::max(se, energy[n]);
        sz = std::max(sz, z_energy[n]);
        a.sup_e[n] = se;
        a.sup_ze[n] = sz;
    }
    return a;
}

}  // namespace

double plain_I(const DiagnosticSeries& series, std::size_t n) {
    const auto a = plain_accumulators(series);
    return std::sqrt(a.sup_e.at(n)) + std::sqrt(a.cum_d.at(n));
}

double plain_J(const DiagnosticSeries& series, std::size_t n) {
    const auto a = plain_accumulators(series);
    return std::sqrt(a.sup_ze.at(n)) + std::sqrt(a.cum_zd.at(n));
}

double mixed_norm_estimate_constant(const DiagnosticSeries& series) {
    if (series.size() < 2)
        throw std::invalid_argument("mixed_norm_estimate_constant: need >= 2 samples");
    auto m = series.column("grad_mixed_l2xy_linfz");
    for (auto& v : m) v = v * v;
    const double lhs = std::sqrt(trapezoid(series.times, m));
    const double denom =
        std::sqrt(plain_I(series, series.size() - 1)) * std::sqrt(plain_J(series, series.size() - 1));
    if (denom == 0.0)
        throw std::domain_error("mixed_norm_estimate_constant: degenerate trajectory (I J = 0)");
    return lhs / denom;
}

double anisotropic_interp_check(const DiagnosticSeries& series) {
    if (series.size() < 2)
        throw std::invalid_argument("anisotropic_interp_check: need >= 2 samples");
    const double J = plain_J(series, series.size() - 1);
    if (J == 0.0) throw std::domain_error("anisotropic_interp_check: J = 0 (z-independent flow)");
    auto m = series.column("z_mixed_l4xy_l2z");
    for (auto& v : m) v = v * v * v * v;
    const double lhs = std::pow(trapezoid(series.times, m), 0.25);
    return lhs / J;
}

double trilinear_chain_constant(const DiagnosticSeries& series) {
    if (series.size() < 2)
        throw std::invalid_argument("trilinear_chain_constant: need >= 2 samples");
    const auto cum = trapezoid_cumulative(series.times, series.column("trilinear_t13"));
    const auto a = plain_accumulators(series);
    double worst = 0.0;
    for (std::size_t n = 1; n < series.size(); ++n) {
        const double I = std::sqrt(a.sup_e[n]) + std::sqrt(a.cum_d[n]);
        const double J = std::sqrt(a.sup_ze[n]) + std::sqrt(a.cum_zd[n]);
        const double bound = std::sqrt(I) * std::sqrt(J) * J * J;
        if (bound > 0.0) worst = std::max(worst, cum[n] / bound);
    }
    return worst;
}

FieldSample::FieldSample(const SpectralVectorField& fh, bool extended)
    : phys(inverse_transform(fh, false)), grad(gradient_physical(fh)) {
    if (extended) {
        grad_z = gradient_physical(derivative(fh, Axis::Z));
        has_grad_z = true;
    }
}

RealArray FieldSample::grad_frobenius() const {
    RealArray s = grad[0][0].square();
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c)
            if (a != 0 || c != 0) s += grad[a][c].square();
    return s.sqrt();
}

RealArray FieldSample::dz_magnitude() const {
    return (grad[2][0].square() + grad[2][1].square() + grad[2][2].square()).sqrt();
}

RealArray FieldSample::grad_z_frobenius() const {
    RealArray s = grad_z[0][0].square();
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c)
            if (a != 0 || c != 0) s += grad_z[a][c].square();
    return s.sqrt();
}

std::map<std::string, double> standard_record(const SpectralVectorField& fh,
                                              const FieldSample& sample) {
    const BoxSpec& box = fh.box;
    std::map<std::string, double> r;
    r["energy"] = l2_norm_sq(fh);
    r["dissipation"] = grad_l2_sq(fh);
    r["x_energy"] = directional_grad_l2_sq(fh, Axis::X);
    r["y_energy"] = directional_grad_l2_sq(fh, Axis::Y);
    r["z_energy"] = directional_grad_l2_sq(fh, Axis::Z);
    r["z_dissipation"] = grad_dz_l2_sq(fh);
    const RealArray gf = sample.grad_frobenius();
    r["grad_linf"] = gf.size() ? gf.maxCoeff() : 0.0;
    r["grad_mixed_l2xy_linfz"] = mixed_norm_scalar(gf, box, MixedNormSpec{2.0, inf});
    const RealArray dz = sample.dz_magnitude();
    r["z_mixed_l4xy_l2z"] = mixed_norm_scalar(dz, box, MixedNormSpec{4.0, 2.0});
    r["trilinear_t13"] = (dz.square() * gf * box.cell_volume()).sum();
    r["l3"] = lp_norm(sample.phys, 3.0);
    r["l4"] = lp_norm(sample.phys, 4.0);
    r["l6"] = lp_norm(sample.phys, 6.0);
    r["div_rel"] = divergence_rel(fh);
    r["tail_ratio"] = spectral_tail_ratio(fh);
    if (sample.has_grad_z) {
        r["z_l5"] = lp_norm_scalar(dz, box, 5.0);
        r["grad_z_l52"] = lp_norm_scalar(sample.grad_z_frobenius(), box, 2.5);
    }
    return r;
}

}  // namespace nsstab
