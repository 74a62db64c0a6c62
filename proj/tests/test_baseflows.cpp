#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "nsstab/baseflows.hpp"
#include "nsstab/diagnostics.hpp"
#include "nsstab/norms.hpp"
#include "nsstab/operators.hpp"
#include "nsstab/transform.hpp"
#include "test_helpers.hpp"

using namespace nsstab;
using namespace nsstab::testing;

namespace {

const BoxSpec box32 = BoxSpec::cube(2.0 * pi, 32);

double zero_mode_magnitude(const SpectralVectorField& f) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(f[c][0]));
    return m;
}

}  // namespace

TEST_CASE("Taylor-Green base flow: closed-form norm, exactly 2D, solenoidal") {
    BaseFlowSpec spec;
    spec.kind = BaseFlowSpec::Kind::taylor_green_2d;
    spec.amplitude = 1.0;
    const SpectralVectorField w = make_base_flow(spec, box32);
    // each component integrates sin^2 cos^2 to 2 pi^3
    CHECK(l2_norm_sq(w) == doctest::Approx(4.0 * pi * pi * pi).epsilon(1e-12));
    CHECK(lp_norm(inverse_transform(w), 2.0) ==
          doctest::Approx(2.0 * std::pow(pi, 1.5)).epsilon(1e-12));
    CHECK(directional_grad_l2_sq(w, Axis::Z) == 0.0);
    CHECK(divergence_rel(w) < 1e-12);
    CHECK(zero_mode_magnitude(w) < 1e-15);

    spec.amplitude = 2.5;
    CHECK(l2_norm_sq(make_base_flow(spec, box32)) ==
          doctest::Approx(2.5 * 2.5 * 4.0 * pi * pi * pi).epsilon(1e-12));
}

TEST_CASE("random 2D base flow: deterministic, seed-sensitive, exact amplitude") {
    BaseFlowSpec spec;
    spec.kind = BaseFlowSpec::Kind::random_2d;
    spec.amplitude = 1.3;
    spec.seed = 10;
    const SpectralVectorField a = make_base_flow(spec, box32);
    const SpectralVectorField b = make_base_flow(spec, box32);
    CHECK(max_coef_diff(a, b) == 0.0);

    spec.seed = 11;
    const SpectralVectorField c = make_base_flow(spec, box32);
    CHECK(l2_norm(a - c) > 1e-3 * spec.amplitude);

    CHECK(l2_norm(a) == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(directional_grad_l2_sq(a, Axis::Z) == 0.0);
    CHECK(divergence_rel(a) < 1e-12);
    CHECK(zero_mode_magnitude(a) == 0.0);
}

TEST_CASE("forced base flow carries a solenoidal steady forcing of exact size") {
    BaseFlowSpec spec;
    spec.kind = BaseFlowSpec::Kind::forced_2d;
    spec.amplitude = 1.0;
    spec.seed = 5;
    spec.forcing_amplitude = 0.25;
    const Forcing f = make_base_forcing(spec, box32);
    CHECK(f.kind == Forcing::Kind::steady);
    CHECK(l2_norm(f.field) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(divergence_rel(f.field) < 1e-12);
    CHECK(directional_grad_l2_sq(f.field, Axis::Z) == 0.0);

    spec.kind = BaseFlowSpec::Kind::random_2d;
    spec.forcing_amplitude = 0.0;
    CHECK(make_base_forcing(spec, box32).is_zero());
}

TEST_CASE("base flow spec validation") {
    BaseFlowSpec spec;
    spec.amplitude = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.amplitude = 1.0;
    spec.forcing_amplitude = 0.5;  // without forced_2d kind
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("case i perturbation hits its L2 target exactly") {
    PerturbationSpec spec;
    spec.kase = PerturbationSpec::Case::i;
    spec.seed = 3;
    spec.epsilon = 0.01;
    const SpectralVectorField u = make_perturbation(spec, box32);
    CHECK(lp_norm(inverse_transform(u), 2.0) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(divergence_rel(u) < 1e-12);
    CHECK(zero_mode_magnitude(u) == 0.0);

    spec.epsilon = 0.0;
    CHECK(make_perturbation(spec, box32).max_coefficient_magnitude() == 0.0);
}

TEST_CASE("case ii perturbation: small z-derivative, large everything else") {
    PerturbationSpec spec;
    spec.kase = PerturbationSpec::Case::ii;
    spec.seed = 8;
    spec.epsilon = 0.01;
    spec.bulk_amplitude = 5.0;
    const SpectralVectorField u = make_perturbation(spec, box32);
    CHECK(std::sqrt(directional_grad_l2_sq(u, Axis::Z)) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(l2_norm(u) >= 5.0);
    CHECK(divergence_rel(u) < 1e-12);

    const PhysicalVectorField up = inverse_transform(u);
    const double l3 = lp_norm(up, 3.0);
    const double l4 = lp_norm(up, 4.0);
    CHECK(l3 > 1.0);  // order bulk_amplitude, not epsilon
    CHECK(l4 > 1.0);
    CHECK(l3 / 0.01 > 100.0);  // the L3 norm dwarfs the z-derivative norm
}

TEST_CASE("case ii with epsilon 0 is exactly z-independent") {
    PerturbationSpec spec;
    spec.kase = PerturbationSpec::Case::ii;
    spec.seed = 21;
    spec.epsilon = 0.0;
    spec.bulk_amplitude = 2.0;
    const SpectralVectorField u = make_perturbation(spec, box32);
    CHECK(directional_grad_l2_sq(u, Axis::Z) == 0.0);
    CHECK(l2_norm(u) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("L3-to-z-derivative ratio grows without bound in the bulk amplitude") {
    PerturbationSpec spec;
    spec.kase = PerturbationSpec::Case::ii;
    spec.seed = 4;
    spec.epsilon = 0.01;
    double prev = 0.0;
    for (double bulk : {1.0, 5.0, 10.0}) {
        spec.bulk_amplitude = bulk;
        const SpectralVectorField u = make_perturbation(spec, box32);
        const double ratio = lp_norm(inverse_transform(u), 3.0) /
                             std::sqrt(directional_grad_l2_sq(u, Axis::Z));
        CHECK(ratio > prev);
        prev = ratio;
    }
}

TEST_CASE("perturbation spec validation") {
    PerturbationSpec spec;
    spec.epsilon = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.epsilon = 0.1;
    spec.kase = PerturbationSpec::Case::i;
    spec.bulk_amplitude = 1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("generated fields satisfy their invariants across seeds") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        BaseFlowSpec base;
        base.kind = BaseFlowSpec::Kind::random_2d;
        base.amplitude = 0.7;
        base.seed = seed;
        const SpectralVectorField w = make_base_flow(base, box32);
        CHECK(l2_norm(w) == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(divergence_rel(w) < 1e-12);
        CHECK(directional_grad_l2_sq(w, Axis::Z) == 0.0);

        PerturbationSpec pert;
        pert.kase = PerturbationSpec::Case::ii;
        pert.seed = seed;
        pert.epsilon = 0.05;
        pert.bulk_amplitude = 0.5;
        const SpectralVectorField u = make_perturbation(pert, box32);
        CHECK(std::sqrt(directional_grad_l2_sq(u, Axis::Z)) ==
              doctest::Approx(0.05).epsilon(1e-12));
        CHECK(divergence_rel(u) < 1e-12);
        CHECK(zero_mode_magnitude(u) == 0.0);
        CHECK(hermitian_defect(u) < 1e-14);
    }
}

TEST_CASE("extra-condition norms vanish for 2D bases and scale with a z-ripple") {
    // static rippled field w = (sin y + a sin z, 0, 0); w_z = (a cos z, 0, 0)
    auto series_for = [&](double a) {
        const auto f = fill_field(box32, [&](double, double y, double z) {
            return std::array<double, 3>{std::sin(y) + a * std::sin(z), 0.0, 0.0};
        });
        const SpectralVectorField fh = forward_transform(f);
        DiagnosticSeries s;
        const FieldSample sample(fh, true);
        auto rec = standard_record(fh, sample);
        rec["gronwall_weight"] = 0.0;
        s.append(0.0, rec);
        s.append(1.0, rec);
        return s;
    };

    const auto zero = make_extra_condition_report(series_for(0.0));
    CHECK(zero.first < 1e-12);
    CHECK(zero.second < 1e-12);

    // direct quadrature oracle for ||a cos z||_L5 and ||a sin z||_{L5/2} on
    // the same z-grid (|cos|^5 and |sin|^{5/2} are not band-limited, so the
    // discrete norm is the object under test)
    const int nq = box32.nz();
    double c5 = 0.0, s52 = 0.0;
    for (int n = 0; n < nq; ++n) {
        const double z = 2.0 * pi * n / nq;
        c5 += std::pow(std::abs(std::cos(z)), 5.0) * (2.0 * pi / nq);
        s52 += std::pow(std::abs(std::sin(z)), 2.5) * (2.0 * pi / nq);
    }
    const double a = 0.01;
    // time integral over [0,1] of a constant is the constant itself
    const double expected_l5 = a * std::pow(c5 * 4.0 * pi * pi, 0.2);
    const double expected_l52 = a * std::pow(s52 * 4.0 * pi * pi, 0.4);
    const auto rippled = make_extra_condition_report(series_for(a));
    CHECK(rippled.first == doctest::Approx(expected_l5).epsilon(1e-9));
    CHECK(rippled.second == doctest::Approx(expected_l52).epsilon(1e-9));

    // both norms are O(a): doubling a doubles them
    const auto doubled = make_extra_condition_report(series_for(2.0 * a));
    CHECK(doubled.first == doctest::Approx(2.0 * rippled.first).epsilon(1e-10));
    CHECK(doubled.second == doctest::Approx(2.0 * rippled.second).epsilon(1e-10));
}
