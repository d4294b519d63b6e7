#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "avwave/errors.hpp"
#include "avwave/freq.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace avwave;
using std::numbers::pi;

TEST_SUITE("freq") {

TEST_CASE("defaults at 0.16 pi") {
    const auto r = transfer_at(linearize(ControllerSpec{}), 0.16 * pi);
    CHECK(r.magnitude == doctest::Approx(oracle::kDefaultsMag016Pi).epsilon(1e-13));
    CHECK(r.phase == doctest::Approx(oracle::kDefaultsPhase016Pi).epsilon(1e-13));
    CHECK(r.response_time == doctest::Approx(oracle::kDefaultsResponseTime016Pi).epsilon(1e-13));
    CHECK(std::abs(r.value) == doctest::Approx(r.magnitude).epsilon(1e-15));
}

TEST_CASE("Newell anchor at low frequency") {
    const auto r = transfer_at(linearize(ControllerSpec{}), 1e-3);
    CHECK(r.magnitude == doctest::Approx(oracle::kDefaultsMagLow).epsilon(1e-13));
    CHECK(r.response_time == doctest::Approx(oracle::kDefaultsResponseTimeLow).epsilon(1e-12));
    CHECK(std::abs(r.magnitude - 1.0) <= 1e-4);
    CHECK(std::abs(r.response_time - 1.2) <= 1e-3);
}

TEST_CASE("reduced time gap at 1 and 2 pi rad/s") {
    ControllerSpec c;
    c.tau = 0.5;
    const auto a = transfer_at(linearize(c), 1.0);
    CHECK(a.magnitude == doctest::Approx(oracle::kTau05MagAt1).epsilon(1e-13));
    CHECK(a.phase == doctest::Approx(oracle::kTau05PhaseAt1).epsilon(1e-13));
    const auto b = transfer_at(linearize(c), 2.0 * pi);
    CHECK(b.magnitude == doctest::Approx(oracle::kTau05MagAt2Pi).epsilon(1e-13));
    CHECK(b.phase == doctest::Approx(oracle::kTau05PhaseAt2Pi).epsilon(1e-13));
}

TEST_CASE("errors") {
    const auto g = linearize(ControllerSpec{});
    CHECK_THROWS_AS(transfer_at(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(transfer_at(g, -1.0), std::invalid_argument);
    // f_self = phi omega^2 and f_p = omega^2 at omega = 1: undamped resonance.
    const LinearGains resonant{1.0, 0.1, 0.5, 0.1};
    CHECK_THROWS_AS(transfer_at(resonant, 1.0), NumericalError);
}

TEST_CASE("Newell transfer") {
    const auto a = newell_transfer(1.2, 1.0);
    CHECK(a.magnitude == 1.0);
    CHECK(a.phase == doctest::Approx(-1.2).epsilon(1e-15));
    const auto b = newell_transfer(1.2, 1e-9);
    CHECK(b.response_time == doctest::Approx(1.2).epsilon(1e-15));
    const auto c = newell_transfer(0.5, 2.0 * pi);
    CHECK(c.phase == doctest::Approx(-pi).epsilon(1e-15));
    const std::vector<FrequencyResponse> rows{a, b, c};
    CHECK(string_stability_margin(rows).sup_magnitude == 1.0);
}

TEST_CASE("string stability margins") {
    const auto grid = log_grid(1e-3, 10.0, 2000);
    REQUIRE(grid.size() == 2000);
    CHECK(grid.front() == 1e-3);
    CHECK(grid.back() == doctest::Approx(10.0).epsilon(1e-14));
    const auto m = string_stability_margin(linearize(ControllerSpec{}), grid);
    CHECK(m.sup_magnitude == doctest::Approx(oracle::kDefaultsSup).epsilon(1e-12));
    CHECK(m.sup_magnitude <= 1.0);

    ControllerSpec weak;
    weak.k_v = 0.2;
    const auto w = string_stability_margin(linearize(weak), grid);
    CHECK(w.sup_magnitude == doctest::Approx(oracle::kWeakKvSup).epsilon(1e-9));
    CHECK(w.sup_magnitude > 1.0);

    CHECK(default_stability_grid().size() == 2000);
    const std::vector<double> unsorted{1.0, 0.5};
    CHECK_THROWS_AS(string_stability_margin(linearize(weak), unsorted), std::invalid_argument);
    CHECK_THROWS_AS(string_stability_margin(linearize(weak), std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("property: conjugate symmetry of the rational transfer") {
    auto r = gen::rng(21);
    for (int n = 0; n < 1000; ++n) {
        const auto g = linearize(gen::controller(r));
        const double w = gen::log_uniform(r, 1e-3, 50.0);
        const auto eval = [&](double omega) {
            const std::complex<double> s{0.0, omega};
            return (g.f_p + g.f_lead * s) / (g.phi * s * s * s + s * s + g.f_self * s + g.f_p);
        };
        const auto pos = transfer_at(g, w).value;
        const auto neg = eval(-w);
        CHECK(std::abs(pos - std::conj(neg)) <= 1e-12 * std::abs(pos));
    }
}

TEST_CASE("property: low-frequency limits shrink quadratically") {
    auto r = gen::rng(22);
    for (int n = 0; n < 200; ++n) {
        const ControllerSpec c = gen::controller(r);
        const auto g = linearize(c);
        const double w = 1e-3;
        const auto a = transfer_at(g, w);
        const auto b = transfer_at(g, w / 2.0);
        const double mag_ratio = (a.magnitude - 1.0) / (b.magnitude - 1.0);
        const double rt_ratio = (a.response_time - c.tau) / (b.response_time - c.tau);
        CHECK(mag_ratio == doctest::Approx(4.0).epsilon(2e-3));
        CHECK(rt_ratio == doctest::Approx(4.0).epsilon(2e-3));
    }
}

TEST_CASE("property: corrected closed-form magnitude agrees with complex evaluation") {
    auto r = gen::rng(23);
    for (int n = 0; n < 1000; ++n) {
        const ControllerSpec c = gen::controller(r);
        const double w = gen::log_uniform(r, 1e-3, 50.0);
        const double A = c.k_s;
        const double B = w * c.k_v;
        const double C = c.k_s - w * w;
        const double D = w * (c.k_v + c.k_s * c.tau) - c.phi * w * w * w;
        const double closed = std::sqrt((A * A + B * B) / (C * C + D * D));
        CHECK(transfer_at(linearize(c), w).magnitude == doctest::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("property: phase is continuous along sorted sweeps") {
    auto r = gen::rng(24);
    for (int n = 0; n < 200; ++n) {
        const auto g = linearize(gen::controller(r));
        const auto rows = frequency_sweep(g, log_grid(1e-3, 100.0, 400));
        CHECK(std::abs(rows.front().phase) < 0.01);
        for (std::size_t k = 1; k < rows.size(); ++k) {
            CHECK(std::abs(rows[k].phase - rows[k - 1].phase) < pi);
            const double wrapped = std::remainder(rows[k].phase - std::arg(rows[k].value), 2.0 * pi);
            CHECK(std::abs(wrapped) < 1e-12);
        }
        CHECK(rows.back().phase < -pi / 2.0);
    }
}

}  // TEST_SUITE
