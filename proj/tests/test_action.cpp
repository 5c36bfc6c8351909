#include "semiclass/action.hpp"
#include "semiclass/potential.hpp"

#include <doctest.h>

#include <cmath>

using namespace semiclass;

namespace {

constexpr double pi = 3.14159265358979323846;

// Lanczos approximation, g = 7, n = 9
double lanczos_lgamma(double x) {
    static const double c[] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                               771.32342877765313,   -176.61502916214059,   12.507343278686905,
                               -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5)
        return std::log(pi / std::abs(std::sin(pi * x))) - lanczos_lgamma(1.0 - x);
    x -= 1.0;
    double a = c[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i)
        a += c[i] / (x + i);
    return 0.5 * std::log(2 * pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

double beta_oracle(double a, double b) {
    return std::exp(lanczos_lgamma(a) + lanczos_lgamma(b) - lanczos_lgamma(a + b));
}

Potential harmonic() { return make_power_law({}); }
Potential quartic() { return make_power_law({0.0, 1.0, 4.0, 0.0, 1.0, 4.0}); }

Weight constant(double c) {
    return {[c](double) { return c; }, {}};
}

} // namespace

TEST_CASE("Lanczos oracle sanity") {
    CHECK(beta_oracle(1.5, 0.5) == doctest::Approx(pi / 2).epsilon(1e-13));
    CHECK(beta_oracle(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
}

TEST_CASE("phi closed forms") {
    CHECK(phi(harmonic(), 1.0).phi == doctest::Approx(pi / 2).epsilon(1e-12));
    CHECK(phi(make_power_law({0.0, 1.0, 1.0, 0.0, 1.0, 1.0}), 1.0).phi == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(partial_action(harmonic(), 1.0, 0.0, WellSide::plus) == doctest::Approx(pi / 4).epsilon(1e-12));
    CHECK(power_law_closed_forms({}, 1.0).phi_plus0 == doctest::Approx(0.7853981633974483).epsilon(1e-12));
}

TEST_CASE("phi_prime") {
    CHECK(phi_prime(harmonic(), 1.0) == doctest::Approx(pi / 2).epsilon(1e-12));
    const double expected = 0.25 * beta_oracle(0.25, 0.5);
    CHECK(phi_prime(quartic(), 1.0) == doctest::Approx(expected).epsilon(1e-10));

    const Potential pots[] = {harmonic(), quartic(), make_power_law({0.0, 1.0, 2.0, 0.0, 2.0, 3.0})};
    const double h = 1e-5;
    for (const auto& pot : pots)
        for (double lambda : {0.5, 1.0, 2.0}) {
            const double fd = (phi(pot, lambda + h).phi - phi(pot, lambda - h).phi) / (2 * h);
            CHECK(std::abs(phi_prime(pot, lambda) - fd) <= 1e-7);
        }
}

TEST_CASE("phi is increasing") {
    double prev = 0.0;
    for (int i = 1; i <= 30; ++i) {
        const double lambda = 0.1 * i;
        const double p = phi(quartic(), lambda).phi;
        CHECK(p > prev);
        CHECK(phi_prime(quartic(), lambda) > 0.0);
        prev = p;
    }
}

TEST_CASE("partial actions") {
    const double full = phi(harmonic(), 1.0).phi;
    CHECK(std::abs(partial_action(harmonic(), 1.0, 1.0, WellSide::plus)) <= 1e-14);
    for (double x : {-0.5, 0.0, 0.5})
        CHECK(std::abs(partial_action(harmonic(), 1.0, x, WellSide::plus) +
                       partial_action(harmonic(), 1.0, x, WellSide::minus) - full) <= 2e-10);

    const Potential skew = make_power_law({0.5, 1.0, 4.0, 0.0, 2.0, 2.0});
    const double lambda = 1.3;
    const TurningPoints tp = turning_points(skew, lambda);
    const double total = phi(skew, lambda).phi;
    for (int i = 1; i <= 5; ++i) {
        const double x = tp.x_minus + (tp.x_plus - tp.x_minus) * i / 6.0;
        if (x == 0.0)
            continue;
        CHECK(std::abs(partial_action(skew, lambda, x, WellSide::plus) +
                       partial_action(skew, lambda, x, WellSide::minus) - total) <= 2e-10);
    }
}

TEST_CASE("classical averages") {
    CHECK(classical_average(quartic(), 1.0, constant(1.0)) == doctest::Approx(1.0).epsilon(1e-14));

    const Potential h = harmonic();
    const Weight wv{[&h](double x) { return h.value(x); }, {}};
    CHECK(classical_average(h, 1.0, wv) == doctest::Approx(0.5).epsilon(1e-10));

    const Weight right{[](double x) { return x > 0 ? 1.0 : 0.0; }, {0.0}};
    CHECK(classical_average(quartic(), 1.0, right) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("averages ignore null-measure changes") {
    const Potential q = quartic();
    const Weight w{[](double x) { return x * x; }, {}};
    const Weight spiked{[](double x) { return x == 0.3 ? 1e6 : x * x; }, {0.3}};
    CHECK(classical_average(q, 1.0, w) == doctest::Approx(classical_average(q, 1.0, spiked)).epsilon(1e-10));
}

TEST_CASE("kinetic energy identities") {
    CHECK(kinetic_cl(harmonic(), 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    const Potential pots[] = {harmonic(), quartic()};
    for (const auto& pot : pots)
        for (double lambda : {0.5, 1.0, 2.0}) {
            const Weight wv{[&pot](double x) { return pot.value(x); }, {}};
            const double k = kinetic_cl(pot, lambda);
            CHECK(std::abs(k - phi(pot, lambda).phi / (2 * phi_prime(pot, lambda))) <= 1e-10);
            CHECK(std::abs(k + classical_average(pot, lambda, wv) - lambda) <= 1e-10);
        }
}

TEST_CASE("classical period") {
    CHECK(classical_period(harmonic(), 1.0, 0.5) == doctest::Approx(pi).epsilon(1e-12));
    for (double lambda : {0.5, 1.0, 2.0})
        CHECK(classical_period(harmonic(), lambda, 0.5) == doctest::Approx(pi).epsilon(1e-12));
    CHECK(classical_period(quartic(), 1.3, 2.0) == doctest::Approx(2 * classical_period(quartic(), 1.3, 0.5)).epsilon(1e-13));
}

TEST_CASE("power law closed forms") {
    const double quarter = power_law_closed_forms({0.0, 1.0, 4.0, 0.0, 1.0, 2.0}, 1.0).phi_plus0;
    CHECK(quarter == doctest::Approx(0.25 * beta_oracle(1.5, 0.25)).epsilon(1e-12));

    CHECK(power_law_closed_forms({}, 1.0).phi == doctest::Approx(phi(harmonic(), 1.0).phi).epsilon(1e-12));

    for (double alpha : {1.0, 2.0, 4.0}) {
        const PowerLawParams p{0.0, 1.3, alpha, 0.0, 1.0, 2.0};
        const double ratio = power_law_closed_forms(p, 4.0).phi_plus0 / power_law_closed_forms(p, 1.0).phi_plus0;
        CHECK(ratio == doctest::Approx(std::pow(4.0, 0.5 + 1.0 / alpha)).epsilon(1e-13));
    }
}

TEST_CASE("closed forms agree with quadrature") {
    const std::pair<double, double> exps[] = {{2, 2}, {2, 4}, {1, 3}};
    for (auto [ap, am] : exps)
        for (double shift : {0.0, 0.3}) {
            const PowerLawParams p{shift, 1.5, ap, 0.0, 0.7, am};
            const Potential pot = make_power_law(p);
            for (double lambda : {0.8, 1.7}) {
                const PowerLawActions c = power_law_closed_forms(p, lambda);
                CAPTURE(ap);
                CAPTURE(am);
                CAPTURE(shift);
                CHECK(c.phi == doctest::Approx(phi(pot, lambda).phi).epsilon(1e-8));
                CHECK(c.phi_prime == doctest::Approx(phi_prime(pot, lambda)).epsilon(1e-8));
                CHECK(c.kinetic == doctest::Approx(kinetic_cl(pot, lambda)).epsilon(1e-8));
            }
        }
}
