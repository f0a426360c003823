#include "iontrap/motion.hpp"
#include "iontrap/constants.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace iontrap;
using namespace iontrap::constants;

namespace {

// brute-force series for the generalised Laguerre polynomial,
// L_n^a(x) = sum_k (-1)^k binom(n+a, n-k) x^k / k!
double laguerre_series(int n, int a, double x)
{
    auto binom = [](int top, int bottom) {
        double r = 1.0;
        for (int i = 1; i <= bottom; ++i)
            r *= static_cast<double>(top - bottom + i) / i;
        return r;
    };
    double sum = 0.0;
    double xk = 1.0;
    double kfact = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            xk *= x;
            kfact *= k;
        }
        sum += (k % 2 ? -1.0 : 1.0) * binom(n + a, n - k) * xk / kfact;
    }
    return sum;
}

} // namespace

TEST_CASE("Laguerre recurrence matches the direct series")
{
    for (int n = 0; n <= 20; ++n)
        for (int a = 0; a <= 3; ++a)
            for (double x : {0.0, 0.04, 0.09, 0.5, 1.0}) {
                const double ref = laguerre_series(n, a, x);
                const double got = motion::laguerre(n, a, x);
                CHECK(std::abs(got - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
            }
}

TEST_CASE("Lamb-Dicke parameter of the axial mode")
{
    const double k_eff = std::sqrt(2.0) * two_pi / 280e-9;
    const double eta = motion::lamb_dicke(k_eff, ion_mass, two_pi * 2.0e6);
    CHECK(eta == doctest::Approx(0.3).epsilon(0.07));
    CHECK(motion::lamb_dicke(k_eff, ion_mass, 4.0 * two_pi * 2.0e6) == doctest::Approx(eta / 2.0));
    CHECK(motion::lamb_dicke(0.0, ion_mass, two_pi * 2.0e6) == 0.0);
}

TEST_CASE("co-propagating Raman Rabi frequency")
{
    const double legs = two_pi * 90.0e6;
    const double det = two_pi * 80.0e9;
    CHECK(motion::raman_rabi_copropagating(legs, legs, det)
          == doctest::Approx(two_pi * 202.5e3).epsilon(1e-9));
    CHECK(motion::raman_rabi_copropagating(legs, legs, 2.0 * det)
          == doctest::Approx(two_pi * 101.25e3));
    // doubling both intensities doubles Omega_R (legs scale with sqrt I)
    const double boosted = motion::raman_rabi_copropagating(std::sqrt(2.0) * legs,
                                                            std::sqrt(2.0) * legs, det);
    CHECK(boosted == doctest::Approx(2.0 * two_pi * 202.5e3));
    CHECK_THROWS_AS(motion::raman_rabi_copropagating(legs, legs, 0.0), std::domain_error);
}

TEST_CASE("motion-coupled Rabi frequencies")
{
    const double base = two_pi * 202.0e3;
    const double eta = 0.3;
    const double r10 = motion::raman_rabi(1, 0, eta, base);
    const double r20 = motion::raman_rabi(2, 0, eta, base);
    CHECK(std::abs(r20 / r10) == doctest::Approx(0.21).epsilon(0.05));
    CHECK(std::abs(r20 / r10) == doctest::Approx(eta / std::sqrt(2.0)).epsilon(1e-9));

    CHECK(motion::raman_rabi(0, 0, eta, base) == doctest::Approx(base * std::exp(-0.045)));

    // eta = 0: carrier only
    CHECK(motion::raman_rabi(5, 5, 0.0, base) == doctest::Approx(base));
    CHECK(motion::raman_rabi(5, 4, 0.0, base) == 0.0);
}

TEST_CASE("Rabi frequency is symmetric in the Fock pair")
{
    const double base = 1.0;
    for (double eta : {0.1, 0.3, 0.7, 1.0})
        for (int n = 0; n <= 50; n += 5)
            for (int np = 0; np <= 50; np += 7)
                CHECK(motion::raman_rabi(n, np, eta, base)
                      == doctest::Approx(motion::raman_rabi(np, n, eta, base)).epsilon(1e-12));
}

TEST_CASE("thermal distribution at the Doppler limit")
{
    const auto r = motion::thermal_distribution(1.0e-3, two_pi * 2.0e6, 400);
    CHECK(r.mean_n == doctest::Approx(10.0).epsilon(0.05));
    CHECK(r.distribution.probs(0) == doctest::Approx(0.09).epsilon(0.05));
    CHECK(r.distribution.probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
    // direct-sum oracle for the mean
    CHECK(r.distribution.mean_n() == doctest::Approx(r.mean_n).epsilon(1e-6));

    const auto cold = motion::thermal_distribution(1.0e-9, two_pi * 2.0e6, 50);
    CHECK(cold.distribution.probs(0) == doctest::Approx(1.0));
}

TEST_CASE("flopping of a point distribution is an exact sinusoid")
{
    motion::RamanConfig cfg;
    cfg.geometry = motion::Geometry::orthogonal;
    const auto dist = motion::MotionalDistribution::fock(3, 10);
    const double rabi = std::abs(motion::raman_rabi(3, 4, cfg.eta(), cfg.base_rabi));
    Eigen::VectorXd times(50);
    for (int i = 0; i < 50; ++i)
        times(i) = i * 1e-6;
    const auto curve = motion::flopping_curve(dist, cfg, +1, 0.0, times);
    for (int i = 0; i < 50; ++i) {
        const double s = std::sin(0.5 * rabi * times(i));
        CHECK(curve(i) == doctest::Approx(1.0 - s * s).epsilon(1e-12));
    }
}

TEST_CASE("co-propagating carrier flops at the base frequency")
{
    motion::RamanConfig cfg;
    cfg.geometry = motion::Geometry::copropagating;
    const auto th = motion::thermal_distribution(1.0e-3, two_pi * 2.0e6, 200);
    const double tau_pi = pi / cfg.base_rabi;
    Eigen::VectorXd t(1);
    t(0) = tau_pi;
    CHECK(motion::flopping_curve(th.distribution, cfg, 0, 0.0, t)(0)
          == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("hot orthogonal carrier flopping washes out")
{
    motion::RamanConfig cfg; // orthogonal, eta 0.3, 202 kHz
    const auto th = motion::thermal_distribution(1.0e-3, two_pi * 2.0e6, 400);
    const double tau_pi = pi / std::abs(motion::raman_rabi(0, 0, cfg.eta(), cfg.base_rabi));
    Eigen::VectorXd t(1);
    // after a few pi times, contrast must be mostly gone
    t(0) = 7.0 * tau_pi;
    const double p = motion::flopping_curve(th.distribution, cfg, 0, 0.0, t)(0);
    CHECK(p > 0.3);
    CHECK(p < 0.7);
}

TEST_CASE("ground-state pi-time ratio of carrier and blue sideband is eta")
{
    motion::RamanConfig cfg;
    const double tau_carrier = pi / std::abs(motion::raman_rabi(0, 0, cfg.eta(), cfg.base_rabi));
    const double tau_bsb = pi / std::abs(motion::raman_rabi(0, 1, cfg.eta(), cfg.base_rabi));
    CHECK(tau_carrier / tau_bsb == doctest::Approx(cfg.eta()).epsilon(0.01));
}

TEST_CASE("frequency scan produces three dips separated by the axial frequency")
{
    motion::RamanConfig cfg;
    const double wz = two_pi * 2.0e6;
    const double carrier = two_pi * 1788.85e6;
    const auto th = motion::thermal_distribution(1.5e-3, wz, 600);
    const double tau = 5.0 * pi / cfg.base_rabi;
    const int n = 1601;
    Eigen::VectorXd grid(n);
    for (int i = 0; i < n; ++i)
        grid(i) = carrier + (-1.25 + 2.5 * i / (n - 1)) * wz;
    const auto scan = motion::frequency_scan(th.distribution, cfg, tau, grid, wz, carrier);

    // locate the three minima
    auto min_near = [&](double centre) {
        int best = 0;
        double best_v = 2.0;
        for (int i = 0; i < n; ++i) {
            if (std::abs(grid(i) - centre) < 0.45 * wz && scan(i) < best_v) {
                best_v = scan(i);
                best = i;
            }
        }
        return std::pair<double, double>(grid(best), best_v);
    };
    const auto red = min_near(carrier - wz);
    const auto car = min_near(carrier);
    const auto blue = min_near(carrier + wz);
    const double step = grid(1) - grid(0);
    CHECK(std::abs((blue.first - car.first) - wz) <= step);
    CHECK(std::abs((car.first - red.first) - wz) <= step);

    // sideband depth ratio reflects the thermal occupation
    const double r_depth = 1.0 - red.second;
    const double b_depth = 1.0 - blue.second;
    const double nbar = motion::mean_n_from_sidebands(r_depth, b_depth);
    const auto expected = motion::thermal_distribution(1.5e-3, wz, 600).mean_n;
    CHECK(nbar == doctest::Approx(expected).epsilon(0.2));
}

TEST_CASE("carrier dip width tracks the Fourier limit of the pulse")
{
    motion::RamanConfig cfg;
    cfg.geometry = motion::Geometry::copropagating;
    const double tau = 5.8e-6;
    cfg.base_rabi = pi / tau; // pi pulse at this duration
    const auto dist = motion::MotionalDistribution::fock(0, 2);
    const double carrier = two_pi * 1775.28e6;
    const int n = 40001;
    Eigen::VectorXd grid(n);
    for (int i = 0; i < n; ++i)
        grid(i) = carrier + two_pi * (-0.5e6 + 1.0e6 * i / (n - 1));
    const auto scan = motion::frequency_scan(dist, cfg, tau, grid, two_pi * 2.0e6, carrier);

    const double depth = 1.0 - scan.minCoeff();
    double left = 0.0, right = 0.0;
    for (int i = 1; i < n; ++i) {
        if (scan(i - 1) > 1.0 - 0.5 * depth && scan(i) <= 1.0 - 0.5 * depth)
            left = grid(i);
        if (scan(i - 1) <= 1.0 - 0.5 * depth && scan(i) > 1.0 - 0.5 * depth)
            right = grid(i);
    }
    const double fwhm_hz = (right - left) / two_pi;
    CHECK(fwhm_hz > 0.9 * 0.14e6);
    CHECK(fwhm_hz < 1.3 * 0.14e6);
    // within 50% of the 1/tau estimate
    const double fourier = 1.0 / tau;
    CHECK(std::abs(fwhm_hz - fourier) < 0.5 * fourier);
}

TEST_CASE("ground state shows no red sideband dip")
{
    motion::RamanConfig cfg;
    const auto dist = motion::MotionalDistribution::fock(0, 5);
    const double wz = two_pi * 2.0e6;
    const double carrier = two_pi * 1788.85e6;
    const double tau = pi / std::abs(motion::raman_rabi(0, 1, cfg.eta(), cfg.base_rabi));
    Eigen::VectorXd at_red(1);
    at_red(0) = carrier - wz;
    const auto scan = motion::frequency_scan(dist, cfg, tau, at_red, wz, carrier);
    // only far-detuned carrier bleed-through remains, no actual dip
    CHECK(1.0 - scan(0) < 0.02);

    // the blue sideband does dip at this pulse duration
    Eigen::VectorXd at_blue(1);
    at_blue(0) = carrier + wz;
    const auto blue = motion::frequency_scan(dist, cfg, tau, at_blue, wz, carrier);
    CHECK(1.0 - blue(0) > 0.9);
}

TEST_CASE("mean occupation from sideband ratio")
{
    CHECK(motion::mean_n_from_sidebands(0.0, 0.5) == 0.0);
    const double r_065 = 0.65 / 1.65;
    CHECK(motion::mean_n_from_sidebands(r_065, 1.0) == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(motion::mean_n_from_sidebands(15.0 / 16.0, 1.0) == doctest::Approx(15.0).epsilon(1e-9));
    CHECK_THROWS_AS(motion::mean_n_from_sidebands(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(motion::mean_n_from_sidebands(1.2, 1.0), std::invalid_argument);
}

TEST_CASE("dephased envelope against a Monte-Carlo average")
{
    const double base = two_pi * 202.0e3;
    const double spread = two_pi * 7.0e3;
    CHECK(motion::dephased_envelope(base, 0.0, 1.23e-5)
          == doctest::Approx(0.5 * (1.0 + std::cos(base * 1.23e-5))));

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> uni(-spread, spread);
    const int samples = 10000;
    std::vector<double> omegas(samples);
    for (auto& w : omegas)
        w = base + uni(rng);
    for (double t : {5e-6, 2e-5, 7.1e-5, 1.4e-4}) {
        double mc = 0.0;
        for (double w : omegas)
            mc += 0.5 * (1.0 + std::cos(w * t));
        mc /= samples;
        CHECK(std::abs(mc - motion::dephased_envelope(base, spread, t)) < 5e-3);
    }

    // envelope node near pi/spread = 71 us
    const double node = pi / spread;
    CHECK(node == doctest::Approx(71.4e-6).epsilon(0.01));
}

TEST_CASE("shelving frequencies and the field inversion")
{
    motion::ZeemanConfig cfg;
    cfg.field = 0.0;
    for (int i = 1; i <= 4; ++i)
        CHECK(motion::shelving_frequency(cfg, i) == doctest::Approx(cfg.hyperfine_splitting));

    const auto sol = motion::solve_field(two_pi * 1781.02e6, two_pi * 1786.24e6);
    CHECK(sol.field == doctest::Approx(5.589e-4).epsilon(0.004)); // 5.589 G
    CHECK(sol.hyperfine_splitting == doctest::Approx(two_pi * 1788.850e6).epsilon(1e-9));

    // round trip
    motion::ZeemanConfig found;
    found.field = sol.field;
    found.hyperfine_splitting = sol.hyperfine_splitting;
    CHECK(motion::shelving_frequency(found, 1) == doctest::Approx(two_pi * 1781.02e6));
    CHECK(motion::shelving_frequency(found, 2) == doctest::Approx(two_pi * 1786.24e6));

    // qubit-manifold splitting at 5.6 G is about m_F 2pi 2.6 MHz per unit g_F m_F
    const double zeeman = bohr_magneton * 5.6e-4 / hbar;
    CHECK(zeeman / 3.0 == doctest::Approx(two_pi * 2.6e6).epsilon(0.01));

    CHECK_THROWS_AS(motion::solve_field(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(motion::shelving_frequency(cfg, 0), std::invalid_argument);
}

TEST_CASE("distribution helpers")
{
    auto d = motion::MotionalDistribution::fock(2, 4);
    d.validate();
    CHECK(d.mean_n() == 2.0);
    d.probs(2) = 0.9;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    CHECK(motion::default_n_max(10.0) == 100);
    CHECK(motion::default_n_max(0.5) == 50);
}

TEST_CASE("ac Stark shift helper")
{
    const double legs = two_pi * 90.0e6;
    const double det = two_pi * 80.0e9;
    CHECK(motion::ac_stark_shift(legs, det)
          == doctest::Approx(hbar * legs * legs / det));
}

TEST_CASE("intensity scaling of the Raman Rabi frequency")
{
    const double measured = two_pi * 202.0e3;
    // doubling both intensities doubles the frequency, doubling the
    // detuning halves it
    CHECK(motion::scale_raman_rabi(measured, 2.0, 2.0, 1.0, 1.0) == doctest::Approx(2.0 * measured));
    CHECK(motion::scale_raman_rabi(measured, 1.0, 1.0, 1.0, 1.0, 2.0)
          == doctest::Approx(0.5 * measured));
    CHECK(motion::scale_raman_rabi(measured, 4.0, 1.0, 1.0, 1.0) == doctest::Approx(2.0 * measured));
    CHECK_THROWS_AS(motion::scale_raman_rabi(measured, 1.0, 1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("rabi spread washes the scan fringes without moving the dip")
{
    motion::RamanConfig cfg;
    cfg.geometry = motion::Geometry::copropagating;
    const double tau = 40.0 * pi / cfg.base_rabi; // long pulse: narrow fringed dip
    const auto dist = motion::MotionalDistribution::fock(0, 2);
    const double carrier = two_pi * 1788.85e6;
    const int n = 2001;
    Eigen::VectorXd grid(n);
    for (int i = 0; i < n; ++i)
        grid(i) = carrier + two_pi * (-0.1e6 + 0.2e6 * i / (n - 1));
    const auto sharp = motion::frequency_scan(dist, cfg, tau, grid, two_pi * 2.0e6, carrier);
    const auto fuzzy = motion::frequency_scan(dist, cfg, tau, grid, two_pi * 2.0e6, carrier,
                                              0.1 * cfg.base_rabi);

    // the long-pulse sidelobes average out under the spread
    auto wiggle = [&](const Eigen::VectorXd& scan) {
        double acc = 0.0;
        for (int i = 1; i < n; ++i)
            acc += std::abs(scan(i) - scan(i - 1));
        return acc;
    };
    CHECK(wiggle(fuzzy) < 0.6 * wiggle(sharp));

    // both dips stay centred on the carrier
    int i_sharp = 0, i_fuzzy = 0;
    for (int i = 0; i < n; ++i) {
        if (sharp(i) < sharp(i_sharp))
            i_sharp = i;
        if (fuzzy(i) < fuzzy(i_fuzzy))
            i_fuzzy = i;
    }
    CHECK(std::abs(grid(i_fuzzy) - carrier) <= std::abs(grid(i_sharp) - carrier) + two_pi * 2e3);
    CHECK_THROWS_AS(motion::frequency_scan(dist, cfg, tau, grid, two_pi * 2.0e6, carrier, -1.0),
                    std::invalid_argument);
}
