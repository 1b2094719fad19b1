#include "doctest.h"
#include "oracles.hpp"

#include "irswet/geometry.hpp"
#include "irswet/mc_harness.hpp"
#include "irswet/phase_optimizer.hpp"

#include <array>

using namespace irswet;

namespace {

RVec random_phases(Eigen::Index n, std::uint64_t seed, std::uint64_t index)
{
    Stream s(seed, Domain::generic, index);
    RVec x(n);
    for (auto& v : x) v = s.uniform(-pi, pi);
    return x;
}

std::vector<double> offsets(const RVec& los, const RVec& mus)
{
    std::vector<double> c(los.size());
    for (Eigen::Index i = 0; i < los.size(); ++i) c[i] = los[i] + mus[i];
    return c;
}

AOConfig fast(int restarts = 2)
{
    AOConfig c;
    c.restarts = restarts;
    return c;
}

} // namespace

TEST_SUITE("phase-optimizer")
{
    TEST_CASE("e_eq examples")
    {
        for (Eigen::Index n : {1, 7, 100}) {
            const RVec los = random_phases(n, 1, 0), mus = random_phases(n, 1, 1);
            const EqEnergy e = e_eq(align_phases(los, mus), RVec::Ones(n), los, mus);
            CHECK(e.e_eq == doctest::Approx(double(n * n)).epsilon(1e-12));
            CHECK(e.r_sigma == doctest::Approx(double(n)));
        }
        const RVec b1 = (RVec(1) << 0.37).finished();
        CHECK(e_eq(RVec::Constant(1, 2.0), b1, RVec::Constant(1, -1.0), RVec::Constant(1, 0.4)).e_eq ==
              doctest::Approx(0.37 * 0.37).epsilon(1e-14));
        CHECK_THROWS_AS(e_eq(RVec::Zero(3), RVec::Ones(2), RVec::Zero(3), RVec::Zero(3)), std::invalid_argument);
        CHECK_THROWS_AS(e_eq(RVec::Zero(3), RVec::Ones(3), RVec::Zero(3), RVec::Zero(4)), std::invalid_argument);
    }

    TEST_CASE("e_eq components and pairwise expansion")
    {
        for (std::uint64_t i = 0; i < 20; ++i) {
            const Eigen::Index n = 1 + static_cast<Eigen::Index>(i * 3);
            const RVec th = random_phases(n, 2, 4 * i), los = random_phases(n, 2, 4 * i + 1),
                       mus = random_phases(n, 2, 4 * i + 2);
            const RVec b = amplitudes(random_phases(n, 2, 4 * i + 3), CouplingParams{});
            const EqEnergy e = e_eq(th, b, los, mus);
            CHECK(e.e_eq == doctest::Approx(e.u * e.u + e.v * e.v).epsilon(1e-13));
            CHECK(e.e_eq == doctest::Approx(e_eq_pairwise(th, b, los, mus)).epsilon(1e-10));
            CHECK(e.r_sigma <= b.sum() * b.sum() + 1e-12);
        }
    }

    TEST_CASE("random phases average E_eq = N")
    {
        constexpr int draws = 10000;
        const Eigen::Index n = 100;
        double s = 0, s2 = 0;
        for (int d = 0; d < draws; ++d) {
            const double e = e_eq(random_phases(n, 3, d), RVec::Ones(n), RVec::Zero(n), RVec::Zero(n)).e_eq;
            s += e;
            s2 += e * e;
        }
        const double mean = s / draws, var = (s2 - draws * mean * mean) / (draws - 1);
        CHECK(std::abs(mean - n) <= 3 * std::sqrt(var / draws));
    }

    TEST_CASE("dm_solve")
    {
        const CouplingParams p;
        const OptimResult r = dm_solve(p, 50);
        for (auto t : r.thetas) CHECK(t == doctest::Approx(wrap_phase(p.eta + pi / 2)));
        CHECK(r.betas == RVec::Ones(50));
        CHECK(r.energy.r_sigma == 50.0);
        CHECK(std::isnan(r.energy.e_eq));
        CHECK_THROWS_AS(dm_solve(p, 0), std::invalid_argument);

        // with random offsets its E_eq behaves like random phases
        constexpr int draws = 4000;
        const Eigen::Index n = 64;
        double s = 0, s2 = 0;
        for (int d = 0; d < draws; ++d) {
            const double e = dm_solve(p, random_phases(n, 4, 2 * d), random_phases(n, 4, 2 * d + 1)).energy.e_eq;
            s += e;
            s2 += e * e;
        }
        const double mean = s / draws, var = (s2 - draws * mean * mean) / (draws - 1);
        CHECK(std::abs(mean - n) <= 3 * std::sqrt(var / draws));
    }

    TEST_CASE("om_solve ideal limit and single element")
    {
        const CouplingParams ideal{1.0, 0.43 * pi, 1.6};
        const RVec los = random_phases(40, 5, 0), mus = random_phases(40, 5, 1);
        CHECK(om_solve(ideal, los, mus, fast()).energy.e_eq == doctest::Approx(1600.0).epsilon(1e-6));

        const CouplingParams p;
        const OptimResult one = om_solve(p, RVec::Constant(1, 0.9), RVec::Constant(1, -2.0), fast());
        CHECK(one.energy.e_eq == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(wrap_phase(one.thetas[0] - (p.eta + pi / 2)) == doctest::Approx(0.0).epsilon(1e-4));
    }

    TEST_CASE("om_solve default instance at N = 100 reaches the reference ratio")
    {
        const ArrayGeometry g;
        const IncidentField inc = mrt_incidence(g, AngleSet{}, 1.0);
        const RVec los = los_phases(g, 0.0);
        const OptimResult r = om_solve(CouplingParams{}, los, inc.mus);
        CHECK(r.energy.e_eq / 1e4 == doctest::Approx(0.3675).epsilon(0.05 / 0.3675));
        const oracle::PsiSweep psi(0.2, 0.43 * pi, 1.6);
        const double best = psi.optimum(offsets(los, inc.mus));
        CHECK(r.energy.e_eq >= 0.98 * best);
        CHECK(r.energy.e_eq <= best * (1 + 1e-6));
    }

    TEST_CASE("om_solve matches exhaustive 64-level search for N <= 4")
    {
        const CouplingParams p;
        for (Eigen::Index n = 1; n <= 4; ++n)
            for (std::uint64_t i = 0; i < 3; ++i) {
                const RVec los = random_phases(n, 6, 2 * i), mus = random_phases(n, 6, 2 * i + 1);
                const double ref = oracle::exhaustive_om(offsets(los, mus), 64, p.beta_min, p.eta, p.alpha);
                CHECK(om_solve(p, los, mus, fast()).energy.e_eq >= 0.98 * ref);
            }
    }

    TEST_CASE("om_solve against the continuous optimum for N = 5, 6")
    {
        for (double bmin : {0.2, 0.5}) {
            const CouplingParams p{bmin, 0.43 * pi, 1.6};
            const oracle::PsiSweep psi(p.beta_min, p.eta, p.alpha);
            for (Eigen::Index n : {5, 6})
                for (std::uint64_t i = 0; i < 3; ++i) {
                    const RVec los = random_phases(n, 7, 2 * i), mus = random_phases(n, 7, 2 * i + 1);
                    const double ref = psi.optimum(offsets(los, mus));
                    const double got = om_solve(p, los, mus, fast()).energy.e_eq;
                    CHECK(got >= 0.98 * ref);
                    CHECK(got <= ref * (1 + 1e-6));
                }
        }
    }

    TEST_CASE("om_solve trace is non-decreasing and restarts are deterministic")
    {
        const RVec los = random_phases(30, 8, 0), mus = random_phases(30, 8, 1);
        AOConfig c = fast(3);
        const OptimResult a = om_solve(CouplingParams{}, los, mus, c);
        REQUIRE(a.objective_trace.size() >= 2);
        for (std::size_t i = 1; i < a.objective_trace.size(); ++i)
            CHECK(a.objective_trace[i] >= a.objective_trace[i - 1]);
        CHECK(a.objective_trace.back() == doctest::Approx(a.energy.e_eq).epsilon(1e-9));
        c.threads = 3;
        const OptimResult b = om_solve(CouplingParams{}, los, mus, c);
        CHECK(a.thetas == b.thetas);
        CHECK(a.energy.e_eq == b.energy.e_eq);
    }

    TEST_CASE("common incident phase leaves the optimum unchanged")
    {
        const RVec los = random_phases(12, 9, 0), mus = random_phases(12, 9, 1);
        const double e0 = om_solve(CouplingParams{}, los, mus, fast()).energy.e_eq;
        for (double shift : {0.3, -2.0, 3.1}) {
            const RVec m2 = (mus.array() + shift).matrix();
            CHECK(std::abs(om_solve(CouplingParams{}, los, m2, fast()).energy.e_eq - e0) <= 1e-9 * e0);
        }
    }

    TEST_CASE("AOConfig validation")
    {
        AOConfig c;
        c.grid_points = 4;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c = AOConfig{};
        c.sweep_tol = 0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        c = AOConfig{};
        c.restarts = 0;
        c.warm_start = false;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
        CHECK_THROWS_AS(om_solve(CouplingParams{}, RVec::Zero(3), RVec::Zero(2)), std::invalid_argument);
    }

    TEST_CASE("kappa_boundary")
    {
        CHECK(kappa_boundary(100, 100, 1e4) == 0.0);
        CHECK(kappa_boundary(100, 80, 3675) == doctest::Approx(20.0 / 3575).epsilon(1e-12));
        CHECK(kappa_boundary(100, 70, 0.3675 * 1e4) == doctest::Approx(30 / (0.3675 * 1e4 - 100)));
        CHECK(std::isinf(kappa_boundary(100, 80, 100)));
        CHECK(std::isinf(kappa_boundary(100, 80, 50)));
    }

    TEST_CASE("select_scheme")
    {
        CHECK(select_scheme(0, 0.0) == Scheme::DM);
        CHECK(select_scheme(0, 3.0) == Scheme::DM);
        CHECK(select_scheme(2, 0.006) == Scheme::OM);
        CHECK(select_scheme(0.25, 0.25) == Scheme::DM);
        CHECK(select_scheme(5, std::numeric_limits<double>::infinity()) == Scheme::DM);
        CHECK_THROWS_AS(select_scheme(-1, 0.1), std::invalid_argument);
        CHECK(std::string(to_string(Scheme::DM)) == "DM");
    }

    TEST_CASE("selection agrees with the energy comparison on each instance")
    {
        const CouplingParams p;
        for (std::uint64_t i = 0; i < 6; ++i) {
            const Eigen::Index n = 10 + 5 * static_cast<Eigen::Index>(i);
            const RVec los = random_phases(n, 10, 2 * i), mus = random_phases(n, 10, 2 * i + 1);
            const OptimResult om = om_solve(p, los, mus, fast(1));
            const OptimResult dm = dm_solve(p, los, mus);
            const double kb = kappa_boundary(n, om.energy.r_sigma, om.energy.e_eq, dm.energy.e_eq);
            for (double kappa : {0.0, 0.001, 0.01, 0.1, 0.5, 2.0, 10.0}) {
                const double m_dm = expected_energy(4, kappa, dm.energy.r_sigma, dm.energy.e_eq);
                const double m_om = expected_energy(4, kappa, om.energy.r_sigma, om.energy.e_eq);
                if (select_scheme(kappa, kb) == Scheme::DM) CHECK(m_dm >= m_om * (1 - 1e-12));
                else CHECK(m_om >= m_dm * (1 - 1e-12));
            }
        }
    }

    TEST_CASE("closed-form mean and variance")
    {
        CHECK(expected_energy(4, 2, 100, 3675) == doctest::Approx(9933.333333333).epsilon(1e-9));
        CHECK(energy_variance(4, 2, 100, 3675) == doctest::Approx(4444.444444444 * 592).epsilon(1e-9));
        CHECK(expected_energy(3, 0, 57, 999) == doctest::Approx(3 * 57.0));
        CHECK(energy_variance(3, 0, 57, 999) == doctest::Approx(std::pow(3 * 57 / 2.0, 2) * 4));
        CHECK(expected_energy(4, std::numeric_limits<double>::infinity(), 100, 1e4) == doctest::Approx(4e4));
        CHECK(expected_energy(4, 1e12, 100, 1e4) == doctest::Approx(4e4).epsilon(1e-9));
        CHECK(energy_variance(2, 1.5, 40, 300) == doctest::Approx(4 * energy_variance(1, 1.5, 40, 300)));
        for (double kappa : {0.0, 0.7, 2.0, 9.0}) {
            const double s = 4 * 80 / (2 * (kappa + 1));
            const oracle::Moments m = oracle::scaled_ncx2(s, 2 * kappa * 2500 / 80);
            CHECK(expected_energy(4, kappa, 80, 2500) == doctest::Approx(m.mean).epsilon(1e-12));
            CHECK(energy_variance(4, kappa, 80, 2500) == doctest::Approx(m.variance).epsilon(1e-12));
        }
    }

    TEST_CASE("fit_tau")
    {
        std::vector<std::pair<double, double>> pts;
        for (double n : {64.0, 100.0, 144.0, 196.0}) pts.emplace_back(n, 0.5 * n * n);
        CHECK(fit_tau(pts) == doctest::Approx(0.5).epsilon(1e-14));
        const std::array<std::pair<double, double>, 2> two{{{10, 60}, {20, 400}}};
        CHECK(fit_tau(two) == doctest::Approx((60 * 100 + 400 * 400.0) / (1e4 + 16e4)));
        CHECK_THROWS_AS(fit_tau(std::span<const std::pair<double, double>>{}), std::invalid_argument);
    }
}
