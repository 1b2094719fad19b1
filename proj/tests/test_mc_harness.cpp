#include "doctest.h"
#include "oracles.hpp"

#include "irswet/mc_harness.hpp"

using namespace irswet;

namespace {

LinkScenario aligned_scenario(Eigen::Index side, double kappa)
{
    ArrayGeometry g;
    g.Nx = g.Ny = side;
    const AngleSet ang;
    const IncidentField inc = mrt_incidence(g, ang, 1.0);
    LinkScenario sc;
    sc.Pe = inc.Pe;
    sc.mus = inc.mus;
    sc.er_los = los_phases(g, 0.0);
    sc.thetas = align_phases(sc.er_los, sc.mus);
    sc.betas = RVec::Ones(g.N());
    sc.kappa = kappa;
    return sc;
}

} // namespace

TEST_SUITE("mc-harness")
{
    TEST_CASE("path loss")
    {
        const LinkBudget b;
        for (double n : {2.0, 2.2, 2.7, 4.0}) CHECK(path_loss_linear(1.0, n, b) == doctest::Approx(std::pow(10.0, -3.16)));
        CHECK(path_loss_linear(20.0, 2.2, b) == doctest::Approx(std::pow(10.0, -(31.6 + 22 * std::log10(20.0)) / 10)));
        CHECK(path_loss_linear(0.3, 2.7, b) == path_loss_linear(1.0, 2.7, b));
        CHECK(path_loss_linear(3.0, 2.7, b) < path_loss_linear(2.0, 2.7, b));
        CHECK_THROWS_AS(path_loss_linear(0.0, 2.2, b), std::invalid_argument);
        LinkBudget bad;
        bad.exp_irs_er = 1.5;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        LinkBudget blocked;
        blocked.blocked = true;
        CHECK(link_gain(2.0, blocked) == 0.0);
    }

    TEST_CASE("harvester")
    {
        const EhModel m;
        CHECK(harvest(dbm_to_watts(-30), m) == 0.0);
        CHECK(harvest(dbm_to_watts(-20), m) == doctest::Approx(4.5e-6));
        CHECK(harvest(dbm_to_watts(-5), m) == doctest::Approx(0.45 * std::pow(10.0, -0.8) * 1e-3));
        CHECK(harvest(0.0, m) == 0.0);
        CHECK_THROWS_AS(harvest(-1e-9, m), std::invalid_argument);
        double prev = 0;
        for (double dbm = -40; dbm <= 10; dbm += 0.5) {
            const double h = harvest(dbm_to_watts(dbm), m);
            CHECK(h >= prev);
            CHECK(h <= dbm_to_watts(dbm));
            prev = h;
        }
        EhModel bad;
        bad.conversion = 1.2;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = EhModel{};
        bad.sensitivity_dbm = -5;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }

    TEST_CASE("pilot overhead")
    {
        const OverheadModel o;
        CHECK(o.transfer_fraction(195) == 0.0);
        CHECK(o.transfer_fraction(400) == 0.0);
        CHECK(o.transfer_fraction(100) == doctest::Approx(95.0 / 196));
        CHECK(o.pilot(100) == 101);
    }

    TEST_CASE("Monte Carlo moments match the closed forms")
    {
        const LinkScenario sc = aligned_scenario(10, 2.0);
        const double R = 100, E = 10000;
        const oracle::Moments ref = oracle::scaled_ncx2(sc.Pe * R / (2 * 3), 2 * 2 * E / R);
        const EnergyStats st = simulate_energy(sc, 200000, 11, 4);
        CHECK(std::abs(st.mean / ref.mean - 1) < 0.01);
        CHECK(std::abs(st.variance / ref.variance - 1) < 0.03);
        CHECK(expected_energy(sc.Pe, 2, R, E) == doctest::Approx(ref.mean));
        CHECK(energy_variance(sc.Pe, 2, R, E) == doctest::Approx(ref.variance));
        for (std::size_t i = 1; i < st.quantiles.size(); ++i) CHECK(st.quantiles[i] >= st.quantiles[i - 1]);
        CHECK(st.variance >= 0);
    }

    TEST_CASE("nearly pure line of sight")
    {
        const EnergyStats st = simulate_energy(aligned_scenario(6, 1e9), 2000, 3);
        CHECK(st.variance / (st.mean * st.mean) < 1e-6);
    }

    TEST_CASE("thread count and sample export")
    {
        const LinkScenario sc = aligned_scenario(4, 2.0);
        std::vector<double> a, b;
        const EnergyStats s1 = simulate_energy(sc, 5000, 9, 1, &a);
        const EnergyStats s2 = simulate_energy(sc, 5000, 9, 7, &b);
        CHECK(a == b);
        CHECK(s1.mean == s2.mean);
        CHECK(s1.variance == s2.variance);
        std::vector<double> c;
        simulate_energy(sc, 100, 9, 1, &c);
        CHECK(std::equal(c.begin(), c.end(), a.begin()));
        CHECK_THROWS_AS(simulate_energy(sc, 0, 9), std::invalid_argument);
    }

    TEST_CASE("physical mode applies link budget then harvester")
    {
        LinkScenario sc = aligned_scenario(4, 2.0);
        std::vector<double> raw, phys;
        simulate_energy(sc, 500, 5, 1, &raw);
        sc.physical = true;
        sc.distance_m = 2.5;
        simulate_energy(sc, 500, 5, 1, &phys);
        const double g = link_gain(2.5, sc.budget);
        for (std::size_t i = 0; i < raw.size(); ++i) CHECK(phys[i] == harvest(g * raw[i], sc.eh));
    }

    TEST_CASE("summarize")
    {
        const EnergyStats s = summarize({1, 2, 3, 4, 5}, 0, {0.0, 0.5, 1.0, 0.25});
        CHECK(s.mean == 3);
        CHECK(s.variance == 2.5);
        CHECK(s.quantiles[0] == 1);
        CHECK(s.quantiles[1] == 3);
        CHECK(s.quantiles[2] == 5);
        CHECK(s.quantiles[3] == 2);
        CHECK(summarize({}, 0).trials == 0);
    }

    TEST_CASE("place_ers")
    {
        const auto p = place_ers(4000, 4.0, 3);
        std::size_t inner = 0;
        for (auto [a, r] : p) {
            CHECK(std::abs(a) <= pi / 2);
            CHECK(r >= 0);
            CHECK(r <= 4.0);
            inner += r < 2.0;
        }
        // uniform in area: a quarter inside half the radius
        CHECK(std::abs(static_cast<double>(inner) / 4000 - 0.25) < 0.03);
        const auto q = place_ers(10, 4.0, 3);
        CHECK(std::equal(q.begin(), q.end(), p.begin()));
    }

    TEST_CASE("heat map")
    {
        HeatmapSetup s;
        s.geometry.Nx = s.geometry.Ny = 6;
        s.practical = false;
        HeatmapSpec spec;
        spec.angles = 61;
        spec.radii = {1.0, 2.0};
        spec.harvested = false;

        SUBCASE("blocked links give an all-zero map")
        {
            s.budget.blocked = true;
            spec.harvested = true;
            spec.trials = 50;
            CHECK(heatmap_experiment(s, spec).map.grid.isZero(0));
        }
        SUBCASE("single direction peaks on its axis")
        {
            const double dir = 20 * pi / 180;
            spec.directions = std::vector<double>{dir};
            const Heatmap hm = heatmap_experiment(s, spec);
            Eigen::Index row = 0;
            hm.map.grid.col(0).maxCoeff(&row);
            CHECK(std::abs(hm.angles[static_cast<std::size_t>(row)] - dir) <= pi / 60 + 1e-12);
        }
        SUBCASE("rotation keeps every angle within the coverage bound")
        {
            s.geometry.Nx = s.geometry.Ny = 10;
            spec.angles = 181;
            const Heatmap hm = heatmap_experiment(s, spec);
            const double V = static_cast<double>(hm.directions.size());
            CHECK(V == 11);
            const Eigen::VectorXd prof = hm.map.grid.col(0);
            CHECK(prof.minCoeff() >= (1 / V) * (0.5 - default_beam_slack) * prof.maxCoeff());
        }
        SUBCASE("harvested map agrees with thread count")
        {
            spec.harvested = true;
            spec.trials = 200;
            spec.angles = 9;
            const Heatmap a = heatmap_experiment(s, spec);
            s.threads = 3;
            CHECK(heatmap_experiment(s, spec).map.grid == a.map.grid);
        }
    }

    TEST_CASE("worst-ER comparison bookkeeping")
    {
        WorstCaseSetup s;
        s.geometry.Nx = s.geometry.Ny = 4;
        s.K = 4;
        s.trials = 3;
        s.baseline.restarts = 2;
        s.om.restarts = 2;
        const WorstCaseResult r = worst_case_compare(s);
        CHECK(r.transfer_fraction == doctest::Approx(179.0 / 196));
        CHECK(r.directions == plan_rotation(4).size());
        CHECK(r.csi_free == r.per_er_free.minCoeff());
        CHECK(r.csi_based == r.per_er_based.minCoeff());
        CHECK(r.positions.size() == 4);
        s.threads = 3;
        const WorstCaseResult r2 = worst_case_compare(s);
        CHECK(r2.per_er_free == r.per_er_free);
        CHECK(r2.per_er_based == r.per_er_based);

        s.geometry.Nx = 13;
        s.geometry.Ny = 15;
        s.trials = 1;
        s.K = 2;
        const WorstCaseResult full = worst_case_compare(s);
        CHECK(full.transfer_fraction == 0.0);
        CHECK(full.csi_based == 0.0);
        CHECK(full.gap_db() == std::numeric_limits<double>::infinity());
    }
}
