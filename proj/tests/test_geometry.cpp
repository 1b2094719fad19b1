#include "doctest.h"
#include "oracles.hpp"

#include "irswet/geometry.hpp"
#include "irswet/indexing.hpp"

#include <Eigen/SVD>

using namespace irswet;

TEST_SUITE("geometry")
{
    TEST_CASE("steering_ula examples")
    {
        const CVec a = steering_ula(0.0, 4);
        for (auto x : a) CHECK(x == cplx(0.5, 0));
        const CVec one = steering_ula(1.234, 1);
        CHECK(one.size() == 1);
        CHECK(one[0] == cplx(1, 0));
        CHECK(std::abs(steering_ula(pi / 3, 8).norm() - 1) < 1e-12);
        CHECK_THROWS_AS(steering_ula(0.1, 0), std::invalid_argument);
    }

    TEST_CASE("steering_ula entry formula")
    {
        const double z = 0.7;
        const CVec a = steering_ula(z, 5);
        for (int m = 0; m < 5; ++m) CHECK(std::abs(a[m] - std::polar(1 / std::sqrt(5.0), m * z)) < 1e-15);
    }

    TEST_CASE("steering_upa examples")
    {
        for (auto x : steering_upa(0.0, 0.0, 3, 3)) CHECK(std::abs(x - cplx(1.0 / 3, 0)) < 1e-15);
        const CVec a = steering_upa(pi / 2, 0.0, 2, 2);
        const double expect[] = {0, 0, pi / 2, pi / 2};
        for (int k = 0; k < 4; ++k) {
            CHECK(std::abs(std::abs(a[k]) - 0.5) < 1e-15);
            CHECK(std::abs(std::arg(a[k]) - expect[k]) < 1e-12);
        }
        CHECK(std::abs(steering_upa(0.3, -1.1, 7, 4).norm() - 1) < 1e-12);
        CHECK_THROWS_AS(steering_upa(0.0, 0.0, 0, 3), std::invalid_argument);
        CHECK_THROWS_AS(steering_upa(0.0, 0.0, 3, 0), std::invalid_argument);
    }

    TEST_CASE("steering_upa equals explicit Kronecker product for all grids up to 5x5")
    {
        const double u = 0.83, v = -2.1;
        for (int nx = 1; nx <= 5; ++nx)
            for (int ny = 1; ny <= 5; ++ny) {
                Eigen::VectorXcd ax(nx), ay(ny);
                for (int i = 0; i < nx; ++i) ax[i] = std::polar(1 / std::sqrt(double(nx)), i * u);
                for (int i = 0; i < ny; ++i) ay[i] = std::polar(1 / std::sqrt(double(ny)), i * v);
                const Eigen::VectorXcd ref = oracle::kron(ax, ay);
                CHECK((steering_upa(u, v, nx, ny) - ref).norm() < 1e-13);
            }
    }

    TEST_CASE("element_index convention")
    {
        // mod(j, Ny) = 0 maps to the last column
        CHECK(element_index(10, 10, 10).y == 9);
        CHECK(element_index(10, 10, 10).x == 0);
        CHECK(element_index(11, 10, 10).x == 1);
        CHECK(element_index(11, 10, 10).y == 0);
        CHECK(element_index(1, 3, 4).x == 0);
        CHECK(element_index(12, 3, 4).x == 2);
        CHECK(element_index(12, 3, 4).y == 3);
        CHECK_THROWS_AS(element_index(0, 3, 3), std::out_of_range);
        CHECK_THROWS_AS(element_index(10, 3, 3), std::out_of_range);
        CHECK_THROWS_AS(element_index(1, 0, 3), std::invalid_argument);
    }

    TEST_CASE("build_G invariants")
    {
        ArrayGeometry g; // 4 x (10 x 10)
        for (double phi : {0.1, pi / 4, 2.0})
            for (double th : {-0.5, pi / 3}) {
                const AngleSet a{phi, th, 0.37};
                const CMat G = build_G(g, a).matrix();
                CHECK(G.rows() == 100);
                CHECK(G.cols() == 4);
                CHECK(std::abs(G.squaredNorm() / 400 - 1) < 1e-9);
                const double r0 = G.row(0).norm();
                for (Eigen::Index j = 1; j < G.rows(); ++j) CHECK(std::abs(G.row(j).norm() - r0) < 1e-12);
                Eigen::JacobiSVD<CMat> svd(G);
                CHECK(svd.singularValues()[1] < 1e-10 * svd.singularValues()[0]);
            }
    }

    TEST_CASE("equal incident amplitude for arbitrary precoders")
    {
        ArrayGeometry g;
        g.M = 6;
        g.Nx = 7;
        g.Ny = 5;
        const CMat G = build_G(g, AngleSet{0.9, -0.4, 1.1}).matrix();
        for (std::uint64_t i = 0; i < 50; ++i) {
            Stream s(42, Domain::generic, i);
            CVec w(6);
            for (auto& x : w) x = s.complex_normal();
            const RVec amp = (G * w).cwiseAbs();
            CHECK((amp.maxCoeff() - amp.minCoeff()) / amp.maxCoeff() < 1e-10);
        }
    }

    TEST_CASE("invalid geometry and angles")
    {
        ArrayGeometry g;
        g.M = 0;
        CHECK_THROWS_AS(build_G(g, AngleSet{}), std::invalid_argument);
        g = ArrayGeometry{};
        g.spacing_ratio = 0;
        CHECK_THROWS_AS(g.validate(), std::invalid_argument);
        AngleSet a;
        a.theta_G = std::nan("");
        CHECK_THROWS_AS(build_G(ArrayGeometry{}, a), std::invalid_argument);
    }

    TEST_CASE("derived angles follow the spacing ratio")
    {
        AngleSet a{0.3, 0.8, -0.2};
        CHECK(a.u(0.5) == doctest::Approx(pi * std::cos(0.3)).epsilon(1e-15));
        CHECK(a.v(0.5) == doctest::Approx(pi * std::sin(0.3) * std::sin(0.8)).epsilon(1e-15));
        CHECK(a.z(0.25) == doctest::Approx(0.5 * pi * std::sin(-0.2)).epsilon(1e-15));
        a.phi_G = 1.0; // no stale value
        CHECK(a.u(0.5) == doctest::Approx(pi * std::cos(1.0)).epsilon(1e-15));
    }

    TEST_CASE("los_phase examples")
    {
        for (int j = 1; j <= 30; ++j) CHECK(los_phase(j, 3, 10, 0.0) == 0.0);
        for (int j : {1, 11, 21}) CHECK(los_phase(j, 3, 10, 0.77) == 0.0);
        CHECK(los_phase(3, 10, 10, pi / 6) == doctest::Approx(-pi).epsilon(1e-14));
        CHECK_THROWS_AS(los_phase(0, 10, 10, 0.1), std::out_of_range);
        CHECK_THROWS_AS(los_phase(101, 10, 10, 0.1), std::out_of_range);
        // shares the column index with steering_upa
        ArrayGeometry g;
        g.Nx = 3;
        g.Ny = 4;
        const RVec phi = los_phases(g, 0.5);
        const CVec a = steering_upa(0.0, -2 * pi * 0.5 * std::sin(0.5), 3, 4);
        for (Eigen::Index k = 0; k < 12; ++k) CHECK(std::abs(std::polar(1.0, phi[k]) - a[k] / std::abs(a[k])) < 1e-12);
    }

    TEST_CASE("sample_h limits and errors")
    {
        const RVec phi = RVec::LinSpaced(20, -3, 3);
        const ChannelH h = sample_h(1e12, phi, Stream(1, Domain::channel, 0));
        for (Eigen::Index i = 0; i < 20; ++i) CHECK(std::abs(h.entries[i] - std::polar(1.0, phi[i])) < 1e-5);
        const ChannelH inf = sample_h(std::numeric_limits<double>::infinity(), phi, Stream(1, Domain::channel, 0));
        for (Eigen::Index i = 0; i < 20; ++i) CHECK(std::abs(inf.entries[i] - std::polar(1.0, phi[i])) < 1e-15);
        CHECK_THROWS_AS(sample_h(-1, phi, Stream(1, Domain::channel, 0)), std::invalid_argument);
        CHECK(h.kappa == 1e12);
        CHECK(h.los_phases == phi);
    }

    TEST_CASE("sample_h element draws are independent of vector length")
    {
        const Stream s(9, Domain::channel, 3);
        const ChannelH a = sample_h(2, RVec::Zero(5), s);
        const ChannelH b = sample_h(2, RVec::Zero(50), s);
        CHECK(a.entries == b.entries.head(5));
    }

    TEST_CASE("sample_h moments")
    {
        constexpr int draws = 1000000;
        const RVec phi = (RVec(2) << 0.0, 1.3).finished();
        {
            // kappa = 0: per-entry variance 1
            double acc = 0;
            cplx mean = 0;
            for (int t = 0; t < draws; ++t) {
                const cplx x = sample_h(0, phi.head(1), Stream(5, Domain::channel, t)).entries[0];
                mean += x;
                acc += std::norm(x);
            }
            mean /= draws;
            const double var = acc / draws - std::norm(mean);
            CHECK(std::abs(var - 1) < 0.01);
        }
        {
            // kappa = 2: mean sqrt(2/3) e^{i Phi}, within 3 standard errors
            cplx mean[2] = {0, 0};
            for (int t = 0; t < draws; ++t) {
                const ChannelH h = sample_h(2, phi, Stream(6, Domain::channel, t));
                mean[0] += h.entries[0];
                mean[1] += h.entries[1];
            }
            const double se = std::sqrt(1.0 / 3 / 2 / draws); // per real component
            for (int i = 0; i < 2; ++i) {
                const cplx want = std::polar(std::sqrt(2.0 / 3), phi[i]);
                const cplx got = mean[i] / double(draws);
                CHECK(std::abs(got.real() - want.real()) < 3 * se);
                CHECK(std::abs(got.imag() - want.imag()) < 3 * se);
            }
        }
    }
}
