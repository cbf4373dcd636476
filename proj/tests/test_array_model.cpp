// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lscm/array_model.hpp"
#include "lscm/rng.hpp"

using namespace lscm;

namespace
{

ArrayConfig half_wave_array(int nx, int ny)
{
    ArrayConfig cfg;
    cfg.n_x = nx;
    cfg.n_y = ny;
    cfg.wavelength = 0.1;
    cfg.d_x = cfg.wavelength / 2.0;
    cfg.d_y = cfg.wavelength / 2.0;
    return cfg;
}

BeamCodebook zero_codebook(const ArrayConfig &cfg, int beams = 1)
{
    BeamCodebook cb;
    for (int m = 0; m < beams; ++m)
        cb.phase.push_back(Eigen::MatrixXd::Zero(cfg.n_x, cfg.n_y));
    return cb;
}

} // namespace

TEST_CASE("steering_phase at boresight with zero precoder is zero")
{
    ArrayConfig cfg = half_wave_array(4, 2);
    AngularGrid grid{{-2.0, 0.0, 2.0}, {-5.0, 0.0, 5.0}};
    BeamCodebook cb = zero_codebook(cfg);
    for (int x = 0; x < cfg.n_x; ++x)
        for (int y = 0; y < cfg.n_y; ++y)
            CHECK(steering_phase(cfg, grid, cb, 0, 1, 1, x, y) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("steering_phase at origin element equals minus precoder phase")
{
    ArrayConfig cfg = half_wave_array(2, 2);
    AngularGrid grid{{10.0}, {20.0}};
    BeamCodebook cb = zero_codebook(cfg);
    cb.phase[0](0, 0) = 0.7;
    CHECK(steering_phase(cfg, grid, cb, 0, 0, 0, 0, 0) == doctest::Approx(-0.7));
}

TEST_CASE("steering_phase analytic value at 30 degrees azimuth")
{
    ArrayConfig cfg = half_wave_array(2, 1);
    AngularGrid grid{{0.0}, {30.0}};
    BeamCodebook cb = zero_codebook(cfg);
    // 2*pi*(d_x/lambda)*x*cos(0)*sin(30deg) = pi * 0.5
    CHECK(steering_phase(cfg, grid, cb, 0, 0, 0, 1, 0) == doctest::Approx(pi / 2).epsilon(1e-12));
}

TEST_CASE("degrees to radians applied exactly once")
{
    CHECK(std::sin(deg2rad(30.0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("steering_phase is linear in antenna indices")
{
    ArrayConfig cfg = half_wave_array(4, 3);
    AngularGrid grid{{-8.0, 4.0}, {12.0, 33.0}};
    BeamCodebook cb = zero_codebook(cfg);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
        {
            double p00 = steering_phase(cfg, grid, cb, 0, i, j, 0, 0);
            double p10 = steering_phase(cfg, grid, cb, 0, i, j, 1, 0);
            double p01 = steering_phase(cfg, grid, cb, 0, i, j, 0, 1);
            for (int x = 0; x < cfg.n_x; ++x)
                for (int y = 0; y < cfg.n_y; ++y)
                    CHECK(steering_phase(cfg, grid, cb, 0, i, j, x, y) ==
                          doctest::Approx(p00 + x * (p10 - p00) + y * (p01 - p00)).epsilon(1e-10));
        }
}

TEST_CASE("steering_phase rejects out-of-range indices")
{
    ArrayConfig cfg = half_wave_array(2, 2);
    AngularGrid grid{{0.0}, {0.0}};
    BeamCodebook cb = zero_codebook(cfg);
    CHECK_THROWS_AS(steering_phase(cfg, grid, cb, 1, 0, 0, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(steering_phase(cfg, grid, cb, 0, 1, 0, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(steering_phase(cfg, grid, cb, 0, 0, 0, 2, 0), std::out_of_range);
    CHECK_THROWS_AS(steering_phase(cfg, grid, cb, 0, 0, 0, 0, -1), std::out_of_range);
}

TEST_CASE("make_dft_codebook boresight beam has all-zero phases")
{
    ArrayConfig cfg = half_wave_array(4, 4);
    BeamCodebook cb = make_dft_codebook(cfg, {{0.0, 0.0}});
    CHECK(cb.phase[0].cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("make_dft_codebook analytic phase for 30 degree steer")
{
    ArrayConfig cfg = half_wave_array(2, 1);
    BeamCodebook cb = make_dft_codebook(cfg, {{0.0, 30.0}});
    CHECK(cb.phase[0](1, 0) == doctest::Approx(pi / 2).epsilon(1e-12));
}

TEST_CASE("make_dft_codebook rejects empty direction list")
{
    ArrayConfig cfg = half_wave_array(2, 2);
    CHECK_THROWS_AS(make_dft_codebook(cfg, {}), std::invalid_argument);
}

TEST_CASE("dft codebook main lobe peaks at the steer direction")
{
    // exhaustive grid scan of |sum e^{j psi}| must peak at (or adjacent to)
    // the steer direction for each of five azimuth-fanned example beams
    ArrayConfig cfg = half_wave_array(8, 4);
    AngularGrid grid = AngularGrid::regular(-30, 30, 2, -60, 60, 5);
    std::vector<std::pair<double, double>> dirs = {
        {0, -15}, {0, 0}, {0, 15}, {0, 30}, {0, 45}};
    BeamCodebook cb = make_dft_codebook(cfg, dirs);
    for (int m = 0; m < cb.size(); ++m)
    {
        double best = -1.0;
        int best_i = -1, best_j = -1;
        for (int i = 0; i < grid.n_tilt(); ++i)
            for (int j = 0; j < grid.n_azimuth(); ++j)
            {
                double sc = 0, ss = 0;
                for (int x = 0; x < cfg.n_x; ++x)
                    for (int y = 0; y < cfg.n_y; ++y)
                    {
                        double psi = steering_phase(cfg, grid, cb, m, i, j, x, y);
                        sc += std::cos(psi);
                        ss += std::sin(psi);
                    }
                double mag = std::hypot(sc, ss);
                if (mag > best)
                {
                    best = mag;
                    best_i = i;
                    best_j = j;
                }
            }
        CHECK(std::abs(grid.tilt_deg[best_i] - dirs[m].first) <= 2.0);
        CHECK(std::abs(grid.azimuth_deg[best_j] - dirs[m].second) <= 5.0);
    }
}

TEST_CASE("element_gain lookup and range checks")
{
    AngularGrid grid = AngularGrid::regular(-4, 4, 2, -10, 10, 5);
    GainPattern uniform = make_uniform_gain(grid);
    CHECK(element_gain(uniform, 2, 3) == 1.0);
    CHECK_THROWS_AS(element_gain(uniform, 5, 0), std::out_of_range);

    GainPattern p = uniform;
    p.gains(3, 4) = 2.5;
    CHECK(element_gain(p, 3, 4) == 2.5);
}

TEST_CASE("parabolic gain pattern peaks at boresight")
{
    AngularGrid grid = AngularGrid::regular(-30, 30, 2, -60, 60, 5);
    ParabolicGainModel model;
    GainPattern p = make_gain_pattern(model, grid);
    int i0 = grid.flat_index(15, 12) / grid.n_azimuth(); // (0, 0) cell
    CHECK(grid.tilt_deg[15] == 0.0);
    CHECK(grid.azimuth_deg[12] == 0.0);
    double peak = std::pow(10.0, model.peak_db / 20.0);
    CHECK(p.gains(15, 12) == doctest::Approx(peak).epsilon(1e-12));
    CHECK(p.gains.maxCoeff() == doctest::Approx(peak).epsilon(1e-12));
    CHECK(p.gains.minCoeff() >= std::pow(10.0, model.floor_db / 20.0) - 1e-15);
    (void)i0;
}

TEST_CASE("gain table CSV round trip and coverage check")
{
    AngularGrid grid = AngularGrid::regular(-2, 2, 2, -5, 5, 5);
    ParabolicGainModel model;
    GainPattern p = make_gain_pattern(model, grid);
    auto path = std::filesystem::temp_directory_path() / "lscm_gain_test.csv";
    save_gain_table_csv(path.string(), p, grid);
    GainPattern back = load_gain_table_csv(path.string(), grid);
    CHECK((back.gains - p.gains).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    AngularGrid bigger = AngularGrid::regular(-4, 4, 2, -5, 5, 5);
    CHECK_THROWS(load_gain_table_csv(path.string(), bigger));
    std::filesystem::remove(path);
}

TEST_CASE("codebook CSV round trip")
{
    ArrayConfig cfg = half_wave_array(3, 2);
    BeamCodebook cb = make_dft_codebook(cfg, {{0, -15}, {4, 20}});
    auto path = std::filesystem::temp_directory_path() / "lscm_cb_test.csv";
    save_codebook_csv(path.string(), cb);
    BeamCodebook back = load_codebook_csv(path.string(), cfg);
    REQUIRE(back.size() == cb.size());
    for (int m = 0; m < cb.size(); ++m)
        CHECK((back.phase[m] - cb.phase[m]).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    std::filesystem::remove(path);
}

TEST_CASE("angular grid flattening is azimuth-fastest")
{
    AngularGrid grid = AngularGrid::regular(-2, 2, 2, -5, 5, 5);
    REQUIRE(grid.n_tilt() == 3);
    REQUIRE(grid.n_azimuth() == 3);
    CHECK(grid.flat_index(0, 0) == 0);
    CHECK(grid.flat_index(0, 2) == 2);
    CHECK(grid.flat_index(1, 0) == 3);
    auto [i, j] = grid.cell(5);
    CHECK(i == 1);
    CHECK(j == 2);
}

TEST_CASE("angular grid rejects non-increasing angles")
{
    AngularGrid g{{0.0, 0.0}, {1.0}};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
