// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "lscm/coeff_matrix.hpp"
#include "lscm/rng.hpp"

using namespace lscm;

namespace
{

ArrayConfig half_wave_array(int nx, int ny, double sigma = 0.0)
{
    ArrayConfig cfg;
    cfg.n_x = nx;
    cfg.n_y = ny;
    cfg.wavelength = 0.1;
    cfg.d_x = cfg.wavelength / 2.0;
    cfg.d_y = cfg.wavelength / 2.0;
    cfg.sigma = sigma;
    return cfg;
}

BeamCodebook zero_codebook(const ArrayConfig &cfg, int beams = 1)
{
    BeamCodebook cb;
    for (int m = 0; m < beams; ++m)
        cb.phase.push_back(Eigen::MatrixXd::Zero(cfg.n_x, cfg.n_y));
    return cb;
}

// literal double sum over antenna pairs; the independent oracle for the
// coherent-sum fast path
double literal_double_sum(const Eigen::MatrixXd &psi)
{
    double total = 0.0;
    for (int x = 0; x < psi.rows(); ++x)
        for (int y = 0; y < psi.cols(); ++y)
            for (int xp = 0; xp < psi.rows(); ++xp)
                for (int yp = 0; yp < psi.cols(); ++yp)
                    total += std::cos(psi(x, y) - psi(xp, yp));
    return total;
}

} // namespace

TEST_CASE("single-element coefficient is 1")
{
    ArrayConfig cfg = half_wave_array(1, 1);
    AngularGrid grid{{0.0}, {0.0}};
    GainPattern p = make_uniform_gain(grid);
    BeamCodebook cb = zero_codebook(cfg);
    CHECK(compute_coefficient(cfg, grid, p, cb, 0, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("boresight coherent coefficient equals (Nx*Ny)^2")
{
    ArrayConfig cfg = half_wave_array(2, 2);
    AngularGrid grid{{0.0}, {0.0}};
    GainPattern p = make_uniform_gain(grid);
    BeamCodebook cb = zero_codebook(cfg);
    CHECK(compute_coefficient(cfg, grid, p, cb, 0, 0, 0) == doctest::Approx(16.0).epsilon(1e-13));
}

TEST_CASE("large sigma limit tends to P*g^2*Nx*Ny")
{
    ArrayConfig cfg = half_wave_array(4, 2, std::sqrt(50.0));
    AngularGrid grid{{-7.0, 12.0}, {3.0, 27.0}};
    GainPattern p = make_uniform_gain(grid);
    BeamCodebook cb = make_dft_codebook(cfg, {{0, 10}});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(compute_coefficient(cfg, grid, p, cb, 0, i, j) ==
                  doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("coherent-sum identity matches the literal double sum")
{
    CounterRng rng(42);
    for (int trial = 0; trial < 100; ++trial)
    {
        int nx = 1 + static_cast<int>(rng.below(8));
        int ny = 1 + static_cast<int>(rng.below(8));
        Eigen::MatrixXd psi(nx, ny);
        for (int x = 0; x < nx; ++x)
            for (int y = 0; y < ny; ++y)
                psi(x, y) = rng.uniform(-pi, pi);
        double sc = psi.array().cos().sum();
        double ss = psi.array().sin().sum();
        double fast = sc * sc + ss * ss;
        double literal = literal_double_sum(psi);
        CHECK(fast == doctest::Approx(literal).epsilon(1e-9));
    }
}

TEST_CASE("coefficient invariant under common phase shift of one (i,j,m) triple")
{
    ArrayConfig cfg = half_wave_array(3, 2);
    AngularGrid grid{{5.0}, {15.0}};
    GainPattern p = make_uniform_gain(grid);
    BeamCodebook cb = make_dft_codebook(cfg, {{2, 10}});
    double before = compute_coefficient(cfg, grid, p, cb, 0, 0, 0);
    // shifting all precoder phases shifts every psi by the same constant
    cb.phase[0].array() += 1.234;
    double after = compute_coefficient(cfg, grid, p, cb, 0, 0, 0);
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("build_matrix: single trivial case gives [[1.0]]")
{
    ArrayConfig cfg = half_wave_array(1, 1);
    AngularGrid grid{{0.0}, {0.0}};
    GainPattern p = make_uniform_gain(grid);
    BeamCodebook cb = zero_codebook(cfg);
    CoefficientMatrix cm = build_matrix(cfg, grid, p, cb);
    REQUIRE(cm.rows() == 1);
    REQUIRE(cm.cols() == 1);
    CHECK(cm.a(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("build_matrix entries nonnegative and a_hat columns unit norm")
{
    ArrayConfig cfg = half_wave_array(8, 4, 0.2);
    AngularGrid grid = AngularGrid::regular(-10, 10, 2, -30, 30, 5);
    GainPattern p = make_gain_pattern(ParabolicGainModel{}, grid);
    BeamCodebook cb = make_dft_codebook(cfg, {{0, -20}, {0, 0}, {0, 20}, {5, 10}});
    CoefficientMatrix cm = build_matrix(cfg, grid, p, cb);
    CHECK(cm.a.minCoeff() >= 0.0);
    for (int n = 0; n < cm.cols(); ++n)
        CHECK(cm.a_hat.col(n).norm() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("single-path example: strongest entry for the path cell is the [0,30] beam")
{
    // path at (-2.84, 23.82) -> nearest grid cell; with the five-beam
    // codebook the [0, 30] beam row must carry the largest column entry
    ArrayConfig cfg = half_wave_array(8, 4);
    AngularGrid grid = AngularGrid::regular(-30, 30, 2, -60, 60, 5);
    GainPattern p = make_uniform_gain(grid);
    BeamCodebook cb = make_dft_codebook(cfg, {{0, -15}, {0, 0}, {0, 15}, {0, 30}, {0, 45}});
    CoefficientMatrix cm = build_matrix(cfg, grid, p, cb);

    // nearest cell to (-2.84, 23.82): tilt -2, azimuth 25
    int i = 0, j = 0;
    for (int k = 0; k < grid.n_tilt(); ++k)
        if (std::abs(grid.tilt_deg[k] + 2.0) < 1e-9)
            i = k;
    for (int k = 0; k < grid.n_azimuth(); ++k)
        if (std::abs(grid.azimuth_deg[k] - 25.0) < 1e-9)
            j = k;
    int n = grid.flat_index(i, j);
    int best_beam;
    cm.a.col(n).maxCoeff(&best_beam);
    CHECK(best_beam == 3);
}

TEST_CASE("zero-gain columns flagged, not normalized")
{
    ArrayConfig cfg = half_wave_array(2, 2);
    AngularGrid grid{{0.0, 2.0}, {0.0}};
    GainPattern p = make_uniform_gain(grid);
    p.gains(1, 0) = 0.0;
    BeamCodebook cb = zero_codebook(cfg, 2);
    CoefficientMatrix cm = build_matrix(cfg, grid, p, cb);
    REQUIRE(cm.zero_columns == std::vector<int>{1});
    CHECK(cm.a_hat.col(1).norm() == 0.0);
}

TEST_CASE("top_n_columns ordering and identity restriction")
{
    CoefficientMatrix cm;
    cm.a.resize(1, 3);
    cm.a << 3.0, 1.0, 2.0;
    cm.col_labels = {"c0", "c1", "c2"};
    cm.finalize();

    auto full = top_n_columns(cm, 3);
    CHECK(full.index_map == std::vector<int>{0, 2, 1});

    auto two = top_n_columns(cm, 2);
    CHECK(two.index_map == std::vector<int>{0, 2});
    CHECK(two.matrix.a(0, 0) == 3.0);
    CHECK(two.matrix.a(0, 1) == 2.0);

    CHECK_THROWS_AS(top_n_columns(cm, 0), std::invalid_argument);
    CHECK_THROWS_AS(top_n_columns(cm, 4), std::invalid_argument);
}

TEST_CASE("top_n_columns breaks norm ties toward lower index")
{
    CoefficientMatrix cm;
    cm.a.resize(1, 3);
    cm.a << 2.0, 2.0, 2.0;
    cm.finalize();
    auto r = top_n_columns(cm, 2);
    CHECK(r.index_map == std::vector<int>{0, 1});
}

TEST_CASE("matrix CSV and JSON round trips")
{
    ArrayConfig cfg = half_wave_array(4, 2, 0.1);
    AngularGrid grid = AngularGrid::regular(-4, 4, 2, -10, 10, 5);
    GainPattern p = make_gain_pattern(ParabolicGainModel{}, grid);
    BeamCodebook cb = make_dft_codebook(cfg, {{0, -10}, {0, 10}});
    CoefficientMatrix cm = build_matrix(cfg, grid, p, cb);

    auto path = std::filesystem::temp_directory_path() / "lscm_matrix_test.csv";
    save_matrix_csv(path.string(), cm, {"config_hash=test"});
    CoefficientMatrix back = load_matrix_csv(path.string());
    CHECK((back.a - cm.a).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(back.col_labels == cm.col_labels);
    std::filesystem::remove(path);

    CoefficientMatrix jback = matrix_from_json(matrix_to_json(cm));
    CHECK((jback.a - cm.a).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}
