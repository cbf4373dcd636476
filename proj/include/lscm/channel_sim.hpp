// SPDX-License-Identifier: Apache-2.0
//
// lscm - localized statistical channel modeling toolkit
//
// Physics-level Monte Carlo simulator. Draws raw per-antenna channel
// responses (log-normal path gains, uniform per-path phases, Gaussian
// per-antenna phase errors), forms per-beam RSRP samples and averages them.
// The empirical means converge to A*x, which is what the coefficient-matrix
// tests verify.

#ifndef lscm_channel_sim_hpp
#define lscm_channel_sim_hpp

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lscm/array_model.hpp"
#include "lscm/common.hpp"
#include "lscm/rng.hpp"

namespace lscm
{

// Sparse ground-truth angular power vector; x[n] = E[alpha] of the path in
// flattened grid cell n, zero where no path exists.
struct GroundTruthAps
{
    Eigen::VectorXd x;
    std::vector<int> support; // ascending

    int k() const { return static_cast<int>(support.size()); }
};

// Nonzero values are drawn log-uniformly over [min_db, max_db] (linear scale
// 10^(db/10)), giving a configurable dynamic range.
struct ValueDist
{
    double min_db = -20.0;
    double max_db = 0.0;
};

struct ShadowingParams
{
    double log_std = 0.0; // std of the underlying normal, natural-log scale
};

struct RsrpSampleSet
{
    Eigen::MatrixXd samples; // T x M, linear
    int t_count = 0;
    Eigen::VectorXd mean; // per-beam sample average

    Eigen::VectorXd std_error() const
    {
        Eigen::VectorXd se(samples.cols());
        for (int m = 0; m < samples.cols(); ++m)
        {
            double mu = mean(m);
            double var = (samples.col(m).array() - mu).square().sum() /
                         std::max(1, t_count - 1);
            se(m) = std::sqrt(var / t_count);
        }
        return se;
    }
};

inline GroundTruthAps generate_ground_truth(int n, int k, std::uint64_t seed,
                                            ValueDist dist = {})
{
    if (n < 1 || k < 1 || k > n)
        throw std::invalid_argument("generate_ground_truth: require 1 <= k <= n");
    CounterRng rng(seed, {0x6772756e64ULL});
    // partial Fisher-Yates for the support
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i)
        idx[i] = i;
    for (int i = 0; i < k; ++i)
    {
        int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[i], idx[j]);
    }
    GroundTruthAps gt;
    gt.support.assign(idx.begin(), idx.begin() + k);
    std::sort(gt.support.begin(), gt.support.end());
    gt.x = Eigen::VectorXd::Zero(n);
    for (int s : gt.support)
        gt.x(s) = to_linear(rng.uniform(dist.min_db, dist.max_db));
    return gt;
}

// Log-normal draw parametrized so the MEAN equals `mean` exactly:
// mu = ln(mean) - s^2/2, value = exp(mu + s*z).
inline double sample_channel_gain(double mean, const ShadowingParams &shadow, CounterRng &rng)
{
    if (mean <= 0.0)
        throw std::invalid_argument("sample_channel_gain: mean must be positive");
    double s = shadow.log_std;
    if (s < 0.0)
        throw std::invalid_argument("sample_channel_gain: log_std must be nonnegative");
    if (s == 0.0)
    {
        rng.normal(); // keep the draw sequence aligned with the s > 0 case
        return mean;
    }
    double mu = std::log(mean) - 0.5 * s * s;
    return std::exp(mu + s * rng.normal());
}

// One raw RSRP sample of beam m: per-path alpha and omega_ij, per-antenna
// omega_xy, then P * |sum_{x,y} h_{x,y} w_{x,y}|^2. Empty support yields 0.
inline double sample_rsrp(const ArrayConfig &cfg, const AngularGrid &grid,
                          const GainPattern &pattern, const BeamCodebook &codebook,
                          const GroundTruthAps &truth, const ShadowingParams &shadow,
                          CounterRng &rng, int m)
{
    if (m < 0 || m >= codebook.size())
        throw std::out_of_range("sample_rsrp: beam index out of range");
    if (truth.x.size() != grid.size())
        throw std::invalid_argument("sample_rsrp: truth length does not match grid");
    if (truth.support.empty())
        return 0.0;

    const int n_paths = truth.k();
    std::vector<double> amp(n_paths), omega_path(n_paths);
    std::vector<int> cell_i(n_paths), cell_j(n_paths);
    for (int p = 0; p < n_paths; ++p)
    {
        int n = truth.support[p];
        auto [i, j] = grid.cell(n);
        cell_i[p] = i;
        cell_j[p] = j;
        double alpha = sample_channel_gain(truth.x(n), shadow, rng);
        amp[p] = std::sqrt(alpha) * pattern.at(i, j);
        omega_path[p] = rng.uniform(-pi, pi);
    }

    std::complex<double> field(0.0, 0.0);
    for (int x = 0; x < cfg.n_x; ++x)
        for (int y = 0; y < cfg.n_y; ++y)
        {
            double omega_ant = cfg.sigma * rng.normal();
            for (int p = 0; p < n_paths; ++p)
            {
                double psi = geometric_phase(cfg, grid.tilt_deg[cell_i[p]],
                                             grid.azimuth_deg[cell_j[p]], x, y) -
                             codebook.phase[m](x, y);
                double phase = psi + omega_path[p] + omega_ant;
                field += amp[p] * std::complex<double>(std::cos(phase), -std::sin(phase));
            }
        }
    return cfg.power * std::norm(field);
}

// T independent samples per beam; the draw stream for sample (t, m) is keyed
// by (seed, t, m), so results are identical under any execution order.
inline RsrpSampleSet estimate_expected_rsrp(const ArrayConfig &cfg, const AngularGrid &grid,
                                            const GainPattern &pattern, const BeamCodebook &codebook,
                                            const GroundTruthAps &truth, const ShadowingParams &shadow,
                                            std::uint64_t seed, int t_count)
{
    if (t_count < 1)
        throw std::invalid_argument("estimate_expected_rsrp: t_count must be >= 1");
    RsrpSampleSet set;
    set.t_count = t_count;
    set.samples.resize(t_count, codebook.size());
    for (int m = 0; m < codebook.size(); ++m)
        for (int t = 0; t < t_count; ++t)
        {
            CounterRng rng(seed, {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(m)});
            set.samples(t, m) = sample_rsrp(cfg, grid, pattern, codebook, truth, shadow, rng, m);
        }
    set.mean = set.samples.colwise().mean();
    return set;
}

} // namespace lscm

#endif
