// SPDX-License-Identifier: Apache-2.0
//
// lscm - localized statistical channel modeling toolkit
//
// Sparse non-negative recovery of x from y = A x:
//   - active-set NNLS (Lawson-Hanson) for the restricted subproblems
//   - NNOMP: greedy selection by unnormalized correlation a_n' r
//   - WNOMP: selection by (a_n/|a_n|)' r + lambda_k * |a_n| with the dynamic
//     weight lambda_k = |A_hat' r_k|_2 / sum_n |a_n|_2, and support
//     compression after each NNLS solve
//   - non-negative LASSO via proximal gradient with one-sided soft threshold

#ifndef lscm_solvers_hpp
#define lscm_solvers_hpp

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lscm/coeff_matrix.hpp"

namespace lscm
{

enum class Termination
{
    kkt_stop,         // max correlation with residual fell below tolerance
    sparsity_reached, // |S| hit K
    max_iter,
    stall // re-selected an index already in S with no residual decrease
};

inline std::string to_string(Termination t)
{
    switch (t)
    {
    case Termination::kkt_stop: return "kkt_stop";
    case Termination::sparsity_reached: return "sparsity_reached";
    case Termination::max_iter: return "max_iter";
    case Termination::stall: return "stall";
    }
    return "unknown";
}

struct SolverResult
{
    Eigen::VectorXd x_hat;
    std::vector<int> support; // ascending
    std::vector<double> residual_norms;
    Termination termination = Termination::max_iter;
    int iterations = 0;
};

struct SolverConfig
{
    int k_max = 5;
    double stop_tol = -1.0; // < 0: auto, 1e-12 * |A'y|_inf
    int max_iter = -1;      // < 0: auto, 4 * k_max
    double lasso_lambda = -1.0; // < 0: per-instance sweep
    double lasso_step = -1.0;   // < 0: 1 / |A|_2^2
    bool lasso_backtracking = false;
    double lasso_obj_tol = 1e-10;
    int lasso_max_iter = 2000;
};

// Lawson-Hanson active-set NNLS: minimizes |y - A z|_2 over z >= 0.
// Exact zeros on the active set; KKT holds at the returned point.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd &a_sub, const Eigen::VectorXd &y,
                            double tol = -1.0, int max_iter = -1)
{
    const int n = static_cast<int>(a_sub.cols());
    if (n < 1)
        throw std::invalid_argument("nnls: empty column set");
    if (a_sub.rows() != y.size())
        throw std::invalid_argument("nnls: dimension mismatch");
    if (tol < 0.0)
        tol = 10.0 * std::numeric_limits<double>::epsilon() *
              a_sub.cwiseAbs().colwise().sum().maxCoeff() * y.cwiseAbs().maxCoeff();
    if (max_iter < 0)
        max_iter = 3 * n + 30;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(n, false);
    int n_passive = 0;

    auto solve_passive = [&]() -> Eigen::VectorXd {
        Eigen::MatrixXd ap(a_sub.rows(), n_passive);
        int c = 0;
        for (int i = 0; i < n; ++i)
            if (passive[i])
                ap.col(c++) = a_sub.col(i);
        return ap.colPivHouseholderQr().solve(y);
    };

    for (int outer = 0; outer < max_iter; ++outer)
    {
        Eigen::VectorXd w = a_sub.transpose() * (y - a_sub * x);
        int j = -1;
        double best = tol;
        for (int i = 0; i < n; ++i)
            if (!passive[i] && w(i) > best)
            {
                best = w(i);
                j = i;
            }
        if (j < 0)
            return x; // KKT satisfied

        passive[j] = true;
        ++n_passive;

        for (int inner = 0; inner < max_iter; ++inner)
        {
            Eigen::VectorXd s = solve_passive();
            double s_min = s.size() ? s.minCoeff() : 1.0;
            if (s_min > 0.0)
            {
                int c = 0;
                for (int i = 0; i < n; ++i)
                    x(i) = passive[i] ? s(c++) : 0.0;
                break;
            }
            // step toward s until the first passive variable hits zero
            double alpha = std::numeric_limits<double>::infinity();
            int c = 0;
            for (int i = 0; i < n; ++i)
                if (passive[i])
                {
                    if (s(c) <= 0.0)
                        alpha = std::min(alpha, x(i) / (x(i) - s(c)));
                    ++c;
                }
            c = 0;
            for (int i = 0; i < n; ++i)
                if (passive[i])
                {
                    x(i) += alpha * (s(c) - x(i));
                    ++c;
                }
                else
                    x(i) = 0.0;
            for (int i = 0; i < n; ++i)
                if (passive[i] && x(i) <= 1e-14 * x.cwiseAbs().maxCoeff())
                {
                    x(i) = 0.0;
                    passive[i] = false;
                    --n_passive;
                }
            if (inner == max_iter - 1)
                throw std::runtime_error("nnls: inner feasibility loop did not converge (n=" +
                                         std::to_string(n) + ")");
        }
    }
    throw std::runtime_error("nnls: did not converge within " + std::to_string(max_iter) +
                             " outer iterations");
}

namespace detail
{

inline double auto_stop_tol(const CoefficientMatrix &a, const Eigen::VectorXd &y, double cfg_tol)
{
    if (cfg_tol >= 0.0)
        return cfg_tol;
    double scale = (a.a.transpose() * y).cwiseAbs().maxCoeff();
    return 1e-12 * scale;
}

// Shared greedy loop for NNOMP/WNOMP; `weighted` switches the selection rule
// and enables the support compression step.
inline SolverResult greedy_omp(const CoefficientMatrix &a, const Eigen::VectorXd &y,
                               const SolverConfig &cfg, bool weighted)
{
    if (a.rows() != y.size())
        throw std::invalid_argument("greedy_omp: dimension mismatch");
    if (cfg.k_max < 1)
        throw std::invalid_argument("greedy_omp: k_max must be >= 1");

    const int n = a.cols();
    const double stop_tol = auto_stop_tol(a, y, cfg.stop_tol);
    const int max_iter = cfg.max_iter > 0 ? cfg.max_iter : 4 * cfg.k_max;
    const double norm_sum = a.col_norms.sum();

    SolverResult res;
    res.x_hat = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = y;
    res.residual_norms.push_back(r.norm());
    std::vector<bool> in_support(n, false);
    std::vector<int> support;

    for (int k = 0; k < max_iter; ++k)
    {
        Eigen::VectorXd corr = a.a.transpose() * r;
        if (corr.maxCoeff() <= stop_tol)
        {
            res.termination = Termination::kkt_stop;
            break;
        }

        int pick = -1;
        double best = -std::numeric_limits<double>::infinity();
        if (weighted)
        {
            Eigen::VectorXd norm_corr = a.a_hat.transpose() * r;
            double lambda_k = norm_sum > 0.0 ? norm_corr.norm() / norm_sum : 0.0;
            for (int i = 0; i < n; ++i)
            {
                if (a.col_norms(i) <= 0.0)
                    continue;
                double score = norm_corr(i) + lambda_k * a.col_norms(i);
                if (score > best)
                {
                    best = score;
                    pick = i;
                }
            }
        }
        else
        {
            for (int i = 0; i < n; ++i)
            {
                if (a.col_norms(i) <= 0.0)
                    continue;
                if (corr(i) > best)
                {
                    best = corr(i);
                    pick = i;
                }
            }
        }
        if (pick < 0)
        {
            res.termination = Termination::kkt_stop;
            break;
        }
        if (in_support[pick])
        {
            // same active set would be re-solved; the residual cannot decrease
            res.termination = Termination::stall;
            break;
        }

        in_support[pick] = true;
        support.push_back(pick);
        std::sort(support.begin(), support.end());

        Eigen::MatrixXd a_s(a.rows(), support.size());
        for (size_t c = 0; c < support.size(); ++c)
            a_s.col(static_cast<int>(c)) = a.a.col(support[c]);
        Eigen::VectorXd z = nnls(a_s, y);

        res.x_hat.setZero();
        for (size_t c = 0; c < support.size(); ++c)
            res.x_hat(support[c]) = z(static_cast<int>(c));

        if (weighted)
        {
            // compress S to supp(x): entries zeroed by the constraint leave S
            std::vector<int> kept;
            for (int s : support)
            {
                if (res.x_hat(s) > 0.0)
                    kept.push_back(s);
                else
                    in_support[s] = false;
            }
            support = std::move(kept);
        }

        r = y - a.a * res.x_hat;
        res.residual_norms.push_back(r.norm());
        res.iterations = k + 1;

        if (static_cast<int>(support.size()) >= cfg.k_max)
        {
            res.termination = Termination::sparsity_reached;
            break;
        }
        if (k == max_iter - 1)
            res.termination = Termination::max_iter;
    }

    res.support = support;
    return res;
}

} // namespace detail

inline SolverResult nnomp(const CoefficientMatrix &a, const Eigen::VectorXd &y,
                          const SolverConfig &cfg)
{
    return detail::greedy_omp(a, y, cfg, false);
}

inline SolverResult wnomp(const CoefficientMatrix &a, const Eigen::VectorXd &y,
                          const SolverConfig &cfg)
{
    return detail::greedy_omp(a, y, cfg, true);
}

// Proximal gradient for min_{x>=0} 0.5|Ax - y|^2 + lambda*sum(x).
// Over the nonnegative orthant the l1 term is linear, so the prox step is
// x <- max(0, x - step*(A'(Ax - y) + lambda)).
inline SolverResult lasso_nn(const CoefficientMatrix &a, const Eigen::VectorXd &y,
                             double lambda_reg, const SolverConfig &cfg)
{
    if (lambda_reg < 0.0)
        throw std::invalid_argument("lasso_nn: lambda must be nonnegative");
    if (a.rows() != y.size())
        throw std::invalid_argument("lasso_nn: dimension mismatch");

    const int n = a.cols();
    // |A|_2^2 = lambda_max of the smaller Gram matrix
    Eigen::MatrixXd gram = a.rows() <= n ? Eigen::MatrixXd(a.a * a.a.transpose())
                                         : Eigen::MatrixXd(a.a.transpose() * a.a);
    double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                           .eigenvalues()
                           .maxCoeff();
    double step = cfg.lasso_step > 0.0 ? cfg.lasso_step
                                       : (lipschitz > 0.0 ? 1.0 / lipschitz : 1.0);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    auto objective = [&](const Eigen::VectorXd &v) {
        return 0.5 * (a.a * v - y).squaredNorm() + lambda_reg * v.sum();
    };
    double obj = objective(x);

    SolverResult res;
    res.residual_norms.push_back((a.a * x - y).norm());
    res.termination = Termination::max_iter;
    int rising = 0;

    for (int it = 0; it < cfg.lasso_max_iter; ++it)
    {
        Eigen::VectorXd grad = a.a.transpose() * (a.a * x - y);
        Eigen::VectorXd next = (x - step * (grad.array() + lambda_reg).matrix()).cwiseMax(0.0);
        double next_obj = objective(next);

        if (cfg.lasso_backtracking)
        {
            while (next_obj > obj + 1e-15 && step > 1e-18)
            {
                step *= 0.5;
                next = (x - step * (grad.array() + lambda_reg).matrix()).cwiseMax(0.0);
                next_obj = objective(next);
            }
        }
        else if (next_obj > obj * (1.0 + 1e-12) + 1e-300)
        {
            // a fixed step <= 1/L makes the objective monotone, so repeated
            // rises (including bounded oscillation) indicate an oversized step
            if (++rising >= 10)
                throw std::runtime_error(
                    "lasso_nn: objective rose repeatedly under the fixed step; the step "
                    "exceeds 1/L, enable backtracking mode");
        }

        double rel_change = std::abs(obj - next_obj) / std::max(1e-300, std::abs(obj));
        x = next;
        obj = next_obj;
        res.residual_norms.push_back((a.a * x - y).norm());
        res.iterations = it + 1;
        double tol = cfg.stop_tol >= 0.0 ? cfg.stop_tol : cfg.lasso_obj_tol;
        if (rel_change < tol)
        {
            res.termination = Termination::kkt_stop;
            break;
        }
    }

    res.x_hat = x;
    double support_eps = x.size() ? 1e-8 * x.maxCoeff() : 0.0;
    for (int i = 0; i < n; ++i)
        if (x(i) > support_eps && x(i) > 0.0)
            res.support.push_back(i);
    return res;
}

// LASSO baseline with per-instance lambda selection: geometric sweep from
// lambda_max = max(A'y), keep the candidate whose top-K refit (NNLS on the
// K largest entries) attains the smallest residual. Returns the refit.
inline SolverResult lasso_nn_auto(const CoefficientMatrix &a, const Eigen::VectorXd &y,
                                  const SolverConfig &cfg)
{
    if (cfg.lasso_lambda >= 0.0)
        return lasso_nn(a, y, cfg.lasso_lambda, cfg);

    double lambda_max = (a.a.transpose() * y).maxCoeff();
    if (lambda_max <= 0.0)
        return lasso_nn(a, y, 0.0, cfg);

    SolverResult best;
    double best_resid = std::numeric_limits<double>::infinity();
    for (double factor : {3e-2, 1e-2, 3e-3, 1e-3, 3e-4})
    {
        SolverResult cand = lasso_nn(a, y, factor * lambda_max, cfg);

        // top-K entries by magnitude, refit with NNLS
        std::vector<int> order = cand.support;
        std::sort(order.begin(), order.end(),
                  [&](int p, int q) { return cand.x_hat(p) > cand.x_hat(q); });
        if (static_cast<int>(order.size()) > cfg.k_max)
            order.resize(cfg.k_max);
        std::sort(order.begin(), order.end());
        if (order.empty())
            continue;

        Eigen::MatrixXd a_s(a.rows(), order.size());
        for (size_t c = 0; c < order.size(); ++c)
            a_s.col(static_cast<int>(c)) = a.a.col(order[c]);
        Eigen::VectorXd z = nnls(a_s, y);

        Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
        for (size_t c = 0; c < order.size(); ++c)
            x(order[c]) = z(static_cast<int>(c));
        double resid = (a.a * x - y).norm();
        if (resid < best_resid)
        {
            best_resid = resid;
            best = cand;
            best.x_hat = x;
            best.support.clear();
            for (int s : order)
                if (x(s) > 0.0)
                    best.support.push_back(s);
            best.residual_norms.push_back(resid);
        }
    }
    if (best_resid == std::numeric_limits<double>::infinity())
        return lasso_nn(a, y, 1e-3 * lambda_max, cfg);
    return best;
}

} // namespace lscm

#endif
