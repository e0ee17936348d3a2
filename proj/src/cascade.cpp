#include "volcascade/cascade.hpp"

#include "volcascade/rng.hpp"
#include "volcascade/stats.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace volcascade {

double ModelParams::scale_of(double lambda) const { return L * std::exp(-lambda); }
double ModelParams::lambda_of(double scale) const { return std::log(L / scale); }
double ModelParams::a_A(double lambda) const {
    return epsilon * std::sqrt(scale_of(lambda));
}
double ModelParams::b_A2(double lambda) const {
    return prefactor * epsilon * scale_of(lambda);
}
double ModelParams::mean_x(double lambda) const {
    return prefactor * std::sqrt(scale_of(lambda));
}

void ModelParams::validate() const {
    if (!(gamma_M > 0.0)) throw std::invalid_argument("ModelParams: gamma_M must be > 0");
    if (sigma_M2 < 0.0) throw std::invalid_argument("ModelParams: sigma_M2 must be >= 0");
    if (epsilon < 0.0) throw std::invalid_argument("ModelParams: epsilon must be >= 0");
    if (!(L > 0.0)) throw std::invalid_argument("ModelParams: L must be > 0");
    if (!(prefactor > 0.0)) throw std::invalid_argument("ModelParams: prefactor must be > 0");
}

std::vector<double> Ensemble::column(std::size_t j) const {
    std::vector<double> out(n_paths);
    const std::size_t stride = lambda_grid.size();
    for (std::size_t p = 0; p < n_paths; ++p) out[p] = x[p * stride + j];
    return out;
}

std::size_t Ensemble::index_of(double lambda) const {
    for (std::size_t j = 0; j < lambda_grid.size(); ++j)
        if (std::abs(lambda_grid[j] - lambda) <= 1e-9) return j;
    throw std::invalid_argument("Ensemble: lambda " + std::to_string(lambda) +
                                " is not on the grid");
}

X0Sampler x0_lognormal_equal_mean_sd(double mean_value) {
    if (!(mean_value > 0.0))
        throw std::invalid_argument("x0 sampler: mean must be positive");
    // E = sd forces exp(omega^2) - 1 = 1.
    const double omega2 = std::log(2.0);
    const double nu = std::log(mean_value) - 0.5 * omega2;
    const double omega = std::sqrt(omega2);
    return [nu, omega](std::mt19937_64& rng) {
        std::normal_distribution<double> n01(0.0, 1.0);
        return std::exp(nu + omega * n01(rng));
    };
}

X0Sampler x0_constant(double value) {
    return [value](std::mt19937_64&) { return value; };
}

X0Sampler x0_from_density(std::vector<double> centers, std::vector<double> density) {
    if (centers.size() != density.size() || centers.size() < 2)
        throw std::invalid_argument("x0_from_density: need matched grids of size >= 2");
    const double dx = centers[1] - centers[0];
    std::vector<double> cdf(centers.size() + 1, 0.0);
    for (std::size_t i = 0; i < density.size(); ++i) {
        if (density[i] < 0.0) throw std::invalid_argument("x0_from_density: negative density");
        cdf[i + 1] = cdf[i] + density[i] * dx;
    }
    const double total = cdf.back();
    if (!(total > 0.0)) throw std::invalid_argument("x0_from_density: zero mass");
    for (double& c : cdf) c /= total;
    auto edges = std::make_shared<std::vector<double>>(centers.size() + 1);
    for (std::size_t i = 0; i <= centers.size(); ++i)
        (*edges)[i] = centers[0] - 0.5 * dx + static_cast<double>(i) * dx;
    auto cdf_ptr = std::make_shared<std::vector<double>>(std::move(cdf));
    return [edges, cdf_ptr](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double u = u01(rng);
        const auto& c = *cdf_ptr;
        const auto it = std::upper_bound(c.begin(), c.end(), u);
        std::size_t hi = std::min<std::size_t>(
            static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - c.begin(), 1)),
            c.size() - 1);
        const double c_lo = c[hi - 1], c_hi = c[hi];
        const double frac = c_hi > c_lo ? (u - c_lo) / (c_hi - c_lo) : 0.5;
        return (*edges)[hi - 1] + frac * ((*edges)[hi] - (*edges)[hi - 1]);
    };
}

namespace {

struct StepPlan {
    // Substep breakdown of the output grid with per-substep coefficients.
    std::vector<std::size_t> substeps_per_interval;
    std::vector<double> h;        // substep sizes, flattened
    std::vector<double> sqrt_h;
    std::vector<double> a_coef;   // a_A at the left substep edge
    std::vector<double> b_coef;   // b_A at the left substep edge
};

StepPlan plan_steps(const ModelParams& params, std::span<const double> grid,
                    double max_step) {
    if (grid.size() < 2)
        throw std::invalid_argument("simulate: lambda grid needs >= 2 points");
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (!(grid[j] > grid[j - 1]))
            throw std::invalid_argument("simulate: lambda grid must be increasing");
    if (!(max_step > 0.0) || max_step > 0.05)
        throw std::invalid_argument(
            "simulate: integration step must satisfy 0 < step <= 0.05 "
            "(Euler stability bound)");

    StepPlan plan;
    for (std::size_t j = 1; j < grid.size(); ++j) {
        const double span = grid[j] - grid[j - 1];
        const auto n = static_cast<std::size_t>(std::ceil(span / max_step - 1e-12));
        plan.substeps_per_interval.push_back(std::max<std::size_t>(n, 1));
        const double h = span / static_cast<double>(plan.substeps_per_interval.back());
        double lam = grid[j - 1];
        for (std::size_t k = 0; k < plan.substeps_per_interval.back(); ++k) {
            plan.h.push_back(h);
            plan.sqrt_h.push_back(std::sqrt(h));
            plan.a_coef.push_back(params.a_A(lam));
            plan.b_coef.push_back(std::sqrt(params.b_A2(lam)));
            lam += h;
        }
    }
    return plan;
}

enum class Scheme { euler, discrete_cascade };

Ensemble run_simulation(const ModelParams& params, const X0Sampler& x0,
                        std::span<const double> grid, std::size_t n_paths,
                        std::uint64_t seed, const SimOptions& opts, Scheme scheme) {
    params.validate();
    if (n_paths == 0) throw std::invalid_argument("simulate: n_paths must be > 0");
    const StepPlan plan = plan_steps(params, grid, opts.max_step);

    Ensemble ens;
    ens.lambda_grid.assign(grid.begin(), grid.end());
    ens.seed = seed;
    ens.n_paths = n_paths;
    ens.x.assign(n_paths * grid.size(), 0.0);

    const double gamma = params.gamma_M;
    const double sigma = std::sqrt(params.sigma_M2);
    const double mu_m = -(params.gamma_M + 0.5 * params.sigma_M2);
    const std::size_t n_grid = grid.size();
    const bool reflect = opts.mode == SimMode::reflected;

#pragma omp parallel for schedule(static)
    for (long long pi = 0; pi < static_cast<long long>(n_paths); ++pi) {
        const auto p = static_cast<std::size_t>(pi);
        auto rng = make_stream(seed, p);
        std::normal_distribution<double> n01(0.0, 1.0);
        double x = x0(rng);
        if (reflect) x = std::abs(x);
        ens.x[p * n_grid] = x;
        std::size_t step = 0;
        for (std::size_t j = 1; j < n_grid; ++j) {
            for (std::size_t k = 0; k < plan.substeps_per_interval[j - 1]; ++k, ++step) {
                const double h = plan.h[step];
                const double sq = plan.sqrt_h[step];
                const double db_m = sq * n01(rng);
                const double db_a = sq * n01(rng);
                if (scheme == Scheme::euler) {
                    x += x * (-gamma * h + sigma * db_m) + plan.a_coef[step] * h +
                         plan.b_coef[step] * db_a;
                } else {
                    const double w_m = std::exp(mu_m * h + sigma * db_m);
                    x = w_m * (x + plan.a_coef[step] * h + plan.b_coef[step] * db_a);
                }
                if (reflect) x = std::abs(x);
            }
            ens.x[p * n_grid + j] = x;
        }
    }
    return ens;
}

}  // namespace

Ensemble simulate_sde(const ModelParams& params, const X0Sampler& x0,
                      std::span<const double> lambda_grid, std::size_t n_paths,
                      std::uint64_t seed, const SimOptions& opts) {
    return run_simulation(params, x0, lambda_grid, n_paths, seed, opts, Scheme::euler);
}

Ensemble simulate_discrete_cascade(const ModelParams& params, const X0Sampler& x0,
                                   std::span<const double> lambda_grid,
                                   std::size_t n_paths, std::uint64_t seed,
                                   const SimOptions& opts) {
    return run_simulation(params, x0, lambda_grid, n_paths, seed, opts,
                          Scheme::discrete_cascade);
}

double analytic_moment_exponent(const ModelParams& params, double q) {
    const double mu = -(params.gamma_M + 0.5 * params.sigma_M2);
    return -mu * q - 0.5 * params.sigma_M2 * q * q;
}

double analytic_moment(const ModelParams& params, double q, double scale) {
    if (params.epsilon != 0.0)
        throw std::invalid_argument(
            "analytic_moment: closed form requires epsilon = 0 (pure multiplicative model)");
    if (!(scale > 0.0) || scale > params.L)
        throw std::invalid_argument("analytic_moment: scale must lie in (0, L]");
    return std::pow(scale / params.L, -analytic_moment_exponent(params, q));
}

MultiplierStats multiplier_stats(const Ensemble& ensemble, double lambda1,
                                 double lambda2, double lambda3,
                                 double denominator_percentile) {
    if (!(lambda1 < lambda2 && lambda2 < lambda3))
        throw std::invalid_argument("multiplier_stats: need lambda1 < lambda2 < lambda3");
    const std::size_t j1 = ensemble.index_of(lambda1);
    const std::size_t j2 = ensemble.index_of(lambda2);
    const std::size_t j3 = ensemble.index_of(lambda3);

    const auto x1 = ensemble.column(j1);
    const auto x2 = ensemble.column(j2);
    const auto x3 = ensemble.column(j3);

    std::vector<double> abs1(x1.size()), abs2(x2.size());
    for (std::size_t p = 0; p < x1.size(); ++p) abs1[p] = std::abs(x1[p]);
    for (std::size_t p = 0; p < x2.size(); ++p) abs2[p] = std::abs(x2[p]);
    const double floor1 = quantile(abs1, denominator_percentile);
    const double floor2 = quantile(abs2, denominator_percentile);

    std::vector<double> w1, w1_pair, w2_pair;
    for (std::size_t p = 0; p < x1.size(); ++p) {
        if (abs1[p] < floor1 || abs1[p] == 0.0) continue;
        w1.push_back(x2[p] / x1[p]);
        if (abs2[p] < floor2 || abs2[p] == 0.0) continue;
        w1_pair.push_back(x2[p] / x1[p]);
        w2_pair.push_back(x3[p] / x2[p]);
    }
    if (w1.size() < 1000 || w1_pair.size() < 1000)
        throw std::runtime_error(
            "multiplier_stats: fewer than 1000 valid ratios after denominator filtering");

    MultiplierStats out;
    out.lambda1 = lambda1;
    out.lambda2 = lambda2;
    out.lambda3 = lambda3;
    out.n_ratios = w1.size();
    out.cauchy.location = quantile(w1, 0.5);
    out.cauchy.scale = 0.5 * (quantile(w1, 0.75) - quantile(w1, 0.25));
    if (!(out.cauchy.scale > 0.0))
        throw std::runtime_error("multiplier_stats: degenerate multiplier sample");
    const double loc = out.cauchy.location;
    const double sc = out.cauchy.scale;
    out.cauchy.ks = ks_statistic(
        w1, [loc, sc](double v) { return 0.5 + std::atan((v - loc) / sc) / M_PI; });
    out.kendall_tau = kendall_tau(w1_pair, w2_pair);
    return out;
}

ConstraintReport check_constraints(const ModelParams& params, double threshold) {
    params.validate();
    ConstraintReport rep;
    rep.threshold = threshold;
    const double lam1 = params.lambda_of(1.0);
    const double lhs = params.a_A(lam1) * params.mean_x(lam1);
    const double rhs = params.b_A2(lam1);
    rep.eq_identity_residual = rhs != 0.0 ? std::abs(lhs - rhs) / rhs : std::abs(lhs - rhs);
    rep.a_ratio = params.epsilon / params.prefactor;
    rep.b_ratio = std::sqrt(params.epsilon / params.prefactor);
    rep.a_small = rep.a_ratio < threshold;
    rep.b_small = rep.b_ratio < threshold;
    if (rep.eq_identity_residual > 1e-12)
        rep.violations.push_back("a_A(1) E(x) = b_A^2(1) identity violated");
    if (!rep.a_small)
        rep.violations.push_back("a_A(s)/E(x at s) = " + std::to_string(rep.a_ratio) +
                                 " is not small (threshold " + std::to_string(threshold) +
                                 ")");
    if (!rep.b_small)
        rep.violations.push_back("b_A(s)/E(x at s) = " + std::to_string(rep.b_ratio) +
                                 " is not small (threshold " + std::to_string(threshold) +
                                 ")");
    return rep;
}

MomentRecursion appendix_moment_recursion(const ModelParams& params, double e1_0,
                                          double e2_0,
                                          std::span<const double> lambda_grid,
                                          double b2_scale) {
    if (!(e1_0 > 0.0) || !(e2_0 > 0.0))
        throw std::invalid_argument("appendix_moment_recursion: initial moments must be > 0");
    if (lambda_grid.size() < 2)
        throw std::invalid_argument("appendix_moment_recursion: need >= 2 grid points");
    const double mu_m = -(params.gamma_M + 0.5 * params.sigma_M2);

    MomentRecursion out;
    out.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
    out.e1.resize(lambda_grid.size());
    out.e2.resize(lambda_grid.size());
    out.e1[0] = e1_0;
    out.e2[0] = e2_0;
    for (std::size_t j = 1; j < lambda_grid.size(); ++j) {
        const double lam = lambda_grid[j - 1];
        const double dl = lambda_grid[j] - lambda_grid[j - 1];
        if (!(dl > 0.0))
            throw std::invalid_argument("appendix_moment_recursion: grid must increase");
        const double a = params.a_A(lam);
        const double b2 = b2_scale * params.b_A2(lam);
        out.e1[j] = std::exp((mu_m + 0.5 * params.sigma_M2) * dl) * (out.e1[j - 1] + a * dl);
        out.e2[j] = std::exp((2.0 * mu_m + 2.0 * params.sigma_M2) * dl) *
                    (out.e2[j - 1] + (2.0 * a * out.e1[j - 1] + b2) * dl);
    }
    for (std::size_t j = 0; j < out.e2.size(); ++j) {
        const double defect = std::abs(out.e2[j] - 2.0 * out.e1[j] * out.e1[j]) / out.e2[j];
        out.max_relative_defect = std::max(out.max_relative_defect, defect);
    }
    return out;
}

}  // namespace volcascade
