#include "shapebias/bias_correction.hpp"

#include <cmath>

#include "shapebias/group_action.hpp"
#include "shapebias/shape_density.hpp"

namespace shapebias {

namespace {

constexpr std::uint64_t kIterativeTag = 1;
constexpr std::uint64_t kNestedTag = 2;

ManifoldPoint analytic_replication(const ManifoldPoint& templ, const BootstrapConfig& cfg)
{
    const Space& space = templ.space();
    const auto& y = templ.coords();
    if (space.kind() == SpaceKind::Euclidean && space.dim() >= 2) {
        const double r = y.norm();
        if (r == 0.0) throw DegenerateOrbitError("analytic replication: template at the origin");
        const double estimate = asymptotic_estimate_euclidean(space.dim(), r, cfg.sigma);
        return ManifoldPoint(space, y * (estimate / r));
    }
    if (space.kind() == SpaceKind::Sphere && space.dim() == 2) {
        const double estimate =
            SphereDensity(shape_coordinate(templ), cfg.sigma, SphereKernel::TangentPushforward, cfg.truncation_multiplier)
                .mean();
        return sphere_point(estimate, std::atan2(y[1], y[0]));
    }
    throw ContractViolation("analytic replication is only available on R^m and S^2, not " + space.describe());
}

}  // namespace

void BootstrapConfig::validate() const
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("BootstrapConfig: sigma must be finite and >= 0");
    if (max_iter < 1 || n_nested < 1) throw DomainError("BootstrapConfig: iteration counts must be positive");
    if (!(eps > 0.0)) throw DomainError("BootstrapConfig: eps must be positive");
    noise().validate();
    estimation.validate();
}

ManifoldPoint bootstrap_replication(const ManifoldPoint& templ, const BootstrapConfig& cfg, std::uint64_t seed)
{
    if (cfg.sigma == 0.0) return templ;
    if (cfg.replication == ReplicationMode::Analytic) return analytic_replication(templ, cfg);
    if (cfg.n_bootstrap == 0) throw DomainError("bootstrap_replication: n_bootstrap must be positive");

    const auto data = generate_observations(templ, cfg.n_bootstrap, cfg.noise(), seed, {cfg.poses, cfg.antithetic});
    const auto estimate = estimate_template(data, cfg.estimation).template_hat;
    // The estimate lives on the orbit of the first datum's frame; bring it next to the template.
    return register_point(templ, estimate).registered;
}

IterativeResult iterative_bootstrap(const ManifoldPoint& y_hat0, const BootstrapConfig& cfg)
{
    cfg.validate();
    BootstrapTrace trace;
    trace.estimates.push_back(y_hat0);
    ManifoldPoint current = y_hat0;

    for (int k = 0; k < cfg.max_iter; ++k) {
        const std::uint64_t tag = cfg.common_random_numbers ? 0 : static_cast<std::uint64_t>(k);
        const ManifoldPoint replication =
            bootstrap_replication(current, cfg, derive_seed(cfg.master_seed, {kIterativeTag, tag}));
        TangentVector bias = log_map(current, replication);
        ManifoldPoint next = exp_map(y_hat0, -parallel_transport(bias, y_hat0));
        const double step = distance(next, current);

        trace.bias_vectors.push_back(std::move(bias));
        trace.step_norms.push_back(step);
        trace.estimates.push_back(next);
        trace.iterations = k + 1;
        current = std::move(next);
        if (step < cfg.eps) {
            trace.converged = true;
            break;
        }
    }
    return {current, std::move(trace)};
}

NestedResult nested_bootstrap(std::span<const ManifoldPoint> data, const BootstrapConfig& cfg)
{
    cfg.validate();
    if (data.empty()) throw DomainError("nested_bootstrap: empty data");
    BootstrapConfig inner_cfg = cfg;
    if (inner_cfg.n_bootstrap == 0) inner_cfg.n_bootstrap = data.size();

    const ManifoldPoint y0 = estimate_template(data, cfg.estimation).template_hat;
    const ManifoldPoint y0_star = bootstrap_replication(y0, inner_cfg, derive_seed(cfg.master_seed, {kNestedTag, 0}));
    TangentVector bias = log_map(y0, y0_star);

    std::vector<ManifoldPoint> inner;
    inner.reserve(static_cast<std::size_t>(cfg.n_nested));
    for (int i = 0; i < cfg.n_nested; ++i) {
        inner.push_back(bootstrap_replication(y0_star, inner_cfg,
                                              derive_seed(cfg.master_seed, {kNestedTag, 1, static_cast<std::uint64_t>(i)})));
    }
    const ManifoldPoint inner_mean = frechet_mean(inner, cfg.estimation.frechet_tol, cfg.estimation.frechet_max_iter);
    const TangentVector inner_bias = parallel_transport(log_map(y0_star, inner_mean), y0);
    TangentVector bias_of_bias = bias - inner_bias;

    ManifoldPoint corrected = exp_map(y0, -(bias + bias_of_bias));
    return {std::move(corrected), y0, std::move(bias), std::move(bias_of_bias)};
}

TangentVector estimate_mean_curvature_empirical(const ManifoldPoint& y, double sigma, std::size_t n, std::uint64_t seed,
                                                double truncation_multiplier)
{
    if (!(sigma > 0.0)) throw DomainError("estimate_mean_curvature_empirical: sigma must be positive");
    if (n < 2) throw DomainError("estimate_mean_curvature_empirical: need at least 2 samples");
    const NoiseModel noise{sigma, truncation_multiplier};
    const auto data = generate_observations(y, n, noise, seed, {PoseModel::Identity, true});
    const auto estimate = estimate_template(data).template_hat;
    const auto replication = register_point(y, estimate).registered;
    return log_map(y, replication).scaled(-2.0 / (sigma * sigma));
}

}  // namespace shapebias
