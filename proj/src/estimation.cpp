#include "shapebias/estimation.hpp"

#include <cmath>
#include <limits>

#include "shapebias/parallel.hpp"

namespace shapebias {

namespace {

constexpr std::uint64_t kNoiseStreamTag = 0;
constexpr std::uint64_t kPoseStreamTag = 1;

struct RegistrationPass {
    std::vector<ManifoldPoint> registered;
    std::vector<GroupElement> gs;
    int non_unique = 0;
};

RegistrationPass register_all(const ManifoldPoint& y, std::span<const ManifoldPoint> data)
{
    const std::size_t n = data.size();
    std::vector<std::optional<Registration>> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = register_point(y, data[i]); });

    RegistrationPass pass;
    pass.registered.reserve(n);
    pass.gs.reserve(n);
    for (auto& r : out) {
        if (!r->unique) ++pass.non_unique;
        pass.registered.push_back(std::move(r->registered));
        pass.gs.push_back(std::move(r->g));
    }
    return pass;
}

double registered_cost(const ManifoldPoint& y, std::span<const ManifoldPoint> registered)
{
    double total = 0.0;
    for (const auto& x : registered) total += squared_distance(y, x);
    return total;
}

}  // namespace

void EstimationConfig::validate() const
{
    if (max_outer_iter < 1 || frechet_max_iter < 1) throw DomainError("EstimationConfig: iteration limits must be positive");
    if (!(cost_tol > 0.0) || !(frechet_tol > 0.0)) throw DomainError("EstimationConfig: tolerances must be positive");
}

EstimationResult estimate_template(std::span<const ManifoldPoint> data, const EstimationConfig& cfg,
                                   const std::optional<ManifoldPoint>& initial)
{
    cfg.validate();
    if (data.empty()) throw DomainError("estimate_template: empty data");
    const Space& space = data.front().space();
    for (const auto& x : data) {
        if (!(x.space() == space)) throw ContractViolation("estimate_template: data on different spaces");
    }

    ManifoldPoint y = data.front();
    if (initial) {
        if (!(initial->space() == space)) throw ContractViolation("estimate_template: initial estimate on another space");
        y = *initial;
    } else if (cfg.init == Initialization::FrechetOfRaw) {
        y = frechet_mean(data, cfg.frechet_tol, cfg.frechet_max_iter);
    }

    EstimationResult result{y, {}, {}, false, 0};
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int iter = 0; iter < cfg.max_outer_iter; ++iter) {
        RegistrationPass pass = register_all(y, data);
        if (iter == 0) previous = registered_cost(y, pass.registered);
        y = frechet_mean(pass.registered, cfg.frechet_tol, cfg.frechet_max_iter);
        const double current = registered_cost(y, pass.registered);
        result.cost_trace.push_back(current);
        result.template_hat = y;
        result.registrations = std::move(pass.gs);
        result.non_unique_registrations = pass.non_unique;

        if (current == 0.0 || previous - current <= cfg.cost_tol * previous) {
            result.converged = true;
            break;
        }
        previous = current;
    }
    return result;
}

double cost(const ManifoldPoint& y, std::span<const GroupElement> gs, std::span<const ManifoldPoint> data)
{
    if (gs.size() != data.size()) throw ContractViolation("cost: group elements and data differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) total += squared_distance(y, act(gs[i], data[i]));
    return total;
}

Eigen::MatrixXd generate_noise_coefficients(int intrinsic_dim, std::size_t n, const NoiseModel& noise,
                                            std::uint64_t seed, bool antithetic)
{
    noise.validate();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), intrinsic_dim);
    const std::size_t blocks = (n + kSampleBlockSize - 1) / kSampleBlockSize;
    parallel_for(blocks, [&](std::size_t b) {
        RngStream rng(derive_seed(seed, {kNoiseStreamTag, b}));
        const std::size_t begin = b * kSampleBlockSize;
        const std::size_t end = std::min(n, begin + kSampleBlockSize);
        for (std::size_t i = begin; i < end; ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            if (antithetic && (i % 2 == 1)) {
                out.row(row) = -out.row(row - 1);
            } else {
                out.row(row) = draw_noise_coefficients(intrinsic_dim, noise, rng).transpose();
            }
        }
    });
    return out;
}

std::vector<ManifoldPoint> generate_observations(const ManifoldPoint& templ, std::size_t n, const NoiseModel& noise,
                                                 std::uint64_t seed, const GenerationOptions& options)
{
    const Space& space = templ.space();
    const Eigen::MatrixXd coefficients =
        generate_noise_coefficients(space.intrinsic_dim(), n, noise, seed, options.antithetic);

    std::vector<Eigen::VectorXd> coords(n);
    const std::size_t blocks = (n + kSampleBlockSize - 1) / kSampleBlockSize;
    parallel_for(blocks, [&](std::size_t b) {
        RngStream pose_rng(derive_seed(seed, {kPoseStreamTag, b}));
        const std::size_t begin = b * kSampleBlockSize;
        const std::size_t end = std::min(n, begin + kSampleBlockSize);
        for (std::size_t i = begin; i < end; ++i) {
            const ManifoldPoint base = options.poses == PoseModel::Uniform
                                           ? act(random_group_element(space, pose_rng), templ)
                                           : templ;
            const Eigen::VectorXd c = coefficients.row(static_cast<Eigen::Index>(i)).transpose();
            coords[i] = exp_map(base, tangent_from_coefficients(base, c)).coords();
        }
    });

    std::vector<ManifoldPoint> out;
    out.reserve(n);
    for (auto& c : coords) out.emplace_back(space, std::move(c));
    return out;
}

}  // namespace shapebias
