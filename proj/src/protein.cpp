#include "shapebias/protein.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "shapebias/errors.hpp"

namespace shapebias {

namespace {

double ball_volume(double radius) { return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius; }

}  // namespace

AtomCloud::AtomCloud(Eigen::MatrixX3d positions) : positions_(std::move(positions))
{
    if (positions_.rows() < 2) throw DomainError("AtomCloud: need at least 2 atoms");
    if (!positions_.allFinite()) throw DomainError("AtomCloud: non-finite coordinate");
}

AtomCloud read_atom_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw DomainError("read_atom_file: cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;
        if (!(fields >> x)) continue;
        std::string extra;
        if (!(fields >> y >> z) || (fields >> extra)) {
            throw DomainError("read_atom_file: line " + std::to_string(line_no) + " does not hold 3 coordinates");
        }
        values.insert(values.end(), {x, y, z});
    }
    const auto n = static_cast<Eigen::Index>(values.size() / 3);
    Eigen::MatrixX3d positions(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) positions(i, c) = values[static_cast<std::size_t>(3 * i + c)];
    }
    return AtomCloud(std::move(positions));
}

double radius_of_gyration(const AtomCloud& cloud)
{
    const auto& p = cloud.positions();
    const Eigen::RowVector3d center = p.colwise().mean();
    return std::sqrt((p.rowwise() - center).rowwise().squaredNorm().mean());
}

double rg_squared_bias(double sigma, int n_atoms)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("rg_squared_bias: sigma must be finite and >= 0");
    if (n_atoms < 2) throw DomainError("rg_squared_bias: need at least 2 atoms");
    return sigma * sigma * 3.0 * (n_atoms - 1) / n_atoms;
}

CorrectedRg corrected_rg_squared(double observed_rg2, double sigma, int n_atoms)
{
    const double rg2 = observed_rg2 - rg_squared_bias(sigma, n_atoms);
    if (!(rg2 > 0.0)) throw DegenerateSignalError("corrected_rg_squared: the noise bias exceeds the observed Rg^2");
    const double snr2 = sigma == 0.0 ? std::numeric_limits<double>::infinity() : rg2 / (sigma * sigma);
    return {rg2, snr2};
}

FalsePositive false_positive_probability(double rg, double sigma, double chi_sq)
{
    if (!(rg > 0.0) || !(sigma >= 0.0) || !(chi_sq > 0.0)) {
        throw DomainError("false_positive_probability: need rg > 0, sigma >= 0, chi_sq > 0");
    }
    const double v0 = ball_volume(std::sqrt(chi_sq) * sigma);
    const double vl = ball_volume(rg);
    return {v0 / vl, v0, vl};
}

double false_positive_underestimation(double rg, double sigma, int n_atoms)
{
    if (!(rg > 0.0)) throw DomainError("false_positive_underestimation: rg must be positive");
    const double inflated = std::sqrt(rg * rg + rg_squared_bias(sigma, n_atoms));
    return 1.0 - ball_volume(rg) / ball_volume(inflated);
}

}  // namespace shapebias
