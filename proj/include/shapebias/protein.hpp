#pragma once

#include <filesystem>

#include <Eigen/Dense>

namespace shapebias {

// N x 3 atom coordinates in angstrom. Element-agnostic: drop hydrogens before building one.
class AtomCloud {
public:
    explicit AtomCloud(Eigen::MatrixX3d positions);

    const Eigen::MatrixX3d& positions() const { return positions_; }
    int size() const { return static_cast<int>(positions_.rows()); }

private:
    Eigen::MatrixX3d positions_;
};

// Plain-text reader: three whitespace-separated coordinates per line, '#' starts a comment.
AtomCloud read_atom_file(const std::filesystem::path& path);

double radius_of_gyration(const AtomCloud& cloud);

// E[Rg_obs^2] - Rg^2 = 3 sigma^2 (N - 1) / N under i.i.d. isotropic noise of per-coordinate std sigma.
double rg_squared_bias(double sigma, int n_atoms);

struct CorrectedRg {
    double rg2;   // observed minus bias
    double snr2;  // rg2 / sigma^2, infinite when sigma == 0
};

// Throws DegenerateSignalError when the corrected value is not positive.
CorrectedRg corrected_rg_squared(double observed_rg2, double sigma, int n_atoms);

struct FalsePositive {
    double p;   // v0 / vl
    double v0;  // error-zone volume (4/3) pi (chi sigma)^3 with chi = sqrt(chi_sq)
    double vl;  // (4/3) pi Rg^3
};

FalsePositive false_positive_probability(double rg, double sigma, double chi_sq);

// Relative amount by which P is underestimated when the ball volume uses the noise-inflated
// radius sqrt(Rg^2 + rg_squared_bias) instead of Rg: 1 - P_inflated / P_true.
double false_positive_underestimation(double rg, double sigma, int n_atoms);

}  // namespace shapebias
