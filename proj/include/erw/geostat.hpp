#pragma once

#include "erw/linalg.hpp"
#include "erw/rng.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace erw {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

enum class VariogramModel { spherical, exponential, gaussian };

VariogramModel variogram_model_from_string(const std::string& s);
const char* to_string(VariogramModel m);

// Theoretical variogram gamma*(h) with gamma*(0) = 0 and
// gamma*(inf) = nugget + sill. Exponential and gaussian use the practical
// range convention (95 % of the sill is reached at h = range); the
// spherical model reaches the sill exactly at h = range.
//
// Anisotropy is a 2x2 linear coordinate transform applied to separation
// vectors before taking the distance (identity = isotropic). sill = 0 is
// allowed and gives a deterministic field.
struct Variogram {
    VariogramModel model = VariogramModel::exponential;
    double nugget = 0.0;
    double sill = 1.0;
    double range = 1.0;
    std::array<double, 4> anisotropy{1.0, 0.0, 0.0, 1.0}; // row-major [a b; c d]

    void validate() const;
    double operator()(double h) const;
    double transformed_distance(const Point& a, const Point& b) const;
};

// rotation by angle_deg then scaling of the second (across-strike) axis by
// 1/ratio; ratio < 1 stretches correlation along the strike direction
std::array<double, 4> make_anisotropy(double angle_deg, double ratio);

struct FieldSpec {
    double mean = 0.0;
    Variogram variogram;
};

inline constexpr double kCovarianceJitterRel = 1e-10;
inline constexpr int kJitterRetries = 3;

// C[i][j] = (nugget + sill) - gamma*(||T (p_i - p_j)||), plus the base
// diagonal jitter of 1e-10 * (nugget + sill).
Matrix covariance(std::span<const Point> points, const Variogram& v);

// Pre-factorized Gaussian field over a fixed point set; draw() is cheap,
// so batch statistics tests and repeated realizations reuse the factor.
class GaussianField {
public:
    GaussianField(std::span<const Point> points, const FieldSpec& spec);

    std::vector<double> draw(RngStream& rng) const;
    // zero-mean, unit-spec draw for coregionalization mixing
    std::vector<double> draw_centered(RngStream& rng) const;

    std::size_t size() const { return n_; }
    int jitter_escalations() const { return escalations_; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    bool deterministic_ = false; // sill + nugget == 0
    Matrix chol_;
    int escalations_ = 0;
};

std::vector<double> realize_field(std::span<const Point> points, const FieldSpec& spec,
                                  RngStream& rng);

// Linear model of coregionalization: element e mixes the independent
// latent fields (drawn with each element's own variogram) with the rows of
// chol(rho), so co-located cross-correlations converge to rho.
// rho is row-major n_elem x n_elem, symmetric, unit diagonal, PSD.
std::vector<std::vector<double>> realize_cross_correlated(std::span<const Point> points,
                                                          std::span<const FieldSpec> specs,
                                                          const Matrix& rho, RngStream& rng);

// convenience for the two-element case
Matrix cross_correlation_matrix(std::size_t n_elem, double off_diagonal);

} // namespace erw
