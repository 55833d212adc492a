#include "erw/geostat.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace erw {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

VariogramModel variogram_model_from_string(const std::string& s) {
    if (s == "spherical") return VariogramModel::spherical;
    if (s == "exponential") return VariogramModel::exponential;
    if (s == "gaussian") return VariogramModel::gaussian;
    throw std::invalid_argument("unknown variogram model: " + s);
}

const char* to_string(VariogramModel m) {
    switch (m) {
        case VariogramModel::spherical: return "spherical";
        case VariogramModel::exponential: return "exponential";
        case VariogramModel::gaussian: return "gaussian";
    }
    return "?";
}

void Variogram::validate() const {
    if (!(nugget >= 0.0)) throw std::invalid_argument("variogram: nugget must be >= 0");
    if (!(sill >= 0.0)) throw std::invalid_argument("variogram: sill must be >= 0");
    if (!(range > 0.0)) throw std::invalid_argument("variogram: range must be > 0");
    const double det = anisotropy[0] * anisotropy[3] - anisotropy[1] * anisotropy[2];
    if (!(std::fabs(det) > 1e-12))
        throw std::invalid_argument("variogram: anisotropy transform is singular");
}

double Variogram::operator()(double h) const {
    if (h <= 0.0) return 0.0;
    double g = 0.0;
    switch (model) {
        case VariogramModel::spherical: {
            if (h >= range) {
                g = 1.0;
            } else {
                const double r = h / range;
                g = 1.5 * r - 0.5 * r * r * r;
            }
            break;
        }
        case VariogramModel::exponential:
            g = 1.0 - std::exp(-3.0 * h / range);
            break;
        case VariogramModel::gaussian: {
            const double r = h / range;
            g = 1.0 - std::exp(-3.0 * r * r);
            break;
        }
    }
    return nugget + sill * g;
}

double Variogram::transformed_distance(const Point& a, const Point& b) const {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double tx = anisotropy[0] * dx + anisotropy[1] * dy;
    const double ty = anisotropy[2] * dx + anisotropy[3] * dy;
    return std::sqrt(tx * tx + ty * ty);
}

std::array<double, 4> make_anisotropy(double angle_deg, double ratio) {
    if (!(ratio > 0.0)) throw std::invalid_argument("anisotropy ratio must be > 0");
    const double a = angle_deg * kPi / 180.0;
    const double c = std::cos(a), s = std::sin(a);
    // rotate into the strike frame, then shrink correlation across strike
    return {c, s, -s / ratio, c / ratio};
}

Matrix covariance(std::span<const Point> points, const Variogram& v) {
    v.validate();
    if (points.empty()) throw std::invalid_argument("covariance: need at least one point");
    for (const Point& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("covariance: non-finite coordinate");

    const std::size_t n = points.size();
    const double top = v.nugget + v.sill;
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.at(i, i) = top;
        for (std::size_t j = 0; j < i; ++j) {
            const double val = top - v(v.transformed_distance(points[i], points[j]));
            c.at(i, j) = val;
            c.at(j, i) = val;
        }
    }
    add_to_diagonal(c, kCovarianceJitterRel * top);
    return c;
}

GaussianField::GaussianField(std::span<const Point> points, const FieldSpec& spec) {
    spec.variogram.validate();
    n_ = points.size();
    mean_ = spec.mean;
    if (spec.variogram.sill + spec.variogram.nugget == 0.0) {
        deterministic_ = true;
        return;
    }
    chol_ = covariance(points, spec.variogram);
    Matrix attempt = chol_;
    double jitter = kCovarianceJitterRel * (spec.variogram.nugget + spec.variogram.sill);
    for (int retry = 0;; ++retry) {
        if (try_cholesky_in_place(attempt)) {
            chol_ = std::move(attempt);
            escalations_ = retry;
            return;
        }
        if (retry >= kJitterRetries)
            throw std::runtime_error("gaussian field: covariance not factorizable after " +
                                     std::to_string(kJitterRetries) + " jitter escalations");
        jitter *= 10.0;
        std::cerr << "gaussian field: cholesky failed, escalating diagonal jitter to " << jitter
                  << "\n";
        attempt = chol_;
        add_to_diagonal(attempt, jitter);
    }
}

std::vector<double> GaussianField::draw_centered(RngStream& rng) const {
    if (deterministic_) return std::vector<double>(n_, 0.0);
    std::vector<double> z(n_);
    for (double& v : z) v = rng.normal();
    return lower_matvec(chol_, z);
}

std::vector<double> GaussianField::draw(RngStream& rng) const {
    std::vector<double> x = draw_centered(rng);
    for (double& v : x) v += mean_;
    return x;
}

std::vector<double> realize_field(std::span<const Point> points, const FieldSpec& spec,
                                  RngStream& rng) {
    return GaussianField(points, spec).draw(rng);
}

Matrix cross_correlation_matrix(std::size_t n_elem, double off_diagonal) {
    Matrix rho(n_elem);
    for (std::size_t i = 0; i < n_elem; ++i)
        for (std::size_t j = 0; j < n_elem; ++j) rho.at(i, j) = i == j ? 1.0 : off_diagonal;
    return rho;
}

std::vector<std::vector<double>> realize_cross_correlated(std::span<const Point> points,
                                                          std::span<const FieldSpec> specs,
                                                          const Matrix& rho, RngStream& rng) {
    const std::size_t k = specs.size();
    if (rho.n != k)
        throw std::invalid_argument("realize_cross_correlated: rho size must match element count");
    for (std::size_t i = 0; i < k; ++i) {
        if (std::fabs(rho.at(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("realize_cross_correlated: rho diagonal must be 1");
        for (std::size_t j = 0; j < i; ++j)
            if (std::fabs(rho.at(i, j) - rho.at(j, i)) > 1e-12)
                throw std::invalid_argument("realize_cross_correlated: rho must be symmetric");
    }
    Matrix mix = rho;
    // allow rho_12 = +-1 (rank deficient) with the same jitter policy
    add_to_diagonal(mix, 1e-12);
    if (!try_cholesky_in_place(mix))
        throw std::invalid_argument("realize_cross_correlated: rho is not positive semidefinite");

    std::vector<std::vector<double>> latents(k);
    for (std::size_t j = 0; j < k; ++j) {
        GaussianField f(points, FieldSpec{0.0, specs[j].variogram});
        latents[j] = f.draw_centered(rng);
    }

    std::vector<std::vector<double>> fields(k);
    for (std::size_t e = 0; e < k; ++e) {
        std::vector<double> v(points.size(), specs[e].mean);
        for (std::size_t j = 0; j <= e; ++j) {
            const double w = mix.at(e, j);
            if (w == 0.0) continue;
            for (std::size_t p = 0; p < v.size(); ++p) v[p] += w * latents[j][p];
        }
        fields[e] = std::move(v);
    }
    return fields;
}

} // namespace erw
