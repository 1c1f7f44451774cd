#pragma once

#include "vortexstab/types.hpp"

#include <cmath>
#include <numeric>

namespace vortexstab {

/// Vortex strengths with the derived totals
///   Gamma = sum_j G_j   (total vorticity)
///   L     = sum_{j<k} G_j G_k   (total vortex angular momentum)
/// Every strength must be nonzero; Gamma^2 = 2L + sum G_j^2 holds by algebra.
class Vorticities {
public:
    explicit Vorticities(std::vector<double> gamma) : gamma_(std::move(gamma)) {
        if (gamma_.empty())
            throw ConfigError("vorticities: empty strength list");
        for (double g : gamma_)
            if (g == 0.0 || !std::isfinite(g))
                throw ConfigError("vorticities: every strength must be finite and nonzero");
        total_ = std::accumulate(gamma_.begin(), gamma_.end(), 0.0);
        sum_sq_ = 0.0;
        for (double g : gamma_) sum_sq_ += g * g;
        momentum_ = 0.5 * (total_ * total_ - sum_sq_);
    }

    int count() const { return static_cast<int>(gamma_.size()); }
    const std::vector<double>& gamma() const { return gamma_; }
    double gamma(int j) const { return gamma_[static_cast<std::size_t>(j)]; }

    double total() const { return total_; }         ///< Gamma
    double momentum() const { return momentum_; }   ///< L
    double sum_of_squares() const { return sum_sq_; }

    VecX mgamma() const { return mgamma_diag(gamma_); }
    VecX mgamma_inverse() const {
        VecX d = mgamma();
        return d.cwiseInverse();
    }

private:
    std::vector<double> gamma_;
    double total_ = 0.0;
    double momentum_ = 0.0;
    double sum_sq_ = 0.0;
};

/// (Gamma, L) for a strength list; rejects zero entries.
inline std::pair<double, double> totals(const std::vector<double>& gamma) {
    Vorticities v(gamma);
    return {v.total(), v.momentum()};
}

}  // namespace vortexstab
