#include "subdiag/determinant.hpp"

#include <cmath>
#include <limits>

#include "subdiag/spectral.hpp"

namespace subdiag {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

DetResult fk_det(const CMatrix& x) {
    require_square(x, "fk_det");
    require_finite(x, "fk_det");
    const RVector s = singular_values(x);
    const Eigen::Index n = s.size();
    const double cutoff = rank_cutoff(s, n);
    if (s(0) <= cutoff) return DetResult{0.0, kNegInf, DetMethod::ExactLogTrace};
    double log_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_sum += std::log(s(i));
    const double log_value = log_sum / static_cast<double>(n);
    return DetResult{std::exp(log_value), log_value, DetMethod::ExactLogTrace};
}

DetResult det_root(const CMatrix& x) {
    require_square(x, "det_root");
    require_finite(x, "det_root");
    const double ad = std::abs(x.determinant());
    if (ad == 0.0) return DetResult{0.0, kNegInf, DetMethod::DetRoot};
    const double log_value = std::log(ad) / static_cast<double>(x.rows());
    return DetResult{std::exp(log_value), log_value, DetMethod::DetRoot};
}

DetResult fk_det_regularized(const CMatrix& x, double eps) {
    require_square(x, "fk_det_regularized");
    require_finite(x, "fk_det_regularized");
    if (!(eps > 0.0)) throw std::invalid_argument("fk_det_regularized: eps must be positive");
    const RVector s = singular_values(x);
    double log_sum = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) log_sum += std::log(s(i) + eps);
    const double log_value = log_sum / static_cast<double>(s.size());
    return DetResult{std::exp(log_value), log_value, DetMethod::Regularized};
}

}  // namespace subdiag
