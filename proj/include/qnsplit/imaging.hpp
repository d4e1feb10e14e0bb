#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "qnsplit/pdhg.hpp"
#include "qnsplit/pgm.hpp"

namespace qnsplit {

enum class ImageFamily { deconvolution, infconv, denoising };
std::string to_string(ImageFamily f);
ImageFamily parse_image_family(const std::string& s);

enum class Phantom { checkerboard, ramp, shapes };
std::string to_string(Phantom p);
Phantom parse_phantom(const std::string& s);

Image make_phantom(Phantom p, Eigen::Index rows, Eigen::Index cols);

/// Adds N(0, sigma^2) noise and clamps to [0, 255].
Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed);

/// Normalized size x size Gaussian; size must be odd.
Matrix gaussian_kernel(int size, double sigma);

/// Forward differences, interleaved (dx, dy) per pixel, zero difference
/// across the last row and column.
LinearOperatorPtr build_gradient_op(Eigen::Index rows, Eigen::Index cols);

/// Convolution with a nonnegative kernel summing to one, symmetric boundary.
LinearOperatorPtr build_blur_op(const Matrix& kernel, Eigen::Index rows, Eigen::Index cols);

/// Per dual entry weights 1/2 + 1/2 exp(-|grad b| / s), equal within each
/// pixel pair.
Vector edge_weights(const Image& b, double s = 10.0);

/// One of the TV-type image problems as a saddle problem with K = D.
struct ImageProblem {
    ImageFamily family = ImageFamily::deconvolution;
    Image b;
    LinearOperatorPtr a;  // blur or identity
    LinearOperatorPtr d;
    double mu = 0.0;
    Vector w;  // empty for deconvolution
    double tau = 0.0;
    double sigma = 0.0;
    SaddleProblem saddle;

    PdhgMetric metric() const { return build_pdhg_metric(tau, sigma, saddle.k); }
    /// (x, y) = (b, 0).
    Vector initial_point() const;
    bool has_dual() const { return family == ImageFamily::denoising; }
};

/// min_{0 <= x <= 255} 1/2 |Ax - b|^2 + mu |Dx|_{2,1}. An empty kernel
/// means A = I. Throws AssumptionViolation when tau sigma |D|^2 >= 1.
ImageProblem build_deconvolution(const Image& b, double mu, double tau, double sigma, const Matrix& kernel);

/// min_x 1/2 |Ax - b|^2 + (mu |.|_{2,1} inf-conv 1/2 |W .|^2)(Dx) through its
/// saddle form with F(y) = 1/2 |W^{-1} y|^2. Weights must lie in [1/2, 1].
ImageProblem build_infconv(const Image& b, double mu, const Vector& w, double tau, double sigma,
                           const Matrix& kernel);

/// build_infconv with A = I.
ImageProblem build_denoising(const Image& b, double mu, const Vector& w, double tau, double sigma);

/// Primal objective; +inf outside the box (deconvolution) beyond 1e-9.
double primal_value(const ImageProblem& p, const Vector& x);

/// 1/2|b|^2 - 1/2|D^T y - b|^2 - 1/2|W^{-1} y|^2 for denoising; -inf when
/// |y|_{2,inf} > mu beyond 1e-9. Throws ParameterError for other families.
double dual_value(const ImageProblem& p, const Vector& y);

struct GapReport {
    double primal = 0.0;
    double dual = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();     // primal - reference
    double pd_gap = std::numeric_limits<double>::quiet_NaN();  // primal - dual
};

GapReport pd_gap(const ImageProblem& p, const Vector& x, const Vector& y,
                 std::optional<double> reference = std::nullopt);

}  // namespace qnsplit
