#include "qnsplit/imaging.hpp"

#include <cmath>
#include <random>

#include "qnsplit/prox.hpp"

namespace qnsplit {

std::string to_string(ImageFamily f) {
    switch (f) {
        case ImageFamily::infconv: return "infconv";
        case ImageFamily::denoising: return "denoising";
        default: return "deconvolution";
    }
}

ImageFamily parse_image_family(const std::string& s) {
    for (auto f : {ImageFamily::deconvolution, ImageFamily::infconv, ImageFamily::denoising})
        if (to_string(f) == s) return f;
    throw ParameterError("unknown problem family '" + s + "'");
}

std::string to_string(Phantom p) {
    switch (p) {
        case Phantom::ramp: return "ramp";
        case Phantom::shapes: return "shapes";
        default: return "checkerboard";
    }
}

Phantom parse_phantom(const std::string& s) {
    for (auto p : {Phantom::checkerboard, Phantom::ramp, Phantom::shapes})
        if (to_string(p) == s) return p;
    throw ParameterError("unknown phantom '" + s + "'");
}

Image make_phantom(Phantom p, Eigen::Index rows, Eigen::Index cols) {
    if (rows < 1 || cols < 1) throw ParameterError("phantom size must be positive");
    Image img{rows, cols, Vector(rows * cols)};
    const double rr = static_cast<double>(rows), cc = static_cast<double>(cols);
    const Eigen::Index cell = std::max<Eigen::Index>(1, std::min(rows, cols) / 8);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            double v = 0.0;
            switch (p) {
                case Phantom::checkerboard: v = ((r / cell + c / cell) % 2 == 0) ? 64.0 : 192.0; break;
                case Phantom::ramp: v = 255.0 * (r + c) / std::max(1.0, rr + cc - 2.0); break;
                case Phantom::shapes: {
                    v = 40.0;
                    const double y = (r + 0.5) / rr, x = (c + 0.5) / cc;
                    if (x > 0.15 && x < 0.55 && y > 0.2 && y < 0.6) v = 200.0;
                    if (std::hypot(x - 0.65, y - 0.65) < 0.22) v = 120.0;
                    if (x > 0.1 && x < 0.4 && y > 0.7 && y < 0.9 && (y - 0.7) > (x - 0.1) * 0.5) v = 235.0;
                    break;
                }
            }
            img.pixels[r * cols + c] = v;
        }
    }
    return img;
}

Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw ParameterError("noise level must be nonnegative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Image out = img;
    for (Eigen::Index i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = std::clamp(out.pixels[i] + sigma * n(rng), 0.0, 255.0);
    return out;
}

Matrix gaussian_kernel(int size, double sigma) {
    if (size < 1 || size % 2 == 0) throw ParameterError("kernel size must be odd and positive");
    if (!(sigma > 0.0)) throw ParameterError("kernel width must be positive");
    Matrix k(size, size);
    const int h = size / 2;
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            k(i, j) = std::exp(-((i - h) * (i - h) + (j - h) * (j - h)) / (2.0 * sigma * sigma));
    return k / k.sum();
}

LinearOperatorPtr build_gradient_op(Eigen::Index rows, Eigen::Index cols) {
    return make_forward_difference_2d(rows, cols);
}

LinearOperatorPtr build_blur_op(const Matrix& kernel, Eigen::Index rows, Eigen::Index cols) {
    if (kernel.size() == 0) throw ParameterError("blur kernel is empty");
    if (kernel.minCoeff() < 0.0) throw ParameterError("blur kernel must be nonnegative");
    if (std::abs(kernel.sum() - 1.0) > 1e-12) throw ParameterError("blur kernel must sum to one");
    return make_convolution_2d(kernel, rows, cols, Boundary::symmetric);
}

Vector edge_weights(const Image& b, double s) {
    if (!(s > 0.0)) throw ParameterError("edge weight scale must be positive");
    const Vector g = build_gradient_op(b.rows, b.cols)->apply(b.pixels);
    Vector w(g.size());
    for (Eigen::Index i = 0; i < g.size() / 2; ++i) {
        const double mag = std::hypot(g[2 * i], g[2 * i + 1]);
        w[2 * i] = w[2 * i + 1] = 0.5 + 0.5 * std::exp(-mag / s);
    }
    return w;
}

Vector ImageProblem::initial_point() const { return join(b.pixels, Vector::Zero(d->out_dim())); }

namespace {

void check_image(const Image& b) {
    if (b.rows < 1 || b.cols < 1) throw ParameterError("image must be nonempty");
    require_dim(b.pixels, b.rows * b.cols, "image pixels");
    if (!all_finite(b.pixels) || b.pixels.minCoeff() < 0.0 || b.pixels.maxCoeff() > 255.0)
        throw ParameterError("image values must lie in [0, 255]");
}

void check_common(double mu, double tau, double sigma) {
    if (!(mu > 0.0)) throw ParameterError("mu must be positive");
    if (!(tau > 0.0) || !(sigma > 0.0)) throw ParameterError("steps must be positive");
}

LinearOperatorPtr data_operator(const Matrix& kernel, const Image& b) {
    if (kernel.size() == 0) return make_identity(b.rows * b.cols);
    return build_blur_op(kernel, b.rows, b.cols);
}

CocoerciveMap data_gradient(const LinearOperatorPtr& a, const Vector& b, bool identity) {
    CocoerciveMap g = make_quadratic_gradient(a, b);
    if (identity) g.gamma_b = 1.0;
    return g;
}

}  // namespace

ImageProblem build_deconvolution(const Image& b, double mu, double tau, double sigma, const Matrix& kernel) {
    check_image(b);
    check_common(mu, tau, sigma);
    ImageProblem p;
    p.family = ImageFamily::deconvolution;
    p.b = b;
    p.a = data_operator(kernel, b);
    p.d = build_gradient_op(b.rows, b.cols);
    p.mu = mu;
    p.tau = tau;
    p.sigma = sigma;
    p.saddle = SaddleProblem{p.d, make_box_normal_cone(0.0, 255.0), make_pairwise_ball_normal_cone(mu),
                             data_gradient(p.a, b.pixels, kernel.size() == 0), make_zero_map()};
    p.saddle.validate();
    p.metric();  // rejects tau sigma |D|^2 >= 1
    return p;
}

ImageProblem build_infconv(const Image& b, double mu, const Vector& w, double tau, double sigma,
                           const Matrix& kernel) {
    check_image(b);
    check_common(mu, tau, sigma);
    require_dim(w, 2 * b.rows * b.cols, "weights");
    if (!all_finite(w) || w.minCoeff() < 0.5 || w.maxCoeff() > 1.0)
        throw ParameterError("weights must lie in [1/2, 1]");
    for (Eigen::Index i = 0; i < w.size(); i += 2)
        if (w[i] != w[i + 1]) throw ParameterError("weights must agree within each pixel pair");
    ImageProblem p;
    p.family = ImageFamily::infconv;
    p.b = b;
    p.a = data_operator(kernel, b);
    p.d = build_gradient_op(b.rows, b.cols);
    p.mu = mu;
    p.w = w;
    p.tau = tau;
    p.sigma = sigma;
    const Vector inv_w2 = w.array().square().inverse().matrix();
    CocoerciveMap grad_f{[inv_w2](const Vector& y) { return Vector(inv_w2.cwiseProduct(y)); }, 0.25, 1.0};
    p.saddle = SaddleProblem{p.d, make_zero_operator(), make_pairwise_ball_normal_cone(mu),
                             data_gradient(p.a, b.pixels, kernel.size() == 0), std::move(grad_f)};
    p.saddle.validate();
    p.metric();  // rejects tau sigma |D|^2 >= 1
    return p;
}

ImageProblem build_denoising(const Image& b, double mu, const Vector& w, double tau, double sigma) {
    ImageProblem p = build_infconv(b, mu, w, tau, sigma, Matrix());
    p.family = ImageFamily::denoising;
    return p;
}

double primal_value(const ImageProblem& p, const Vector& x) {
    require_dim(x, p.b.pixels.size(), "primal point");
    if (p.family == ImageFamily::deconvolution && (x.minCoeff() < -1e-9 || x.maxCoeff() > 255.0 + 1e-9))
        return std::numeric_limits<double>::infinity();
    const double data = 0.5 * (p.a->apply(x) - p.b.pixels).squaredNorm();
    const Vector q = p.d->apply(x);
    if (p.family == ImageFamily::deconvolution) return data + p.mu * norm_l21(q);
    double reg = 0.0;
    for (Eigen::Index i = 0; i < q.size(); i += 2) {
        const double n = std::hypot(q[i], q[i + 1]);
        const double w2 = p.w[i] * p.w[i];
        reg += w2 * n <= p.mu ? 0.5 * w2 * n * n : p.mu * n - p.mu * p.mu / (2.0 * w2);
    }
    return data + reg;
}

double dual_value(const ImageProblem& p, const Vector& y) {
    if (!p.has_dual()) throw ParameterError("dual objective is only available for denoising");
    require_dim(y, p.d->out_dim(), "dual point");
    if (norm_l2_inf(y) > p.mu * (1.0 + 1e-9)) return -std::numeric_limits<double>::infinity();
    // 1/2|b|^2 - 1/2|D^T y - b|^2 without the cancellation of the two large terms
    const Vector dty = p.d->adjoint(y);
    return dty.dot(p.b.pixels) - 0.5 * dty.squaredNorm() - 0.5 * y.cwiseQuotient(p.w).squaredNorm();
}

GapReport pd_gap(const ImageProblem& p, const Vector& x, const Vector& y, std::optional<double> reference) {
    GapReport r;
    r.primal = primal_value(p, x);
    if (p.has_dual()) {
        r.dual = dual_value(p, y);
        r.pd_gap = r.primal - r.dual;
    }
    if (reference) r.gap = r.primal - *reference;
    return r;
}

}  // namespace qnsplit
