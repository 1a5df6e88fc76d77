#include "nertl/math.hpp"

#include <algorithm>

namespace nertl {

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void check_finite(std::span<const double> xs, const std::string& context) {
    for (double x : xs) {
        if (!std::isfinite(x)) throw NumericError(context + " produced a non-finite value");
    }
}

Vec affine(const Mat& w, const Vec& x, const Vec& b) {
    require(w.cols == x.size(), "affine: W.cols != x.len");
    require(w.rows == b.size(), "affine: W.rows != b.len");
    Vec y(w.rows);
    for (std::size_t i = 0; i < w.rows; ++i) {
        const double* wr = w.a.data() + i * w.cols;
        double acc = b[i];
        for (std::size_t j = 0; j < w.cols; ++j) acc += wr[j] * x[j];
        y[i] = acc;
    }
    check_finite(y.data(), "affine");
    return y;
}

Vec matvec(const Mat& w, const Vec& x) {
    require(w.cols == x.size(), "matvec: W.cols != x.len");
    Vec y(w.rows);
    for (std::size_t i = 0; i < w.rows; ++i) {
        const double* wr = w.a.data() + i * w.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < w.cols; ++j) acc += wr[j] * x[j];
        y[i] = acc;
    }
    check_finite(y.data(), "matvec");
    return y;
}

Vec matvec_transposed(const Mat& w, const Vec& x) {
    require(w.rows == x.size(), "matvec_transposed: W.rows != x.len");
    Vec y(w.cols);
    for (std::size_t i = 0; i < w.rows; ++i) {
        const double* wr = w.a.data() + i * w.cols;
        const double xi = x[i];
        for (std::size_t j = 0; j < w.cols; ++j) y[j] += wr[j] * xi;
    }
    check_finite(y.data(), "matvec_transposed");
    return y;
}

void add_outer(Mat& grad, const Vec& dy, const Vec& x) {
    require(grad.rows == dy.size() && grad.cols == x.size(), "add_outer: shape mismatch");
    for (std::size_t i = 0; i < grad.rows; ++i) {
        double* gr = grad.a.data() + i * grad.cols;
        const double di = dy[i];
        for (std::size_t j = 0; j < grad.cols; ++j) gr[j] += di * x[j];
    }
}

void add_scaled(Vec& dst, const Vec& src, double factor) {
    add_scaled(dst.data(), src.data(), factor);
}

void add_scaled(std::span<double> dst, std::span<const double> src, double factor) {
    require(dst.size() == src.size(), "add_scaled: length mismatch");
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += factor * src[i];
}

double log_sum_exp(std::span<const double> v) {
    require(!v.empty(), "log_sum_exp: empty input");
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) throw NumericError("log_sum_exp: non-finite input");
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - m);
    return m + std::log(acc);
}

double clip_global_norm(const std::vector<std::span<double>>& blocks, double max_norm) {
    require(max_norm > 0.0, "clip_global_norm: max_norm must be positive");
    double sumsq = 0.0;
    for (const auto& b : blocks) {
        for (double x : b) sumsq += x * x;
    }
    if (!std::isfinite(sumsq)) throw NumericError("clip_global_norm: norm overflow");
    const double norm = std::sqrt(sumsq);
    if (norm <= max_norm) return 1.0;
    const double factor = max_norm / norm;
    for (const auto& b : blocks) {
        for (double& x : b) x *= factor;
    }
    return factor;
}

void fill_uniform(std::span<double> xs, double r, SeededRng& rng) {
    for (double& x : xs) x = rng.uniform(-r, r);
}

}  // namespace nertl
