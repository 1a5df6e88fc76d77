#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "nertl/error.hpp"
#include "nertl/rng.hpp"

namespace nertl {

// Dense 64-bit float vector. Storage is public; shape checks live in the
// free functions that combine vectors and matrices.
struct Vec {
    std::vector<double> a;

    Vec() = default;
    explicit Vec(std::size_t n, double fill = 0.0) : a(n, fill) {}
    Vec(std::initializer_list<double> xs) : a(xs) {}

    std::size_t size() const { return a.size(); }
    double& operator[](std::size_t i) { return a[i]; }
    double operator[](std::size_t i) const { return a[i]; }
    std::span<double> data() { return a; }
    std::span<const double> data() const { return a; }

    bool operator==(const Vec&) const = default;
};

// Row-major dense matrix with explicit shape.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    std::span<double> row(std::size_t i) { return {a.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {a.data() + i * cols, cols}; }
    std::span<double> data() { return a; }
    std::span<const double> data() const { return a; }

    static Mat identity(std::size_t n);

    bool operator==(const Mat&) const = default;
};

// Throws NumericError if any entry is non-finite.
void check_finite(std::span<const double> xs, const std::string& context);

// W·x + b. Shapes checked; result checked finite.
Vec affine(const Mat& w, const Vec& x, const Vec& b);

// W·x (no bias).
Vec matvec(const Mat& w, const Vec& x);

// Wᵀ·x, i.e. the backward map of matvec.
Vec matvec_transposed(const Mat& w, const Vec& x);

// grad += dy ⊗ x  (outer product accumulate, dy is rows, x is cols).
void add_outer(Mat& grad, const Vec& dy, const Vec& x);

void add_scaled(Vec& dst, const Vec& src, double factor);
void add_scaled(std::span<double> dst, std::span<const double> src, double factor);

// log Σ exp(vᵢ) with max subtraction; never overflows for |vᵢ| ≤ 1e300.
double log_sum_exp(std::span<const double> v);

// Joint L2 norm over all blocks; if it exceeds max_norm, every entry is
// scaled by max_norm / norm. Returns the factor applied (1.0 if no clip).
double clip_global_norm(const std::vector<std::span<double>>& blocks, double max_norm);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
// Derivatives expressed in terms of the activation output.
inline double sigmoid_deriv_from_output(double y) { return y * (1.0 - y); }
inline double tanh_deriv_from_output(double y) { return 1.0 - y * y; }

// Fill with uniform(-r, r) draws, in storage order.
void fill_uniform(std::span<double> xs, double r, SeededRng& rng);

}  // namespace nertl
