#include <doctest.h>

#include <cmath>

#include "nertl/math.hpp"

using namespace nertl;

TEST_SUITE_BEGIN("math");

TEST_CASE("affine identity and zero cases") {
    const Mat eye = Mat::identity(2);
    const Vec x{3.0, 4.0};
    CHECK(affine(eye, x, Vec{0.0, 0.0}) == Vec{3.0, 4.0});

    const Mat zeros(2, 2);
    CHECK(affine(zeros, x, Vec{1.0, -1.0}) == Vec{1.0, -1.0});
}

TEST_CASE("affine hand product") {
    Mat w(2, 2);
    w(0, 0) = 1;
    w(0, 1) = 2;
    w(1, 0) = 3;
    w(1, 1) = 4;
    CHECK(affine(w, Vec{1.0, 1.0}, Vec{0.0, 0.0}) == Vec{3.0, 7.0});
}

TEST_CASE("affine shape mismatch throws") {
    CHECK_THROWS_AS(affine(Mat(2, 3), Vec{1.0, 2.0}, Vec{0.0, 0.0}), ContractError);
    CHECK_THROWS_AS(affine(Mat(2, 2), Vec{1.0, 2.0}, Vec{0.0}), ContractError);
}

TEST_CASE("affine reports numeric overflow") {
    Mat w(1, 1);
    w(0, 0) = 1e308;
    CHECK_THROWS_AS(affine(w, Vec{1e308}, Vec{0.0}), NumericError);
}

TEST_CASE("affine is linear") {
    SeededRng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        Mat w(3, 4);
        fill_uniform(w.data(), 2.0, rng);
        Vec x(4), y(4);
        fill_uniform(x.data(), 2.0, rng);
        fill_uniform(y.data(), 2.0, rng);
        const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
        Vec combo(4);
        for (std::size_t i = 0; i < 4; ++i) combo[i] = a * x[i] + b * y[i];
        const Vec zero(3);
        const Vec lhs = affine(w, combo, zero);
        const Vec wx = affine(w, x, zero), wy = affine(w, y, zero);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(lhs[i] == doctest::Approx(a * wx[i] + b * wy[i]).epsilon(1e-12));
    }
}

TEST_CASE("log_sum_exp basics") {
    CHECK(log_sum_exp(Vec{0.0, 0.0}.data()) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(log_sum_exp(Vec{1000.0, 1000.0}.data()) ==
          doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-12));

    // Independent evaluation via the shifted closed form.
    const double expected = 3.0 + std::log(std::exp(-2.0) + std::exp(-1.0) + 1.0);
    CHECK(log_sum_exp(Vec{1.0, 2.0, 3.0}.data()) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(log_sum_exp(Vec{1.0, 2.0, 3.0}.data()) == doctest::Approx(3.40760596444438).epsilon(1e-10));

    CHECK_THROWS_AS(log_sum_exp(std::span<const double>{}), ContractError);
}

TEST_CASE("log_sum_exp shift invariance") {
    SeededRng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Vec v(5);
        fill_uniform(v.data(), 10.0, rng);
        const double c = rng.uniform(-100.0, 100.0);
        Vec shifted = v;
        for (double& x : shifted.a) x += c;
        CHECK(log_sum_exp(shifted.data()) ==
              doctest::Approx(log_sum_exp(v.data()) + c).epsilon(1e-12));
    }
}

TEST_CASE("clip_global_norm") {
    Vec a{3.0, 4.0};
    CHECK(clip_global_norm({a.data()}, 5.0) == 1.0);
    CHECK(a == Vec{3.0, 4.0});

    Vec b{6.0, 8.0};
    CHECK(clip_global_norm({b.data()}, 5.0) == doctest::Approx(0.5));
    CHECK(b[0] == doctest::Approx(3.0));
    CHECK(b[1] == doctest::Approx(4.0));

    // Joint norm over two blocks: (3,0) and (0,4) have joint norm 5.
    Vec c{3.0, 0.0}, d{0.0, 4.0};
    CHECK(clip_global_norm({c.data(), d.data()}, 2.5) == doctest::Approx(0.5));
    CHECK(c[0] == doctest::Approx(1.5));
    CHECK(d[1] == doctest::Approx(2.0));
}

TEST_CASE("clip_global_norm is idempotent") {
    SeededRng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Vec a(4), b(3);
        fill_uniform(a.data(), 10.0, rng);
        fill_uniform(b.data(), 10.0, rng);
        clip_global_norm({a.data(), b.data()}, 2.0);
        Vec a2 = a, b2 = b;
        clip_global_norm({a2.data(), b2.data()}, 2.0);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a2[i] == doctest::Approx(a[i]).epsilon(1e-12));
        for (std::size_t i = 0; i < b.size(); ++i) CHECK(b2[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}

TEST_CASE("activations") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(std::tanh(0.0) == 0.0);
    CHECK(sigmoid(2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
    CHECK(sigmoid(2.0) == doctest::Approx(0.88079707797788).epsilon(1e-10));

    // Derivative identities at a few points.
    for (double x : {-2.0, -0.5, 0.0, 0.7, 3.0}) {
        const double s = sigmoid(x);
        CHECK(sigmoid_deriv_from_output(s) == doctest::Approx(s * (1 - s)).epsilon(1e-15));
        const double t = std::tanh(x);
        CHECK(tanh_deriv_from_output(t) == doctest::Approx(1 - t * t).epsilon(1e-15));
    }
}

TEST_SUITE_END();
