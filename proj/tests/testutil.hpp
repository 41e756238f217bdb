#pragma once

// Shared test helpers: independent brute-force oracles and a central
// finite-difference gradient checker. These deliberately use the slow,
// obviously-correct formulation so they stay independent of the optimized
// kernels they check.

#include <cmath>
#include <random>

#include "slnet/tensor.hpp"

namespace testutil {

template <typename T>
slnet::Tensor<T> random_tensor(slnet::Shape shape, std::mt19937_64& rng, T lo = T(-1), T hi = T(1)) {
    std::uniform_real_distribution<double> dist(static_cast<double>(lo), static_cast<double>(hi));
    slnet::Tensor<T> t(std::move(shape));
    for (T& v : t.values()) v = static_cast<T>(dist(rng));
    return t;
}

// Naive valid cross-correlation: y[n,i,j,f] = b[f] + sum x[n,i+u,j+v,c] w[u,v,c,f].
template <typename T>
slnet::Tensor<T> conv2d_oracle(const slnet::Tensor<T>& x, const slnet::Tensor<T>& w,
                               const slnet::Tensor<T>& b, bool relu) {
    const int64_t n = x.shape()[0], h = x.shape()[1], ww = x.shape()[2], cin = x.shape()[3];
    const int64_t k = w.shape()[0], f = w.shape()[3];
    const int64_t oh = h - k + 1, ow = ww - k + 1;
    slnet::Tensor<T> y(slnet::Shape{n, oh, ow, f});
    for (int64_t bi = 0; bi < n; ++bi)
        for (int64_t i = 0; i < oh; ++i)
            for (int64_t j = 0; j < ow; ++j)
                for (int64_t q = 0; q < f; ++q) {
                    T acc = b[q];
                    for (int64_t u = 0; u < k; ++u)
                        for (int64_t v = 0; v < k; ++v)
                            for (int64_t c = 0; c < cin; ++c)
                                acc += x.at(bi, i + u, j + v, c) * w.at(u, v, c, q);
                    y.at(bi, i, j, q) = relu ? std::max(acc, T(0)) : acc;
                }
    return y;
}

// Naive 2x2/stride-2 max pooling with floor semantics.
template <typename T>
slnet::Tensor<T> maxpool_oracle(const slnet::Tensor<T>& x) {
    const int64_t n = x.shape()[0], h = x.shape()[1], w = x.shape()[2], c = x.shape()[3];
    const int64_t oh = h / 2, ow = w / 2;
    slnet::Tensor<T> y(slnet::Shape{n, oh, ow, c});
    for (int64_t b = 0; b < n; ++b)
        for (int64_t i = 0; i < oh; ++i)
            for (int64_t j = 0; j < ow; ++j)
                for (int64_t q = 0; q < c; ++q) {
                    T best = x.at(b, 2 * i, 2 * j, q);
                    for (int64_t u = 0; u < 2; ++u)
                        for (int64_t v = 0; v < 2; ++v)
                            best = std::max(best, x.at(b, 2 * i + u, 2 * j + v, q));
                    y.at(b, i, j, q) = best;
                }
    return y;
}

// Central finite difference of a scalar functional w.r.t. one entry.
template <typename LossFn>
double numeric_grad(LossFn&& loss, double& x, double eps = 1e-5) {
    const double x0 = x;
    const double h = eps * std::max(1.0, std::abs(x0));
    x = x0 + h;
    const double lp = loss();
    x = x0 - h;
    const double lm = loss();
    x = x0;
    return (lp - lm) / (2 * h);
}

inline double rel_err(double analytic, double numeric) {
    const double denom = std::max(std::abs(analytic), std::abs(numeric));
    if (denom < 1e-7) return 0.0;  // both effectively zero vs FD noise
    return std::abs(analytic - numeric) / denom;
}

// Checks every entry of `param` against finite differences of `loss`;
// `analytic` must hold the already-computed gradient. Returns the max
// relative error.
template <typename LossFn>
double check_grad(LossFn&& loss, slnet::Tensor<double>& param, const slnet::Tensor<double>& analytic) {
    double worst = 0;
    for (int64_t i = 0; i < param.size(); ++i) {
        const double num = numeric_grad(loss, param.data()[i]);
        worst = std::max(worst, rel_err(analytic[i], num));
    }
    return worst;
}

inline double max_abs_diff(const slnet::Tensor<float>& a, const slnet::Tensor<float>& b) {
    double worst = 0;
    for (int64_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
    }
    return worst;
}

template <typename T>
double max_rel_diff(const slnet::Tensor<T>& a, const slnet::Tensor<T>& b) {
    double worst = 0;
    for (int64_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, rel_err(static_cast<double>(a[i]), static_cast<double>(b[i])));
    }
    return worst;
}

} // namespace testutil
