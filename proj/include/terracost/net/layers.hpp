#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "terracost/core/rng.hpp"
#include "terracost/net/tensor.hpp"

namespace terracost {

template <class Scalar>
using NamedTensors = std::vector<std::pair<std::string, Tensor<Scalar>*>>;

namespace detail {

template <class Scalar>
void init_he_uniform(Tensor<Scalar>& t, Eigen::Index fan_in, SplitMix64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        t.values[i] = static_cast<Scalar>(rng.uniform(-limit, limit));
    }
    t.quantize_f32();
}

}  // namespace detail

template <class Scalar>
class Conv2d {
public:
    Conv2d(int cin, int cout, int k, int stride)
        : weight({cout, cin, k, k}), bias({cout}), cin_(cin), cout_(cout), k_(k),
          stride_(stride), pad_((k - 1) / 2) {
        if (cin < 1 || cout < 1 || k < 1 || stride < 1) {
            throw InvalidArgError("conv dimensions must be positive");
        }
    }

    void init(SplitMix64& rng) {
        detail::init_he_uniform(weight, static_cast<Eigen::Index>(cin_) * k_ * k_, rng);
        bias.values.setZero();
    }

    int out_extent(int in) const { return (in + 2 * pad_ - k_) / stride_ + 1; }

    Act<Scalar> forward(const Act<Scalar>& x, bool training) {
        n_ = x.n;
        h_ = x.h;
        w_ = x.w;
        Mat<Scalar> cols = im2col(x);

        Act<Scalar> y;
        y.n = x.n;
        y.h = out_extent(x.h);
        y.w = out_extent(x.w);
        const auto wmat = weight_matrix();
        y.m.noalias() = wmat * cols;
        y.m.colwise() += bias.values;
        if (training) {
            cols_ = std::move(cols);
        } else {
            cols_.resize(0, 0);
        }
        return y;
    }

    Act<Scalar> backward(const Act<Scalar>& dy) {
        if (cols_.size() == 0) throw InvalidArgError("conv backward before training forward");
        auto dw = Eigen::Map<Mat<Scalar>>(weight.grad.data(), cout_,
                                          static_cast<Eigen::Index>(cin_) * k_ * k_);
        dw.noalias() += dy.m * cols_.transpose();
        bias.grad += dy.m.rowwise().sum();

        Mat<Scalar> dcols;
        dcols.noalias() = weight_matrix().transpose() * dy.m;
        return col2im(dcols, dy);
    }

    void collect(const std::string& prefix, NamedTensors<Scalar>& out, bool /*include_stats*/) {
        out.emplace_back(prefix + ".weight", &weight);
        out.emplace_back(prefix + ".bias", &bias);
    }

    Tensor<Scalar> weight;  // (cout, cin, k, k)
    Tensor<Scalar> bias;    // (cout)

private:
    Eigen::Map<const Mat<Scalar>> weight_matrix() const {
        return {weight.values.data(), cout_, static_cast<Eigen::Index>(cin_) * k_ * k_};
    }

    Mat<Scalar> im2col(const Act<Scalar>& x) const {
        const int ho = out_extent(x.h);
        const int wo = out_extent(x.w);
        Mat<Scalar> cols = Mat<Scalar>::Zero(static_cast<Eigen::Index>(cin_) * k_ * k_,
                                             static_cast<Eigen::Index>(x.n) * ho * wo);
        for (int n = 0; n < x.n; ++n) {
            for (int oi = 0; oi < ho; ++oi) {
                for (int oj = 0; oj < wo; ++oj) {
                    const Eigen::Index col = (static_cast<Eigen::Index>(n) * ho + oi) * wo + oj;
                    for (int ci = 0; ci < cin_; ++ci) {
                        for (int di = 0; di < k_; ++di) {
                            const int ii = oi * stride_ - pad_ + di;
                            if (ii < 0 || ii >= x.h) continue;
                            const Eigen::Index base =
                                (static_cast<Eigen::Index>(n) * x.h + ii) * x.w;
                            for (int dj = 0; dj < k_; ++dj) {
                                const int jj = oj * stride_ - pad_ + dj;
                                if (jj < 0 || jj >= x.w) continue;
                                cols((static_cast<Eigen::Index>(ci) * k_ + di) * k_ + dj, col) =
                                    x.m(ci, base + jj);
                            }
                        }
                    }
                }
            }
        }
        return cols;
    }

    Act<Scalar> col2im(const Mat<Scalar>& dcols, const Act<Scalar>& dy) const {
        Act<Scalar> dx;
        dx.n = n_;
        dx.h = h_;
        dx.w = w_;
        dx.m = Mat<Scalar>::Zero(cin_, static_cast<Eigen::Index>(n_) * h_ * w_);
        const int ho = dy.h;
        const int wo = dy.w;
        for (int n = 0; n < n_; ++n) {
            for (int oi = 0; oi < ho; ++oi) {
                for (int oj = 0; oj < wo; ++oj) {
                    const Eigen::Index col = (static_cast<Eigen::Index>(n) * ho + oi) * wo + oj;
                    for (int ci = 0; ci < cin_; ++ci) {
                        for (int di = 0; di < k_; ++di) {
                            const int ii = oi * stride_ - pad_ + di;
                            if (ii < 0 || ii >= h_) continue;
                            const Eigen::Index base = (static_cast<Eigen::Index>(n) * h_ + ii) * w_;
                            for (int dj = 0; dj < k_; ++dj) {
                                const int jj = oj * stride_ - pad_ + dj;
                                if (jj < 0 || jj >= w_) continue;
                                dx.m(ci, base + jj) +=
                                    dcols((static_cast<Eigen::Index>(ci) * k_ + di) * k_ + dj, col);
                            }
                        }
                    }
                }
            }
        }
        return dx;
    }

    int cin_, cout_, k_, stride_, pad_;
    int n_ = 0, h_ = 0, w_ = 0;
    Mat<Scalar> cols_;
};

template <class Scalar>
class BatchNorm {
public:
    explicit BatchNorm(int c)
        : gamma({c}), beta({c}), running_mean({c}), running_var({c}), c_(c) {
        gamma.values.setOnes();
        running_var.values.setOnes();
    }

    Act<Scalar> forward(const Act<Scalar>& x, bool training) {
        Act<Scalar> y;
        y.n = x.n;
        y.h = x.h;
        y.w = x.w;
        if (training) {
            const auto m = static_cast<Scalar>(x.m.cols());
            Vec<Scalar> mu = x.m.rowwise().mean();
            Mat<Scalar> centered = x.m.colwise() - mu;
            Vec<Scalar> var = centered.array().square().rowwise().sum().matrix() / m;
            inv_std_ = (var.array() + eps).rsqrt().matrix();
            xhat_ = (centered.array().colwise() * inv_std_.array()).matrix();
            y.m = ((xhat_.array().colwise() * gamma.values.array()).colwise() +
                   beta.values.array()).matrix();
            running_mean.values = momentum * running_mean.values + (Scalar(1) - momentum) * mu;
            running_var.values = momentum * running_var.values + (Scalar(1) - momentum) * var;
        } else {
            xhat_.resize(0, 0);
            const Vec<Scalar> scale =
                (gamma.values.array() * (running_var.values.array() + eps).rsqrt()).matrix();
            y.m = (((x.m.colwise() - running_mean.values).array().colwise() * scale.array())
                       .colwise() + beta.values.array()).matrix();
        }
        return y;
    }

    Act<Scalar> backward(const Act<Scalar>& dy) {
        if (xhat_.size() == 0) throw InvalidArgError("batchnorm backward before training forward");
        const auto m = static_cast<Scalar>(dy.m.cols());
        const Vec<Scalar> sum_dy = dy.m.rowwise().sum();
        const Vec<Scalar> sum_dy_xhat = dy.m.cwiseProduct(xhat_).rowwise().sum();

        gamma.grad += sum_dy_xhat;
        beta.grad += sum_dy;

        Act<Scalar> dx;
        dx.n = dy.n;
        dx.h = dy.h;
        dx.w = dy.w;
        Mat<Scalar> tmp = dy.m * m;
        tmp.colwise() -= sum_dy;
        tmp.array() -= xhat_.array().colwise() * sum_dy_xhat.array();
        dx.m = (tmp.array().colwise() *
                (gamma.values.array() * inv_std_.array() / m)).matrix();
        return dx;
    }

    void collect(const std::string& prefix, NamedTensors<Scalar>& out, bool include_stats) {
        out.emplace_back(prefix + ".gamma", &gamma);
        out.emplace_back(prefix + ".beta", &beta);
        if (include_stats) {
            out.emplace_back(prefix + ".running_mean", &running_mean);
            out.emplace_back(prefix + ".running_var", &running_var);
        }
    }

    Scalar momentum = Scalar(0.9);
    Scalar eps = Scalar(1e-5);
    Tensor<Scalar> gamma, beta;
    Tensor<Scalar> running_mean, running_var;

private:
    int c_;
    Mat<Scalar> xhat_;
    Vec<Scalar> inv_std_;
};

template <class Scalar>
class ReLU {
public:
    Act<Scalar> forward(const Act<Scalar>& x, bool training) {
        Act<Scalar> y;
        y.n = x.n;
        y.h = x.h;
        y.w = x.w;
        y.m = x.m.cwiseMax(Scalar(0));
        if (training) {
            mask_ = (x.m.array() > Scalar(0)).template cast<Scalar>().matrix();
        } else {
            mask_.resize(0, 0);
        }
        return y;
    }

    Act<Scalar> backward(const Act<Scalar>& dy) {
        if (mask_.size() == 0) throw InvalidArgError("relu backward before training forward");
        Act<Scalar> dx;
        dx.n = dy.n;
        dx.h = dy.h;
        dx.w = dy.w;
        dx.m = dy.m.cwiseProduct(mask_);
        return dx;
    }

private:
    Mat<Scalar> mask_;
};

/// Mean over each sample's spatial extent: (C, N*H*W) -> (C, N).
template <class Scalar>
class GlobalAvgPool {
public:
    Act<Scalar> forward(const Act<Scalar>& x, bool /*training*/) {
        h_ = x.h;
        w_ = x.w;
        const Eigen::Index hw = static_cast<Eigen::Index>(x.h) * x.w;
        Act<Scalar> y;
        y.n = x.n;
        y.h = 1;
        y.w = 1;
        y.m.resize(x.m.rows(), x.n);
        for (int n = 0; n < x.n; ++n) {
            y.m.col(n) = x.m.middleCols(n * hw, hw).rowwise().mean();
        }
        return y;
    }

    Act<Scalar> backward(const Act<Scalar>& dy) {
        const Eigen::Index hw = static_cast<Eigen::Index>(h_) * w_;
        Act<Scalar> dx;
        dx.n = dy.n;
        dx.h = h_;
        dx.w = w_;
        dx.m.resize(dy.m.rows(), dy.n * hw);
        for (int n = 0; n < dy.n; ++n) {
            dx.m.middleCols(n * hw, hw) = (dy.m.col(n) / static_cast<Scalar>(hw))
                                              .replicate(1, hw);
        }
        return dx;
    }

private:
    int h_ = 1, w_ = 1;
};

template <class Scalar>
class Dense {
public:
    Dense(int in, int out) : weight({out, in}), bias({out}), in_(in), out_(out) {
        if (in < 1 || out < 1) throw InvalidArgError("dense dimensions must be positive");
    }

    void init(SplitMix64& rng) {
        detail::init_he_uniform(weight, in_, rng);
        bias.values.setZero();
    }

    Act<Scalar> forward(const Act<Scalar>& x, bool training) {
        Act<Scalar> y;
        y.n = x.n;
        y.h = 1;
        y.w = 1;
        y.m.noalias() = weight_matrix() * x.m;
        y.m.colwise() += bias.values;
        if (training) {
            x_ = x.m;
        } else {
            x_.resize(0, 0);
        }
        return y;
    }

    Act<Scalar> backward(const Act<Scalar>& dy) {
        if (x_.size() == 0) throw InvalidArgError("dense backward before training forward");
        auto dw = Eigen::Map<Mat<Scalar>>(weight.grad.data(), out_, in_);
        dw.noalias() += dy.m * x_.transpose();
        bias.grad += dy.m.rowwise().sum();

        Act<Scalar> dx;
        dx.n = dy.n;
        dx.h = 1;
        dx.w = 1;
        dx.m.noalias() = weight_matrix().transpose() * dy.m;
        return dx;
    }

    void collect(const std::string& prefix, NamedTensors<Scalar>& out, bool /*include_stats*/) {
        out.emplace_back(prefix + ".weight", &weight);
        out.emplace_back(prefix + ".bias", &bias);
    }

    Tensor<Scalar> weight;  // (out, in)
    Tensor<Scalar> bias;    // (out)

private:
    Eigen::Map<const Mat<Scalar>> weight_matrix() const {
        return {weight.values.data(), out_, in_};
    }

    int in_, out_;
    Mat<Scalar> x_;
};

/// conv-bn-relu-conv-bn plus identity (or 1x1 conv-bn projection when the
/// shape changes), relu after the sum.
template <class Scalar>
class ResidualBlock {
public:
    ResidualBlock(int cin, int cout, int stride)
        : conv1_(cin, cout, 3, stride), bn1_(cout), conv2_(cout, cout, 3, 1), bn2_(cout) {
        if (stride != 1 || cin != cout) {
            proj_.emplace(cin, cout, 1, stride);
            proj_bn_.emplace(cout);
        }
    }

    void init(SplitMix64& rng) {
        conv1_.init(rng);
        conv2_.init(rng);
        if (proj_) proj_->init(rng);
    }

    Act<Scalar> forward(const Act<Scalar>& x, bool training) {
        Act<Scalar> main = relu1_.forward(bn1_.forward(conv1_.forward(x, training), training),
                                          training);
        main = bn2_.forward(conv2_.forward(main, training), training);
        Act<Scalar> skip =
            proj_ ? proj_bn_->forward(proj_->forward(x, training), training) : x;
        main.m += skip.m;
        return relu_out_.forward(main, training);
    }

    Act<Scalar> backward(const Act<Scalar>& dy) {
        Act<Scalar> d = relu_out_.backward(dy);
        Act<Scalar> dmain =
            conv1_.backward(bn1_.backward(relu1_.backward(conv2_.backward(bn2_.backward(d)))));
        Act<Scalar> dskip = proj_ ? proj_->backward(proj_bn_->backward(d)) : d;
        dmain.m += dskip.m;
        return dmain;
    }

    void collect(const std::string& prefix, NamedTensors<Scalar>& out, bool include_stats) {
        conv1_.collect(prefix + ".conv1", out, include_stats);
        bn1_.collect(prefix + ".bn1", out, include_stats);
        conv2_.collect(prefix + ".conv2", out, include_stats);
        bn2_.collect(prefix + ".bn2", out, include_stats);
        if (proj_) {
            proj_->collect(prefix + ".proj", out, include_stats);
            proj_bn_->collect(prefix + ".proj_bn", out, include_stats);
        }
    }

private:
    Conv2d<Scalar> conv1_;
    BatchNorm<Scalar> bn1_;
    Conv2d<Scalar> conv2_;
    BatchNorm<Scalar> bn2_;
    std::optional<Conv2d<Scalar>> proj_;
    std::optional<BatchNorm<Scalar>> proj_bn_;
    ReLU<Scalar> relu1_;
    ReLU<Scalar> relu_out_;
};

}  // namespace terracost
