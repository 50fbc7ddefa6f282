#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "terracost/net/loss.hpp"
#include "terracost/net/model.hpp"
#include "terracost/patch/dataset.hpp"

namespace terracost {

enum class OptimizerKind { Adam, Sgd };

struct TrainConfig {
    int epochs = 30;
    int batch_size = 32;
    double lr = 1e-4;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double momentum = 0.9;  // SGD only
    std::uint64_t seed = 0;
    bool verbose = false;
};

/// Mean per-sample losses; test_loss is NaN when the test split is empty.
struct EpochStats {
    double train_loss = 0.0;
    double test_loss = 0.0;
};

template <class Scalar>
struct TrainResult {
    Model<Scalar> model;
    std::vector<EpochStats> history;
};

template <class Scalar>
class Optimizer {
public:
    Optimizer(std::vector<Tensor<Scalar>*> params, const TrainConfig& cfg)
        : params_(std::move(params)), cfg_(cfg) {
        for (const Tensor<Scalar>* p : params_) {
            m_.push_back(Vec<Scalar>::Zero(p->size()));
            if (cfg_.optimizer == OptimizerKind::Adam) v_.push_back(Vec<Scalar>::Zero(p->size()));
        }
    }

    void step() {
        ++t_;
        const auto lr = static_cast<Scalar>(cfg_.lr);
        if (cfg_.optimizer == OptimizerKind::Adam) {
            const auto b1 = static_cast<Scalar>(cfg_.beta1);
            const auto b2 = static_cast<Scalar>(cfg_.beta2);
            const auto eps = static_cast<Scalar>(cfg_.adam_eps);
            const Scalar c1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(t_));
            const Scalar c2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(t_));
            for (std::size_t i = 0; i < params_.size(); ++i) {
                Tensor<Scalar>& p = *params_[i];
                m_[i] = b1 * m_[i] + (Scalar(1) - b1) * p.grad;
                v_[i] = b2 * v_[i] + (Scalar(1) - b2) * p.grad.cwiseProduct(p.grad);
                p.values.array() -=
                    lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps);
            }
        } else {
            const auto mu = static_cast<Scalar>(cfg_.momentum);
            for (std::size_t i = 0; i < params_.size(); ++i) {
                Tensor<Scalar>& p = *params_[i];
                m_[i] = mu * m_[i] + p.grad;
                p.values -= lr * m_[i];
            }
        }
    }

private:
    std::vector<Tensor<Scalar>*> params_;
    TrainConfig cfg_;
    std::vector<Vec<Scalar>> m_;
    std::vector<Vec<Scalar>> v_;
    long long t_ = 0;
};

namespace detail {

template <class Scalar>
double split_loss(Model<Scalar>& model, const Dataset& ds, const std::vector<int>& idx,
                  int batch_size) {
    if (idx.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (std::size_t at = 0; at < idx.size(); at += batch_size) {
        const std::size_t n = std::min<std::size_t>(batch_size, idx.size() - at);
        std::vector<const Patch*> patches(n);
        Mat<Scalar> truths(2, n);
        for (std::size_t i = 0; i < n; ++i) {
            const Sample& s = ds.samples[idx[at + i]];
            patches[i] = &s.patch;
            truths(0, i) = static_cast<Scalar>(s.w_star);
            truths(1, i) = static_cast<Scalar>(s.v_star);
        }
        const Mat<Scalar> x = pack_patches<Scalar>(patches, model.spec.input_channels);
        const Mat<Scalar> preds = model.forward_physical(x, static_cast<int>(n), false);
        sum += static_cast<double>(nrmse_loss<Scalar>(preds, truths,
                                                      static_cast<Scalar>(model.max_w),
                                                      static_cast<Scalar>(model.max_v)));
    }
    return sum / static_cast<double>(idx.size());
}

}  // namespace detail

/// Seeded end-to-end fit on the Train split: shuffled mini-batches, the
/// normalized-error loss, Adam or momentum SGD, weights re-quantized to the
/// f32 grid after every step. Single-threaded and bit-reproducible.
template <class Scalar>
TrainResult<Scalar> train(const Dataset& ds, const ModelSpec& spec, const TrainConfig& cfg) {
    spec.validate();
    if (cfg.epochs < 1) throw InvalidArgError("epochs must be >= 1");
    if (cfg.batch_size < 1) throw InvalidArgError("batch_size must be >= 1");
    if (!(cfg.lr >= 0.0)) throw InvalidArgError("learning rate must be non-negative");
    if (spec.input_side != ds.s) {
        throw ShapeMismatchError("spec input side " + std::to_string(spec.input_side) +
                                 " does not match dataset patches " + std::to_string(ds.s));
    }

    std::vector<int> train_idx = ds.indices_of(SplitTag::Train);
    const std::vector<int> test_idx = ds.indices_of(SplitTag::Test);
    if (train_idx.empty()) throw EmptyDatasetError("train split is empty");

    TrainResult<Scalar> result{Model<Scalar>(spec, ds.max_w, ds.max_v), {}};
    Model<Scalar>& model = result.model;
    model.init_weights(derive_seed(cfg.seed, 0x69'6E'69'74ULL));

    std::vector<Tensor<Scalar>*> params;
    for (auto& [name, t] : model.named_tensors(false)) params.push_back(t);
    Optimizer<Scalar> opt(params, cfg);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        SplitMix64 shuffle_rng(derive_seed(cfg.seed, 0x73'68'75'66ULL, epoch));
        shuffle_rng.shuffle(train_idx);

        double loss_sum = 0.0;
        for (std::size_t at = 0; at < train_idx.size(); at += cfg.batch_size) {
            const std::size_t n = std::min<std::size_t>(cfg.batch_size, train_idx.size() - at);
            std::vector<const Patch*> patches(n);
            Mat<Scalar> truths(2, n);
            for (std::size_t i = 0; i < n; ++i) {
                const Sample& s = ds.samples[train_idx[at + i]];
                patches[i] = &s.patch;
                truths(0, i) = static_cast<Scalar>(s.w_star);
                truths(1, i) = static_cast<Scalar>(s.v_star);
            }

            const Mat<Scalar> x = pack_patches<Scalar>(patches, spec.input_channels);
            Mat<Scalar> preds = model.forward(x, static_cast<int>(n), true);
            preds.row(0) *= static_cast<Scalar>(model.max_w);
            preds.row(1) *= static_cast<Scalar>(model.max_v);

            LossGrad<Scalar> lg = nrmse_loss_grad<Scalar>(preds, truths,
                                                          static_cast<Scalar>(model.max_w),
                                                          static_cast<Scalar>(model.max_v));
            if (!std::isfinite(static_cast<double>(lg.loss))) {
                throw DivergenceError("training loss became non-finite in epoch " +
                                      std::to_string(epoch));
            }
            loss_sum += static_cast<double>(lg.loss);

            Mat<Scalar> dnorm = lg.dpreds / static_cast<Scalar>(n);
            dnorm.row(0) *= static_cast<Scalar>(model.max_w);
            dnorm.row(1) *= static_cast<Scalar>(model.max_v);

            model.zero_grads();
            model.backward(dnorm);
            opt.step();
            model.quantize_f32();
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(train_idx.size());
        stats.test_loss = detail::split_loss(model, ds, test_idx, cfg.batch_size);
        result.history.push_back(stats);
        if (cfg.verbose) {
            std::printf("epoch %3d  train %.6f  test %.6f\n", epoch + 1, stats.train_loss,
                        stats.test_loss);
            std::fflush(stdout);
        }
    }
    return result;
}

}  // namespace terracost
