#pragma once

#include <cmath>

#include "terracost/net/tensor.hpp"

namespace terracost {

/// Normalized root-square error, summed over the batch:
///   sum_i sqrt((w_i - w*_i)^2 / max_w^2 + (v_i - v*_i)^2 / max_v^2)
/// preds and truths are 2 x N in physical units, row 0 power, row 1 velocity.
template <class Scalar>
Scalar nrmse_loss(const Mat<Scalar>& preds, const Mat<Scalar>& truths, Scalar max_w,
                  Scalar max_v) {
    if (preds.rows() != 2 || truths.rows() != 2 || preds.cols() != truths.cols()) {
        throw ShapeMismatchError("loss expects 2 x N preds and truths of equal width");
    }
    if (!(max_w > Scalar(0)) || !(max_v > Scalar(0))) {
        throw InvalidArgError("loss normalizers must be positive");
    }
    const Scalar aw = Scalar(1) / (max_w * max_w);
    const Scalar av = Scalar(1) / (max_v * max_v);
    Scalar total = Scalar(0);
    for (Eigen::Index i = 0; i < preds.cols(); ++i) {
        const Scalar ew = preds(0, i) - truths(0, i);
        const Scalar ev = preds(1, i) - truths(1, i);
        total += std::sqrt(aw * ew * ew + av * ev * ev);
    }
    return total;
}

/// Loss plus its gradient with respect to the physical predictions. The
/// sqrt kink at zero error takes subgradient 0.
template <class Scalar>
struct LossGrad {
    Scalar loss;
    Mat<Scalar> dpreds;  // 2 x N
};

template <class Scalar>
LossGrad<Scalar> nrmse_loss_grad(const Mat<Scalar>& preds, const Mat<Scalar>& truths,
                                 Scalar max_w, Scalar max_v) {
    if (preds.rows() != 2 || truths.rows() != 2 || preds.cols() != truths.cols()) {
        throw ShapeMismatchError("loss expects 2 x N preds and truths of equal width");
    }
    if (!(max_w > Scalar(0)) || !(max_v > Scalar(0))) {
        throw InvalidArgError("loss normalizers must be positive");
    }
    const Scalar aw = Scalar(1) / (max_w * max_w);
    const Scalar av = Scalar(1) / (max_v * max_v);
    LossGrad<Scalar> out;
    out.loss = Scalar(0);
    out.dpreds = Mat<Scalar>::Zero(2, preds.cols());
    for (Eigen::Index i = 0; i < preds.cols(); ++i) {
        const Scalar ew = preds(0, i) - truths(0, i);
        const Scalar ev = preds(1, i) - truths(1, i);
        const Scalar s = std::sqrt(aw * ew * ew + av * ev * ev);
        out.loss += s;
        if (s > Scalar(0)) {
            out.dpreds(0, i) = aw * ew / s;
            out.dpreds(1, i) = av * ev / s;
        }
    }
    return out;
}

}  // namespace terracost
