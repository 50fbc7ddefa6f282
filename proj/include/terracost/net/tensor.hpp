#pragma once

#include <Eigen/Core>
#include <numeric>
#include <string>
#include <vector>

#include "terracost/core/errors.hpp"

namespace terracost {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Flat named parameter array with an accumulated gradient of the same
/// size. Shape is bookkeeping for serialization and sanity checks; the
/// layers map the flat storage however they need.
template <class Scalar>
struct Tensor {
    std::vector<int> shape;
    Vec<Scalar> values;
    Vec<Scalar> grad;

    Tensor() = default;

    explicit Tensor(std::vector<int> shape_) : shape(std::move(shape_)) {
        values = Vec<Scalar>::Zero(count(shape));
        grad = Vec<Scalar>::Zero(values.size());
    }

    static Eigen::Index count(const std::vector<int>& shape) {
        Eigen::Index n = 1;
        for (int d : shape) {
            if (d <= 0) throw InvalidArgError("tensor dimensions must be positive");
            n *= d;
        }
        return n;
    }

    Eigen::Index size() const { return values.size(); }

    void zero_grad() { grad.setZero(); }

    /// Rounds every value through f32. Keeping weights on the f32 grid makes
    /// the on-disk f32 image lossless while all arithmetic stays in Scalar.
    void quantize_f32() {
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            values[i] = static_cast<Scalar>(static_cast<float>(values[i]));
        }
    }
};

/// Activation batch: channels x (n * h * w), column n * h * w + row * w + col.
template <class Scalar>
struct Act {
    Mat<Scalar> m;
    int n = 0;
    int h = 0;
    int w = 0;

    int channels() const { return static_cast<int>(m.rows()); }
};

}  // namespace terracost
