#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "terracost/core/binio.hpp"
#include "terracost/core/config.hpp"
#include "terracost/net/layers.hpp"
#include "terracost/patch/patch.hpp"

namespace terracost {

/// Residual regression network shape. The default is the small three-stage
/// net; stage vectors may grow to the classic 4-stage/2-block layout.
struct ModelSpec {
    int input_side = 40;
    int input_channels = 3;
    int stem_channels = 16;
    std::vector<int> stage_channels = {16, 32, 32};
    std::vector<int> stage_strides = {1, 2, 2};
    std::vector<int> blocks_per_stage = {1, 1, 1};

    void validate() const {
        if (input_side < 4) throw InvalidArgError("input_side must be >= 4");
        if (input_channels < 1) throw InvalidArgError("input_channels must be >= 1");
        if (stem_channels < 1) throw InvalidArgError("stem_channels must be >= 1");
        if (stage_channels.empty() || stage_channels.size() != stage_strides.size() ||
            stage_channels.size() != blocks_per_stage.size()) {
            throw InvalidArgError("stage vectors must be non-empty and equally long");
        }
        for (std::size_t i = 0; i < stage_channels.size(); ++i) {
            if (stage_channels[i] < 1) throw InvalidArgError("stage channels must be >= 1");
            if (stage_strides[i] != 1 && stage_strides[i] != 2) {
                throw InvalidArgError("stage strides must be 1 or 2");
            }
            if (blocks_per_stage[i] < 1) throw InvalidArgError("blocks_per_stage must be >= 1");
        }
    }

    std::string serialize() const {
        KeyValueConfig kv;
        kv.set("input_side", static_cast<long long>(input_side));
        kv.set("input_channels", static_cast<long long>(input_channels));
        kv.set("stem_channels", static_cast<long long>(stem_channels));
        const auto join = [](const std::vector<int>& v) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(v[i]);
            }
            return s;
        };
        kv.set("stage_channels", join(stage_channels));
        kv.set("stage_strides", join(stage_strides));
        kv.set("blocks_per_stage", join(blocks_per_stage));
        return kv.serialize();
    }

    static ModelSpec parse(const std::string& text) {
        KeyValueConfig kv = KeyValueConfig::parse(text);
        ModelSpec spec;
        spec.input_side = static_cast<int>(kv.get_int("input_side"));
        spec.input_channels = static_cast<int>(kv.get_int("input_channels"));
        spec.stem_channels = static_cast<int>(kv.get_int("stem_channels"));
        spec.stage_channels = kv.get_int_list("stage_channels");
        spec.stage_strides = kv.get_int_list("stage_strides");
        spec.blocks_per_stage = kv.get_int_list("blocks_per_stage");
        spec.validate();
        return spec;
    }
};

/// Packs patches into the (channels, n * s * s) activation layout. Three
/// channels are ortho, class, height; a single channel is height alone.
template <class Scalar>
Mat<Scalar> pack_patches(const std::vector<const Patch*>& patches, int input_channels) {
    if (patches.empty()) throw InvalidArgError("cannot pack an empty patch batch");
    if (input_channels != 1 && input_channels != 3) {
        throw InvalidArgError("pack_patches supports 1 or 3 input channels");
    }
    const int s = patches[0]->s;
    const Eigen::Index area = static_cast<Eigen::Index>(s) * s;
    Mat<Scalar> x(input_channels, static_cast<Eigen::Index>(patches.size()) * area);
    for (std::size_t n = 0; n < patches.size(); ++n) {
        const Patch& p = *patches[n];
        if (p.s != s) throw ShapeMismatchError("mixed patch sizes in batch");
        const Eigen::Index base = static_cast<Eigen::Index>(n) * area;
        for (int i = 0; i < s; ++i) {
            for (int j = 0; j < s; ++j) {
                const Eigen::Index col = base + static_cast<Eigen::Index>(i) * s + j;
                if (input_channels == 1) {
                    x(0, col) = static_cast<Scalar>(p.height(i, j));
                } else {
                    x(0, col) = static_cast<Scalar>(p.ortho(i, j));
                    x(1, col) = static_cast<Scalar>(p.class_plane(i, j));
                    x(2, col) = static_cast<Scalar>(p.height(i, j));
                }
            }
        }
    }
    return x;
}

/// Stem conv + residual stages + global average pool + 2-unit head. The head
/// output is normalized; multiplying by (max_w, max_v) gives watts and m/s.
template <class Scalar>
class Model {
public:
    Model(ModelSpec spec_, double max_w_, double max_v_)
        : spec(std::move(spec_)), max_w(max_w_), max_v(max_v_),
          stem_(spec.input_channels, spec.stem_channels, 3, 1), stem_bn_(spec.stem_channels),
          head_(spec.stage_channels.back(), 2) {
        spec.validate();
        if (!(max_w > 0.0) || !(max_v > 0.0)) {
            throw InvalidArgError("model normalizers must be positive");
        }
        int cin = spec.stem_channels;
        for (std::size_t si = 0; si < spec.stage_channels.size(); ++si) {
            for (int b = 0; b < spec.blocks_per_stage[si]; ++b) {
                const int stride = b == 0 ? spec.stage_strides[si] : 1;
                blocks_.emplace_back(cin, spec.stage_channels[si], stride);
                cin = spec.stage_channels[si];
            }
        }
    }

    /// He-uniform weights on the f32 grid, biases zero, BN at identity.
    void init_weights(std::uint64_t seed) {
        SplitMix64 rng(seed);
        stem_.init(rng);
        for (auto& b : blocks_) b.init(rng);
        head_.init(rng);
        quantize_f32();
    }

    /// x is (input_channels, n * side * side); returns normalized (2, n).
    Mat<Scalar> forward(const Mat<Scalar>& x, int n, bool training) {
        if (x.rows() != spec.input_channels ||
            x.cols() != static_cast<Eigen::Index>(n) * spec.input_side * spec.input_side) {
            throw ShapeMismatchError("model input does not match spec");
        }
        Act<Scalar> a;
        a.m = x;
        a.n = n;
        a.h = spec.input_side;
        a.w = spec.input_side;
        a = stem_relu_.forward(stem_bn_.forward(stem_.forward(a, training), training), training);
        for (auto& b : blocks_) a = b.forward(a, training);
        a = pool_.forward(a, training);
        return head_.forward(a, training).m;
    }

    Mat<Scalar> forward_physical(const Mat<Scalar>& x, int n, bool training) {
        Mat<Scalar> y = forward(x, n, training);
        y.row(0) *= static_cast<Scalar>(max_w);
        y.row(1) *= static_cast<Scalar>(max_v);
        return y;
    }

    /// Accumulates parameter gradients from the loss gradient with respect
    /// to the normalized head output.
    void backward(const Mat<Scalar>& dnormalized) {
        Act<Scalar> d;
        d.m = dnormalized;
        d.n = static_cast<int>(dnormalized.cols());
        d.h = 1;
        d.w = 1;
        d = pool_.backward(head_.backward(d));
        for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) d = it->backward(d);
        stem_.backward(stem_bn_.backward(stem_relu_.backward(d)));
    }

    /// Physical (w, v) predictions, batched internally.
    std::vector<std::pair<double, double>> predict(const std::vector<const Patch*>& patches,
                                                   int batch = 32) {
        std::vector<std::pair<double, double>> out;
        out.reserve(patches.size());
        for (std::size_t at = 0; at < patches.size(); at += batch) {
            const std::size_t n = std::min<std::size_t>(batch, patches.size() - at);
            std::vector<const Patch*> chunk(patches.begin() + at, patches.begin() + at + n);
            const Mat<Scalar> x = pack_patches<Scalar>(chunk, spec.input_channels);
            const Mat<Scalar> y = forward_physical(x, static_cast<int>(n), false);
            for (Eigen::Index i = 0; i < y.cols(); ++i) {
                out.emplace_back(static_cast<double>(y(0, i)), static_cast<double>(y(1, i)));
            }
        }
        return out;
    }

    NamedTensors<Scalar> named_tensors(bool include_stats) {
        NamedTensors<Scalar> out;
        stem_.collect("stem", out, include_stats);
        stem_bn_.collect("stem_bn", out, include_stats);
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            blocks_[i].collect("block" + std::to_string(i), out, include_stats);
        }
        head_.collect("head", out, include_stats);
        return out;
    }

    long long weight_count() {
        long long n = 0;
        for (const auto& [name, t] : named_tensors(false)) n += t->size();
        return n;
    }

    void zero_grads() {
        for (auto& [name, t] : named_tensors(false)) t->zero_grad();
    }

    void quantize_f32() {
        for (auto& [name, t] : named_tensors(true)) t->quantize_f32();
    }

    ModelSpec spec;
    double max_w = 1.0;
    double max_v = 1.0;

private:
    Conv2d<Scalar> stem_;
    BatchNorm<Scalar> stem_bn_;
    ReLU<Scalar> stem_relu_;
    std::vector<ResidualBlock<Scalar>> blocks_;
    GlobalAvgPool<Scalar> pool_;
    Dense<Scalar> head_;
};

namespace detail {
constexpr char kModelMagic[4] = {'T', 'C', 'N', 'N'};
constexpr std::uint16_t kModelVersion = 1;
}  // namespace detail

/// TCNN v1: magic, version u16, descriptor (u32 length + key=value text),
/// normalizers f32 x2, then named blobs (u16 name length, name, u8 rank,
/// u32 dims, f32 data) until EOF.
template <class Scalar>
void save_model(Model<Scalar>& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model: " + path);
    out.write(detail::kModelMagic, 4);
    write_le<std::uint16_t>(out, detail::kModelVersion);

    const std::string desc = model.spec.serialize();
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(desc.size()));
    write_bytes(out, desc.data(), desc.size());
    write_le<float>(out, static_cast<float>(model.max_w));
    write_le<float>(out, static_cast<float>(model.max_v));

    for (const auto& [name, tensor] : model.named_tensors(true)) {
        write_le<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
        write_bytes(out, name.data(), name.size());
        write_le<std::uint8_t>(out, static_cast<std::uint8_t>(tensor->shape.size()));
        for (int d : tensor->shape) write_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
        for (Eigen::Index i = 0; i < tensor->size(); ++i) {
            write_le<float>(out, static_cast<float>(tensor->values[i]));
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

template <class Scalar>
Model<Scalar> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model: " + path);

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, detail::kModelMagic, 4) != 0) {
        throw FormatError("bad TCNN magic: " + path);
    }
    const auto version = read_le<std::uint16_t>(in, "version");
    if (version != detail::kModelVersion) {
        throw FormatError("unsupported TCNN version " + std::to_string(version));
    }

    const auto desc_len = read_le<std::uint32_t>(in, "descriptor length");
    if (desc_len > (1u << 20)) throw FormatError("implausible descriptor length");
    std::string desc(desc_len, '\0');
    read_bytes(in, desc.data(), desc_len, "descriptor");
    const ModelSpec spec = ModelSpec::parse(desc);
    const double max_w = read_le<float>(in, "max_w");
    const double max_v = read_le<float>(in, "max_v");

    struct Blob {
        std::vector<int> shape;
        std::vector<float> data;
    };
    std::map<std::string, Blob> blobs;
    while (true) {
        in.peek();
        if (in.eof()) break;
        const auto name_len = read_le<std::uint16_t>(in, "tensor name length");
        std::string name(name_len, '\0');
        read_bytes(in, name.data(), name_len, "tensor name");
        const auto rank = read_le<std::uint8_t>(in, "tensor rank");
        Blob blob;
        std::size_t count = 1;
        for (int r = 0; r < rank; ++r) {
            const auto dim = read_le<std::uint32_t>(in, "tensor dim");
            if (dim == 0 || dim > (1u << 24)) throw FormatError("implausible tensor dim");
            blob.shape.push_back(static_cast<int>(dim));
            count *= dim;
        }
        if (count > (1u << 28)) throw FormatError("implausible tensor size");
        blob.data.resize(count);
        read_bytes(in, blob.data.data(), sizeof(float) * count, ("tensor " + name).c_str());
        if (!blobs.emplace(std::move(name), std::move(blob)).second) {
            throw FormatError("duplicate tensor in model file");
        }
    }

    Model<Scalar> model(spec, max_w, max_v);
    auto named = model.named_tensors(true);
    if (named.size() != blobs.size()) {
        throw FormatError("model file has " + std::to_string(blobs.size()) + " tensors, spec needs " +
                          std::to_string(named.size()));
    }
    for (auto& [name, tensor] : named) {
        const auto it = blobs.find(name);
        if (it == blobs.end()) throw FormatError("model file is missing tensor " + name);
        if (it->second.shape != tensor->shape) {
            throw FormatError("tensor " + name + " shape mismatch");
        }
        for (Eigen::Index i = 0; i < tensor->size(); ++i) {
            tensor->values[i] = static_cast<Scalar>(it->second.data[i]);
        }
    }
    return model;
}

}  // namespace terracost
