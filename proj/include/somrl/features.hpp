#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "somrl/env.hpp"
#include "somrl/errors.hpp"

namespace somrl {

// State feature vector, stored sparsely: most radial-basis activations are
// numerically zero away from the agent.  `size` is the logical dense length.
struct FeatureVector {
    std::size_t size = 0;
    std::vector<std::uint32_t> index;  // sorted, unique
    std::vector<double> value;

    std::vector<double> dense() const {
        std::vector<double> out(size, 0.0);
        for (std::size_t k = 0; k < index.size(); ++k) out[index[k]] = value[k];
        return out;
    }
};

// Encodes a position as F = Fe || Fa(x) || Fa(y).  Each Fa block holds
// `centers_per_dim` Gaussian radial basis activations over evenly spaced
// centers on [0, extent], normalized so the block sums to 1.
class RadialBasisCoder {
public:
    RadialBasisCoder(const ArenaSpec& arena, std::size_t centers_per_dim = 100,
                     double width_factor = 1.5)
        : width_(arena.width),
          height_(arena.height),
          stimulus_count_(arena.stimuli.size()),
          centers_(centers_per_dim) {
        if (centers_per_dim < 2) throw ConfigError("features: need at least 2 RBF centers");
        spacing_x_ = width_ / double(centers_ - 1);
        spacing_y_ = height_ / double(centers_ - 1);
        rbf_width_x_ = width_factor * spacing_x_;
        rbf_width_y_ = width_factor * spacing_y_;
    }

    std::size_t feature_count() const { return stimulus_count_ + 2 * centers_; }
    std::size_t stimulus_count() const { return stimulus_count_; }
    std::size_t centers_per_dim() const { return centers_; }

    FeatureVector featurize(const Vec2& p, const std::vector<double>& fe) const {
        if (p.x < 0.0 || p.x > width_ || p.y < 0.0 || p.y > height_)
            throw ContractViolation("featurize: position outside arena");
        if (fe.size() != stimulus_count_)
            throw ContractViolation("featurize: stimulus vector length mismatch");

        FeatureVector f;
        f.size = feature_count();
        f.index.reserve(stimulus_count_ + 2 * kWindow * 2);
        f.value.reserve(f.index.capacity());
        for (std::size_t k = 0; k < stimulus_count_; ++k) {
            f.index.push_back(std::uint32_t(k));
            f.value.push_back(fe[k]);
        }
        encode_dim(p.x, spacing_x_, rbf_width_x_, std::uint32_t(stimulus_count_), f);
        encode_dim(p.y, spacing_y_, rbf_width_y_, std::uint32_t(stimulus_count_ + centers_), f);
        return f;
    }

private:
    // Activations beyond kWindow widths from a center are ~1e-14 and dropped;
    // the block is normalized over the retained entries so it sums to 1.
    static constexpr int kWindow = 8;

    void encode_dim(double v, double spacing, double width, std::uint32_t offset,
                    FeatureVector& f) const {
        const double radius = kWindow * width;
        long lo = long(std::ceil((v - radius) / spacing));
        long hi = long(std::floor((v + radius) / spacing));
        lo = std::max(lo, 0L);
        hi = std::min(hi, long(centers_) - 1);
        const std::size_t first = f.value.size();
        double sum = 0.0;
        for (long i = lo; i <= hi; ++i) {
            const double d = v - double(i) * spacing;
            const double a = std::exp(-d * d / (2.0 * width * width));
            f.index.push_back(offset + std::uint32_t(i));
            f.value.push_back(a);
            sum += a;
        }
        for (std::size_t k = first; k < f.value.size(); ++k) f.value[k] /= sum;
    }

    double width_;
    double height_;
    std::size_t stimulus_count_;
    std::size_t centers_;
    double spacing_x_, spacing_y_;
    double rbf_width_x_, rbf_width_y_;
};

}  // namespace somrl
