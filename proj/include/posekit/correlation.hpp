#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "posekit/error.hpp"

namespace posekit {

/// d x H x W feature tensor. Each channel is one contiguous row-major H x W
/// plane: data(c, y * W + x).
template <typename Scalar>
struct FeatureVolume {
  using Storage = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Storage data;
  int height = 0;
  int width = 0;

  FeatureVolume() = default;
  FeatureVolume(int channels, int h, int w)
      : data{Storage::Zero(channels, static_cast<Eigen::Index>(h) * w)}, height{h}, width{w} {}
  FeatureVolume(Storage values, int h, int w) : data{std::move(values)}, height{h}, width{w} {
    if (data.cols() != static_cast<Eigen::Index>(h) * w) {
      throw Error(Errc::ShapeMismatch, "feature storage does not match H x W");
    }
  }

  static FeatureVolume Random(int channels, int h, int w) {
    return FeatureVolume{Storage::Random(channels, static_cast<Eigen::Index>(h) * w), h, w};
  }

  int channels() const { return static_cast<int>(data.rows()); }
  Scalar &operator()(int c, int y, int x) { return data(c, y * width + x); }
  Scalar operator()(int c, int y, int x) const { return data(c, y * width + x); }
};

/// window^2 x H x W windowed correlation. Channel (vy + h) * window + (vx + h)
/// holds shift (vy, vx), h = (window - 1) / 2, i.e. shifts run row-major from
/// (-h, -h) to (h, h).
template <typename Scalar>
struct CorrelationVolume {
  int window = 0;
  FeatureVolume<Scalar> volume;

  int shift_channel(int vy, int vx) const {
    const int h = (window - 1) / 2;
    return (vy + h) * window + (vx + h);
  }
};

namespace detail {

template <typename Scalar>
void check_corr_inputs(const FeatureVolume<Scalar> &fs, const FeatureVolume<Scalar> &fr,
                       int window) {
  if (fs.channels() != fr.channels() || fs.height != fr.height || fs.width != fr.width) {
    throw Error(Errc::ShapeMismatch, "rendered and real feature volumes differ in shape");
  }
  if (fs.channels() < 1 || fs.height < 1 || fs.width < 1) {
    throw Error(Errc::ShapeMismatch, "feature volume must be non-empty");
  }
  if (window < 1 || window % 2 == 0) {
    throw Error(Errc::InvalidWindow, "window must be odd and positive, got " +
                                         std::to_string(window));
  }
  if (window > 2 * std::min(fs.height, fs.width) - 1) {
    throw Error(Errc::InvalidWindow, "window " + std::to_string(window) +
                                         " exceeds 2 min(H, W) - 1");
  }
}

}  // namespace detail

/// c(v, x) = f_s(x)^T f_r(x + v) / sqrt(d) for |v|_inf <= (window - 1) / 2.
/// Reads outside f_r contribute zero.
///
/// Row-tiled evaluation: for one output row and one vertical shift, the
/// window output rows stay in cache while every channel streams through once
/// and the inner loop is a branch-free multiply-add over contiguous row
/// segments. Channels are accumulated in increasing order for every output
/// element, which makes the result bitwise equal to corr_volume_reference.
template <typename Scalar>
CorrelationVolume<Scalar> corr_volume(const FeatureVolume<Scalar> &fs,
                                      const FeatureVolume<Scalar> &fr, int window) {
  using Row = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
  detail::check_corr_inputs(fs, fr, window);
  const int d = fs.channels();
  const int H = fs.height;
  const int W = fs.width;
  const int h = (window - 1) / 2;
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(d));

  CorrelationVolume<Scalar> out{window, FeatureVolume<Scalar>(window * window, H, W)};
  auto &vol = out.volume.data;
  for (int y = 0; y < H; ++y) {
    for (int vy = -h; vy <= h; ++vy) {
      const int yy = y + vy;
      if (yy < 0 || yy >= H) continue;
      const int first = out.shift_channel(vy, -h);
      for (int c = 0; c < d; ++c) {
        const Scalar *a = fs.data.row(c).data() + y * W;
        const Scalar *b = fr.data.row(c).data() + yy * W;
        for (int vx = -h; vx <= h; ++vx) {
          const int x0 = std::max(0, -vx);
          const int x1 = std::min(W, W - vx);
          if (x0 >= x1) continue;
          Eigen::Map<Row> o(vol.row(first + vx + h).data() + y * W + x0, x1 - x0);
          o += Eigen::Map<const Row>(a + x0, x1 - x0) * Eigen::Map<const Row>(b + x0 + vx, x1 - x0);
        }
      }
    }
    for (int ch = 0; ch < window * window; ++ch) {
      Eigen::Map<Row>(vol.row(ch).data() + y * W, W) *= scale;
    }
  }
  return out;
}

/// Straightforward per-output loop; the benchmark baseline.
template <typename Scalar>
CorrelationVolume<Scalar> corr_volume_reference(const FeatureVolume<Scalar> &fs,
                                                const FeatureVolume<Scalar> &fr, int window) {
  detail::check_corr_inputs(fs, fr, window);
  const int d = fs.channels();
  const int h = (window - 1) / 2;
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(d));
  CorrelationVolume<Scalar> out{window, FeatureVolume<Scalar>(window * window, fs.height, fs.width)};
  for (int vy = -h; vy <= h; ++vy) {
    for (int vx = -h; vx <= h; ++vx) {
      const int ch = out.shift_channel(vy, vx);
      for (int y = 0; y < fs.height; ++y) {
        for (int x = 0; x < fs.width; ++x) {
          Scalar sum = 0;
          for (int c = 0; c < d; ++c) {
            const int yy = y + vy;
            const int xx = x + vx;
            if (yy >= 0 && yy < fr.height && xx >= 0 && xx < fr.width) {
              sum += fs(c, y, x) * fr(c, yy, xx);
            }
          }
          out.volume(ch, y, x) = sum * scale;
        }
      }
    }
  }
  return out;
}

/// Per-pixel linear map (a 1x1 convolution without bias).
template <typename Scalar, typename Derived>
FeatureVolume<Scalar> project_features(const FeatureVolume<Scalar> &f,
                                       const Eigen::MatrixBase<Derived> &proj) {
  if (proj.cols() != f.channels()) {
    throw Error(Errc::ShapeMismatch, "projection expects " + std::to_string(proj.cols()) +
                                         " channels, volume has " +
                                         std::to_string(f.channels()));
  }
  return FeatureVolume<Scalar>{proj * f.data, f.height, f.width};
}

/// 2x2 average pooling with stride 2. Throws ShapeMismatch on odd sizes.
template <typename Scalar>
FeatureVolume<Scalar> avg_pool2(const FeatureVolume<Scalar> &f) {
  if (f.height % 2 != 0 || f.width % 2 != 0) {
    throw Error(Errc::ShapeMismatch, "average pooling needs even H and W");
  }
  FeatureVolume<Scalar> out(f.channels(), f.height / 2, f.width / 2);
  for (int c = 0; c < f.channels(); ++c) {
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        out(c, y, x) = (f(c, 2 * y, 2 * x) + f(c, 2 * y, 2 * x + 1) +
                        f(c, 2 * y + 1, 2 * x) + f(c, 2 * y + 1, 2 * x + 1)) /
                       Scalar(4);
      }
    }
  }
  return out;
}

/// Stacks volumes along the channel axis.
template <typename Scalar>
FeatureVolume<Scalar> concat_channels(const std::vector<const FeatureVolume<Scalar> *> &parts) {
  int total = 0;
  for (const auto *p : parts) {
    if (p->height != parts.front()->height || p->width != parts.front()->width) {
      throw Error(Errc::ShapeMismatch, "cannot concatenate volumes of different H x W");
    }
    total += p->channels();
  }
  FeatureVolume<Scalar> out(total, parts.front()->height, parts.front()->width);
  int row = 0;
  for (const auto *p : parts) {
    out.data.middleRows(row, p->channels()) = p->data;
    row += p->channels();
  }
  return out;
}

struct PyramidLevelSpec {
  int resolution = 0;
  int in_channels = 0;
  int out_channels = 0;
  int stride = 1;
};

/// Expected per-scale shapes of the fusion convolutions.
struct PyramidSpec {
  std::vector<PyramidLevelSpec> levels;

  /// 64x64: 186 -> 128 stride 2; 32x32: 377 -> 256 stride 2;
  /// 16x16: 505 -> 256 stride 1.
  static PyramidSpec three_scale() {
    return {{{64, 186, 128, 2}, {32, 377, 256, 2}, {16, 505, 256, 1}}};
  }
};

/// Stand-in for a learned fusion convolution: per-pixel linear map followed
/// by 2x2 average pooling when stride is 2.
template <typename Scalar>
struct FusionLayer {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> weights;
  int stride = 1;
};

template <typename Scalar>
struct PyramidInputs {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  std::vector<FeatureVolume<Scalar>> real;
  std::vector<FeatureVolume<Scalar>> rendered;
  /// Visibility mask at the finest scale, H x W.
  Matrix mask;
  /// Shared real/rendered projection per scale.
  std::vector<Matrix> projections;
  /// Fusion per scale; may be omitted only for the last scale.
  std::vector<FusionLayer<Scalar>> fusion;
  int window = 11;
};

template <typename Scalar>
struct PyramidOutputs {
  /// Fusion inputs: [real, mask (finest only), correlation, previous fused].
  std::vector<FeatureVolume<Scalar>> concatenated;
  /// Fusion outputs after stride.
  std::vector<FeatureVolume<Scalar>> fused;
  std::vector<int> input_channels;
  std::vector<int> output_channels;
};

/// Builds the coarse-to-fine concatenations of the residual correlation
/// block. When `spec` is given, every scale is checked against it and a
/// mismatch throws SpecViolation naming the scale and both channel counts.
template <typename Scalar>
PyramidOutputs<Scalar> build_pyramid_concat(const PyramidInputs<Scalar> &in,
                                            const std::optional<PyramidSpec> &spec = {}) {
  const std::size_t levels = in.real.size();
  if (levels == 0) throw Error(Errc::EmptyInput, "pyramid has no scales");
  if (in.rendered.size() != levels || in.projections.size() != levels) {
    throw Error(Errc::ShapeMismatch, "real, rendered and projection scale counts differ");
  }
  if (spec && spec->levels.size() != levels) {
    throw Error(Errc::SpecViolation, "expected " + std::to_string(spec->levels.size()) +
                                         " scales, got " + std::to_string(levels));
  }
  const auto &finest = in.real.front();
  if (in.mask.rows() != finest.height || in.mask.cols() != finest.width) {
    throw Error(Errc::ShapeMismatch, "mask must match the finest scale");
  }

  FeatureVolume<Scalar> mask(1, finest.height, finest.width);
  for (int y = 0; y < finest.height; ++y) {
    for (int x = 0; x < finest.width; ++x) mask(0, y, x) = in.mask(y, x);
  }

  PyramidOutputs<Scalar> out;
  for (std::size_t s = 0; s < levels; ++s) {
    const auto &real = in.real[s];
    const auto &rendered = in.rendered[s];
    const std::string where = "scale " + std::to_string(s) + ": ";
    if (real.height != rendered.height || real.width != rendered.width ||
        real.channels() != rendered.channels()) {
      throw Error(Errc::ShapeMismatch, where + "real and rendered features differ in shape");
    }
    if (s > 0 && (2 * real.height != in.real[s - 1].height ||
                  2 * real.width != in.real[s - 1].width)) {
      throw Error(Errc::ShapeMismatch, where + "resolution must halve between scales");
    }
    if (spec && spec->levels[s].resolution != real.height) {
      throw Error(Errc::SpecViolation, where + "expected resolution " +
                                           std::to_string(spec->levels[s].resolution) +
                                           ", got " + std::to_string(real.height));
    }

    const auto proj_real = project_features(real, in.projections[s]);
    const auto proj_rendered = project_features(rendered, in.projections[s]);
    const auto corr = corr_volume(proj_rendered, proj_real, in.window);

    std::vector<const FeatureVolume<Scalar> *> parts{&real};
    if (s == 0) parts.push_back(&mask);
    parts.push_back(&corr.volume);
    if (s > 0) {
      if (out.fused.size() != s) {
        throw Error(Errc::ShapeMismatch, where + "missing fused output of the finer scale");
      }
      parts.push_back(&out.fused.back());
    }
    out.concatenated.push_back(concat_channels(parts));
    const int in_ch = out.concatenated.back().channels();
    out.input_channels.push_back(in_ch);
    if (spec && spec->levels[s].in_channels != in_ch) {
      throw Error(Errc::SpecViolation, where + "expected " +
                                           std::to_string(spec->levels[s].in_channels) +
                                           " input channels, got " + std::to_string(in_ch));
    }

    if (s < in.fusion.size()) {
      const auto &layer = in.fusion[s];
      if (layer.stride != 1 && layer.stride != 2) {
        throw Error(Errc::InvalidParam, where + "fusion stride must be 1 or 2");
      }
      auto fused = project_features(out.concatenated.back(), layer.weights);
      if (layer.stride == 2) fused = avg_pool2(fused);
      const int out_ch = fused.channels();
      if (spec && (spec->levels[s].out_channels != out_ch ||
                   spec->levels[s].stride != layer.stride)) {
        throw Error(Errc::SpecViolation,
                    where + "expected " + std::to_string(spec->levels[s].out_channels) +
                        " output channels at stride " + std::to_string(spec->levels[s].stride) +
                        ", got " + std::to_string(out_ch) + " at stride " +
                        std::to_string(layer.stride));
      }
      out.output_channels.push_back(out_ch);
      out.fused.push_back(std::move(fused));
    }
  }
  return out;
}

}  // namespace posekit
