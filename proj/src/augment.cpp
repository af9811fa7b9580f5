/**
 * Copyright 2026 The radkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "radkit/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "radkit/error.hpp"
#include "radkit/simulator.hpp"

namespace radkit {

using nlohmann::json;

RmmDraw draw_rmm(size_t num_virtual, double keep_prob, double alpha, RngStream& rng) {
  RmmDraw d;
  d.keep.resize(num_virtual);
  d.phase.resize(num_virtual);
  for (size_t k = 0; k < num_virtual; ++k) d.keep[k] = rng.bernoulli(keep_prob);
  const double half_width = alpha * std::numbers::pi;
  for (size_t k = 0; k < num_virtual; ++k) d.phase[k] = rng.uniform(-half_width, half_width);
  return d;
}

VirtualArrayTensor apply_mask(const VirtualArrayTensor& tensor, const std::vector<bool>& keep) {
  if (keep.size() != tensor.num_virtual) throw std::invalid_argument("apply_mask: mask length != K");
  VirtualArrayTensor out = tensor;
  for (size_t k = 0; k < out.num_virtual; ++k)
    if (!keep[k]) std::fill(out.slab(k).begin(), out.slab(k).end(), std::complex<float>(0.0f, 0.0f));
  return out;
}

VirtualArrayTensor apply_phases(const VirtualArrayTensor& tensor, const std::vector<double>& phase) {
  if (phase.size() != tensor.num_virtual) throw std::invalid_argument("apply_phases: phase length != K");
  VirtualArrayTensor out = tensor;
  for (size_t k = 0; k < out.num_virtual; ++k) {
    if (phase[k] == 0.0) continue;
    const double c = std::cos(phase[k]);
    const double s = std::sin(phase[k]);
    for (auto& v : out.slab(k)) {
      const double re = v.real();
      const double im = v.imag();
      v = {static_cast<float>(re * c - im * s), static_cast<float>(re * s + im * c)};
    }
  }
  return out;
}

VirtualArrayTensor antenna_dropout(const VirtualArrayTensor& tensor, double keep_prob, RngStream& rng) {
  if (!(keep_prob >= 0.0 && keep_prob <= 1.0)) throw std::invalid_argument("antenna_dropout: p must be in [0, 1]");
  std::vector<bool> keep(tensor.num_virtual);
  for (size_t k = 0; k < keep.size(); ++k) keep[k] = rng.bernoulli(keep_prob);
  return apply_mask(tensor, keep);
}

VirtualArrayTensor phase_noise(const VirtualArrayTensor& tensor, double alpha, RngStream& rng) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("phase_noise: alpha must be in [0, 1)");
  std::vector<double> phase(tensor.num_virtual);
  const double half_width = alpha * std::numbers::pi;
  for (auto& t : phase) t = rng.uniform(-half_width, half_width);
  return apply_phases(tensor, phase);
}

Heatmap rmm(const VirtualArrayTensor& tensor, double keep_prob, double alpha, RngStream& rng) {
  if (!(keep_prob >= 0.0 && keep_prob <= 1.0)) throw std::invalid_argument("rmm: p must be in [0, 1]");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("rmm: alpha must be in [0, 1)");
  const RmmDraw d = draw_rmm(tensor.num_virtual, keep_prob, alpha, rng);
  return integrate_heatmap(apply_phases(apply_mask(tensor, d.keep), d.phase));
}

Heatmap polar_rotate(const Heatmap& heatmap, int shift_bins) {
  const long width = static_cast<long>(heatmap.num_azimuth);
  if (std::abs(static_cast<long>(shift_bins)) >= width)
    throw std::invalid_argument("polar_rotate: |shift| must be < A");
  Heatmap out(heatmap.num_range, heatmap.num_azimuth);
  for (size_t l = 0; l < heatmap.num_range; ++l) {
    for (long a = 0; a < width; ++a) {
      const long dst = a + shift_bins;
      if (dst >= 0 && dst < width) out.at(l, static_cast<size_t>(dst)) = heatmap.at(l, static_cast<size_t>(a));
    }
  }
  return out;
}

Heatmap center_crop(const Heatmap& heatmap, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("center_crop: fraction must be in (0, 1]");
  const size_t L = heatmap.num_range;
  const size_t A = heatmap.num_azimuth;
  const auto win_l = static_cast<size_t>(std::ceil(fraction * static_cast<double>(L)));
  const auto win_a = static_cast<size_t>(std::ceil(fraction * static_cast<double>(A)));
  if (win_l < 2 || win_a < 2) throw std::invalid_argument("center_crop: window smaller than 2x2");
  const size_t start_l = (L - win_l) / 2;
  const size_t start_a = (A - win_a) / 2;

  // Corner-aligned source coordinate and bilinear weights for one axis.
  auto coords = [](size_t n, size_t win, size_t start) {
    std::vector<std::pair<size_t, double>> c(n);
    for (size_t i = 0; i < n; ++i) {
      const double pos = static_cast<double>(start) +
                         static_cast<double>(i) * static_cast<double>(win - 1) / static_cast<double>(n - 1);
      size_t base = static_cast<size_t>(std::floor(pos));
      double frac = pos - static_cast<double>(base);
      if (base >= start + win - 1) {
        base = start + win - 2;
        frac = 1.0;
      }
      c[i] = {base, frac};
    }
    return c;
  };
  const auto rows = coords(L, win_l, start_l);
  const auto cols = coords(A, win_a, start_a);

  Heatmap out(L, A);
  for (size_t i = 0; i < L; ++i) {
    const auto [l0, fl] = rows[i];
    for (size_t j = 0; j < A; ++j) {
      const auto [a0, fa] = cols[j];
      const double top = (1.0 - fa) * heatmap.at(l0, a0) + (fa > 0.0 ? fa * heatmap.at(l0, a0 + 1) : 0.0);
      double v = top;
      if (fl > 0.0) {
        const double bottom =
            (1.0 - fa) * heatmap.at(l0 + 1, a0) + (fa > 0.0 ? fa * heatmap.at(l0 + 1, a0 + 1) : 0.0);
        v = (1.0 - fl) * top + fl * bottom;
      }
      out.at(i, j) = static_cast<float>(v);
    }
  }
  return out;
}

Heatmap hflip(const Heatmap& heatmap) {
  Heatmap out(heatmap.num_range, heatmap.num_azimuth);
  const size_t A = heatmap.num_azimuth;
  for (size_t l = 0; l < heatmap.num_range; ++l)
    for (size_t a = 0; a < A; ++a) out.at(l, A - 1 - a) = heatmap.at(l, a);
  return out;
}

Heatmap vflip(const Heatmap& heatmap) {
  Heatmap out(heatmap.num_range, heatmap.num_azimuth);
  const size_t L = heatmap.num_range;
  for (size_t l = 0; l < L; ++l)
    for (size_t a = 0; a < heatmap.num_azimuth; ++a) out.at(L - 1 - l, a) = heatmap.at(l, a);
  return out;
}

Heatmap threshold(const Heatmap& heatmap, double percentile, bool binarize) {
  if (!(percentile >= 0.0 && percentile <= 100.0)) throw std::invalid_argument("threshold: percentile must be in [0, 100]");
  Heatmap out = heatmap;
  const size_t n = heatmap.size();
  if (n == 0) return out;
  // Keep the top ceil((100 - q)% of n) values, at least one.
  const double keep_exact = (100.0 - percentile) * static_cast<double>(n) / 100.0;
  const size_t keep = std::clamp<size_t>(static_cast<size_t>(std::ceil(keep_exact)), 1, n);
  std::vector<float> sorted = heatmap.data;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(n - keep), sorted.end());
  const float cut = sorted[n - keep];
  for (auto& v : out.data) {
    if (v < cut)
      v = 0.0f;
    else if (binarize)
      v = 1.0f;
  }
  return out;
}

Heatmap cutout(const Heatmap& heatmap, double max_frac, RngStream& rng) {
  if (!(max_frac > 0.0 && max_frac < 1.0)) throw std::invalid_argument("cutout: max_frac must be in (0, 1)");
  Heatmap out = heatmap;
  const size_t L = heatmap.num_range;
  const size_t A = heatmap.num_azimuth;
  if (L == 0 || A == 0) return out;
  const size_t max_h = std::max<size_t>(1, static_cast<size_t>(std::ceil(max_frac * static_cast<double>(L))));
  const size_t max_w = std::max<size_t>(1, static_cast<size_t>(std::ceil(max_frac * static_cast<double>(A))));
  const size_t h = 1 + rng.below(std::min(max_h, L));
  const size_t w = 1 + rng.below(std::min(max_w, A));
  const size_t top = rng.below(L - h + 1);
  const size_t left = rng.below(A - w + 1);
  for (size_t l = top; l < top + h; ++l)
    for (size_t a = left; a < left + w; ++a) out.at(l, a) = 0.0f;
  return out;
}

namespace aug {

bool is_raw(const Op& op) {
  return std::holds_alternative<AntennaDropout>(op) || std::holds_alternative<PhaseNoise>(op);
}

std::string op_name(const Op& op) {
  struct Namer {
    std::string operator()(const AntennaDropout&) const { return "antenna_dropout"; }
    std::string operator()(const PhaseNoise&) const { return "phase_noise"; }
    std::string operator()(const PolarRotate&) const { return "polar_rotate"; }
    std::string operator()(const CenterCrop&) const { return "center_crop"; }
    std::string operator()(const HFlip&) const { return "hflip"; }
    std::string operator()(const VFlip&) const { return "vflip"; }
    std::string operator()(const Cutout&) const { return "cutout"; }
    std::string operator()(const Threshold&) const { return "threshold"; }
  };
  return std::visit(Namer{}, op);
}

}  // namespace aug

void AugmentationSpec::validate() const {
  auto bad = [](const std::string& what) { throw ConfigError("augmentation: " + what); };
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  for (const auto& step : steps) {
    if (!in_unit(step.apply_prob)) bad("apply_prob must be in [0, 1]");
    std::visit(
        [&](const auto& op) {
          using T = std::decay_t<decltype(op)>;
          if constexpr (std::is_same_v<T, aug::AntennaDropout>) {
            if (!in_unit(op.p)) bad("antenna_dropout.p must be in [0, 1]");
          } else if constexpr (std::is_same_v<T, aug::PhaseNoise>) {
            if (!(op.alpha >= 0.0 && op.alpha < 1.0)) bad("phase_noise.alpha must be in [0, 1)");
          } else if constexpr (std::is_same_v<T, aug::PolarRotate>) {
            if (op.max_bins < 0) bad("polar_rotate.max_bins must be >= 0");
          } else if constexpr (std::is_same_v<T, aug::CenterCrop>) {
            if (!(op.min_fraction > 0.0 && op.min_fraction <= 1.0)) bad("center_crop.min_fraction must be in (0, 1]");
          } else if constexpr (std::is_same_v<T, aug::HFlip> || std::is_same_v<T, aug::VFlip>) {
            if (!in_unit(op.prob)) bad("flip prob must be in [0, 1]");
          } else if constexpr (std::is_same_v<T, aug::Cutout>) {
            if (!(op.max_frac > 0.0 && op.max_frac < 1.0)) bad("cutout.max_frac must be in (0, 1)");
            if (!in_unit(op.prob)) bad("cutout.prob must be in [0, 1]");
          } else if constexpr (std::is_same_v<T, aug::Threshold>) {
            if (!(op.percentile >= 0.0 && op.percentile <= 100.0)) bad("threshold.percentile must be in [0, 100]");
          }
        },
        step.op);
  }
}

AugmentationSpec AugmentationSpec::defaults() {
  AugmentationSpec spec;
  spec.steps = {{aug::AntennaDropout{kDefaultKeepProb}, 1.0},
                {aug::PhaseNoise{kDefaultPhaseAlpha}, 1.0},
                {aug::CenterCrop{0.7}, 1.0},
                {aug::HFlip{0.5}, 1.0}};
  return spec;
}

namespace {

VirtualArrayTensor apply_raw(const VirtualArrayTensor& t, const aug::Op& op, RngStream& rng) {
  if (const auto* d = std::get_if<aug::AntennaDropout>(&op)) return antenna_dropout(t, d->p, rng);
  return phase_noise(t, std::get<aug::PhaseNoise>(op).alpha, rng);
}

Heatmap apply_map(const Heatmap& h, const aug::Op& op, RngStream& rng) {
  return std::visit(
      [&](const auto& o) -> Heatmap {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, aug::PolarRotate>) {
          const int max_bins = std::min<int>(o.max_bins, static_cast<int>(h.num_azimuth) - 1);
          const int shift = static_cast<int>(rng.below(2 * static_cast<uint64_t>(max_bins) + 1)) - max_bins;
          return polar_rotate(h, shift);
        } else if constexpr (std::is_same_v<T, aug::CenterCrop>) {
          return center_crop(h, rng.uniform(o.min_fraction, 1.0));
        } else if constexpr (std::is_same_v<T, aug::HFlip>) {
          return rng.bernoulli(o.prob) ? hflip(h) : h;
        } else if constexpr (std::is_same_v<T, aug::VFlip>) {
          return rng.bernoulli(o.prob) ? vflip(h) : h;
        } else if constexpr (std::is_same_v<T, aug::Cutout>) {
          return rng.bernoulli(o.prob) ? cutout(h, o.max_frac, rng) : h;
        } else if constexpr (std::is_same_v<T, aug::Threshold>) {
          return threshold(h, o.percentile, o.binarize);
        } else {
          throw std::logic_error("raw op in heatmap stage");
        }
      },
      op);
}

}  // namespace

Heatmap draw_view(const VirtualArrayTensor& tensor, const AugmentationSpec& spec, RngStream rng) {
  // Each step owns a child stream, so adding or disabling one step never
  // shifts the draws of the others.
  std::vector<bool> applied(spec.steps.size());
  std::vector<RngStream> step_rng(spec.steps.size());
  for (size_t i = 0; i < spec.steps.size(); ++i) {
    step_rng[i] = rng.split(i);
    applied[i] = step_rng[i].bernoulli(spec.steps[i].apply_prob);
  }

  const VirtualArrayTensor* current = &tensor;
  VirtualArrayTensor scratch;
  for (size_t i = 0; i < spec.steps.size(); ++i) {
    if (!applied[i] || !aug::is_raw(spec.steps[i].op)) continue;
    scratch = apply_raw(*current, spec.steps[i].op, step_rng[i]);
    current = &scratch;
  }
  Heatmap view = integrate_heatmap(*current);
  for (size_t i = 0; i < spec.steps.size(); ++i) {
    if (!applied[i] || aug::is_raw(spec.steps[i].op)) continue;
    view = apply_map(view, spec.steps[i].op, step_rng[i]);
  }
  return view;
}

ViewPair make_views(const VirtualArrayTensor& tensor, const AugmentationSpec& spec, const RngStream& rng,
                    std::string source_id) {
  spec.validate();
  return {draw_view(tensor, spec, rng.split(0)), draw_view(tensor, spec, rng.split(1)), std::move(source_id)};
}

void to_json(json& j, const AugmentationSpec& spec) {
  j = json{{"steps", json::array()}};
  for (const auto& step : spec.steps) {
    json s = std::visit(
        [](const auto& o) -> json {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, aug::AntennaDropout>) return {{"p", o.p}};
          if constexpr (std::is_same_v<T, aug::PhaseNoise>) return {{"alpha", o.alpha}};
          if constexpr (std::is_same_v<T, aug::PolarRotate>) return {{"max_bins", o.max_bins}};
          if constexpr (std::is_same_v<T, aug::CenterCrop>) return {{"min_fraction", o.min_fraction}};
          if constexpr (std::is_same_v<T, aug::HFlip> || std::is_same_v<T, aug::VFlip>) return {{"prob", o.prob}};
          if constexpr (std::is_same_v<T, aug::Cutout>) return {{"max_frac", o.max_frac}, {"prob", o.prob}};
          if constexpr (std::is_same_v<T, aug::Threshold>)
            return {{"percentile", o.percentile}, {"binarize", o.binarize}};
        },
        step.op);
    s["op"] = aug::op_name(step.op);
    s["apply_prob"] = step.apply_prob;
    j["steps"].push_back(std::move(s));
  }
}

void from_json(const json& j, AugmentationSpec& spec) {
  spec.steps.clear();
  for (const json& s : j.at("steps")) {
    const std::string name = s.at("op").get<std::string>();
    aug::Step step;
    step.apply_prob = s.value("apply_prob", 1.0);
    if (name == "antenna_dropout") {
      step.op = aug::AntennaDropout{s.value("p", kDefaultKeepProb)};
    } else if (name == "phase_noise") {
      step.op = aug::PhaseNoise{s.value("alpha", kDefaultPhaseAlpha)};
    } else if (name == "polar_rotate") {
      step.op = aug::PolarRotate{s.value("max_bins", 2)};
    } else if (name == "center_crop") {
      step.op = aug::CenterCrop{s.value("min_fraction", 0.7)};
    } else if (name == "hflip") {
      step.op = aug::HFlip{s.value("prob", 0.5)};
    } else if (name == "vflip") {
      step.op = aug::VFlip{s.value("prob", 0.5)};
    } else if (name == "cutout") {
      step.op = aug::Cutout{s.value("max_frac", 0.25), s.value("prob", 0.5)};
    } else if (name == "threshold") {
      step.op = aug::Threshold{s.value("percentile", 50.0), s.value("binarize", false)};
    } else {
      throw ConfigError("augmentation: unknown op '" + name + "'");
    }
    spec.steps.push_back(step);
  }
}

}  // namespace radkit
