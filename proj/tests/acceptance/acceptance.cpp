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
// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "oracles.hpp"
#include "radkit/augment.hpp"
#include "radkit/contrastive.hpp"
#include "radkit/encoder.hpp"
#include "radkit/eval.hpp"
#include "radkit/io.hpp"
#include "radkit/parallel.hpp"
#include "radkit/simulator.hpp"
#include "radkit/trainer.hpp"

namespace {

using namespace radkit;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1 ---------------------------------------------------------------------------

Outcome gradient_suite() {
  RngStream r(101, 1);
  double worst_loss = 0.0, worst_enc = 0.0;
  const size_t batches[] = {2, 4, 8};
  for (int c = 0; c < 20; ++c) {
    const size_t b = batches[c % 3];
    ContrastiveConfig cfg;
    cfg.temperature = r.uniform(0.2, 1.0);
    cfg.lambda_cross = (c % 4 == 0) ? 0.0 : r.uniform(0.1, 2.0);
    cfg.symmetric_cross = (c % 5 == 1);
    cfg.negatives = (c % 6 == 2) ? NegativesVariant::kSameView : NegativesVariant::kOtherView;

    // Loss gradients wrt raw embeddings.
    const size_t d = 4 + r.below(5);
    EmbeddingBatch eb;
    eb.z = oracle::random_unit_rows(b, d, r);
    eb.z_prime = oracle::random_unit_rows(b, d, r);
    eb.z_vision = oracle::random_unit_rows(b, d, r);
    const LossGradients lg = loss_gradients(eb, cfg);
    std::vector<double> flat = eb.z.data;
    flat.insert(flat.end(), eb.z_prime.data.begin(), eb.z_prime.data.end());
    const auto numeric = oracle::central_difference(
        [&](const std::vector<double>& x) {
          EmbeddingBatch q = eb;
          std::copy(x.begin(), x.begin() + static_cast<long>(b * d), q.z.data.begin());
          std::copy(x.begin() + static_cast<long>(b * d), x.end(), q.z_prime.data.begin());
          return composite_loss(q, cfg).total;
        },
        flat, 1e-6);
    std::vector<double> analytic = lg.d_z.data;
    analytic.insert(analytic.end(), lg.d_z_prime.data.begin(), lg.d_z_prime.data.end());
    worst_loss = std::max(worst_loss, oracle::max_relative_error(analytic, numeric));

    // End to end through the encoder: composite loss of encoded views wrt
    // every parameter.
    const size_t in = 10 + r.below(6), hid = 6 + r.below(4), emb = d;
    EncoderParams p = init_params<double>({{in, hid, emb}, {emb, emb, emb}}, r.split(static_cast<uint64_t>(c)));
    for (size_t i = 0; i < p.num_layers(); ++i)
      for (auto& v : p.layer(i).bias) v = r.uniform(-0.1, 0.1);
    std::vector<double> x(2 * b * in);
    for (auto& v : x) v = r.uniform(0.0, 2.0);
    auto encode = [&](const EncoderParams& q, ForwardCache<double>* keep) {
      ForwardCache<double> cache = forward_batch<double>(q, x, 2 * b);
      EmbeddingBatch e;
      e.z = EmbeddingMatrix(b, emb, {cache.projected.begin(), cache.projected.begin() + static_cast<long>(b * emb)});
      e.z_prime = EmbeddingMatrix(b, emb, {cache.projected.begin() + static_cast<long>(b * emb), cache.projected.end()});
      e.z_vision = eb.z_vision;
      if (keep) *keep = std::move(cache);
      return e;
    };
    ForwardCache<double> cache;
    const EmbeddingBatch e = encode(p, &cache);
    const LossGradients g = loss_gradients(e, cfg);
    std::vector<double> upstream = g.d_z.data;
    upstream.insert(upstream.end(), g.d_z_prime.data.begin(), g.d_z_prime.data.end());
    const GradientSet grads = backward<double>(p, cache, upstream);
    const auto enc_numeric = oracle::central_difference(
        [&](const std::vector<double>& flat_p) {
          EncoderParams q = p;
          oracle::unflatten(q, flat_p);
          return composite_loss(encode(q, nullptr), cfg).total;
        },
        oracle::flatten(p), 1e-5);
    worst_enc = std::max(worst_enc, oracle::max_relative_error(oracle::flatten(grads), enc_numeric));
  }
  Outcome o;
  o.pass = worst_loss < 1e-6 && worst_enc < 1e-6;
  o.detail = "20 configs, max rel err loss " + fmt("%.2e", worst_loss) + ", encoder " + fmt("%.2e", worst_enc);
  return o;
}

// 2 ---------------------------------------------------------------------------

Outcome loss_closed_forms() {
  const double expect_two = std::log1p(std::exp(-1.0));
  EmbeddingBatch two;
  two.z = EmbeddingMatrix(2, 3, {1, 0, 0, 0, 1, 0});
  two.z_prime = two.z;
  const double got_two = intra_pair_loss(two, 0, Direction::kViewToOther, 1.0);

  double worst_logb = 0.0;
  for (size_t b : {2u, 4u, 8u, 16u}) {
    EmbeddingBatch same;
    same.z = EmbeddingMatrix(b, 4);
    for (size_t i = 0; i < b; ++i) same.z.row(i)[2] = 1.0;
    same.z_prime = same.z;
    for (size_t i = 0; i < b; ++i)
      worst_logb = std::max(worst_logb, std::abs(intra_pair_loss(same, i, Direction::kViewToOther, 0.1) -
                                                  std::log(static_cast<double>(b))));
  }

  RngStream r(102, 2);
  bool bit_exact = true;
  for (int t = 0; t < 50; ++t) {
    EmbeddingBatch eb;
    eb.z = oracle::random_unit_rows(8, 16, r);
    eb.z_prime = oracle::random_unit_rows(8, 16, r);
    eb.z_vision = oracle::random_unit_rows(8, 16, r);
    bit_exact = bit_exact && composite_loss(eb, {0.1, 0.0}).total == intra_loss(eb, 0.1);
  }
  Outcome o;
  const double err_two = std::abs(got_two - expect_two);
  o.pass = err_two <= 1e-9 && worst_logb <= 1e-9 && bit_exact;
  o.detail = "B=2 err " + fmt("%.1e", err_two) + ", log B err " + fmt("%.1e", worst_logb) +
             ", lambda=0 bit-exact " + (bit_exact ? "yes" : "no");
  return o;
}

// 3 ---------------------------------------------------------------------------

Outcome augmentation_identities() {
  RngStream r(103, 3);
  VirtualArrayTensor t(12, 32, 32);
  for (auto& v : t.data) v = {static_cast<float>(r.normal()), static_cast<float>(r.normal())};

  RngStream rr = r.split(1);
  const bool rmm_identity = rmm(t, 1.0, 0.0, rr).data == integrate_heatmap(t).data;

  double worst_mod = 0.0;
  for (double alpha : {0.05, 0.1, 0.5, 0.99}) {
    RngStream pr = r.split(static_cast<uint64_t>(alpha * 1000));
    const auto p = phase_noise(t, alpha, pr);
    for (size_t i = 0; i < t.data.size(); ++i) {
      const double before = std::abs(std::complex<double>(t.data[i]));
      const double after = std::abs(std::complex<double>(p.data[i]));
      if (before > 0.0) worst_mod = std::max(worst_mod, std::abs(after - before) / before);
    }
  }

  RngStream dr = r.split(2);
  size_t kept = 0;
  const size_t trials = 10000;
  for (size_t i = 0; i < trials; ++i) {
    const VirtualArrayTensor d = antenna_dropout(t, 0.9, dr);
    for (size_t k = 0; k < d.num_virtual; ++k) kept += d.slab(k)[0] != std::complex<float>(0.0f, 0.0f);
  }
  const double rate = static_cast<double>(kept) / static_cast<double>(trials * t.num_virtual);

  bool flips = true;
  for (int i = 0; i < 20; ++i) {
    Heatmap h(5 + static_cast<size_t>(i), 3 + static_cast<size_t>(2 * i));
    for (auto& v : h.data) v = static_cast<float>(r.uniform());
    flips = flips && hflip(hflip(h)).data == h.data && vflip(vflip(h)).data == h.data;
  }
  Outcome o;
  o.pass = rmm_identity && worst_mod <= 1e-6 && rate >= 0.895 && rate <= 0.905 && flips;
  o.detail = std::string("rmm identity ") + (rmm_identity ? "yes" : "no") + ", modulus rel err " +
             fmt("%.1e", worst_mod) + ", keep rate " + fmt("%.4f", rate) + ", flips " + (flips ? "exact" : "broken");
  return o;
}

// 4 ---------------------------------------------------------------------------

Outcome simulator_correctness() {
  const PolarGrid grid = default_grid();
  const ArrayGeometry geom = default_geometry();
  const double k = static_cast<double>(geom.num_virtual());
  RngStream r(104, 4);
  size_t hits = 0;
  double worst_peak = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const size_t l0 = r.below(grid.num_range);
    const size_t a0 = r.below(grid.num_azimuth);
    const double amp = r.uniform(0.2, 3.0);
    Scene s;
    s.id = "acc";
    s.scatterers.push_back({grid.range_at(l0), grid.azimuth_at(a0), amp, 1.0, 0.0});
    const Heatmap h = integrate_heatmap(synthesize_tensor(s, geom, grid, {}, r.split(static_cast<uint64_t>(trial))));
    const size_t best = static_cast<size_t>(std::max_element(h.data.begin(), h.data.end()) - h.data.begin());
    hits += best == l0 * grid.num_azimuth + a0;
    worst_peak = std::max(worst_peak, std::abs(h.at(l0, a0) - amp * k) / (amp * k));
  }
  Outcome o;
  o.pass = hits == 100 && worst_peak <= 1e-4;
  o.detail = std::to_string(hits) + "/100 argmax at true bin, peak rel err " + fmt("%.1e", worst_peak);
  return o;
}

// 5 ---------------------------------------------------------------------------

Outcome iou_oracle() {
  std::vector<std::pair<RotatedBox, RotatedBox>> pairs;
  RngStream r(105, 5);
  for (int i = 0; i < 200; ++i) {
    const RotatedBox a{0.0, 0.0, r.uniform(1.0, 5.0), r.uniform(0.5, 3.0), r.uniform(-kPi, kPi), std::nullopt};
    const RotatedBox b{r.uniform(-1.5, 1.5), r.uniform(-1.5, 1.5), r.uniform(1.0, 5.0), r.uniform(0.5, 3.0),
                       r.uniform(-kPi, kPi), std::nullopt};
    pairs.emplace_back(a, b);
  }
  std::vector<double> err(pairs.size());
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (size_t i = 0; i < pairs.size(); ++i)
    err[i] = std::abs(rotated_iou(pairs[i].first, pairs[i].second) -
                      oracle::monte_carlo_iou(pairs[i].first, pairs[i].second, RngStream(205, i), 1000));
  const double worst = *std::max_element(err.begin(), err.end());

  const RotatedBox sq{0, 0, 2, 2, 0, std::nullopt};
  const RotatedBox shifted{1, 0, 2, 2, 0, std::nullopt};
  const RotatedBox turned{0, 0, 2, 2, kPi / 4, std::nullopt};
  const double e_third = std::abs(rotated_iou(sq, shifted) - 1.0 / 3.0);
  const double octagon = 8.0 * (std::sqrt(2.0) - 1.0);
  const double e_oct = std::abs(rotated_iou(sq, turned) - octagon / (8.0 - octagon));
  Outcome o;
  o.pass = worst <= 2e-3 && e_third <= 1e-3 && e_oct <= 1e-3;
  o.detail = "200 pairs vs 1e6-point MC max err " + fmt("%.2e", worst) + ", 1/3 case err " + fmt("%.1e", e_third) +
             ", rotated square err " + fmt("%.1e", e_oct);
  return o;
}

// 6 ---------------------------------------------------------------------------

// Every instance of at most five boxes built from a small vocabulary: one or
// two ground truths (second one in the same or another frame), each
// detection a hit, partial hit or miss on some ground truth, scores from a
// three-level set so ties occur.
Outcome ap_oracle() {
  const RotatedBox g0{0.0, 10.0, 4.5, 1.9, 0.0, std::nullopt};
  const RotatedBox g1{6.0, 14.0, 4.5, 1.9, 0.4, std::nullopt};
  auto partial = [](RotatedBox b) {
    b.cy += 0.25 * b.length * std::cos(b.yaw);
    b.cx += 0.25 * b.length * std::sin(b.yaw);
    return b;
  };
  const RotatedBox miss{-12.0, 25.0, 4.5, 1.9, 1.0, std::nullopt};
  const double scores[] = {0.2, 0.5, 0.8};

  size_t instances = 0, mismatches = 0;
  for (int layout = 0; layout < 3; ++layout) {
    std::vector<Detection> gts{{"f0", g0}};
    if (layout == 1) gts.push_back({"f0", g1});
    if (layout == 2) gts.push_back({"f1", g1});
    std::vector<Detection> vocab;
    for (const auto& g : gts) {
      vocab.push_back({g.frame_id, g.box});
      vocab.push_back({g.frame_id, partial(g.box)});
    }
    vocab.push_back({"f0", miss});
    if (layout == 2) vocab.push_back({"f1", miss});
    const size_t choices = vocab.size() * 3;
    const size_t max_dets = 5 - gts.size();
    for (size_t n = 0; n <= max_dets; ++n) {
      size_t total = 1;
      for (size_t i = 0; i < n; ++i) total *= choices;
      for (size_t code = 0; code < total; ++code) {
        std::vector<Detection> dets;
        size_t c = code;
        for (size_t i = 0; i < n; ++i) {
          Detection d = vocab[(c % choices) / 3];
          d.box.score = scores[c % 3];
          dets.push_back(d);
          c /= choices;
        }
        for (double thr : {0.5, 0.75}) {
          ++instances;
          mismatches += average_precision(dets, gts, thr) != oracle::brute_force_ap(dets, gts, thr);
        }
      }
    }
  }
  std::vector<Detection> dets, gts;
  oracle::hand_ap_case(dets, gts);
  const double hand = average_precision(dets, gts, 0.5);
  Outcome o;
  o.pass = mismatches == 0 && std::abs(hand - 0.8350) <= 1e-4;
  o.detail = std::to_string(instances) + " instances, " + std::to_string(mismatches) + " mismatches, hand case " +
             fmt("%.6f", hand);
  return o;
}

// 7, 8, 10 ------------------------------------------------------------------

// Desk-scale experiment shared by the pretraining-benefit, retrieval and
// label-efficiency criteria.
struct SeedRun {
  std::vector<SweepRow> sweep;
  RetrievalReport retrieval;
  double loss_first = 0.0;
  double loss_last = 0.0;
};

AugmentationSpec experiment_augmentation() {
  AugmentationSpec spec = AugmentationSpec::defaults();
  spec.steps.erase(std::remove_if(spec.steps.begin(), spec.steps.end(),
                                  [](const aug::Step& s) { return std::holds_alternative<aug::HFlip>(s.op); }),
                   spec.steps.end());
  return spec;
}

TrainConfig experiment_train_config(uint64_t seed) {
  TrainConfig c;
  c.seed = seed;
  c.batch_size = 32;
  c.steps = 500;
  c.lr_base = 0.05;
  c.contrastive.lambda_cross = 1.0;
  c.backbone_hidden = {256};
  c.embed_dim = 128;
  c.holdout = 256;
  c.augmentation = experiment_augmentation();
  return c;
}

SimConfig experiment_sim_config() {
  SimConfig s;
  s.noise_floor = 0.3;
  return s;
}

SeedRun run_seed(uint64_t seed) {
  const Dataset ds = make_synthetic_dataset(2000, 1000 + seed, 2000 + seed, {}, experiment_sim_config());
  const TrainConfig tc = experiment_train_config(seed);
  const PretrainResult pr = pretrain(tc, ds);
  SeedRun out;
  out.loss_first = pr.log.front().l_total;
  out.loss_last = pr.log.back().l_total;
  ProbeConfig pc;
  pc.ridge_lambda = 10.0;
  pc.holdout = 256;
  pc.seed = seed;
  out.sweep = label_efficiency_sweep(pr.params, pr.initial, ds, default_label_fractions(), pc);
  RetrievalConfig rc;
  rc.holdout = 256;
  rc.k = 1;
  rc.seed = seed;
  rc.augmentation = tc.augmentation;
  rc.oracle_seed = tc.oracle_seed;
  rc.oracle_max_scatterers = tc.oracle_max_scatterers;
  out.retrieval = evaluate_retrieval(pr.params, ds, rc);
  return out;
}

Outcome pretraining_benefit(const std::vector<SeedRun>& runs, double seconds) {
  std::vector<double> gains;
  size_t wins = 0;
  std::string per_seed;
  for (const auto& r : runs) {
    const SweepRow& full = r.sweep.back();
    const double gain = (full.random_init.rmse - full.pretrained.rmse) / full.random_init.rmse;
    gains.push_back(gain);
    wins += full.pretrained.rmse < full.random_init.rmse;
    per_seed += fmt(" %.1f%%", 100.0 * gain);
  }
  const double med = median(gains);
  std::vector<double> first, last;
  for (const auto& r : runs) {
    first.push_back(r.loss_first);
    last.push_back(r.loss_last);
  }
  Outcome o;
  o.pass = wins >= 4 && med >= 0.20 && seconds < 600.0;
  o.detail = std::to_string(wins) + "/5 seeds beat random init, median gain " + fmt("%.1f%%", 100.0 * med) +
             " (per seed" + per_seed + "), " + fmt("%.0f s", seconds) +
             "; info: median loss " + fmt("%.3f", median(first)) + fmt(" -> %.3f", median(last));
  return o;
}

Outcome retrieval_above_chance(const std::vector<SeedRun>& runs) {
  const double n = 256.0;
  const double p = 1.0 / n;
  const double vision_bar = p + 3.0 * std::sqrt(p * (1.0 - p) / n);
  bool ok = true;
  std::string rr, rv, proto;
  for (const auto& r : runs) {
    ok = ok && r.retrieval.n == 256 && r.retrieval.radar_radar > 5.0 / n && r.retrieval.radar_vision > vision_bar;
    rr += fmt(" %.3f", r.retrieval.radar_radar);
    rv += fmt(" %.3f", r.retrieval.radar_vision);
    proto += fmt(" %.3f", r.retrieval.radar_vision_prototype);
  }
  Outcome o;
  o.pass = ok;
  o.detail = "radar-radar top-1" + rr + " (bar " + fmt("%.4f", 5.0 / n) + "); radar-vision top-1" + rv + " (bar " +
             fmt("%.4f", vision_bar) + "); info: view-prototype query top-1" + proto;
  return o;
}

Outcome label_efficiency(const std::vector<SeedRun>& runs) {
  const auto fractions = default_label_fractions();
  bool ok = true;
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  std::string table;
  for (size_t f = 0; f < fractions.size(); ++f) {
    std::vector<double> pre, rnd;
    for (const auto& r : runs) {
      pre.push_back(r.sweep[f].pretrained.rmse);
      rnd.push_back(r.sweep[f].random_init.rmse);
    }
    const double mp = median(pre), mr = median(rnd);
    ok = ok && mp <= mr;
    monotone = monotone && mp <= prev;
    prev = mp;
    table += fmt(" %g%%:", 100.0 * fractions[f]) + fmt(" %.2f", mp) + fmt("/%.2f", mr);
  }
  Outcome o;
  o.pass = ok && fractions.size() == 5;
  o.detail = "median RMSE pretrained/random m," + table + "; info: pretrained median " +
             (monotone ? "non-increasing" : "not monotone") + " in fraction";
  return o;
}

// 9 ---------------------------------------------------------------------------

struct DeterminismArtifacts {
  std::vector<std::vector<uint8_t>> tensors;
  std::vector<uint8_t> checkpoint;
  std::string reports;
};

DeterminismArtifacts determinism_run(int workers) {
  set_worker_count(workers);
  const Dataset ds = make_synthetic_dataset(200, 31, 32, {}, experiment_sim_config());
  DeterminismArtifacts a;
  for (const auto& s : ds.samples) a.tensors.push_back(encode_tensor(s.tensor));
  TrainConfig tc = experiment_train_config(3);
  tc.steps = 40;
  tc.batch_size = 16;
  tc.holdout = 64;
  tc.checkpoint_every = 10;
  std::vector<std::vector<uint8_t>> checkpoints;
  PretrainHooks hooks;
  std::string metrics;
  hooks.on_step = [&](const StepLog& s) { metrics += nlohmann::json(s).dump() + "\n"; };
  hooks.on_checkpoint = [&](const EncoderParams& p, uint64_t step) {
    const auto bytes = encode_checkpoint(p, step);
    a.checkpoint.insert(a.checkpoint.end(), bytes.begin(), bytes.end());
  };
  const PretrainResult pr = pretrain(tc, ds, hooks);
  ProbeConfig pc;
  pc.holdout = 64;
  const auto sweep = label_efficiency_sweep(pr.params, pr.initial, ds, {0.1, 1.0}, pc);
  RetrievalConfig rc;
  rc.holdout = 64;
  rc.augmentation = tc.augmentation;
  nlohmann::json report = {{"metrics", metrics},
                           {"probe", sweep.back().pretrained},
                           {"retrieval", evaluate_retrieval(pr.params, ds, rc)}};
  a.reports = report.dump();
  set_worker_count(0);
  return a;
}

Outcome determinism() {
  const DeterminismArtifacts a = determinism_run(1);
  const DeterminismArtifacts b = determinism_run(4);
  const bool tensors = a.tensors == b.tensors;
  const bool ckpt = !a.checkpoint.empty() && a.checkpoint == b.checkpoint;
  const bool reports = a.reports == b.reports;
  Outcome o;
  o.pass = tensors && ckpt && reports;
  o.detail = std::string("tensors ") + (tensors ? "identical" : "differ") + ", checkpoints " +
             (ckpt ? "identical" : "differ") + ", reports " + (reports ? "identical" : "differ") +
             " (1 worker vs 4)";
  return o;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(clock::now() - t0).count();
    failures += !o.pass;
    std::printf("[%s] %2d %-24s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), s);
    std::fflush(stdout);
  };

  report(1, "gradient-suite", [&] {
    const auto t0 = clock::now();
    Outcome o = gradient_suite();
    const double s = std::chrono::duration<double>(clock::now() - t0).count();
    o.pass = o.pass && s < 30.0;
    return o;
  });
  report(2, "loss-closed-forms", loss_closed_forms);
  report(3, "augmentation-identities", augmentation_identities);
  report(4, "simulator-correctness", simulator_correctness);
  report(5, "iou-oracle", [&] {
    const auto t0 = clock::now();
    Outcome o = iou_oracle();
    o.pass = o.pass && std::chrono::duration<double>(clock::now() - t0).count() < 120.0;
    return o;
  });
  report(6, "ap-oracle", ap_oracle);

  std::vector<SeedRun> runs;
  double experiment_seconds = 0.0;
  std::string experiment_error;
  {
    const auto t0 = clock::now();
    try {
      for (uint64_t seed = 0; seed < 5; ++seed) runs.push_back(run_seed(seed));
    } catch (const std::exception& e) {
      experiment_error = e.what();
    }
    experiment_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  }
  auto shared = [&](const std::function<Outcome()>& fn) {
    return [&, fn] {
      if (!experiment_error.empty()) return Outcome{false, "experiment failed: " + experiment_error};
      return fn();
    };
  };
  report(7, "pretraining-benefit", shared([&] { return pretraining_benefit(runs, experiment_seconds); }));
  report(8, "retrieval-above-chance", shared([&] { return retrieval_above_chance(runs); }));
  report(9, "determinism", determinism);
  report(10, "label-efficiency", shared([&] { return label_efficiency(runs); }));

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
