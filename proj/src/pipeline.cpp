// Copyright 2026 The bgskip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bgskip/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "bgskip/error.hpp"

namespace bgskip {

std::vector<Proposal> RecordedProposer::propose(const Scene& scene) const {
  auto it = by_image_.find(scene.image.image_id);
  return it == by_image_.end() ? std::vector<Proposal>{} : it->second;
}

void PipelineParams::validate() const {
  pcmad.validate();
  eval.validate();
  if (!(nms_iou > 0.0 && nms_iou < 1.0)) throw_config("nms_iou must lie in (0, 1)");
}

Detection remap_detection(const Detection& d, const MRoi& m) {
  constexpr double kTol = 1e-6;
  const Box crop{0.0, 0.0, double(m.scaled_width_px), double(m.scaled_height_px)};
  if (!d.box.valid() || !contains(crop, d.box, kTol)) {
    std::ostringstream os;
    os << "detection (" << d.box.x_min << ", " << d.box.y_min << ", " << d.box.x_max << ", " << d.box.y_max
       << ") lies outside its " << m.scaled_width_px << "x" << m.scaled_height_px << " crop";
    throw_data(os.str());
  }
  const double inv = 1.0 / m.scale;
  return {Box{d.box.x_min * inv + m.box.x_min, d.box.y_min * inv + m.box.y_min, d.box.x_max * inv + m.box.x_min,
              d.box.y_max * inv + m.box.y_min},
          d.score};
}

namespace {

double overlap(const Box& a, const Box& b) {
  if (area(a) <= 0.0 && area(b) <= 0.0) return a == b ? 1.0 : 0.0;
  return iou(a, b);
}

}  // namespace

std::vector<Detection> global_nms(const std::vector<Detection>& dets, double iou_threshold) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return area(dets[a].box) > area(dets[b].box);
  });
  std::vector<Detection> kept;
  for (std::size_t i : order) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return overlap(k.box, dets[i].box) >= iou_threshold;
    });
    if (!suppressed) kept.push_back(dets[i]);
  }
  return kept;
}

namespace {

class StageGate {
 public:
  explicit StageGate(bool concurrent) : concurrent_(concurrent) {}
  template <typename F>
  auto run(F&& f) {
    if (concurrent_) return f();
    std::lock_guard<std::mutex> lock(mu_);
    return f();
  }

 private:
  bool concurrent_;
  std::mutex mu_;
};

ImageResult run_image_gated(const Proposer& proposer, const CropDetector& detector, const Scene& scene,
                            const PipelineParams& params, StageGate& propose_gate, StageGate& detect_gate) {
  ImageResult out;
  auto proposals = propose_gate.run([&] { return proposer.propose(scene); });
  out.plan = pcmad(proposals, scene.image, params.pcmad);

  std::vector<Detection> remapped;
  for (const auto& m : out.plan.mrois) {
    auto local = detect_gate.run([&] { return detector.detect(m, scene); });
    for (const auto& d : local) {
      Detection g = remap_detection(d, m);
      g.box = clamp(g.box, scene.image);
      if (area(g.box) > 0.0) remapped.push_back(g);
    }
  }
  out.detections = global_nms(remapped, params.nms_iou);
  return out;
}

}  // namespace

ImageResult run_image(const Proposer& proposer, const CropDetector& detector, const Scene& scene,
                      const PipelineParams& params) {
  params.validate();
  StageGate pg(true);
  StageGate dg(true);
  try {
    return run_image_gated(proposer, detector, scene, params, pg, dg);
  } catch (const Error& e) {
    throw Error(e.kind(), "image '" + scene.image.image_id + "': " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Internal, "image '" + scene.image.image_id + "': " + e.what());
  }
}

CostReport dataset_cost(const StageProfiles& profiles, const std::vector<CropPlan>& plans) {
  if (plans.empty()) throw_config("cost of an empty dataset");
  double n_sum = 0.0;
  for (const auto& p : plans) n_sum += double(p.image.pixels());
  const double n_mean = n_sum / double(plans.size());
  const double m_over_n = relative_processed_area(plans).avg;
  return reduction_factor(profiles.stage1, profiles.stage2, n_mean, m_over_n * n_mean);
}

DatasetResult run_dataset(const Proposer& proposer, const CropDetector& detector, const std::vector<Scene>& scenes,
                          const PipelineParams& params, const std::optional<StageProfiles>& profiles,
                          unsigned threads) {
  params.validate();
  if (scenes.empty()) throw_config("dataset is empty");

  std::vector<ImageResult> results(scenes.size());
  std::vector<std::string> errors(scenes.size());
  std::vector<ErrorKind> kinds(scenes.size(), ErrorKind::Data);
  StageGate propose_gate(proposer.concurrent_safe());
  StageGate detect_gate(detector.concurrent_safe());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < scenes.size(); i = next++) {
      try {
        results[i] = run_image_gated(proposer, detector, scenes[i], params, propose_gate, detect_gate);
      } catch (const Error& e) {
        errors[i] = e.what();
        kinds[i] = e.kind();
      } catch (const std::exception& e) {
        errors[i] = e.what();
        kinds[i] = ErrorKind::Internal;
      }
    }
  };

  unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n = unsigned(std::min<std::size_t>(n, scenes.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }

  std::ostringstream failed;
  std::size_t n_failed = 0;
  ErrorKind worst = ErrorKind::Data;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (errors[i].empty()) continue;
    if (n_failed < 10) failed << "\n  " << scenes[i].image.image_id << ": " << errors[i];
    if (kinds[i] != ErrorKind::Data) worst = kinds[i];
    ++n_failed;
  }
  if (n_failed > 0) {
    std::ostringstream os;
    os << n_failed << " image(s) failed:" << failed.str();
    if (n_failed > 10) os << "\n  ...";
    throw Error(worst, os.str());
  }

  DatasetResult out;
  std::vector<AnnotatedImage> annotated;
  std::vector<std::vector<Detection>> dets;
  std::vector<CropPlan> plans;
  annotated.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    annotated.push_back({scenes[i].image, scenes[i].objects});
    dets.push_back(results[i].detections);
    plans.push_back(results[i].plan);
  }
  out.eval = evaluate(annotated, &dets, &plans, params.eval);
  if (profiles) out.cost = dataset_cost(*profiles, plans);
  out.images = std::move(results);
  return out;
}

}  // namespace bgskip
