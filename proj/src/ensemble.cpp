#include "vibelsd/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "vibelsd/kernels.hpp"
#include "vibelsd/rng.hpp"

namespace vibelsd {

std::vector<double> average_llrs(const std::vector<std::vector<double>>& llr_vectors) {
  if (llr_vectors.empty()) throw std::invalid_argument("average_llrs needs at least one vector");
  const std::size_t n = llr_vectors.front().size();
  std::vector<double> out(n, 0.0);
  for (const auto& v : llr_vectors) {
    if (v.size() != n) throw std::invalid_argument("average_llrs length mismatch");
    const double norm = std::sqrt(kernels::sum_squares(v.data(), v.size()));
    if (norm == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) out[j] += v[j] / norm;
  }
  const double inv_l = 1.0 / static_cast<double>(llr_vectors.size());
  for (double& x : out) x *= inv_l;
  return out;
}

std::size_t rank_candidates(const std::vector<BitVector>& candidates,
                            std::span<const double> llrs) {
  if (candidates.empty()) throw std::invalid_argument("rank_candidates: empty candidate list");
  std::size_t best = 0;
  double best_weight = HUGE_VAL;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double w = 0.0;
    for (std::uint32_t j : candidates[i].support()) w += llrs[j];
    if (w < best_weight) {
      best_weight = w;
      best = i;
    }
  }
  return best;
}

EnsembleDecoder::EnsembleDecoder(DetectorErrorModel dem, EnsembleConfig config)
    : dem_(std::move(dem)), config_(std::move(config)) {
  if (config_.ensemble_size == 0) throw std::invalid_argument("ensemble_size must be >= 1");
  if (config_.correction_limit == 0 || config_.correction_limit > config_.ensemble_size)
    throw std::invalid_argument("correction_limit must satisfy 1 <= M <= L");
  llrs_ = llr_priors(dem_);

  // Offline setup: Fisher-Yates permutations from per-decoder seed streams;
  // duplicate permutations are redrawn from subsequent streams.
  const std::size_t n = dem_.num_mechanisms;
  std::set<std::vector<std::uint32_t>> distinct;
  std::uint64_t stream = 0;
  for (std::size_t i = 0; i < config_.ensemble_size; ++i) {
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (!(i == 0 && config_.include_identity_permutation)) {
      // With realistic N a collision is a birthday-bound fluke; redraw from
      // the next seed stream when it happens.  The retry cap keeps tiny N
      // (where fewer than L distinct permutations exist) from looping.
      for (int attempt = 0; attempt < 64; ++attempt) {
        std::iota(perm.begin(), perm.end(), 0);
        Xoshiro256ss rng(split_seed(config_.root_seed, seed_domain::kPermutations, stream++));
        for (std::size_t k = n; k > 1; --k) {
          const std::uint64_t r = rng.below(k);
          std::swap(perm[k - 1], perm[r]);
        }
        if (!distinct.contains(perm)) break;
      }
    }
    distinct.insert(perm);
    permutations_.push_back(std::move(perm));
  }
  for (const auto& perm : permutations_) {
    BPConfig cfg = config_.bp_config;
    cfg.schedule = Schedule::serial(perm);
    decoders_.push_back(std::make_unique<BPDecoder>(dem_.H, std::move(cfg)));
  }
}

DecodeOutcome EnsembleDecoder::decode(const BitVector& s) {
  if (s.length() != dem_.num_detectors) throw std::invalid_argument("syndrome length mismatch");
  const std::size_t l = decoders_.size();
  for (auto& d : decoders_) d->reset(s, llrs_);

  // Lockstep round-robin, one iteration per decoder per round; stop at the
  // end of the round in which the M-th convergence lands.
  std::vector<std::size_t> converged_idx;
  std::vector<std::uint8_t> done(l, 0);
  for (int t = 0; t < config_.bp_config.max_iterations; ++t) {
    bool all_done = true;
    for (std::size_t i = 0; i < l; ++i) {
      if (done[i]) continue;
      if (decoders_[i]->step()) {
        done[i] = 1;
        converged_idx.push_back(i);
      } else {
        all_done = false;
      }
    }
    if (converged_idx.size() >= config_.correction_limit || all_done) break;
  }

  DecodeOutcome out;
  out.converged_count = converged_idx.size();
  if (!converged_idx.empty()) {
    // Candidate order = ascending decoder index, so rank_candidates' tie
    // break (lowest list index) realises "lowest decoder index".
    std::sort(converged_idx.begin(), converged_idx.end());
    std::vector<BitVector> candidates;
    candidates.reserve(converged_idx.size());
    for (std::size_t i : converged_idx) candidates.push_back(decoders_[i]->estimate());
    const std::size_t best = rank_candidates(candidates, llrs_);
    out.correction = candidates[best];
    out.path = DecodePath::ConvergedBP;
  } else {
    std::vector<std::vector<double>> posteriors;
    posteriors.reserve(l);
    for (const auto& d : decoders_) posteriors.push_back(d->posteriors());
    const std::vector<double> averaged = average_llrs(posteriors);
    LsdResult lsd = lsd0_decode(dem_.H, s, averaged);
    out.correction = std::move(lsd.estimate);
    out.path = DecodePath::LSD;
    out.largest_cluster = lsd.stats.largest_cluster;
  }
  for (std::uint32_t j : out.correction.support()) out.solution_weight += llrs_[j];
  return out;
}

}  // namespace vibelsd
