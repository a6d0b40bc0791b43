#pragma once

#include <memory>
#include <span>
#include <vector>

#include "vibelsd/bp.hpp"
#include "vibelsd/dem.hpp"
#include "vibelsd/lsd.hpp"

namespace vibelsd {

struct EnsembleConfig {
  std::size_t ensemble_size = 32;    // L
  std::size_t correction_limit = 5;  // M, 1 <= M <= L
  BPConfig bp_config{.max_iterations = 20, .schedule = Schedule::parallel()};
  std::uint64_t root_seed = 0;
  bool include_identity_permutation = true;

  // Paper-reported settings: L=32, M=5, T=20 up to d=11; L=64, M=7, T=25 above.
  static EnsembleConfig defaults_for_distance(int d) {
    EnsembleConfig cfg;
    if (d > 11) {
      cfg.ensemble_size = 64;
      cfg.correction_limit = 7;
      cfg.bp_config.max_iterations = 25;
    }
    return cfg;
  }
};

enum class DecodePath { ConvergedBP, LSD };

struct DecodeOutcome {
  BitVector correction;
  DecodePath path = DecodePath::ConvergedBP;
  std::size_t converged_count = 0;
  double solution_weight = 0.0;     // sum of channel LLRs over supp(correction)
  std::size_t largest_cluster = 0;  // kappa, LSD path only
};

// Normalised LLR average: (1/L) * sum_i v_i / ||v_i||_2; zero-norm vectors
// contribute a zero term.
std::vector<double> average_llrs(const std::vector<std::vector<double>>& llr_vectors);

// Index of the candidate minimising sum_{j in supp} llrs[j]; ties broken by
// lowest index.
std::size_t rank_candidates(const std::vector<BitVector>& candidates,
                            std::span<const double> llrs);

// VibeLSD: L permuted-serial min-sum BP decoders run in lockstep round-robin
// (the deterministic reference mode); decoding stops after the round in
// which the M-th decoder converges.  Converged candidates are ranked by
// prior likelihood; if none converged the averaged posterior LLRs order the
// LSD-0 cluster growth.
class EnsembleDecoder {
 public:
  EnsembleDecoder(DetectorErrorModel dem, EnsembleConfig config);

  DecodeOutcome decode(const BitVector& s);

  const DetectorErrorModel& dem() const { return dem_; }
  const EnsembleConfig& config() const { return config_; }
  const std::vector<std::vector<std::uint32_t>>& permutations() const { return permutations_; }
  std::span<const double> channel_llrs() const { return llrs_; }

 private:
  DetectorErrorModel dem_;
  EnsembleConfig config_;
  std::vector<double> llrs_;
  std::vector<std::vector<std::uint32_t>> permutations_;
  std::vector<std::unique_ptr<BPDecoder>> decoders_;
};

}  // namespace vibelsd
