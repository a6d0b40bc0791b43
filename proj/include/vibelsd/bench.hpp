#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vibelsd/dem.hpp"
#include "vibelsd/ensemble.hpp"

namespace vibelsd {

enum class DecoderKind { VibeLSD, SingleBPLSD, BPOnly };

std::string decoder_name(DecoderKind kind);

struct ExperimentSpec {
  std::string source_label;  // DEM path or "tiling:d:p" descriptor
  DetectorErrorModel dem;
  int distance = 0;  // 0 when unknown (external DEM)
  double p = 0.0;    // 0 when unknown (external DEM)
  DecoderKind decoder = DecoderKind::VibeLSD;
  EnsembleConfig ensemble;  // bp_config also used by the non-ensemble decoders
  std::size_t shots = 1;
  std::uint64_t root_seed = 0;
  std::optional<std::string> cluster_stats_path;  // per-shot "index,path,kappa" lines
};

struct ExperimentResult {
  // Echoed spec fields (CSV columns).
  std::string source;
  int distance = 0;
  double p = 0.0;
  std::string decoder;
  std::size_t ensemble_size = 0;
  std::size_t limit_m = 0;
  int iters = 0;
  std::uint64_t seed = 0;
  // Measured statistics.
  std::size_t shots = 0;
  std::size_t failures = 0;
  double logical_error_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t lsd_calls = 0;
  std::size_t max_cluster_overall = 0;
  double mean_largest_cluster = 0.0;  // mean kappa over LSD-path shots
  // Reported as 0 so that identically seeded runs emit byte-identical CSV;
  // the CLI prints measured wall time separately.
  double wall_seconds = 0.0;
};

// Runs the Monte-Carlo X-memory experiment: sample shot, decode, count a
// failure iff Lmat * (e xor e_hat) != 0.  Deterministic for a fixed spec.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Parity-preserving conversion of a whole-shot error rate to a per-round
// rate: (1 - (1 - 2 p)^(1/rounds)) / 2.
double per_round_rate(double p_shot, int rounds);

// 95% Wilson score interval.
std::pair<double, double> binomial_ci(std::size_t failures, std::size_t shots);

// CSV schema:
// source,distance,p,decoder,ensemble_size,limit_m,iters,shots,failures,ler,
// ci_low,ci_high,lsd_calls,max_cluster,mean_largest_cluster,wall_seconds,seed
void write_csv(const std::vector<ExperimentResult>& results, std::ostream& out);
std::vector<ExperimentResult> read_csv(std::istream& in);

}  // namespace vibelsd
