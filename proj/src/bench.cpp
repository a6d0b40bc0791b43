#include "vibelsd/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "vibelsd/bp.hpp"
#include "vibelsd/lsd.hpp"
#include "vibelsd/rng.hpp"

namespace vibelsd {

std::string decoder_name(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::VibeLSD: return "vibelsd";
    case DecoderKind::SingleBPLSD: return "bplsd";
    case DecoderKind::BPOnly: return "bp";
  }
  return "?";
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.shots < 1) throw std::invalid_argument("shots must be >= 1");
  ExperimentResult res;
  res.source = spec.source_label;
  res.distance = spec.distance;
  res.p = spec.p;
  res.decoder = decoder_name(spec.decoder);
  res.ensemble_size = spec.decoder == DecoderKind::VibeLSD ? spec.ensemble.ensemble_size : 1;
  res.limit_m = spec.decoder == DecoderKind::VibeLSD ? spec.ensemble.correction_limit : 1;
  res.iters = spec.ensemble.bp_config.max_iterations;
  res.seed = spec.root_seed;
  res.shots = spec.shots;

  const DetectorErrorModel& dem = spec.dem;
  const std::vector<double> llrs = llr_priors(dem);
  BPConfig serial_cfg = spec.ensemble.bp_config;
  serial_cfg.schedule = Schedule::serial_identity(dem.num_mechanisms);

  std::optional<EnsembleDecoder> ensemble;
  std::optional<BPDecoder> single;
  if (spec.decoder == DecoderKind::VibeLSD) {
    EnsembleConfig cfg = spec.ensemble;
    cfg.root_seed = spec.root_seed;
    ensemble.emplace(dem, cfg);
  } else {
    single.emplace(dem.H, serial_cfg);
  }

  std::ofstream stats_file;
  if (spec.cluster_stats_path) {
    stats_file.open(*spec.cluster_stats_path);
    if (!stats_file) throw std::runtime_error("cannot open " + *spec.cluster_stats_path);
  }

  Xoshiro256ss sampler(split_seed(spec.root_seed, seed_domain::kSampling, 0));
  std::size_t kappa_sum = 0;
  for (std::size_t shot = 0; shot < spec.shots; ++shot) {
    const SampledShot drawn = sample(dem, sampler);
    BitVector correction;
    bool used_lsd = false;
    std::size_t kappa = 0;
    if (spec.decoder == DecoderKind::VibeLSD) {
      const DecodeOutcome outcome = ensemble->decode(drawn.syndrome);
      correction = outcome.correction;
      used_lsd = outcome.path == DecodePath::LSD;
      kappa = outcome.largest_cluster;
    } else {
      single->reset(drawn.syndrome, llrs);
      for (int t = 0; t < serial_cfg.max_iterations; ++t)
        if (single->step()) break;
      if (single->converged()) {
        correction = single->estimate();
      } else if (spec.decoder == DecoderKind::SingleBPLSD) {
        const LsdResult lsd = lsd0_decode(dem.H, drawn.syndrome, single->posteriors());
        correction = lsd.estimate;
        used_lsd = true;
        kappa = lsd.stats.largest_cluster;
      } else {
        correction = single->estimate();  // BP only: hard decision as-is
      }
    }
    if (used_lsd) {
      ++res.lsd_calls;
      kappa_sum += kappa;
      res.max_cluster_overall = std::max(res.max_cluster_overall, kappa);
    }
    if (stats_file.is_open())
      stats_file << shot << ',' << (used_lsd ? "LSD" : "BP") << ',' << kappa << '\n';

    BitVector residual = correction;
    residual.xor_assign(drawn.error);
    if (!matvec_mod2(dem.Lmat, residual).is_zero()) ++res.failures;
  }

  res.logical_error_rate = static_cast<double>(res.failures) / static_cast<double>(res.shots);
  std::tie(res.ci_low, res.ci_high) = binomial_ci(res.failures, res.shots);
  res.mean_largest_cluster =
      res.lsd_calls ? static_cast<double>(kappa_sum) / static_cast<double>(res.lsd_calls) : 0.0;
  return res;
}

double per_round_rate(double p_shot, int rounds) {
  if (!(p_shot >= 0.0 && p_shot <= 0.5)) throw std::invalid_argument("p_shot must be in [0, 0.5]");
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  return (1.0 - std::pow(1.0 - 2.0 * p_shot, 1.0 / rounds)) / 2.0;
}

std::pair<double, double> binomial_ci(std::size_t failures, std::size_t shots) {
  if (shots == 0) throw std::invalid_argument("shots must be >= 1");
  if (failures > shots) throw std::invalid_argument("failures must not exceed shots");
  const double z = 1.959963984540054;  // 97.5th percentile of the standard normal
  const double n = static_cast<double>(shots);
  const double phat = static_cast<double>(failures) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  // The Wilson bounds touch 0 / 1 exactly at the extremes; pin them so
  // rounding noise cannot leak a negative or >1 endpoint.
  const double lo = failures == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = failures == shots ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_csv(const std::vector<ExperimentResult>& results, std::ostream& out) {
  out << "source,distance,p,decoder,ensemble_size,limit_m,iters,shots,failures,ler,ci_low,"
         "ci_high,lsd_calls,max_cluster,mean_largest_cluster,wall_seconds,seed\n";
  for (const auto& r : results) {
    out << r.source << ',' << r.distance << ',' << fmt17(r.p) << ',' << r.decoder << ','
        << r.ensemble_size << ',' << r.limit_m << ',' << r.iters << ',' << r.shots << ','
        << r.failures << ',' << fmt17(r.logical_error_rate) << ',' << fmt17(r.ci_low) << ','
        << fmt17(r.ci_high) << ',' << r.lsd_calls << ',' << r.max_cluster_overall << ','
        << fmt17(r.mean_largest_cluster) << ',' << fmt17(r.wall_seconds) << ',' << r.seed
        << '\n';
  }
}

std::vector<ExperimentResult> read_csv(std::istream& in) {
  std::vector<ExperimentResult> results;
  std::string line;
  if (!std::getline(in, line)) return results;  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 17) throw std::runtime_error("malformed CSV row: " + line);
    ExperimentResult r;
    r.source = fields[0];
    r.distance = std::stoi(fields[1]);
    r.p = std::stod(fields[2]);
    r.decoder = fields[3];
    r.ensemble_size = std::stoull(fields[4]);
    r.limit_m = std::stoull(fields[5]);
    r.iters = std::stoi(fields[6]);
    r.shots = std::stoull(fields[7]);
    r.failures = std::stoull(fields[8]);
    r.logical_error_rate = std::stod(fields[9]);
    r.ci_low = std::stod(fields[10]);
    r.ci_high = std::stod(fields[11]);
    r.lsd_calls = std::stoull(fields[12]);
    r.max_cluster_overall = std::stoull(fields[13]);
    r.mean_largest_cluster = std::stod(fields[14]);
    r.wall_seconds = std::stod(fields[15]);
    r.seed = std::stoull(fields[16]);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace vibelsd
