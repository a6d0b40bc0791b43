#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vibelsd/bench.hpp"
#include "vibelsd/colour_code.hpp"

using namespace vibelsd;

namespace {

ExperimentSpec hex_spec(int d, double p, DecoderKind decoder, std::size_t shots,
                        std::uint64_t seed) {
  const ColourCodeLattice lattice = build_colour_code(Tiling::Hex666, d);
  ExperimentSpec spec;
  spec.source_label = "hex666:" + std::to_string(d) + ":" + std::to_string(p);
  spec.dem = code_capacity_dem(lattice.H, lattice.logical, p);
  spec.distance = d;
  spec.p = p;
  spec.decoder = decoder;
  spec.shots = shots;
  spec.root_seed = seed;
  return spec;
}

bool results_equal(const ExperimentResult& a, const ExperimentResult& b) {
  return a.source == b.source && a.distance == b.distance && a.p == b.p &&
         a.decoder == b.decoder && a.ensemble_size == b.ensemble_size &&
         a.limit_m == b.limit_m && a.iters == b.iters && a.shots == b.shots &&
         a.failures == b.failures && a.logical_error_rate == b.logical_error_rate &&
         a.ci_low == b.ci_low && a.ci_high == b.ci_high && a.lsd_calls == b.lsd_calls &&
         a.max_cluster_overall == b.max_cluster_overall &&
         a.mean_largest_cluster == b.mean_largest_cluster &&
         a.wall_seconds == b.wall_seconds && a.seed == b.seed;
}

}  // namespace

TEST_CASE("per_round_rate worked values") {
  CHECK(per_round_rate(0.0, 10) == 0.0);
  CHECK(per_round_rate(0.3, 1) == doctest::Approx(0.3).epsilon(1e-15));
  // 1 - (1 - 2q)^r = 2p with p=0.18, r=2 gives q = (1 - sqrt(0.64)) / 2.
  CHECK(per_round_rate(0.18, 2) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(per_round_rate(0.05278640450004206, 1) ==
        doctest::Approx(0.05278640450004206).epsilon(1e-12));
  CHECK_THROWS_AS(per_round_rate(0.6, 3), std::invalid_argument);
  CHECK_THROWS_AS(per_round_rate(-0.1, 3), std::invalid_argument);
  CHECK_THROWS_AS(per_round_rate(0.1, 0), std::invalid_argument);

  // Parity preservation: r independent rounds at the converted rate
  // compose back to the whole-shot rate.
  const int r = 7;
  const double q = per_round_rate(0.2, r);
  double composed = 0.0;
  for (int i = 0; i < r; ++i) composed = composed * (1.0 - q) + (1.0 - composed) * q;
  CHECK(composed == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("binomial_ci Wilson values") {
  auto [lo, hi] = binomial_ci(0, 100);
  CHECK(lo == 0.0);
  CHECK(hi > 0.0);
  CHECK(hi < 0.05);

  std::tie(lo, hi) = binomial_ci(50, 100);
  CHECK(lo == doctest::Approx(1.0 - hi).epsilon(1e-12));  // symmetric about 0.5
  CHECK(lo > 0.40);
  CHECK(hi < 0.60);

  // Reference values computed independently for the Wilson interval.
  std::tie(lo, hi) = binomial_ci(10, 1000);
  CHECK(lo == doctest::Approx(0.00543).epsilon(2e-2));
  CHECK(hi == doctest::Approx(0.01832).epsilon(2e-2));

  std::tie(lo, hi) = binomial_ci(1000, 1000);
  CHECK(hi == 1.0);
  CHECK_THROWS_AS(binomial_ci(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(binomial_ci(2, 1), std::invalid_argument);
}

TEST_CASE("decoder_name") {
  CHECK(decoder_name(DecoderKind::VibeLSD) == "vibelsd");
  CHECK(decoder_name(DecoderKind::SingleBPLSD) == "bplsd");
  CHECK(decoder_name(DecoderKind::BPOnly) == "bp");
}

TEST_CASE("CSV round trip") {
  std::vector<ExperimentResult> results;
  std::ostringstream empty;
  write_csv(results, empty);
  std::istringstream empty_in(empty.str());
  CHECK(read_csv(empty_in).empty());

  Xoshiro256ss rng(5);
  for (int i = 0; i < 50; ++i) {
    ExperimentResult r;
    r.source = "hex666:" + std::to_string(3 + 2 * (i % 4)) + ":0.05";
    r.distance = 3 + 2 * (i % 4);
    r.p = rng.next_double() * 0.3;
    r.decoder = i % 2 ? "vibelsd" : "bplsd";
    r.ensemble_size = 32;
    r.limit_m = 5;
    r.iters = 20;
    r.shots = 1000 + i;
    r.failures = i;
    r.logical_error_rate = static_cast<double>(r.failures) / static_cast<double>(r.shots);
    std::tie(r.ci_low, r.ci_high) = binomial_ci(r.failures, r.shots);
    r.lsd_calls = 7 * i;
    r.max_cluster_overall = i;
    r.mean_largest_cluster = rng.next_double() * 10.0;
    r.seed = rng.next();
    results.push_back(std::move(r));
  }
  std::ostringstream out;
  write_csv(results, out);
  std::istringstream in(out.str());
  const std::vector<ExperimentResult> round = read_csv(in);
  REQUIRE(round.size() == results.size());
  for (std::size_t i = 0; i < results.size(); ++i) CHECK(results_equal(results[i], round[i]));

  std::istringstream bad("header\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad), std::runtime_error);
}

TEST_CASE("vanishing physical error rate yields zero failures") {
  const ExperimentResult res =
      run_experiment(hex_spec(3, 1e-9, DecoderKind::VibeLSD, 2000, 1));
  CHECK(res.failures == 0);
  CHECK(res.logical_error_rate == 0.0);
  CHECK(res.ci_low == 0.0);
  CHECK(res.lsd_calls == 0);
  CHECK(res.wall_seconds == 0.0);
}

TEST_CASE("failure counting matches an oracle replay of the same stream") {
  // Replaying the sampling stream and applying the decoder by hand must give
  // the same failure count as run_experiment.
  const ExperimentSpec spec = hex_spec(5, 0.07, DecoderKind::SingleBPLSD, 2000, 42);
  const ExperimentResult res = run_experiment(spec);

  const std::vector<double> llrs = llr_priors(spec.dem);
  Xoshiro256ss sampler(split_seed(42, seed_domain::kSampling, 0));
  std::size_t failures = 0, lsd_calls = 0;
  for (std::size_t shot = 0; shot < spec.shots; ++shot) {
    const SampledShot drawn = sample(spec.dem, sampler);
    const BPConfig cfg{.max_iterations = 20,
                       .schedule = Schedule::serial_identity(spec.dem.num_mechanisms)};
    const BPResult bp = bp_decode(spec.dem.H, drawn.syndrome, llrs, cfg);
    BitVector correction = bp.estimate;
    if (!bp.converged) {
      correction = lsd0_decode(spec.dem.H, drawn.syndrome, bp.posteriors).estimate;
      ++lsd_calls;
    }
    correction.xor_assign(drawn.error);
    if (!matvec_mod2(spec.dem.Lmat, correction).is_zero()) ++failures;
  }
  CHECK(res.failures == failures);
  CHECK(res.lsd_calls == lsd_calls);
  CHECK(res.shots == spec.shots);
}

TEST_CASE("cluster-stats lines agree with the reported lsd_calls") {
  ExperimentSpec spec = hex_spec(5, 0.1, DecoderKind::VibeLSD, 500, 3);
  spec.ensemble.ensemble_size = 4;
  spec.ensemble.correction_limit = 2;
  const std::string path = "cluster_stats_test.csv";
  spec.cluster_stats_path = path;
  const ExperimentResult res = run_experiment(spec);

  std::ifstream in(path);
  REQUIRE(in);
  std::string line;
  std::size_t lines = 0, lsd_lines = 0, max_kappa = 0, kappa_sum = 0;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string shot, pathname, kappa;
    REQUIRE(std::getline(ss, shot, ','));
    REQUIRE(std::getline(ss, pathname, ','));
    REQUIRE(std::getline(ss, kappa, ','));
    CHECK(std::stoull(shot) == lines);
    CHECK((pathname == "BP" || pathname == "LSD"));
    if (pathname == "LSD") {
      ++lsd_lines;
      kappa_sum += std::stoull(kappa);
      max_kappa = std::max<std::size_t>(max_kappa, std::stoull(kappa));
    } else {
      CHECK(kappa == "0");
    }
    ++lines;
  }
  in.close();
  std::remove(path.c_str());

  CHECK(lines == spec.shots);
  CHECK(lsd_lines == res.lsd_calls);
  CHECK(max_kappa == res.max_cluster_overall);
  if (res.lsd_calls > 0)
    CHECK(res.mean_largest_cluster ==
          doctest::Approx(static_cast<double>(kappa_sum) / static_cast<double>(res.lsd_calls))
              .epsilon(1e-12));
}

TEST_CASE("run_experiment is reproducible for a fixed spec") {
  const ExperimentSpec spec = hex_spec(5, 0.08, DecoderKind::VibeLSD, 1000, 11);
  const ExperimentResult a = run_experiment(spec);
  const ExperimentResult b = run_experiment(spec);
  CHECK(results_equal(a, b));
  std::ostringstream csv_a, csv_b;
  write_csv({a}, csv_a);
  write_csv({b}, csv_b);
  CHECK(csv_a.str() == csv_b.str());

  // A different seed samples a different stream.
  const ExperimentResult c = run_experiment(hex_spec(5, 0.08, DecoderKind::VibeLSD, 1000, 12));
  CHECK(c.seed != a.seed);
}
