#include <doctest.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "vibelsd/bench.hpp"
#include "vibelsd/bp.hpp"
#include "vibelsd/colour_code.hpp"
#include "vibelsd/dem.hpp"
#include "vibelsd/ensemble.hpp"
#include "vibelsd/lsd.hpp"

using namespace vibelsd;

namespace {

void report(int criterion, const char* name, bool pass) {
  std::printf("ACCEPTANCE %d (%s): %s\n", criterion, name, pass ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK(pass);
}

DetectorErrorModel hex_dem(int d, double p) {
  const ColourCodeLattice lattice = build_colour_code(Tiling::Hex666, d);
  return code_capacity_dem(lattice.H, lattice.logical, p);
}

std::string data_file(const std::string& name) {
  std::ifstream in(std::string(VIBELSD_TEST_DATA_DIR) + "/" + name);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t row_mask(const std::vector<std::uint32_t>& row) {
  std::uint64_t m = 0;
  for (std::uint32_t c : row) m |= 1ULL << c;
  return m;
}

// Gray-code sweep over the row space: minimum weight of {all-ones + span}.
std::size_t coset_min_weight(const ColourCodeLattice& lattice) {
  REQUIRE(lattice.qubit_count <= 64);
  std::vector<std::uint64_t> basis;
  for (const auto& row : lattice.H.row_adjacency) {
    std::uint64_t v = row_mask(row);
    for (std::uint64_t b : basis)
      if (v & (b & (0ULL - b))) v ^= b;
    if (v) basis.push_back(v);
  }
  std::uint64_t v = (1ULL << lattice.qubit_count) - 1;
  std::size_t best = std::popcount(v);
  std::uint64_t prev = 0;
  for (std::uint64_t g = 1; g < (1ULL << basis.size()); ++g) {
    const std::uint64_t gray = g ^ (g >> 1);
    v ^= basis[static_cast<std::size_t>(std::countr_zero(gray ^ prev))];
    prev = gray;
    best = std::min<std::size_t>(best, static_cast<std::size_t>(std::popcount(v)));
  }
  return best;
}

}  // namespace

TEST_CASE("criterion-1-syndrome-consistency") {
  const DetectorErrorModel dem = hex_dem(5, 0.05);
  EnsembleConfig cfg;  // L=32, M=5, T=20
  cfg.root_seed = 1001;
  EnsembleDecoder decoder(dem, cfg);
  Xoshiro256ss sampler(split_seed(1001, seed_domain::kSampling, 0));
  bool ok = true;
  for (int shot = 0; shot < 100000 && ok; ++shot) {
    const SampledShot drawn = sample(dem, sampler);
    const DecodeOutcome out = decoder.decode(drawn.syndrome);
    ok = matvec_mod2(dem.H, out.correction) == drawn.syndrome;
  }
  report(1, "syndrome consistency, 1e5 shots d=5 p=0.05", ok);
}

TEST_CASE("criterion-2-exact-ml-proximity") {
  const ColourCodeLattice lattice = build_colour_code(Tiling::Hex666, 3);
  bool ok = true;
  for (const double p : {0.01, 0.05, 0.10}) {
    const DetectorErrorModel dem = code_capacity_dem(lattice.H, lattice.logical, p);
    // Exact coset-ML logical error rate by full enumeration of the 2^7
    // error patterns: per syndrome the losing class's probability mass is
    // exactly the ML decoder's failure contribution.
    std::map<std::uint64_t, std::array<double, 2>> mass;
    for (std::uint64_t e = 0; e < (1ULL << 7); ++e) {
      BitVector ev(7);
      double prob = 1.0;
      for (std::size_t j = 0; j < 7; ++j) {
        const bool bit = e >> j & 1;
        if (bit) ev.set(j, true);
        prob *= bit ? p : 1.0 - p;
      }
      std::uint64_t key = 0;
      const BitVector s = matvec_mod2(dem.H, ev);
      for (std::size_t r = 0; r < s.length(); ++r)
        if (s.get(r)) key |= 1ULL << r;
      mass[key][matvec_mod2(dem.Lmat, ev).get(0) ? 1 : 0] += prob;
    }
    double ml_ler = 0.0;
    for (const auto& [key, m] : mass) ml_ler += std::min(m[0], m[1]);

    EnsembleConfig cfg;  // L=32, M=5, T=20
    cfg.root_seed = 2002;
    EnsembleDecoder decoder(dem, cfg);
    Xoshiro256ss sampler(split_seed(2002, seed_domain::kSampling, 0));
    const std::size_t shots = 100000;
    std::size_t failures = 0;
    for (std::size_t shot = 0; shot < shots; ++shot) {
      const SampledShot drawn = sample(dem, sampler);
      BitVector residual = decoder.decode(drawn.syndrome).correction;
      residual.xor_assign(drawn.error);
      if (!matvec_mod2(dem.Lmat, residual).is_zero()) ++failures;
    }
    const auto [lo, hi] = binomial_ci(failures, shots);
    // Pass when the Wilson interval does not exclude the [ML, 1.3*ML] band.
    const bool in_band = lo <= 1.3 * ml_ler && hi >= ml_ler;
    std::printf("  p=%.2f: ml_ler=%.6f decoder_ler=%.6f ci=[%.6f,%.6f]\n", p, ml_ler,
                static_cast<double>(failures) / static_cast<double>(shots), lo, hi);
    ok = ok && in_band;
  }
  report(2, "within 1.3x of exact ML at d=3", ok);
}

TEST_CASE("criterion-3-error-suppression") {
  std::vector<ExperimentResult> results;
  for (const int d : {3, 5, 7}) {
    ExperimentSpec spec;
    spec.source_label = "hex666:" + std::to_string(d) + ":0.05";
    spec.dem = hex_dem(d, 0.05);
    spec.distance = d;
    spec.p = 0.05;
    spec.decoder = DecoderKind::VibeLSD;
    spec.shots = 100000;
    spec.root_seed = 3003;
    results.push_back(run_experiment(spec));
    const ExperimentResult& r = results.back();
    std::printf("  d=%d: ler=%.5f ci=[%.5f,%.5f]\n", d, r.logical_error_rate, r.ci_low,
                r.ci_high);
  }
  bool ok = true;
  for (std::size_t i = 1; i < results.size(); ++i) {
    ok = ok && results[i].logical_error_rate < results[i - 1].logical_error_rate;
    ok = ok && results[i].ci_high < results[i - 1].ci_low;  // non-overlapping intervals
  }
  report(3, "LER strictly decreasing d=3,5,7 with separated CIs", ok);
}

TEST_CASE("criterion-4-ensemble-benefit") {
  const DetectorErrorModel dem = hex_dem(7, 0.05);
  const std::size_t shots = 5000;
  // Pre-sample one shot list so both decoders see the same syndromes.
  Xoshiro256ss sampler(split_seed(4004, seed_domain::kSampling, 0));
  std::vector<BitVector> syndromes;
  for (std::size_t i = 0; i < shots; ++i) syndromes.push_back(sample(dem, sampler).syndrome);

  const auto run = [&](std::size_t l, std::size_t m) {
    EnsembleConfig cfg;
    cfg.ensemble_size = l;
    cfg.correction_limit = m;
    cfg.root_seed = 4004;
    EnsembleDecoder decoder(dem, cfg);
    std::size_t calls = 0, kappa_sum = 0;
    for (const BitVector& s : syndromes) {
      const DecodeOutcome out = decoder.decode(s);
      if (out.path == DecodePath::LSD) {
        ++calls;
        kappa_sum += out.largest_cluster;
      }
    }
    // Mean kappa over all shots: BP-converged shots cost no cluster growth.
    return std::pair<std::size_t, double>(
        calls, static_cast<double>(kappa_sum) / static_cast<double>(shots));
  };
  const auto [calls16, kappa16] = run(16, 5);
  const auto [calls1, kappa1] = run(1, 1);
  std::printf("  L=16: lsd_calls=%zu mean_kappa=%.3f | L=1: lsd_calls=%zu mean_kappa=%.3f\n",
              calls16, kappa16, calls1, kappa1);
  report(4, "L=16 halves LSD calls and shrinks mean kappa vs L=1",
         2 * calls16 <= calls1 && kappa16 < kappa1);
}

TEST_CASE("criterion-5-degenerate-ensemble-equivalence") {
  const DetectorErrorModel dem = hex_dem(5, 0.05);
  const std::vector<double> llrs = llr_priors(dem);
  EnsembleConfig cfg;
  cfg.ensemble_size = 1;
  cfg.correction_limit = 1;
  cfg.root_seed = 5005;
  EnsembleDecoder ensemble(dem, cfg);
  BPDecoder single(dem.H, BPConfig{.max_iterations = 20,
                                   .schedule = Schedule::serial_identity(dem.num_mechanisms)});
  Xoshiro256ss sampler(split_seed(5005, seed_domain::kSampling, 0));
  bool ok = true;
  for (int shot = 0; shot < 10000 && ok; ++shot) {
    const SampledShot drawn = sample(dem, sampler);
    const DecodeOutcome out = ensemble.decode(drawn.syndrome);
    single.reset(drawn.syndrome, llrs);
    for (int t = 0; t < 20; ++t)
      if (single.step()) break;
    BitVector expect = single.estimate();
    if (!single.converged())
      expect = lsd0_decode(dem.H, drawn.syndrome, single.posteriors()).estimate;
    ok = out.correction == expect;
  }
  report(5, "L=1/M=1 identity bit-identical to serial BP+LSD over 1e4 shots", ok);
}

TEST_CASE("criterion-6-min-sum-conformance") {
  bool ok = true;
  // Check update, hand-computed: degree 2 swaps sign-magnitudes, the
  // syndrome bit negates; degree 3 excludes the target from sign and min.
  auto out = check_messages(std::vector<double>{2.0, -3.0}, false, 1.0);
  ok = ok && std::fabs(out[0] + 3.0) < 1e-12 && std::fabs(out[1] - 2.0) < 1e-12;
  out = check_messages(std::vector<double>{2.0, -3.0}, true, 1.0);
  ok = ok && std::fabs(out[0] - 3.0) < 1e-12 && std::fabs(out[1] + 2.0) < 1e-12;
  out = check_messages(std::vector<double>{1.0, 2.0, -4.0}, false, 1.0);
  ok = ok && std::fabs(out[0] + 2.0) < 1e-12 && std::fabs(out[1] + 1.0) < 1e-12 &&
       std::fabs(out[2] - 1.0) < 1e-12;

  // Serial variable update, hand-computed on the 3-bit repetition code with
  // llrs (2, 0.9, 1.5) and syndrome (1, 0): converges at iteration 2 with
  // posteriors (-0.4, 0.4, 0.4) and estimate {0}.
  const SparseBinaryMatrix h = SparseBinaryMatrix::from_rows(2, 3, {{0, 1}, {1, 2}});
  BitVector s(2);
  s.set(0, true);
  const BPResult res =
      bp_decode(h, s, std::vector<double>{2.0, 0.9, 1.5},
                BPConfig{.max_iterations = 20, .schedule = Schedule::serial_identity(3)});
  ok = ok && res.converged && res.iterations_used == 2;
  ok = ok && std::fabs(res.posteriors[0] + 0.4) < 1e-12 &&
       std::fabs(res.posteriors[1] - 0.4) < 1e-12 && std::fabs(res.posteriors[2] - 0.4) < 1e-12;
  ok = ok && res.estimate.support() == std::vector<std::uint32_t>({0});

  // Hard decision: exact <= 0 indicator, including the boundary.
  const BitVector hd = hard_decision(std::vector<double>{1e-300, 0.0, -0.0, -1.0});
  ok = ok && hd.support() == std::vector<std::uint32_t>({1, 2, 3});
  report(6, "min-sum check/variable updates and hard decision", ok);
}

TEST_CASE("criterion-7-llr-averaging") {
  Xoshiro256ss rng(7007);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const std::size_t l = 1 + trial % 8, n = 1 + trial % 33;
    std::vector<std::vector<double>> vectors(l, std::vector<double>(n));
    for (auto& v : vectors)
      for (double& x : v) x = rng.next_double() * 20.0 - 10.0;
    if (trial % 7 == 0) std::fill(vectors[trial % l].begin(), vectors[trial % l].end(), 0.0);

    // Independent dense evaluation of (1/L) sum_i v_i / ||v_i||_2.
    std::vector<double> expect(n, 0.0);
    for (const auto& v : vectors) {
      long double sq = 0.0L;
      for (double x : v) sq += static_cast<long double>(x) * x;
      const double norm = std::sqrt(static_cast<double>(sq));
      if (norm == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) expect[j] += v[j] / norm;
    }
    for (double& x : expect) x /= static_cast<double>(l);

    const std::vector<double> got = average_llrs(vectors);
    for (std::size_t j = 0; j < n; ++j)
      ok = ok && std::fabs(got[j] - expect[j]) <=
                     1e-12 * std::max(1.0, std::fabs(expect[j]));
  }
  report(7, "average_llrs matches dense oracle on 1e3 cases", ok);
}

TEST_CASE("criterion-8-lattice-validity") {
  bool ok = true;
  for (const Tiling tiling : {Tiling::Hex666, Tiling::SquareOct488}) {
    for (const int d : {3, 5, 7}) {
      const ColourCodeLattice lattice = build_colour_code(tiling, d);
      const std::size_t n = lattice.qubit_count;
      const std::size_t expect_n = tiling == Tiling::Hex666
                                       ? static_cast<std::size_t>(3 * d * d + 1) / 4
                                       : static_cast<std::size_t>(d * d + 2 * d - 1) / 2;
      ok = ok && n == expect_n;
      ok = ok && lattice.plaquettes.size() == (n - 1) / 2;
      ok = ok && row_echelon(lattice.H, natural_column_order(n)).rank == (n - 1) / 2;
      ok = ok && coset_min_weight(lattice) == static_cast<std::size_t>(d);
    }
  }
  report(8, "counts, rank, and brute-force distance for both tilings", ok);
}

TEST_CASE("criterion-9-gf2-oracle-equivalence") {
  // Independent dense elimination over row bitmasks (cols <= 60 < 64).
  const auto dense_rank = [](std::vector<std::uint64_t> rows, std::uint64_t extra,
                             bool augment) {
    if (augment)
      for (std::size_t r = 0; r < rows.size(); ++r)
        rows[r] = rows[r] << 1 | (extra >> r & 1);
    std::size_t rank = 0;
    for (int col = 0; col < 64 && rank < rows.size(); ++col) {
      const std::uint64_t mask = 1ULL << col;
      std::size_t pivot = rows.size();
      for (std::size_t r = rank; r < rows.size(); ++r)
        if (rows[r] & mask) {
          pivot = r;
          break;
        }
      if (pivot == rows.size()) continue;
      std::swap(rows[rank], rows[pivot]);
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (r != rank && (rows[r] & mask)) rows[r] ^= rows[rank];
      ++rank;
    }
    return rank;
  };

  Xoshiro256ss rng(9009);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const std::size_t rows = 1 + rng.below(40), cols = 1 + rng.below(60);
    std::vector<std::vector<std::uint32_t>> lists(rows);
    std::vector<std::uint64_t> masks(rows, 0);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (rng.next_double() < 0.25) {
          lists[r].push_back(static_cast<std::uint32_t>(c));
          masks[r] |= 1ULL << c;
        }
    const SparseBinaryMatrix m = SparseBinaryMatrix::from_rows(rows, cols, std::move(lists));
    const std::size_t expect = dense_rank(masks, 0, false);
    ok = ok && row_echelon(m, natural_column_order(cols)).rank == expect;

    BitVector s(rows);
    std::uint64_t s_mask = 0;
    for (std::size_t r = 0; r < rows; ++r)
      if (rng.next_double() < 0.5) {
        s.set(r, true);
        s_mask |= 1ULL << r;
      }
    const bool dense_solvable = dense_rank(masks, s_mask, true) == expect;
    const auto x = solve_mod2(m, s, natural_column_order(cols));
    ok = ok && x.has_value() == dense_solvable;
    if (x) ok = ok && matvec_mod2(m, *x) == s;
  }
  report(9, "sparse rank/solve vs dense oracle on 1e3 random matrices", ok);
}

TEST_CASE("criterion-10-dem-golden-suite") {
  bool ok = true;
  const DetectorErrorModel golden = parse_dem(data_file("surface_like.dem"));
  ok = ok && golden.num_detectors == 4 && golden.num_mechanisms == 5 &&
       golden.num_observables == 1;
  ok = ok && std::fabs(golden.priors[2] - (0.01 * 0.98 + 0.99 * 0.02)) < 1e-15;
  ok = ok && parse_dem(emit_dem(golden)) == golden;  // exact round trip

  ok = ok && parse_dem("error(0.25) D0 D1 ^ D2 L0\n") == parse_dem("error(0.25) D0 D1 D2 L0\n");

  try {
    parse_dem(data_file("rejected_repeat.dem"));
    ok = false;
  } catch (const DemParseError& e) {
    ok = ok && e.line() == 3;
  }
  try {
    parse_dem("error(0.1) D0\n\nshift_detectors 2\n");
    ok = false;
  } catch (const DemParseError& e) {
    ok = ok && e.line() == 3;
  }
  report(10, "golden files, merge, ^ handling, rejections, round trip", ok);
}

TEST_CASE("criterion-11-cli-determinism") {
  const std::string cli = VIBELSD_CLI_PATH;
  const std::string base =
      " bench --code hex666:5:0.05 --shots 10000 --seed 7 --decoder vibelsd --csv ";
  const int rc1 = std::system((cli + base + "acceptance_run1.csv > /dev/null").c_str());
  const int rc2 = std::system((cli + base + "acceptance_run2.csv > /dev/null").c_str());
  bool ok = rc1 == 0 && rc2 == 0;
  if (ok) {
    const std::string a = slurp("acceptance_run1.csv");
    ok = !a.empty() && a == slurp("acceptance_run2.csv");
  }
  std::remove("acceptance_run1.csv");
  std::remove("acceptance_run2.csv");
  report(11, "byte-identical CSV across repeated bench runs", ok);
}

TEST_CASE("criterion-12-multiround-dem-pathway") {
  // Synthetic 3-detector x 3-round model: a 4-qubit repetition code with
  // measurement errors linking consecutive rounds.  Exercises the external
  // flattened-DEM pathway end to end through the CLI.
  std::ostringstream dem_text;
  const auto det = [](int round, int check) { return "D" + std::to_string(3 * round + check); };
  for (int round = 0; round < 3; ++round)
    for (int qubit = 0; qubit < 4; ++qubit) {
      dem_text << "error(0.02)";
      if (qubit > 0) dem_text << ' ' << det(round, qubit - 1);
      if (qubit < 3) dem_text << ' ' << det(round, qubit);
      if (qubit == 0) dem_text << " L0";
      dem_text << '\n';
    }
  for (int round = 0; round < 2; ++round)
    for (int check = 0; check < 3; ++check)
      dem_text << "error(0.01) " << det(round, check) << " ^ " << det(round + 1, check) << '\n';

  {
    std::ofstream out("acceptance_multiround.dem");
    REQUIRE(out);
    out << dem_text.str();
  }
  const std::string cli = VIBELSD_CLI_PATH;
  const int rc = std::system((cli +
                              " bench --dem acceptance_multiround.dem --shots 2000 --seed 5"
                              " --decoder vibelsd --csv acceptance_multiround.csv"
                              " --cluster-stats acceptance_multiround_stats.csv > /dev/null")
                                 .c_str());
  bool ok = rc == 0;
  std::size_t lsd_lines = 0, lines = 0, max_kappa = 0;
  if (ok) {
    std::ifstream stats("acceptance_multiround_stats.csv");
    ok = static_cast<bool>(stats);
    std::string line;
    while (std::getline(stats, line)) {
      ++lines;
      std::stringstream ss(line);
      std::string shot, pathname, kappa;
      std::getline(ss, shot, ',');
      std::getline(ss, pathname, ',');
      std::getline(ss, kappa, ',');
      if (pathname == "LSD") {
        ++lsd_lines;
        max_kappa = std::max<std::size_t>(max_kappa, std::stoull(kappa));
      }
    }
  }
  if (ok) {
    std::ifstream csv("acceptance_multiround.csv");
    const std::vector<ExperimentResult> results = read_csv(csv);
    ok = results.size() == 1 && results[0].shots == 2000 && lines == 2000 &&
         results[0].lsd_calls == lsd_lines && results[0].max_cluster_overall == max_kappa;
    if (ok)
      std::printf("  LSD calls: %zu over %zu shots; kappa_max = %zu, mean kappa = %.3f\n",
                  results[0].lsd_calls, results[0].shots, results[0].max_cluster_overall,
                  results[0].mean_largest_cluster);
  }
  std::remove("acceptance_multiround.dem");
  std::remove("acceptance_multiround.csv");
  std::remove("acceptance_multiround_stats.csv");
  report(12, "multi-round DEM cluster statistics via the CLI", ok);
}
