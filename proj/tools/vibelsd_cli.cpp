#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vibelsd/bench.hpp"
#include "vibelsd/bp.hpp"
#include "vibelsd/colour_code.hpp"
#include "vibelsd/dem.hpp"
#include "vibelsd/ensemble.hpp"
#include "vibelsd/lsd.hpp"

namespace {

using namespace vibelsd;

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitDecode = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Tiling tiling_from_name(const std::string& name) {
  if (name == "hex666") return Tiling::Hex666;
  if (name == "sqoct488") return Tiling::SquareOct488;
  throw std::invalid_argument("unknown tiling '" + name + "' (expected hex666 or sqoct488)");
}

DecoderKind decoder_from_name(const std::string& name) {
  if (name == "vibelsd") return DecoderKind::VibeLSD;
  if (name == "bplsd") return DecoderKind::SingleBPLSD;
  if (name == "bp") return DecoderKind::BPOnly;
  throw std::invalid_argument("unknown decoder '" + name + "'");
}

struct CodeSpec {
  Tiling tiling;
  int distance;
  double p;
};

CodeSpec parse_code_spec(const std::string& text) {
  const std::size_t c1 = text.find(':');
  const std::size_t c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("--code expects TILING:D:P, e.g. hex666:5:0.05");
  CodeSpec spec{};
  spec.tiling = tiling_from_name(text.substr(0, c1));
  spec.distance = std::stoi(text.substr(c1 + 1, c2 - c1 - 1));
  spec.p = std::stod(text.substr(c2 + 1));
  return spec;
}

std::vector<BitVector> read_syndromes(const std::string& path, std::size_t num_detectors) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<BitVector> shots;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    BitVector s(num_detectors);
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      std::size_t pos = 0;
      unsigned long idx = 0;
      try {
        idx = std::stoul(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != tok.size() || idx >= num_detectors)
        throw DemParseError(line_no, "bad detector index '" + tok + "' in " + path);
      s.set(idx, true);
    }
    shots.push_back(std::move(s));
  }
  return shots;
}

int run_gen_code(const std::string& tiling_name, int distance, const std::string& out_path,
                 const std::string& format, double p) {
  const ColourCodeLattice lattice = build_colour_code(tiling_from_name(tiling_name), distance);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open file: " + out_path);
  if (format == "dem") {
    out << emit_dem(code_capacity_dem(lattice.H, lattice.logical, p));
  } else if (format == "triplet") {
    out << lattice.H.rows << ' ' << lattice.H.cols << '\n';
    for (std::size_t r = 0; r < lattice.H.rows; ++r)
      for (std::uint32_t c : lattice.H.row_adjacency[r]) out << r << ' ' << c << '\n';
  } else {
    throw std::invalid_argument("unknown format '" + format + "' (expected dem or triplet)");
  }
  return 0;
}

int run_decode(const std::string& dem_path, const std::string& syndromes_path,
               const std::string& out_path, const std::string& decoder_name_str,
               std::size_t ensemble_size, std::size_t limit, int iters, std::uint64_t seed) {
  const DetectorErrorModel dem = parse_dem(read_file(dem_path));
  const std::vector<BitVector> shots = read_syndromes(syndromes_path, dem.num_detectors);
  const DecoderKind kind = decoder_from_name(decoder_name_str);
  const std::vector<double> llrs = llr_priors(dem);

  EnsembleConfig cfg;
  cfg.ensemble_size = ensemble_size;
  cfg.correction_limit = limit;
  cfg.bp_config.max_iterations = iters;
  cfg.root_seed = seed;

  std::optional<EnsembleDecoder> ensemble;
  std::optional<BPDecoder> single;
  BPConfig serial_cfg = cfg.bp_config;
  serial_cfg.schedule = Schedule::serial_identity(dem.num_mechanisms);
  if (kind == DecoderKind::VibeLSD)
    ensemble.emplace(dem, cfg);
  else
    single.emplace(dem.H, serial_cfg);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open file: " + out_path);
  for (const BitVector& s : shots) {
    BitVector correction;
    if (kind == DecoderKind::VibeLSD) {
      correction = ensemble->decode(s).correction;
    } else {
      single->reset(s, llrs);
      for (int t = 0; t < iters; ++t)
        if (single->step()) break;
      if (!single->converged() && kind == DecoderKind::SingleBPLSD)
        correction = lsd0_decode(dem.H, s, single->posteriors()).estimate;
      else
        correction = single->estimate();
    }
    bool first = true;
    for (std::uint32_t j : correction.support()) {
      if (!first) out << ' ';
      out << j;
      first = false;
    }
    out << '\n';
  }
  return 0;
}

int run_bench(const std::string& dem_path, const std::string& code_spec_str, std::size_t shots,
              std::uint64_t seed, const std::string& decoder_name_str, std::size_t ensemble_size,
              std::size_t limit, int iters, const std::string& csv_path,
              const std::string& cluster_stats_path) {
  ExperimentSpec spec;
  if (!code_spec_str.empty()) {
    const CodeSpec code = parse_code_spec(code_spec_str);
    const ColourCodeLattice lattice = build_colour_code(code.tiling, code.distance);
    spec.dem = code_capacity_dem(lattice.H, lattice.logical, code.p);
    spec.source_label = code_spec_str;
    spec.distance = code.distance;
    spec.p = code.p;
  } else {
    spec.dem = parse_dem(read_file(dem_path));
    spec.source_label = dem_path;
  }
  spec.decoder = decoder_from_name(decoder_name_str);
  spec.ensemble.ensemble_size = ensemble_size;
  spec.ensemble.correction_limit = limit;
  spec.ensemble.bp_config.max_iterations = iters;
  spec.shots = shots;
  spec.root_seed = seed;
  if (!cluster_stats_path.empty()) spec.cluster_stats_path = cluster_stats_path;

  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult result = run_experiment(spec);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::cout << "source=" << result.source << " decoder=" << result.decoder
            << " shots=" << result.shots << " failures=" << result.failures
            << " ler=" << result.logical_error_rate << " ci=[" << result.ci_low << ","
            << result.ci_high << "]"
            << " lsd_calls=" << result.lsd_calls << " max_cluster=" << result.max_cluster_overall
            << " mean_largest_cluster=" << result.mean_largest_cluster << " wall=" << elapsed
            << "s\n";
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open file: " + csv_path);
    write_csv({result}, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VibeLSD: ensemble BP decoding with localised-statistics post-processing"};
  app.require_subcommand(1);

  // gen-code
  auto* gen = app.add_subcommand("gen-code", "Generate a colour-code check matrix");
  std::string gen_tiling, gen_out, gen_format = "dem";
  int gen_distance = 3;
  double gen_p = 0.01;
  gen->add_option("--tiling", gen_tiling, "hex666 or sqoct488")->required();
  gen->add_option("--distance", gen_distance, "odd code distance >= 3")->required();
  gen->add_option("--out", gen_out, "output path")->required();
  gen->add_option("--format", gen_format, "dem or triplet");
  gen->add_option("--p", gen_p, "code-capacity prior for dem output");

  // decode
  auto* dec = app.add_subcommand("decode", "Decode syndromes from a file");
  std::string dec_dem, dec_synd, dec_out, dec_decoder = "vibelsd";
  std::size_t dec_ensemble = 32, dec_limit = 5;
  int dec_iters = 20;
  std::uint64_t dec_seed = 0;
  dec->add_option("--dem", dec_dem, "detector error model path")->required();
  dec->add_option("--syndromes", dec_synd, "one shot per line: activated detector indices")
      ->required();
  dec->add_option("--out", dec_out, "output path: mechanism indices per shot")->required();
  dec->add_option("--decoder", dec_decoder, "vibelsd, bplsd, or bp");
  dec->add_option("--ensemble", dec_ensemble, "ensemble size L");
  dec->add_option("--limit", dec_limit, "correction limit M");
  dec->add_option("--iters", dec_iters, "BP iteration limit");
  dec->add_option("--seed", dec_seed, "root seed");

  // bench
  auto* bench = app.add_subcommand("bench", "Monte-Carlo logical-error-rate benchmark");
  std::string bench_dem, bench_code, bench_decoder, bench_csv, bench_stats;
  std::size_t bench_shots = 0, bench_ensemble = 32, bench_limit = 5;
  int bench_iters = 20;
  std::uint64_t bench_seed = 0;
  auto* dem_opt = bench->add_option("--dem", bench_dem, "detector error model path");
  auto* code_opt =
      bench->add_option("--code", bench_code, "generated code spec TILING:D:P");
  dem_opt->excludes(code_opt);
  bench->add_option("--shots", bench_shots, "number of shots")->required();
  bench->add_option("--seed", bench_seed, "root seed")->required();
  bench->add_option("--decoder", bench_decoder, "vibelsd, bplsd, or bp")->required();
  bench->add_option("--ensemble", bench_ensemble, "ensemble size L");
  bench->add_option("--limit", bench_limit, "correction limit M");
  bench->add_option("--iters", bench_iters, "BP iteration limit");
  bench->add_option("--csv", bench_csv, "CSV output path");
  bench->add_option("--cluster-stats", bench_stats, "per-shot cluster statistics path");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return run_gen_code(gen_tiling, gen_distance, gen_out, gen_format, gen_p);
    if (dec->parsed())
      return run_decode(dec_dem, dec_synd, dec_out, dec_decoder, dec_ensemble, dec_limit,
                        dec_iters, dec_seed);
    if (bench->parsed()) {
      if (bench_dem.empty() == bench_code.empty()) {
        std::cerr << "bench requires exactly one of --dem or --code\n";
        return kExitUsage;
      }
      return run_bench(bench_dem, bench_code, bench_shots, bench_seed, bench_decoder,
                       bench_ensemble, bench_limit, bench_iters, bench_csv, bench_stats);
    }
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const DemParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const LsdError& e) {
    std::cerr << "decode error: " << e.what() << "\n";
    return kExitDecode;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
}
