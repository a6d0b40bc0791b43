#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vibelsd/gf2.hpp"
#include "vibelsd/rng.hpp"

namespace vibelsd {

// Detector error model: H (detectors x mechanisms), Lmat (observables x
// mechanisms), and one prior probability per mechanism.
struct DetectorErrorModel {
  std::size_t num_detectors = 0;
  std::size_t num_mechanisms = 0;
  std::size_t num_observables = 0;
  SparseBinaryMatrix H;
  SparseBinaryMatrix Lmat;
  std::vector<double> priors;

  friend bool operator==(const DetectorErrorModel& a, const DetectorErrorModel& b) {
    return a.num_detectors == b.num_detectors && a.num_mechanisms == b.num_mechanisms &&
           a.num_observables == b.num_observables && a.H.row_adjacency == b.H.row_adjacency &&
           a.Lmat.row_adjacency == b.Lmat.row_adjacency && a.priors == b.priors;
  }
};

struct SampledShot {
  BitVector error;
  BitVector syndrome;
  BitVector observable_flips;
};

class DemParseError : public std::runtime_error {
 public:
  DemParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Parses the flat detector-error-model text format.  `^` separators are
// treated as whitespace; duplicate (H column, L column) pairs are merged by
// XOR-convolving their priors; `repeat` and `shift_detectors` are rejected.
DetectorErrorModel parse_dem(std::string_view text);

// Serialises a model so that parse_dem(emit_dem(m)) == m (column order and
// priors preserved exactly).
std::string emit_dem(const DetectorErrorModel& dem);

// Draws one shot: each mechanism fires independently with its prior.
SampledShot sample(const DetectorErrorModel& dem, Xoshiro256ss& rng);

// Channel LLRs: lambda_j = ln((1 - p_j) / p_j).
std::vector<double> llr_priors(const DetectorErrorModel& dem);

// Code-capacity model: one mechanism per column of H with uniform prior p;
// Lmat is the single given logical row.
DetectorErrorModel code_capacity_dem(const SparseBinaryMatrix& H, const BitVector& logical,
                                     double p);

}  // namespace vibelsd
