#include "vibelsd/dem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace vibelsd {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : line) {
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '^') {
      if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

bool parse_uint(std::string_view s, std::uint32_t& out) {
  if (s.empty()) return false;
  std::uint64_t v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') return false;
    v = v * 10 + static_cast<std::uint64_t>(ch - '0');
    if (v > 0xffffffffULL) return false;
  }
  out = static_cast<std::uint32_t>(v);
  return true;
}

double parse_probability(const std::string& s, int line) {
  std::size_t pos = 0;
  double p = 0;
  try {
    p = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw DemParseError(line, "malformed probability '" + s + "'");
  }
  if (pos != s.size()) throw DemParseError(line, "malformed probability '" + s + "'");
  if (!(p > 0.0 && p < 1.0))
    throw DemParseError(line, "probability " + s + " outside the open interval (0,1)");
  return p;
}

struct RawColumn {
  std::vector<std::uint32_t> detectors;
  std::vector<std::uint32_t> observables;
  double prior;
};

}  // namespace

DetectorErrorModel parse_dem(std::string_view text) {
  std::vector<RawColumn> columns;
  std::size_t max_detector = 0, max_observable = 0;
  bool any_detector = false, any_observable = false;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;

    const std::string& head = tokens[0];
    if (head == "repeat" || head.starts_with("repeat{") || head.starts_with("repeat(")) {
      throw DemParseError(line_no, "unsupported instruction 'repeat': flatten the model first");
    }
    if (head == "shift_detectors" || head.starts_with("shift_detectors(")) {
      throw DemParseError(line_no,
                          "unsupported instruction 'shift_detectors': flatten the model first");
    }
    if (head.starts_with("error(")) {
      const std::size_t close = head.find(')');
      if (close == std::string::npos || close + 1 != head.size())
        throw DemParseError(line_no, "malformed error instruction '" + head + "'");
      RawColumn col;
      col.prior = parse_probability(head.substr(6, close - 6), line_no);
      if (tokens.size() < 2) throw DemParseError(line_no, "error instruction with no targets");
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        const std::string& target = tokens[t];
        std::uint32_t idx = 0;
        if (target.size() >= 2 && target[0] == 'D' && parse_uint(target.substr(1), idx)) {
          col.detectors.push_back(idx);
          max_detector = std::max<std::size_t>(max_detector, idx);
          any_detector = true;
        } else if (target.size() >= 2 && target[0] == 'L' && parse_uint(target.substr(1), idx)) {
          col.observables.push_back(idx);
          max_observable = std::max<std::size_t>(max_observable, idx);
          any_observable = true;
        } else {
          throw DemParseError(line_no, "unrecognised error target '" + target + "'");
        }
      }
      // A detector (or observable) listed twice in one mechanism cancels.
      for (auto* v : {&col.detectors, &col.observables}) {
        std::sort(v->begin(), v->end());
        for (std::size_t i = 0; i + 1 < v->size();) {
          if ((*v)[i] == (*v)[i + 1])
            v->erase(v->begin() + static_cast<std::ptrdiff_t>(i),
                     v->begin() + static_cast<std::ptrdiff_t>(i) + 2);
          else
            ++i;
        }
      }
      columns.push_back(std::move(col));
      continue;
    }
    if (head == "detector" || head.starts_with("detector(")) {
      // Optional coordinate annotation, possibly split across tokens.
      std::size_t t = 1;
      if (head != "detector" || (t < tokens.size() && tokens[t][0] == '(')) {
        std::string coords = head == "detector" ? "" : head.substr(8);
        while (coords.find(')') == std::string::npos) {
          if (t >= tokens.size()) throw DemParseError(line_no, "unterminated detector coordinates");
          coords += tokens[t++];
        }
      }
      if (t >= tokens.size()) throw DemParseError(line_no, "detector line missing D target");
      std::uint32_t idx = 0;
      if (tokens[t][0] != 'D' || !parse_uint(tokens[t].substr(1), idx))
        throw DemParseError(line_no, "malformed detector target '" + tokens[t] + "'");
      max_detector = std::max<std::size_t>(max_detector, idx);
      any_detector = true;
      continue;
    }
    if (head == "logical_observable") {
      if (tokens.size() != 2) throw DemParseError(line_no, "malformed logical_observable line");
      std::uint32_t idx = 0;
      if (tokens[1][0] != 'L' || !parse_uint(tokens[1].substr(1), idx))
        throw DemParseError(line_no, "malformed observable target '" + tokens[1] + "'");
      max_observable = std::max<std::size_t>(max_observable, idx);
      any_observable = true;
      continue;
    }
    throw DemParseError(line_no, "unrecognised instruction '" + head + "'");
  }

  // Merge duplicate (H column, L column) pairs: XOR-convolution of priors.
  std::map<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>, std::size_t> seen;
  std::vector<RawColumn> merged;
  for (auto& col : columns) {
    auto key = std::make_pair(col.detectors, col.observables);
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(std::move(key), merged.size());
      merged.push_back(std::move(col));
    } else {
      double& p = merged[it->second].prior;
      p = p * (1.0 - col.prior) + col.prior * (1.0 - p);
    }
  }

  DetectorErrorModel dem;
  dem.num_detectors = any_detector ? max_detector + 1 : 0;
  dem.num_observables = any_observable ? max_observable + 1 : 0;
  dem.num_mechanisms = merged.size();
  std::vector<std::vector<std::uint32_t>> h_rows(dem.num_detectors);
  std::vector<std::vector<std::uint32_t>> l_rows(dem.num_observables);
  dem.priors.reserve(merged.size());
  for (std::size_t j = 0; j < merged.size(); ++j) {
    for (std::uint32_t d : merged[j].detectors) h_rows[d].push_back(static_cast<std::uint32_t>(j));
    for (std::uint32_t o : merged[j].observables)
      l_rows[o].push_back(static_cast<std::uint32_t>(j));
    dem.priors.push_back(merged[j].prior);
  }
  dem.H = SparseBinaryMatrix::from_rows(dem.num_detectors, dem.num_mechanisms, std::move(h_rows));
  dem.Lmat =
      SparseBinaryMatrix::from_rows(dem.num_observables, dem.num_mechanisms, std::move(l_rows));
  return dem;
}

std::string emit_dem(const DetectorErrorModel& dem) {
  std::ostringstream out;
  char buf[64];
  std::size_t max_detector_used = 0, max_observable_used = 0;
  bool det_used = false, obs_used = false;
  for (std::size_t j = 0; j < dem.num_mechanisms; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", dem.priors[j]);
    out << "error(" << buf << ")";
    for (std::uint32_t d : dem.H.col_adjacency[j]) {
      out << " D" << d;
      max_detector_used = std::max<std::size_t>(max_detector_used, d);
      det_used = true;
    }
    for (std::uint32_t o : dem.Lmat.col_adjacency[j]) {
      out << " L" << o;
      max_observable_used = std::max<std::size_t>(max_observable_used, o);
      obs_used = true;
    }
    out << "\n";
  }
  // Pin detector/observable counts not implied by any mechanism.
  if (dem.num_detectors > 0 && (!det_used || max_detector_used + 1 != dem.num_detectors))
    out << "detector D" << dem.num_detectors - 1 << "\n";
  if (dem.num_observables > 0 && (!obs_used || max_observable_used + 1 != dem.num_observables))
    out << "logical_observable L" << dem.num_observables - 1 << "\n";
  return out.str();
}

SampledShot sample(const DetectorErrorModel& dem, Xoshiro256ss& rng) {
  SampledShot shot;
  shot.error = BitVector(dem.num_mechanisms);
  shot.syndrome = BitVector(dem.num_detectors);
  shot.observable_flips = BitVector(dem.num_observables);
  for (std::size_t j = 0; j < dem.num_mechanisms; ++j) {
    if (rng.next_double() < dem.priors[j]) {
      shot.error.set(j, true);
      for (std::uint32_t d : dem.H.col_adjacency[j]) shot.syndrome.flip(d);
      for (std::uint32_t o : dem.Lmat.col_adjacency[j]) shot.observable_flips.flip(o);
    }
  }
  return shot;
}

std::vector<double> llr_priors(const DetectorErrorModel& dem) {
  std::vector<double> llrs(dem.num_mechanisms);
  for (std::size_t j = 0; j < dem.num_mechanisms; ++j)
    llrs[j] = std::log((1.0 - dem.priors[j]) / dem.priors[j]);
  return llrs;
}

DetectorErrorModel code_capacity_dem(const SparseBinaryMatrix& H, const BitVector& logical,
                                     double p) {
  if (logical.length() != H.cols)
    throw std::invalid_argument("logical length does not match qubit count");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("probability must lie in (0,1)");
  DetectorErrorModel dem;
  dem.num_detectors = H.rows;
  dem.num_mechanisms = H.cols;
  dem.num_observables = 1;
  dem.H = H;
  dem.Lmat = SparseBinaryMatrix::from_rows(1, H.cols, {logical.support()});
  dem.priors.assign(H.cols, p);
  return dem;
}

}  // namespace vibelsd
