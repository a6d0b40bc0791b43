#include "vibelsd/bp.hpp"

#include <cmath>
#include <stdexcept>

namespace vibelsd {

namespace {

inline double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

BPDecoder::BPDecoder(const SparseBinaryMatrix& H, BPConfig config)
    : h_(H), config_(std::move(config)) {
  if (config_.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(config_.min_sum_scale > 0.0 && config_.min_sum_scale <= 1.0))
    throw std::invalid_argument("min_sum_scale must lie in (0, 1]");
  if (config_.schedule.kind == ScheduleKind::Serial) {
    if (config_.schedule.permutation.size() != H.cols)
      throw std::invalid_argument("serial schedule permutation must cover all variables");
    std::vector<bool> seen(H.cols, false);
    for (const std::uint32_t v : config_.schedule.permutation) {
      if (v >= H.cols || seen[v])
        throw std::invalid_argument("serial schedule permutation must be a bijection");
      seen[v] = true;
    }
  }

  edge_offset_.assign(h_.rows + 1, 0);
  for (std::size_t c = 0; c < h_.rows; ++c)
    edge_offset_[c + 1] =
        edge_offset_[c] + static_cast<std::uint32_t>(h_.row_adjacency[c].size());
  var_edges_.assign(h_.cols, {});
  for (std::size_t c = 0; c < h_.rows; ++c) {
    for (std::size_t k = 0; k < h_.row_adjacency[c].size(); ++k) {
      const std::uint32_t v = h_.row_adjacency[c][k];
      var_edges_[v].emplace_back(static_cast<std::uint32_t>(c),
                                 edge_offset_[c] + static_cast<std::uint32_t>(k));
    }
  }
  const std::size_t num_edges = edge_offset_[h_.rows];
  m_v2c_.assign(num_edges, 0.0);
  m_c2v_.assign(num_edges, 0.0);
  posteriors_.assign(h_.cols, 0.0);
  estimate_ = BitVector(h_.cols);
}

void BPDecoder::reset(const BitVector& s, std::span<const double> llrs) {
  if (s.length() != h_.rows || llrs.size() != h_.cols)
    throw std::invalid_argument("bp_decode dimension mismatch");
  llrs_.assign(llrs.begin(), llrs.end());
  for (double l : llrs_)
    if (!std::isfinite(l)) throw std::invalid_argument("channel LLRs must be finite");
  syndrome_ = s;
  // Initialise every variable-to-check message with the channel LLR.
  for (std::size_t c = 0; c < h_.rows; ++c)
    for (std::size_t k = 0; k < h_.row_adjacency[c].size(); ++k)
      m_v2c_[edge_offset_[c] + k] = llrs_[h_.row_adjacency[c][k]];
  std::fill(m_c2v_.begin(), m_c2v_.end(), 0.0);
  posteriors_ = llrs_;
  estimate_ = hard_decision(posteriors_);
  converged_ = false;
  iterations_ = 0;
}

void BPDecoder::check_update_all() {
  for (std::size_t c = 0; c < h_.rows; ++c) {
    const std::size_t deg = h_.row_adjacency[c].size();
    const std::size_t base = edge_offset_[c];
    double sign_product = syndrome_.get(c) ? -1.0 : 1.0;
    double min1 = HUGE_VAL, min2 = HUGE_VAL;
    std::size_t argmin = 0;
    for (std::size_t k = 0; k < deg; ++k) {
      const double m = m_v2c_[base + k];
      sign_product *= sign_of(m);
      const double mag = std::fabs(m);
      if (mag < min1) {
        min2 = min1;
        min1 = mag;
        argmin = k;
      } else if (mag < min2) {
        min2 = mag;
      }
    }
    for (std::size_t k = 0; k < deg; ++k) {
      const double excl_sign = sign_product * sign_of(m_v2c_[base + k]);
      const double mag = (k == argmin) ? min2 : min1;
      // Degree-1 checks have an empty excluded-neighbour set; the empty
      // product/min convention is +1 / +infinity clamped to 0 contribution.
      m_c2v_[base + k] = deg == 1 ? 0.0 : excl_sign * mag * config_.min_sum_scale;
    }
  }
}

void BPDecoder::variable_update_parallel() {
  for (std::size_t v = 0; v < h_.cols; ++v) {
    double total = llrs_[v];
    for (const auto& [c, e] : var_edges_[v]) total += m_c2v_[e];
    posteriors_[v] = total;
    for (const auto& [c, e] : var_edges_[v]) m_v2c_[e] = total - m_c2v_[e];
    estimate_.set(v, total <= 0.0);
  }
}

void BPDecoder::serial_sweep() {
  for (const std::uint32_t v : config_.schedule.permutation) {
    // First refresh this variable's incoming check messages from the
    // current variable-to-check messages (serial-V discipline), then emit.
    for (const auto& [c, e] : var_edges_[v]) {
      const std::size_t deg = h_.row_adjacency[c].size();
      const std::size_t base = edge_offset_[c];
      double sign_product = syndrome_.get(c) ? -1.0 : 1.0;
      double min_mag = HUGE_VAL;
      for (std::size_t k = 0; k < deg; ++k) {
        if (base + k == e) continue;
        const double m = m_v2c_[base + k];
        sign_product *= sign_of(m);
        min_mag = std::min(min_mag, std::fabs(m));
      }
      m_c2v_[e] = deg == 1 ? 0.0 : sign_product * min_mag * config_.min_sum_scale;
    }
    double total = llrs_[v];
    for (const auto& [c, e] : var_edges_[v]) total += m_c2v_[e];
    posteriors_[v] = total;
    for (const auto& [c, e] : var_edges_[v]) m_v2c_[e] = total - m_c2v_[e];
    estimate_.set(v, total <= 0.0);
  }
}

bool BPDecoder::syndrome_matches() {
  for (std::size_t c = 0; c < h_.rows; ++c) {
    unsigned parity = 0;
    for (std::uint32_t v : h_.row_adjacency[c]) parity ^= static_cast<unsigned>(estimate_.get(v));
    if (parity != static_cast<unsigned>(syndrome_.get(c))) return false;
  }
  return true;
}

bool BPDecoder::step() {
  if (config_.schedule.kind == ScheduleKind::Serial) {
    serial_sweep();
  } else {
    check_update_all();
    variable_update_parallel();
  }
  ++iterations_;
  converged_ = syndrome_matches();
  return converged_;
}

BPResult BPDecoder::result() const {
  return BPResult{converged_, estimate_, posteriors_, iterations_};
}

BPResult bp_decode(const SparseBinaryMatrix& H, const BitVector& s, std::span<const double> llrs,
                   const BPConfig& config, const CancelToken* cancel) {
  BPDecoder decoder(H, config);
  decoder.reset(s, llrs);
  for (int t = 0; t < config.max_iterations; ++t) {
    if (cancel && cancel->cancelled()) break;
    if (decoder.step()) break;
  }
  return decoder.result();
}

std::vector<double> check_messages(std::span<const double> incoming, bool syndrome_bit,
                                   double scale) {
  const std::size_t deg = incoming.size();
  std::vector<double> out(deg, 0.0);
  if (deg <= 1) return out;
  double sign_product = syndrome_bit ? -1.0 : 1.0;
  double min1 = HUGE_VAL, min2 = HUGE_VAL;
  std::size_t argmin = 0;
  for (std::size_t k = 0; k < deg; ++k) {
    sign_product *= sign_of(incoming[k]);
    const double mag = std::fabs(incoming[k]);
    if (mag < min1) {
      min2 = min1;
      min1 = mag;
      argmin = k;
    } else if (mag < min2) {
      min2 = mag;
    }
  }
  for (std::size_t k = 0; k < deg; ++k)
    out[k] = sign_product * sign_of(incoming[k]) * ((k == argmin) ? min2 : min1) * scale;
  return out;
}

BitVector hard_decision(std::span<const double> posteriors) {
  BitVector e(posteriors.size());
  for (std::size_t v = 0; v < posteriors.size(); ++v)
    if (posteriors[v] <= 0.0) e.set(v, true);
  return e;
}

}  // namespace vibelsd
