#pragma once

#include <atomic>
#include <span>
#include <vector>

#include "vibelsd/gf2.hpp"

namespace vibelsd {

enum class ScheduleKind { Parallel, Serial };

struct Schedule {
  ScheduleKind kind = ScheduleKind::Parallel;
  std::vector<std::uint32_t> permutation;  // Serial only; bijection on variables

  static Schedule parallel() { return {ScheduleKind::Parallel, {}}; }
  static Schedule serial(std::vector<std::uint32_t> permutation) {
    return {ScheduleKind::Serial, std::move(permutation)};
  }
  static Schedule serial_identity(std::size_t n) {
    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    return serial(std::move(perm));
  }
};

struct BPConfig {
  int max_iterations = 20;
  Schedule schedule = Schedule::parallel();
  double min_sum_scale = 1.0;  // in (0, 1]; 1.0 is plain min-sum
};

struct BPResult {
  bool converged = false;
  BitVector estimate;
  std::vector<double> posteriors;
  int iterations_used = 0;
};

// Cooperative cancellation flag, polled once per BP iteration.
class CancelToken {
 public:
  void cancel() { flag_.store(true, std::memory_order_relaxed); }
  bool cancelled() const { return flag_.load(std::memory_order_relaxed); }
  void reset() { flag_.store(false, std::memory_order_relaxed); }

 private:
  std::atomic<bool> flag_{false};
};

// Min-sum belief propagation over the Tanner graph of H.  Owns all message
// state; reusable across shots via reset().  The step-wise interface lets
// an ensemble run several decoders in lockstep.
class BPDecoder {
 public:
  BPDecoder(const SparseBinaryMatrix& H, BPConfig config);

  // Prepares for a new syndrome; llrs are the channel LLRs (length cols).
  void reset(const BitVector& s, std::span<const double> llrs);

  // Runs one full iteration (check + variable update + hard decision);
  // returns true when the hard decision satisfies H e = s.
  bool step();

  bool converged() const { return converged_; }
  int iterations() const { return iterations_; }
  const std::vector<double>& posteriors() const { return posteriors_; }
  const BitVector& estimate() const { return estimate_; }
  BPResult result() const;

 private:
  void check_update_all();
  void variable_update_parallel();
  void serial_sweep();
  bool syndrome_matches();

  const SparseBinaryMatrix& h_;
  BPConfig config_;
  // Edge e enumerated row-major over H; var_edges_[v] lists (check, e).
  std::vector<std::uint32_t> edge_offset_;  // per check, into messages
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> var_edges_;
  std::vector<double> m_v2c_, m_c2v_;
  std::vector<double> llrs_, posteriors_;
  BitVector syndrome_, estimate_;
  bool converged_ = false;
  int iterations_ = 0;
};

// One-call decode per Algorithm-1 semantics: iterates until the hard
// decision reproduces s, the iteration limit is reached, or `cancel` fires
// (non-converged result with the latest posteriors).
BPResult bp_decode(const SparseBinaryMatrix& H, const BitVector& s, std::span<const double> llrs,
                   const BPConfig& config, const CancelToken* cancel = nullptr);

// Hard decision e_v = 1 iff L_v <= 0.
BitVector hard_decision(std::span<const double> posteriors);

// Min-sum check-to-variable update for a single check: outgoing[k] =
// (-1)^syndrome_bit * prod_{k' != k} sign(incoming[k']) *
// min_{k' != k} |incoming[k']| * scale.  Degree-1 checks emit 0.
std::vector<double> check_messages(std::span<const double> incoming, bool syndrome_bit,
                                   double scale);

}  // namespace vibelsd
