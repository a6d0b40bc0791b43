#include "vibelsd/gf2.hpp"

#include <algorithm>
#include <bit>

#include "vibelsd/kernels.hpp"

namespace vibelsd {

void BitVector::xor_assign(const BitVector& other) {
  if (other.length_ != length_) throw std::invalid_argument("BitVector length mismatch in xor");
  kernels::xor_words(words_.data(), other.words_.data(), words_.size());
}

bool BitVector::is_zero() const {
  for (std::uint64_t w : words_)
    if (w) return false;
  return true;
}

std::size_t BitVector::weight() const {
  std::size_t w = 0;
  for (std::uint64_t word : words_) w += static_cast<std::size_t>(std::popcount(word));
  return w;
}

std::vector<std::uint32_t> BitVector::support() const {
  std::vector<std::uint32_t> out;
  for (std::size_t wi = 0; wi < words_.size(); ++wi) {
    std::uint64_t w = words_[wi];
    while (w) {
      const int b = std::countr_zero(w);
      out.push_back(static_cast<std::uint32_t>(wi * 64 + b));
      w &= w - 1;
    }
  }
  return out;
}

SparseBinaryMatrix SparseBinaryMatrix::from_rows(std::size_t rows, std::size_t cols,
                                                 std::vector<std::vector<std::uint32_t>> row_lists) {
  if (row_lists.size() != rows) throw std::invalid_argument("row list count mismatch");
  SparseBinaryMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_adjacency = std::move(row_lists);
  m.col_adjacency.assign(cols, {});
  for (std::size_t r = 0; r < rows; ++r) {
    auto& row = m.row_adjacency[r];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    for (std::uint32_t c : row) {
      if (c >= cols) throw std::invalid_argument("column index out of range");
      m.col_adjacency[c].push_back(static_cast<std::uint32_t>(r));
    }
  }
  return m;
}

SparseBinaryMatrix SparseBinaryMatrix::identity(std::size_t n) {
  std::vector<std::vector<std::uint32_t>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = {static_cast<std::uint32_t>(i)};
  return from_rows(n, n, std::move(rows));
}

BitVector matvec_mod2(const SparseBinaryMatrix& m, const BitVector& x) {
  if (x.length() != m.cols) throw std::invalid_argument("matvec dimension mismatch");
  BitVector out(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    unsigned parity = 0;
    for (std::uint32_t c : m.row_adjacency[r]) parity ^= static_cast<unsigned>(x.get(c));
    if (parity) out.set(r, true);
  }
  return out;
}

BitVector EliminationResult::apply_transform(const BitVector& rhs) const {
  BitVector out(transform.size());
  for (std::size_t r = 0; r < transform.size(); ++r) {
    const auto& t = transform[r];
    if (kernels::and_parity(t.words(), rhs.words(), t.word_count())) out.set(r, true);
  }
  return out;
}

EliminationResult row_echelon(const SparseBinaryMatrix& m,
                              std::span<const std::uint32_t> column_order) {
  if (column_order.size() != m.cols) throw std::invalid_argument("column_order size mismatch");
  // Dense bit-packed working copy plus the row-operation record T.
  std::vector<BitVector> work(m.rows, BitVector(m.cols));
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::uint32_t c : m.row_adjacency[r]) work[r].set(c, true);

  EliminationResult res;
  res.transform.assign(m.rows, BitVector(m.rows));
  for (std::size_t r = 0; r < m.rows; ++r) res.transform[r].set(r, true);

  std::vector<std::uint8_t> used(m.rows, 0);
  for (std::uint32_t col : column_order) {
    std::size_t pivot = m.rows;
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (!used[r] && work[r].get(col)) {
        pivot = r;
        break;
      }
    }
    if (pivot == m.rows) continue;
    used[pivot] = 1;
    res.pivot_cols.push_back(col);
    res.pivot_rows.push_back(static_cast<std::uint32_t>(pivot));
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r != pivot && work[r].get(col)) {
        work[r].xor_assign(work[pivot]);
        res.transform[r].xor_assign(res.transform[pivot]);
      }
    }
  }
  res.rank = res.pivot_cols.size();
  return res;
}

std::optional<BitVector> solve_mod2(const SparseBinaryMatrix& m, const BitVector& s,
                                    std::span<const std::uint32_t> column_order) {
  if (s.length() != m.rows) throw std::invalid_argument("solve dimension mismatch");
  const EliminationResult elim = row_echelon(m, column_order);
  const BitVector y = elim.apply_transform(s);
  std::vector<std::uint8_t> is_pivot_row(m.rows, 0);
  for (std::uint32_t r : elim.pivot_rows) is_pivot_row[r] = 1;
  for (std::size_t r = 0; r < m.rows; ++r)
    if (!is_pivot_row[r] && y.get(r)) return std::nullopt;
  BitVector x(m.cols);
  for (std::size_t k = 0; k < elim.rank; ++k)
    if (y.get(elim.pivot_rows[k])) x.set(elim.pivot_cols[k], true);
  return x;
}

bool in_rowspace(const SparseBinaryMatrix& m, const BitVector& v) {
  if (v.length() != m.cols) throw std::invalid_argument("in_rowspace dimension mismatch");
  // rank([m; v]) == rank(m) iff v is a combination of rows of m.
  std::vector<std::vector<std::uint32_t>> rows = m.row_adjacency;
  rows.push_back(v.support());
  const SparseBinaryMatrix aug = SparseBinaryMatrix::from_rows(m.rows + 1, m.cols, std::move(rows));
  const auto order = natural_column_order(m.cols);
  return row_echelon(aug, order).rank == row_echelon(m, order).rank;
}

std::vector<std::uint32_t> natural_column_order(std::size_t cols) {
  std::vector<std::uint32_t> order(cols);
  for (std::size_t i = 0; i < cols; ++i) order[i] = static_cast<std::uint32_t>(i);
  return order;
}

std::uint32_t IncrementalElimination::add_row() {
  const auto idx = static_cast<std::uint32_t>(num_rows_++);
  for (auto& t : transform_) t.resize(num_rows_);
  BitVector unit(num_rows_);
  unit.set(idx, true);
  transform_.push_back(std::move(unit));
  is_pivot_row_.push_back(0);
  return idx;
}

bool IncrementalElimination::add_column(std::uint32_t col_id,
                                        std::span<const std::uint32_t> local_rows) {
  // v = T * h, where h is the incoming column over local rows.
  BitVector h(num_rows_);
  for (std::uint32_t r : local_rows) h.set(r, true);
  BitVector v = transformed(h);
  std::size_t pivot = num_rows_;
  for (std::uint32_t r : v.support()) {
    if (!is_pivot_row_[r]) {
      pivot = r;
      break;
    }
  }
  if (pivot == num_rows_) return false;  // dependent column
  is_pivot_row_[pivot] = 1;
  pivot_rows_.push_back(static_cast<std::uint32_t>(pivot));
  pivot_cols_.push_back(col_id);
  for (std::uint32_t r : v.support())
    if (r != pivot) transform_[r].xor_assign(transform_[pivot]);
  return true;
}

BitVector IncrementalElimination::transformed(const BitVector& local_syndrome) const {
  BitVector y(num_rows_);
  for (std::size_t r = 0; r < num_rows_; ++r) {
    const auto& t = transform_[r];
    if (kernels::and_parity(t.words(), local_syndrome.words(), t.word_count())) y.set(r, true);
  }
  return y;
}

bool IncrementalElimination::valid_for(const BitVector& local_syndrome) const {
  const BitVector y = transformed(local_syndrome);
  for (std::uint32_t r : y.support())
    if (!is_pivot_row_[r]) return false;
  return true;
}

std::vector<std::uint32_t> IncrementalElimination::solve(const BitVector& local_syndrome) const {
  const BitVector y = transformed(local_syndrome);
  std::vector<std::uint32_t> out;
  for (std::size_t k = 0; k < pivot_rows_.size(); ++k)
    if (y.get(pivot_rows_[k])) out.push_back(pivot_cols_[k]);
  return out;
}

}  // namespace vibelsd
