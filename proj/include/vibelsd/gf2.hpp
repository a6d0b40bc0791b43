#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace vibelsd {

// Dense bit-packed vector over GF(2).
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t length) : length_(length), words_((length + 63) / 64, 0) {}

  static BitVector from_support(std::size_t length, std::span<const std::uint32_t> support) {
    BitVector v(length);
    for (std::uint32_t i : support) v.set(i, true);
    return v;
  }

  std::size_t length() const { return length_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void set(std::size_t i, bool value) {
    const std::uint64_t mask = 1ULL << (i & 63);
    if (value)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

  // Zero-extends (or truncates) to the new length.
  void resize(std::size_t length) {
    length_ = length;
    words_.resize((length + 63) / 64, 0);
    if (length & 63 && !words_.empty()) words_.back() &= (1ULL << (length & 63)) - 1;
  }

  void xor_assign(const BitVector& other);
  bool is_zero() const;
  std::size_t weight() const;
  std::vector<std::uint32_t> support() const;

  std::uint64_t* words() { return words_.data(); }
  const std::uint64_t* words() const { return words_.data(); }
  std::size_t word_count() const { return words_.size(); }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t length_ = 0;
  std::vector<std::uint64_t> words_;
};

// Sparse binary matrix stored as transpose-consistent row and column
// adjacency lists (both sorted, duplicate-free).
struct SparseBinaryMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::uint32_t>> row_adjacency;
  std::vector<std::vector<std::uint32_t>> col_adjacency;

  static SparseBinaryMatrix from_rows(std::size_t rows, std::size_t cols,
                                      std::vector<std::vector<std::uint32_t>> row_lists);
  static SparseBinaryMatrix identity(std::size_t n);
};

BitVector matvec_mod2(const SparseBinaryMatrix& m, const BitVector& x);

// Row-echelon elimination record.  `transform` holds the accumulated row
// operations T (one bit-packed row over the matrix's row indices per matrix
// row), so T * original = reduced; applying T to a right-hand side replays
// the same operations.
struct EliminationResult {
  std::vector<std::uint32_t> pivot_cols;  // in the order encountered under column_order
  std::vector<std::uint32_t> pivot_rows;  // pivot_rows[k] pairs with pivot_cols[k]
  std::size_t rank = 0;
  std::vector<BitVector> transform;

  BitVector apply_transform(const BitVector& rhs) const;
};

EliminationResult row_echelon(const SparseBinaryMatrix& m,
                              std::span<const std::uint32_t> column_order);

// Solve m x = s with x supported only on the pivot columns chosen under
// column_order.  Empty optional iff s is outside the column space.
std::optional<BitVector> solve_mod2(const SparseBinaryMatrix& m, const BitVector& s,
                                    std::span<const std::uint32_t> column_order);

bool in_rowspace(const SparseBinaryMatrix& m, const BitVector& v);

std::vector<std::uint32_t> natural_column_order(std::size_t cols);

// Incremental Gauss-Jordan elimination over a growing local submatrix, used
// by cluster decoding.  Rows are local indices handed out by add_row();
// columns are added one at a time as bit-patterns over the current rows.
// The transformation matrix T is maintained so that T applied to an added
// pivot column yields a distinct unit vector.
class IncrementalElimination {
 public:
  // Registers a new local row; returns its index.
  std::uint32_t add_row();

  // Adds a column identified by `col_id` whose set bits are `local_rows`.
  // Returns true when the column became a pivot.
  bool add_column(std::uint32_t col_id, std::span<const std::uint32_t> local_rows);

  std::size_t row_count() const { return num_rows_; }
  std::size_t pivot_count() const { return pivot_rows_.size(); }

  // True iff `local_syndrome` (bit-packed over local rows) lies in the span
  // of the added columns.
  bool valid_for(const BitVector& local_syndrome) const;

  // Returns the col_ids of the pivot columns whose coefficient is 1 in the
  // (unique, pivot-supported) solution for `local_syndrome`.  Precondition:
  // valid_for(local_syndrome).
  std::vector<std::uint32_t> solve(const BitVector& local_syndrome) const;

 private:
  BitVector transformed(const BitVector& local_syndrome) const;

  std::size_t num_rows_ = 0;
  std::vector<BitVector> transform_;        // T rows, packed over local rows
  std::vector<std::uint32_t> pivot_rows_;   // pivot row of k-th pivot column
  std::vector<std::uint32_t> pivot_cols_;   // col_id of k-th pivot column
  std::vector<std::uint8_t> is_pivot_row_;
};

}  // namespace vibelsd
