#include "vibelsd/colour_code.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace vibelsd {

namespace {

using Plaquettes = std::vector<std::pair<Colour, std::vector<std::uint32_t>>>;

Plaquettes build_hex(int d, std::size_t& qubit_count) {
  const int R = 3 * (d - 1) / 2;
  std::map<std::pair<int, int>, std::uint32_t> qubits;
  std::vector<std::pair<int, int>> plaq_sites;
  for (int r = 0; r <= R; ++r) {
    for (int c = 0; c <= r; ++c) {
      if (((r - 2 * c) % 3 + 3) % 3 == 1)
        plaq_sites.emplace_back(r, c);
      else
        qubits.emplace(std::make_pair(r, c), static_cast<std::uint32_t>(qubits.size()));
    }
  }
  Plaquettes plaqs;
  for (const auto& [r, c] : plaq_sites) {
    const std::pair<int, int> nbrs[6] = {{r, c - 1},     {r, c + 1}, {r - 1, c - 1},
                                         {r - 1, c},     {r + 1, c}, {r + 1, c + 1}};
    std::vector<std::uint32_t> sup;
    for (const auto& p : nbrs)
      if (auto it = qubits.find(p); it != qubits.end()) sup.push_back(it->second);
    std::sort(sup.begin(), sup.end());
    plaqs.emplace_back(static_cast<Colour>(r % 3), std::move(sup));
  }
  qubit_count = qubits.size();
  return plaqs;
}

Plaquettes build_sqoct(int d, std::size_t& qubit_count) {
  const int K = (d - 1) / 2;
  // Qubits keyed by (square i, square j, corner N/E/S/W); corners of the
  // virtual hypotenuse squares (i+j == K) supply the boundary extras.
  std::map<std::tuple<int, int, char>, std::uint32_t> qubits;
  auto q = [&qubits](int i, int j, char v) {
    return qubits.emplace(std::make_tuple(i, j, v), static_cast<std::uint32_t>(qubits.size()))
        .first->second;
  };
  auto rg = [](int parity) { return ((parity % 2) + 2) % 2 == 0 ? Colour::R : Colour::G; };
  Plaquettes plaqs;
  auto add = [&plaqs](Colour col, std::vector<std::uint32_t> sup) {
    std::sort(sup.begin(), sup.end());
    plaqs.emplace_back(col, std::move(sup));
  };
  // Squares (all colour B), row-major.
  for (int j = 0; j < K; ++j)
    for (int i = 0; i < K - j; ++i)
      add(Colour::B, {q(i, j, 'N'), q(i, j, 'E'), q(i, j, 'S'), q(i, j, 'W')});
  // Full octagons in the bulk (i+j <= K-2), built from the four oct-oct
  // edge pairs around centre (i+1/2, j+1/2).
  for (int j = 0; j + 1 < K; ++j) {
    for (int i = 0; i + j + 1 < K; ++i) {
      add(rg(i + j), {q(i, j, 'E'), q(i + 1, j, 'W'), q(i, j, 'N'), q(i, j + 1, 'S'),
                      q(i, j + 1, 'E'), q(i + 1, j + 1, 'W'), q(i + 1, j, 'N'),
                      q(i + 1, j + 1, 'S')});
    }
  }
  // Hypotenuse octagons (i+j == K-1): keep the S and W edge pairs only.
  for (int i = 0; i < K; ++i) {
    const int j = K - 1 - i;
    add(rg(i + j), {q(i, j, 'E'), q(i + 1, j, 'W'), q(i, j, 'N'), q(i, j + 1, 'S')});
  }
  // Bottom-right corner face, pairing square (K-1,0) with the virtual
  // square (K,0).
  add(rg(K - 2), {q(K - 1, 0, 'E'), q(K - 1, 0, 'S'), q(K, 0, 'W'), q(K, 0, 'S')});
  // Remaining bottom faces pair neighbouring squares (i,0) and (i+1,0).
  for (int i = K - 3; i >= 0; i -= 2)
    add(rg(i - 1), {q(i, 0, 'E'), q(i, 0, 'S'), q(i + 1, 0, 'W'), q(i + 1, 0, 'S')});
  // Left boundary faces pair squares (0,j) and (0,j+1), from the top down.
  for (int j = K - 2; j >= 0; j -= 2)
    add(rg(j - 1), {q(0, j, 'N'), q(0, j, 'W'), q(0, j + 1, 'S'), q(0, j + 1, 'W')});
  qubit_count = qubits.size();
  return plaqs;
}

}  // namespace

ColourCodeLattice build_colour_code(Tiling tiling, int d) {
  if (d < 3 || d % 2 == 0 || d > 31)
    throw std::invalid_argument("distance must be odd and within [3, 31]");
  ColourCodeLattice lattice;
  lattice.tiling = tiling;
  lattice.distance = d;
  lattice.plaquettes = tiling == Tiling::Hex666 ? build_hex(d, lattice.qubit_count)
                                                : build_sqoct(d, lattice.qubit_count);
  std::vector<std::vector<std::uint32_t>> rows;
  rows.reserve(lattice.plaquettes.size());
  for (const auto& [colour, sup] : lattice.plaquettes) rows.push_back(sup);
  const std::size_t row_count = rows.size();
  lattice.H = SparseBinaryMatrix::from_rows(row_count, lattice.qubit_count, std::move(rows));
  lattice.logical = BitVector(lattice.qubit_count);
  for (std::size_t i = 0; i < lattice.qubit_count; ++i) lattice.logical.set(i, true);
  return lattice;
}

BitVector logical_representative(const ColourCodeLattice& lattice) { return lattice.logical; }

}  // namespace vibelsd
