#pragma once

#include <utility>
#include <vector>

#include "vibelsd/gf2.hpp"

namespace vibelsd {

enum class Tiling { Hex666, SquareOct488 };
enum class Colour { R = 0, G = 1, B = 2 };

// Triangular 2D colour code on the chosen tiling, code-capacity level.
// One plaquette per stabiliser generator row of H; the logical
// representative is the all-ones vector.
struct ColourCodeLattice {
  Tiling tiling;
  int distance;
  std::size_t qubit_count;
  std::vector<std::pair<Colour, std::vector<std::uint32_t>>> plaquettes;
  SparseBinaryMatrix H;  // (n-1)/2 rows x n cols
  BitVector logical;     // all-ones
};

// Builds the lattice for odd 3 <= d <= 31.
//
// Hex666: sites (r,c) with 0 <= c <= r <= 3(d-1)/2 on a triangular grid;
// sites with (r - 2c) % 3 == 1 are plaquette centres, the rest are qubits
// (indexed row-major).  A plaquette joins the up-to-six qubits at
// (r, c+-1), (r-1, c-1), (r-1, c), (r+1, c), (r+1, c+1); its colour is
// r mod 3.
//
// SquareOct488: squares at integer (i,j) with i,j >= 0, i+j <= K-1 where
// K = (d-1)/2, each carrying qubits at its N,E,S,W corners; octagons sit at
// (i+1/2, j+1/2).  Octagons on the hypotenuse and the bottom/left
// boundaries are truncated to weight-4 faces along oct-oct edge pairs, with
// extra qubits on the hypotenuse and the bottom-right corner.  Squares are
// B; octagon-derived faces alternate R/G by centre-coordinate parity.
ColourCodeLattice build_colour_code(Tiling tiling, int d);

// The all-ones vector of length n (commutes with every plaquette since all
// plaquettes have even weight; verified non-stabiliser by elimination).
BitVector logical_representative(const ColourCodeLattice& lattice);

}  // namespace vibelsd
