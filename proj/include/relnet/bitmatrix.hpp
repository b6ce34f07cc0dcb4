#pragma once

// GF(2) matrices with word-packed rows, plus the shift-matrix construction
// used by the linear deterministic channel model.

#include <cstdint>
#include <string>
#include <vector>

#include "relnet/network.hpp"

namespace relnet {

struct LinearDeterministicNetwork;  // reduction.hpp

class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool get(int r, int c) const {
        return (words_[word_index(r, c)] >> (c & 63)) & 1u;
    }
    void set(int r, int c, bool v) {
        const std::uint64_t bit = std::uint64_t{1} << (c & 63);
        if (v)
            words_[word_index(r, c)] |= bit;
        else
            words_[word_index(r, c)] &= ~bit;
    }

    // row[dst] ^= row[src]
    void row_xor(int dst, int src);
    void swap_rows(int a, int b);

    bool operator==(const BitMatrix& o) const = default;

    // '0'/'1' characters, one text line per row
    std::string dump() const;

  private:
    std::size_t word_index(int r, int c) const {
        return std::size_t(r) * wpr_ + std::size_t(c >> 6);
    }
    int rows_ = 0;
    int cols_ = 0;
    int wpr_ = 0;  // words per row
    std::vector<std::uint64_t> words_;
};

// q x q matrix that keeps the `levels` most significant of q input bits and
// shifts them down by q - levels positions: entry (r, c) = 1 iff
// c = r - (q - levels). Rank is exactly `levels`.
BitMatrix shift_matrix(int levels, int q);

// rank over GF(2) by word-parallel elimination; input taken by value
int rank_gf2(BitMatrix m);

// Block transfer matrix of a cut in a linear deterministic network: one
// q x q block per (sender in omega, receiver in omega_c) pair, receivers
// ascending down the rows and senders ascending across the columns; the
// block is shift_matrix(edge levels, q) where the edge exists, zero else.
BitMatrix cut_transfer_matrix_ld(const LinearDeterministicNetwork& ld,
                                 const Cut& cut);

}  // namespace relnet
