#include "relnet/bitmatrix.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "relnet/reduction.hpp"

namespace relnet {

BitMatrix::BitMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("BitMatrix dimensions must be nonnegative");
    wpr_ = (cols + 63) / 64;
    words_.assign(std::size_t(rows) * wpr_, 0);
}

void BitMatrix::row_xor(int dst, int src) {
    std::uint64_t* d = words_.data() + std::size_t(dst) * wpr_;
    const std::uint64_t* s = words_.data() + std::size_t(src) * wpr_;
    for (int w = 0; w < wpr_; ++w) d[w] ^= s[w];
}

void BitMatrix::swap_rows(int a, int b) {
    if (a == b) return;
    std::uint64_t* ra = words_.data() + std::size_t(a) * wpr_;
    std::uint64_t* rb = words_.data() + std::size_t(b) * wpr_;
    for (int w = 0; w < wpr_; ++w) std::swap(ra[w], rb[w]);
}

std::string BitMatrix::dump() const {
    std::string out;
    out.reserve(std::size_t(rows_) * (cols_ + 1));
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) out.push_back(get(r, c) ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

BitMatrix shift_matrix(int levels, int q) {
    if (q < 0 || levels < 0 || levels > q)
        throw std::invalid_argument("shift_matrix requires 0 <= levels <= q");
    BitMatrix m(q, q);
    const int shift = q - levels;
    for (int r = shift; r < q; ++r) m.set(r, r - shift, true);
    return m;
}

int rank_gf2(BitMatrix m) {
    int rank = 0;
    for (int c = 0; c < m.cols() && rank < m.rows(); ++c) {
        int pivot = -1;
        for (int r = rank; r < m.rows(); ++r) {
            if (m.get(r, c)) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        m.swap_rows(rank, pivot);
        for (int r = pivot + 1; r < m.rows(); ++r)
            if (m.get(r, c)) m.row_xor(r, rank);
        ++rank;
    }
    return rank;
}

BitMatrix cut_transfer_matrix_ld(const LinearDeterministicNetwork& ld,
                                 const Cut& cut) {
    std::vector<NodeId> senders;
    std::vector<NodeId> receivers;
    for (NodeId v = 0; v < ld.num_nodes; ++v)
        (cut.in_omega(v) ? senders : receivers).push_back(v);

    const int q = ld.q;
    BitMatrix m(int(receivers.size()) * q, int(senders.size()) * q);
    for (const auto& e : ld.edges) {
        auto si = std::find(senders.begin(), senders.end(), e.from);
        auto ri = std::find(receivers.begin(), receivers.end(), e.to);
        if (si == senders.end() || ri == receivers.end()) continue;
        const int bc = int(si - senders.begin()) * q;
        const int br = int(ri - receivers.begin()) * q;
        const int shift = q - e.levels;
        for (int r = shift; r < q; ++r) m.set(br + r, bc + r - shift, true);
    }
    return m;
}

}  // namespace relnet
