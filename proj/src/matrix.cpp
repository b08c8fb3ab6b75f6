#include "wb/matrix.hpp"

#include <boost/multiprecision/integer.hpp>

namespace wb {

RatMatrix to_rational(const IntMatrix& m) {
    RatMatrix out(m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) out(i, j) = Rat(m(i, j));
    return out;
}

IntMatrix to_integral(const RatMatrix& m) {
    IntMatrix out(m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) {
            if (denominator(m(i, j)) != 1)
                throw Error("to_integral: non-integer entry");
            out(i, j) = numerator(m(i, j));
        }
    return out;
}

std::vector<Rat> to_rational(const std::vector<Int>& v) {
    std::vector<Rat> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = Rat(v[i]);
    return out;
}

std::vector<Int> to_integral(const std::vector<Rat>& v) {
    std::vector<Int> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        if (denominator(v[i]) != 1) throw Error("to_integral: non-integer entry");
        out[i] = numerator(v[i]);
    }
    return out;
}

Int lcm_of_denominators(const RatMatrix& m) {
    Int l = 1;
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            l = boost::multiprecision::lcm(l, Int(denominator(m(i, j))));
    return l;
}

namespace {

// Row echelon over Q; returns pivot columns, modifies m (and b if given).
std::vector<size_t> row_reduce(RatMatrix& m, std::vector<Rat>* b) {
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        size_t sel = row;
        while (sel < m.rows() && m(sel, col) == 0) ++sel;
        if (sel == m.rows()) continue;
        if (sel != row) {
            for (size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(sel, j));
            if (b) std::swap((*b)[row], (*b)[sel]);
        }
        Rat inv = Rat(1) / m(row, col);
        for (size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
        if (b) (*b)[row] *= inv;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col) == 0) continue;
            Rat f = m(i, col);
            for (size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
            if (b) (*b)[i] -= f * (*b)[row];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

RatMatrix rational_nullspace(const RatMatrix& m_in) {
    RatMatrix m = m_in;
    std::vector<size_t> pivots = row_reduce(m, nullptr);
    std::vector<bool> is_pivot(m.cols(), false);
    for (size_t p : pivots) is_pivot[p] = true;
    size_t nfree = m.cols() - pivots.size();
    RatMatrix out(m.cols(), nfree);
    size_t k = 0;
    for (size_t col = 0; col < m.cols(); ++col) {
        if (is_pivot[col]) continue;
        out(col, k) = 1;
        for (size_t r = 0; r < pivots.size(); ++r) out(pivots[r], k) = -m(r, col);
        ++k;
    }
    return out;
}

bool rational_solve(const RatMatrix& m_in, const std::vector<Rat>& b_in,
                    std::vector<Rat>& out) {
    if (b_in.size() != m_in.rows()) throw Error("rational_solve: dim mismatch");
    RatMatrix m = m_in;
    std::vector<Rat> b = b_in;
    std::vector<size_t> pivots = row_reduce(m, &b);
    for (size_t i = pivots.size(); i < m.rows(); ++i)
        if (b[i] != 0) return false;
    out.assign(m.cols(), Rat(0));
    for (size_t r = 0; r < pivots.size(); ++r) out[pivots[r]] = b[r];
    return true;
}

size_t rational_rank(const RatMatrix& m_in) {
    RatMatrix m = m_in;
    return row_reduce(m, nullptr).size();
}

}  // namespace wb
