#include "wb/matrix.hpp"

namespace wb {

namespace {

using boost::multiprecision::abs;

struct Worker {
    IntMatrix a, u, v, uinv, vinv;

    explicit Worker(const IntMatrix& m)
        : a(m),
          u(IntMatrix::identity(m.rows())),
          v(IntMatrix::identity(m.cols())),
          uinv(IntMatrix::identity(m.rows())),
          vinv(IntMatrix::identity(m.cols())) {}

    // Row ops act on a and u, with the inverse op recorded on uinv so that
    // uinv stays the literal inverse of u (u * a_orig * v = a throughout).
    void swap_rows(size_t i, size_t j) {
        if (i == j) return;
        for (size_t k = 0; k < a.cols(); ++k) std::swap(a(i, k), a(j, k));
        for (size_t k = 0; k < u.cols(); ++k) std::swap(u(i, k), u(j, k));
        for (size_t k = 0; k < uinv.rows(); ++k) std::swap(uinv(k, i), uinv(k, j));
    }
    void swap_cols(size_t i, size_t j) {
        if (i == j) return;
        for (size_t k = 0; k < a.rows(); ++k) std::swap(a(k, i), a(k, j));
        for (size_t k = 0; k < v.rows(); ++k) std::swap(v(k, i), v(k, j));
        for (size_t k = 0; k < vinv.cols(); ++k) std::swap(vinv(i, k), vinv(j, k));
    }
    // row i -= f * row j
    void add_row(size_t i, size_t j, const Int& f) {
        if (f == 0) return;
        for (size_t k = 0; k < a.cols(); ++k) a(i, k) -= f * a(j, k);
        for (size_t k = 0; k < u.cols(); ++k) u(i, k) -= f * u(j, k);
        for (size_t k = 0; k < uinv.rows(); ++k) uinv(k, j) += f * uinv(k, i);
    }
    // col i -= f * col j
    void add_col(size_t i, size_t j, const Int& f) {
        if (f == 0) return;
        for (size_t k = 0; k < a.rows(); ++k) a(k, i) -= f * a(k, j);
        for (size_t k = 0; k < v.rows(); ++k) v(k, i) -= f * v(k, j);
        for (size_t k = 0; k < vinv.cols(); ++k) vinv(j, k) += f * vinv(i, k);
    }
    void negate_row(size_t i) {
        for (size_t k = 0; k < a.cols(); ++k) a(i, k) = -a(i, k);
        for (size_t k = 0; k < u.cols(); ++k) u(i, k) = -u(i, k);
        for (size_t k = 0; k < uinv.rows(); ++k) uinv(k, i) = -uinv(k, i);
    }

    // Smallest nonzero |entry| in a[t.., t..], ties by lowest (row, col).
    bool find_pivot(size_t t, size_t& pi, size_t& pj) const {
        bool found = false;
        Int best = 0;
        for (size_t i = t; i < a.rows(); ++i)
            for (size_t j = t; j < a.cols(); ++j) {
                if (a(i, j) == 0) continue;
                Int m = abs(a(i, j));
                if (!found || m < best) {
                    found = true;
                    best = m;
                    pi = i;
                    pj = j;
                }
            }
        return found;
    }

    void run() {
        size_t n = std::min(a.rows(), a.cols());
        for (size_t t = 0; t < n; ++t) {
            size_t pi = 0, pj = 0;
            while (true) {
                if (!find_pivot(t, pi, pj)) return finish(t);
                swap_rows(t, pi);
                swap_cols(t, pj);
                if (a(t, t) < 0) negate_row(t);
                bool clean = true;
                for (size_t i = t + 1; i < a.rows(); ++i) {
                    Int q = a(i, t) / a(t, t);
                    add_row(i, t, q);
                    if (a(i, t) != 0) clean = false;
                }
                for (size_t j = t + 1; j < a.cols(); ++j) {
                    Int q = a(t, j) / a(t, t);
                    add_col(j, t, q);
                    if (a(t, j) != 0) clean = false;
                }
                if (!clean) continue;  // smaller remainders exist; re-pivot
                // Enforce divisibility against the rest of the block.
                bool divides = true;
                for (size_t i = t + 1; i < a.rows() && divides; ++i)
                    for (size_t j = t + 1; j < a.cols(); ++j)
                        if (a(i, j) % a(t, t) != 0) {
                            add_row(t, i, Int(-1));  // fold row i into row t
                            divides = false;
                            break;
                        }
                if (divides) break;
            }
        }
        finish(n);
    }

    void finish(size_t) {}
};

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
    Worker w(m);
    w.run();
    SmithForm out;
    out.u = std::move(w.u);
    out.v = std::move(w.v);
    out.uinv = std::move(w.uinv);
    out.vinv = std::move(w.vinv);
    out.d = std::move(w.a);
    size_t n = std::min(out.d.rows(), out.d.cols());
    out.rank = 0;
    for (size_t i = 0; i < n; ++i)
        if (out.d(i, i) != 0) ++out.rank;
    return out;
}

bool integer_solve(const IntMatrix& a, const std::vector<Int>& b,
                   std::vector<Int>& out) {
    if (b.size() != a.rows()) throw Error("integer_solve: dim mismatch");
    SmithForm s = smith_normal_form(a);
    std::vector<Int> c = s.u.apply(b);
    std::vector<Int> w(a.cols(), Int(0));
    for (size_t i = 0; i < c.size(); ++i) {
        if (i < s.rank) {
            if (c[i] % s.d(i, i) != 0) return false;
            w[i] = c[i] / s.d(i, i);
        } else if (c[i] != 0) {
            return false;
        }
    }
    out = s.v.apply(w);
    return true;
}

IntMatrix integer_nullspace(const IntMatrix& a) {
    SmithForm s = smith_normal_form(a);
    size_t n = a.cols();
    IntMatrix out(n, n - s.rank);
    for (size_t k = s.rank; k < n; ++k)
        for (size_t i = 0; i < n; ++i) out(i, k - s.rank) = s.v(i, k);
    return out;
}

IntMatrix lattice_column_basis(const IntMatrix& a) {
    SmithForm s = smith_normal_form(a);
    IntMatrix out(a.rows(), s.rank);
    // Columns of uinv scaled by the invariant factors span a * Z^cols.
    for (size_t k = 0; k < s.rank; ++k)
        for (size_t i = 0; i < a.rows(); ++i)
            out(i, k) = s.uinv(i, k) * s.d(k, k);
    return out;
}

}  // namespace wb
