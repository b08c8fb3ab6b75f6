#include "wb/qz.hpp"

#include <sstream>

namespace wb {

namespace {

Rat frac_mod1(const Rat& x) {
    Int n = numerator(x), d = denominator(x);
    Int r = n % d;
    if (r < 0) r += d;
    return Rat(r, d);
}

bool is_integer(const Rat& x) { return denominator(x) == 1; }

std::vector<Rat> unit_vec(size_t n, size_t i) {
    std::vector<Rat> v(n, Rat(0));
    v[i] = 1;
    return v;
}

// Rows making b[rows, :] invertible (b must have full column rank).
std::vector<size_t> pivot_rows(const RatMatrix& b) {
    RatMatrix m = b.transpose();
    std::vector<size_t> rows;
    size_t row = 0;
    for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        size_t sel = row;
        while (sel < m.rows() && m(sel, col) == 0) ++sel;
        if (sel == m.rows()) continue;
        for (size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(sel, j));
        Rat inv = Rat(1) / m(row, col);
        for (size_t j = 0; j < m.cols(); ++j) m(row, j) *= inv;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col) == 0) continue;
            Rat f = m(i, col);
            for (size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
        }
        rows.push_back(col);
        ++row;
    }
    if (rows.size() != b.cols()) throw Error("pivot_rows: rank deficient");
    return rows;
}

// Independent subset of the columns, spanning the same subspace.
RatMatrix column_space_basis(const RatMatrix& m) {
    RatMatrix out(m.rows(), 0);
    for (size_t j = 0; j < m.cols(); ++j) {
        bool zero = true;
        for (size_t i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0) zero = false;
        if (zero) continue;
        RatMatrix cand = out.hcat(m.submatrix(0, m.rows(), j, j + 1));
        if (rational_rank(cand) == cand.cols()) out = std::move(cand);
    }
    return out;
}

// Basis of the Z-span of rational columns.
RatMatrix lattice_basis_rational(const RatMatrix& m) {
    if (m.cols() == 0) return RatMatrix(m.rows(), 0);
    Int den = lcm_of_denominators(m);
    IntMatrix scaled(m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            scaled(i, j) = numerator(Rat(m(i, j) * den));
    IntMatrix b = lattice_column_basis(scaled);
    RatMatrix out(b.rows(), b.cols());
    for (size_t i = 0; i < b.rows(); ++i)
        for (size_t j = 0; j < b.cols(); ++j) out(i, j) = Rat(b(i, j), den);
    return out;
}

RatMatrix columns(const RatMatrix& m, const std::vector<size_t>& idx) {
    RatMatrix out(m.rows(), idx.size());
    for (size_t k = 0; k < idx.size(); ++k)
        for (size_t i = 0; i < m.rows(); ++i) out(i, k) = m(i, idx[k]);
    return out;
}

}  // namespace

QZGroup::QZGroup(size_t a, size_t b, size_t c, std::vector<Int> tors)
    : nq(a), nqz(b), nz(c), torsion(std::move(tors)) {
    for (const Int& d : torsion)
        if (d < 2) throw Error("QZGroup: torsion factor < 2");
}

CoordKind QZGroup::kind(size_t i) const {
    if (i < nq) return CoordKind::Q;
    if (i < nq + nqz) return CoordKind::QZ;
    if (i < nq + nqz + nz) return CoordKind::Z;
    if (i < dim()) return CoordKind::Tor;
    throw Error("QZGroup::kind: index out of range");
}

bool QZGroup::valid_element(const std::vector<Rat>& x) const {
    if (x.size() != dim()) return false;
    for (size_t i = 0; i < x.size(); ++i)
        if (!q_type(i) && !is_integer(x[i])) return false;
    return true;
}

std::vector<Rat> QZGroup::reduce(std::vector<Rat> x) const {
    if (!valid_element(x)) throw Error("QZGroup::reduce: invalid element");
    for (size_t i = nq; i < nq + nqz; ++i) x[i] = frac_mod1(x[i]);
    for (size_t i = nq + nqz + nz; i < dim(); ++i) {
        Int d = tor_order(i);
        Int r = numerator(x[i]) % d;
        if (r < 0) r += d;
        x[i] = Rat(r);
    }
    return x;
}

bool QZGroup::is_zero_element(const std::vector<Rat>& x) const {
    for (const Rat& v : reduce(x))
        if (v != 0) return false;
    return true;
}

RatMatrix QZGroup::lattice_cols() const {
    RatMatrix m(dim(), nqz + torsion.size());
    for (size_t j = 0; j < nqz; ++j) m(nq + j, j) = 1;
    for (size_t j = 0; j < torsion.size(); ++j)
        m(nq + nqz + nz + j, nqz + j) = Rat(torsion[j]);
    return m;
}

QZGroup QZGroup::canonical() const {
    if (torsion.empty()) return *this;
    size_t n = torsion.size();
    IntMatrix rel(n, n);
    for (size_t i = 0; i < n; ++i) rel(i, i) = torsion[i];
    FgAbGroup t = z_subquotient(n, IntMatrix::identity(n), rel).group;
    return QZGroup(nq, nqz, nz, t.torsion);
}

FgAbGroup QZGroup::to_fg() const {
    if (nq != 0 || nqz != 0)
        throw NotFinitelyGenerated("to_fg: group has divisible part " +
                                   describe());
    QZGroup c = canonical();
    return FgAbGroup(c.nz, c.torsion);
}

QZGroup QZGroup::from_fg(const FgAbGroup& g) {
    return QZGroup(0, 0, g.rank, g.torsion);
}

std::string QZGroup::describe() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    auto piece = [&](const std::string& s) {
        if (!first) os << " + ";
        os << s;
        first = false;
    };
    if (nq == 1) piece("Q");
    if (nq > 1) piece("Q^" + std::to_string(nq));
    if (nqz == 1) piece("Q/Z");
    if (nqz > 1) piece("(Q/Z)^" + std::to_string(nqz));
    if (nz == 1) piece("Z");
    if (nz > 1) piece("Z^" + std::to_string(nz));
    for (const Int& d : torsion) piece("Z/" + d.str());
    return os.str();
}

QZMorphism::QZMorphism(QZGroup d, QZGroup c, RatMatrix m)
    : dom(std::move(d)), cod(std::move(c)), mat(std::move(m)) {
    if (mat.rows() != cod.dim() || mat.cols() != dom.dim())
        throw Error("QZMorphism: matrix shape mismatch");
    for (size_t j = 0; j < dom.dim(); ++j) {
        CoordKind cj = dom.kind(j);
        for (size_t i = 0; i < cod.dim(); ++i) {
            const Rat& e = mat(i, j);
            if (e == 0) continue;
            CoordKind ci = cod.kind(i);
            bool row_z = (ci == CoordKind::Z || ci == CoordKind::Tor);
            bool col_q = (cj == CoordKind::Q || cj == CoordKind::QZ);
            if (row_z && col_q)
                throw NotWellDefined("QZMorphism: divisible into reduced");
            if (row_z && !is_integer(e))
                throw NotWellDefined("QZMorphism: non-integer into Z-type");
            if (cj == CoordKind::QZ) {
                if (ci == CoordKind::Q)
                    throw NotWellDefined("QZMorphism: Q/Z into Q");
                if (ci == CoordKind::QZ && !is_integer(e))
                    throw NotWellDefined("QZMorphism: Q/Z into Q/Z non-integer");
            }
            if (cj == CoordKind::Tor) {
                Int dj = dom.tor_order(j);
                if (ci == CoordKind::Q)
                    throw NotWellDefined("QZMorphism: torsion into Q");
                if (ci == CoordKind::QZ && !is_integer(e * dj))
                    throw NotWellDefined("QZMorphism: torsion order not killed");
                if (ci == CoordKind::Tor &&
                    numerator(e) * dj % cod.tor_order(i) != 0)
                    throw NotWellDefined("QZMorphism: torsion order not killed");
            }
        }
    }
}

bool QZMorphism::is_zero() const {
    for (size_t j = 0; j < dom.dim(); ++j) {
        CoordKind cj = dom.kind(j);
        for (size_t i = 0; i < cod.dim(); ++i) {
            const Rat& e = mat(i, j);
            if (e == 0) continue;
            CoordKind ci = cod.kind(i);
            if (cj == CoordKind::Q || cj == CoordKind::QZ) return false;
            if (ci == CoordKind::Q || ci == CoordKind::Z) return false;
            if (ci == CoordKind::QZ) {
                if (!is_integer(e)) return false;
            } else {  // Tor row
                if (numerator(e) % cod.tor_order(i) != 0) return false;
            }
        }
    }
    return true;
}

bool QZMorphism::equals(const QZMorphism& o) const {
    if (!(dom == o.dom) || !(cod == o.cod)) return false;
    return QZMorphism(dom, cod, mat - o.mat).is_zero();
}

QZMorphism compose(const QZMorphism& g, const QZMorphism& f) {
    if (!(f.cod == g.dom)) throw Error("compose(qz): domain mismatch");
    return QZMorphism(f.dom, g.cod, g.mat * f.mat);
}

QZMorphism fg_to_qz_morphism(const FgMorphism& f) {
    return QZMorphism(QZGroup::from_fg(f.dom), QZGroup::from_fg(f.cod),
                      to_rational(f.mat));
}

bool solve_mixed(const RatMatrix& aq, const RatMatrix& az,
                 const std::vector<Rat>& y, std::vector<Rat>& x,
                 std::vector<Int>& u) {
    const size_t rows = aq.rows();
    if (az.rows() != rows || y.size() != rows)
        throw Error("solve_mixed: dim mismatch");
    RatMatrix m = aq.hcat(az);
    std::vector<Rat> b = y;
    const size_t alpha = aq.cols();
    // eliminate with pivots restricted to the rational unknowns
    std::vector<std::pair<size_t, size_t>> pivots;  // (row, col)
    size_t row = 0;
    for (size_t col = 0; col < alpha && row < rows; ++col) {
        size_t sel = row;
        while (sel < rows && m(sel, col) == 0) ++sel;
        if (sel == rows) continue;
        if (sel != row) {
            for (size_t j = 0; j < m.cols(); ++j) std::swap(m(row, j), m(sel, j));
            std::swap(b[row], b[sel]);
        }
        Rat inv = Rat(1) / m(row, col);
        for (size_t j = 0; j < m.cols(); ++j) m(row, j) *= inv;
        b[row] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == row || m(i, col) == 0) continue;
            Rat f = m(i, col);
            for (size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
            b[i] -= f * b[row];
        }
        pivots.emplace_back(row, col);
        ++row;
    }
    // remaining rows: integral constraints on u
    const size_t beta = az.cols();
    std::vector<std::vector<Int>> crows;
    std::vector<Int> crhs;
    for (size_t i = row; i < rows; ++i) {
        Int den = 1;
        for (size_t j = 0; j < beta; ++j)
            den = boost::multiprecision::lcm(den,
                                             Int(denominator(m(i, alpha + j))));
        den = boost::multiprecision::lcm(den, Int(denominator(b[i])));
        std::vector<Int> r(beta);
        bool nonzero = false;
        for (size_t j = 0; j < beta; ++j) {
            r[j] = numerator(Rat(m(i, alpha + j) * den));
            if (r[j] != 0) nonzero = true;
        }
        Int rhs = numerator(Rat(b[i] * den));
        if (!nonzero && rhs != 0) return false;
        crows.push_back(std::move(r));
        crhs.push_back(rhs);
    }
    IntMatrix cm(crows.size(), beta);
    for (size_t i = 0; i < crows.size(); ++i)
        for (size_t j = 0; j < beta; ++j) cm(i, j) = crows[i][j];
    u.assign(beta, Int(0));
    if (beta > 0 || !crows.empty()) {
        if (!integer_solve(cm, crhs, u)) return false;
    }
    // back-substitute the rational unknowns (free ones are zero)
    x.assign(alpha, Rat(0));
    for (auto [r, c] : pivots) {
        Rat v = b[r];
        for (size_t j = 0; j < beta; ++j)
            if (m(r, alpha + j) != 0) v -= m(r, alpha + j) * Rat(u[j]);
        // other rational columns in this row are free (set to zero)
        x[c] = v;
    }
    return true;
}

bool QZSubgroup::member(const std::vector<Rat>& x) const {
    std::vector<Rat> cd;
    std::vector<Int> cf;
    return solve_mixed(d, f, x, cd, cf);
}

void QZSubgroup::coords(const std::vector<Rat>& x, std::vector<Rat>& cd,
                        std::vector<Int>& cf) const {
    if (!solve_mixed(d, f, x, cd, cf))
        throw Error("QZSubgroup::coords: element outside subgroup");
}

QZSubgroup normalize_subgroup(const QZGroup& parent, const RatMatrix& dgens,
                              const RatMatrix& fgens) {
    const size_t n = parent.dim();
    if (dgens.rows() != n || fgens.rows() != n)
        throw Error("normalize_subgroup: ambient mismatch");
    QZSubgroup out;
    out.parent = parent;
    out.d = column_space_basis(dgens);
    for (size_t j = 0; j < out.d.cols(); ++j)
        for (size_t i = 0; i < n; ++i)
            if (!parent.q_type(i) && out.d(i, j) != 0)
                throw Error("normalize_subgroup: divisible part touches Z-type");
    RatMatrix fproj = fgens;
    if (out.d.cols() > 0) {
        std::vector<size_t> piv = pivot_rows(out.d);
        RatMatrix dp(piv.size(), out.d.cols());
        for (size_t i = 0; i < piv.size(); ++i)
            for (size_t j = 0; j < out.d.cols(); ++j) dp(i, j) = out.d(piv[i], j);
        for (size_t j = 0; j < fproj.cols(); ++j) {
            std::vector<Rat> rhs(piv.size());
            for (size_t i = 0; i < piv.size(); ++i) rhs[i] = fproj(piv[i], j);
            std::vector<Rat> c;
            if (!rational_solve(dp, rhs, c))
                throw Error("normalize_subgroup: projection failed");
            std::vector<Rat> corr = out.d.apply(c);
            for (size_t i = 0; i < n; ++i) fproj(i, j) -= corr[i];
        }
    }
    out.f = lattice_basis_rational(fproj);
    for (size_t j = 0; j < out.f.cols(); ++j)
        for (size_t i = 0; i < n; ++i)
            if (!parent.q_type(i) && !is_integer(out.f(i, j)))
                throw Error("normalize_subgroup: non-integral Z-type entry");
    return out;
}

QZSubgroup full_subgroup(const QZGroup& g) {
    const size_t n = g.dim();
    std::vector<size_t> qi, zi;
    for (size_t i = 0; i < n; ++i)
        (g.q_type(i) ? qi : zi).push_back(i);
    RatMatrix d(n, qi.size()), f(n, zi.size());
    for (size_t k = 0; k < qi.size(); ++k) d(qi[k], k) = 1;
    for (size_t k = 0; k < zi.size(); ++k) f(zi[k], k) = 1;
    QZSubgroup out;
    out.parent = g;
    out.d = std::move(d);
    out.f = std::move(f);
    return out;
}

QZSubgroup lattice_subgroup(const QZGroup& g) {
    QZSubgroup out;
    out.parent = g;
    out.d = RatMatrix(g.dim(), 0);
    out.f = g.lattice_cols();
    return out;
}

QZSubgroup add_subgroups(const QZSubgroup& s1, const QZSubgroup& s2) {
    if (!(s1.parent == s2.parent)) throw Error("add_subgroups: parent mismatch");
    return normalize_subgroup(s1.parent, s1.d.hcat(s2.d), s1.f.hcat(s2.f));
}

bool subgroup_contains(const QZSubgroup& outer, const QZSubgroup& inner) {
    for (size_t j = 0; j < inner.d.cols(); ++j) {
        // a divisible generator must lie in the divisible part of outer
        std::vector<Rat> c;
        if (!rational_solve(outer.d, inner.d.col(j), c)) return false;
    }
    for (size_t j = 0; j < inner.f.cols(); ++j)
        if (!outer.member(inner.f.col(j))) return false;
    return true;
}

QZSubgroup kernel_subgroup(const QZMorphism& fm) {
    const QZGroup& dom = fm.dom;
    const QZGroup& cod = fm.cod;
    const size_t n = dom.dim();
    // exact-zero rows: target Q and Z coordinates
    std::vector<size_t> zero_rows, int_rows;
    for (size_t i = 0; i < cod.dim(); ++i) {
        CoordKind k = cod.kind(i);
        if (k == CoordKind::Q || k == CoordKind::Z) zero_rows.push_back(i);
    }
    RatMatrix m0(zero_rows.size(), n);
    for (size_t r = 0; r < zero_rows.size(); ++r)
        for (size_t j = 0; j < n; ++j) m0(r, j) = fm.mat(zero_rows[r], j);
    RatMatrix w = rational_nullspace(m0);
    // integrality rows: domain Z-type coordinates, target Q/Z rows,
    // target torsion rows scaled by 1/d
    std::vector<std::vector<Rat>> nrows;
    for (size_t j = 0; j < n; ++j) {
        if (dom.q_type(j)) continue;
        std::vector<Rat> r(n, Rat(0));
        r[j] = 1;
        nrows.push_back(std::move(r));
    }
    for (size_t i = 0; i < cod.dim(); ++i) {
        CoordKind k = cod.kind(i);
        if (k == CoordKind::QZ) {
            std::vector<Rat> r(n);
            for (size_t j = 0; j < n; ++j) r[j] = fm.mat(i, j);
            nrows.push_back(std::move(r));
        } else if (k == CoordKind::Tor) {
            Rat inv = Rat(1, cod.tor_order(i));
            std::vector<Rat> r(n);
            for (size_t j = 0; j < n; ++j) r[j] = fm.mat(i, j) * inv;
            nrows.push_back(std::move(r));
        }
    }
    RatMatrix nm(nrows.size(), n);
    for (size_t i = 0; i < nrows.size(); ++i)
        for (size_t j = 0; j < n; ++j) nm(i, j) = nrows[i][j];
    RatMatrix p = nm * w;
    Int den = lcm_of_denominators(p);
    IntMatrix pi(p.rows(), p.cols());
    for (size_t i = 0; i < p.rows(); ++i)
        for (size_t j = 0; j < p.cols(); ++j) pi(i, j) = numerator(Rat(p(i, j) * den));
    SmithForm s = smith_normal_form(pi);
    RatMatrix wv = w * to_rational(s.v);
    QZSubgroup out;
    out.parent = dom;
    out.d = RatMatrix(n, wv.cols() - s.rank);
    for (size_t k = s.rank; k < wv.cols(); ++k)
        for (size_t i = 0; i < n; ++i) out.d(i, k - s.rank) = wv(i, k);
    out.f = RatMatrix(n, s.rank);
    for (size_t k = 0; k < s.rank; ++k) {
        Rat scale = Rat(den, s.d(k, k));
        for (size_t i = 0; i < n; ++i) out.f(i, k) = wv(i, k) * scale;
    }
    return out;
}

QZSubgroup image_subgroup(const QZMorphism& fm) {
    const size_t n = fm.dom.dim();
    std::vector<size_t> qi, zi;
    for (size_t j = 0; j < n; ++j)
        (fm.dom.q_type(j) ? qi : zi).push_back(j);
    return normalize_subgroup(fm.cod, columns(fm.mat, qi), columns(fm.mat, zi));
}

CanonQZ canonical_subquotient(const QZGroup& parent, const QZSubgroup& k,
                              const QZSubgroup& r) {
    const size_t alpha = k.d.cols(), gamma = k.f.cols();
    // R generators in K coordinates
    RatMatrix dr(alpha, r.d.cols());
    for (size_t j = 0; j < r.d.cols(); ++j) {
        std::vector<Rat> c;
        if (!rational_solve(k.d, r.d.col(j), c))
            throw Error("canonical_subquotient: R divisible part outside K");
        dr.set_col(j, c);
    }
    RatMatrix gq(alpha, r.f.cols());
    IntMatrix gz(gamma, r.f.cols());
    for (size_t j = 0; j < r.f.cols(); ++j) {
        std::vector<Rat> cd;
        std::vector<Int> cf;
        k.coords(r.f.col(j), cd, cf);
        gq.set_col(j, cd);
        for (size_t i = 0; i < gamma; ++i) gz(i, j) = cf[i];
    }

    // quotient of the divisible coordinates by span(dr)
    RatMatrix bv = column_space_basis(dr);
    const size_t k0 = bv.cols();
    const size_t mu = alpha - k0;
    std::vector<size_t> pv = k0 ? pivot_rows(bv) : std::vector<size_t>{};
    std::vector<bool> is_pivot(alpha, false);
    for (size_t i : pv) is_pivot[i] = true;
    std::vector<size_t> comp;
    for (size_t i = 0; i < alpha; ++i)
        if (!is_pivot[i]) comp.push_back(i);
    RatMatrix bvp(k0, k0);
    for (size_t i = 0; i < k0; ++i)
        for (size_t j = 0; j < k0; ++j) bvp(i, j) = bv(pv[i], j);
    auto phi_q = [bv, bvp, pv, comp, alpha, mu,
                  k0](const std::vector<Rat>& x) {
        std::vector<Rat> y = x;
        if (k0 > 0) {
            std::vector<Rat> rhs(k0);
            for (size_t i = 0; i < k0; ++i) rhs[i] = x[pv[i]];
            std::vector<Rat> c;
            if (!rational_solve(bvp, rhs, c))
                throw Error("canonical_subquotient: internal solve failed");
            std::vector<Rat> corr = bv.apply(c);
            for (size_t i = 0; i < alpha; ++i) y[i] -= corr[i];
        }
        std::vector<Rat> out(mu);
        for (size_t i = 0; i < mu; ++i) out[i] = y[comp[i]];
        return out;
    };
    auto sect_q = [&](const std::vector<Rat>& y) {
        std::vector<Rat> x(alpha, Rat(0));
        for (size_t i = 0; i < mu; ++i) x[comp[i]] = y[i];
        return x;
    };

    // the relation lattice in (Q^mu, Z^gamma)
    RatMatrix lq(mu, r.f.cols());
    for (size_t j = 0; j < r.f.cols(); ++j) lq.set_col(j, phi_q(gq.col(j)));

    // its intersection with Q^mu, as a lattice
    IntMatrix kb = integer_nullspace(gz);
    RatMatrix b0 = lattice_basis_rational(lq * to_rational(kb));
    const size_t kk = b0.cols();
    std::vector<size_t> pv0 = kk ? pivot_rows(b0) : std::vector<size_t>{};
    std::vector<bool> is_p0(mu, false);
    for (size_t i : pv0) is_p0[i] = true;
    std::vector<size_t> comp0;
    for (size_t i = 0; i < mu; ++i)
        if (!is_p0[i]) comp0.push_back(i);
    RatMatrix b0p(kk, kk);
    for (size_t i = 0; i < kk; ++i)
        for (size_t j = 0; j < kk; ++j) b0p(i, j) = b0(pv0[i], j);

    // reduced part: Z^gamma modulo the integer projection of the relations
    ZSubquotient fg = z_subquotient(gamma, IntMatrix::identity(gamma), gz);
    const FgAbGroup& fgg = fg.group;

    CanonQZ out;
    out.parent = parent;
    out.group = QZGroup(mu - kk, kk, fgg.rank, fgg.torsion);

    // representatives of the reduced generators, with divisible correction
    // so that (order) * rep lies exactly in the relation subgroup
    RatMatrix repq(mu, fgg.ngens());
    IntMatrix repz(gamma, fgg.ngens());
    for (size_t j = 0; j < fgg.ngens(); ++j) {
        std::vector<Int> wj = fg.reps.col(j);
        for (size_t i = 0; i < gamma; ++i) repz(i, j) = wj[i];
        Int d = fgg.gen_order(j);
        if (d != 0) {
            std::vector<Int> target(gamma);
            for (size_t i = 0; i < gamma; ++i) target[i] = d * wj[i];
            std::vector<Int> kap;
            if (!integer_solve(gz, target, kap))
                throw Error("canonical_subquotient: torsion lift failed");
            std::vector<Rat> v = lq.apply(to_rational(kap));
            for (size_t i = 0; i < mu; ++i) repq(i, j) = v[i] / Rat(d);
        }
    }

    // linear lift of the projection onto canonical coordinates
    RatMatrix kd = k.d, kf = k.f;
    IntMatrix gz_copy = gz;
    RatMatrix lq_copy = lq;
    ZSubquotient fg_copy = fg;
    out.lin = [kd, kf, phi_q, lq_copy, gz_copy, fg_copy, repq, repz, b0, b0p,
               pv0, comp0, mu, kk, gamma,
               grp = out.group](const std::vector<Rat>& x) {
        std::vector<Rat> cd;
        std::vector<Int> cf;
        if (!solve_mixed(kd, kf, x, cd, cf))
            throw Error("CanonQZ: element outside the subgroup");
        std::vector<Rat> xq = phi_q(cd);
        // reduced-part coordinates, linear (no modular reduction)
        std::vector<Int> uz = fg_copy.umat.apply(cf);
        std::vector<Int> u;
        u.reserve(fg_copy.group.ngens());
        for (size_t i = 0; i < uz.size(); ++i)
            if (fg_copy.orders[i] == 0) u.push_back(uz[i]);
        for (size_t i = 0; i < uz.size(); ++i)
            if (fg_copy.orders[i] > 1) u.push_back(uz[i]);
        // subtract the chosen representatives
        std::vector<Rat> q1 = xq;
        std::vector<Int> z1 = cf;
        for (size_t j = 0; j < u.size(); ++j) {
            if (u[j] == 0) continue;
            for (size_t i = 0; i < mu; ++i) q1[i] -= Rat(u[j]) * repq(i, j);
            for (size_t i = 0; i < gamma; ++i) z1[i] -= u[j] * repz(i, j);
        }
        // kill the remaining reduced part with a relation combination
        std::vector<Int> kap;
        if (!integer_solve(gz_copy, z1, kap))
            throw Error("CanonQZ: relation solve failed");
        std::vector<Rat> corr = lq_copy.apply(to_rational(kap));
        for (size_t i = 0; i < mu; ++i) q1[i] -= corr[i];
        // split off the divisible torsion coordinates
        std::vector<Rat> c0(kk, Rat(0)), w0(mu - kk, Rat(0));
        if (kk > 0) {
            std::vector<Rat> rhs(kk);
            for (size_t i = 0; i < kk; ++i) rhs[i] = q1[pv0[i]];
            if (!rational_solve(b0p, rhs, c0))
                throw Error("CanonQZ: divisible split failed");
            std::vector<Rat> bc = b0.apply(c0);
            for (size_t i = 0; i < mu; ++i) q1[i] -= bc[i];
        }
        for (size_t i = 0; i < comp0.size(); ++i) w0[i] = q1[comp0[i]];
        std::vector<Rat> coords;
        coords.reserve(grp.dim());
        for (const Rat& v : w0) coords.push_back(v);
        for (const Rat& v : c0) coords.push_back(v);
        for (const Int& v : u) coords.push_back(Rat(v));
        return coords;
    };

    // section: representatives of the canonical coordinates in the parent
    const size_t n = parent.dim();
    out.section = RatMatrix(n, out.group.dim());
    size_t col = 0;
    for (size_t i = 0; i < mu - kk; ++i) {
        std::vector<Rat> y(mu, Rat(0));
        y[comp0[i]] = 1;
        out.section.set_col(col++, k.d.apply(sect_q(y)));
    }
    for (size_t i = 0; i < kk; ++i)
        out.section.set_col(col++, k.d.apply(sect_q(b0.col(i))));
    for (size_t j = 0; j < fgg.ngens(); ++j) {
        std::vector<Rat> v = k.d.apply(sect_q(repq.col(j)));
        std::vector<Rat> w = k.f.apply(to_rational(repz.col(j)));
        for (size_t i = 0; i < n; ++i) v[i] += w[i];
        out.section.set_col(col++, v);
    }
    return out;
}

QZKernel kernel_qz(const QZMorphism& f) {
    QZKernel out;
    out.canon = canonical_subquotient(f.dom, kernel_subgroup(f),
                                      lattice_subgroup(f.dom));
    out.group = out.canon.group;
    out.inclusion = QZMorphism(out.group, f.dom, out.canon.section);
    return out;
}

QZQuotient quotient_qz(const QZGroup& parent, const QZSubgroup& r) {
    QZQuotient out;
    QZSubgroup rfull = add_subgroups(r, lattice_subgroup(parent));
    out.canon = canonical_subquotient(parent, full_subgroup(parent), rfull);
    out.group = out.canon.group;
    RatMatrix proj(out.group.dim(), parent.dim());
    for (size_t j = 0; j < parent.dim(); ++j)
        proj.set_col(j, out.canon.lin(unit_vec(parent.dim(), j)));
    out.projection = QZMorphism(parent, out.group, std::move(proj));
    return out;
}

QZQuotient cokernel_qz(const QZMorphism& f) {
    return quotient_qz(f.cod, image_subgroup(f));
}

bool is_isomorphism_qz(const QZMorphism& f) {
    return kernel_qz(f).group.is_trivial() && cokernel_qz(f).group.is_trivial();
}

std::optional<std::vector<Rat>> solve_preimage_qz(const QZMorphism& f,
                                                  const std::vector<Rat>& y) {
    const size_t n = f.dom.dim();
    std::vector<size_t> qi, zi;
    for (size_t j = 0; j < n; ++j)
        (f.dom.q_type(j) ? qi : zi).push_back(j);
    RatMatrix aq = columns(f.mat, qi);
    RatMatrix az = columns(f.mat, zi).hcat(f.cod.lattice_cols());
    std::vector<Rat> xq;
    std::vector<Int> u;
    if (!solve_mixed(aq, az, y, xq, u)) return std::nullopt;
    std::vector<Rat> x(n, Rat(0));
    for (size_t k = 0; k < qi.size(); ++k) x[qi[k]] = xq[k];
    for (size_t k = 0; k < zi.size(); ++k) x[zi[k]] = Rat(u[k]);
    return f.dom.reduce(std::move(x));
}

CanonQZ subquotient_homology(const QZMorphism& d_out, const QZMorphism& d_in) {
    if (!(d_in.cod == d_out.dom))
        throw Error("subquotient_homology: degree mismatch");
    if (!compose(d_out, d_in).is_zero())
        throw Error("subquotient_homology: differential does not square to 0");
    QZSubgroup k = kernel_subgroup(d_out);
    QZSubgroup r =
        add_subgroups(image_subgroup(d_in), lattice_subgroup(d_out.dom));
    if (!subgroup_contains(k, r))
        throw Error("subquotient_homology: boundaries not cycles");
    return canonical_subquotient(d_out.dom, k, r);
}

QZDirectSum direct_sum_qz(const std::vector<QZGroup>& parts) {
    QZDirectSum out;
    size_t a = 0, b = 0, c = 0;
    std::vector<Int> tors;
    for (const auto& p : parts) {
        a += p.nq;
        b += p.nqz;
        c += p.nz;
        for (const Int& d : p.torsion) tors.push_back(d);
    }
    out.group = QZGroup(a, b, c, tors);
    size_t oq = 0, oqz = 0, oz = 0, ot = 0;
    for (const auto& p : parts) {
        std::vector<size_t> where(p.dim());
        for (size_t i = 0; i < p.dim(); ++i) {
            switch (p.kind(i)) {
                case CoordKind::Q: where[i] = oq + i; break;
                case CoordKind::QZ: where[i] = a + oqz + (i - p.nq); break;
                case CoordKind::Z: where[i] = a + b + oz + (i - p.nq - p.nqz);
                    break;
                case CoordKind::Tor:
                    where[i] = a + b + c + ot + (i - p.nq - p.nqz - p.nz);
                    break;
            }
        }
        RatMatrix inj(out.group.dim(), p.dim());
        RatMatrix prj(p.dim(), out.group.dim());
        for (size_t i = 0; i < p.dim(); ++i) {
            inj(where[i], i) = 1;
            prj(i, where[i]) = 1;
        }
        out.inject.emplace_back(p, out.group, std::move(inj));
        out.project.emplace_back(out.group, p, std::move(prj));
        out.coord_of.push_back(std::move(where));
        oq += p.nq;
        oqz += p.nqz;
        oz += p.nz;
        ot += p.torsion.size();
    }
    return out;
}

HomQZ hom_into(const FgAbGroup& a, const QZGroup& w) {
    if (w.nz != 0 || !w.torsion.empty())
        throw Error("hom_into: target must be divisible");
    HomQZ out;
    out.a = a;
    out.w = w;
    // layout [Q slots | Q/Z slots | torsion slots]
    std::vector<Int> tors;
    std::vector<std::pair<size_t, size_t>> slots;
    for (size_t i = 0; i < a.rank; ++i)
        for (size_t j = 0; j < w.nq; ++j) slots.emplace_back(i, j);
    for (size_t i = 0; i < a.rank; ++i)
        for (size_t j = 0; j < w.nqz; ++j) slots.emplace_back(i, w.nq + j);
    for (size_t i = a.rank; i < a.ngens(); ++i)
        for (size_t j = 0; j < w.nqz; ++j) {
            slots.emplace_back(i, w.nq + j);
            tors.push_back(a.gen_order(i));
        }
    out.group = QZGroup(a.rank * w.nq, a.rank * w.nqz, 0, std::move(tors));
    out.slot = std::move(slots);
    return out;
}

std::vector<Rat> HomQZ::eval_raw(const std::vector<Rat>& coords,
                                 const std::vector<Int>& elt) const {
    if (coords.size() != group.dim() || elt.size() != a.ngens())
        throw Error("HomQZ::eval: dim mismatch");
    std::vector<Rat> value(w.dim(), Rat(0));
    for (size_t s = 0; s < slot.size(); ++s) {
        auto [i, j] = slot[s];
        if (coords[s] == 0 || elt[i] == 0) continue;
        Rat v = coords[s];
        // torsion slot coordinate t encodes the value t / order in Q/Z
        if (i >= a.rank) v /= Rat(a.gen_order(i));
        value[j] += v * Rat(elt[i]);
    }
    return value;
}

std::vector<Rat> HomQZ::from_values_raw(
    const std::vector<std::vector<Rat>>& values) const {
    if (values.size() != a.ngens())
        throw Error("HomQZ::from_values: generator count mismatch");
    std::vector<Rat> coords(group.dim(), Rat(0));
    // check the required vanishing on the unused target coordinates
    for (size_t i = a.rank; i < a.ngens(); ++i) {
        Int d = a.gen_order(i);
        for (size_t j = 0; j < w.nq; ++j)
            if (values[i][j] != 0)
                throw NotWellDefined("HomQZ: torsion generator hits Q");
        for (size_t j = 0; j < w.nqz; ++j)
            if (!is_integer(values[i][w.nq + j] * Rat(d)))
                throw NotWellDefined("HomQZ: generator order not killed");
    }
    for (size_t s = 0; s < slot.size(); ++s) {
        auto [i, j] = slot[s];
        Rat v = values[i][j];
        if (i >= a.rank) v *= Rat(a.gen_order(i));
        coords[s] = v;
    }
    return coords;
}

QZMorphism hom_induced_qz(const FgMorphism& u, const HomQZ& hom_dom,
                          const HomQZ& hom_cod) {
    if (!(u.dom == hom_cod.a) || !(u.cod == hom_dom.a) ||
        !(hom_dom.w == hom_cod.w))
        throw Error("hom_induced_qz: shape mismatch");
    RatMatrix m(hom_cod.group.dim(), hom_dom.group.dim());
    for (size_t s = 0; s < hom_dom.group.dim(); ++s) {
        std::vector<Rat> phi(hom_dom.group.dim(), Rat(0));
        phi[s] = 1;
        std::vector<std::vector<Rat>> vals(hom_cod.a.ngens());
        for (size_t g = 0; g < hom_cod.a.ngens(); ++g)
            vals[g] = hom_dom.eval_raw(phi, u.mat.col(g));
        m.set_col(s, hom_cod.from_values_raw(vals));
    }
    return QZMorphism(hom_dom.group, hom_cod.group, std::move(m));
}

QZMorphism hom_postcompose_qz(const QZMorphism& v, const HomQZ& hom_dom,
                              const HomQZ& hom_cod) {
    if (!(hom_dom.a == hom_cod.a) || !(v.dom == hom_dom.w) ||
        !(v.cod == hom_cod.w))
        throw Error("hom_postcompose_qz: shape mismatch");
    RatMatrix m(hom_cod.group.dim(), hom_dom.group.dim());
    std::vector<Int> e(hom_dom.a.ngens(), Int(0));
    for (size_t s = 0; s < hom_dom.group.dim(); ++s) {
        std::vector<Rat> phi(hom_dom.group.dim(), Rat(0));
        phi[s] = 1;
        std::vector<std::vector<Rat>> vals(hom_dom.a.ngens());
        for (size_t g = 0; g < hom_dom.a.ngens(); ++g) {
            std::vector<Int> eg = e;
            eg[g] = 1;
            vals[g] = v.apply_raw(hom_dom.eval_raw(phi, eg));
        }
        m.set_col(s, hom_cod.from_values_raw(vals));
    }
    return QZMorphism(hom_dom.group, hom_cod.group, std::move(m));
}

}  // namespace wb

namespace wb {

std::vector<std::vector<Rat>> extend_to_divisible(
    const FgMorphism& u, const QZGroup& w,
    const std::vector<std::vector<Rat>>& values) {
    if (w.nz != 0 || !w.torsion.empty())
        throw NotDivisibleTarget(
            "extend_to_divisible: target must be a direct sum of Q and Q/Z "
            "summands");
    const FgAbGroup& a = u.dom;
    const FgAbGroup& c = u.cod;
    if (values.size() != a.ngens())
        throw Error("extend_to_divisible: expected one value per generator "
                    "of the subgroup");
    const size_t m = w.dim();
    const size_t nc = c.ngens();

    // Unknowns: psi(c_j) coordinate-by-coordinate (rational), plus one
    // integer slack per congruence (equality modulo 1 on a Q/Z coordinate).
    // Equations:
    //   (1) sum_j u[j][k] psi[j] == values[k]      (mod 1 on Q/Z coords),
    //   (2) order(c_j) psi[j]   == 0               (mod 1 on Q/Z coords),
    // the second family making psi well-defined on torsion generators.
    std::vector<std::vector<Rat>> eqs;
    std::vector<Rat> rhs;
    std::vector<bool> congruence;
    for (size_t k = 0; k < a.ngens(); ++k) {
        if (values[k].size() != m)
            throw Error("extend_to_divisible: value has wrong dimension");
        for (size_t cdx = 0; cdx < m; ++cdx) {
            std::vector<Rat> row(nc * m);
            for (size_t j = 0; j < nc; ++j)
                row[j * m + cdx] = Rat(u.mat(j, k));
            eqs.push_back(std::move(row));
            rhs.push_back(values[k][cdx]);
            congruence.push_back(w.kind(cdx) == CoordKind::QZ);
        }
    }
    for (size_t j = 0; j < nc; ++j) {
        Int e = c.gen_order(j);
        if (e == 0) continue;
        for (size_t cdx = 0; cdx < m; ++cdx) {
            std::vector<Rat> row(nc * m);
            row[j * m + cdx] = Rat(e);
            eqs.push_back(std::move(row));
            rhs.push_back(Rat(0));
            congruence.push_back(w.kind(cdx) == CoordKind::QZ);
        }
    }

    size_t nslack = 0;
    for (bool b : congruence)
        if (b) ++nslack;
    RatMatrix aq(eqs.size(), nc * m), az(eqs.size(), nslack);
    size_t sl = 0;
    for (size_t r = 0; r < eqs.size(); ++r) {
        for (size_t col = 0; col < nc * m; ++col) aq(r, col) = eqs[r][col];
        if (congruence[r]) az(r, sl++) = 1;
    }
    std::vector<Rat> x;
    std::vector<Int> slacks;
    if (!solve_mixed(aq, az, rhs, x, slacks))
        throw LiftFailure("extend_to_divisible: no extension exists");
    std::vector<std::vector<Rat>> out(nc, std::vector<Rat>(m));
    for (size_t j = 0; j < nc; ++j)
        for (size_t cdx = 0; cdx < m; ++cdx) out[j][cdx] = x[j * m + cdx];
    return out;
}

}  // namespace wb
