#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "wb/fgab.hpp"

using namespace wb;

namespace {

std::mt19937 rng(20260826);

IntMatrix random_matrix(size_t r, size_t c, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    IntMatrix m(r, c);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

// Determinantal divisors: gcd of all k x k minors.  Independent of the
// elimination code; valid for small sizes only.
Int det(const IntMatrix& m) {
    size_t n = m.rows();
    if (n == 1) return m(0, 0);
    Int acc = 0;
    for (size_t i = 0; i < n; ++i) {
        IntMatrix sub(n - 1, n - 1);
        for (size_t r = 1; r < n; ++r) {
            size_t cc = 0;
            for (size_t c = 0; c < n; ++c) {
                if (c == i) continue;
                sub(r - 1, cc++) = m(r, c);
            }
        }
        Int term = m(0, i) * det(sub);
        acc += (i % 2 == 0) ? term : -term;
    }
    return acc;
}

std::vector<Int> determinantal_invariants(const IntMatrix& m) {
    size_t n = std::min(m.rows(), m.cols());
    std::vector<Int> g(n + 1, Int(0));
    g[0] = 1;
    for (size_t k = 1; k <= n; ++k) {
        std::vector<size_t> ridx(k), cidx(k);
        // enumerate k-subsets of rows and columns
        std::function<void(size_t, size_t)> rows_loop, cols_loop;
        Int acc = 0;
        cols_loop = [&](size_t pos, size_t start) {
            if (pos == k) {
                IntMatrix sub(k, k);
                for (size_t i = 0; i < k; ++i)
                    for (size_t j = 0; j < k; ++j) sub(i, j) = m(ridx[i], cidx[j]);
                acc = boost::multiprecision::gcd(acc, det(sub));
                return;
            }
            for (size_t c = start; c < m.cols(); ++c) {
                cidx[pos] = c;
                cols_loop(pos + 1, c + 1);
            }
        };
        rows_loop = [&](size_t pos, size_t start) {
            if (pos == k) {
                cols_loop(0, 0);
                return;
            }
            for (size_t r = start; r < m.rows(); ++r) {
                ridx[pos] = r;
                rows_loop(pos + 1, r + 1);
            }
        };
        rows_loop(0, 0);
        g[k] = boost::multiprecision::abs(acc);
    }
    std::vector<Int> inv;
    for (size_t k = 1; k <= n; ++k) {
        if (g[k] == 0) break;
        inv.push_back(g[k] / g[k - 1]);
    }
    return inv;
}

bool is_unimodular_pair(const IntMatrix& m, const IntMatrix& minv) {
    return m * minv == IntMatrix::identity(m.rows());
}

}  // namespace

TEST_CASE("smith normal form on a fixed matrix") {
    IntMatrix a(2, 2, {Int(2), Int(4), Int(6), Int(8)});
    SmithForm s = smith_normal_form(a);
    CHECK(s.rank == 2);
    CHECK(s.d(0, 0) == 2);
    CHECK(s.d(1, 1) == 4);
    CHECK(s.u * a * s.v == s.d);
}

TEST_CASE("smith normal form properties on random matrices") {
    for (int trial = 0; trial < 200; ++trial) {
        size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
        IntMatrix a = random_matrix(r, c, -9, 9);
        SmithForm s = smith_normal_form(a);
        CHECK(s.u * a * s.v == s.d);
        CHECK(is_unimodular_pair(s.u, s.uinv));
        CHECK(is_unimodular_pair(s.v, s.vinv));
        for (size_t i = 0; i < std::min(r, c); ++i) {
            CHECK(s.d(i, i) >= 0);
            if (i + 1 < std::min(r, c) && s.d(i + 1, i + 1) != 0)
                CHECK(s.d(i + 1, i + 1) % s.d(i, i) == 0);
            for (size_t j = 0; j < std::min(r, c); ++j)
                if (i != j) CHECK(s.d(i, j) == 0);
        }
        // off-diagonal region fully zero
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < c; ++j)
                if (i != j) CHECK(s.d(i, j) == 0);
        // invariant factors match the determinantal-divisor oracle
        std::vector<Int> oracle = determinantal_invariants(a);
        CHECK(oracle.size() == s.rank);
        for (size_t i = 0; i < s.rank; ++i) CHECK(oracle[i] == s.d(i, i));
    }
}

TEST_CASE("integer solve and nullspace") {
    for (int trial = 0; trial < 100; ++trial) {
        size_t r = 1 + rng() % 3, c = 1 + rng() % 4;
        IntMatrix a = random_matrix(r, c, -5, 5);
        std::vector<Int> x0(c);
        for (auto& v : x0) v = int(rng() % 7) - 3;
        std::vector<Int> b = a.apply(x0);
        std::vector<Int> sol;
        REQUIRE(integer_solve(a, b, sol));
        CHECK(a.apply(sol) == b);
        IntMatrix ns = integer_nullspace(a);
        for (size_t k = 0; k < ns.cols(); ++k) {
            std::vector<Int> z = a.apply(ns.col(k));
            for (const Int& v : z) CHECK(v == 0);
        }
        CHECK(ns.cols() == c - rational_rank(to_rational(a)));
    }
    // an unsolvable system
    IntMatrix a(1, 1, {Int(2)});
    std::vector<Int> sol;
    CHECK(!integer_solve(a, {Int(3)}, sol));
}

TEST_CASE("lattice column basis spans the same lattice") {
    for (int trial = 0; trial < 50; ++trial) {
        size_t r = 1 + rng() % 3, c = 1 + rng() % 4;
        IntMatrix a = random_matrix(r, c, -6, 6);
        IntMatrix b = lattice_column_basis(a);
        // every column of a is an integer combination of b, and vice versa
        std::vector<Int> sol;
        for (size_t j = 0; j < a.cols(); ++j)
            CHECK(integer_solve(b, a.col(j), sol));
        for (size_t j = 0; j < b.cols(); ++j)
            CHECK(integer_solve(a, b.col(j), sol));
        CHECK(rational_rank(to_rational(b)) == b.cols());
    }
}

TEST_CASE("z_subquotient canonical forms") {
    // Z^2 / <2e1, 3e2> = Z/6
    IntMatrix rel(2, 2, {Int(2), Int(0), Int(0), Int(3)});
    ZSubquotient q = z_subquotient(2, IntMatrix::identity(2), rel);
    CHECK(q.group == FgAbGroup::cyclic(6));
    // the canonical generator really has order 6 in the quotient
    std::vector<Int> g = q.reps.col(0);
    for (int k = 1; k < 6; ++k) {
        std::vector<Int> kg{g[0] * k, g[1] * k};
        std::vector<Int> sol;
        CHECK(!integer_solve(rel, kg, sol));
    }
    std::vector<Int> six{g[0] * 6, g[1] * 6};
    std::vector<Int> sol;
    CHECK(integer_solve(rel, six, sol));

    // 2Z / 6Z = Z/3
    IntMatrix sub(1, 1, {Int(2)}), rel2(1, 1, {Int(6)});
    CHECK(z_subquotient(1, sub, rel2).group == FgAbGroup::cyclic(3));
}

TEST_CASE("express is additive and respects relations") {
    for (int trial = 0; trial < 50; ++trial) {
        size_t amb = 2 + rng() % 3;
        IntMatrix sub = random_matrix(amb, amb, -4, 4);
        IntMatrix relcoef = random_matrix(sub.cols(), 2, -3, 3);
        IntMatrix rel = sub * relcoef;  // guaranteed inside the subgroup
        ZSubquotient q = z_subquotient(amb, sub, rel);
        std::vector<Int> c1(sub.cols()), c2(sub.cols());
        for (auto& v : c1) v = int(rng() % 9) - 4;
        for (auto& v : c2) v = int(rng() % 9) - 4;
        std::vector<Int> x = sub.apply(c1), y = sub.apply(c2), xy(amb);
        for (size_t i = 0; i < amb; ++i) xy[i] = x[i] + y[i];
        std::vector<Int> ex = q.express(x), ey = q.express(y);
        std::vector<Int> sum(ex.size());
        for (size_t i = 0; i < ex.size(); ++i) sum[i] = ex[i] + ey[i];
        CHECK(q.express(xy) == q.group.reduce(sum));
        // relations express to zero
        for (size_t j = 0; j < rel.cols(); ++j) {
            std::vector<Int> z = q.express(rel.col(j));
            for (const Int& v : z) CHECK(v == 0);
        }
        // canonical generators express to unit vectors
        for (size_t k = 0; k < q.group.ngens(); ++k) {
            std::vector<Int> e = q.express(q.reps.col(k));
            for (size_t i = 0; i < e.size(); ++i)
                CHECK(e[i] == (i == k ? 1 : 0));
        }
    }
}

TEST_CASE("kernel, image, cokernel of morphisms") {
    // Z --2--> Z
    FgAbGroup z = FgAbGroup::free(1);
    FgMorphism two(z, z, IntMatrix(1, 1, {Int(2)}));
    CHECK(kernel_fg(two).group.is_trivial());
    CHECK(image_fg(two).group == z);
    CHECK(cokernel_fg(two).group == FgAbGroup::cyclic(2));

    // Z/4 --x2--> Z/8: injective, image {0,2,4,6}, cokernel Z/2
    FgMorphism m(FgAbGroup::cyclic(4), FgAbGroup::cyclic(8),
                 IntMatrix(1, 1, {Int(2)}));
    CHECK(kernel_fg(m).group.is_trivial());
    CHECK(image_fg(m).group == FgAbGroup::cyclic(4));
    CHECK(cokernel_fg(m).group == FgAbGroup::cyclic(2));

    // kernel inclusion composed with f is zero; image inclusion lands right
    for (int trial = 0; trial < 60; ++trial) {
        FgAbGroup a(rng() % 2, rng() % 2 ? std::vector<Int>{Int(4)}
                                         : std::vector<Int>{});
        FgAbGroup b(rng() % 2, rng() % 2 ? std::vector<Int>{Int(6)}
                                         : std::vector<Int>{});
        if (a.is_trivial() || b.is_trivial()) continue;
        // build a random well-defined morphism by scaling columns suitably
        IntMatrix mm(b.ngens(), a.ngens());
        bool ok = true;
        for (size_t j = 0; j < a.ngens(); ++j) {
            for (size_t i = 0; i < b.ngens(); ++i) {
                Int da = a.gen_order(j), db = b.gen_order(i);
                Int v = int(rng() % 7) - 3;
                if (da != 0) {
                    if (db == 0)
                        v = 0;
                    else
                        v *= db / boost::multiprecision::gcd(da, db);
                }
                mm(i, j) = v;
            }
        }
        if (!ok) continue;
        FgMorphism f(a, b, mm);
        auto ker = kernel_fg(f);
        CHECK(compose(f, ker.map).is_zero());
        auto img = image_fg(f);
        auto cok = cokernel_fg(f);
        CHECK(compose(cok.map, f).is_zero());
        // rank-nullity style consistency on free ranks
        CHECK(ker.group.rank + img.group.rank == a.rank);
        CHECK(img.group.rank + cok.group.rank == b.rank);
        // first isomorphism theorem on orders when everything is finite
        auto oa = a.order();
        if (oa) {
            auto ok_ = ker.group.order();
            auto oi = img.group.order();
            REQUIRE(ok_);
            REQUIRE(oi);
            CHECK(*oa == *ok_ * *oi);
        }
    }
}

TEST_CASE("solve_preimage_fg") {
    FgMorphism m(FgAbGroup::cyclic(4), FgAbGroup::cyclic(8),
                 IntMatrix(1, 1, {Int(2)}));
    auto pre = solve_preimage_fg(m, {Int(6)});
    REQUIRE(pre);
    CHECK(m.apply(*pre) == std::vector<Int>{Int(6)});
    CHECK(!solve_preimage_fg(m, {Int(1)}));
}

TEST_CASE("direct sum recombines cyclic factors") {
    FgDirectSum s = direct_sum_fg({FgAbGroup::cyclic(2), FgAbGroup::cyclic(3)});
    CHECK(s.group == FgAbGroup::cyclic(6));
    for (size_t i = 0; i < 2; ++i)
        CHECK(compose(s.project[i], s.inject[i])
                  .equals(FgMorphism::identity(i == 0 ? FgAbGroup::cyclic(2)
                                                      : FgAbGroup::cyclic(3))));
    CHECK(compose(s.project[0], s.inject[1]).is_zero());

    FgDirectSum t = direct_sum_fg(
        {FgAbGroup(1, {Int(4)}), FgAbGroup(0, {Int(2), Int(6)})});
    CHECK(t.group == FgAbGroup(1, {Int(2), Int(2), Int(12)}));
}

namespace {

// Brute-force |Hom(A,B)| for finite A, B: count matrices (mod orders) that
// give well-defined morphisms.
Int count_homs(const FgAbGroup& a, const FgAbGroup& b) {
    // number of homs Z/da -> B is number of elements killed by da
    Int total = 1;
    for (const Int& da : a.torsion) {
        Int killed = 0;
        // count elements of B with order dividing da by direct enumeration
        std::vector<Int> idx(b.torsion.size(), Int(0));
        std::function<void(size_t)> walk = [&](size_t pos) {
            if (pos == b.torsion.size()) {
                for (size_t i = 0; i < idx.size(); ++i) {
                    Int v = idx[i] * da % b.torsion[i];
                    if (v != 0) return;
                }
                ++killed;
                return;
            }
            for (Int v = 0; v < b.torsion[pos]; ++v) {
                idx[pos] = v;
                walk(pos + 1);
            }
        };
        walk(0);
        total *= killed;
    }
    return total;
}

}  // namespace

TEST_CASE("hom group structure") {
    CHECK(hom_group(FgAbGroup::cyclic(4), FgAbGroup::cyclic(6)).group ==
          FgAbGroup::cyclic(2));
    CHECK(hom_group(FgAbGroup::free(2), FgAbGroup(1, {Int(3)})).group ==
          FgAbGroup(2, {Int(3), Int(3)}));
    // brute-force order check over a small pool of finite groups
    std::vector<FgAbGroup> pool = {FgAbGroup::cyclic(2), FgAbGroup::cyclic(4),
                                   FgAbGroup::cyclic(6),
                                   FgAbGroup(0, {Int(2), Int(4)}),
                                   FgAbGroup(0, {Int(3), Int(9)})};
    for (const auto& a : pool)
        for (const auto& b : pool) {
            HomFgGroup h = hom_group(a, b);
            auto ord = h.group.order();
            REQUIRE(ord);
            CHECK(*ord == count_homs(a, b));
        }
}

TEST_CASE("hom generators round-trip") {
    std::vector<FgAbGroup> pool = {FgAbGroup(1, {Int(4)}),
                                   FgAbGroup(0, {Int(2), Int(6)}),
                                   FgAbGroup(2, {}), FgAbGroup::cyclic(9)};
    for (const auto& a : pool)
        for (const auto& b : pool) {
            HomFgGroup h = hom_group(a, b);
            for (int trial = 0; trial < 10; ++trial) {
                std::vector<Int> c(h.group.ngens());
                for (auto& v : c) v = int(rng() % 11) - 5;
                c = h.group.reduce(std::move(c));
                FgMorphism f = h.to_morphism(c);
                CHECK(h.coords_of(f) == c);
            }
            // generator k has the right order as a morphism
            for (size_t k = 0; k < h.gens.size(); ++k) {
                Int d = h.group.gen_order(k);
                if (d == 0) continue;
                IntMatrix scaled = h.gens[k].mat;
                for (size_t r = 0; r < scaled.rows(); ++r)
                    for (size_t cc = 0; cc < scaled.cols(); ++cc)
                        scaled(r, cc) *= d;
                CHECK(FgMorphism(a, b, scaled).is_zero());
            }
        }
}

TEST_CASE("ext groups") {
    CHECK(ext_group(FgAbGroup::cyclic(4), FgAbGroup::free(1)) ==
          FgAbGroup::cyclic(4));
    CHECK(ext_group(FgAbGroup::free(3), FgAbGroup(0, {Int(2)})).is_trivial());
    CHECK(ext_group(FgAbGroup::cyclic(4), FgAbGroup::cyclic(6)) ==
          FgAbGroup::cyclic(2));
    CHECK(ext_group(FgAbGroup(1, {Int(2), Int(4)}), FgAbGroup(1, {Int(8)})) ==
          FgAbGroup(0, {Int(2), Int(2), Int(4), Int(4)}));
}

TEST_CASE("morphism well-definedness is enforced") {
    CHECK_THROWS_AS(FgMorphism(FgAbGroup::cyclic(2), FgAbGroup::free(1),
                               IntMatrix(1, 1, {Int(1)})),
                    NotWellDefined);
    CHECK_THROWS_AS(FgMorphism(FgAbGroup::cyclic(4), FgAbGroup::cyclic(8),
                               IntMatrix(1, 1, {Int(1)})),
                    NotWellDefined);
}

TEST_CASE("is_isomorphism_fg") {
    FgAbGroup g(1, {Int(4)});
    CHECK(is_isomorphism_fg(FgMorphism::identity(g)));
    IntMatrix m = IntMatrix::identity(2);
    m(0, 1) = 7;  // shear is invertible
    CHECK(is_isomorphism_fg(FgMorphism(FgAbGroup::free(2), FgAbGroup::free(2), m)));
    CHECK(!is_isomorphism_fg(FgMorphism(FgAbGroup::free(1), FgAbGroup::free(1),
                                        IntMatrix(1, 1, {Int(2)}))));
}
