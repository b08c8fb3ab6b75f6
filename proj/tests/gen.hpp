#pragma once

// Randomized generators shared by the test binaries: groups, morphisms that
// are well-defined by construction, and valid cochain complexes built so that
// consecutive differentials compose to zero.

#include <random>

#include "wb/complexes.hpp"

namespace wbtest {

using namespace wb;
using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Int gcd_int(Int a, Int b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Invariant factors drawn from {2,3,4,6,8,12}, kept a divisibility chain.
inline FgAbGroup random_group(Rng& rng, int max_rank = 2, int max_tors = 2) {
    static const int factors[] = {2, 3, 4, 6, 8, 12};
    size_t r = static_cast<size_t>(pick(rng, 0, max_rank));
    int t = pick(rng, 0, max_tors);
    std::vector<Int> tors;
    for (int i = 0; i < t; ++i) {
        std::vector<int> cands;
        for (int f : factors) {
            if (tors.empty() || Int(f) % tors.back() == 0) cands.push_back(f);
        }
        if (cands.empty()) break;
        tors.push_back(Int(cands[static_cast<size_t>(
            pick(rng, 0, static_cast<int>(cands.size()) - 1))]));
    }
    return FgAbGroup(r, std::move(tors));
}

// A random element of b killed by multiplication by d (d = 0: no constraint).
inline std::vector<Int> random_element_killed_by(Rng& rng, const FgAbGroup& b,
                                                 const Int& d, int amp = 4) {
    std::vector<Int> x(b.ngens());
    for (size_t j = 0; j < b.ngens(); ++j) {
        Int e = b.gen_order(j);
        if (d == 0) {
            x[j] = Int(pick(rng, -amp, amp));
        } else if (e == 0) {
            x[j] = 0;
        } else {
            Int step = e / gcd_int(d, e);
            Int slots = e / step;
            x[j] = step * Int(pick(rng, 0, static_cast<int>(slots) - 1));
        }
    }
    return x;
}

inline FgMorphism random_morphism(Rng& rng, const FgAbGroup& a,
                                  const FgAbGroup& b, int amp = 4) {
    IntMatrix m(b.ngens(), a.ngens());
    for (size_t k = 0; k < a.ngens(); ++k)
        m.set_col(k, random_element_killed_by(rng, b, a.gen_order(k), amp));
    return FgMorphism(a, b, std::move(m));
}

// Valid complex: each differential is pushed through the cokernel of the
// previous one, so d . d = 0 holds by construction.
inline CochainComplex random_complex(Rng& rng, int lo = 0, int max_len = 4,
                                     int max_rank = 2, int max_tors = 2,
                                     bool free_only = false) {
    int len = pick(rng, 1, max_len);
    std::vector<FgAbGroup> gs;
    for (int i = 0; i < len; ++i)
        gs.push_back(free_only
                         ? FgAbGroup::free(
                               static_cast<size_t>(pick(rng, 0, max_rank + 1)))
                         : random_group(rng, max_rank, max_tors));
    std::vector<FgMorphism> ds;
    for (int k = 0; k + 1 < len; ++k) {
        if (k == 0) {
            ds.push_back(random_morphism(rng, gs[0], gs[1]));
        } else {
            FgCokernelResult q = cokernel_fg(ds.back());
            FgMorphism g = random_morphism(rng, q.group,
                                           gs[static_cast<size_t>(k + 1)]);
            ds.push_back(compose(g, q.map));
        }
    }
    return make_complex(lo, std::move(gs), std::move(ds));
}

// The circle as a hollow triangle: C^0 = Z^3 (vertices), C^1 = Z^3 (edges
// 01, 02, 12), coboundary with signs by position.
inline CochainComplex circle_complex() {
    IntMatrix d(3, 3);
    d(0, 0) = -1; d(0, 1) = 1;
    d(1, 0) = -1; d(1, 2) = 1;
    d(2, 1) = -1; d(2, 2) = 1;
    return make_complex(0, {FgAbGroup::free(3), FgAbGroup::free(3)},
                        {FgMorphism(FgAbGroup::free(3), FgAbGroup::free(3),
                                    std::move(d))});
}

// Minimal circle model: one 0-cell, one 1-cell, zero differential.
inline CochainComplex small_circle_complex() {
    return make_complex(0, {FgAbGroup::free(1), FgAbGroup::free(1)},
                        {FgMorphism::zero(FgAbGroup::free(1),
                                          FgAbGroup::free(1))});
}

}  // namespace wbtest
