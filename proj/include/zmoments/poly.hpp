#pragma once

#include <vector>

#include "common.hpp"

namespace zmoments {

// Real polynomial, coefficients in increasing degree.
struct Polynomial {
    std::vector<real> c;

    Polynomial() = default;
    Polynomial(std::initializer_list<real> coeffs) : c(coeffs) {}
    explicit Polynomial(std::vector<real> coeffs) : c(std::move(coeffs)) {}

    int degree() const {
        for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
            if (c[i] != 0) return i;
        return -1;
    }
    real leading() const { return degree() < 0 ? 0 : c[degree()]; }
    bool monic() const { return leading() == 1; }

    real operator()(real x) const {
        real s = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
        return s;
    }

    // sup |P| on [a, b]: endpoints plus a fine grid; exact enough for low degree
    real sup_abs(real a, real b, int grid = 2048) const {
        real m = 0;
        for (int i = 0; i <= grid; ++i) m = std::max(m, std::fabs((*this)(a + (b - a) * i / grid)));
        return m;
    }
};

}  // namespace zmoments
