// scalar_search.hpp
// One-dimensional search helpers shared by the bound solver and the optimizer.

#pragma once

#include <cmath>
#include <utility>

namespace phasekey::search {

struct Extremum {
    double x;
    double value;
};

/// Golden-section maximization of a unimodal f on [lo, hi].
/// The endpoints are compared too, so a maximum on the boundary is not lost.
template <class F>
Extremum golden_maximize(F&& f, double lo, double hi, int iterations = 80) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int i = 0; i < iterations && b - a > 0.0; ++i) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    Extremum best{c, fc};
    if (fd > best.value) best = {d, fd};
    for (double x : {lo, hi}) {
        const double fx = f(x);
        if (fx > best.value) best = {x, fx};
    }
    return best;
}

/// Given pred(inside) == true and pred(outside) == false, narrows the
/// transition and returns the last point known to satisfy pred.
template <class Pred>
double bisect_boundary(Pred&& pred, double inside, double outside, int iterations = 100) {
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (inside + outside);
        if (mid == inside || mid == outside) break;
        if (pred(mid)) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    return inside;
}

}  // namespace phasekey::search
