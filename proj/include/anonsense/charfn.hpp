#pragma once

#include <complex>
#include <span>
#include <vector>

#include "anonsense/fields.hpp"

namespace anonsense {

// B(t) = (1/L) sum_l exp(i omega_l t).
struct CharValue {
    double t = 0.0;
    double re = 1.0;
    double im = 0.0;

    std::complex<double> value() const noexcept { return {re, im}; }
    double abs2() const noexcept { return re * re + im * im; }
};

CharValue char_fn(const FieldConfig& cfg, double t);

// Elementwise equal (bitwise) to char_fn at each time. One pass over the
// sites; sites are split across workers by fixed blocks and reduced in block
// order, so the result is independent of the worker count.
std::vector<CharValue> char_fn_grid(const FieldConfig& cfg, std::span<const double> times,
                                    unsigned workers = 0);

}  // namespace anonsense
