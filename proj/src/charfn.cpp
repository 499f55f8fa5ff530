#include "anonsense/charfn.hpp"

#include <cmath>
#include <stdexcept>

#include "anonsense/parallel.hpp"
#include "anonsense/summation.hpp"

namespace anonsense {

namespace {

constexpr std::size_t kBlock = 8192;
constexpr std::size_t kChunk = 64;

struct BlockPartial {
    double re = 0.0;
    double im = 0.0;
};

// Plain sums over 64-site chunks, Neumaier across chunks.
BlockPartial sum_block(std::span<const double> omegas, double t) noexcept {
    NeumaierSum re_acc;
    NeumaierSum im_acc;
    for (std::size_t c = 0; c < omegas.size(); c += kChunk) {
        const std::size_t end = std::min(omegas.size(), c + kChunk);
        double re = 0.0;
        double im = 0.0;
        for (std::size_t l = c; l < end; ++l) {
            const double phase = omegas[l] * t;
            re += std::cos(phase);
            im += std::sin(phase);
        }
        re_acc.add(re);
        im_acc.add(im);
    }
    return {re_acc.value(), im_acc.value()};
}

}  // namespace

CharValue char_fn(const FieldConfig& cfg, double t) {
    const double times[1] = {t};
    return char_fn_grid(cfg, times, 1).front();
}

std::vector<CharValue> char_fn_grid(const FieldConfig& cfg, std::span<const double> times,
                                    unsigned workers) {
    for (double t : times) {
        if (!std::isfinite(t)) throw std::invalid_argument("char_fn_grid: times must be finite");
    }
    const auto omegas = cfg.omegas();
    const std::size_t L = omegas.size();
    const std::size_t blocks = (L + kBlock - 1) / kBlock;
    const std::size_t nt = times.size();

    // partials[b * nt + i] is block b's contribution at times[i].
    std::vector<BlockPartial> partials(blocks * nt);
    parallel_for(
        blocks,
        [&](std::size_t b) {
            const auto block = omegas.subspan(b * kBlock, std::min(kBlock, L - b * kBlock));
            for (std::size_t i = 0; i < nt; ++i) partials[b * nt + i] = sum_block(block, times[i]);
        },
        workers);

    std::vector<CharValue> out(nt);
    const double count = static_cast<double>(L);
    for (std::size_t i = 0; i < nt; ++i) {
        NeumaierSum re_acc;
        NeumaierSum im_acc;
        for (std::size_t b = 0; b < blocks; ++b) {
            re_acc.add(partials[b * nt + i].re);
            im_acc.add(partials[b * nt + i].im);
        }
        out[i] = CharValue{times[i], re_acc.value() / count, im_acc.value() / count};
    }
    return out;
}

}  // namespace anonsense
