#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace topobias {

// Mean and sum of squared deviations via the corrected two-pass algorithm
// (Chan/Golub/LeVeque). A constant input yields ssd == 0 and mean equal to
// the constant exactly, which downstream code relies on to recognise
// degenerate populations.
struct MomentSums {
    double mean = 0.0;
    double ssd = 0.0;  // sum of squared deviations from the mean
    std::size_t n = 0;
    bool constant = false;

    double sample_variance() const { return (n > 1) ? ssd / static_cast<double>(n - 1) : 0.0; }
    double population_variance() const { return (n > 0) ? ssd / static_cast<double>(n) : 0.0; }
    double sample_std() const { return std::sqrt(sample_variance()); }
};

inline MomentSums moment_sums(std::span<const double> values) {
    MomentSums m;
    m.n = values.size();
    if (m.n == 0) return m;

    m.constant = true;
    double sum = 0.0;
    for (double v : values) {
        sum += v;
        if (v != values[0]) m.constant = false;
    }
    if (m.constant) {
        m.mean = values[0];
        m.ssd = 0.0;
        return m;
    }

    m.mean = sum / static_cast<double>(m.n);
    double ssd = 0.0, comp = 0.0;
    for (double v : values) {
        const double d = v - m.mean;
        ssd += d * d;
        comp += d;
    }
    // the comp^2/n term cancels the residual error of an inexact mean
    m.ssd = ssd - comp * comp / static_cast<double>(m.n);
    if (m.ssd < 0.0) m.ssd = 0.0;
    return m;
}

}  // namespace topobias
