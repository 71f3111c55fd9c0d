#pragma once

#include <cstddef>

namespace embexp::detail {

// Dot product with a fixed 8-lane accumulation order: vectorizable without
// -ffast-math and bit-stable across runs.
inline float dot_f32(const float* a, const float* b, int d) {
    float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    int i = 0;
    for (; i + 8 <= d; i += 8)
        for (int j = 0; j < 8; ++j) acc[j] += a[i + j] * b[i + j];
    float total = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    for (; i < d; ++i) total += a[i] * b[i];
    return total;
}

// y += s * x
inline void axpy_f32(float* y, float s, const float* x, int d) {
    for (int i = 0; i < d; ++i) y[i] += s * x[i];
}

// y += x
inline void add_f32(float* y, const float* x, int d) {
    for (int i = 0; i < d; ++i) y[i] += x[i];
}

}  // namespace embexp::detail
