#pragma once

namespace semiclass {

enum class LevelKind { smooth, discontinuous, halfline_dirichlet, halfline_robin };

const char* to_string(LevelKind kind);

struct SemiclassicalLevel {
    int n = 0;
    double hbar = 0.0;
    double lambda = 0.0;
    /// |Phi(lambda) - pi (n + 1/2) hbar| for smooth levels; |F(lambda)| for discontinuous ones;
    /// the half-line analogue otherwise.
    double residual = 0.0;
    LevelKind kind = LevelKind::smooth;
    /// u- = a u+; (-1)^n except for discontinuous levels.
    double amplitude_a = 1.0;
    double robin_b = 0.0; ///< recorded for halfline_robin, unused at leading order
};

} // namespace semiclass
