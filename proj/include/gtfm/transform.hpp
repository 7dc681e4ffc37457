#pragma once

#include <cmath>
#include <stdexcept>

namespace gtfm {

/// Bijections from the unconstrained sampling space z onto each parameter
/// support, with the change-of-variables bookkeeping the joint density needs.
enum class Transform {
    identity,   // v = z
    log_pos,    // v = exp(z) > 0
    log_neg,    // v = -exp(z) < 0
    logit01,    // v = sigmoid(z) in (0,1)
    logit_neg,  // v = -sigmoid(z) in (-1,0), the wave-decay resilience
};

namespace tf {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double constrain(Transform t, double z) {
    switch (t) {
        case Transform::identity: return z;
        case Transform::log_pos: return std::exp(z);
        case Transform::log_neg: return -std::exp(z);
        case Transform::logit01: return sigmoid(z);
        case Transform::logit_neg: return -sigmoid(z);
    }
    throw std::logic_error("constrain: bad transform");
}

inline double unconstrain(Transform t, double v) {
    switch (t) {
        case Transform::identity:
            return v;
        case Transform::log_pos:
            if (v <= 0.0) throw std::invalid_argument("unconstrain: need v > 0");
            return std::log(v);
        case Transform::log_neg:
            if (v >= 0.0) throw std::invalid_argument("unconstrain: need v < 0");
            return std::log(-v);
        case Transform::logit01:
            if (v <= 0.0 || v >= 1.0) throw std::invalid_argument("unconstrain: need v in (0,1)");
            return std::log(v / (1.0 - v));
        case Transform::logit_neg:
            if (v <= -1.0 || v >= 0.0)
                throw std::invalid_argument("unconstrain: need v in (-1,0)");
            return std::log(-v / (1.0 + v));
    }
    throw std::logic_error("unconstrain: bad transform");
}

inline double dv_dz(Transform t, double v) {
    switch (t) {
        case Transform::identity: return 1.0;
        case Transform::log_pos: return v;        // e^z
        case Transform::log_neg: return v;        // -e^z
        case Transform::logit01: return v * (1.0 - v);
        case Transform::logit_neg: return v * (1.0 + v);  // -s(1-s)
    }
    throw std::logic_error("dv_dz: bad transform");
}

inline double log_jacobian(Transform t, double v) {
    switch (t) {
        case Transform::identity: return 0.0;
        case Transform::log_pos: return std::log(v);
        case Transform::log_neg: return std::log(-v);
        case Transform::logit01: return std::log(v) + std::log1p(-v);
        case Transform::logit_neg: return std::log(-v) + std::log1p(v);
    }
    throw std::logic_error("log_jacobian: bad transform");
}

/// d/dz of log|dv/dz|, expressed through the constrained value.
inline double dlog_jacobian_dz(Transform t, double v) {
    switch (t) {
        case Transform::identity: return 0.0;
        case Transform::log_pos: return 1.0;
        case Transform::log_neg: return 1.0;
        case Transform::logit01: return 1.0 - 2.0 * v;
        case Transform::logit_neg: return 1.0 + 2.0 * v;
    }
    throw std::logic_error("dlog_jacobian_dz: bad transform");
}

}  // namespace tf
}  // namespace gtfm
