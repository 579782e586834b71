#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "touchtrack/touchtrack.hpp"

namespace touchtrack::testkit {

// Trial-to-trial variation for the four simulated gestures. Strokes run
// along the arm.
inline GestureSpec random_gesture_spec(GestureKind kind, std::mt19937_64& rng) {
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    GestureSpec g;
    g.kind = kind;
    g.seed = rng();
    g.noise_mm = 0.5;
    g.patch_width = uniform(0.02, 0.04);
    g.patch_height = uniform(0.03, 0.06);
    g.duration_s = uniform(1.5, 2.5);
    switch (kind) {
        case GestureKind::stroke: {
            g.speed_cm_s = uniform(5.0, 20.0);
            g.depth_mm = uniform(2.0, 5.0);
            const double max_leg = 0.25 - g.patch_height - 0.01;
            g.repetitions = static_cast<std::size_t>(std::ceil(g.speed_cm_s / 100.0 * g.duration_s / max_leg));
            break;
        }
        case GestureKind::tap: {
            g.speed_cm_s = uniform(10.0, 20.0);
            g.depth_mm = uniform(2.0, 5.0);
            g.repetitions = std::uniform_int_distribution<std::size_t>(2, 5)(rng);
            const double cycle = 2.0 * (g.airborne_mm + g.depth_mm) / (10.0 * g.speed_cm_s);
            g.duration_s = static_cast<double>(g.repetitions) * (cycle + uniform(0.1, 0.3));
            break;
        }
        case GestureKind::hold:
            g.depth_mm = uniform(2.0, 6.0);
            break;
        case GestureKind::shake:
            g.speed_cm_s = uniform(5.0, 15.0);
            g.depth_mm = uniform(6.0, 9.0);
            g.patch_width = uniform(0.02, 0.03);
            break;
    }
    return g;
}

struct SimulatedTrial {
    GestureKind kind;
    AttributeSeries series;
};

inline std::vector<SimulatedTrial> simulate_trials(std::size_t per_gesture, std::uint64_t seed) {
    const SyntheticArm arm;
    const PreparedArm prepared(make_arm(arm));
    const ArmBasis basis = synthetic_arm_basis();
    std::mt19937_64 rng(seed);
    std::vector<SimulatedTrial> trials;
    for (GestureKind kind : kAllGestures) {
        for (std::size_t i = 0; i < per_gesture; ++i) {
            // Rare shake draws wander off the arm; redraw those.
            for (int attempt = 0;; ++attempt) {
                const GestureSpec spec = random_gesture_spec(kind, rng);
                GeneratedGesture gen;
                try {
                    gen = generate_gesture(arm, spec);
                } catch (const Error&) {
                    if (attempt == 9) throw;
                    continue;
                }
                trials.push_back({kind, build_series(gen.frames, prepared, basis)});
                break;
            }
        }
    }
    return trials;
}

}  // namespace touchtrack::testkit
