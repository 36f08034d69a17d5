#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "somrl/errors.hpp"
#include "somrl/geometry.hpp"

namespace somrl {

using Position = Vec2;

// The nine movement actions: staying in place plus eight unit directions.
// Stay is id 0 so that argmax ties on an untrained Q-function keep the agent
// in place rather than marching it into a wall.
enum class Action : std::uint8_t {
    kStay = 0,
    kForward,       // +x
    kBackward,      // -x
    kLeft,          // +y
    kRight,         // -y
    kForwardLeft,   // +x +y
    kForwardRight,  // +x -y
    kBackLeft,      // -x +y
    kBackRight,     // -x -y
};

inline constexpr std::size_t kNumActions = 9;

inline Vec2 action_direction(Action a) {
    constexpr double s = 0.70710678118654752440;  // 1/sqrt(2)
    switch (a) {
        case Action::kStay:         return {0.0, 0.0};
        case Action::kForward:      return {1.0, 0.0};
        case Action::kBackward:     return {-1.0, 0.0};
        case Action::kLeft:         return {0.0, 1.0};
        case Action::kRight:        return {0.0, -1.0};
        case Action::kForwardLeft:  return {s, s};
        case Action::kForwardRight: return {s, -s};
        case Action::kBackLeft:     return {-s, s};
        case Action::kBackRight:    return {-s, -s};
    }
    throw ContractViolation("action_direction: bad action id");
}

struct Stimulus {
    Vec2 center;
    double rho = 2.0;  // Gaussian spread, length units
};

struct ArenaSpec {
    double width = 20.0;
    double height = 20.0;
    std::vector<Rect> obstacles;
    std::vector<Stimulus> stimuli;
    double step_duration = 0.2;  // seconds per action
    double speed = 6.0;          // length units per second

    double step_length() const { return speed * step_duration; }

    bool in_bounds(const Vec2& p) const {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }

    bool in_obstacle(const Vec2& p) const {
        for (const Rect& r : obstacles)
            if (r.contains_interior(p)) return true;
        return false;
    }

    bool valid_position(const Vec2& p) const { return in_bounds(p) && !in_obstacle(p); }

    void validate() const {
        if (width <= 0.0 || height <= 0.0) throw ConfigError("arena: non-positive size");
        if (speed <= 0.0) throw ConfigError("arena: speed must be > 0");
        if (step_duration <= 0.0) throw ConfigError("arena: step_duration must be > 0");
        for (const Rect& r : obstacles) {
            if (r.w <= 0.0 || r.h <= 0.0) throw ConfigError("arena: degenerate obstacle");
            if (r.x < 0.0 || r.y < 0.0 || r.x + r.w > width || r.y + r.h > height)
                throw ConfigError("arena: obstacle outside arena");
        }
        for (const Stimulus& s : stimuli) {
            if (s.rho <= 0.0) throw ConfigError("arena: stimulus spread must be > 0");
            if (!in_bounds(s.center)) throw ConfigError("arena: stimulus center outside arena");
        }
    }
};

struct TaskSpec {
    Vec2 goal_center;
    double goal_radius = 1.0;
    double goal_reward = 100.0;
    double obstacle_penalty = -100.0;
    double living_penalty = -10.0;
    std::vector<double> fe_signature;  // stimulus activations at the goal

    bool in_goal(const Vec2& p) const { return distance(p, goal_center) <= goal_radius; }

    void validate() const {
        if (goal_radius <= 0.0) throw ConfigError("task: goal_radius must be > 0");
        if (!(goal_reward > 0.0)) throw ConfigError("task: goal_reward must be > 0");
        if (!(obstacle_penalty < 0.0)) throw ConfigError("task: obstacle_penalty must be < 0");
        if (!(living_penalty < 0.0)) throw ConfigError("task: living_penalty must be < 0");
    }
};

struct Transition {
    Vec2 next;
    double reward = 0.0;
    bool terminal = false;
};

// One kinematic step.  The candidate displacement is direction * speed *
// step_duration; if the swept segment would enter an obstacle or leave the
// arena, the position is clamped at the contact point and the obstacle
// penalty applies.  Otherwise reaching the goal region terminates with the
// goal reward, and any other move costs the living penalty.
inline Transition step(const Vec2& p, Action a, const TaskSpec& task, const ArenaSpec& arena) {
    if (!arena.valid_position(p))
        throw ContractViolation("step: starting position outside arena or inside obstacle");

    const Vec2 d = action_direction(a) * arena.step_length();
    double t_hit = exit_time(p, d, arena.width, arena.height);
    for (const Rect& r : arena.obstacles) t_hit = std::min(t_hit, entry_time(p, d, r));

    if (std::isfinite(t_hit)) {
        Vec2 contact = p + d * t_hit;
        // Rounding can land the contact point epsilon-deep; snap it out.
        contact.x = std::clamp(contact.x, 0.0, arena.width);
        contact.y = std::clamp(contact.y, 0.0, arena.height);
        for (const Rect& r : arena.obstacles) {
            if (!r.contains_interior(contact)) continue;
            const double to_left = contact.x - r.x;
            const double to_right = r.x + r.w - contact.x;
            const double to_bottom = contact.y - r.y;
            const double to_top = r.y + r.h - contact.y;
            const double m = std::min({to_left, to_right, to_bottom, to_top});
            if (m == to_left) contact.x = r.x;
            else if (m == to_right) contact.x = r.x + r.w;
            else if (m == to_bottom) contact.y = r.y;
            else contact.y = r.y + r.h;
        }
        return {contact, task.obstacle_penalty, false};
    }
    const Vec2 next = p + d;
    if (task.in_goal(next)) return {next, task.goal_reward, true};
    return {next, task.living_penalty, false};
}

// Uniform draw over positions that are inside the arena, outside every
// obstacle, and outside the task's goal region.
inline Position sample_start(const ArenaSpec& arena, const TaskSpec& task, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(0.0, arena.width);
    std::uniform_real_distribution<double> uy(0.0, arena.height);
    for (int attempt = 0; attempt < 1'000'000; ++attempt) {
        Vec2 p{ux(rng), uy(rng)};
        if (arena.valid_position(p) && !task.in_goal(p)) return p;
    }
    throw ConfigError("sample_start: no free space outside obstacles and goal");
}

// Environment feature vector: one Gaussian radial activation per stimulus,
// exp(-|p - c|^2 / (2 rho^2)), each in (0, 1].
inline std::vector<double> stimulus_vector(const Vec2& p, const ArenaSpec& arena) {
    std::vector<double> fe(arena.stimuli.size());
    for (std::size_t k = 0; k < arena.stimuli.size(); ++k) {
        const Stimulus& s = arena.stimuli[k];
        const double d2 = (p.x - s.center.x) * (p.x - s.center.x) +
                          (p.y - s.center.y) * (p.y - s.center.y);
        fe[k] = std::exp(-d2 / (2.0 * s.rho * s.rho));
    }
    return fe;
}

}  // namespace somrl
