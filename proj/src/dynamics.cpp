#include "pcoord/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace pcoord {

namespace {

constexpr int kMaxCachedSlots = 4096;

// Analytic integration over any duration dt >= 0; no bound checks.
RobotState advance(RobotState s, double u, const Kinodynamics& kin,
                   double dt) {
  const double v = s.v;
  if (u > 0.0) {
    if (v >= kin.v_max) return {s.x + kin.v_max * dt, kin.v_max};
    const double t_sat = (kin.v_max - v) / u;
    if (t_sat < dt) {
      return {s.x + v * t_sat + 0.5 * u * t_sat * t_sat +
                  kin.v_max * (dt - t_sat),
              kin.v_max};
    }
    return {s.x + v * dt + 0.5 * u * dt * dt, std::min(v + u * dt, kin.v_max)};
  }
  if (u < 0.0) {
    if (v <= 0.0) return {s.x, 0.0};
    const double t_stop = v / -u;
    if (t_stop < dt) return {s.x + v * t_stop + 0.5 * u * t_stop * t_stop, 0.0};
    return {s.x + v * dt + 0.5 * u * dt * dt, std::max(v + u * dt, 0.0)};
  }
  return {s.x + v * dt, v};
}

bool is_steady(RobotState s, double u, const Kinodynamics& kin) {
  return u == 0.0 || (u < 0.0 && s.v <= 0.0) || (u > 0.0 && s.v >= kin.v_max);
}

}  // namespace

void Kinodynamics::validate() const {
  if (!(u_min < 0.0 && 0.0 < u_max)) {
    throw ContractViolation("kinodynamics: need u_min < 0 < u_max");
  }
  if (!(v_max > 0.0)) {
    throw ContractViolation("kinodynamics: need v_max > 0");
  }
}

int Kinodynamics::full_brake_slots() const {
  return static_cast<int>(std::ceil(v_max / -u_min));
}

ControlSequence::ControlSequence(std::vector<double> values,
                                 const Kinodynamics& kin)
    : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double u = values_[i];
    if (!(kin.u_min <= u && u <= kin.u_max)) {
      throw ContractViolation("control value out of bounds at slot " +
                              std::to_string(i));
    }
  }
}

double ControlSequence::at(std::size_t slot) const {
  if (values_.empty()) return 0.0;
  return values_[std::min(slot, values_.size() - 1)];
}

ControlSequence ControlSequence::shifted(std::size_t slots) const {
  ControlSequence out;
  if (values_.empty()) return out;
  const std::size_t first = std::min(slots, values_.size() - 1);
  out.values_.assign(values_.begin() + static_cast<std::ptrdiff_t>(first),
                     values_.end());
  return out;
}

RobotState step(RobotState s, double u, const Kinodynamics& kin, double dt) {
  if (!(kin.u_min <= u && u <= kin.u_max)) {
    throw ContractViolation("step: control " + std::to_string(u) +
                            " outside [u_min, u_max]");
  }
  if (!(dt > 0.0 && dt <= 1.0)) {
    throw ContractViolation("step: dt must lie in (0, 1]");
  }
  return advance(s, u, kin, dt);
}

Trajectory::Trajectory(RobotState start, ControlSequence controls,
                       Kinodynamics kin)
    : controls_(std::move(controls)), kin_(kin) {
  const int n = static_cast<int>(controls_.size());
  // Room for the explicit slots plus a full stop or acceleration.
  boundaries_.reserve(static_cast<std::size_t>(n) + 2 +
                      static_cast<std::size_t>(std::ceil(
                          kin_.v_max / std::min(kin_.u_max, -kin_.u_min))));
  boundaries_.push_back(start);
  for (int k = 0; k < n; ++k) {
    boundaries_.push_back(step(boundaries_.back(), controls_.at(k), kin_));
  }
  const double tail = controls_.at(controls_.size());
  while (!is_steady(boundaries_.back(), tail, kin_)) {
    if (static_cast<int>(boundaries_.size()) > kMaxCachedSlots) {
      steady_ = false;
      break;
    }
    boundaries_.push_back(step(boundaries_.back(), tail, kin_));
  }
}

double Trajectory::control(int k) const {
  return controls_.at(static_cast<std::size_t>(std::max(k, 0)));
}

RobotState Trajectory::at_slot(int k) const {
  if (k < 0) throw ContractViolation("trajectory queried at negative time");
  if (k <= last_slot()) return boundaries_[static_cast<std::size_t>(k)];
  return at(static_cast<double>(k));
}

RobotState Trajectory::at(double t) const {
  if (!(t >= 0.0)) throw ContractViolation("trajectory queried at t < 0");
  const int last = last_slot();
  if (t < static_cast<double>(last)) {
    const int k = static_cast<int>(std::floor(t));
    const double frac = t - k;
    const RobotState& b = boundaries_[static_cast<std::size_t>(k)];
    if (frac == 0.0) return b;
    return advance(b, control(k), kin_, frac);
  }
  const RobotState& b = boundaries_.back();
  const double rest = t - static_cast<double>(last);
  if (rest == 0.0) return b;
  if (steady_) return {b.x + b.v * rest, b.v};
  return advance(b, control(last), kin_, rest);
}

double Trajectory::max_x() const {
  const RobotState& b = boundaries_.back();
  if (steady_ && b.v <= 0.0) return b.x;
  return std::numeric_limits<double>::infinity();
}

Trajectory flow(RobotState s, ControlSequence controls,
                const Kinodynamics& kin) {
  return Trajectory(s, std::move(controls), kin);
}

double brake_stop(RobotState s, const Kinodynamics& kin) {
  return s.x + s.v * s.v / (-2.0 * kin.u_min);
}

double x_stop(RobotState s, const Kinodynamics& kin) {
  return brake_stop(step(s, kin.u_max, kin), kin);
}

bool leq_state(const RobotState& a, const RobotState& b) {
  return a.x <= b.x && a.v <= b.v;
}

bool leq_control(const ControlSequence& a, const ControlSequence& b) {
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k) {
    if (a.at(k) > b.at(k)) return false;
  }
  return true;
}

}  // namespace pcoord
