// ============================================================================
// traffic_models.hpp -- Per-device state sequences and rates.
//
// A device is either Regular or Alarm in each time slot and emits at a
// state-dependent deterministic rate. Two state models:
//
//   * i.i.d. Bernoulli: Alarm with probability p in every slot.
//   * Two-state Markov chain with transition matrix (rows Regular, Alarm)
//         [ 1-p   p ]
//         [ 1-q   q ]
//     started from its steady state. Alarm holding times are geometric
//     with parameter q; q = p recovers the Bernoulli model.
//
// q = 1 is rejected everywhere: the alarm state would be absorbing and the
// chain non-ergodic, so no steady state exists to start from.
// ============================================================================
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mtcsim/random.hpp"

namespace mtcsim {

enum class DeviceState : unsigned char { regular = 0, alarm = 1 };

/// Emission rates, packets per slot, identical across devices.
struct RateParams {
  double rate_regular = 0.01;
  double rate_alarm = 1.0;
};

/// Alarm holding parameter of the Markov model.
struct MarkovParams {
  explicit MarkovParams(double q_in) : q(q_in) {
    if (!std::isfinite(q) || q < 0.0 || q >= 1.0) {
      throw std::invalid_argument(
          "MarkovParams: q must lie in [0, 1); q = 1 makes the alarm state absorbing and the "
          "chain non-ergodic");
    }
  }
  double q;
};

/// One device's states over the simulation horizon.
struct StateSequence {
  std::vector<DeviceState> states;
  std::size_t device_index = 0;
};

inline double rate_of(DeviceState s, RateParams rp) {
  return s == DeviceState::alarm ? rp.rate_alarm : rp.rate_regular;
}

/// Integer-packet alternative to the deterministic rate: emit one packet
/// with probability rate_of(s) per slot. Requires rates <= 1 packet/slot;
/// the per-slot expectation equals rate_of(s).
inline unsigned sample_packet_emission(DeviceState s, RateParams rp, RngStream& rng) {
  const double r = rate_of(s, rp);
  if (r > 1.0) {
    throw std::invalid_argument("sample_packet_emission: rates must be <= 1 packet/slot");
  }
  return sample_bernoulli(r, rng) ? 1u : 0u;
}

namespace detail {
inline void check_probability(double p, const char* what) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw std::invalid_argument(std::string(what) + ": probability must lie in [0, 1]");
  }
}
inline void check_slots(std::size_t n_slots) {
  if (n_slots == 0) throw std::invalid_argument("state sampling: n_slots must be >= 1");
}
}  // namespace detail

/// Each slot independently Alarm with probability p.
inline StateSequence sample_bernoulli_states(double p, std::size_t n_slots, RngStream& rng,
                                             std::size_t device_index = 0) {
  detail::check_probability(p, "sample_bernoulli_states");
  detail::check_slots(n_slots);
  StateSequence seq;
  seq.device_index = device_index;
  seq.states.resize(n_slots);
  for (std::size_t k = 0; k < n_slots; ++k) {
    seq.states[k] = sample_bernoulli(p, rng) ? DeviceState::alarm : DeviceState::regular;
  }
  return seq;
}

/// Row-stochastic transition matrix, rows and columns ordered
/// (regular, alarm).
using TransitionMatrix = std::array<std::array<double, 2>, 2>;

inline TransitionMatrix markov_transition_matrix(double p, MarkovParams mp) {
  detail::check_probability(p, "markov_transition_matrix");
  return TransitionMatrix{{{1.0 - p, p}, {1.0 - mp.q, mp.q}}};
}

struct SteadyState {
  double alarm = 0.0;
  double regular = 1.0;
};

/// Stationary distribution: pi_alarm = p / (1 + p - q),
/// pi_regular = (1 - q) / (1 + p - q).
inline SteadyState steady_state(double p, MarkovParams mp) {
  detail::check_probability(p, "steady_state");
  const double denom = 1.0 + p - mp.q;
  return SteadyState{p / denom, (1.0 - mp.q) / denom};
}

/// Stationary chain: S(0) from the steady state, then one transition per
/// slot. Alarm holding times come out geometric with parameter q.
inline StateSequence sample_markov_states(double p, MarkovParams mp, std::size_t n_slots,
                                          RngStream& rng, std::size_t device_index = 0) {
  detail::check_probability(p, "sample_markov_states");
  detail::check_slots(n_slots);
  StateSequence seq;
  seq.device_index = device_index;
  seq.states.resize(n_slots);
  bool alarm = rng.uniform01() < steady_state(p, mp).alarm;
  seq.states[0] = alarm ? DeviceState::alarm : DeviceState::regular;
  for (std::size_t k = 1; k < n_slots; ++k) {
    alarm = rng.uniform01() < (alarm ? mp.q : p);
    seq.states[k] = alarm ? DeviceState::alarm : DeviceState::regular;
  }
  return seq;
}

}  // namespace mtcsim
