#ifndef STAM_EVOLUTION_HPP_
#define STAM_EVOLUTION_HPP_

#include "stam/expm.hpp"
#include "stam/hamiltonians.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace stam {

/// lambda(t) = A exp[-B (t/T - 1)^2] - C on [0, T].
struct Schedule {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double T = 1.0;

  double lambda(double t) const;
  double end_value() const { return lambda(T); }

  /// T > 0, |lambda(0)| <= 0.01 |lambda(T)|, monotonic on a 1e4-point grid.
  void validate() const;
};

/// One constant-Hamiltonian piece of a sequence. Segments that realize an
/// instantaneous unitary (the outer factors of a composite pulse) have unit
/// duration with the strength folded into the operator and do not advance
/// the laboratory clock.
struct Segment {
  std::shared_ptr<const BandedOperator> hamiltonian;
  double duration = 0.0;
  bool checkpoint = false;
  std::string label;
  double lambda = 0.0;
  bool advances_clock = true;
};

struct PulseSequence {
  std::vector<Segment> segments;

  /// Laboratory time, seconds.
  double total_time() const;
  void append(const PulseSequence& other);
  int checkpoint_count() const;
};

/// State handed to an observer. t is laboratory time, segment the index of
/// the segment being applied (-1 before the first), checkpoint the 1-based
/// checkpoint count when this sample closes a checkpoint segment, else 0.
struct Sample {
  double t;
  double lambda;
  const StateVector& state;
  int segment;
  int checkpoint;
};

using Observer = std::function<void(const Sample&)>;

/// e^{-iHt} psi. With an observer, emits the initial state, `samples`
/// interior points evenly spaced in time, and the final state.
StateVector propagate_const(const BandedOperator& h, double t, const StateVector& psi,
                            const Observer& observer = {}, int samples = 0,
                            const KrylovOptions& options = {}, double lambda = 0.0);

using HamiltonianBuilder = std::function<BandedOperator(double lambda)>;

/// Piecewise-constant midpoint integration: slice i applies H(lambda(t_mid)).
/// The observer sees about `samples` evenly spaced slices plus both ends.
StateVector propagate_schedule(const HamiltonianBuilder& builder, const Schedule& schedule,
                               const StateVector& psi, long steps, const Observer& observer = {},
                               int samples = 0, const KrylovOptions& options = {});

struct ScheduleResult {
  StateVector state;
  long steps;
  /// || psi_steps - psi_{steps/2} ||.
  double difference;
};

/// Doubles the slice count from initial_steps until two successive results
/// differ by at most tolerance; the accepted run is traced. Throws
/// ConvergenceError after max_doublings.
ScheduleResult propagate_schedule_converged(const HamiltonianBuilder& builder, const Schedule& schedule,
                                            const StateVector& psi, long initial_steps,
                                            double tolerance = 1e-6, int max_doublings = 12,
                                            const Observer& observer = {}, int samples = 0,
                                            const KrylovOptions& options = {});

/// Applies the segments in order. samples_per_segment interior samples go to
/// clock-advancing segments only.
StateVector run_sequence(const PulseSequence& seq, const StateVector& psi, const Observer& observer = {},
                         int samples_per_segment = 0, const KrylovOptions& options = {});

/// Weight of e^{-iG lambda}|0> on its top max(2J, dim/10) levels.
double generator_leakage(const FockSpace& space, const MultiSqueezeSpec& spec, double lambda);

/// e^{-iG lambda} e^{-i omega_c a^dag a t_p} e^{+iG lambda} as three segments;
/// t_p = pi / (J omega_c). Throws TruncationError when generator_leakage
/// exceeds max_leakage.
PulseSequence composite_pulse(const FockSpace& space, const MultiSqueezeSpec& spec, double lambda_k,
                              double max_leakage = 1e-10);

/// Product of the segment exponentials as a dense matrix (dim <= 4096).
Matrix sequence_unitary(const PulseSequence& seq);

}  // namespace stam

#endif  // STAM_EVOLUTION_HPP_
