// Copyright 2026 The cvloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvloop/compile.hpp"

#include <cmath>

namespace cvloop {

namespace {

constexpr double kSqueezerEps = 1e-12;
constexpr double kPhaseEps = 1e-12;

// Canonicalize the R(pi) ambiguity: R(t2) S(r) R(t1) == R(t2-pi) S(r) R(t1-pi),
// so pin theta1 to (-pi/2, pi/2] when r > 0.
EulerForm canonical(EulerForm e) {
  auto wrap = [](double t) {
    t = std::fmod(t, 2.0 * M_PI);
    if (t <= -M_PI) t += 2.0 * M_PI;
    if (t > M_PI) t -= 2.0 * M_PI;
    return t;
  };
  if (e.r > kSqueezerEps) {
    while (e.theta1 > M_PI / 2.0) {
      e.theta1 -= M_PI;
      e.theta2 -= M_PI;
    }
    while (e.theta1 <= -M_PI / 2.0) {
      e.theta1 += M_PI;
      e.theta2 += M_PI;
    }
    e.theta2 = wrap(e.theta2);
    e.theta1 = wrap(e.theta1);
  } else {
    e.theta2 = wrap(e.theta2 + e.theta1);
    e.theta1 = 0.0;
    e.r = 0.0;
  }
  return e;
}

void require_valid(const ControlProgram& program) {
  ValidationReport report = validate(program);
  if (!report.ok) {
    std::string msg = "compiler produced an invalid program:";
    for (const Violation& v : report.violations)
      msg += " [" + v.rule + " @" + std::to_string(v.tick) + "] " + v.message;
    throw std::logic_error(msg);
  }
}

// Schedules events on the bin grid: slot s of the outer loop arrives at the
// coupling point at ticks congruent to s modulo tau_prime.
class Scheduler {
 public:
  Scheduler(int n_inputs, int n_ancillas)
      : program_(), slot_handle_(n_inputs + n_ancillas) {
    program_.n_inputs = n_inputs;
    program_.n_ancillas = n_ancillas;
    program_.tau_prime = n_inputs + n_ancillas;
    for (int k = 0; k < n_ancillas; ++k)
      program_.ancilla_schedule.push_back({n_inputs + k, AncillaKind::Squeezed, 0.0});
    for (int i = 0; i < n_inputs + n_ancillas; ++i) {
      slot_handle_[i] = i;
      add(i, Switch1Event{Switch1Mode::Admit, i});
    }
  }

  int arrival(int slot, int not_before) const {
    const int tau = program_.tau_prime;
    const int offset = ((slot - not_before) % tau + tau) % tau;
    return not_before + offset;
  }

  void add(int tick, EventBody body) { program_.events.push_back({tick, std::move(body)}); }

  // One adjacent-pair element: pick the earlier bin into the loop, phase it,
  // couple with the later bin, then return it to its (now empty) slot one
  // outer round trip later. A T=1 element is a positional swap of the pair.
  void schedule_element(const MeshElement& e) {
    const int slot_a = e.low, slot_b = e.low + 1;
    const int pickup = arrival(slot_a, cursor_);
    const int interact = pickup + 1;
    const int giveback = pickup + program_.tau_prime;
    add(pickup, VbsEvent{1.0});
    if (std::abs(e.phase) > kPhaseEps) add(interact, Phase1Event{e.phase});
    add(interact, VbsEvent{e.transmissivity});
    add(giveback, VbsEvent{1.0});
    if (e.transmissivity == 1.0) std::swap(slot_handle_[slot_a], slot_handle_[slot_b]);
    cursor_ = giveback + 1;
  }

  void schedule_phase(int slot, double theta) {
    const int pickup = arrival(slot, cursor_);
    add(pickup, VbsEvent{1.0});
    add(pickup + 1, Phase1Event{theta});
    add(pickup + program_.tau_prime, VbsEvent{1.0});
    cursor_ = pickup + program_.tau_prime + 1;
  }

  // Measurement-induced squeezer S(r) on the bin homed at `slot`, consuming
  // the ancilla pulse at `ancilla_slot`.
  void schedule_squeezer(int slot, int ancilla_slot, double r, const std::string& label) {
    const double reflectivity = std::exp(-2.0 * r);
    const double transmissivity = 1.0 - reflectivity;
    const double gain = std::sqrt(transmissivity / reflectivity);
    const int pickup = arrival(slot, cursor_);
    const int interact = arrival(ancilla_slot, pickup + 1);
    const int giveback = arrival(slot, interact + 1);
    add(pickup, VbsEvent{1.0});
    add(interact, VbsEvent{transmissivity});
    add(interact, Switch2Event{Switch2Route::ToDetector});
    add(interact, MeasureEvent{label, M_PI / 2.0});
    AffineFn fn;
    fn.gains.emplace_back(label, gain);
    add(interact + 1, FeedforwardEvent{slot_handle_[slot], 'p', fn});
    add(giveback, VbsEvent{1.0});
    cursor_ = giveback + 1;
  }

  // Constant displacement of the bin homed at `slot`, landing at `tick`.
  void schedule_displacement(int slot, int tick, double dx, double dp) {
    if (std::abs(dx) > 0.0) {
      AffineFn fn;
      fn.offset = dx;
      add(tick, FeedforwardEvent{slot_handle_[slot], 'x', fn});
    }
    if (std::abs(dp) > 0.0) {
      AffineFn fn;
      fn.offset = dp;
      add(tick, FeedforwardEvent{slot_handle_[slot], 'p', fn});
    }
  }

  // Emits the n output bins in slot order on one final pass.
  void schedule_readout(const Eigen::VectorXd& displacement) {
    const int tau = program_.tau_prime;
    const int n = program_.n_inputs;
    const int base = ((cursor_ + tau - 1) / tau) * tau;
    for (int j = 0; j < n; ++j) {
      if (displacement.size() == 2 * n)
        schedule_displacement(j, base + j, displacement(j), displacement(n + j));
      add(base + j, Switch1Event{Switch1Mode::Readout});
    }
    cursor_ = base + n;
  }

  int cursor() const { return cursor_; }
  ControlProgram finish() {
    require_valid(program_);
    return std::move(program_);
  }

 private:
  ControlProgram program_;
  std::vector<int> slot_handle_;
  int cursor_ = 0;
};

ControlProgram compile_single_mode_displaced(const EulerForm& raw,
                                             const Eigen::VectorXd& displacement) {
  const EulerForm e = canonical(raw);
  if (e.r < 0.0) throw std::invalid_argument("Euler form needs r >= 0");

  ControlProgram p;
  p.n_inputs = 1;
  if (e.r <= kSqueezerEps) {
    // Pass-through: pick the pulse up, rotate, release. No ancilla consumed.
    p.n_ancillas = 0;
    p.tau_prime = 1;
    p.events.push_back({0, Switch1Event{Switch1Mode::Admit, 0}});
    p.events.push_back({0, VbsEvent{1.0}});
    const double total = e.theta1 + e.theta2;
    if (std::abs(total) > kPhaseEps) p.events.push_back({1, Phase1Event{total}});
    p.events.push_back({1, VbsEvent{1.0}});
    if (displacement.size() == 2) {
      if (displacement(0) != 0.0) {
        AffineFn fn;
        fn.offset = displacement(0);
        p.events.push_back({1, FeedforwardEvent{0, 'x', fn}});
      }
      if (displacement(1) != 0.0) {
        AffineFn fn;
        fn.offset = displacement(1);
        p.events.push_back({1, FeedforwardEvent{0, 'p', fn}});
      }
    }
    p.events.push_back({1, Switch1Event{Switch1Mode::Readout}});
    require_valid(p);
    return p;
  }

  const double reflectivity = std::exp(-2.0 * e.r);
  const double transmissivity = 1.0 - reflectivity;
  const double gain = std::sqrt(transmissivity / reflectivity);
  p.n_ancillas = 1;
  p.tau_prime = 2;
  p.ancilla_schedule.push_back({1, AncillaKind::Squeezed, 0.0});
  p.events.push_back({0, Switch1Event{Switch1Mode::Admit, 0}});
  p.events.push_back({0, VbsEvent{1.0}});
  p.events.push_back({1, Switch1Event{Switch1Mode::Admit, 1}});
  if (std::abs(e.theta1) > kPhaseEps) p.events.push_back({1, Phase1Event{e.theta1}});
  p.events.push_back({1, VbsEvent{transmissivity}});
  p.events.push_back({1, Switch2Event{Switch2Route::ToDetector}});
  p.events.push_back({1, MeasureEvent{"q0", M_PI / 2.0}});
  AffineFn fn;
  fn.gains.emplace_back("q0", gain);
  p.events.push_back({2, FeedforwardEvent{0, 'p', fn}});
  if (std::abs(e.theta2) > kPhaseEps) p.events.push_back({2, Phase1Event{e.theta2}});
  p.events.push_back({2, VbsEvent{1.0}});
  if (displacement.size() == 2) {
    if (displacement(0) != 0.0) {
      AffineFn d;
      d.offset = displacement(0);
      p.events.push_back({2, FeedforwardEvent{0, 'x', d}});
    }
    if (displacement(1) != 0.0) {
      AffineFn d;
      d.offset = displacement(1);
      p.events.push_back({2, FeedforwardEvent{0, 'p', d}});
    }
  }
  p.events.push_back({2, Switch1Event{Switch1Mode::Readout}});
  require_valid(p);
  return p;
}

}  // namespace

ControlProgram compile_single_mode(const EulerForm& euler) {
  return compile_single_mode_displaced(euler, Eigen::VectorXd());
}

ControlProgram compile_gaussian(const SymplecticOp& target, int ancilla_budget) {
  const int n = target.n_modes();
  if (n < 1) throw std::invalid_argument("target has no modes");
  if (symplectic_error(target.matrix) > 1e-10)
    throw std::invalid_argument("target matrix is not symplectic");
  if (ancilla_budget > n)
    throw std::invalid_argument("ancilla budget exceeds the m <= n bound");

  if (n == 1) {
    const EulerForm e = euler_single_mode(target.matrix);
    const int needed = e.r > kSqueezerEps ? 1 : 0;
    if (ancilla_budget < needed) throw InsufficientAncillaError(needed, ancilla_budget);
    return compile_single_mode_displaced(e, target.displacement);
  }

  const GaussianDecomposition dec = bloch_messiah(target);
  int needed = 0;
  for (int k = 0; k < n; ++k)
    if (dec.squeezers(k) > kSqueezerEps) ++needed;
  if (ancilla_budget < needed) throw InsufficientAncillaError(needed, ancilla_budget);

  Scheduler sched(n, needed);
  for (const MeshElement& e : dec.mesh_in.elements) sched.schedule_element(e);
  for (int j = 0; j < n; ++j)
    if (std::abs(dec.mesh_in.phases(j)) > kPhaseEps)
      sched.schedule_phase(j, dec.mesh_in.phases(j));
  for (int k = 0; k < needed; ++k)
    sched.schedule_squeezer(k, n + k, dec.squeezers(k), "q" + std::to_string(k));
  for (const MeshElement& e : dec.mesh_out.elements) sched.schedule_element(e);
  for (int j = 0; j < n; ++j)
    if (std::abs(dec.mesh_out.phases(j)) > kPhaseEps)
      sched.schedule_phase(j, dec.mesh_out.phases(j));
  sched.schedule_readout(dec.displacement);
  return sched.finish();
}

ControlProgram compile_cubic(double gamma_target, bool anti_squeeze) {
  const double gamma_prime = 2.0 * std::sqrt(2.0) * gamma_target;
  ControlProgram p;
  p.n_inputs = 1;
  p.n_ancillas = anti_squeeze ? 3 : 2;
  p.tau_prime = 1 + p.n_ancillas;
  p.ancilla_schedule.push_back({1, AncillaKind::Squeezed, 0.0});
  p.ancilla_schedule.push_back({2, AncillaKind::Cubic, gamma_prime});
  if (anti_squeeze) p.ancilla_schedule.push_back({3, AncillaKind::Squeezed, 0.0});

  for (int i = 0; i < 1 + p.n_ancillas; ++i)
    p.events.push_back({i, Switch1Event{Switch1Mode::Admit, i}});

  // Input into the loop, then the two 50:50 couplings. The first leaves the
  // surviving (output) bin circulating in slot 1; the second feeds HD-1.
  p.events.push_back({0, VbsEvent{1.0}});
  p.events.push_back({1, VbsEvent{0.5}});
  p.events.push_back({2, VbsEvent{0.5}});
  p.events.push_back({2, Switch2Event{Switch2Route::ToDetector}});
  p.events.push_back({2, MeasureEvent{"q", 0.0}});

  // Eject the kept mode at the next empty slot, shift its phase by
  // arctan(3 sqrt(2) gamma' q), measure p at HD-2.
  const int eject = anti_squeeze ? 4 : 3;  // slot 0 comes around again
  p.events.push_back({eject, VbsEvent{1.0}});
  Phase2Event phi;
  phi.dynamic = true;
  phi.fn = ArctanScaledFn{3.0 * std::sqrt(2.0) * gamma_prime, "q"};
  phi.record_as = "phi";
  p.events.push_back({eject, phi});
  p.events.push_back({eject, Switch2Event{Switch2Route::ToDetector}});
  p.events.push_back({eject, MeasureEvent{"y", M_PI / 2.0}});

  // Displace p of the surviving bin by sqrt(2) y / cos(phi).
  const int ff_tick = eject + 1;  // slot 1 arrival
  p.events.push_back(
      {ff_tick, FeedforwardEvent{1, 'p', SecScaledFn{std::sqrt(2.0), "y", "phi"}}});

  if (!anti_squeeze) {
    p.events.push_back({ff_tick, Switch1Event{Switch1Mode::Readout}});
    require_valid(p);
    return p;
  }

  // Anti-squeezing block: R(pi/2) S(ln sqrt 2) R(-pi/2) == S(-ln sqrt 2)
  // applied to the surviving bin with the third ancilla.
  const double r = std::log(std::sqrt(2.0));
  const double reflectivity = std::exp(-2.0 * r);  // 1/2
  const double transmissivity = 1.0 - reflectivity;
  const double gain = std::sqrt(transmissivity / reflectivity);
  const int pickup = ff_tick;       // tick 5: slot 1 arrival, feedforward lands first
  const int interact = pickup + 2;  // tick 7: slot 3 (third ancilla) arrival
  p.events.push_back({pickup, VbsEvent{1.0}});
  p.events.push_back({pickup + 1, Phase1Event{-M_PI / 2.0}});
  p.events.push_back({interact, VbsEvent{transmissivity}});
  p.events.push_back({interact, Switch2Event{Switch2Route::ToDetector}});
  p.events.push_back({interact, MeasureEvent{"q_anti", M_PI / 2.0}});
  AffineFn fn;
  fn.gains.emplace_back("q_anti", gain);
  p.events.push_back({interact + 1, FeedforwardEvent{1, 'p', fn}});
  p.events.push_back({interact + 1, Phase1Event{M_PI / 2.0}});
  p.events.push_back({interact + 2, VbsEvent{1.0}});  // tick 9: slot 1, back home
  p.events.push_back({interact + 2, Switch1Event{Switch1Mode::Readout}});
  require_valid(p);
  return p;
}

int count_vbs_interactions(const ControlProgram& program) {
  int count = 0;
  for (const Event& e : program.events)
    if (const auto* v = std::get_if<VbsEvent>(&e.body))
      if (v->transmissivity > 0.0 && v->transmissivity < 1.0) ++count;
  return count;
}

}  // namespace cvloop
