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

#include "cvloop/loop_sim.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace cvloop {

namespace {

// Within-tick application order. Feedforward lands early in the tick so a
// measurement at tick t feeds a displacement at t+1 with delay <= tau, and a
// phase scheduled at the same tick acts after the displacement completes the
// measurement-induced gate.
enum Priority {
  kLosses = 0,
  kAdmit = 1,
  kFeedforward = 2,
  kPhase1 = 3,
  kVbs = 4,
  kPhase2 = 5,
  kSwitch2 = 6,
  kMeasure = 7,
  kReadout = 8,
};

int priority_of(const Event& e) {
  if (const auto* s1 = std::get_if<Switch1Event>(&e.body))
    return s1->mode == Switch1Mode::Admit ? kAdmit : kReadout;
  if (std::holds_alternative<FeedforwardEvent>(e.body)) return kFeedforward;
  if (std::holds_alternative<Phase1Event>(e.body)) return kPhase1;
  if (std::holds_alternative<VbsEvent>(e.body)) return kVbs;
  if (std::holds_alternative<Phase2Event>(e.body)) return kPhase2;
  if (std::holds_alternative<Switch2Event>(e.body)) return kSwitch2;
  return kMeasure;
}

Json event_echo(const Event& e) {
  // Reuse the program serialization for the transcript echo.
  ControlProgram tmp;
  tmp.events.push_back(e);
  return tmp.to_json()["events"][0];
}

class Machine {
 public:
  Machine(const ControlProgram& program, const GaussianState& inputs,
          const NoiseConfig& noise, const OutcomePolicy& policy)
      : program_(program),
        noise_(noise),
        policy_(policy),
        rng_(policy.seed),
        state_(inputs),
        outer_(program.tau_prime),
        written_at_(program.tau_prime, -1) {
    noise_.check();
    if (inputs.n_modes != program_.n_inputs)
      throw std::invalid_argument("input state mode count does not match program");
    for (const AncillaSlot& slot : program_.ancilla_schedule)
      ancilla_by_bin_[slot.bin] = slot;
    // Input pulses are modes 0..n-1 of the provided joint state.
    for (int i = 0; i < program_.n_inputs; ++i) handles_.push_back(i);
    next_handle_ = program_.n_inputs + program_.n_ancillas;
    transcript_.seed = policy.seed;
    transcript_.outcome_mode = policy.kind == OutcomePolicy::Kind::Sample ? "sampled"
                               : policy.kind == OutcomePolicy::Kind::FixedAll
                                   ? "fixed_all"
                                   : "fixed_map";
  }

  RunResult execute() {
    std::map<int, std::vector<Event>> by_tick;
    for (const Event& e : program_.events) by_tick[e.tick].push_back(e);
    const int horizon = program_.last_tick();
    for (int tick = 0; tick <= horizon; ++tick) {
      apply_losses(tick);
      routed_to_detector_ = false;
      auto it = by_tick.find(tick);
      if (it == by_tick.end()) continue;
      std::vector<Event> events = it->second;
      std::stable_sort(events.begin(), events.end(),
                       [](const Event& a, const Event& b) {
                         return priority_of(a) < priority_of(b);
                       });
      TranscriptTick entry;
      entry.tick = tick;
      for (const Event& e : events) apply_event(tick, e, entry);
      snapshot(entry);
      transcript_.ticks.push_back(std::move(entry));
    }

    RunResult result;
    std::vector<int> emitted_indices;
    for (int handle : emitted_) emitted_indices.push_back(index_of(handle));
    result.output = extract_modes(state_, emitted_indices);
    transcript_.output = result.output;
    result.transcript = std::move(transcript_);
    return result;
  }

 private:
  int slot_at(int tick) const { return tick % program_.tau_prime; }

  int index_of(int handle) const {
    for (size_t i = 0; i < handles_.size(); ++i)
      if (handles_[i] == handle) return static_cast<int>(i);
    throw std::logic_error("dead mode handle");
  }

  void apply_losses(int tick) {
    const int slot = slot_at(tick);
    if (outer_[slot] && written_at_[slot] != tick && noise_.eta_out < 1.0)
      state_ = loss_channel(state_, index_of(*outer_[slot]), noise_.eta_out);
    if (inner_ && noise_.eta_in < 1.0)
      state_ = loss_channel(state_, index_of(*inner_), noise_.eta_in);
  }

  // Appends a fresh mode to the joint state and returns its handle.
  int add_mode(const GaussianState& mode_state, int handle) {
    state_.append(mode_state);
    handles_.push_back(handle);
    return handle;
  }

  void remove_mode(int handle) {
    const int idx = index_of(handle);
    state_.remove_mode(idx);
    handles_.erase(handles_.begin() + idx);
  }

  GaussianState make_ancilla(int tick, const AncillaSlot& slot) const {
    if (slot.kind == AncillaKind::Cubic)
      throw ExecutionError(tick,
                           "cubic ancilla requires the Fock backend, not the "
                           "Gaussian loop simulator");
    if (noise_.ideal_ancilla()) return ideal_x_squeezed();
    return squeezed_vacuum_db(*noise_.ancilla_squeezing_db);
  }

  double sample_or_fixed(const std::string& label, double mean, double variance) {
    switch (policy_.kind) {
      case OutcomePolicy::Kind::Sample:
        return rng_.gauss(mean, variance);
      case OutcomePolicy::Kind::FixedAll:
        return policy_.fixed_value;
      case OutcomePolicy::Kind::FixedMap: {
        auto it = policy_.fixed.find(label);
        if (it == policy_.fixed.end())
          throw std::invalid_argument("no fixed outcome for label '" + label + "'");
        return it->second;
      }
    }
    return 0.0;
  }

  void apply_event(int tick, const Event& e, TranscriptTick& entry) {
    Json echo = event_echo(e);
    const int slot = slot_at(tick);

    if (const auto* s1 = std::get_if<Switch1Event>(&e.body)) {
      if (s1->mode == Switch1Mode::Admit) {
        if (outer_[slot])
          throw ExecutionError(tick, "admit into an occupied slot");
        int handle = s1->bin;
        if (handle >= program_.n_inputs) {
          auto it = ancilla_by_bin_.find(handle);
          if (it == ancilla_by_bin_.end())
            throw ExecutionError(tick, "admit of an unscheduled ancilla bin");
          add_mode(make_ancilla(tick, it->second), handle);
        } else if (handle < 0 || handle >= program_.n_inputs) {
          throw ExecutionError(tick, "admit of an out-of-range bin");
        }
        outer_[slot] = handle;
        written_at_[slot] = tick;
        ++admitted_;
      } else if (s1->mode == Switch1Mode::Readout) {
        if (!outer_[slot]) throw ExecutionError(tick, "readout of an empty slot");
        emitted_.push_back(*outer_[slot]);
        outer_[slot].reset();
        ++emitted_count_;
      }
    } else if (const auto* f = std::get_if<FeedforwardEvent>(&e.body)) {
      const int target = f->target_bin;
      if (std::find(emitted_.begin(), emitted_.end(), target) != emitted_.end())
        throw ExecutionError(tick, "feedforward targets an emitted bin");
      bool positioned = inner_ == target;
      for (const auto& s : outer_) positioned = positioned || s == target;
      if (!positioned) throw ExecutionError(tick, "feedforward targets a dead bin");
      const double amount = evaluate(f->fn, recorded());
      const double angle = f->quadrature == 'x' ? 0.0 : M_PI / 2.0;
      state_ = feedforward_displace(state_, index_of(target), angle, amount);
      echo["amount"] = amount;
    } else if (const auto* p1 = std::get_if<Phase1Event>(&e.body)) {
      if (!inner_) throw ExecutionError(tick, "phase shifter 1 with an empty loop");
      state_ = apply(state_, make_rotation(state_.n_modes, index_of(*inner_), p1->theta));
    } else if (const auto* v = std::get_if<VbsEvent>(&e.body)) {
      apply_vbs(tick, v->transmissivity);
    } else if (const auto* p2 = std::get_if<Phase2Event>(&e.body)) {
      if (!outer_[slot])
        throw ExecutionError(tick, "phase shifter 2 with an empty outgoing bin");
      double phi = p2->phi;
      if (p2->dynamic) {
        phi = evaluate(p2->fn, recorded());
        transcript_.recorded_phases[p2->record_as] = phi;
        echo["value"] = phi;
      }
      state_ = apply(state_, make_rotation(state_.n_modes, index_of(*outer_[slot]), phi));
    } else if (const auto* s2 = std::get_if<Switch2Event>(&e.body)) {
      if (s2->route == Switch2Route::ToDetector) {
        if (!outer_[slot])
          throw ExecutionError(tick, "switch-2 routes an empty slot to the detector");
        routed_to_detector_ = true;
      }
    } else {
      const auto& m = std::get<MeasureEvent>(e.body);
      if (!routed_to_detector_ || !outer_[slot])
        throw ExecutionError(tick, "measurement without a pulse routed to the detector");
      const int handle = *outer_[slot];
      int idx = index_of(handle);
      if (noise_.detector_efficiency < 1.0)
        state_ = loss_channel(state_, idx, noise_.detector_efficiency);
      // Sampling needs the marginal of the rotated quadrature.
      const double outcome = measure(m, idx);
      transcript_.outcomes[m.label] = outcome;
      handles_.erase(handles_.begin() + idx);
      outer_[slot].reset();
      ++measured_;
      echo["outcome"] = outcome;
    }
    entry.applied.push_back(echo);
  }

  double measure(const MeasureEvent& m, int idx) {
    if (policy_.kind == OutcomePolicy::Kind::Sample) {
      HomodyneResult hom = homodyne(state_, idx, m.quadrature_angle, rng_);
      state_ = std::move(hom.state);
      return hom.outcome;
    }
    const double fixed = sample_or_fixed(m.label, 0.0, 0.0);
    HomodyneResult hom = homodyne_fixed(state_, idx, m.quadrature_angle, fixed);
    state_ = std::move(hom.state);
    return hom.outcome;
  }

  void apply_vbs(int tick, double transmissivity) {
    if (transmissivity < 0.0 || transmissivity > 1.0)
      throw ExecutionError(tick, "VBS transmissivity out of range");
    const int slot = slot_at(tick);
    if (transmissivity == 0.0) return;  // hold: loop keeps circulating
    if (transmissivity == 1.0) {
      // Exact swap of the arriving bin and the loop content.
      std::optional<int> arriving = outer_[slot];
      outer_[slot] = inner_;
      inner_ = arriving;
      if (outer_[slot]) written_at_[slot] = tick;
      return;
    }
    if (!outer_[slot] && !inner_) return;
    // A beam splitter always has two ports; an empty side is fresh vacuum.
    if (!outer_[slot]) {
      outer_[slot] = add_mode(vacuum(1), next_handle_++);
      written_at_[slot] = tick;
      ++admitted_;
    }
    if (!inner_) {
      inner_ = add_mode(vacuum(1), next_handle_++);
      ++admitted_;
    }
    state_ = apply(state_, make_beamsplitter(state_.n_modes, index_of(*outer_[slot]),
                                             index_of(*inner_), transmissivity));
    written_at_[slot] = tick;
  }

  std::map<std::string, double> recorded() const {
    std::map<std::string, double> values = transcript_.outcomes;
    for (const auto& [label, value] : transcript_.recorded_phases) values[label] = value;
    return values;
  }

  void snapshot(TranscriptTick& entry) {
    entry.outer.clear();
    for (const auto& s : outer_) entry.outer.push_back(s.value_or(-1));
    entry.inner = inner_.value_or(-1);
    entry.admitted = admitted_;
    entry.measured = measured_;
    entry.emitted = emitted_count_;
    int live = inner_ ? 1 : 0;
    for (const auto& s : outer_)
      if (s) ++live;
    entry.live = live;
  }

  const ControlProgram& program_;
  NoiseConfig noise_;
  OutcomePolicy policy_;
  Rng rng_;
  GaussianState state_;
  std::vector<int> handles_;  // state index -> handle
  std::vector<std::optional<int>> outer_;
  std::optional<int> inner_;
  std::vector<int> written_at_;
  std::vector<int> emitted_;
  std::map<int, AncillaSlot> ancilla_by_bin_;
  Transcript transcript_;
  bool routed_to_detector_ = false;
  int next_handle_ = 0;
  int admitted_ = 0;
  int measured_ = 0;
  int emitted_count_ = 0;
};

}  // namespace

Json Transcript::to_json() const {
  Json j;
  j["format"] = "cvloop-transcript/1";
  j["seed"] = seed;
  j["outcome_mode"] = outcome_mode;
  Json tick_list = Json::array();
  for (const TranscriptTick& t : ticks) {
    Json entry;
    entry["tick"] = t.tick;
    entry["applied"] = t.applied;
    entry["outer"] = t.outer;
    entry["inner"] = t.inner;
    entry["counts"] = {{"admitted", t.admitted},
                       {"measured", t.measured},
                       {"emitted", t.emitted},
                       {"live", t.live}};
    tick_list.push_back(entry);
  }
  j["ticks"] = tick_list;
  Json outcomes_json = Json::object();
  for (const auto& [label, value] : outcomes) outcomes_json[label] = value;
  j["outcomes"] = outcomes_json;
  j["output_state"] = state_to_json(output);
  return j;
}

RunResult run(const ControlProgram& program, const GaussianState& inputs,
              const NoiseConfig& noise, const OutcomePolicy& policy) {
  ValidationReport report = validate(program);
  if (!report.ok)
    throw std::invalid_argument("program fails validation: " +
                                report.violations.front().rule);
  Machine machine(program, inputs, noise, policy);
  return machine.execute();
}

double GaussianChannel::physicality_margin() const {
  const int n = static_cast<int>(transfer.rows()) / 2;
  const Eigen::MatrixXd omega = symplectic_form(n);
  Eigen::MatrixXcd m = noise.cast<std::complex<double>>();
  m += std::complex<double>(0, 0.5) *
       (omega - transfer * omega * transfer.transpose()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  return solver.eigenvalues().minCoeff();
}

Json GaussianChannel::to_json() const {
  Json j;
  auto matrix_json = [](const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
      rows.push_back(row);
    }
    return rows;
  };
  j["A"] = matrix_json(transfer);
  j["N"] = matrix_json(noise);
  j["d"] = std::vector<double>(displacement.data(),
                               displacement.data() + displacement.size());
  return j;
}

GaussianChannel extract_channel(const ControlProgram& program,
                                const NoiseConfig& noise) {
  if (!program.is_gaussian())
    throw UnsupportedProgramError(
        "channel extraction needs a Gaussian program (affine control only)");
  const int n = program.n_inputs;
  const OutcomePolicy zeros = OutcomePolicy::fixed_all(0.0);

  RunResult base = run(program, vacuum(n), noise, zeros);
  if (base.output.n_modes != n)
    throw UnsupportedProgramError("program does not emit all input bins");

  GaussianChannel channel;
  channel.displacement = base.output.mean;
  channel.transfer.resize(2 * n, 2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    GaussianState probe = vacuum(n);
    probe.mean(k) = 1.0;
    RunResult shifted = run(program, probe, noise, zeros);
    channel.transfer.col(k) = shifted.output.mean - channel.displacement;
  }
  channel.noise = base.output.cov -
                  0.5 * channel.transfer * channel.transfer.transpose();
  return channel;
}

Json VerifyReport::to_json() const {
  Json j = channel.to_json();
  j["transfer_error"] = transfer_error;
  j["noise_norm"] = noise_norm;
  j["pass"] = pass;
  j["thresholds"] = {{"transfer_tol", thresholds.transfer_tol},
                     {"noise_tol", thresholds.noise_tol}};
  return j;
}

VerifyReport verify(const ControlProgram& program, const SymplecticOp& target,
                    const NoiseConfig& noise, const VerifyThresholds& thresholds) {
  VerifyReport report;
  report.channel = extract_channel(program, noise);
  report.thresholds = thresholds;
  report.transfer_error = (report.channel.transfer - target.matrix).norm();
  report.noise_norm = report.channel.noise.norm();
  report.pass = report.transfer_error < thresholds.transfer_tol &&
                report.noise_norm < thresholds.noise_tol;
  return report;
}

Json BudgetReport::to_json() const {
  Json j;
  if (std::isinf(effective_squeezing_db)) j["effective_squeezing_db"] = "ideal";
  else j["effective_squeezing_db"] = effective_squeezing_db;
  j["threshold_db"] = threshold_db;
  j["meets_threshold"] = meets_threshold;
  j["loss_budget_ok"] = loss_budget_ok;
  return j;
}

BudgetReport noise_budget(const NoiseConfig& noise, int round_trips) {
  if (round_trips < 0) throw std::invalid_argument("round_trips must be >= 0");
  noise.check();
  const double attenuation = std::pow(noise.eta_in, round_trips);
  const double anc_var = noise.ideal_ancilla()
                             ? 0.0
                             : 0.5 * std::pow(10.0, -*noise.ancilla_squeezing_db / 10.0);
  const double effective_var = attenuation * anc_var + (1.0 - attenuation) * 0.5;
  BudgetReport report;
  report.effective_squeezing_db = effective_var == 0.0
                                      ? std::numeric_limits<double>::infinity()
                                      : variance_to_db(effective_var);
  report.meets_threshold = report.effective_squeezing_db >= report.threshold_db - 1e-9;
  report.loss_budget_ok = (1.0 - noise.eta_in) < 0.01;
  return report;
}

}  // namespace cvloop
