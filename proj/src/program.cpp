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

#include "cvloop/program.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cvloop {

bool is_affine(const ControlFn& fn) {
  return std::holds_alternative<AffineFn>(fn);
}

std::vector<std::string> referenced_labels(const ControlFn& fn) {
  std::vector<std::string> out;
  if (const auto* a = std::get_if<AffineFn>(&fn)) {
    for (const auto& [label, gain] : a->gains) {
      (void)gain;
      out.push_back(label);
    }
  } else if (const auto* t = std::get_if<ArctanScaledFn>(&fn)) {
    out.push_back(t->source);
  } else if (const auto* s = std::get_if<SecScaledFn>(&fn)) {
    out.push_back(s->source);
    out.push_back(s->phase_source);
  }
  return out;
}

double evaluate(const ControlFn& fn, const std::map<std::string, double>& values) {
  auto lookup = [&](const std::string& label) {
    auto it = values.find(label);
    if (it == values.end())
      throw std::invalid_argument("control function references unrecorded label '" +
                                  label + "'");
    return it->second;
  };
  if (const auto* a = std::get_if<AffineFn>(&fn)) {
    double amount = a->offset;
    for (const auto& [label, gain] : a->gains) amount += gain * lookup(label);
    return amount;
  }
  if (const auto* t = std::get_if<ArctanScaledFn>(&fn))
    return std::atan(t->scale * lookup(t->source));
  const auto& s = std::get<SecScaledFn>(fn);
  return s.scale * lookup(s.source) / std::cos(lookup(s.phase_source));
}

// --- JSON forms -----------------------------------------------------------------

namespace {

Json fn_to_json(const ControlFn& fn) {
  Json j;
  if (const auto* a = std::get_if<AffineFn>(&fn)) {
    j["fn"] = "affine";
    Json gains = Json::object();
    for (const auto& [label, gain] : a->gains) gains[label] = gain;
    j["gains"] = gains;
    j["offset"] = a->offset;
  } else if (const auto* t = std::get_if<ArctanScaledFn>(&fn)) {
    j["fn"] = "arctan_scaled";
    j["scale"] = t->scale;
    j["source"] = t->source;
  } else {
    const auto& s = std::get<SecScaledFn>(fn);
    j["fn"] = "sec_scaled";
    j["scale"] = s.scale;
    j["sources"] = Json::array({s.source, s.phase_source});
  }
  return j;
}

ControlFn fn_from_json(const Json& j) {
  const std::string kind = j.at("fn").get<std::string>();
  if (kind == "affine") {
    AffineFn fn;
    for (const auto& [label, gain] : j.at("gains").items())
      fn.gains.emplace_back(label, gain.get<double>());
    fn.offset = j.value("offset", 0.0);
    return fn;
  }
  if (kind == "arctan_scaled")
    return ArctanScaledFn{j.at("scale").get<double>(),
                          j.at("source").get<std::string>()};
  if (kind == "sec_scaled") {
    const auto& sources = j.at("sources");
    return SecScaledFn{j.at("scale").get<double>(), sources.at(0).get<std::string>(),
                       sources.at(1).get<std::string>()};
  }
  throw std::invalid_argument("unknown control function kind '" + kind + "'");
}

Json event_to_json(const Event& e) {
  Json j;
  j["tick"] = e.tick;
  if (const auto* s1 = std::get_if<Switch1Event>(&e.body)) {
    j["kind"] = "switch1";
    switch (s1->mode) {
      case Switch1Mode::Admit: j["mode"] = "admit"; j["bin"] = s1->bin; break;
      case Switch1Mode::Recirculate: j["mode"] = "recirculate"; break;
      case Switch1Mode::Readout: j["mode"] = "readout"; break;
    }
  } else if (const auto* s2 = std::get_if<Switch2Event>(&e.body)) {
    j["kind"] = "switch2";
    j["route"] = s2->route == Switch2Route::ToDetector ? "to_detector" : "to_outer";
  } else if (const auto* v = std::get_if<VbsEvent>(&e.body)) {
    j["kind"] = "vbs";
    j["T"] = v->transmissivity;
  } else if (const auto* p1 = std::get_if<Phase1Event>(&e.body)) {
    j["kind"] = "phase1";
    j["theta"] = p1->theta;
  } else if (const auto* p2 = std::get_if<Phase2Event>(&e.body)) {
    j["kind"] = "phase2";
    if (p2->dynamic) {
      j["dynamic"] = fn_to_json(p2->fn);
      j["record_as"] = p2->record_as;
    } else {
      j["phi"] = p2->phi;
    }
  } else if (const auto* m = std::get_if<MeasureEvent>(&e.body)) {
    j["kind"] = "measure";
    j["label"] = m->label;
    j["angle"] = m->quadrature_angle;
  } else {
    const auto& f = std::get<FeedforwardEvent>(e.body);
    j["kind"] = "feedforward";
    j["target_bin"] = f.target_bin;
    j["quadrature"] = std::string(1, f.quadrature);
    j["fn"] = fn_to_json(f.fn);
  }
  return j;
}

Event event_from_json(const Json& j) {
  Event e;
  e.tick = j.at("tick").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "switch1") {
    Switch1Event s1;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "admit") {
      s1.mode = Switch1Mode::Admit;
      s1.bin = j.at("bin").get<int>();
    } else if (mode == "readout") {
      s1.mode = Switch1Mode::Readout;
    } else if (mode == "recirculate") {
      s1.mode = Switch1Mode::Recirculate;
    } else {
      throw std::invalid_argument("unknown switch1 mode '" + mode + "'");
    }
    e.body = s1;
  } else if (kind == "switch2") {
    const std::string route = j.at("route").get<std::string>();
    if (route != "to_detector" && route != "to_outer")
      throw std::invalid_argument("unknown switch2 route '" + route + "'");
    e.body = Switch2Event{route == "to_detector" ? Switch2Route::ToDetector
                                                 : Switch2Route::ToOuter};
  } else if (kind == "vbs") {
    e.body = VbsEvent{j.at("T").get<double>()};
  } else if (kind == "phase1") {
    e.body = Phase1Event{j.at("theta").get<double>()};
  } else if (kind == "phase2") {
    Phase2Event p2;
    if (j.contains("dynamic")) {
      p2.dynamic = true;
      p2.fn = fn_from_json(j.at("dynamic"));
      p2.record_as = j.value("record_as", "phi");
    } else {
      p2.phi = j.at("phi").get<double>();
    }
    e.body = p2;
  } else if (kind == "measure") {
    e.body = MeasureEvent{j.at("label").get<std::string>(),
                          j.at("angle").get<double>()};
  } else if (kind == "feedforward") {
    FeedforwardEvent f;
    f.target_bin = j.at("target_bin").get<int>();
    const std::string q = j.at("quadrature").get<std::string>();
    if (q != "x" && q != "p")
      throw std::invalid_argument("feedforward quadrature must be 'x' or 'p'");
    f.quadrature = q[0];
    f.fn = fn_from_json(j.at("fn"));
    e.body = f;
  } else {
    throw std::invalid_argument("unknown event kind '" + kind + "'");
  }
  return e;
}

}  // namespace

bool ControlProgram::is_gaussian() const {
  for (const AncillaSlot& a : ancilla_schedule)
    if (a.kind == AncillaKind::Cubic) return false;
  for (const Event& e : events) {
    if (const auto* p2 = std::get_if<Phase2Event>(&e.body)) {
      if (p2->dynamic && !is_affine(p2->fn)) return false;
    } else if (const auto* f = std::get_if<FeedforwardEvent>(&e.body)) {
      if (!is_affine(f->fn)) return false;
    }
  }
  return true;
}

int ControlProgram::last_tick() const {
  int last = 0;
  for (const Event& e : events) last = std::max(last, e.tick);
  return last;
}

Json ControlProgram::to_json() const {
  Json j;
  j["format"] = "cvloop-program/1";
  j["tau_prime"] = tau_prime;
  j["n"] = n_inputs;
  j["m"] = n_ancillas;
  Json schedule = Json::array();
  for (const AncillaSlot& a : ancilla_schedule) {
    Json slot;
    slot["bin"] = a.bin;
    slot["kind"] = a.kind == AncillaKind::Squeezed ? "squeezed" : "cubic";
    if (a.kind == AncillaKind::Cubic) slot["gamma"] = a.gamma;
    schedule.push_back(slot);
  }
  j["ancilla_schedule"] = schedule;
  Json events_json = Json::array();
  for (const Event& e : events) events_json.push_back(event_to_json(e));
  j["events"] = events_json;
  return j;
}

ControlProgram ControlProgram::from_json(const Json& j) {
  if (j.value("format", "") != "cvloop-program/1")
    throw std::invalid_argument("not a cvloop-program/1 document");
  ControlProgram p;
  p.tau_prime = j.at("tau_prime").get<int>();
  p.n_inputs = j.at("n").get<int>();
  p.n_ancillas = j.at("m").get<int>();
  for (const Json& slot : j.at("ancilla_schedule")) {
    AncillaSlot a;
    a.bin = slot.at("bin").get<int>();
    const std::string kind = slot.at("kind").get<std::string>();
    if (kind == "squeezed") {
      a.kind = AncillaKind::Squeezed;
    } else if (kind == "cubic") {
      a.kind = AncillaKind::Cubic;
      a.gamma = slot.at("gamma").get<double>();
    } else {
      throw std::invalid_argument("unknown ancilla kind '" + kind + "'");
    }
    p.ancilla_schedule.push_back(a);
  }
  for (const Json& ej : j.at("events")) p.events.push_back(event_from_json(ej));
  return p;
}

// --- validation -----------------------------------------------------------------

ValidationReport validate(const ControlProgram& program) {
  ValidationReport report;
  auto add = [&](int tick, const std::string& rule, const std::string& message) {
    report.ok = false;
    report.violations.push_back({tick, rule, message});
  };

  const int n = program.n_inputs;
  const int m = program.n_ancillas;
  if (program.tau_prime < n + m)
    add(-1, "outer-loop-capacity",
        "tau_prime = " + std::to_string(program.tau_prime) +
            " cannot hold n + m = " + std::to_string(n + m) + " pulses");
  if (static_cast<int>(program.ancilla_schedule.size()) != m)
    add(-1, "ancilla-schedule", "schedule length does not match m");
  bool has_cubic = false;
  for (const AncillaSlot& a : program.ancilla_schedule)
    if (a.kind == AncillaKind::Cubic) has_cubic = true;
  if (!has_cubic && m > n)
    add(-1, "ancilla-budget", "Gaussian program with m > n ancilla pulses");

  // Per-tick structure.
  std::map<int, int> vbs_count, switch1_count;
  std::map<int, bool> detector_at_tick;
  for (const Event& e : program.events) {
    if (std::holds_alternative<VbsEvent>(e.body)) vbs_count[e.tick]++;
    if (std::holds_alternative<Switch1Event>(e.body)) switch1_count[e.tick]++;
    if (const auto* s2 = std::get_if<Switch2Event>(&e.body))
      if (s2->route == Switch2Route::ToDetector) detector_at_tick[e.tick] = true;
  }
  for (const auto& [tick, count] : vbs_count)
    if (count > 1) add(tick, "vbs-conflict", "more than one VBS setting in one tick");
  for (const auto& [tick, count] : switch1_count)
    if (count > 1)
      add(tick, "switch1-conflict", "more than one switch-1 action in one tick");

  std::map<std::string, int> measure_tick;
  for (const Event& e : program.events) {
    if (const auto* meas = std::get_if<MeasureEvent>(&e.body)) {
      if (!detector_at_tick.count(e.tick))
        add(e.tick, "measure-switch",
            "measurement without switch2 to_detector at the same tick");
      measure_tick[meas->label] = e.tick;
    }
  }
  // Dynamic phases register recorded labels at their tick.
  std::map<std::string, int> phase_tick;
  for (const Event& e : program.events)
    if (const auto* p2 = std::get_if<Phase2Event>(&e.body))
      if (p2->dynamic) phase_tick[p2->record_as] = e.tick;

  auto check_sources = [&](int tick, const ControlFn& fn, const char* rule) {
    for (const std::string& label : referenced_labels(fn)) {
      int source_tick;
      if (measure_tick.count(label)) source_tick = measure_tick[label];
      else if (phase_tick.count(label)) source_tick = phase_tick[label];
      else {
        add(tick, "unknown-label", "references unrecorded label '" + label + "'");
        continue;
      }
      if (tick < source_tick + 1)
        add(tick, rule,
            "uses label '" + label + "' recorded at tick " +
                std::to_string(source_tick) + " without the one-tick delay");
    }
  };
  for (const Event& e : program.events) {
    if (const auto* f = std::get_if<FeedforwardEvent>(&e.body))
      check_sources(e.tick, f->fn, "feedforward-delay");
    else if (const auto* p2 = std::get_if<Phase2Event>(&e.body))
      if (p2->dynamic) check_sources(e.tick, p2->fn, "dynamic-phase-delay");
  }
  return report;
}

// --- circuit IR -----------------------------------------------------------------

bool CircuitIR::has_cubic() const {
  for (const Instruction& inst : instructions)
    if (std::holds_alternative<CubicPhaseGate>(inst)) return true;
  return false;
}

Json CircuitIR::to_json() const {
  Json j;
  j["format"] = "cvloop-circuit/1";
  j["n_inputs"] = n_inputs;
  Json list = Json::array();
  for (const Instruction& inst : instructions) {
    Json g;
    if (const auto* r = std::get_if<RotationGate>(&inst)) {
      g["op"] = "rotation";
      g["mode"] = r->mode;
      g["theta"] = r->theta;
    } else if (const auto* s = std::get_if<SqueezeGate>(&inst)) {
      g["op"] = "squeeze";
      g["mode"] = s->mode;
      g["r"] = s->r;
    } else if (const auto* b = std::get_if<BeamSplitterGate>(&inst)) {
      g["op"] = "beamsplitter";
      g["i"] = b->mode_i;
      g["j"] = b->mode_j;
      g["T"] = b->transmissivity;
      g["phase"] = b->phase;
    } else if (const auto* d = std::get_if<DisplaceGate>(&inst)) {
      g["op"] = "displace";
      g["mode"] = d->mode;
      g["dx"] = d->dx;
      g["dp"] = d->dp;
    } else {
      const auto& c = std::get<CubicPhaseGate>(inst);
      g["op"] = "cubic";
      g["mode"] = c.mode;
      g["gamma"] = c.gamma;
    }
    list.push_back(g);
  }
  j["instructions"] = list;
  return j;
}

CircuitIR CircuitIR::from_json(const Json& j) {
  if (j.value("format", "") != "cvloop-circuit/1")
    throw std::invalid_argument("not a cvloop-circuit/1 document");
  CircuitIR c;
  c.n_inputs = j.at("n_inputs").get<int>();
  if (c.n_inputs < 1) throw std::invalid_argument("n_inputs must be positive");
  for (const Json& g : j.at("instructions")) {
    const std::string op = g.at("op").get<std::string>();
    auto mode_in_range = [&](int mode) {
      if (mode < 0 || mode >= c.n_inputs)
        throw std::invalid_argument("instruction mode out of range");
      return mode;
    };
    if (op == "rotation") {
      c.instructions.push_back(RotationGate{mode_in_range(g.at("mode").get<int>()),
                                            g.at("theta").get<double>()});
    } else if (op == "squeeze") {
      const double r = g.at("r").get<double>();
      if (r < 0.0)
        throw std::invalid_argument(
            "squeeze r must be nonnegative (express the sign with rotations)");
      c.instructions.push_back(SqueezeGate{mode_in_range(g.at("mode").get<int>()), r});
    } else if (op == "beamsplitter") {
      BeamSplitterGate b;
      b.mode_i = mode_in_range(g.at("i").get<int>());
      b.mode_j = mode_in_range(g.at("j").get<int>());
      b.transmissivity = g.at("T").get<double>();
      if (b.transmissivity < 0.0 || b.transmissivity > 1.0)
        throw std::invalid_argument("beam splitter T must lie in [0, 1]");
      b.phase = g.value("phase", 0.0);
      c.instructions.push_back(b);
    } else if (op == "displace") {
      c.instructions.push_back(DisplaceGate{mode_in_range(g.at("mode").get<int>()),
                                            g.at("dx").get<double>(),
                                            g.at("dp").get<double>()});
    } else if (op == "cubic") {
      c.instructions.push_back(CubicPhaseGate{mode_in_range(g.at("mode").get<int>()),
                                              g.at("gamma").get<double>()});
    } else {
      throw std::invalid_argument("unknown instruction '" + op + "'");
    }
  }
  return c;
}

SymplecticOp circuit_to_symplectic(const CircuitIR& circuit) {
  const int n = circuit.n_inputs;
  SymplecticOp total = SymplecticOp::identity(n);
  for (const Instruction& inst : circuit.instructions) {
    if (const auto* r = std::get_if<RotationGate>(&inst)) {
      total = compose(make_rotation(n, r->mode, r->theta), total);
    } else if (const auto* s = std::get_if<SqueezeGate>(&inst)) {
      total = compose(make_squeeze(n, s->mode, s->r), total);
    } else if (const auto* b = std::get_if<BeamSplitterGate>(&inst)) {
      SymplecticOp op = make_beamsplitter(n, b->mode_j, b->mode_i, b->transmissivity);
      if (b->phase != 0.0) op = compose(op, make_rotation(n, b->mode_i, b->phase));
      total = compose(op, total);
    } else if (const auto* d = std::get_if<DisplaceGate>(&inst)) {
      Eigen::VectorXd disp = Eigen::VectorXd::Zero(2 * n);
      disp(d->mode) = d->dx;
      disp(n + d->mode) = d->dp;
      total = compose(make_displacement(n, disp), total);
    } else {
      throw std::invalid_argument("circuit contains a cubic phase gate");
    }
  }
  return total;
}

// --- shared JSON helpers ----------------------------------------------------------

Json state_to_json(const GaussianState& s) {
  Json j;
  j["n_modes"] = s.n_modes;
  j["mean"] = std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size());
  Json cov = Json::array();
  for (int i = 0; i < s.cov.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < s.cov.cols(); ++k) row.push_back(s.cov(i, k));
    cov.push_back(row);
  }
  j["cov"] = cov;
  if (s.has_unbounded()) {
    Json dirs = Json::array();
    for (int c = 0; c < s.unbounded.cols(); ++c) {
      Json col = Json::array();
      for (int i = 0; i < s.unbounded.rows(); ++i) col.push_back(s.unbounded(i, c));
      dirs.push_back(col);
    }
    j["unbounded"] = dirs;
  }
  return j;
}

GaussianState state_from_json(const Json& j) {
  GaussianState s;
  s.n_modes = j.at("n_modes").get<int>();
  const auto mean = j.at("mean").get<std::vector<double>>();
  if (static_cast<int>(mean.size()) != 2 * s.n_modes)
    throw std::invalid_argument("mean length must be 2 * n_modes");
  s.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), mean.size());
  const Json& cov = j.at("cov");
  if (static_cast<int>(cov.size()) != 2 * s.n_modes)
    throw std::invalid_argument("cov must be 2n x 2n");
  s.cov.resize(2 * s.n_modes, 2 * s.n_modes);
  for (int i = 0; i < 2 * s.n_modes; ++i) {
    if (static_cast<int>(cov[i].size()) != 2 * s.n_modes)
      throw std::invalid_argument("cov must be 2n x 2n");
    for (int k = 0; k < 2 * s.n_modes; ++k) s.cov(i, k) = cov[i][k].get<double>();
  }
  s.unbounded.resize(2 * s.n_modes, 0);
  if (j.contains("unbounded")) {
    const Json& dirs = j.at("unbounded");
    s.unbounded.resize(2 * s.n_modes, dirs.size());
    for (size_t c = 0; c < dirs.size(); ++c)
      for (int i = 0; i < 2 * s.n_modes; ++i)
        s.unbounded(i, c) = dirs[c][i].get<double>();
  }
  if (s.symmetry_error() > 1e-12)
    throw std::invalid_argument("covariance matrix is not symmetric");
  return s;
}

Json noise_to_json(const NoiseConfig& noise) {
  Json j;
  if (noise.ancilla_squeezing_db) j["ancilla_db"] = *noise.ancilla_squeezing_db;
  else j["ancilla_db"] = "ideal";
  j["eta_in"] = noise.eta_in;
  j["eta_out"] = noise.eta_out;
  j["detector_efficiency"] = noise.detector_efficiency;
  return j;
}

NoiseConfig noise_from_json(const Json& j) {
  NoiseConfig noise;
  if (j.contains("ancilla_db") && !j.at("ancilla_db").is_string())
    noise.ancilla_squeezing_db = j.at("ancilla_db").get<double>();
  noise.eta_in = j.value("eta_in", 1.0);
  noise.eta_out = j.value("eta_out", 1.0);
  noise.detector_efficiency = j.value("detector_efficiency", 1.0);
  noise.check();
  return noise;
}

}  // namespace cvloop
