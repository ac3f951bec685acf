#pragma once

// Labeled synthetic sessions: several developer tasks interleaved in one
// change log, with the generating task as ground truth.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "untangle/error.hpp"
#include "untangle/event_model.hpp"
#include "untangle/random.hpp"

namespace untangle {

struct IntRange {
  long long lo = 0;
  long long hi = 0;
};

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct SynthConfig {
  std::size_t numTasks = 3;
  IntRange changesPerTask{5, 15};
  std::size_t classPoolPerTask = 3;
  double classOverlap = 0.0;  // fraction of each task's classes drawn from a shared pool
  double interleaveProb = 0.1;  // chance the next change switches task
  RealRange intraTaskGapSeconds{10.0, 120.0};
  RealRange interTaskGapSeconds{1800.0, 7200.0};
  double testRunProb = 0.2;
  std::uint64_t seed = 1;
  std::string developerId = "dev1";
  double startTime = 1700000000.0;
  std::string idPrefix;

  void validate() const {
    auto prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(name) + " must lie in [0,1]");
    };
    if (numTasks < 1) throw ValidationError("numTasks must be at least 1");
    if (changesPerTask.lo < 1 || changesPerTask.hi < changesPerTask.lo)
      throw ValidationError("changesPerTask must be a non-empty range of positive counts");
    if (classPoolPerTask < 1) throw ValidationError("classPoolPerTask must be at least 1");
    prob(classOverlap, "classOverlap");
    prob(interleaveProb, "interleaveProb");
    prob(testRunProb, "testRunProb");
    for (const auto* r : {&intraTaskGapSeconds, &interTaskGapSeconds}) {
      if (!(r->lo > 0.0) || r->hi < r->lo) throw ValidationError("gap ranges must be positive and non-empty");
    }
    if (developerId.empty()) throw ValidationError("developerId must not be empty");
    if (!std::isfinite(startTime)) throw ValidationError("startTime must be finite");
  }
};

namespace synth_detail {

inline constexpr std::array<std::string_view, 24> kAdjectives{
    "Abstract", "Basic", "Cached", "Default", "Remote", "Local", "Lazy", "Shared", "Simple", "Smart", "Sorted", "Static",
    "Async", "Binary", "Compact", "Dynamic", "Global", "Inline", "Linked", "Mutable", "Nested", "Ordered", "Plain", "Timed"};
inline constexpr std::array<std::string_view, 24> kNouns{
    "Account", "Browser", "Buffer", "Cache", "Canvas", "Client", "Codec", "Editor", "Event", "Filter", "Graph", "Index",
    "Ledger", "Matrix", "Parser", "Query", "Record", "Renderer", "Report", "Scanner", "Session", "Shape", "Table", "Widget"};
inline constexpr std::array<std::string_view, 20> kVerbs{
    "compute", "update", "reset", "build", "render", "parse", "load", "store", "find", "remove",
    "register", "validate", "refresh", "collect", "apply", "handle", "print", "merge", "select", "notify"};
inline constexpr std::array<std::string_view, 20> kTopics{
    "Total", "Items", "Cache", "Layout", "Bounds", "Name", "Value", "State", "Limit", "Count",
    "Children", "Parent", "Style", "Cursor", "Buffer", "Index", "Entries", "Header", "Result", "Options"};
inline constexpr std::array<std::string_view, 18> kIvars{
    "count", "items", "cache", "name", "owner", "bounds", "state", "limit", "buffer",
    "parent", "children", "cursor", "style", "index", "entries", "header", "result", "options"};
inline constexpr std::array<std::string_view, 10> kLibrarySelectors{
    "size", "isEmpty", "add:", "printString", "value", "includes:", "first", "copy", "yourself", "notEmpty"};

inline std::string lower_first(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  return out;
}

struct MethodPlan {
  std::string selector;
  std::string arg;  // keyword methods take one argument
  std::vector<std::string> temps;
  std::vector<std::string> statements;
  int style = 0;

  std::string render() const {
    std::string header = arg.empty() ? selector : selector + " " + arg;
    std::string temp_decl;
    if (!temps.empty()) {
      temp_decl = "|";
      for (const auto& t : temps) temp_decl += " " + t;
      temp_decl += " |";
    }
    std::string out = header;
    switch (style % 3) {
      case 0:
        if (!temp_decl.empty()) out += "\n\t" + temp_decl;
        for (std::size_t i = 0; i < statements.size(); ++i) out += (i == 0 ? "\n\t" : ".\n\t") + statements[i];
        break;
      case 1:
        if (!temp_decl.empty()) out += " " + temp_decl;
        for (std::size_t i = 0; i < statements.size(); ++i) out += (i == 0 ? " " : ". ") + statements[i];
        break;
      default:
        out += "\n\t\"" + selector + " rewritten\"";
        if (!temp_decl.empty()) out += "\n\n\t" + temp_decl;
        for (std::size_t i = 0; i < statements.size(); ++i) out += (i == 0 ? "\n\n\t" : " .\n\t") + statements[i];
        out += ".";
        break;
    }
    return out;
  }
};

struct ClassState {
  std::string name;
  std::string package;
  std::vector<std::string> ivars;
  std::vector<MethodPlan> methods;
};

class World {
 public:
  World(const SynthConfig& cfg, Rng& rng) : cfg_(cfg), rng_(rng) {
    for (auto a : kAdjectives)
      for (auto n : kNouns) name_pool_.push_back(std::string(a) + std::string(n));
    rng_.shuffle(std::span<std::string>(name_pool_));

    const auto shared = static_cast<std::size_t>(std::llround(cfg.classOverlap * static_cast<double>(cfg.classPoolPerTask)));
    std::vector<std::size_t> shared_ids;
    for (std::size_t s = 0; s < shared; ++s) shared_ids.push_back(new_class("Shared-Kernel"));
    task_classes_.resize(cfg.numTasks);
    for (std::size_t t = 0; t < cfg.numTasks; ++t) {
      task_packages_.push_back(std::string(kNouns[(t * 7 + rng_.below(kNouns.size())) % kNouns.size()]) + "-Task" +
                               std::to_string(t + 1));
      task_classes_[t] = shared_ids;
      for (std::size_t k = shared; k < cfg.classPoolPerTask; ++k) task_classes_[t].push_back(new_class(task_packages_[t]));
    }
  }

  ChangeEvent next_change(std::size_t task) {
    ChangeEvent e;
    e.developerId = cfg_.developerId;
    const double roll = rng_.uniform01();
    if (roll < 0.05) {
      const std::size_t id = new_class(task_packages_[task]);
      task_classes_[task].push_back(id);
      const ClassState& cls = classes_[id];
      e.kind = ChangeKind::ClassAdded;
      e.packageName = cls.package;
      e.className = cls.name;
      e.instanceVarsAfter = cls.ivars;
      return e;
    }
    ClassState& cls = classes_[task_classes_[task][rng_.below(task_classes_[task].size())]];
    e.packageName = cls.package;
    e.className = cls.name;
    if (roll < 0.13) {
      e.kind = ChangeKind::ClassModified;
      e.instanceVarsBefore = cls.ivars;
      if (cls.ivars.size() > 2 && rng_.bernoulli(0.25)) {
        cls.ivars.erase(cls.ivars.begin() + static_cast<std::ptrdiff_t>(rng_.below(cls.ivars.size())));
      } else {
        add_ivar(cls);
      }
      e.instanceVarsAfter = cls.ivars;
      return e;
    }
    const double action = rng_.uniform01();
    if (cls.methods.empty() || action < 0.3) {
      MethodPlan plan = new_method(cls, task);
      e.kind = ChangeKind::MethodAdded;
      e.selector = plan.selector;
      e.sourceAfter = plan.render();
      cls.methods.push_back(std::move(plan));
      return e;
    }
    const std::size_t m = rng_.below(cls.methods.size());
    MethodPlan& plan = cls.methods[m];
    e.selector = plan.selector;
    e.sourceBefore = plan.render();
    if (cls.methods.size() > 1 && action < 0.35) {
      e.kind = ChangeKind::MethodRemoved;
      cls.methods.erase(cls.methods.begin() + static_cast<std::ptrdiff_t>(m));
      return e;
    }
    e.kind = ChangeKind::MethodModified;
    if (action < 0.5) {
      plan.style += 1 + static_cast<int>(rng_.below(2));  // reformat only
    } else {
      rewrite_body(plan, cls, task);
    }
    e.sourceAfter = plan.render();
    if (e.sourceAfter == e.sourceBefore) plan.style += 1, e.sourceAfter = plan.render();
    return e;
  }

  const std::string& package_of(std::size_t task) const { return task_packages_[task]; }

 private:
  std::string fresh_name() {
    if (next_name_ < name_pool_.size()) return name_pool_[next_name_++];
    const std::size_t n = next_name_++;
    return name_pool_[n % name_pool_.size()] + std::to_string(n / name_pool_.size());
  }

  void add_ivar(ClassState& cls) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::string v(kIvars[rng_.below(kIvars.size())]);
      if (std::find(cls.ivars.begin(), cls.ivars.end(), v) == cls.ivars.end()) {
        cls.ivars.push_back(std::move(v));
        return;
      }
    }
    cls.ivars.push_back("slot" + std::to_string(cls.ivars.size() + 1));
  }

  std::size_t new_class(const std::string& package) {
    ClassState cls;
    cls.name = fresh_name();
    cls.package = package;
    const std::size_t ivars = 1 + rng_.below(3);
    for (std::size_t i = 0; i < ivars; ++i) add_ivar(cls);
    classes_.push_back(std::move(cls));
    return classes_.size() - 1;
  }

  // Selectors the task's code may call: methods of the task's classes.
  std::vector<std::string> task_selectors(std::size_t task) const {
    std::vector<std::string> out;
    for (std::size_t id : task_classes_[task])
      for (const auto& m : classes_[id].methods) out.push_back(m.selector);
    return out;
  }

  std::string send(const std::string& receiver, const std::string& selector, const std::string& arg) const {
    if (selector.back() == ':') return receiver + " " + selector + " " + arg;
    return receiver + " " + selector;
  }

  std::string operand(const ClassState& cls, const MethodPlan& plan) {
    const double r = rng_.uniform01();
    if (r < 0.55 && !cls.ivars.empty()) return cls.ivars[rng_.below(cls.ivars.size())];
    if (r < 0.7 && !plan.arg.empty()) return plan.arg;
    if (r < 0.8 && !plan.temps.empty()) return plan.temps.front();
    return std::to_string(rng_.below(10));
  }

  std::string pick_selector(std::size_t task) {
    auto own = task_selectors(task);
    if (!own.empty() && rng_.bernoulli(0.7)) return own[rng_.below(own.size())];
    return std::string(kLibrarySelectors[rng_.below(kLibrarySelectors.size())]);
  }

  std::string statement(const ClassState& cls, const MethodPlan& plan, std::size_t task) {
    const std::string target = cls.ivars[rng_.below(cls.ivars.size())];
    switch (rng_.below(5)) {
      case 0: return target + " := " + operand(cls, plan) + " + " + operand(cls, plan);
      case 1: return send("self", pick_selector(task), operand(cls, plan));
      case 2: return target + " isNil ifTrue: [" + target + " := " + send("self", pick_selector(task), "0") + "]";
      case 3: return target + " := " + send(operand(cls, plan), pick_selector(task), operand(cls, plan));
      default:
        return target + " do: [:each | " + send("self", pick_selector(task), "each") + "]";
    }
  }

  void rewrite_body(MethodPlan& plan, const ClassState& cls, std::size_t task) {
    plan.temps.clear();
    plan.statements.clear();
    if (rng_.bernoulli(0.3)) plan.temps.push_back("tmp");
    const std::size_t count = 1 + rng_.below(3);
    for (std::size_t i = 0; i < count; ++i) plan.statements.push_back(statement(cls, plan, task));
    if (!plan.temps.empty()) plan.statements.insert(plan.statements.begin(), "tmp := " + operand(cls, plan));
    plan.statements.push_back("^ " + (rng_.bernoulli(0.5) ? operand(cls, plan) : std::string("self")));
  }

  MethodPlan new_method(const ClassState& cls, std::size_t task) {
    MethodPlan plan;
    plan.style = static_cast<int>(rng_.below(3));
    for (int attempt = 0;; ++attempt) {
      std::string sel = std::string(kVerbs[rng_.below(kVerbs.size())]) + std::string(kTopics[rng_.below(kTopics.size())]);
      const bool keyword = rng_.bernoulli(0.3);
      if (keyword) sel += ":";
      if (attempt > 16) sel = "helper" + std::to_string(cls.methods.size() + 1) + (keyword ? ":" : "");
      const bool taken = std::any_of(cls.methods.begin(), cls.methods.end(),
                                     [&](const MethodPlan& m) { return m.selector == sel; });
      if (!taken) {
        plan.selector = sel;
        if (keyword) plan.arg = rng_.bernoulli(0.5) ? "aValue" : "anObject";
        break;
      }
    }
    rewrite_body(plan, cls, task);
    return plan;
  }

  const SynthConfig& cfg_;
  Rng& rng_;
  std::vector<std::string> name_pool_;
  std::size_t next_name_ = 0;
  std::vector<ClassState> classes_;
  std::vector<std::vector<std::size_t>> task_classes_;
  std::vector<std::string> task_packages_;
};

inline std::string numbered(const std::string& prefix, char kind, std::size_t n) {
  std::string digits = std::to_string(n);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return prefix + kind + digits;
}

}  // namespace synth_detail

struct SyntheticSession {
  SessionLog log;
  Clustering truth;
};

/// Deterministic in `cfg` (including its seed). Each change is labeled with
/// the task that generated it; cluster ids are "task-1", "task-2", ...
inline SyntheticSession generate_synthetic_session(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  synth_detail::World world(cfg, rng);

  std::vector<long long> remaining(cfg.numTasks);
  for (auto& r : remaining) r = rng.between(cfg.changesPerTask.lo, cfg.changesPerTask.hi);

  SyntheticSession out;
  out.log.developerId = cfg.developerId;
  double now = cfg.startTime;
  std::size_t task = rng.below(cfg.numTasks);
  std::size_t changes = 0;
  std::size_t tests = 0;
  bool first = true;
  for (;;) {
    std::vector<std::size_t> open;
    for (std::size_t t = 0; t < cfg.numTasks; ++t)
      if (remaining[t] > 0) open.push_back(t);
    if (open.empty()) break;
    const std::size_t previous = task;
    const bool has_other = open.size() > 1 || open.front() != task;
    if (remaining[task] == 0 || (has_other && rng.bernoulli(cfg.interleaveProb))) {
      std::vector<std::size_t> others;
      for (std::size_t t : open)
        if (t != task) others.push_back(t);
      task = others[rng.below(others.size())];
    }
    if (!first) {
      const RealRange& gap = task == previous ? cfg.intraTaskGapSeconds : cfg.interTaskGapSeconds;
      now += rng.uniform(gap.lo, gap.hi);
    }
    first = false;

    ChangeEvent e = world.next_change(task);
    e.id = synth_detail::numbered(cfg.idPrefix, 'c', ++changes);
    e.timestamp = now;
    out.truth.assign(e.id, "task-" + std::to_string(task + 1));
    out.log.entries.emplace_back(std::move(e));
    --remaining[task];

    if (rng.bernoulli(cfg.testRunProb)) {
      TestRunEvent run;
      run.id = synth_detail::numbered(cfg.idPrefix, 't', ++tests);
      run.timestamp = now;
      run.testSuiteId = world.package_of(task) + "-Tests";
      const double r = rng.uniform01();
      run.outcome = r < 0.7 ? TestOutcome::Pass : (r < 0.9 ? TestOutcome::Fail : TestOutcome::Error);
      out.log.entries.emplace_back(std::move(run));
    }
  }
  validate_session(out.log);
  return out;
}

}  // namespace untangle
