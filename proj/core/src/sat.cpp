#include "topoveil/sat.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "topoveil/error.hpp"

namespace topoveil {

namespace {

// Internal literal: 2*(v-1) + sign, sign 1 = negative.
inline int to_ilit(Lit l) { return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1; }
inline int ivar(int il) { return il >> 1; }
inline int ineg(int il) { return il ^ 1; }

constexpr int kNoReason = -1;
constexpr std::int8_t kUndef = 0, kTrue = 1, kFalse = -1;

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

struct CdclSolver::Impl {
  struct Watcher {
    int cref;
    int blocker;
  };

  std::vector<std::vector<int>> clauses;
  std::vector<std::vector<Watcher>> watches;  // by literal: clauses watching it
  std::vector<std::int8_t> assigns;           // by var
  std::vector<int> level, reason;
  std::vector<char> polarity, seen;
  std::vector<double> activity;
  std::vector<int> trail, trail_lim;
  std::size_t qhead = 0;
  double var_inc = 1.0;
  bool ok = true;
  std::vector<std::int8_t> model;
  CdclStats stats;

  // Max-heap of variables keyed by activity.
  std::vector<int> heap, heap_pos;

  int nvars() const { return static_cast<int>(assigns.size()); }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  std::int8_t lit_value(int il) const {
    const std::int8_t v = assigns[ivar(il)];
    return (il & 1) ? static_cast<std::int8_t>(-v) : v;
  }

  bool heap_less(int a, int b) const { return activity[a] > activity[b]; }
  void heap_up(std::size_t i) {
    const int v = heap[i];
    while (i > 0) {
      const std::size_t p = (i - 1) / 2;
      if (!heap_less(v, heap[p])) break;
      heap[i] = heap[p];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = p;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_down(std::size_t i) {
    const int v = heap[i];
    for (;;) {
      std::size_t c = 2 * i + 1;
      if (c >= heap.size()) break;
      if (c + 1 < heap.size() && heap_less(heap[c + 1], heap[c])) ++c;
      if (!heap_less(heap[c], v)) break;
      heap[i] = heap[c];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = c;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_insert(int v) {
    if (heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }
  int heap_pop() {
    const int top = heap.front();
    heap_pos[top] = -1;
    const int last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_down(0);
    }
    return top;
  }

  void bump(int v) {
    if ((activity[v] += var_inc) > 1e100) {
      for (auto& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos[v]));
  }

  int add_var() {
    const int v = nvars();
    assigns.push_back(kUndef);
    level.push_back(0);
    reason.push_back(kNoReason);
    polarity.push_back(1);  // prefer false
    seen.push_back(0);
    activity.push_back(0.0);
    heap_pos.push_back(-1);
    watches.emplace_back();
    watches.emplace_back();
    heap_insert(v);
    return v;
  }

  void enqueue(int il, int from) {
    const int v = ivar(il);
    assigns[v] = (il & 1) ? kFalse : kTrue;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(il);
  }

  void attach(int cref) {
    const auto& c = clauses[cref];
    watches[c[0]].push_back({cref, c[1]});
    watches[c[1]].push_back({cref, c[0]});
  }

  int propagate() {
    int confl = kNoReason;
    while (qhead < trail.size()) {
      const int p = trail[qhead++];
      const int false_lit = ineg(p);
      auto& ws = watches[false_lit];
      ++stats.propagations;
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        const Watcher w = ws[i++];
        if (lit_value(w.blocker) == kTrue) {
          ws[j++] = w;
          continue;
        }
        auto& c = clauses[w.cref];
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        const int first = c[0];
        if (first != w.blocker && lit_value(first) == kTrue) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (lit_value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches[c[1]].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = {w.cref, first};
        if (lit_value(first) == kFalse) {
          confl = w.cref;
          qhead = trail.size();
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (confl != kNoReason) break;
    }
    return confl;
  }

  void cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    for (std::size_t c = trail.size(); c-- > static_cast<std::size_t>(trail_lim[lvl]);) {
      const int v = ivar(trail[c]);
      assigns[v] = kUndef;
      reason[v] = kNoReason;
      polarity[v] = static_cast<char>(trail[c] & 1);
      heap_insert(v);
    }
    trail.resize(trail_lim[lvl]);
    trail_lim.resize(lvl);
    qhead = trail.size();
  }

  void analyze(int confl, std::vector<int>& learnt, int& bt_level) {
    int path = 0;
    int p = -1;
    learnt.assign(1, -1);
    std::size_t idx = trail.size();
    do {
      const auto& c = clauses[confl];
      for (std::size_t j = (p == -1 ? 0 : 1); j < c.size(); ++j) {
        const int q = c[j];
        const int v = ivar(q);
        if (!seen[v] && level[v] > 0) {
          bump(v);
          seen[v] = 1;
          if (level[v] >= decision_level()) {
            ++path;
          } else {
            learnt.push_back(q);
          }
        }
      }
      while (!seen[ivar(trail[--idx])]) {
      }
      p = trail[idx];
      confl = reason[ivar(p)];
      seen[ivar(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = ineg(p);

    bt_level = 0;
    std::size_t max_i = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
      if (level[ivar(learnt[i])] > bt_level) {
        bt_level = level[ivar(learnt[i])];
        max_i = i;
      }
    }
    if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
    for (std::size_t i = 1; i < learnt.size(); ++i) seen[ivar(learnt[i])] = 0;
  }

  int pick_branch() {
    while (!heap.empty()) {
      const int v = heap_pop();
      if (assigns[v] == kUndef) return 2 * v + polarity[v];
    }
    return -1;
  }

  SatResult search(std::uint64_t budget, const std::vector<int>& assumptions) {
    std::uint64_t conflicts = 0;
    std::vector<int> learnt;
    for (;;) {
      const int confl = propagate();
      if (confl != kNoReason) {
        ++stats.conflicts;
        ++conflicts;
        if (decision_level() == 0) {
          ok = false;
          return SatResult::Unsat;
        }
        int bt = 0;
        analyze(confl, learnt, bt);
        cancel_until(bt);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoReason);
        } else {
          clauses.push_back(learnt);
          const int cref = static_cast<int>(clauses.size()) - 1;
          attach(cref);
          enqueue(learnt[0], cref);
        }
        var_inc /= 0.95;
        continue;
      }
      if (conflicts >= budget) {
        cancel_until(0);
        return SatResult::Unknown;
      }
      int next = -1;
      while (decision_level() < static_cast<int>(assumptions.size())) {
        const int a = assumptions[decision_level()];
        if (lit_value(a) == kTrue) {
          trail_lim.push_back(static_cast<int>(trail.size()));
        } else if (lit_value(a) == kFalse) {
          return SatResult::Unsat;
        } else {
          next = a;
          break;
        }
      }
      if (next == -1) {
        next = pick_branch();
        if (next == -1) {
          model = assigns;
          return SatResult::Sat;
        }
        ++stats.decisions;
      }
      trail_lim.push_back(static_cast<int>(trail.size()));
      enqueue(next, kNoReason);
    }
  }
};

CdclSolver::CdclSolver() : impl_(std::make_unique<Impl>()) {}
CdclSolver::~CdclSolver() = default;

int CdclSolver::new_var() { return impl_->add_var() + 1; }
int CdclSolver::num_vars() const { return impl_->nvars(); }
const CdclStats& CdclSolver::stats() const { return impl_->stats; }

void CdclSolver::add_clause(std::span<const Lit> clause) {
  Impl& s = *impl_;
  if (!s.ok) return;
  s.cancel_until(0);
  std::vector<int> c;
  for (Lit l : clause) {
    if (l == 0 || std::abs(l) > s.nvars()) throw Error(ErrorCode::ParseError, "literal out of range");
    c.push_back(to_ilit(l));
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  std::vector<int> kept;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i + 1 < c.size() && c[i + 1] == ineg(c[i])) return;  // tautology
    const auto v = s.lit_value(c[i]);
    if (v == kTrue) return;
    if (v == kUndef) kept.push_back(c[i]);
  }
  if (kept.empty()) {
    s.ok = false;
  } else if (kept.size() == 1) {
    s.enqueue(kept[0], kNoReason);
    if (s.propagate() != kNoReason) s.ok = false;
  } else {
    s.clauses.push_back(std::move(kept));
    s.attach(static_cast<int>(s.clauses.size()) - 1);
  }
}

SatResult CdclSolver::solve(std::span<const Lit> assumptions) {
  Impl& s = *impl_;
  s.model.clear();
  if (!s.ok) return SatResult::Unsat;
  std::vector<int> assume;
  for (Lit l : assumptions) assume.push_back(to_ilit(l));
  SatResult r = SatResult::Unknown;
  for (int restart = 0; r == SatResult::Unknown; ++restart) {
    r = s.search(static_cast<std::uint64_t>(luby(2, restart) * 100), assume);
    if (r == SatResult::Unknown) ++s.stats.restarts;
  }
  s.cancel_until(0);
  return r;
}

bool CdclSolver::value(int var) const {
  const auto& m = impl_->model;
  if (var < 1 || static_cast<std::size_t>(var) > m.size()) return false;
  return m[var - 1] == kTrue;
}

// --- external engine -------------------------------------------------------

DimacsEngine::DimacsEngine(std::string command) : command_(std::move(command)) {}

void DimacsEngine::add_clause(std::span<const Lit> clause) {
  for (Lit l : clause) {
    if (l == 0 || std::abs(l) > vars_) throw Error(ErrorCode::ParseError, "literal out of range");
  }
  clauses_.emplace_back(clause.begin(), clause.end());
}

SatResult DimacsEngine::solve(std::span<const Lit> assumptions) {
  static std::atomic<unsigned> counter{0};
  const auto path = std::filesystem::temp_directory_path() /
                    ("topoveil-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".cnf");
  {
    Dimacs d{vars_, clauses_, {}};
    for (Lit a : assumptions) d.clauses.push_back({a});
    std::ofstream f(path);
    f << write_dimacs(d);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  const std::string cmd = command_ + " '" + path.string() + "'";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    std::filesystem::remove(path);
    throw Error(ErrorCode::Io, "cannot run " + command_);
  }
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  ::pclose(pipe);
  std::filesystem::remove(path);

  model_.assign(static_cast<std::size_t>(vars_), 0);
  SatResult r = SatResult::Unknown;
  std::istringstream is(out);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos) {
        r = SatResult::Unsat;
      } else if (line.find("SATISFIABLE") != std::string::npos) {
        r = SatResult::Sat;
      }
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream ls(line.substr(2));
      long lit = 0;
      while (ls >> lit) {
        if (lit != 0 && std::labs(lit) <= vars_) model_[std::labs(lit) - 1] = lit > 0 ? 1 : -1;
      }
    }
  }
  if (r == SatResult::Unknown) throw Error(ErrorCode::Io, "external solver gave no answer: " + command_);
  return r;
}

bool DimacsEngine::value(int var) const {
  return var >= 1 && static_cast<std::size_t>(var) <= model_.size() && model_[var - 1] > 0;
}

std::unique_ptr<Engine> make_engine(std::string_view spec) {
  if (spec == "cdcl") return std::make_unique<CdclSolver>();
  if (spec.rfind("dimacs:", 0) == 0 && spec.size() > 7) {
    return std::make_unique<DimacsEngine>(std::string(spec.substr(7)));
  }
  throw Error(ErrorCode::ParseError, "unknown engine '" + std::string(spec) + "'");
}

std::string write_dimacs(const Dimacs& cnf) {
  std::ostringstream os;
  for (const auto& c : cnf.comments) os << "c " << c << '\n';
  os << "p cnf " << cnf.vars << ' ' << cnf.clauses.size() << '\n';
  for (const auto& c : cnf.clauses) {
    for (Lit l : c) os << l << ' ';
    os << "0\n";
  }
  return os.str();
}

Dimacs parse_dimacs(std::string_view text) {
  Dimacs d;
  std::istringstream is{std::string(text)};
  std::string line;
  bool header = false;
  std::size_t declared = 0;
  std::vector<Lit> cur;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == 'c') {
      d.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    if (line[0] == 'p') {
      std::istringstream ls(line);
      std::string p, fmt;
      if (!(ls >> p >> fmt >> d.vars >> declared) || fmt != "cnf" || d.vars < 0) {
        throw Error(ErrorCode::ParseError, "bad DIMACS header: " + line);
      }
      header = true;
      continue;
    }
    if (!header) throw Error(ErrorCode::ParseError, "DIMACS clause before header");
    std::istringstream ls(line);
    long lit = 0;
    while (ls >> lit) {
      if (lit == 0) {
        d.clauses.push_back(std::move(cur));
        cur.clear();
      } else {
        if (std::labs(lit) > d.vars) throw Error(ErrorCode::ParseError, "DIMACS literal out of range");
        cur.push_back(static_cast<Lit>(lit));
      }
    }
    if (!ls.eof()) throw Error(ErrorCode::ParseError, "DIMACS: bad token in " + line);
  }
  if (!header) throw Error(ErrorCode::ParseError, "DIMACS: missing header");
  if (!cur.empty()) d.clauses.push_back(std::move(cur));
  if (d.clauses.size() != declared) throw Error(ErrorCode::ParseError, "DIMACS: clause count mismatch");
  return d;
}

std::string competition_output(SatResult r, const Engine& e) {
  if (r == SatResult::Unsat) return "s UNSATISFIABLE\n";
  if (r != SatResult::Sat) return "s UNKNOWN\n";
  std::ostringstream os;
  os << "s SATISFIABLE\nv";
  for (int v = 1; v <= e.num_vars(); ++v) os << ' ' << (e.value(v) ? v : -v);
  os << " 0\n";
  return os.str();
}

}  // namespace topoveil
