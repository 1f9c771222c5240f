#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topoveil {

/// DIMACS-style literal: +v or -v for variable v >= 1.
using Lit = int;

enum class SatResult { Sat, Unsat, Unknown };

/// Incremental satisfiability engine. Clauses may be added between solves;
/// assumptions hold for one solve only.
class Engine {
 public:
  virtual ~Engine() = default;
  virtual std::string_view name() const = 0;
  virtual int new_var() = 0;
  virtual int num_vars() const = 0;
  virtual void add_clause(std::span<const Lit> clause) = 0;
  virtual SatResult solve(std::span<const Lit> assumptions = {}) = 0;
  /// Model value after a Sat answer.
  virtual bool value(int var) const = 0;
};

struct CdclStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
};

/// Conflict-driven clause learning: two watched literals, first-UIP
/// learning, VSIDS with phase saving, Luby restarts.
class CdclSolver final : public Engine {
 public:
  CdclSolver();
  ~CdclSolver() override;
  CdclSolver(const CdclSolver&) = delete;
  CdclSolver& operator=(const CdclSolver&) = delete;

  std::string_view name() const override { return "cdcl"; }
  int new_var() override;
  int num_vars() const override;
  void add_clause(std::span<const Lit> clause) override;
  SatResult solve(std::span<const Lit> assumptions = {}) override;
  bool value(int var) const override;

  const CdclStats& stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs an external solver on a DIMACS file per solve. The command gets the
/// file path appended and must print SAT-competition output ("s ..." and
/// "v ..." lines). Assumptions are written as unit clauses.
class DimacsEngine final : public Engine {
 public:
  explicit DimacsEngine(std::string command);

  std::string_view name() const override { return "dimacs"; }
  int new_var() override { return ++vars_; }
  int num_vars() const override { return vars_; }
  void add_clause(std::span<const Lit> clause) override;
  SatResult solve(std::span<const Lit> assumptions = {}) override;
  bool value(int var) const override;

 private:
  std::string command_;
  int vars_ = 0;
  std::vector<std::vector<Lit>> clauses_;
  std::vector<std::int8_t> model_;
};

/// "cdcl" or "dimacs:<command>". Throws ParseError otherwise.
std::unique_ptr<Engine> make_engine(std::string_view spec);

struct Dimacs {
  int vars = 0;
  std::vector<std::vector<Lit>> clauses;
  std::vector<std::string> comments;
};

std::string write_dimacs(const Dimacs& cnf);
Dimacs parse_dimacs(std::string_view text);

/// SAT-competition output for a solved instance: "s SATISFIABLE" plus "v"
/// lines, or "s UNSATISFIABLE".
std::string competition_output(SatResult r, const Engine& e);

}  // namespace topoveil
