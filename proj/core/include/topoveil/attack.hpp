#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topoveil/bitstring.hpp"
#include "topoveil/netlist.hpp"
#include "topoveil/obnocs.hpp"
#include "topoveil/potent.hpp"
#include "topoveil/simulate.hpp"

namespace topoveil {

enum class OracleKind { Exact, Behavioral };
std::string_view to_string(OracleKind k);

/// Black-box access to the activated design. Inputs and outputs follow the
/// combinational frame of the locked netlist with the key port removed.
/// Queries are thread-safe and counted exactly.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual OracleKind kind() const = 0;
  BitString query(const BitString& inputs);
  /// True iff the oracle would accept this I/O trace as correct behavior.
  virtual bool accepts(const std::vector<BitString>& inputs, const std::vector<BitString>& outputs) = 0;
  std::uint64_t queries() const noexcept { return queries_.load(); }

 protected:
  virtual BitString answer(const BitString& inputs) = 0;

 private:
  std::atomic<std::uint64_t> queries_{0};
};

/// Evaluates the locked netlist under the correct key.
class ExactOracle final : public Oracle {
 public:
  ExactOracle(const Netlist& locked, const BitString& key);
  OracleKind kind() const override { return OracleKind::Exact; }
  bool accepts(const std::vector<BitString>& inputs, const std::vector<BitString>& outputs) override;

 protected:
  BitString answer(const BitString& inputs) override;

 private:
  Simulator sim_;
};

/// Functional validation that cannot tell legal topologies apart: it accepts
/// any trace some legal key produces, and answers queries from one seeded
/// representative legal key (not the intended one when an alternative
/// exists).
class BehavioralOracle final : public Oracle {
 public:
  BehavioralOracle(const Netlist& locked, std::vector<BitString> legal_keys, const BitString& intended,
                   std::uint64_t seed);
  OracleKind kind() const override { return OracleKind::Behavioral; }
  bool accepts(const std::vector<BitString>& inputs, const std::vector<BitString>& outputs) override;
  const BitString& representative() const noexcept { return representative_; }

 protected:
  BitString answer(const BitString& inputs) override;

 private:
  std::vector<Simulator> legal_;
  BitString representative_;
  std::size_t rep_index_ = 0;
  std::mutex mu_;
  std::map<BitString, std::vector<BitString>> cache_;  // input -> outputs per legal key
};

enum class Verdict { FunctionalEquivalent, LegalAlternate, Failed };
std::string_view to_string(Verdict v);

/// What the designer knows: the correct key and the key-to-topology map.
struct GroundTruth {
  BitString correct_key;
  std::function<TopologyClass(const BitString&)> classify;
  std::function<std::uint64_t(const BitString&)> phi_digest;
};

GroundTruth obnocs_ground_truth(const ObfuscatedDesign& d, const BitString& activation_package);
GroundTruth potent_ground_truth(const KeyedSystem& sys);

/// FunctionalEquivalent if the key's I/O behavior matches the correct key's
/// (or it induces the intended topology); LegalAlternate if its image is
/// legal; Failed otherwise.
Verdict verdict(const BitString& key, const Netlist& locked, const GroundTruth& gt,
                const EquivalenceOptions& eq = {});

struct AttackOptions {
  std::uint64_t budget = 1024;  // maximum DIPs
  std::string engine = "cdcl";
  std::uint64_t seed = 0;
};

struct AttackResult {
  BitString recovered_key;
  std::uint64_t dip_count = 0;
  std::uint64_t oracle_queries = 0;
  std::chrono::microseconds wall_time{0};
  std::optional<Verdict> verdict;  // filled in post hoc by evaluate()
  std::uint64_t phi_digest = 0;
  std::uint64_t seed = 0;
  std::vector<BitString> dips;
  std::vector<BitString> consistent_keys;  // brute force only
};

/// Oracle-guided DIP loop on the combinational frame of `locked`. Throws
/// BudgetExhausted, UnsatFromStart, or SchemaError when there is no key.
AttackResult sat_attack(const Netlist& locked, Oracle& oracle, const AttackOptions& opts = {});

struct BruteForceOptions {
  std::size_t max_key_bits = 24;
  /// Non-key inputs up to this count are tested exhaustively, otherwise
  /// `samples` seeded vectors are used.
  std::size_t exhaustive_inputs = 12;
  std::size_t samples = 256;
  std::uint64_t seed = 0;
};

/// Every key whose trace over the test vectors the oracle accepts. The
/// recovered key is the lowest consistent key. Throws KeyspaceTooLarge.
AttackResult brute_force_attack(const Netlist& locked, Oracle& oracle, const BruteForceOptions& opts = {});

/// Fills verdict and phi_digest from ground truth.
void evaluate(AttackResult& r, const Netlist& locked, const GroundTruth& gt);

/// {recovered_key_hex, dip_count, verdict, phi_digest, seed} plus key width.
std::string report_json(const AttackResult& r);

}  // namespace topoveil
