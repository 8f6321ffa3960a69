#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tl::mpc {

using Word = long long;

struct Config {
  double delta = 0.5;
  long long c_local = 8;
  long long c_global = 16;
  bool reverse_order = false;      // evaluate machines in reverse within steps
  bool nondeterminism_check = false;  // double-evaluate and compare outboxes
};

struct RoundTrace {
  long long round = 0;
  long long messages = 0;
  long long peak_local_words = 0;
  long long global_words = 0;
};

struct MemoryViolation : std::runtime_error {
  int machine;
  long long words, capacity;
  MemoryViolation(int machine, long long words, long long capacity)
      : std::runtime_error("memory violation: machine " +
                           std::to_string(machine) + " uses " +
                           std::to_string(words) + " words, capacity " +
                           std::to_string(capacity)),
        machine(machine),
        words(words),
        capacity(capacity) {}
};

struct NondeterminismDetected : std::runtime_error {
  NondeterminismDetected()
      : std::runtime_error(
            "nondeterminism detected: outboxes differ across evaluation "
            "orders") {}
};

struct Message {
  int from = 0;
  int to = 0;
  std::vector<Word> words;
};

// Synchronous-superstep cluster with one virtual machine per node. Capacity
// accounting follows the word model: per round, a machine is charged its
// resident words plus the words it sent and received; the global charge is
// the sum over machines.
class Cluster {
 public:
  // n and m size the capacities: local = c_local * ceil(n^delta), global =
  // c_global * max(m, 1).
  Cluster(int machines, long long n, long long m, Config cfg);

  int machines() const { return machines_; }
  const Config& config() const { return cfg_; }
  long long local_capacity() const { return local_capacity_; }
  long long global_capacity() const { return global_capacity_; }

  using Send = std::function<void(int to, std::vector<Word> words)>;
  using Emit = std::function<void(int machine, const Send& send)>;
  using Apply = std::function<void(int machine, const std::vector<Message>&)>;
  using Resident = std::function<long long(int machine)>;

  // Runs one round: emit per machine (pure w.r.t. shared state), deliver at
  // the barrier (inboxes sorted by sender then emission order), apply per
  // machine, then charge the ledger against resident words.
  RoundTrace superstep(const Emit& emit, const Apply& apply,
                       const Resident& resident);

  // Appendix-style fanout tree over machine addresses 0..M-1, fanout
  // ceil(n^delta), children of k are k*f+1 .. k*f+f.
  long long fanout() const { return fanout_; }
  int tree_depth() const;
  int tree_parent(int machine) const { return (machine - 1) / static_cast<int>(fanout_); }

  // Collectives; each consumes tree_depth() rounds (0 when M == 1).
  // Values/flags are indexed by machine. Every machine learns the result.
  Word broadcast(Word value, const Resident& resident);
  Word convergecast(const std::vector<Word>& values,
                    const std::function<Word(Word, Word)>& combine,
                    const Resident& resident);
  bool all_done(const std::vector<char>& flags, const Resident& resident);

  const std::vector<RoundTrace>& trace() const { return trace_; }
  long long rounds() const { return static_cast<long long>(trace_.size()); }
  long long peak_local_words() const { return peak_local_; }
  long long peak_global_words() const { return peak_global_; }
  std::string trace_csv() const;

 private:
  int machines_;
  Config cfg_;
  long long local_capacity_ = 0;
  long long global_capacity_ = 0;
  long long fanout_ = 2;
  std::vector<RoundTrace> trace_;
  long long peak_local_ = 0;
  long long peak_global_ = 0;
};

}  // namespace tl::mpc
