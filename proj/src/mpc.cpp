#include "mpc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tl::mpc {

Cluster::Cluster(int machines, long long n, long long m, Config cfg)
    : machines_(machines), cfg_(cfg) {
  if (machines < 1) throw std::invalid_argument("need at least one machine");
  if (cfg_.delta <= 0.0 || cfg_.delta >= 1.0)
    throw std::invalid_argument("delta must lie in (0,1)");
  long long base = static_cast<long long>(
      std::ceil(std::pow(static_cast<double>(std::max<long long>(n, 1)),
                         cfg_.delta) -
                1e-9));
  base = std::max<long long>(base, 1);
  fanout_ = std::max<long long>(base, 2);
  local_capacity_ = cfg_.c_local * base;
  global_capacity_ = cfg_.c_global * std::max<long long>(m, 1);
}

int Cluster::tree_depth() const {
  int depth = 0;
  long long reach = 1, level = 1;
  while (reach < machines_) {
    level *= fanout_;
    reach += level;
    ++depth;
  }
  return depth;
}

RoundTrace Cluster::superstep(const Emit& emit, const Apply& apply,
                              const Resident& resident) {
  auto run_emit = [&](bool reversed) {
    std::vector<Message> msgs;
    auto emit_one = [&](int i) {
      emit(i, [&](int to, std::vector<Word> words) {
        if (to < 0 || to >= machines_)
          throw std::invalid_argument("message to unknown machine");
        msgs.push_back({i, to, std::move(words)});
      });
    };
    if (reversed)
      for (int i = machines_ - 1; i >= 0; --i) emit_one(i);
    else
      for (int i = 0; i < machines_; ++i) emit_one(i);
    return msgs;
  };
  std::vector<Message> msgs = run_emit(cfg_.reverse_order);
  if (cfg_.nondeterminism_check) {
    std::vector<Message> other = run_emit(!cfg_.reverse_order);
    auto key = [](const Message& m) {
      return std::make_tuple(m.from, m.to, m.words);
    };
    auto canon = [&](std::vector<Message> v) {
      std::stable_sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
        return key(a) < key(b);
      });
      return v;
    };
    auto a = canon(msgs), b = canon(other);
    bool equal = a.size() == b.size();
    for (std::size_t i = 0; equal && i < a.size(); ++i)
      equal = key(a[i]) == key(b[i]);
    if (!equal) throw NondeterminismDetected();
  }
  // Deliver sorted by (sender, emission order): emission order within one
  // sender is already stable, so a stable sort by sender suffices.
  std::stable_sort(msgs.begin(), msgs.end(),
                   [](const Message& a, const Message& b) {
                     return a.from < b.from;
                   });
  std::vector<std::vector<Message>> inbox(machines_);
  std::vector<long long> sent(machines_, 0), received(machines_, 0);
  long long total_messages = 0, message_words = 0;
  for (auto& m : msgs) {
    long long w = static_cast<long long>(m.words.size());
    sent[m.from] += w;
    received[m.to] += w;
    message_words += w;
    ++total_messages;
    inbox[m.to].push_back(std::move(m));
  }
  for (int i = 0; i < machines_; ++i) apply(i, inbox[i]);

  RoundTrace t;
  t.round = static_cast<long long>(trace_.size());
  t.messages = total_messages;
  long long global = message_words;
  for (int i = 0; i < machines_; ++i) {
    long long res = resident(i);
    long long charge = res + sent[i] + received[i];
    global += res;
    t.peak_local_words = std::max(t.peak_local_words, charge);
    if (charge > local_capacity_)
      throw MemoryViolation(i, charge, local_capacity_);
  }
  t.global_words = global;
  if (global > global_capacity_)
    throw MemoryViolation(-1, global, global_capacity_);
  peak_local_ = std::max(peak_local_, t.peak_local_words);
  peak_global_ = std::max(peak_global_, t.global_words);
  trace_.push_back(t);
  return t;
}

Word Cluster::broadcast(Word value, const Resident& resident) {
  int depth = tree_depth();
  std::vector<char> has(machines_, 0);
  std::vector<Word> held(machines_, 0);
  has[0] = 1;
  held[0] = value;
  for (int level = 0; level < depth; ++level) {
    superstep(
        [&](int i, const Send& send) {
          if (!has[i]) return;
          for (long long c = 1; c <= fanout_; ++c) {
            long long child = static_cast<long long>(i) * fanout_ + c;
            if (child >= machines_) break;
            send(static_cast<int>(child), {held[i]});
          }
        },
        [&](int i, const std::vector<Message>& in) {
          for (const auto& m : in) {
            has[i] = 1;
            held[i] = m.words.at(0);
          }
        },
        [&](int i) { return resident(i) + (has[i] ? 1 : 0); });
  }
  return value;
}

Word Cluster::convergecast(const std::vector<Word>& values,
                           const std::function<Word(Word, Word)>& combine,
                           const Resident& resident) {
  int depth = tree_depth();
  std::vector<Word> acc(values);
  // Machines at tree level d send their accumulated value to their parent
  // when the deepest remaining level is d.
  auto level_of = [&](int machine) {
    int lvl = 0;
    while (machine > 0) {
      machine = tree_parent(machine);
      ++lvl;
    }
    return lvl;
  };
  std::vector<int> level(machines_);
  for (int i = 0; i < machines_; ++i) level[i] = level_of(i);
  for (int d = depth; d >= 1; --d) {
    superstep(
        [&](int i, const Send& send) {
          if (level[i] == d) send(tree_parent(i), {acc[i]});
        },
        [&](int i, const std::vector<Message>& in) {
          for (const auto& m : in) acc[i] = combine(acc[i], m.words.at(0));
        },
        [&](int i) { return resident(i) + 1; });
  }
  return acc[0];
}

bool Cluster::all_done(const std::vector<char>& flags,
                       const Resident& resident) {
  std::vector<Word> values(machines_, 1);
  for (int i = 0; i < machines_ && i < static_cast<int>(flags.size()); ++i)
    values[i] = flags[i] ? 1 : 0;
  Word conj = convergecast(
      values, [](Word a, Word b) { return a != 0 && b != 0 ? 1 : 0; },
      resident);
  broadcast(conj, resident);
  return conj != 0;
}

std::string Cluster::trace_csv() const {
  std::ostringstream out;
  out << "round,messages,peak_local_words,global_words\n";
  for (const auto& t : trace_)
    out << t.round << "," << t.messages << "," << t.peak_local_words << ","
        << t.global_words << "\n";
  return out.str();
}

}  // namespace tl::mpc
