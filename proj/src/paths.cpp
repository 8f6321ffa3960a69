#include "paths.hpp"

#include <cassert>
#include <stdexcept>

namespace tl {

namespace {

// One color-reduction round; the first node uses a virtual predecessor of a
// different color.
std::vector<long long> reduce_round(const std::vector<long long>& c) {
  std::vector<long long> next(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    long long pred = i == 0 ? (c[0] == 0 ? 1 : 0) : c[i - 1];
    next[i] = reduce_color(c[i], pred);
  }
  return next;
}

}  // namespace

long long reduce_color(long long own, long long pred) {
  long long diff = own ^ pred;
  int bit = 0;
  while (((diff >> bit) & 1) == 0) ++bit;
  return 2 * bit + ((own >> bit) & 1);
}

int color_reduction_rounds(long long bound) {
  int rounds = 0;
  while (bound > 5) {
    int log2b = 0;
    while ((bound >> (log2b + 1)) != 0) ++log2b;
    bound = 2 * log2b + 1;
    ++rounds;
  }
  return rounds;
}

std::vector<int> three_color_path(const std::vector<int>& ids,
                                  long long id_bound) {
  std::vector<long long> c(ids.begin(), ids.end());
  if (c.empty()) return {};
  long long maxc = id_bound;
  for (long long x : c) maxc = std::max(maxc, x);
  int rounds = color_reduction_rounds(maxc);
  for (int t = 0; t < rounds; ++t) c = reduce_round(c);
  // Shave colors 5,4,3: each class is an independent set, recolored to the
  // smallest color unused by its neighbors.
  for (long long shave = 5; shave >= 3; --shave) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] != shave) continue;
      long long left = i == 0 ? -1 : c[i - 1];
      long long right = i + 1 == c.size() ? -1 : c[i + 1];
      for (long long col = 0; col < 3; ++col)
        if (col != left && col != right) {
          c[i] = col;
          break;
        }
    }
  }
  return std::vector<int>(c.begin(), c.end());
}

std::vector<int> max_independent_set_path(const std::vector<int>& ids,
                                          long long id_bound) {
  std::vector<int> color = three_color_path(ids, id_bound);
  std::vector<char> picked(ids.size(), 0);
  for (int cls = 0; cls < 3; ++cls)
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (color[i] != cls || picked[i]) continue;
      bool blocked = (i > 0 && picked[i - 1]) ||
                     (i + 1 < ids.size() && picked[i + 1]);
      if (!blocked) picked[i] = 1;
    }
  std::vector<int> out;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (picked[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> alpha_beta_independent_set(const std::vector<int>& ids,
                                            int alpha, int beta,
                                            long long id_bound) {
  if (alpha < 1 || beta < 2 * alpha)
    throw std::invalid_argument("need 1 <= alpha and beta >= 2*alpha");
  int len = static_cast<int>(ids.size());
  if (len < alpha) return {};
  std::vector<int> color = three_color_path(ids, id_bound);
  std::vector<int> picks;
  int last = -1;
  for (int i = 1; i <= len - 2; ++i) {
    int gap = i - last - 1;
    bool minimum = color[i] < (i > 0 ? color[i - 1] : 3) &&
                   color[i] < (i + 1 < len ? color[i + 1] : 3);
    if ((minimum && gap >= alpha && gap <= beta) || gap == beta) {
      picks.push_back(i);
      last = i;
    }
  }
  // Spacing repairs on the tail component.
  int tail = len - 1 - last;
  if (last == -1) {
    if (len > beta) {
      picks.push_back(len - 1 - alpha);  // split into [beta-ish, alpha]
    }
  } else if (tail < alpha) {
    int need = alpha - tail;
    int prev = picks.size() >= 2 ? picks[picks.size() - 2] : -1;
    int gap_before = last - prev - 1;
    if (gap_before - need >= alpha) {
      picks.back() = last - need;
    } else {
      picks.pop_back();  // merged component is < 2*alpha + 1 <= beta + 1
    }
  } else if (tail > beta) {
    picks.push_back(len - 1 - alpha);
  }
  return picks;
}

}  // namespace tl
