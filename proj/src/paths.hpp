#pragma once

#include <vector>

namespace tl {

// Deterministic path utilities built on iterated color reduction from the
// node IDs. Positions index the given sequence, which is traversed as a
// path in order.

// One color-reduction update: packs (index, value) of the lowest bit where
// `own` differs from `pred`. Exposed so distributed path protocols can run
// the identical update per node.
long long reduce_color(long long own, long long pred);

// Number of reduction rounds that provably brings colors bounded by `bound`
// down to at most 5. Depends only on the bound, so every participant can
// derive the same fixed round schedule.
int color_reduction_rounds(long long bound);

// Proper 3-coloring with colors {0,1,2}; ids must be distinct nonnegative.
// The reduction runs color_reduction_rounds(max(id_bound, max id)) rounds,
// so passing the same id_bound reproduces the same schedule on any
// subsequence of a shared ID space.
std::vector<int> three_color_path(const std::vector<int>& ids,
                                  long long id_bound = 0);

// Maximal independent set positions (color-class sweep). id_bound as above.
std::vector<int> max_independent_set_path(const std::vector<int>& ids,
                                          long long id_bound = 0);

// Independent set excluding both endpoints whose removal splits the path
// into components of size in [alpha, beta]; empty when the path has fewer
// than alpha nodes. Requires beta >= 2*alpha. id_bound as above.
std::vector<int> alpha_beta_independent_set(const std::vector<int>& ids,
                                            int alpha, int beta,
                                            long long id_bound = 0);

}  // namespace tl
