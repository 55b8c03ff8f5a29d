#include "sparsest/rng.hpp"

namespace sparsest {

static_assert(CounterEngine::min() == 0);
static_assert(RngStream(1, 2).child(3) == RngStream(1, 2).child(3));
static_assert(!(RngStream(1, 2).child(3) == RngStream(1, 2).child(4)));

}  // namespace sparsest
